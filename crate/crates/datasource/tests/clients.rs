use std::collections::BTreeSet;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use combine_core::CellValue;
use combine_datasource::cache::DiskCache;
use combine_datasource::{
    active_targets, bundled_fixtures_dir, verify_dir, Config, DataError, FailingTransport, FixtureStore, HttpClient,
    RecordingTransport, Request, Response, RetryPolicy, Sources, Threshold, Transport,
};

const ASPIRIN: &str = "CC(=O)Oc1ccccc1C(=O)O";
const ASPIRIN_KEY: &str = "BSYNRYMUTXBXSQ-UHFFFAOYSA-N";

fn offline_sources() -> (Sources, Arc<FailingTransport>) {
    let config = Config::offline(bundled_fixtures_dir());
    let net = Arc::new(FailingTransport::new());
    let http = Arc::new(HttpClient::from_config_with(&config, net.clone()).unwrap());
    assert!(http.is_offline());
    (Sources::with_client(&config, http), net)
}

#[test]
fn bundled_fixtures_are_well_formed() {
    let issues = verify_dir(&bundled_fixtures_dir(), false).unwrap();
    assert!(issues.is_empty(), "{issues:?}");
    assert!(FixtureStore::open(&bundled_fixtures_dir()).unwrap().len() >= 19);
}

#[test]
fn similarity_search_sorted_and_contains_query() {
    let (src, net) = offline_sources();
    let hits = src.chembl.similarity_search(ASPIRIN, 90).unwrap();
    assert_eq!(hits.len(), 3);
    let scores: Vec<f64> = hits.iter().map(|h| h.similarity.unwrap()).collect();
    assert!(scores.windows(2).all(|w| w[0] >= w[1]), "{scores:?}");
    assert!(scores.iter().all(|&s| s >= 90.0));
    assert_eq!(hits[0].chembl_id, "CHEMBL25");
    let exact = src.chembl.similarity_search(ASPIRIN, 100).unwrap();
    assert!(exact.iter().any(|h| h.chembl_id == "CHEMBL25"));
    assert_eq!(net.attempts(), 0);
}

#[test]
fn invalid_inputs_rejected_before_any_request() {
    let (src, net) = offline_sources();
    assert!(matches!(src.chembl.similarity_search(ASPIRIN, 39), Err(DataError::Validation(_))));
    assert!(matches!(src.chembl.similarity_search(ASPIRIN, 101), Err(DataError::Validation(_))));
    assert!(matches!(src.chembl.similarity_search("C1CC", 90), Err(DataError::Validation(_))));
    assert!(matches!(src.chembl.substructure_search("c1cc(", ), Err(DataError::Validation(_))));
    assert!(matches!(src.chembl.fetch_activities("25", 6.0), Err(DataError::Validation(_))));
    assert!(matches!(src.unichem.xrefs("aspirin"), Err(DataError::Validation(_))));
    assert!(matches!(src.pdb.fetch("ZZZZZ"), Err(DataError::Validation(_))));
    assert_eq!(net.attempts(), 0);
}

#[test]
fn substructure_results() {
    let (src, _) = offline_sources();
    let hits = src.chembl.substructure_search("c1ccccc1").unwrap();
    let ids: Vec<&str> = hits.iter().map(|h| h.chembl_id.as_str()).collect();
    assert_eq!(ids, ["CHEMBL277500", "CHEMBL9113", "CHEMBL25"]);
    assert!(src.chembl.substructure_search("C1CC2CC1C1CC21").unwrap().is_empty());
}

#[test]
fn activities_threshold_follows_pages() {
    let (src, _) = offline_sources();
    let acts = src.chembl.fetch_activities("CHEMBL25", 6.0).unwrap();
    let mut p: Vec<f64> = acts.iter().map(|a| a.pchembl.unwrap()).collect();
    p.sort_by(f64::total_cmp);
    assert_eq!(p, [6.0, 7.2, 8.3]);
    let strict = src.chembl.fetch_activities_with("CHEMBL25", 6.0, Threshold::Above).unwrap();
    assert_eq!(strict.len(), 2);
    let targets = active_targets(&acts);
    assert_eq!(targets, BTreeSet::from(["CHEMBL221".to_string(), "CHEMBL230".to_string()]));
    assert!(src.chembl.fetch_activities("CHEMBL999999999", 6.0).unwrap().is_empty());
}

#[test]
fn activities_malformed_payloads() {
    let (src, _) = offline_sources();
    assert!(matches!(src.chembl.fetch_activities("CHEMBL1", 6.0), Err(DataError::InvalidRecord(_))));
    match src.chembl.fetch_activities("CHEMBL2", 6.0) {
        Err(DataError::Parse { offset, .. }) => assert!(offset > 0),
        other => panic!("unexpected {other:?}"),
    }
    assert!(matches!(src.chembl.fetch_activities("CHEMBL3", 6.0), Err(DataError::UnrecordedFixture(_))));
}

#[test]
fn compound_lookup() {
    let (src, _) = offline_sources();
    let c = src.chembl.fetch_compound("CHEMBL25").unwrap();
    assert_eq!(c.inchikey.as_deref(), Some(ASPIRIN_KEY));
    assert_eq!(c.name.as_deref(), Some("ASPIRIN"));
}

#[test]
fn unichem_xrefs() {
    let (src, _) = offline_sources();
    let refs = src.unichem.xrefs(ASPIRIN_KEY).unwrap();
    let names: Vec<(&str, &str)> = refs.iter().map(|r| (r.source_name.as_str(), r.compound_id.as_str())).collect();
    assert_eq!(names, [("ChEMBL", "CHEMBL25"), ("DrugBank", "DB00945"), ("PubChem", "2244")]);
    assert!(src.unichem.xrefs("AAAAAAAAAAAAAA-BBBBBBBBBB-C").unwrap().is_empty());
}

#[test]
fn uniprot_records() {
    let (src, _) = offline_sources();
    let t = src.uniprot.fetch("P09581").unwrap();
    assert_eq!(t.organism, "Mus musculus");
    assert!(t.sequence.starts_with('M') && t.sequence.len() > 900);
    assert!(matches!(src.uniprot.fetch("Q00000"), Err(DataError::InvalidRecord(_))));
    assert!(matches!(src.uniprot.fetch("A0A000"), Err(DataError::NotFound(_))));
}

#[test]
fn pdb_entry_with_lazy_image() {
    let (src, _) = offline_sources();
    let e = src.pdb.fetch("1m63").unwrap();
    assert_eq!(e.id, "1M63");
    assert_eq!(e.method.as_deref(), Some("X-RAY DIFFRACTION"));
    assert_eq!(e.resolution, Some(2.8));
    match &e.image {
        CellValue::RemoteRef { url, .. } => {
            assert_eq!(url, "https://cdn.rcsb.org/images/structures/m6/1m63/1m63_assembly-1.jpeg");
            let bytes = combine_core::Fetcher::fetch(src.http.as_ref(), url).unwrap();
            assert_eq!(&bytes[..2], &[0xFF, 0xD8]);
        }
        other => panic!("unexpected {other:?}"),
    }
    assert!(matches!(src.pdb.fetch("9ZZZ"), Err(DataError::NotFound(_))));
}

/// Serves a fixed body, recording concurrency and start times.
#[derive(Default)]
struct Stub {
    calls: AtomicUsize,
    in_flight: AtomicUsize,
    peak: AtomicUsize,
    starts: Mutex<Vec<Instant>>,
    fail_first: usize,
    status_first: Option<u16>,
    hold: Duration,
}

impl Transport for Stub {
    fn execute(&self, _req: &Request) -> combine_datasource::Result<Response> {
        let n = self.calls.fetch_add(1, Ordering::SeqCst);
        self.starts.lock().unwrap().push(Instant::now());
        let now = self.in_flight.fetch_add(1, Ordering::SeqCst) + 1;
        self.peak.fetch_max(now, Ordering::SeqCst);
        std::thread::sleep(self.hold);
        self.in_flight.fetch_sub(1, Ordering::SeqCst);
        if n < self.fail_first {
            return match self.status_first {
                Some(s) => Ok(Response { status: s, body: Vec::new() }),
                None => Err(DataError::Transport { url: String::new(), message: "reset".into() }),
            };
        }
        Ok(Response::ok(format!("body {n}")))
    }
}

fn req(i: usize) -> Request {
    Request::get(&format!("https://api.example/item/{i}.json")).unwrap()
}

#[test]
fn at_most_four_in_flight_per_host() {
    let stub = Arc::new(Stub { hold: Duration::from_millis(20), ..Default::default() });
    let client = Arc::new(HttpClient::live(stub.clone()));
    std::thread::scope(|s| {
        for i in 0..16 {
            let client = client.clone();
            s.spawn(move || client.get(&req(i)).unwrap());
        }
    });
    assert_eq!(stub.calls.load(Ordering::SeqCst), 16);
    let peak = stub.peak.load(Ordering::SeqCst);
    assert!(peak <= 4 && peak >= 2, "peak {peak}");
}

#[test]
fn request_starts_are_spaced() {
    let stub = Arc::new(Stub::default());
    let client = HttpClient::live(stub.clone()).with_limits(4, Duration::from_millis(30));
    for i in 0..4 {
        client.get(&req(i)).unwrap();
    }
    let starts = stub.starts.lock().unwrap().clone();
    for w in starts.windows(2) {
        assert!(w[1] - w[0] >= Duration::from_millis(29), "{:?}", w[1] - w[0]);
    }
}

#[test]
fn transient_failures_are_retried() {
    let policy = RetryPolicy { attempts: 3, base_delay: Duration::from_millis(5) };
    let stub = Arc::new(Stub { fail_first: 2, ..Default::default() });
    let client = HttpClient::live(stub.clone()).with_retry(policy);
    assert_eq!(client.get(&req(0)).unwrap().body, b"body 2");

    let stub = Arc::new(Stub { fail_first: 5, status_first: Some(503), ..Default::default() });
    let client = HttpClient::live(stub.clone()).with_retry(policy);
    assert!(matches!(client.get(&req(0)), Err(DataError::Status { status: 503, .. })));
    assert_eq!(stub.calls.load(Ordering::SeqCst), 3);

    let stub = Arc::new(Stub { fail_first: 5, status_first: Some(400), ..Default::default() });
    let client = HttpClient::live(stub.clone()).with_retry(policy);
    assert!(matches!(client.get(&req(0)), Err(DataError::Status { status: 400, .. })));
    assert_eq!(stub.calls.load(Ordering::SeqCst), 1);
}

#[test]
fn cache_hits_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let stub = Arc::new(Stub::default());
    let client = HttpClient::live(stub.clone()).with_disk_cache(DiskCache::new(dir.path(), Duration::from_secs(60)));
    let first = client.get(&req(7)).unwrap();
    let again = client.get(&req(7)).unwrap();
    assert_eq!(first, again);
    assert_eq!(stub.calls.load(Ordering::SeqCst), 1);

    // A fresh client still hits the disk cache.
    let stub2 = Arc::new(Stub::default());
    let client2 = HttpClient::live(stub2.clone()).with_disk_cache(DiskCache::new(dir.path(), Duration::from_secs(60)));
    assert_eq!(client2.get(&req(7)).unwrap(), first);
    assert_eq!(stub2.calls.load(Ordering::SeqCst), 0);
}

#[test]
fn recorded_fixtures_replay_offline() {
    let dir = tempfile::tempdir().unwrap();
    let recorder = Arc::new(RecordingTransport::new(Stub::default(), dir.path()));
    let live = HttpClient::live(recorder.clone());
    let a = live.get(&req(1)).unwrap();
    let b = live.get(&Request::get("https://api.example/q?b=2&a=1").unwrap()).unwrap();
    assert_eq!(recorder.written().len(), 2);
    assert!(verify_dir(dir.path(), false).unwrap().is_empty());

    let offline = HttpClient::offline(FixtureStore::open(dir.path()).unwrap());
    assert_eq!(offline.get(&req(1)).unwrap(), a);
    assert_eq!(offline.get(&Request::get("https://api.example/q?a=1&b=2").unwrap()).unwrap(), b);
    assert!(matches!(offline.get(&req(2)), Err(DataError::UnrecordedFixture(_))));
}

#[test]
fn misnamed_fixtures_are_reported_and_fixed() {
    let dir = tempfile::tempdir().unwrap();
    let doc = r#"{"request":"GET https://api.example/x.json","status":200,"body":"{}"}"#;
    std::fs::write(dir.path().join("readable-name.json"), doc).unwrap();
    assert_eq!(verify_dir(dir.path(), false).unwrap().len(), 1);
    assert!(verify_dir(dir.path(), true).unwrap().is_empty());
    assert!(verify_dir(dir.path(), false).unwrap().is_empty());
}

#[test]
fn offline_env_never_touches_network() {
    let config = Config::from_lookup(|k| match k {
        "COMBINE_OFFLINE" => Some("1".into()),
        _ => None,
    });
    assert!(config.offline);
    let net = Arc::new(FailingTransport::new());
    let http = HttpClient::from_config_with(&config, net.clone()).unwrap();
    let _ = http.get(&req(0));
    let _ = http.get(&Request::get("https://rest.uniprot.org/uniprotkb/P09581.json").unwrap());
    assert_eq!(net.attempts(), 0);
}
