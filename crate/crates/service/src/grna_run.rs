//! gRNA design over FASTA inputs, shared by the endpoint and the CLI.

use std::fmt::Write;

use combine_grna::{design, parse_fasta, Dedupe, GcRegion, OffTargetReport, Pam, SiteOptions};
use serde::{Deserialize, Serialize};

use crate::error::ApiResult;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GrnaRequest {
    /// FASTA text or a bare sequence.
    pub query: String,
    pub reference: String,
    #[serde(default)]
    pub pam: Option<String>,
    #[serde(default)]
    pub keep_first: bool,
    #[serde(default)]
    pub gc_over_site: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QueryResult {
    pub record: String,
    pub reports: Vec<OffTargetReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrnaResponse {
    pub pam: String,
    pub results: Vec<QueryResult>,
}

pub fn options(req: &GrnaRequest) -> ApiResult<SiteOptions> {
    let mut opts = SiteOptions::default();
    if let Some(p) = &req.pam {
        opts.pam = p.parse::<Pam>()?;
    }
    if req.keep_first {
        opts.dedupe = Dedupe::KeepFirst;
    }
    if req.gc_over_site {
        opts.gc_region = GcRegion::Site;
    }
    Ok(opts)
}

/// Sites and off-target reports for every query record.
pub fn run(req: &GrnaRequest) -> ApiResult<GrnaResponse> {
    let opts = options(req)?;
    let queries = parse_fasta(&req.query)?;
    let refs = parse_fasta(&req.reference)?;
    let results = queries
        .iter()
        .map(|q| Ok(QueryResult { record: q.name.clone(), reports: design(q, &refs, &opts)? }))
        .collect::<ApiResult<_>>()?;
    Ok(GrnaResponse { pam: opts.pam.as_str().to_string(), results })
}

pub const TABLE_HEADER: &str = "query\tposition\tstrand\tsequence\tprotospacer\tpam\tgc\toff_1mm\toff_2mm\texact";

/// Tab-separated table, one line per site.
pub fn to_table(resp: &GrnaResponse) -> String {
    let mut out = String::from(TABLE_HEADER);
    out.push('\n');
    for q in &resp.results {
        for r in &q.reports {
            let s = &r.site;
            let exact = r.loci.iter().filter(|l| l.exact).count();
            writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{}\t{:.1}\t{}\t{}\t{}",
                q.record, s.position, s.strand, s.sequence, s.protospacer, s.pam, s.gc, r.one_mismatch, r.two_mismatches, exact
            )
            .unwrap();
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn req(query: String, reference: String) -> GrnaRequest {
        GrnaRequest { query, reference, ..Default::default() }
    }

    #[test]
    fn constructed_single_substitution() {
        let site = format!("{}CGG", "A".repeat(20));
        let copy = format!("{}C{}CGG", "A".repeat(5), "A".repeat(14));
        let resp = run(&req(site.clone(), format!(">r\n{site}TTTT{copy}\n"))).unwrap();
        let r = &resp.results[0].reports[0];
        assert_eq!((r.one_mismatch, r.two_mismatches), (1, 0));
        let table = to_table(&resp);
        assert_eq!(table.lines().nth(1).unwrap(), format!("sequence\t0\t+\t{site}\t{}\tCGG\t0.0\t1\t0\t1", "A".repeat(20)));
    }

    #[test]
    fn mutated_pam_is_excluded() {
        let site = format!("{}CGG", "A".repeat(20));
        let copy = format!("{}C{}CTT", "A".repeat(5), "A".repeat(14));
        let resp = run(&req(site.clone(), format!("{site}TTTT{copy}"))).unwrap();
        let r = &resp.results[0].reports[0];
        assert_eq!((r.one_mismatch, r.two_mismatches), (0, 0));
    }

    #[test]
    fn minus_strand_example() {
        let q = format!("CCG{}", "T".repeat(20));
        let resp = run(&req(q.clone(), q)).unwrap();
        let s = &resp.results[0].reports[0].site;
        assert_eq!(s.sequence, format!("{}CGG", "A".repeat(20)));
        assert_eq!(s.strand.to_string(), "-");
    }
}
