//! Command-line entry point. Exit codes: 0 success, 1 validation failure,
//! 2 I/O, transport or usage failure.

use std::ffi::OsString;
use std::io::Write;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Duration;

use clap::{Parser, Subcommand};
use combine_analysis::Linkage;
use combine_core::{load_unvalidated, CoreError};
use combine_datasource::{verify_dir, Config, HttpClient, HttpTransport, RecordingTransport, Request, Transport};

use crate::api::{self, AppState};
use crate::config::ServerConfig;
use crate::error::{ApiError, ErrorCode};
use crate::grna_run::{self, GrnaRequest};
use crate::pyramids::{self, BuildRequest};
use crate::store::NetworkStore;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_FAILURE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "combine", version, about = "Knowledge-network workbench server and tools")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the HTTP API.
    Serve {
        #[arg(long, default_value = crate::config::DEFAULT_LISTEN)]
        listen: SocketAddr,
        #[arg(long, default_value = "combine-data")]
        data_dir: PathBuf,
        #[arg(long)]
        tile_cache: Option<usize>,
        #[arg(long)]
        lod_threshold: Option<f64>,
        /// single, complete or average
        #[arg(long)]
        linkage: Option<String>,
    },
    /// Network documents.
    Net {
        #[command(subcommand)]
        command: NetCommand,
    },
    /// Tile pyramids.
    Pyramid {
        #[command(subcommand)]
        command: PyramidCommand,
    },
    /// Design guide RNAs and print a tab-separated table.
    Grna {
        #[arg(long)]
        query: PathBuf,
        #[arg(long)]
        reference: PathBuf,
        #[arg(long)]
        pam: Option<String>,
        #[arg(long)]
        keep_first: bool,
        #[arg(long)]
        gc_over_site: bool,
    },
    /// Recorded upstream responses.
    Fixtures {
        #[command(subcommand)]
        command: FixtureCommand,
    },
}

#[derive(Subcommand, Debug)]
enum NetCommand {
    /// Write a stored network document to a file.
    Export {
        id: String,
        #[arg(long, default_value = "combine-data")]
        data_dir: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Store a network document.
    Import {
        file: PathBuf,
        #[arg(long, default_value = "combine-data")]
        data_dir: PathBuf,
    },
    /// Report every problem in a network document.
    Validate { file: PathBuf },
}

#[derive(Subcommand, Debug)]
enum PyramidCommand {
    Build {
        /// `u v [weight]` lines.
        #[arg(long)]
        edges: PathBuf,
        /// `id x y` lines; force-directed when omitted.
        #[arg(long)]
        layout: Option<PathBuf>,
        #[arg(long)]
        mst: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        iterations: Option<usize>,
        #[arg(long)]
        nodes: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Subcommand, Debug)]
enum FixtureCommand {
    /// Fetch URLs live and store each exchange as a fixture.
    Record {
        #[arg(long)]
        dir: Option<PathBuf>,
        #[arg(required = true)]
        urls: Vec<String>,
    },
    /// Check that fixture files parse and are named by request key.
    Verify {
        #[arg(long)]
        dir: Option<PathBuf>,
        #[arg(long)]
        fix: bool,
    },
}

/// Runs the CLI with `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_FAILURE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    match dispatch(cli.command, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            for (k, v) in &e.detail {
                let _ = writeln!(err, "  {k}: {v}");
            }
            exit_code(&e)
        }
    }
}

fn exit_code(e: &ApiError) -> i32 {
    match e.code.status().as_u16() {
        400 | 409 | 413 | 422 => EXIT_INVALID,
        _ => EXIT_FAILURE,
    }
}

fn read(path: &Path) -> Result<Vec<u8>, ApiError> {
    std::fs::read(path).map_err(|e| ApiError::storage(format!("{}: {e}", path.display())))
}

fn read_text(path: &Path) -> Result<String, ApiError> {
    String::from_utf8(read(path)?).map_err(|_| ApiError::bad_request(format!("{} is not UTF-8", path.display())))
}

fn dispatch(cmd: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, ApiError> {
    match cmd {
        Command::Serve { listen, data_dir, tile_cache, lod_threshold, linkage } => {
            let mut config = ServerConfig::new(data_dir, Config::from_env());
            config.listen = listen;
            if let Some(n) = tile_cache {
                config.tile_cache_size = n;
            }
            if let Some(t) = lod_threshold {
                config.lod_threshold = t;
            }
            if let Some(l) = linkage {
                config.default_linkage = l.parse::<Linkage>().map_err(ApiError::bad_request)?;
            }
            serve(config, err)
        }
        Command::Net { command } => net(command, out, err),
        Command::Pyramid { command: PyramidCommand::Build { edges, layout, mst, seed, iterations, nodes, out: dir } } => {
            let req = BuildRequest {
                edges: read_text(&edges)?,
                layout: layout.as_deref().map(read_text).transpose()?,
                use_mst: mst,
                seed,
                iterations,
                nodes,
                ..BuildRequest::default()
            };
            let pyramid = pyramids::build(&req)?;
            pyramid.write_to(&dir)?;
            let m = &pyramid.manifest;
            let _ = writeln!(out, "pyramid {} with {} tiles written to {}", m.id, m.total_tiles, dir.display());
            Ok(EXIT_OK)
        }
        Command::Grna { query, reference, pam, keep_first, gc_over_site } => {
            let req = GrnaRequest { query: read_text(&query)?, reference: read_text(&reference)?, pam, keep_first, gc_over_site };
            let resp = grna_run::run(&req)?;
            let _ = out.write_all(grna_run::to_table(&resp).as_bytes());
            Ok(EXIT_OK)
        }
        Command::Fixtures { command } => fixtures(command, out),
    }
}

fn serve(config: ServerConfig, err: &mut dyn Write) -> Result<i32, ApiError> {
    let problems = config.validate();
    if !problems.is_empty() {
        for p in &problems {
            let _ = writeln!(err, "config: {p}");
        }
        return Ok(EXIT_INVALID);
    }
    let http = Arc::new(HttpClient::from_config(&config.sources)?);
    let (state, recoveries) = AppState::open(config, http)?;
    for r in recoveries.iter().filter(|r| r.replayed > 0 || r.torn_tail) {
        tracing::warn!(network = %r.id, replayed = r.replayed, torn_tail = r.torn_tail, "recovered network");
    }
    let runtime = tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()
        .map_err(|e| ApiError::internal(e.to_string()))?;
    runtime
        .block_on(api::serve(Arc::new(state)))
        .map_err(|e| ApiError::storage(format!("server: {e}")))?;
    Ok(EXIT_OK)
}

fn net(cmd: NetCommand, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, ApiError> {
    match cmd {
        NetCommand::Export { id, data_dir, out: path } => {
            let (store, _) = NetworkStore::open(&data_dir, Arc::new(Default::default()))?;
            let bytes = store.document(&id)?;
            std::fs::write(&path, bytes).map_err(|e| ApiError::storage(format!("{}: {e}", path.display())))?;
            let _ = writeln!(out, "exported {id} to {}", path.display());
            Ok(EXIT_OK)
        }
        NetCommand::Import { file, data_dir } => {
            let bytes = read(&file)?;
            let (store, _) = NetworkStore::open(&data_dir, Arc::new(Default::default()))?;
            let id = store.import(&bytes)?;
            let _ = writeln!(out, "imported {id}");
            Ok(EXIT_OK)
        }
        NetCommand::Validate { file } => {
            let bytes = read(&file)?;
            let net = match load_unvalidated(&bytes) {
                Ok(n) => n,
                Err(e @ (CoreError::Parse { .. } | CoreError::UnsupportedVersion(_))) => {
                    let _ = writeln!(err, "{}: {e}", file.display());
                    return Ok(EXIT_INVALID);
                }
                Err(e) => return Err(e.into()),
            };
            let report = net.validate();
            for v in &report.violations {
                let _ = writeln!(out, "{:?}\t{}\t{}\t{}", v.severity, v.code, v.location, v.message);
            }
            if report.is_valid() {
                let _ = writeln!(out, "{}: valid ({} warnings)", file.display(), report.warnings().count());
                Ok(EXIT_OK)
            } else {
                let _ = writeln!(err, "{}: {} errors", file.display(), report.errors().count());
                Ok(EXIT_INVALID)
            }
        }
    }
}

fn fixtures(cmd: FixtureCommand, out: &mut dyn Write) -> Result<i32, ApiError> {
    let env = Config::from_env();
    match cmd {
        FixtureCommand::Verify { dir, fix } => {
            let dir = dir.unwrap_or(env.fixtures_dir);
            let issues = verify_dir(&dir, fix)?;
            for i in &issues {
                let _ = writeln!(out, "{}: {}", i.file.display(), i.message);
            }
            let _ = writeln!(out, "{} issues in {}", issues.len(), dir.display());
            Ok(if issues.is_empty() { EXIT_OK } else { EXIT_INVALID })
        }
        FixtureCommand::Record { dir, urls } => {
            if env.offline {
                return Err(ApiError::new(ErrorCode::NotRecorded, "recording needs network access; offline mode is on"));
            }
            let dir = dir.unwrap_or(env.fixtures_dir);
            let live = HttpTransport::new(Duration::from_secs(30))?;
            let recorder = RecordingTransport::new(live, &dir);
            for url in &urls {
                let req = Request::get(url)?;
                let resp = recorder.execute(&req)?;
                let _ = writeln!(out, "{} {url}", resp.status);
            }
            let _ = writeln!(out, "{} fixtures written to {}", recorder.written().len(), dir.display());
            Ok(EXIT_OK)
        }
    }
}
