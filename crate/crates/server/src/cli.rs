//! The `rdfsheet` command line.

use std::ffi::OsString;
use std::io::Write;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Parser, Subcommand};
use rdfsheet_core::mapping::log::{read_log_file, replay_log, LOG_FILE};
use rdfsheet_core::metrics::MetricsReport;
use rdfsheet_core::rdf::RdfFormat;

use crate::api;
use crate::session::{Registry, ServiceConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;

pub const DATA_DIR_ENV: &str = "RDFSHEET_DATA_DIR";

#[derive(Debug, Parser)]
#[command(name = "rdfsheet", version, about = "Spreadsheet-style RDF authoring service")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the HTTP service.
    Serve {
        #[arg(long, default_value = "127.0.0.1:8080")]
        addr: SocketAddr,
        /// Persist workbooks here; without it they live in memory only.
        #[arg(long, env = DATA_DIR_ENV)]
        data_dir: Option<PathBuf>,
        /// Write a snapshot every N revisions (0 disables).
        #[arg(long, default_value_t = 1000)]
        snapshot_every: u64,
    },
    /// Replay a workbook edit log and write its graph.
    Convert {
        /// An `edits.log` file or the workbook directory holding it.
        log: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "ntriples")]
        format: RdfFormat,
    },
    /// Print ontology metrics for an RDF file.
    Metrics {
        file: PathBuf,
        /// Defaults to the file extension (.nt or .ttl).
        #[arg(long)]
        format: Option<RdfFormat>,
        #[arg(long)]
        json: bool,
    },
    /// Download a workbook's graph from a running server.
    Export {
        #[arg(long, default_value = "http://127.0.0.1:8080")]
        server: String,
        #[arg(long)]
        workbook: String,
        #[arg(long, default_value = "ntriples")]
        format: RdfFormat,
        /// Write here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Upload an RDF document into a workbook on a running server.
    Import {
        #[arg(long, default_value = "http://127.0.0.1:8080")]
        server: String,
        #[arg(long)]
        workbook: String,
        file: PathBuf,
        #[arg(long)]
        format: Option<RdfFormat>,
        /// Also adopt the document's namespace prefixes.
        #[arg(long)]
        vocabulary: bool,
    },
}

#[derive(Debug, thiserror::Error)]
#[error("{0}")]
struct DataError(String);

fn data_err(e: impl std::fmt::Display) -> DataError {
    DataError(e.to_string())
}

fn read_file(path: &Path) -> Result<String, DataError> {
    std::fs::read_to_string(path).map_err(|e| DataError(format!("{}: {e}", path.display())))
}

fn format_of(path: &Path, explicit: Option<RdfFormat>) -> Result<RdfFormat, DataError> {
    explicit
        .or_else(|| {
            path.extension()
                .and_then(|e| e.to_str())
                .and_then(RdfFormat::from_extension)
        })
        .ok_or_else(|| DataError(format!("cannot tell the format of {}; pass --format", path.display())))
}

fn format_name(f: RdfFormat) -> &'static str {
    match f {
        RdfFormat::NTriples => "ntriples",
        RdfFormat::Turtle => "turtle",
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(cli.command) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_DATA
        }
    }
}

fn execute(command: Command) -> Result<(), DataError> {
    match command {
        Command::Serve {
            addr,
            data_dir,
            snapshot_every,
        } => serve(addr, data_dir, snapshot_every),
        Command::Convert { log, out, format } => {
            let path = if log.is_dir() { log.join(LOG_FILE) } else { log };
            let (header, records) = read_log_file(&path).map_err(|e| DataError(format!("{}: {e}", path.display())))?;
            let wb = replay_log(&header, &records).map_err(data_err)?;
            std::fs::write(&out, wb.export(format)).map_err(data_err)
        }
        Command::Metrics { file, format, json } => {
            let format = format_of(&file, format)?;
            let text = read_file(&file)?;
            let graph = format
                .parse(&text)
                .map_err(|e| DataError(format!("{}: {e}", file.display())))?;
            let report = MetricsReport::compute(&graph);
            if json {
                println!("{}", report.to_json());
            } else {
                print!("{report}");
            }
            Ok(())
        }
        Command::Export {
            server,
            workbook,
            format,
            out,
        } => {
            let url = format!(
                "{}/workbooks/{workbook}/export?format={}",
                server.trim_end_matches('/'),
                format_name(format)
            );
            let body = http(reqwest::blocking::Client::new().get(url))?;
            match out {
                Some(p) => std::fs::write(p, body).map_err(data_err),
                None => std::io::stdout().write_all(body.as_bytes()).map_err(data_err),
            }
        }
        Command::Import {
            server,
            workbook,
            file,
            format,
            vocabulary,
        } => {
            let format = format_of(&file, format)?;
            let document = read_file(&file)?;
            let url = format!(
                "{}/workbooks/{workbook}/import?format={}&vocabulary={vocabulary}",
                server.trim_end_matches('/'),
                format_name(format)
            );
            let body = http(reqwest::blocking::Client::new().post(url).body(document))?;
            println!("{body}");
            Ok(())
        }
    }
}

fn http(req: reqwest::blocking::RequestBuilder) -> Result<String, DataError> {
    let resp = req.send().map_err(data_err)?;
    let status = resp.status();
    let body = resp.text().map_err(data_err)?;
    if !status.is_success() {
        return Err(DataError(format!("server answered {status}: {body}")));
    }
    Ok(body)
}

fn serve(addr: SocketAddr, data_dir: Option<PathBuf>, snapshot_every: u64) -> Result<(), DataError> {
    if let Some(d) = &data_dir {
        std::fs::create_dir_all(d).map_err(data_err)?;
    }
    let config = ServiceConfig {
        data_dir,
        snapshot_every,
        ..ServiceConfig::default()
    };
    let runtime = tokio::runtime::Runtime::new().map_err(data_err)?;
    runtime.block_on(async move {
        let listener = tokio::net::TcpListener::bind(addr).await.map_err(data_err)?;
        let local = listener.local_addr().map_err(data_err)?;
        println!("listening on http://{local}");
        let _ = std::io::stdout().flush();
        let app = api::router(Arc::new(Registry::new(config)));
        axum::serve(listener, app)
            .with_graceful_shutdown(async {
                let _ = tokio::signal::ctrl_c().await;
            })
            .await
            .map_err(data_err)
    })
}
