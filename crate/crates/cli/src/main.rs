use std::net::{IpAddr, SocketAddr};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use crossroom::dataset::TtsKind;
use crossroom::recognition::DEFAULT_TAU;
use crossroom_cli::commands::{self, SimulateArgs};
use crossroom_cli::error::{CliError, Result};
use crossroom_cli::server::{self, ServiceConfig};

#[derive(Parser)]
#[command(name = "crossroom", version, about = "Speaker geometry, classroom audio simulation and keyword scoring")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Tts {
    Mock,
    Http,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate speaker geometry from an annotated frame.
    Estimate {
        annotation: PathBuf,
        /// Place speakers evenly around the estimated table instead.
        #[arg(long)]
        baseline: bool,
        /// Ground-truth distances; prints the per-speaker error table.
        #[arg(long)]
        truth: Option<PathBuf>,
        /// Geometry JSON destination (stdout when omitted).
        #[arg(long, short)]
        out: Option<PathBuf>,
        /// Also write the full response with diagnostics.
        #[arg(long)]
        diagnostics: Option<PathBuf>,
        /// Write the error report as JSON (needs --truth).
        #[arg(long, requires = "truth")]
        report: Option<PathBuf>,
    },
    /// Render mixture WAVs and a manifest from transcripts.
    Simulate {
        #[arg(long)]
        geometry: PathBuf,
        /// A transcript file, or a directory of `*.txt` transcripts.
        #[arg(long)]
        transcripts: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, short)]
        out: PathBuf,
        /// Overrides `[tts] backend`.
        #[arg(long, value_enum)]
        tts: Option<Tts>,
        /// Overrides `[tts] cache_dir`.
        #[arg(long)]
        cache: Option<PathBuf>,
    },
    /// Decode and classify every word of a rendered dataset.
    Decode {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        lexicon: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_TAU)]
        tau: f64,
        /// Decisions CSV destination (stdout when omitted).
        #[arg(long, short)]
        out: Option<PathBuf>,
        /// Per-word details as JSON lines.
        #[arg(long)]
        words: Option<PathBuf>,
    },
    /// Per-keyword sensitivity and specificity from a decisions CSV.
    Evaluate {
        #[arg(long)]
        decisions: PathBuf,
        #[arg(long)]
        lexicon: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_TAU)]
        tau: f64,
        /// Metrics CSV destination (stdout when omitted).
        #[arg(long)]
        out_csv: Option<PathBuf>,
        #[arg(long)]
        out_json: Option<PathBuf>,
    },
    /// Serve the annotation API and static front end.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: IpAddr,
        #[arg(long)]
        frames_dir: PathBuf,
        /// Defaults to `annotations/` inside the frames directory.
        #[arg(long)]
        annotations_dir: Option<PathBuf>,
        #[arg(long)]
        static_dir: Option<PathBuf>,
    },
}

fn json_text<T: serde::Serialize>(v: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v).map_err(|e| CliError::Other(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Estimate { annotation, baseline, truth, out, diagnostics, report } => {
            let outcome = commands::run_estimate(&annotation, baseline, truth.as_deref())?;
            commands::write_output(out.as_deref(), &outcome.response.geometry.to_text())?;
            if let Some(p) = diagnostics {
                commands::write_output(Some(&p), &json_text(&outcome.response)?)?;
            }
            for w in &outcome.response.diagnostics.warnings {
                log::warn!("{w}");
            }
            if let (Some(p), Some(r)) = (report, &outcome.report) {
                commands::write_output(Some(&p), &json_text(r)?)?;
            }
            if let Some(table) = outcome.table {
                if out.is_some() {
                    print!("{table}");
                } else {
                    eprint!("{table}");
                }
            }
        }
        Command::Simulate { geometry, transcripts, config, seed, out, tts, cache } => {
            let tts = tts.map(|t| match t {
                Tts::Mock => TtsKind::Mock,
                Tts::Http => TtsKind::Http,
            });
            let manifest = commands::run_simulate(&SimulateArgs {
                geometry: &geometry,
                transcripts: &transcripts,
                config: config.as_deref(),
                seed,
                out: &out,
                tts,
                cache,
            })?;
            print!("{}", commands::simulate_summary(&manifest));
        }
        Command::Decode { manifest, lexicon, tau, out, words } => {
            let lexicon = commands::load_lexicon(lexicon.as_deref(), tau)?;
            let decoded = commands::run_decode(&manifest, &lexicon)?;
            commands::write_output(out.as_deref(), &commands::decisions_csv(&decoded)?)?;
            if let Some(p) = words {
                let mut text = String::new();
                for w in &decoded {
                    text.push_str(&serde_json::to_string(w).map_err(|e| CliError::Other(e.to_string()))?);
                    text.push('\n');
                }
                commands::write_output(Some(&p), &text)?;
            }
        }
        Command::Evaluate { decisions, lexicon, tau, out_csv, out_json } => {
            let lexicon = commands::load_lexicon(lexicon.as_deref(), tau)?;
            let report = commands::run_evaluate(&decisions, &lexicon)?;
            let csv = report.to_csv().map_err(|e| CliError::Other(e.to_string()))?;
            commands::write_output(out_csv.as_deref(), &csv)?;
            if let Some(p) = out_json {
                let mut json = report.to_json().map_err(|e| CliError::Other(e.to_string()))?;
                json.push('\n');
                commands::write_output(Some(&p), &json)?;
            }
        }
        Command::Serve { port, host, frames_dir, annotations_dir, static_dir } => {
            let config = ServiceConfig {
                annotations_dir: annotations_dir.unwrap_or_else(|| frames_dir.join("annotations")),
                frames_dir,
                static_dir,
            };
            let rt = tokio::runtime::Runtime::new().map_err(|e| CliError::Other(e.to_string()))?;
            rt.block_on(server::serve(SocketAddr::new(host, port), config))
                .map_err(|e| CliError::Other(e.to_string()))?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
