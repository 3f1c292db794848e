//! The file-in, file-out pipeline stages behind each subcommand.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crossroom::acoustics::wav;
use crossroom::dataset::{
    build_dataset, load_transcripts, read_manifest, CachedTts, DatasetConfig, DatasetManifest, HttpTts, HttpTtsConfig,
    MockTts, TtsBackend, TtsKind,
};
use crossroom::geometry::{
    estimate_frame, geometry_error, Annotation, EstimateMethod, EstimateResponse, GeometryConfig, GeometryErrorReport,
};
use crossroom::geometry::json::{parse_truth, GeometryJson};
use crossroom::recognition::{
    decode_session, read_decisions, score_keywords, write_decisions, DecodedWord, DecoderConfig, KeywordLexicon,
    KeywordReport, SPANISH_KEYWORDS,
};

use crate::error::{CliError, Result};

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| CliError::read(path, e))
}

fn write_file(path: &Path, contents: impl AsRef<[u8]>) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| CliError::write(dir, e))?;
    }
    fs::write(path, contents).map_err(|e| CliError::write(path, e))
}

pub fn load_annotation(path: &Path) -> Result<Annotation> {
    let text = read_text(path)?;
    Annotation::from_json(&text).map_err(|e| CliError::geometry(&path.display().to_string(), e))
}

pub fn estimate(annotation: &Annotation, baseline: bool) -> Result<EstimateResponse> {
    let method = if baseline { EstimateMethod::Baseline } else { EstimateMethod::CrossRatio };
    estimate_frame(annotation, &GeometryConfig::default(), method)
        .map_err(|e| CliError::geometry(&format!("frame {}", annotation.frame_id), e))
}

pub struct EstimateOutcome {
    pub response: EstimateResponse,
    pub report: Option<GeometryErrorReport>,
    pub table: Option<String>,
}

pub fn run_estimate(annotation: &Path, baseline: bool, truth: Option<&Path>) -> Result<EstimateOutcome> {
    let ann = load_annotation(annotation)?;
    let truth = truth
        .map(|p| read_text(p).and_then(|t| parse_truth(&t).map_err(|e| CliError::geometry(&p.display().to_string(), e))))
        .transpose()?;
    let response = estimate(&ann, baseline)?;
    let (report, table) = match truth {
        Some(truth) => {
            let g = response
                .geometry
                .clone()
                .into_geometry()
                .map_err(|e| CliError::geometry("estimated geometry", e))?;
            let report = geometry_error(&g, &truth).map_err(|e| CliError::geometry("truth", e))?;
            let table = error_table(&g.distances, &truth, &report);
            (Some(report), Some(table))
        }
        None => (None, None),
    };
    Ok(EstimateOutcome { response, report, table })
}

/// Per-speaker truth, estimate and percentage error, then the mean error.
pub fn error_table(
    estimated: &BTreeMap<String, f64>,
    truth: &BTreeMap<String, f64>,
    report: &GeometryErrorReport,
) -> String {
    let mut s = format!("{:<8}{:>14}{:>14}{:>10}\n", "speaker", "truth (in)", "estimate (in)", "error %");
    for (id, err) in &report.per_speaker {
        let _ = writeln!(s, "{:<8}{:>14.2}{:>14.2}{:>10.2}", id, truth[id], estimated[id], err);
    }
    let _ = writeln!(s, "{:<8}{:>14}{:>14}{:>10.2}", "mean", "", "", report.mean);
    s
}

pub fn load_geometry(path: &Path) -> Result<crossroom::geometry::SpeakerGeometry> {
    let text = read_text(path)?;
    let ctx = path.display().to_string();
    let doc = GeometryJson::from_text(&text).map_err(|e| CliError::Parse(format!("{ctx}: {e}")))?;
    doc.into_geometry().map_err(|e| CliError::geometry(&ctx, e))
}

pub fn load_dataset_config(path: Option<&Path>) -> Result<DatasetConfig> {
    match path {
        Some(p) => {
            DatasetConfig::from_toml(&read_text(p)?).map_err(|e| CliError::dataset(&p.display().to_string(), e))
        }
        None => Ok(DatasetConfig::default()),
    }
}

pub struct SimulateArgs<'a> {
    pub geometry: &'a Path,
    pub transcripts: &'a Path,
    pub config: Option<&'a Path>,
    pub seed: u64,
    pub out: &'a Path,
    pub tts: Option<TtsKind>,
    pub cache: Option<PathBuf>,
}

pub fn run_simulate(args: &SimulateArgs) -> Result<DatasetManifest> {
    let geometry = load_geometry(args.geometry)?;
    let mut config = load_dataset_config(args.config)?;
    if let Some(kind) = args.tts {
        config.tts.backend = kind;
    }
    if args.cache.is_some() {
        config.tts.cache_dir = args.cache.clone();
    }
    if !args.transcripts.exists() {
        return Err(CliError::Parse(format!("{}: no such file or directory", args.transcripts.display())));
    }
    let sessions = load_transcripts(args.transcripts)
        .map_err(|e| CliError::dataset(&args.transcripts.display().to_string(), e))?;
    if sessions.is_empty() {
        return Err(CliError::Parse(format!("{}: no transcripts", args.transcripts.display())));
    }
    for s in &sessions {
        for w in &s.warnings {
            log::warn!("{}: {w:?}", s.name);
        }
    }

    let rate = config.scene.room.sample_rate_hz;
    let cache_dir = config.tts.cache_dir.clone().unwrap_or_else(|| args.out.join("tts_cache"));
    let tts: Box<dyn TtsBackend> = match config.tts.backend {
        TtsKind::Mock => {
            let mock = MockTts { sample_rate: rate };
            match &config.tts.cache_dir {
                Some(dir) => Box::new(cached(mock, dir, rate)?),
                None => Box::new(mock),
            }
        }
        TtsKind::Http => {
            let mut c = HttpTtsConfig::from_env().map_err(|e| CliError::dataset("speech service", e))?;
            c.max_retries = config.tts.max_retries;
            c.max_requests_per_second = Some(config.tts.requests_per_second);
            let http = HttpTts::new(c).map_err(|e| CliError::dataset("speech service", e))?;
            Box::new(cached(http, &cache_dir, rate)?)
        }
    };

    let manifest = build_dataset(&sessions, &geometry, &config, args.seed, args.out, tts.as_ref())
        .map_err(|e| CliError::dataset("simulate", e))?;
    if !manifest.failures.is_empty() {
        let detail = manifest
            .failures
            .iter()
            .map(|f| format!("{} ({})", f.session, f.error))
            .collect::<Vec<_>>()
            .join("; ");
        return Err(CliError::Sessions {
            failed: manifest.failures.len(),
            total: sessions.len(),
            detail,
        });
    }
    Ok(manifest)
}

fn cached<B: TtsBackend>(backend: B, dir: &Path, rate: u32) -> Result<CachedTts<B>> {
    CachedTts::new(backend, dir, rate).map_err(|e| CliError::dataset(&dir.display().to_string(), e))
}

pub fn simulate_summary(m: &DatasetManifest) -> String {
    let minutes: f64 = m.entries.iter().map(|e| e.duration_s).sum::<f64>() / 60.0;
    let speech: f64 = m.entries.iter().map(|e| e.scheduled_s).sum();
    let overlap = if speech > 0.0 {
        m.entries.iter().map(|e| e.overlap_fraction * e.scheduled_s).sum::<f64>() / speech
    } else {
        0.0
    };
    let utterances: usize = m.entries.iter().map(|e| e.utterances.len()).sum();
    let failed: usize = m.entries.iter().map(|e| e.failed_utterances.len()).sum();
    format!(
        "sessions: {}\ntotal minutes: {minutes:.2}\nutterances: {utterances} ({failed} failed)\noverlap realized: {overlap:.3}\n",
        m.entries.len()
    )
}

pub fn load_lexicon(path: Option<&Path>, tau: f64) -> Result<KeywordLexicon> {
    match path {
        Some(p) => KeywordLexicon::from_tsv(&read_text(p)?, tau)
            .map_err(|e| CliError::recognition(&p.display().to_string(), e)),
        None => KeywordLexicon::from_words(SPANISH_KEYWORDS, tau).map_err(|e| CliError::recognition("lexicon", e)),
    }
}

/// Decodes every session of a manifest; words come back in manifest order.
pub fn run_decode(manifest: &Path, lexicon: &KeywordLexicon) -> Result<Vec<DecodedWord>> {
    let entries = read_manifest(manifest).map_err(|e| match e {
        crossroom::dataset::DatasetError::Io(io) => CliError::read(manifest, io),
        e => CliError::Parse(format!("{}: {e}", manifest.display())),
    })?;
    let dir = manifest.parent().unwrap_or(Path::new("."));
    let config = DecoderConfig::default();
    let mut words = Vec::new();
    for entry in &entries {
        let path = dir.join(&entry.wav);
        let mixture = wav::read_wav(&path).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
        let decoded = decode_session(&mixture, entry, lexicon, &config)
            .map_err(|e| CliError::recognition(&entry.session, e))?;
        words.extend(decoded);
    }
    Ok(words)
}

pub fn decisions_csv(words: &[DecodedWord]) -> Result<String> {
    let d: Vec<_> = words.iter().map(|w| (w.predicted.clone(), w.true_label.clone())).collect();
    write_decisions(&d).map_err(|e| CliError::Other(e.to_string()))
}

pub fn run_evaluate(decisions: &Path, lexicon: &KeywordLexicon) -> Result<KeywordReport> {
    let ctx = decisions.display().to_string();
    let d = read_decisions(&read_text(decisions)?).map_err(|e| CliError::recognition(&ctx, e))?;
    score_keywords(&d, &lexicon.classes()).map_err(|e| CliError::recognition(&ctx, e))
}

pub fn write_output(path: Option<&Path>, contents: &str) -> Result<()> {
    match path {
        Some(p) => write_file(p, contents),
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}
