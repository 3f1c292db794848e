use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Language {
    Es,
    En,
    Mixed,
}

impl Language {
    pub fn as_str(self) -> &'static str {
        match self {
            Language::Es => "es",
            Language::En => "en",
            Language::Mixed => "mixed",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "es" => Some(Language::Es),
            "en" => Some(Language::En),
            "mixed" => Some(Language::Mixed),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranscriptLine {
    pub speaker_id: String,
    pub raw_text: String,
    pub normalized_text: String,
    pub language: Language,
}

/// A line that could not be parsed; 1-based line number.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LineWarning {
    pub line: usize,
    pub text: String,
    pub reason: String,
}

pub(crate) fn fold_char(c: char) -> Option<char> {
    Some(match c {
        'á' | 'à' | 'â' | 'ä' | 'ã' => 'a',
        'é' | 'è' | 'ê' | 'ë' => 'e',
        'í' | 'ì' | 'î' | 'ï' => 'i',
        'ó' | 'ò' | 'ô' | 'ö' | 'õ' => 'o',
        'ú' | 'ù' | 'û' | 'ü' => 'u',
        'ç' => 'c',
        'ñ' => 'ñ',
        'a'..='z' | '0'..='9' => c,
        _ => return None,
    })
}

/// Lowercases, strips accents (keeping ñ) and turns everything outside
/// `[a-z0-9ñ]` into word breaks. Apostrophes join rather than split, so
/// "don't" becomes "dont".
pub fn normalize(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut pending_space = false;
    for c in text.chars().flat_map(char::to_lowercase) {
        if matches!(c, '\'' | '’' | '`') {
            continue;
        }
        match fold_char(c) {
            Some(f) => {
                if pending_space && !out.is_empty() {
                    out.push(' ');
                }
                pending_space = false;
                out.push(f);
            }
            None => pending_space = true,
        }
    }
    out
}

const SPANISH_WORDS: &[&str] = &[
    "el", "la", "los", "las", "una", "es", "que", "de", "del", "y", "en", "por", "para", "con", "si", "uno", "dos",
    "tres", "cuatro", "cinco", "seis", "siete", "ocho", "nueve", "diez", "cero", "cual", "como", "donde", "numero",
    "yo", "tu", "este", "esta", "eso", "esto", "pero", "muy", "bien", "aqui", "ahora", "hacer", "tiene", "tengo",
    "vamos", "mira", "porque", "entonces", "hay", "otro", "otra", "ya", "le", "lo", "se", "su", "mas", "cuando",
    "quien", "tambien", "pues", "oye", "asi", "verdad", "igual", "ese", "esa", "nosotros", "ella", "necesitamos",
];

const ENGLISH_WORDS: &[&str] = &[
    "the", "is", "are", "it", "this", "that", "and", "of", "to", "in", "you", "we", "what", "how", "one", "two",
    "three", "four", "five", "six", "seven", "eight", "nine", "ten", "zero", "yes", "okay", "ok", "do", "does", "can",
    "lets", "with", "for", "on", "my", "your", "not", "so", "right", "next", "i", "he", "she", "they", "have", "has",
    "go", "good", "now", "here", "there", "be", "was", "will", "code", "python", "print", "loop", "if", "else",
];

/// Language by counting marker words; ñ counts as Spanish. Lines with no
/// markers default to Spanish.
pub fn language_tag(normalized: &str) -> Language {
    let mut es = normalized.contains('ñ') as usize;
    let mut en = 0;
    for w in normalized.split(' ') {
        es += SPANISH_WORDS.contains(&w) as usize;
        en += ENGLISH_WORDS.contains(&w) as usize;
    }
    match (es > 0, en > 0) {
        (true, true) => Language::Mixed,
        (false, true) => Language::En,
        _ => Language::Es,
    }
}

/// Splits a `SPEAKER: text` line. Speaker ids are a letter followed by
/// letters, digits or underscores.
fn split_speaker(line: &str) -> Option<(&str, &str)> {
    let (id, text) = line.split_once(':')?;
    let id = id.trim();
    let mut chars = id.chars();
    let first = chars.next()?;
    if !first.is_ascii_alphabetic() || !chars.all(|c| c.is_ascii_alphanumeric() || c == '_') {
        return None;
    }
    Some((id, text.trim()))
}

/// Parses transcript text. Blank lines and lines that normalize to nothing
/// are dropped; lines without a speaker prefix are skipped with a warning.
pub fn preprocess_transcript(raw: &str) -> (Vec<TranscriptLine>, Vec<LineWarning>) {
    let mut lines = Vec::new();
    let mut warnings = Vec::new();
    for (i, line) in raw.lines().enumerate() {
        let trimmed = line.trim().trim_start_matches('\u{feff}');
        if trimmed.is_empty() {
            continue;
        }
        let Some((speaker, text)) = split_speaker(trimmed) else {
            log::warn!("transcript line {}: no speaker prefix", i + 1);
            warnings.push(LineWarning {
                line: i + 1,
                text: trimmed.to_string(),
                reason: "UnparseableLine: no speaker prefix".into(),
            });
            continue;
        };
        let normalized = normalize(text);
        if normalized.is_empty() {
            continue;
        }
        lines.push(TranscriptLine {
            speaker_id: speaker.to_string(),
            raw_text: text.to_string(),
            language: language_tag(&normalized),
            normalized_text: normalized,
        });
    }
    (lines, warnings)
}
