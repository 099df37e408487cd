use std::collections::{BTreeSet, HashMap};
use std::path::Path;

use crate::ulf::{classify_atom, parse_all, AtomKind, Ulf};

use super::LoadError;

/// Word features and lexical ULFs.
///
/// Lexicon files hold `(lex WORD ULF FEATURE...)` forms. `WORD` is an atom or
/// a list of atoms for multiword entries (`(burger king)`); `ULF` is `nil`
/// when the word has no lexical logical form.
#[derive(Debug, Clone, Default)]
pub struct FeatureLexicon {
    entries: HashMap<String, BTreeSet<String>>,
    ulf_entries: HashMap<String, Ulf>,
    max_phrase: usize,
}

impl FeatureLexicon {
    pub fn new() -> Self {
        FeatureLexicon {
            max_phrase: 1,
            ..Default::default()
        }
    }

    pub fn insert(&mut self, word: &str, ulf: Option<Ulf>, features: impl IntoIterator<Item = String>) {
        let key = normalize_key(word);
        self.max_phrase = self.max_phrase.max(key.split(' ').count());
        self.entries.entry(key.clone()).or_default().extend(features);
        if let Some(u) = ulf {
            self.ulf_entries.insert(key, u);
        }
    }

    pub fn parse(text: &str) -> Result<Self, LoadError> {
        let mut lex = FeatureLexicon::new();
        let forms = parse_all(text).map_err(|e| LoadError::Syntax {
            line: line_of(text, e.position().unwrap_or(0)),
            message: e.to_string(),
        })?;
        for (offset, form) in forms {
            let err = |message: &str| LoadError::Syntax {
                line: line_of(text, offset),
                message: message.to_string(),
            };
            let items = form.as_list().ok_or_else(|| err("expected (lex ...)"))?;
            if items.len() < 3 || !items[0].is_atom("lex") {
                return Err(err("expected (lex WORD ULF FEATURE...)"));
            }
            let word = match &items[1] {
                Ulf::Atom(a) => a.surface().to_string(),
                Ulf::List(ws) => ws
                    .iter()
                    .map(|w| w.as_atom().map(|a| a.surface().to_string()))
                    .collect::<Option<Vec<_>>>()
                    .ok_or_else(|| err("multiword entry must be a list of atoms"))?
                    .join(" "),
            };
            let ulf = (!items[2].is_atom("nil")).then(|| items[2].clone());
            let mut features = Vec::new();
            for f in &items[3..] {
                features.push(
                    f.as_atom()
                        .ok_or_else(|| err("features must be atoms"))?
                        .surface()
                        .to_string(),
                );
            }
            lex.insert(&word, ulf, features);
        }
        Ok(lex)
    }

    pub fn load(path: &Path) -> Result<Self, LoadError> {
        FeatureLexicon::parse(&std::fs::read_to_string(path)?)
    }

    pub fn features(&self, word: &str) -> BTreeSet<String> {
        self.entries.get(&normalize_key(word)).cloned().unwrap_or_default()
    }

    pub fn contains(&self, word: &str) -> bool {
        self.entries.contains_key(&normalize_key(word))
    }

    pub fn max_phrase(&self) -> usize {
        self.max_phrase
    }

    /// Lexical ULF of a word. Non-name atoms whose stem is the word itself
    /// take the input's casing (`Which` gives `Which.d`).
    pub fn ulf_for(&self, surface: &str) -> Option<Ulf> {
        let entry = self.ulf_entries.get(&normalize_key(surface))?;
        if let Ulf::Atom(a) = entry {
            if a.kind() != &AtomKind::Name && a.stem().eq_ignore_ascii_case(surface) {
                if let Some(suffix) = a.suffix() {
                    return Some(Ulf::Atom(classify_atom(&format!("{surface}.{suffix}"))));
                }
            }
        }
        Some(entry.clone())
    }

    /// Name atoms for the given block logos, used to extend a lexicon with a
    /// world's blocks.
    pub fn add_block_name(&mut self, name: &str) {
        let mut keys = vec![name.to_lowercase()];
        if name.contains('\'') {
            keys.push(name.to_lowercase().replace('\'', ""));
        }
        for key in keys {
            self.insert(&key, Some(Ulf::name(name)), ["corp-name", "noun", "name"].map(String::from));
            self.insert(
                &format!("{key} block"),
                Some(Ulf::list([Ulf::name(name), Ulf::atom("block.n")])),
                ["noun", "name-block"].map(String::from),
            );
        }
    }
}

fn normalize_key(word: &str) -> String {
    word.split_whitespace()
        .map(str::to_lowercase)
        .collect::<Vec<_>>()
        .join(" ")
}

pub(crate) fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

/// One input token: original surface and lowercase matching key.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub surface: String,
    pub norm: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnnotatedWord {
    pub surface: String,
    pub norm: String,
    pub features: BTreeSet<String>,
}

/// Splits text into tokens: punctuation other than a sentence-final `?`/`!`
/// is dropped, and multiword lexicon phrases are merged by longest match.
pub fn tokenize(text: &str, lex: &FeatureLexicon) -> Vec<Token> {
    let trimmed = text.trim_end();
    let final_punct = trimmed
        .chars()
        .last()
        .filter(|c| *c == '?' || *c == '!');
    let mut raw: Vec<String> = Vec::new();
    let mut cur = String::new();
    for c in trimmed.chars() {
        if c.is_alphanumeric() || c == '\'' || c == '-' {
            cur.push(c);
        } else if !cur.is_empty() {
            raw.push(std::mem::take(&mut cur));
        }
    }
    if !cur.is_empty() {
        raw.push(cur);
    }
    let raw: Vec<String> = raw
        .into_iter()
        .map(|w| w.trim_matches(|c| c == '\'' || c == '-').to_string())
        .filter(|w| !w.is_empty())
        .flat_map(expand_contraction)
        .collect();

    let mut out = Vec::new();
    let mut i = 0;
    while i < raw.len() {
        let mut taken = 1;
        for n in (2..=lex.max_phrase().min(raw.len() - i)).rev() {
            if lex.contains(&raw[i..i + n].join(" ")) {
                taken = n;
                break;
            }
        }
        let surface = raw[i..i + taken].join(" ");
        out.push(Token {
            norm: surface.to_lowercase(),
            surface,
        });
        i += taken;
    }
    if let Some(p) = final_punct {
        out.push(Token {
            surface: p.to_string(),
            norm: p.to_string(),
        });
    }
    out
}

/// `wasn't` gives `was not`, `where's` gives `where is`; other words pass.
fn expand_contraction(w: String) -> Vec<String> {
    let lower = w.to_lowercase();
    let special = match lower.as_str() {
        "can't" => Some(("can", "not")),
        "won't" => Some(("will", "not")),
        _ => None,
    };
    if let Some((a, b)) = special {
        return vec![a.to_string(), b.to_string()];
    }
    if let Some(stem) = lower.strip_suffix("n't") {
        if !stem.is_empty() {
            return vec![w[..stem.len()].to_string(), "not".to_string()];
        }
    }
    if let Some(stem) = lower.strip_suffix("'s") {
        if matches!(stem, "what" | "where" | "which" | "who" | "it" | "that" | "how") {
            return vec![w[..stem.len()].to_string(), "is".to_string()];
        }
    }
    vec![w]
}

/// Pairs each token with its lexicon features (empty for unknown words).
pub fn annotate(words: &[Token], lex: &FeatureLexicon) -> Vec<AnnotatedWord> {
    words
        .iter()
        .map(|t| AnnotatedWord {
            surface: t.surface.clone(),
            norm: t.norm.clone(),
            features: lex.features(&t.norm),
        })
        .collect()
}
