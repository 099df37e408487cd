//! Feature annotation, pattern matching and hierarchical tree transduction.

pub mod engine;
pub mod lexicon;
pub mod pattern;
pub mod tree;

use std::path::Path;

use thiserror::Error;

use crate::ulf::{well_formed, Ulf};

pub use engine::{Transducer, MAX_DEPTH};
pub use lexicon::{annotate, tokenize, AnnotatedWord, FeatureLexicon, Token};
pub use pattern::{match_pattern, MatchResult, Pattern, PatternElem};
pub use tree::{Dispatch, Node, SpanRef, Terminal, TransductionTree, TreeSet};

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("syntax error at line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("subtree call to unknown tree {0:?}")]
    DanglingSubtree(String),
    #[error("tree {0:?} defined twice")]
    DuplicateTree(String),
    #[error("no trees defined")]
    EmptyTreeSet,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TransduceError {
    #[error("unknown tree {0:?}")]
    UnknownTree(String),
    #[error("recursion deeper than {0} tree calls")]
    DepthExceeded(usize),
}

/// A tree result: a ULF, or a word sequence from a `words` terminal.
#[derive(Debug, Clone, PartialEq)]
pub enum Transduced {
    Ulf(Ulf),
    Words(Vec<String>),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseFailure {
    #[error("nothing to parse")]
    Empty,
    #[error("no parse for {0:?}")]
    NoMatch(String),
    #[error("parse of {text:?} is malformed: {ulf}")]
    Malformed { text: String, ulf: Ulf },
    #[error(transparent)]
    Engine(#[from] TransduceError),
}

pub const BUNDLED_TREES: &str = include_str!("../../data/question.trees");
pub const BUNDLED_LEXICON: &str = include_str!("../../data/lexicon.lex");

/// Name of the top-level tree in the bundled tree set.
pub const TOP_TREE: &str = "question";

/// Transducer over the bundled trees and lexicon.
pub fn bundled() -> Transducer {
    let trees = TreeSet::parse(BUNDLED_TREES).expect("bundled trees parse");
    let lex = FeatureLexicon::parse(BUNDLED_LEXICON).expect("bundled lexicon parses");
    Transducer::new(trees, lex)
}

/// Transducer from a directory: every `*.trees` file, plus every `*.lex`
/// file or the bundled lexicon when there are none.
pub fn load_dir(dir: &Path) -> Result<Transducer, LoadError> {
    let mut trees = String::new();
    let mut lex = String::new();
    let mut paths: Vec<_> = std::fs::read_dir(dir)?.map(|e| e.map(|e| e.path())).collect::<Result<_, _>>()?;
    paths.sort();
    for p in paths {
        match p.extension().and_then(|e| e.to_str()) {
            Some("trees") => trees += &(std::fs::read_to_string(&p)? + "\n"),
            Some("lex") => lex += &(std::fs::read_to_string(&p)? + "\n"),
            _ => {}
        }
    }
    let lex = if lex.is_empty() { BUNDLED_LEXICON.to_string() } else { lex };
    Ok(Transducer::new(TreeSet::parse(&trees)?, FeatureLexicon::parse(&lex)?))
}

/// Leading words dropped before parsing.
pub const FILLERS: &[&str] = &["ok", "okay", "so", "well", "hmm", "david", "please", "um", "uh"];

/// Longest input, in tokens, handed to the trees.
pub const MAX_TOKENS: usize = 64;

/// Drops leading fillers and immediately repeated words. Idempotent.
pub fn tidy_input(text: &str) -> String {
    let mut words: Vec<&str> = text.split_whitespace().collect();
    loop {
        let before = words.len();
        while let Some(w) = words.first() {
            if FILLERS.contains(&bare(w).as_str()) && words.len() > 1 {
                words.remove(0);
            } else {
                break;
            }
        }
        words.dedup_by(|b, a| {
            let (x, y) = (bare(a), bare(b));
            !x.is_empty() && x == y && !b.ends_with(['?', '!'])
        });
        if words.len() == before {
            break;
        }
    }
    words.join(" ")
}

fn bare(w: &str) -> String {
    w.trim_matches(|c: char| !c.is_alphanumeric()).to_lowercase()
}

/// tidy, tokenize, annotate, transduce with `top`, check well-formedness.
/// Anaphora are left for the discourse layer.
pub fn parse_question(text: &str, top: &str, t: &Transducer) -> Result<Ulf, ParseFailure> {
    let tidy = tidy_input(text);
    let mut tokens = tokenize(&tidy, t.lexicon());
    if tokens.is_empty() || tokens.iter().all(|w| w.norm == "?" || w.norm == "!") {
        return Err(ParseFailure::Empty);
    }
    if tokens.len() > MAX_TOKENS {
        return Err(ParseFailure::NoMatch(text.to_string()));
    }
    if !matches!(tokens.last().map(|w| w.norm.as_str()), Some("?" | "!")) {
        tokens.push(Token {
            surface: "?".into(),
            norm: "?".into(),
        });
    }
    let words = annotate(&tokens, t.lexicon());
    match t.transduce(top, &words)?.map(|r| match r {
        Transduced::Ulf(u) => Transduced::Ulf(unwrap_singletons(&u)),
        w => w,
    }) {
        Some(Transduced::Ulf(u)) if well_formed(&u) => Ok(u),
        Some(Transduced::Ulf(u)) => Err(ParseFailure::Malformed {
            text: text.to_string(),
            ulf: u,
        }),
        _ => Err(ParseFailure::NoMatch(text.to_string())),
    }
}

/// Replaces one-item lists by their item, bottom-up. Sequence trees wrap
/// single constituents; the final form never needs the wrapper.
pub fn unwrap_singletons(u: &Ulf) -> Ulf {
    match u {
        Ulf::Atom(_) => u.clone(),
        Ulf::List(items) if items.len() == 1 => unwrap_singletons(&items[0]),
        Ulf::List(items) => Ulf::List(items.iter().map(unwrap_singletons).collect()),
    }
}
