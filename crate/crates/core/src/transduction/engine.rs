use crate::ulf::{classify_atom, Ulf};

use super::lexicon::{AnnotatedWord, FeatureLexicon};
use super::pattern::{match_pattern, MatchResult};
use super::tree::{index_ref, Dispatch, Node, SpanRef, Terminal, TreeSet};
use super::{TransduceError, Transduced};

pub const MAX_DEPTH: usize = 25;

/// Runs transduction trees over annotated words.
#[derive(Debug, Clone)]
pub struct Transducer {
    trees: TreeSet,
    lexicon: FeatureLexicon,
}

type Step = Result<Option<Transduced>, TransduceError>;

impl Transducer {
    pub fn new(trees: TreeSet, lexicon: FeatureLexicon) -> Self {
        Transducer { trees, lexicon }
    }

    pub fn trees(&self) -> &TreeSet {
        &self.trees
    }

    pub fn lexicon(&self) -> &FeatureLexicon {
        &self.lexicon
    }

    pub fn lexicon_mut(&mut self) -> &mut FeatureLexicon {
        &mut self.lexicon
    }

    /// `Ok(None)` when no alternative of the tree matches.
    pub fn transduce(&self, tree: &str, words: &[AnnotatedWord]) -> Step {
        self.run(tree, words, 0)
    }

    fn run(&self, tree: &str, words: &[AnnotatedWord], depth: usize) -> Step {
        if depth > MAX_DEPTH {
            return Err(TransduceError::DepthExceeded(MAX_DEPTH));
        }
        let t = self
            .trees
            .get(tree)
            .ok_or_else(|| TransduceError::UnknownTree(tree.to_string()))?;
        for root in &t.roots {
            if let Some(out) = self.try_node(root, words, depth)? {
                return Ok(Some(out));
            }
        }
        Ok(None)
    }

    fn try_node(&self, node: &Node, words: &[AnnotatedWord], depth: usize) -> Step {
        let Some(m) = match_pattern(&node.pattern, words) else {
            return Ok(None);
        };
        for child in &node.children {
            if let Some(out) = self.try_node(child, words, depth)? {
                return Ok(Some(out));
            }
        }
        match &node.terminal {
            Some(t) => self.apply(t, &m, words, depth),
            None => Ok(None),
        }
    }

    fn span<'w>(&self, m: &MatchResult, words: &'w [AnnotatedWord], s: SpanRef) -> &'w [AnnotatedWord] {
        &words[m.spans[s.first - 1].start..m.spans[s.last - 1].end]
    }

    /// Lexical ULF of a span: an atom for one word, a list for several,
    /// the empty list for none. `None` if a word has no lexical entry.
    fn lexical(&self, ws: &[AnnotatedWord]) -> Option<Ulf> {
        match ws {
            [w] => self.lexicon.ulf_for(&w.surface),
            _ => ws
                .iter()
                .map(|w| self.lexicon.ulf_for(&w.surface))
                .collect::<Option<Vec<_>>>()
                .map(Ulf::List),
        }
    }

    fn apply(&self, t: &Terminal, m: &MatchResult, words: &[AnnotatedWord], depth: usize) -> Step {
        match t {
            Terminal::Template(body) => {
                if body.is_atom("nil") {
                    return Ok(Some(Transduced::Ulf(Ulf::List(vec![]))));
                }
                Ok(self
                    .fill_template(body, m, words)
                    .map(Transduced::Ulf))
            }
            Terminal::Words(items) => {
                let mut out = Vec::new();
                for it in items {
                    let s = it.as_atom().map(|a| a.surface()).unwrap_or_default();
                    match span_ref(s) {
                        Some(k) => out.extend(
                            words[m.spans[k - 1].clone()].iter().map(|w| w.surface.clone()),
                        ),
                        None => out.push(s.to_string()),
                    }
                }
                Ok(Some(Transduced::Words(out)))
            }
            Terminal::Subtree { tree, span } => self.run(tree, self.span(m, words, *span), depth + 1),
            Terminal::Compose { dispatch, indices } => {
                let mut parts = Vec::with_capacity(dispatch.len());
                for d in dispatch {
                    let part = match d {
                        Dispatch::Tree { name, span } => {
                            match self.run(name, self.span(m, words, *span), depth + 1)? {
                                Some(Transduced::Ulf(u)) => u,
                                Some(Transduced::Words(ws)) => {
                                    Ulf::List(ws.iter().map(|w| Ulf::atom(w)).collect())
                                }
                                None => return Ok(None),
                            }
                        }
                        Dispatch::Lex { span } => match self.lexical(self.span(m, words, *span)) {
                            Some(u) => u,
                            None => return Ok(None),
                        },
                        Dispatch::LexAs { suffix, span } => {
                            let ws = self.span(m, words, *span);
                            let atoms: Vec<Ulf> = ws
                                .iter()
                                .map(|w| {
                                    let stem = match self.lexicon.ulf_for(&w.norm) {
                                        Some(Ulf::Atom(a)) if a.suffix().is_some() => a.stem().to_string(),
                                        _ => w.norm.clone(),
                                    };
                                    Ulf::Atom(classify_atom(&format!("{stem}.{suffix}")))
                                })
                                .collect();
                            match atoms.len() {
                                1 => atoms.into_iter().next().unwrap_or_default(),
                                _ => Ulf::List(atoms),
                            }
                        }
                    };
                    parts.push(part);
                }
                let out = match indices {
                    Some(ix) => assemble(ix, &parts).unwrap_or_else(|| Ulf::List(vec![])),
                    None => concatenate(parts),
                };
                Ok(Some(Transduced::Ulf(out)))
            }
        }
    }

    fn fill_template(&self, body: &Ulf, m: &MatchResult, words: &[AnnotatedWord]) -> Option<Ulf> {
        match body {
            Ulf::Atom(a) => match span_ref(a.surface()) {
                Some(k) => self.lexical(&words[m.spans[k - 1].clone()]),
                None => Some(body.clone()),
            },
            Ulf::List(items) => {
                let mut out = Vec::with_capacity(items.len());
                for it in items {
                    let u = self.fill_template(it, m, words)?;
                    if !u.is_empty_list() {
                        out.push(u);
                    }
                }
                Some(collapse(out, items.len()))
            }
        }
    }
}

fn span_ref(s: &str) -> Option<usize> {
    s.strip_prefix('#').and_then(|k| k.parse().ok())
}

/// A list that lost items and kept exactly one collapses to that item.
fn collapse(items: Vec<Ulf>, original_len: usize) -> Ulf {
    if items.len() == 1 && original_len > 1 {
        items.into_iter().next().unwrap_or_default()
    } else {
        Ulf::List(items)
    }
}

fn concatenate(parts: Vec<Ulf>) -> Ulf {
    let mut kept: Vec<Ulf> = parts.into_iter().filter(|p| !p.is_empty_list()).collect();
    match kept.len() {
        1 => kept.pop().unwrap_or_default(),
        _ => Ulf::List(kept),
    }
}

/// Fills an index template. `k` is constituent k, `@k` splices its items;
/// `None` means the result vanished entirely. Spliced items never count as
/// lost, so `(1 @2)` with an empty second constituent stays a one-item list.
fn assemble(ix: &Ulf, parts: &[Ulf]) -> Option<Ulf> {
    match ix {
        Ulf::Atom(a) => match index_ref(a.surface()) {
            Some((false, k)) => {
                let p = &parts[k - 1];
                (!p.is_empty_list()).then(|| p.clone())
            }
            Some((true, _)) => None,
            None => Some(ix.clone()),
        },
        Ulf::List(items) => {
            let mut out = Vec::new();
            let mut slots = 0;
            for it in items {
                if let Some((true, k)) = it.as_atom().and_then(|a| index_ref(a.surface())) {
                    match &parts[k - 1] {
                        Ulf::List(xs) => {
                            slots += xs.len();
                            out.extend(xs.iter().cloned());
                        }
                        atom => {
                            slots += 1;
                            out.push(atom.clone());
                        }
                    }
                    continue;
                }
                slots += 1;
                if let Some(u) = assemble(it, parts) {
                    out.push(u);
                }
            }
            if out.is_empty() {
                return None;
            }
            Some(collapse(out, slots))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transduction::lexicon::{annotate, tokenize};

    fn setup(trees: &str) -> (Transducer, FeatureLexicon) {
        let lex = FeatureLexicon::parse(
            "(lex which which.d wh-det det)\n(lex block block.n noun)\n(lex moved (past move.v) verb-move)\n(lex red red.a adj)\n(lex the the.d det)",
        )
        .unwrap();
        (Transducer::new(TreeSet::parse(trees).unwrap(), lex.clone()), lex)
    }

    fn run(t: &Transducer, lex: &FeatureLexicon, tree: &str, text: &str) -> Step {
        t.transduce(tree, &annotate(&tokenize(text, lex), lex))
    }

    fn ulf(s: Step) -> String {
        match s.unwrap() {
            Some(Transduced::Ulf(u)) => u.to_string(),
            other => panic!("expected ULF, got {other:?}"),
        }
    }

    #[test]
    fn first_matching_alternative_wins() {
        let src = "(deftree q (node (0 block) (template first)) (node (0) (template second)))";
        let (t, lex) = setup(src);
        assert_eq!(ulf(run(&t, &lex, "q", "red block")), "first");
        assert_eq!(ulf(run(&t, &lex, "q", "red")), "second");
        let swapped = "(deftree q (node (0) (template second)) (node (0 block) (template first)))";
        let (t, lex) = setup(swapped);
        assert_eq!(ulf(run(&t, &lex, "q", "red block")), "second");
    }

    #[test]
    fn children_fall_back_to_parent_terminal() {
        let src = "(deftree q (node (@det 0) (children (node (which 0) (template wh))) (template det)))";
        let (t, lex) = setup(src);
        assert_eq!(ulf(run(&t, &lex, "q", "which block")), "wh");
        assert_eq!(ulf(run(&t, &lex, "q", "the block")), "det");
        assert_eq!(run(&t, &lex, "q", "block").unwrap(), None);
    }

    #[test]
    fn compose_with_indices_and_empties() {
        let src = r#"
            (deftree np (node (@det 0 @noun) (compose (dispatch (lex 1) (adjs 2) (lex 3)) (indices (1 (2 3))))))
            (deftree adjs (node empty (template nil)) (node (@adj) (template #1)))
            (deftree s (node (0 @verb-move) (compose (dispatch (np 1) (lex 2)) (indices (1 2)))))"#;
        let (t, lex) = setup(src);
        assert_eq!(ulf(run(&t, &lex, "np", "the red block")), "(the.d (red.a block.n))");
        assert_eq!(ulf(run(&t, &lex, "np", "which block")), "(which.d block.n)");
        assert_eq!(
            ulf(run(&t, &lex, "s", "Which block moved")),
            "((Which.d block.n) (past move.v))"
        );
    }

    #[test]
    fn splice_and_lex_as() {
        let src = r#"
            (deftree q (node (0 block) (compose (dispatch (words 1) (lex-as a 1)) (indices (x @1 2)))))
            (deftree words (node (0) (words #1)))"#;
        let (t, lex) = setup(src);
        assert_eq!(ulf(run(&t, &lex, "q", "red block")), "(x red red.a)");
    }

    #[test]
    fn unknown_words_fail_the_alternative() {
        let src = "(deftree q (node (0) (template #1)) (node (0) (template fallback)))";
        let (t, lex) = setup(src);
        assert_eq!(ulf(run(&t, &lex, "q", "zzz")), "fallback");
    }

    #[test]
    fn depth_is_bounded() {
        let src = "(deftree a (node (0) (subtree a 1)))";
        let (t, lex) = setup(src);
        assert!(matches!(run(&t, &lex, "a", "block"), Err(TransduceError::DepthExceeded(25))));
        assert!(matches!(t.transduce("zz", &[]), Err(TransduceError::UnknownTree(_))));
    }
}
