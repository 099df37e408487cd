use std::fmt;
use std::ops::Range;

use super::lexicon::AnnotatedWord;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PatternElem {
    /// Matches one word exactly, case-insensitively.
    Literal(String),
    /// Matches one word carrying the feature.
    Feature(String),
    /// Matches up to `max` words; `max == 0` is unbounded.
    Wildcard(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Pattern {
    pub elements: Vec<PatternElem>,
}

impl Pattern {
    pub fn new(elements: Vec<PatternElem>) -> Self {
        Pattern { elements }
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.elements.is_empty() {
            return f.write_str("empty");
        }
        f.write_str("(")?;
        for (i, e) in self.elements.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            match e {
                PatternElem::Literal(w) => f.write_str(w)?,
                PatternElem::Feature(t) => write!(f, "@{t}")?,
                PatternElem::Wildcard(k) => write!(f, "{k}")?,
            }
        }
        f.write_str(")")
    }
}

/// One word range per pattern element; together they cover the input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchResult {
    pub spans: Vec<Range<usize>>,
}

impl MatchResult {
    pub fn span_words<'w>(&self, words: &'w [AnnotatedWord], k: usize) -> &'w [AnnotatedWord] {
        &words[self.spans[k].clone()]
    }
}

impl PatternElem {
    fn accepts(&self, w: &AnnotatedWord) -> bool {
        match self {
            PatternElem::Literal(l) => w.norm == *l,
            PatternElem::Feature(t) => w.features.contains(t),
            PatternElem::Wildcard(_) => true,
        }
    }
}

/// Anchored match: the whole input must be consumed. Wildcards expand
/// minimally, left to right, backtracking within this pattern only.
pub fn match_pattern(p: &Pattern, ws: &[AnnotatedWord]) -> Option<MatchResult> {
    let mut spans = Vec::with_capacity(p.elements.len());
    extend(&p.elements, ws, 0, &mut spans).then_some(MatchResult { spans })
}

fn extend(elems: &[PatternElem], ws: &[AnnotatedWord], at: usize, spans: &mut Vec<Range<usize>>) -> bool {
    let Some((first, rest)) = elems.split_first() else {
        return at == ws.len();
    };
    // Fixed-width elements remaining bound how far a wildcard may reach.
    let fixed_after = rest
        .iter()
        .filter(|e| !matches!(e, PatternElem::Wildcard(_)))
        .count();
    match first {
        PatternElem::Wildcard(max) => {
            let room = ws.len().saturating_sub(at + fixed_after);
            let limit = if *max == 0 { room } else { (*max).min(room) };
            for len in 0..=limit {
                spans.push(at..at + len);
                if extend(rest, ws, at + len, spans) {
                    return true;
                }
                spans.pop();
            }
            false
        }
        elem => {
            if at < ws.len() && elem.accepts(&ws[at]) {
                spans.push(at..at + 1);
                if extend(rest, ws, at + 1, spans) {
                    return true;
                }
                spans.pop();
            }
            false
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    fn words(text: &str) -> Vec<AnnotatedWord> {
        text.split_whitespace()
            .map(|w| AnnotatedWord {
                surface: w.into(),
                norm: w.to_lowercase(),
                features: if w.starts_with('x') { BTreeSet::from(["ex".to_string()]) } else { BTreeSet::new() },
            })
            .collect()
    }

    fn texts(m: &MatchResult, ws: &[AnnotatedWord]) -> Vec<String> {
        m.spans
            .iter()
            .map(|r| ws[r.clone()].iter().map(|w| w.surface.as_str()).collect::<Vec<_>>().join(" "))
            .collect()
    }

    /// Every assignment of span lengths, checked directly against the
    /// element definitions; the lexicographically smallest wins.
    fn brute_force(p: &Pattern, ws: &[AnnotatedWord]) -> Option<Vec<Range<usize>>> {
        fn rec(p: &[PatternElem], n: usize, acc: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if p.is_empty() {
                if acc.iter().sum::<usize>() == n {
                    out.push(acc.clone());
                }
                return;
            }
            let lens: Vec<usize> = match &p[0] {
                PatternElem::Wildcard(0) => (0..=n).collect(),
                PatternElem::Wildcard(k) => (0..=*k).collect(),
                _ => vec![1],
            };
            for l in lens {
                acc.push(l);
                rec(&p[1..], n, acc, out);
                acc.pop();
            }
        }
        let mut all = Vec::new();
        rec(&p.elements, ws.len(), &mut Vec::new(), &mut all);
        all.sort();
        all.into_iter().find_map(|lens| {
            let mut at = 0;
            let mut spans = Vec::new();
            for (e, l) in p.elements.iter().zip(&lens) {
                let r = at..at + l;
                if !matches!(e, PatternElem::Wildcard(_)) && !e.accepts(&ws[r.start]) {
                    return None;
                }
                spans.push(r);
                at += l;
            }
            Some(spans)
        })
    }

    #[test]
    fn wildcard_around_literal() {
        let p = Pattern::new(vec![
            PatternElem::Wildcard(0),
            PatternElem::Literal("move".into()),
            PatternElem::Wildcard(0),
        ]);
        let ws = words("which block did I just move");
        let m = match_pattern(&p, &ws).unwrap();
        assert_eq!(texts(&m, &ws), ["which block did I just", "move", ""]);
        assert_eq!(Some(m.spans), brute_force(&p, &ws));
    }

    #[test]
    fn single_literal_and_bound() {
        let p = Pattern::new(vec![PatternElem::Literal("hello".into())]);
        let ws = words("Hello");
        assert_eq!(texts(&match_pattern(&p, &ws).unwrap(), &ws), ["Hello"]);
        let p2 = Pattern::new(vec![PatternElem::Wildcard(2)]);
        assert!(match_pattern(&p2, &words("a b c")).is_none());
        assert!(match_pattern(&p2, &words("a b")).is_some());
        assert!(match_pattern(&Pattern::default(), &[]).is_some());
    }

    fn arb_elem() -> impl Strategy<Value = PatternElem> {
        prop_oneof![
            prop::sample::select(vec!["a", "b", "c"]).prop_map(|s| PatternElem::Literal(s.into())),
            Just(PatternElem::Feature("ex".into())),
            (0usize..3).prop_map(PatternElem::Wildcard),
        ]
    }

    proptest! {
        #[test]
        fn agrees_with_brute_force(
            elems in prop::collection::vec(arb_elem(), 0..5),
            text in prop::collection::vec(prop::sample::select(vec!["a", "b", "c", "xa", "xb"]), 0..7),
        ) {
            let p = Pattern::new(elems);
            let ws = words(&text.join(" "));
            let got = match_pattern(&p, &ws).map(|m| m.spans);
            prop_assert_eq!(&got, &brute_force(&p, &ws));
            if let Some(spans) = got {
                // spans partition the input in order
                let mut at = 0;
                for r in &spans {
                    prop_assert_eq!(r.start, at);
                    at = r.end;
                }
                prop_assert_eq!(at, ws.len());
            }
        }
    }
}
