//! Temporal constraints compiled from adverbials, and the set operations
//! that apply them to candidate time tokens.

use std::collections::BTreeMap;
use std::hash::Hash;

use crate::memory::{Clock, TimeToken};
use crate::ulf::{AtomKind, Ulf};

use super::HqaError;

/// Tokens at most this many seconds old count as recent.
pub const RECENT_SECONDS: Clock = 60.0;
/// Tokens within this many indices of the latest token count as recent.
pub const RECENT_TOKENS: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinaryRel {
    Before,
    After,
    During,
    Since,
    Until,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnaryPred {
    Recent,
    First,
    Last,
    Initial,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Frequency {
    AtLeast(usize),
    Always,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModA {
    Just,
    Right,
    Ever,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ConstraintKind {
    Binary { rel: BinaryRel, object: Ulf },
    Unary(UnaryPred),
    Frequency(Frequency),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TemporalConstraint {
    pub kind: ConstraintKind,
    pub mod_a: Option<ModA>,
}

impl TemporalConstraint {
    pub fn unary(p: UnaryPred) -> Self {
        TemporalConstraint {
            kind: ConstraintKind::Unary(p),
            mod_a: None,
        }
    }

    pub fn is_ever(&self) -> bool {
        self.mod_a == Some(ModA::Ever) || self.kind == ConstraintKind::Frequency(Frequency::Always)
    }
}

fn binary_rel(stem: &str) -> Option<BinaryRel> {
    Some(match stem {
        "before" => BinaryRel::Before,
        "after" => BinaryRel::After,
        "during" => BinaryRel::During,
        "since" => BinaryRel::Since,
        "until" => BinaryRel::Until,
        _ => return None,
    })
}

fn unary_pred(stem: &str) -> Option<UnaryPred> {
    Some(match stem {
        "recent" => UnaryPred::Recent,
        "first" => UnaryPred::First,
        "last" => UnaryPred::Last,
        "initial" => UnaryPred::Initial,
        _ => return None,
    })
}

fn mod_a_of(stem: &str) -> Option<ModA> {
    Some(match stem {
        "just" => ModA::Just,
        "right" => ModA::Right,
        "ever" => ModA::Ever,
        _ => return None,
    })
}

/// Number named by a word, one through twelve.
pub fn word_number(w: &str) -> Option<usize> {
    const WORDS: [&str; 12] = [
        "one", "two", "three", "four", "five", "six", "seven", "eight", "nine", "ten", "eleven",
        "twelve",
    ];
    WORDS
        .iter()
        .position(|x| x.eq_ignore_ascii_case(w))
        .map(|i| i + 1)
        .or_else(|| w.parse().ok().filter(|n| *n > 0))
}

/// Splits `P.p` or `(M.mod-a P.p)` into the preposition stem and modifier.
fn prep_head(h: &Ulf) -> Option<(String, Option<ModA>)> {
    match h {
        Ulf::Atom(a) if matches!(a.kind(), AtomKind::Preposition | AtomKind::SentencePrep) => {
            Some((a.stem().to_lowercase(), None))
        }
        Ulf::List(xs) => match xs.as_slice() {
            [m, p] if m.kind() == Some(&AtomKind::AdjModifier) => {
                let (stem, _) = prep_head(p)?;
                Some((stem, mod_a_of(&m.as_atom()?.stem().to_lowercase())))
            }
            _ => None,
        },
        _ => None,
    }
}

/// Maps one `adv-e`/`adv-f`/`adv-s` constituent to a constraint.
pub fn compile_constraint(adv: &Ulf) -> Result<TemporalConstraint, HqaError> {
    let unknown = || HqaError::UnknownModifier(adv.clone());
    let [op, body] = adv.as_list().ok_or_else(unknown)? else {
        return Err(unknown());
    };
    let op = op.as_atom().map(|a| a.surface().to_lowercase()).ok_or_else(unknown)?;
    let atom_stem = |u: &Ulf| u.as_atom().map(|a| a.stem().to_lowercase());
    match op.as_str() {
        "adv-e" | "adv-s" => {
            if let Some(stem) = atom_stem(body) {
                if stem == "ever" {
                    return Ok(TemporalConstraint {
                        kind: ConstraintKind::Frequency(Frequency::AtLeast(1)),
                        mod_a: Some(ModA::Ever),
                    });
                }
                return unary_pred(&stem).map(TemporalConstraint::unary).ok_or_else(unknown);
            }
            let parts = body.as_list().ok_or_else(unknown)?;
            match parts {
                [m, a] if m.kind() == Some(&AtomKind::AdjModifier) && a.as_atom().is_some() => {
                    let p = unary_pred(&atom_stem(a).unwrap_or_default()).ok_or_else(unknown)?;
                    Ok(TemporalConstraint {
                        kind: ConstraintKind::Unary(p),
                        mod_a: atom_stem(m).as_deref().and_then(mod_a_of),
                    })
                }
                [h, object] => {
                    let (stem, mod_a) = prep_head(h).ok_or_else(unknown)?;
                    let rel = binary_rel(&stem).ok_or_else(unknown)?;
                    Ok(TemporalConstraint {
                        kind: ConstraintKind::Binary {
                            rel,
                            object: object.clone(),
                        },
                        mod_a,
                    })
                }
                _ => Err(unknown()),
            }
        }
        "adv-f" => {
            if atom_stem(body).as_deref() == Some("always") {
                return Ok(TemporalConstraint {
                    kind: ConstraintKind::Frequency(Frequency::Always),
                    mod_a: None,
                });
            }
            match body.as_list() {
                Some([n, times]) if times.contains(&|x: &Ulf| x.is_atom("time.n")) => {
                    let n = atom_stem(n).as_deref().and_then(word_number).ok_or_else(unknown)?;
                    Ok(TemporalConstraint {
                        kind: ConstraintKind::Frequency(Frequency::AtLeast(n)),
                        mod_a: None,
                    })
                }
                _ => Err(unknown()),
            }
        }
        _ => Err(unknown()),
    }
}

/// Binary filter. `objects` are the object event's tokens; the object time
/// is the most recent one unless `mod_a` is `Ever`, which accepts any.
pub fn filter_binary(
    candidates: &[usize],
    rel: BinaryRel,
    objects: &[usize],
    mod_a: Option<ModA>,
) -> Option<Vec<usize>> {
    let latest = *objects.iter().max()?;
    let earliest = *objects.iter().min()?;
    let any = mod_a == Some(ModA::Ever);
    let keep = |t: usize| match (rel, any) {
        (BinaryRel::Before, false) => t < latest,
        (BinaryRel::After, false) => t > latest,
        (BinaryRel::Since, false) => t >= latest,
        (BinaryRel::Until, false) => t <= latest,
        (BinaryRel::During, false) => t == latest,
        (BinaryRel::Before, true) => t < latest,
        (BinaryRel::After, true) => t > earliest,
        (BinaryRel::Since, true) => t >= earliest,
        (BinaryRel::Until, true) => t <= latest,
        (BinaryRel::During, true) => objects.contains(&t),
    };
    let kept: Vec<usize> = candidates.iter().copied().filter(|t| keep(*t)).collect();
    Some(match mod_a {
        Some(ModA::Just | ModA::Right) => {
            let nearest = match rel {
                BinaryRel::After | BinaryRel::Since => kept.iter().min(),
                _ => kept.iter().max(),
            };
            nearest.map(|t| vec![*t]).unwrap_or_default()
        }
        _ => kept,
    })
}

/// Whether token `t` falls in the recency window ending at the latest token.
pub fn is_recent(times: &[TimeToken], t: usize, now: Clock) -> bool {
    let Some(latest) = times.last() else {
        return false;
    };
    t + RECENT_TOKENS >= latest.index
        || times.get(t).is_some_and(|tok| now - tok.clock <= RECENT_SECONDS)
}

pub fn filter_unary(
    candidates: &[usize],
    pred: UnaryPred,
    mod_a: Option<ModA>,
    times: &[TimeToken],
    now: Clock,
) -> Vec<usize> {
    let one = |t: Option<&usize>| t.map(|t| vec![*t]).unwrap_or_default();
    match pred {
        UnaryPred::Recent => {
            let kept: Vec<usize> = candidates
                .iter()
                .copied()
                .filter(|t| is_recent(times, *t, now))
                .collect();
            match mod_a {
                Some(ModA::Just | ModA::Right) => one(kept.iter().max()),
                _ => kept,
            }
        }
        UnaryPred::First | UnaryPred::Initial => one(candidates.iter().min()),
        UnaryPred::Last => one(candidates.iter().max()),
    }
}

/// Keeps tokens whose facts are attached to at least N candidate tokens;
/// `Always` takes N to be the number of candidates. Facts per token are
/// narrowed to the qualifying ones.
pub fn apply_frequency<F: Clone + Eq + Hash + Ord>(
    candidates: &[usize],
    facts: &BTreeMap<usize, Vec<F>>,
    f: Frequency,
) -> BTreeMap<usize, Vec<F>> {
    let n = match f {
        Frequency::AtLeast(n) => n,
        Frequency::Always => candidates.len(),
    };
    let mut count: BTreeMap<&F, usize> = BTreeMap::new();
    for t in candidates {
        let mut seen: Vec<&F> = facts.get(t).map(|v| v.iter().collect()).unwrap_or_default();
        seen.sort();
        seen.dedup();
        for x in seen {
            *count.entry(x).or_default() += 1;
        }
    }
    let mut out = BTreeMap::new();
    for t in candidates {
        let kept: Vec<F> = facts
            .get(t)
            .into_iter()
            .flatten()
            .filter(|x| count.get(x).copied().unwrap_or(0) >= n.max(1))
            .cloned()
            .collect();
        if !kept.is_empty() {
            out.insert(*t, kept);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(s: &str) -> TemporalConstraint {
        compile_constraint(&s.parse().unwrap()).unwrap()
    }

    fn toks(clocks: &[f64]) -> Vec<TimeToken> {
        clocks
            .iter()
            .enumerate()
            .map(|(index, clock)| TimeToken { index, clock: *clock })
            .collect()
    }

    #[test]
    fn compiles_adverbial_shapes() {
        assert_eq!(
            c("(adv-f (three.a (plur time.n)))").kind,
            ConstraintKind::Frequency(Frequency::AtLeast(3))
        );
        let just = c("(adv-e (just.mod-a recent.a))");
        assert_eq!(just.kind, ConstraintKind::Unary(UnaryPred::Recent));
        assert_eq!(just.mod_a, Some(ModA::Just));
        assert_eq!(c("(adv-f always.a)").kind, ConstraintKind::Frequency(Frequency::Always));
        let after = c("(adv-s (after.ps (|Twitter| (past move.v))))");
        assert!(matches!(after.kind, ConstraintKind::Binary { rel: BinaryRel::After, .. }));
        let right = c("(adv-e ((right.mod-a before.p) |Now4|))");
        assert_eq!(right.mod_a, Some(ModA::Right));
        assert!(c("(adv-e ever.a)").is_ever());
        assert!(compile_constraint(&"(adv-e purple.a)".parse().unwrap()).is_err());
        assert!(compile_constraint(&"(adv-x recent.a)".parse().unwrap()).is_err());
    }

    #[test]
    fn just_recent_picks_latest() {
        let times = toks(&[0.0, 10.0, 10.0, 20.0, 20.0]);
        let got = filter_unary(&[1, 3], UnaryPred::Recent, Some(ModA::Just), &times, 25.0);
        assert_eq!(got, [3]);
    }

    #[test]
    fn recency_window_is_tokens_or_seconds() {
        let times = toks(&[0.0, 0.0, 0.0, 100.0, 100.0, 200.0, 200.0]);
        // only the last two tokens are recent by index, nothing else by clock
        assert_eq!(
            filter_unary(&[0, 1, 2, 3, 4, 5, 6], UnaryPred::Recent, None, &times, 300.0),
            [4, 5, 6]
        );
        // at 130 s the tokens at 100 s are also within a minute
        assert_eq!(
            filter_unary(&[0, 1, 2, 3, 4, 5, 6], UnaryPred::Recent, None, &times, 130.0),
            [3, 4, 5, 6]
        );
    }

    #[test]
    fn binary_uses_most_recent_object_time() {
        assert_eq!(filter_binary(&[0, 1, 2, 3, 4, 5], BinaryRel::Before, &[1, 3], None), Some(vec![0, 1, 2]));
        assert_eq!(
            filter_binary(&[0, 1, 2, 3, 4, 5], BinaryRel::After, &[1, 3], Some(ModA::Ever)),
            Some(vec![2, 3, 4, 5])
        );
        assert_eq!(filter_binary(&[0, 1, 2], BinaryRel::Before, &[], None), None);
        assert_eq!(
            filter_binary(&[0, 1, 2, 3, 4], BinaryRel::Before, &[3], Some(ModA::Right)),
            Some(vec![2])
        );
    }

    #[test]
    fn frequency_counts_distinct_tokens() {
        let mut facts = BTreeMap::new();
        for t in [0, 2, 4] {
            facts.insert(t, vec!["x"]);
        }
        facts.insert(1, vec!["y"]);
        let got = apply_frequency(&[0, 1, 2, 3, 4], &facts, Frequency::AtLeast(3));
        assert_eq!(got.keys().copied().collect::<Vec<_>>(), [0, 2, 4]);
        assert!(apply_frequency(&[0, 1, 2, 3, 4], &facts, Frequency::Always).is_empty());
        let all = apply_frequency(&[0, 1, 2, 3, 4], &facts, Frequency::AtLeast(1));
        assert_eq!(all.len(), 4);
    }

    #[test]
    fn number_words() {
        assert_eq!(word_number("three"), Some(3));
        assert_eq!(word_number("Twelve"), Some(12));
        assert_eq!(word_number("13"), Some(13));
        assert_eq!(word_number("zero"), None);
    }
}
