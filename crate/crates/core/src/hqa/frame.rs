//! Query frames: the subject, predicate, objects and modifiers of a question.

use crate::ulf::{AtomKind, Ulf};
use crate::world::{Color, Relation};

use super::constraint::{word_number, UnaryPred};
use super::HqaError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Category {
    IdentWhich,
    Where,
    When,
    HowMany,
    YesNo,
    OrderCompare,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tense {
    Past,
    Pres,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Polarity {
    Pos,
    Neg,
}

/// What a block-denoting noun phrase says about its referents.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Restrictor {
    pub color: Option<Color>,
    pub plural: bool,
    pub other: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Term {
    Name(String),
    Wh(Restrictor),
    HowMany(Restrictor),
    Indef { restrictor: Restrictor, count: usize },
    Choice(Vec<String>),
    /// `the first block that I moved`
    Described { ordinal: UnaryPred, clause: Ulf },
    Conj(Vec<String>),
    Speaker,
}

impl Term {
    pub fn is_wh(&self) -> bool {
        matches!(self, Term::Wh(_) | Term::HowMany(_) | Term::Choice(_))
    }

    pub fn name(&self) -> Option<&str> {
        match self {
            Term::Name(n) => Some(n),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Predicate {
    Move { dest: Option<(Relation, Vec<Term>)> },
    Spatial(Relation),
    /// `what was X`: identity with a described object.
    Identity,
    /// `where was X`
    Located,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QueryFrame {
    pub category: Category,
    pub subject: Term,
    pub predicate: Predicate,
    pub objects: Vec<Term>,
    pub polarity: Polarity,
    pub tense: Tense,
    pub modifiers: Vec<Ulf>,
    /// Ordinal inside an object description, e.g. `first` in `the first block that I moved`.
    pub np_temporal: Option<UnaryPred>,
    /// `how many times`
    pub count_events: bool,
}

impl QueryFrame {
    /// The wh-term, if any, and whether it is the subject.
    pub fn wh(&self) -> Option<(&Term, bool)> {
        if self.subject.is_wh() {
            return Some((&self.subject, true));
        }
        self.objects.iter().find(|o| o.is_wh()).map(|o| (o, false))
    }
}

/// Strips the final punctuation.
pub fn sentence_of(u: &Ulf) -> &Ulf {
    match u.as_list() {
        Some([s, p]) if p.kind() == Some(&AtomKind::Punct) => s,
        _ => u,
    }
}

fn stem(u: &Ulf) -> Option<String> {
    u.as_atom().map(|a| a.stem().to_lowercase())
}

fn is_adverbial(u: &Ulf) -> bool {
    u.as_list()
        .and_then(|xs| xs.first())
        .and_then(|h| h.as_atom())
        .is_some_and(|a| a.kind() == &AtomKind::AdverbialOp)
}

fn is_how_many(u: &Ulf) -> bool {
    match u.as_list() {
        Some([m, a]) => m.is_atom("how.mod-a") && a.is_atom("many.a"),
        _ => false,
    }
}

/// `(T V)` → tense and verb atom stem.
fn tensed(u: &Ulf) -> Option<(Tense, String)> {
    let [t, v] = u.as_list()? else {
        return None;
    };
    let tense = match t.as_atom()?.surface() {
        "past" => Tense::Past,
        "pres" => Tense::Pres,
        _ => return None,
    };
    let a = v.as_atom()?;
    matches!(a.kind(), AtomKind::Verb | AtomKind::Suffixed(_)).then(|| (tense, a.stem().to_lowercase()))
}

pub fn relation_of_prep(p: &str) -> Option<Relation> {
    Relation::from_tag(p)
}

pub fn restrictor(nom: &Ulf) -> Option<Restrictor> {
    match nom {
        Ulf::Atom(a) => matches!(a.surface().to_lowercase().as_str(), "block.n" | "cube.n")
            .then(Restrictor::default),
        Ulf::List(xs) => match xs.as_slice() {
            [p, n] if p.is_atom("plur") => Some(Restrictor {
                plural: true,
                ..restrictor(n)?
            }),
            [a, n] if a.kind() == Some(&AtomKind::Adjective) => {
                let mut r = restrictor(n)?;
                let s = stem(a)?;
                if s == "other" {
                    r.other = true;
                } else {
                    r.color = Some(Color::from_word(&s)?);
                }
                Some(r)
            }
            _ => None,
        },
    }
}

fn name_of(u: &Ulf) -> Option<String> {
    match u {
        Ulf::Atom(a) => a.name_text().filter(|n| !n.starts_with("Now")).map(String::from),
        Ulf::List(xs) => match xs.as_slice() {
            [n, b] if b.is_atom("block.n") => name_of(n),
            [d, rest] if d.is_atom("the.d") => name_of(rest),
            _ => None,
        },
    }
}

/// Maps a noun phrase to a term.
pub fn term(u: &Ulf) -> Option<Term> {
    if let Some(n) = name_of(u) {
        return Some(Term::Name(n));
    }
    if let Some(a) = u.as_atom() {
        return match a.surface().to_lowercase().as_str() {
            "i.pro" | "you.pro" => Some(Term::Speaker),
            "what.pro" | "which.pro" => Some(Term::Wh(Restrictor::default())),
            _ => None,
        };
    }
    let xs = u.as_list()?;
    if let Some(names) = conj_names(xs) {
        return Some(Term::Conj(names));
    }
    let [d, nom] = xs else {
        return None;
    };
    if is_how_many(d) {
        return Some(Term::HowMany(restrictor(nom)?));
    }
    let det = stem(d)?;
    match det.as_str() {
        "which" | "what" => {
            if let Some([n, among]) = nom.as_list() {
                if let Some([p, alts]) = among.as_list() {
                    if p.is_atom("among.p") {
                        restrictor(n)?;
                        return Some(Term::Choice(conj_names(alts.as_list()?)?));
                    }
                }
            }
            Some(Term::Wh(restrictor(nom)?))
        }
        "the" => {
            if let Some([head, rel]) = nom.as_list() {
                if let Some([that, clause]) = rel.as_list() {
                    if that.is_atom("that.rel") {
                        let (ordinal, _) = ordinal_nom(head)?;
                        return Some(Term::Described {
                            ordinal,
                            clause: clause.clone(),
                        });
                    }
                }
            }
            Some(Term::Indef {
                restrictor: restrictor(nom)?,
                count: 1,
            })
        }
        "a" | "an" | "any" | "some" | "each" | "every" => Some(Term::Indef {
            restrictor: restrictor(nom)?,
            count: 1,
        }),
        w => Some(Term::Indef {
            restrictor: restrictor(nom)?,
            count: word_number(w)?,
        }),
    }
}

/// `(first.a block.n)` → First; `block.n` → Initial is not implied.
fn ordinal_nom(u: &Ulf) -> Option<(UnaryPred, Restrictor)> {
    let [a, n] = u.as_list()? else {
        return None;
    };
    let p = match stem(a)?.as_str() {
        "first" => UnaryPred::First,
        "last" => UnaryPred::Last,
        _ => return None,
    };
    Some((p, restrictor(n)?))
}

/// `(A and.cc B)`, `(A B or.cc C)`, ... as block names.
fn conj_names(xs: &[Ulf]) -> Option<Vec<String>> {
    let cc = xs.iter().position(|x| x.is_atom("and.cc") || x.is_atom("or.cc"))?;
    if cc + 2 != xs.len() || xs.len() < 3 {
        return None;
    }
    xs.iter()
        .enumerate()
        .filter(|(i, _)| *i != cc)
        .map(|(_, x)| name_of(x))
        .collect()
}

struct Args {
    objects: Vec<Term>,
    pp: Option<(Relation, Vec<Term>)>,
    modifiers: Vec<Ulf>,
    neg: bool,
    where_q: bool,
    when_q: bool,
    count_events: bool,
    described: Option<Term>,
}

fn read_args(items: &[Ulf], whole: &Ulf) -> Result<Args, HqaError> {
    let bad = || HqaError::UnsupportedQuestionShape(whole.clone());
    let mut a = Args {
        objects: Vec::new(),
        pp: None,
        modifiers: Vec::new(),
        neg: false,
        where_q: false,
        when_q: false,
        count_events: false,
        described: None,
    };
    for it in items {
        if it.is_atom("not") {
            a.neg = true;
        } else if it.is_atom("where.pq") {
            a.where_q = true;
        } else if it.is_atom("when.pq") {
            a.when_q = true;
        } else if is_adverbial(it) {
            let counts = it.as_list().is_some_and(|xs| {
                xs[0].is_atom("adv-f")
                    && xs.get(1).and_then(|b| b.as_list()).is_some_and(|b| b.first().is_some_and(is_how_many))
            });
            if counts {
                a.count_events = true;
            } else {
                a.modifiers.push(it.clone());
            }
        } else if let Some(pp) = prep_phrase(it) {
            if a.pp.is_some() {
                return Err(bad());
            }
            a.pp = Some(pp);
        } else if let Some(t) = term(it) {
            if matches!(t, Term::Described { .. }) {
                a.described = Some(t);
            } else {
                a.objects.push(t);
            }
        } else {
            return Err(bad());
        }
    }
    Ok(a)
}

/// `(rel.p NP)` → relation and its object terms.
fn prep_phrase(u: &Ulf) -> Option<(Relation, Vec<Term>)> {
    let [p, obj] = u.as_list()? else {
        return None;
    };
    let a = p.as_atom()?;
    if a.kind() != &AtomKind::Preposition {
        return None;
    }
    let rel = relation_of_prep(&a.stem().to_lowercase())?;
    let t = term(obj)?;
    let objs = match t {
        Term::Conj(ns) if rel == Relation::Between => ns.into_iter().map(Term::Name).collect(),
        t => vec![t],
    };
    Some((rel, objs))
}

/// Verb stem → predicate: motion verbs, `touch`, or `be`.
fn verb_kind(v: &str) -> Option<&'static str> {
    match v {
        "move" | "put" | "place" | "shift" | "slide" | "push" | "drag" | "stack" | "pick" | "relocate"
        | "set" => Some("move"),
        "touch" => Some("touch"),
        "be" => Some("be"),
        _ => None,
    }
}

/// Builds a frame from a parsed, anaphora-resolved question.
pub fn extract_query_frame(u: &Ulf) -> Result<QueryFrame, HqaError> {
    let bad = || HqaError::UnsupportedQuestionShape(u.clone());
    let s = sentence_of(u);
    let parts = s.as_list().ok_or_else(bad)?;
    let head = parts.first().ok_or_else(bad)?;
    if let Some((tense, aux)) = tensed(head) {
        // inverted yes-no question
        let subject = term(parts.get(1).ok_or_else(bad)?).ok_or_else(bad)?;
        let mut rest: Vec<Ulf> = parts[2..].to_vec();
        let verb = match aux.as_str() {
            "be" => "be".to_string(),
            "do" => {
                let pos = rest
                    .iter()
                    .position(|x| {
                        x.as_atom().is_some_and(|a| a.kind() == &AtomKind::Verb)
                            || x.as_list().and_then(|l| l.first()).and_then(|h| h.as_atom()).is_some_and(|a| a.kind() == &AtomKind::Verb)
                    })
                    .ok_or_else(bad)?;
                let vp = rest.remove(pos);
                let (v, args) = match &vp {
                    Ulf::Atom(a) => (a.stem().to_lowercase(), vec![]),
                    Ulf::List(xs) => (stem(&xs[0]).ok_or_else(bad)?, xs[1..].to_vec()),
                };
                rest.extend(args);
                v
            }
            _ => return Err(bad()),
        };
        let args = read_args(&rest, u)?;
        let (predicate, objects) = predicate_for(verb_kind(&verb).ok_or_else(bad)?, &args, u)?;
        return Ok(QueryFrame {
            category: Category::YesNo,
            subject,
            predicate,
            objects,
            polarity: if args.neg { Polarity::Neg } else { Polarity::Pos },
            tense,
            modifiers: args.modifiers,
            np_temporal: None,
            count_events: args.count_events,
        });
    }
    declarative(u, parts, true)
}

/// Frame of an embedded clause such as `(|Toyota| (past move.v))`. Clauses
/// without a wh-term get the yes-no category.
pub fn clause_frame(clause: &Ulf) -> Result<QueryFrame, HqaError> {
    let parts = clause
        .as_list()
        .ok_or_else(|| HqaError::UnsupportedQuestionShape(clause.clone()))?;
    declarative(clause, parts, false)
}

fn declarative(u: &Ulf, parts: &[Ulf], strict: bool) -> Result<QueryFrame, HqaError> {
    let bad = || HqaError::UnsupportedQuestionShape(u.clone());
    let [subj, vp] = parts else {
        return Err(bad());
    };
    let subject = term(subj).ok_or_else(bad)?;
    let (tense, verb, rest) = match tensed(vp) {
        Some((t, v)) => (t, v, Vec::new()),
        None => {
            let xs = vp.as_list().ok_or_else(bad)?;
            let (t, v) = tensed(xs.first().ok_or_else(bad)?).ok_or_else(bad)?;
            (t, v, xs[1..].to_vec())
        }
    };
    let args = read_args(&rest, u)?;
    let kind = verb_kind(&verb).ok_or_else(bad)?;
    let (predicate, objects, np_temporal) = match (&args.described, kind) {
        (Some(Term::Described { ordinal, .. }), "be") => (
            Predicate::Identity,
            vec![args.described.clone().unwrap_or(Term::Speaker)],
            Some(*ordinal),
        ),
        _ => {
            let (p, o) = predicate_for(kind, &args, u)?;
            (p, o, None)
        }
    };
    let mut frame = QueryFrame {
        category: Category::IdentWhich,
        subject,
        predicate,
        objects,
        polarity: if args.neg { Polarity::Neg } else { Polarity::Pos },
        tense,
        modifiers: args.modifiers,
        np_temporal,
        count_events: args.count_events,
    };
    frame.category = if args.where_q {
        Category::Where
    } else if args.when_q {
        Category::When
    } else if args.count_events || matches!(frame.subject, Term::HowMany(_)) {
        Category::HowMany
    } else if matches!(frame.subject, Term::Choice(_)) {
        Category::OrderCompare
    } else if frame.wh().is_some() || frame.predicate == Predicate::Identity {
        Category::IdentWhich
    } else if !strict {
        Category::YesNo
    } else {
        return Err(bad());
    };
    Ok(frame)
}

fn predicate_for(kind: &str, args: &Args, u: &Ulf) -> Result<(Predicate, Vec<Term>), HqaError> {
    let bad = || HqaError::UnsupportedQuestionShape(u.clone());
    Ok(match kind {
        "move" => (
            Predicate::Move {
                dest: args.pp.clone(),
            },
            args.objects.clone(),
        ),
        "touch" => (Predicate::Spatial(Relation::Touching), args.objects.clone()),
        _ => match &args.pp {
            Some((rel, objs)) => (Predicate::Spatial(*rel), objs.clone()),
            None if args.where_q => (Predicate::Located, Vec::new()),
            None => return Err(bad()),
        },
    })
}
