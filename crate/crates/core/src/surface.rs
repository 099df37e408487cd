//! Answer generation: substitute bindings into the question ULF, uninvert it,
//! then realize the declarative ULF as English.

use thiserror::Error;

use crate::hqa::frame::{sentence_of, term};
use crate::hqa::{AnswerPlan, Category, Predicate, QueryFrame, Term};
use crate::ulf::{AtomKind, Ulf};
use crate::world::{SpatialFact, TableRegion};

pub const GREETING: &str = "Hello. Would you like to ask me a spatial question?";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SurfaceError {
    #[error("no binding for {0}")]
    MissingBinding(String),
    #[error("cannot realize {0}")]
    RealizationGap(Ulf),
}

const NUMBER_WORDS: [&str; 13] = [
    "zero", "one", "two", "three", "four", "five", "six", "seven", "eight", "nine", "ten", "eleven", "twelve",
];

/// Number words through twelve, digits beyond.
pub fn number_word(n: usize) -> String {
    NUMBER_WORDS.get(n).map_or_else(|| n.to_string(), |w| w.to_string())
}

fn counted(n: usize, unit: &str) -> String {
    let s = if n == 1 { "" } else { "s" };
    format!("{} {unit}{s}", number_word(n))
}

/// Elapsed-time wording for a duration in seconds.
pub fn time_phrase(secs: f64) -> String {
    let d = secs.max(0.0);
    if d < 30.0 {
        "just now".into()
    } else if d < 90.0 {
        format!("{} ago", counted(((d / 10.0).round() * 10.0) as usize, "second"))
    } else if d < 3600.0 {
        format!("{} ago", counted((d / 60.0 + 0.5).floor() as usize, "minute"))
    } else {
        format!("{} ago", counted((d / 3600.0 + 0.5).floor() as usize, "hour"))
    }
}

fn a(s: &str) -> Ulf {
    Ulf::atom(s)
}

fn l<const N: usize>(xs: [Ulf; N]) -> Ulf {
    Ulf::list(xs)
}

/// `(the.d (|X| block.n))`
pub fn block_np(name: &str) -> Ulf {
    l([a("the.d"), l([Ulf::name(name), a("block.n")])])
}

/// One name, or `(A B and.cc C)`.
fn names_np(names: &[String]) -> Ulf {
    match names {
        [n] => block_np(n),
        _ => {
            let mut v: Vec<Ulf> = names.iter().map(|n| block_np(n)).collect();
            v.insert(v.len() - 1, a("and.cc"));
            Ulf::List(v)
        }
    }
}

/// Swaps first and second person.
pub fn flip_person(u: &Ulf) -> Ulf {
    u.map_subtrees(&mut |x| match x.as_atom().map(|a| a.surface().to_lowercase()) {
        Some(s) if s == "i.pro" => Some(a("you.pro")),
        Some(s) if s == "you.pro" => Some(a("I.pro")),
        _ => None,
    })
}

fn is_wh_np(x: &Ulf) -> bool {
    x.is_atom("what.pro") || x.is_atom("which.pro") || (x.as_list().is_some() && term(x).is_some_and(|t| t.is_wh()))
}

fn is_adverbial(x: &Ulf) -> bool {
    x.as_list()
        .and_then(|xs| xs.first())
        .is_some_and(|h| h.kind() == Some(&AtomKind::AdverbialOp))
}

/// Replaces the first wh constituent outside adverbials.
fn substitute(u: &Ulf, with: &Ulf) -> (Ulf, bool) {
    if is_wh_np(u) {
        return (with.clone(), true);
    }
    match u {
        Ulf::List(xs) if !is_adverbial(u) => {
            let mut done = false;
            let out = xs
                .iter()
                .map(|x| {
                    if done {
                        return x.clone();
                    }
                    let (y, d) = substitute(x, with);
                    done = d;
                    y
                })
                .collect();
            (Ulf::List(out), done)
        }
        _ => (u.clone(), false),
    }
}

fn singular(nom: &Ulf) -> Ulf {
    nom.map_subtrees(&mut |x| match x.as_list() {
        Some([p, n]) if p.is_atom("plur") => Some(n.clone()),
        _ => None,
    })
}

fn pp(f: &SpatialFact) -> Ulf {
    let prep = a(&format!("{}.p", f.relation.tag()));
    let obj = match f.objects.as_slice() {
        [o] => block_np(o),
        os => names_np(os),
    };
    l([prep, obj])
}

fn region_pp(r: &TableRegion) -> Ulf {
    let table = l([a("the.d"), a("table.n")]);
    let name = match (r.depth, r.lateral) {
        (None, None) => return l([a("in.p"), l([a("the.d"), l([a("middle.n"), l([a("of.p"), table])])])]),
        (Some(d), Some(x)) => format!("{d}-{x}.n"),
        (Some(d), None) => format!("{d}.n"),
        (None, Some(x)) => format!("{x}.n"),
    };
    l([a("at.p"), l([a("the.d"), l([a(&name), l([a("of.p"), table])])])])
}

fn is_move_verb(v: &str) -> bool {
    matches!(
        v,
        "move" | "put" | "place" | "shift" | "slide" | "push" | "drag" | "stack" | "pick" | "relocate" | "set"
    )
}

fn verb_stem(tv: &Ulf) -> Option<String> {
    tv.as_list()?.get(1)?.as_atom().map(|a| a.stem().to_lowercase())
}

fn tense_atom(tv: &Ulf) -> Ulf {
    tv.as_list().and_then(|xs| xs.first()).cloned().unwrap_or_else(|| a("past"))
}

/// Splits `(SUBJ VP)` into subject, tensed verb and arguments.
fn declarative_parts(s: &Ulf) -> Option<(Ulf, Ulf, Vec<Ulf>)> {
    let [subj, vp] = s.as_list()? else {
        return None;
    };
    let xs = vp.as_list()?;
    if xs.first()?.as_atom().is_some() {
        Some((subj.clone(), vp.clone(), Vec::new()))
    } else {
        Some((subj.clone(), xs[0].clone(), xs[1..].to_vec()))
    }
}

fn assemble(subj: Ulf, tv: Ulf, args: Vec<Ulf>) -> Ulf {
    let verb = verb_stem(&tv).unwrap_or_default();
    let patient_subject = is_move_verb(&verb) && !subj.is_atom("you.pro") && !subj.is_atom("I.pro");
    let (subj, args) = if patient_subject {
        let mut v = vec![subj];
        v.extend(args);
        (a("you.pro"), v)
    } else {
        (subj, args)
    };
    let mut vp = vec![tv];
    vp.extend(args);
    l([subj, Ulf::List(vp)])
}

fn dont_know() -> Ulf {
    l([a("I.pro"), l([l([a("pres"), a("do.aux-s")]), a("not"), a("know.v")])])
}

fn any_np(frame: &QueryFrame) -> Ulf {
    let color = frame.wh().and_then(|(t, _)| match t {
        Term::Wh(r) | Term::HowMany(r) => r.color,
        _ => None,
    });
    let nom = match color {
        Some(c) => l([a(&format!("{}.a", c.as_str())), a("block.n")]),
        None => a("block.n"),
    };
    l([a("any.d"), nom])
}

fn negated(query: &Ulf, frame: &QueryFrame) -> Ulf {
    let s = flip_person(sentence_of(query));
    let Some((subj, tv, args)) = declarative_parts(&s) else {
        return dont_know();
    };
    let tense = tense_atom(&tv);
    let past_do = l([tense.clone(), a("do.aux-s")]);
    let subject_wh = frame.wh().is_some_and(|(_, subj)| subj);
    let pp_of = |args: &[Ulf]| {
        args.iter()
            .find(|x| x.as_list().and_then(|xs| xs.first()).is_some_and(|h| h.kind() == Some(&AtomKind::Preposition)))
            .cloned()
    };
    match (&frame.predicate, frame.category) {
        (Predicate::Identity, _) => l([a("you.pro"), l([past_do, a("not"), l([a("move.v"), l([a("any.d"), a("block.n")])])])]),
        (Predicate::Move { .. }, c) if matches!(c, Category::When | Category::Where) || frame.count_events => {
            l([a("you.pro"), l([past_do, a("not"), l([a("move.v"), subj])])])
        }
        (Predicate::Move { .. }, _) => {
            let mut v = vec![a("move.v"), any_np(frame)];
            v.extend(pp_of(&args));
            l([a("you.pro"), l([past_do, a("not"), Ulf::List(v)])])
        }
        (Predicate::Spatial(_), _) if verb_stem(&tv).as_deref() == Some("touch") => {
            if subject_wh {
                let obj = args.iter().find(|x| term(x).is_some()).cloned();
                let mut vp = vec![tv.clone()];
                vp.extend(obj);
                l([l([a("no.d"), a("block.n")]), Ulf::List(vp)])
            } else {
                l([subj, l([past_do, a("not"), l([a("touch.v"), any_np(frame)])])])
            }
        }
        (Predicate::Spatial(rel), _) => {
            let be = l([tense, a("be.v")]);
            if subject_wh {
                match pp_of(&args) {
                    Some(p) => l([l([a("no.d"), a("block.n")]), l([be, p])]),
                    None => dont_know(),
                }
            } else {
                let prep = a(&format!("{}.p", rel.tag()));
                l([subj, l([be, a("not"), l([prep, any_np(frame)])])])
            }
        }
        _ => dont_know(),
    }
}

/// Substitutes the plan's bindings into the question and uninverts it.
pub fn substitute_and_uninvert(query: &Ulf, frame: Option<&QueryFrame>, plan: &AnswerPlan) -> Result<Ulf, SurfaceError> {
    let need = |what: &str| SurfaceError::MissingBinding(what.to_string());
    let frame = match plan {
        AnswerPlan::Yes => return Ok(a("yes.yn")),
        AnswerPlan::No => return Ok(a("no.yn")),
        AnswerPlan::Greeting => return Ok(a("hello.gr")),
        AnswerPlan::DontKnow => return Ok(dont_know()),
        _ => frame.ok_or_else(|| need("frame"))?,
    };
    if *plan == AnswerPlan::Negated || (*plan == AnswerPlan::Count { n: 0 } && frame.count_events) {
        return Ok(negated(query, frame));
    }
    let s = flip_person(sentence_of(query));
    let s = match plan {
        AnswerPlan::Ident { bindings } => {
            let (u, done) = substitute(&s, &names_np(bindings));
            if !done {
                return Err(need("wh"));
            }
            u
        }
        AnswerPlan::Count { n } if !frame.count_events => {
            let Some((Term::HowMany(_), true)) = frame.wh() else {
                return Err(need("how many"));
            };
            let nom = s
                .as_list()
                .and_then(|xs| xs.first())
                .and_then(|np| np.as_list())
                .and_then(|np| np.get(1))
                .cloned()
                .ok_or_else(|| need("how many"))?;
            let np = match n {
                0 => l([a("no.d"), nom]),
                1 => l([a("one.d"), singular(&nom)]),
                n => l([a(&format!("{}.d", number_word(*n))), nom]),
            };
            substitute(&s, &np).0
        }
        _ => s,
    };
    let (subj, tv, args) = declarative_parts(&s).ok_or_else(|| SurfaceError::RealizationGap(s.clone()))?;
    let mut kept = Vec::new();
    for x in args {
        if x.is_atom("where.pq") || x.is_atom("when.pq") {
            continue;
        }
        if is_adverbial(&x) {
            let keep_ordinal = frame.category == Category::OrderCompare
                && x.as_list().is_some_and(|xs| xs[1].is_atom("first.a") || xs[1].is_atom("last.a"));
            let how_many = x.contains(&|y: &Ulf| y.is_atom("how.mod-a"));
            match plan {
                AnswerPlan::Count { n } if how_many => {
                    kept.push(l([a("adv-f"), l([a(&format!("{}.a", number_word(*n))), l([a("plur"), a("time.n")])])]));
                }
                _ if keep_ordinal => kept.push(x),
                _ => {}
            }
            continue;
        }
        kept.push(x);
    }
    match plan {
        AnswerPlan::Where { facts, region, .. } => {
            let pps: Vec<Ulf> = if facts.is_empty() {
                region.iter().map(region_pp).collect()
            } else {
                facts.iter().map(pp).collect()
            };
            for (i, p) in pps.into_iter().enumerate() {
                if i > 0 {
                    kept.push(a("and.cc"));
                }
                kept.push(p);
            }
        }
        AnswerPlan::When { elapsed } => {
            kept.push(l([a("adv-e"), l([a("ago.p"), l([a("$"), a("duration"), Ulf::numeral(elapsed.round())])])]));
        }
        _ => {}
    }
    Ok(assemble(subj, tv, kept))
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Person {
    First,
    Second,
    Third { plural: bool },
}

fn gap(u: &Ulf) -> SurfaceError {
    SurfaceError::RealizationGap(u.clone())
}

fn atom_stem(u: &Ulf) -> Option<String> {
    u.as_atom().map(|a| a.stem().to_string())
}

fn past_form(v: &str) -> String {
    match v {
        "put" | "set" => v.into(),
        "slide" => "slid".into(),
        "know" => "knew".into(),
        "drag" => "dragged".into(),
        _ if v.ends_with('e') => format!("{v}d"),
        _ => format!("{v}ed"),
    }
}

fn pres_form(v: &str, p: Person) -> String {
    match p {
        Person::Third { plural: false } if v.ends_with("sh") || v.ends_with("ch") => format!("{v}es"),
        Person::Third { plural: false } => format!("{v}s"),
        _ => v.into(),
    }
}

fn person_of(np: &Ulf) -> Person {
    if np.is_atom("I.pro") {
        return Person::First;
    }
    if np.is_atom("you.pro") {
        return Person::Second;
    }
    let plural = match np.as_list() {
        Some(xs) if xs.iter().any(|x| x.is_atom("and.cc")) => true,
        Some([d, nom]) => {
            let n = atom_stem(d).and_then(|s| crate::hqa::constraint::word_number(&s));
            match n {
                Some(n) => n != 1,
                None => nom.contains(&|x: &Ulf| x.is_atom("plur")),
            }
        }
        _ => false,
    };
    Person::Third { plural }
}

fn nom_words(u: &Ulf) -> Result<String, SurfaceError> {
    match u {
        Ulf::Atom(at) => match at.kind() {
            AtomKind::Noun => Ok(at.stem().replace('-', " ")),
            AtomKind::Name => Ok(at.name_text().unwrap_or_default().to_string()),
            _ => Err(gap(u)),
        },
        Ulf::List(xs) => match xs.as_slice() {
            [p, n] if p.is_atom("plur") => Ok(format!("{}s", nom_words(n)?)),
            [m, n] if matches!(m.kind(), Some(AtomKind::Adjective) | Some(AtomKind::Name)) => {
                Ok(format!("{} {}", nom_words_mod(m)?, nom_words(n)?))
            }
            [n, rel] if rel.as_list().and_then(|r| r.first()).is_some_and(|h| h.is_atom("that.rel")) => {
                let clause = &rel.as_list().unwrap_or_default()[1];
                Ok(format!("{} that {}", nom_words(n)?, clause_words(clause)?))
            }
            [n, pp] if pp.as_list().and_then(|r| r.first()).is_some_and(|h| h.kind() == Some(&AtomKind::Preposition)) => {
                Ok(format!("{} {}", nom_words(n)?, pp_words(pp)?))
            }
            _ => Err(gap(u)),
        },
    }
}

fn nom_words_mod(m: &Ulf) -> Result<String, SurfaceError> {
    match m.as_atom() {
        Some(at) if at.kind() == &AtomKind::Name => Ok(at.name_text().unwrap_or_default().to_string()),
        Some(at) => Ok(at.stem().to_string()),
        None => Err(gap(m)),
    }
}

fn np_words(u: &Ulf) -> Result<String, SurfaceError> {
    if let Some(at) = u.as_atom() {
        return match at.kind() {
            AtomKind::Name => Ok(format!("the {} block", at.name_text().unwrap_or_default())),
            AtomKind::Pronoun => match at.stem().to_lowercase().as_str() {
                "i" => Ok("I".into()),
                "you" => Ok("you".into()),
                "it" => Ok("it".into()),
                _ => Err(gap(u)),
            },
            _ => Err(gap(u)),
        };
    }
    let xs = u.as_list().ok_or_else(|| gap(u))?;
    if let Some(cc) = xs.iter().position(|x| x.is_atom("and.cc") || x.is_atom("or.cc")) {
        let word = if xs[cc].is_atom("and.cc") { "and" } else { "or" };
        let items: Vec<String> = xs
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != cc)
            .map(|(_, x)| np_words(x))
            .collect::<Result<_, _>>()?;
        let (last, init) = items.split_last().ok_or_else(|| gap(u))?;
        return Ok(format!("{} {word} {last}", init.join(", ")));
    }
    let [d, nom] = xs else {
        return Err(gap(u));
    };
    let det = atom_stem(d).ok_or_else(|| gap(u))?.to_lowercase();
    if d.kind() != Some(&AtomKind::Determiner) {
        return Err(gap(u));
    }
    let nom = nom_words(nom)?;
    let det = match det.as_str() {
        "a" if nom.starts_with(['a', 'e', 'i', 'o', 'u']) => "an".to_string(),
        w => match crate::hqa::constraint::word_number(w) {
            Some(n) => number_word(n),
            None => w.to_string(),
        },
    };
    Ok(format!("{det} {nom}"))
}

fn is_definite(np: &Ulf) -> bool {
    np.kind() == Some(&AtomKind::Name)
        || np
            .as_list()
            .is_some_and(|xs| xs.iter().any(|x| x.is_atom("and.cc")) || xs.first().is_some_and(|d| d.is_atom("the.d")))
}

fn pp_words(u: &Ulf) -> Result<String, SurfaceError> {
    let [p, obj] = u.as_list().ok_or_else(|| gap(u))? else {
        return Err(gap(u));
    };
    let prep = atom_stem(p).ok_or_else(|| gap(u))?;
    let words = match prep.as_str() {
        "on" if is_definite(obj) => "on top of",
        "left-of" => "to the left of",
        "right-of" => "to the right of",
        "in-front-of" => "in front of",
        "on" | "above" | "below" | "near" | "touching" | "between" | "behind" | "at" | "in" | "of" | "to" => {
            prep.as_str()
        }
        _ => return Err(gap(u)),
    };
    Ok(format!("{words} {}", np_words(obj)?))
}

fn adverbial_words(u: &Ulf) -> Result<String, SurfaceError> {
    let [op, body] = u.as_list().ok_or_else(|| gap(u))? else {
        return Err(gap(u));
    };
    if op.is_atom("adv-e") {
        if body.is_atom("first.a") || body.is_atom("last.a") {
            return atom_stem(body).ok_or_else(|| gap(u));
        }
        if let Some([p, dur]) = body.as_list() {
            if p.is_atom("ago.p") {
                let secs = dur
                    .as_list()
                    .and_then(|d| d.get(2))
                    .and_then(|n| n.as_atom())
                    .and_then(|n| n.number())
                    .ok_or_else(|| gap(u))?;
                return Ok(time_phrase(secs));
            }
        }
    }
    if op.is_atom("adv-f") {
        if let Some([n, _]) = body.as_list() {
            let n = atom_stem(n)
                .and_then(|s| crate::hqa::constraint::word_number(&s))
                .ok_or_else(|| gap(u))?;
            return Ok(match n {
                1 => "once".into(),
                2 => "twice".into(),
                n => counted(n, "time"),
            });
        }
    }
    Err(gap(u))
}

fn arg_words(u: &Ulf) -> Result<String, SurfaceError> {
    if u.is_atom("and.cc") {
        return Ok("and".into());
    }
    if is_adverbial(u) {
        return adverbial_words(u);
    }
    if u.as_list().and_then(|xs| xs.first()).is_some_and(|h| h.kind() == Some(&AtomKind::Preposition)) {
        return pp_words(u);
    }
    np_words(u)
}

fn tensed_words(tv: &Ulf, person: Person, neg: bool) -> Result<String, SurfaceError> {
    let [t, v] = tv.as_list().ok_or_else(|| gap(tv))? else {
        return Err(gap(tv));
    };
    let past = t.is_atom("past");
    let verb = atom_stem(v).ok_or_else(|| gap(tv))?.to_lowercase();
    let plural = matches!(person, Person::Second | Person::Third { plural: true });
    let base = match (verb.as_str(), past) {
        ("be", true) if plural => "were".to_string(),
        ("be", true) => "was".into(),
        ("be", false) if person == Person::First => "am".into(),
        ("be", false) if plural => "are".into(),
        ("be", false) => "is".into(),
        ("do", true) => "did".into(),
        ("do", false) if matches!(person, Person::Third { plural: false }) => "does".into(),
        ("do", false) => "do".into(),
        (v, true) => past_form(v),
        (v, false) => pres_form(v, person),
    };
    Ok(match (neg, verb.as_str()) {
        (false, _) => base,
        (true, "be" | "do") if base == "am" => "am not".into(),
        (true, "be" | "do") => format!("{base}n't"),
        (true, _) => return Err(gap(tv)),
    })
}

fn clause_words(u: &Ulf) -> Result<String, SurfaceError> {
    let [subj, vp] = u.as_list().ok_or_else(|| gap(u))? else {
        return Err(gap(u));
    };
    let person = person_of(subj);
    let (tv, args) = match vp.as_list() {
        Some(xs) if xs.first().is_some_and(|h| h.as_atom().is_some()) => (vp.clone(), Vec::new()),
        Some(xs) if !xs.is_empty() => (xs[0].clone(), xs[1..].to_vec()),
        _ => return Err(gap(u)),
    };
    let neg = args.iter().any(|x| x.is_atom("not"));
    let mut words = vec![np_words(subj)?, tensed_words(&tv, person, neg)?];
    for x in args.iter().filter(|x| !x.is_atom("not")) {
        match x {
            // the bare verb phrase after an auxiliary
            Ulf::Atom(at) if at.kind() == &AtomKind::Verb => words.push(at.stem().to_string()),
            Ulf::List(vs) if vs.first().is_some_and(|h| h.kind() == Some(&AtomKind::Verb)) => {
                words.push(atom_stem(&vs[0]).unwrap_or_default());
                for y in &vs[1..] {
                    words.push(arg_words(y)?);
                }
            }
            _ => words.push(arg_words(x)?),
        }
    }
    Ok(words.join(" "))
}

/// English for a declarative answer ULF.
pub fn realize(u: &Ulf) -> Result<String, SurfaceError> {
    let body = match u.as_atom().map(|a| a.surface()) {
        Some("yes.yn") => return Ok("Yes.".into()),
        Some("no.yn") => return Ok("No.".into()),
        Some("hello.gr") => return Ok(GREETING.into()),
        _ => clause_words(u)?,
    };
    let mut chars = body.chars();
    let first = chars.next().ok_or_else(|| gap(u))?;
    Ok(format!("{}{}.", first.to_uppercase(), chars.as_str()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(s: &str) -> String {
        realize(&s.parse().unwrap()).unwrap()
    }

    #[test]
    fn time_phrases() {
        assert_eq!(time_phrase(0.0), "just now");
        assert_eq!(time_phrase(29.9), "just now");
        assert_eq!(time_phrase(44.0), "40 seconds ago");
        assert_eq!(time_phrase(150.0), "three minutes ago");
        assert_eq!(time_phrase(180.0), "three minutes ago");
        assert_eq!(time_phrase(61.0 * 60.0), "one hour ago");
    }

    #[test]
    fn realizes_answer_forms() {
        assert_eq!(r("(you.pro ((past move.v) (the.d (|Toyota| block.n))))"), "You moved the Toyota block.");
        assert_eq!(r("(you.pro ((past move.v) (two.d (plur block.n))))"), "You moved two blocks.");
        assert_eq!(
            r("(|Toyota| ((pres be.v) (on.p (the.d (|Texaco| block.n)))))"),
            "The Toyota block is on top of the Texaco block."
        );
        assert_eq!(
            r("((the.d (|Twitter| block.n)) ((past be.v) not (on.p (any.d block.n))))"),
            "The Twitter block wasn't on any block."
        );
        assert_eq!(
            r("((the.d (|Toyota| block.n)) ((past be.v) (between.p ((the.d (|Mercedes| block.n)) and.cc (the.d (|Burger King| block.n))))))"),
            "The Toyota block was between the Mercedes block and the Burger King block."
        );
        assert_eq!(
            r("(you.pro ((past move.v) (the.d (|Toyota| block.n)) (adv-e (ago.p ($ duration 180)))))"),
            "You moved the Toyota block three minutes ago."
        );
        assert_eq!(r("(you.pro ((past do.aux-s) not (move.v (any.d block.n))))"), "You didn't move any block.");
        assert_eq!(r("(I.pro ((pres do.aux-s) not know.v))"), "I don't know.");
        assert_eq!(r("yes.yn"), "Yes.");
        assert_eq!(
            r("((|A| |B| and.cc |C|) ((pres be.v) (left-of.p |D|)))"),
            "The A block, the B block and the C block are to the left of the D block."
        );
        assert_eq!(r("(you.pro ((past move.v) |A| (adv-f (one.a (plur time.n)))))"), "You moved the A block once.");
    }

    #[test]
    fn output_has_no_ulf_residue() {
        for s in [
            "(you.pro ((past move.v) (one.d block.n)))",
            "(|X| ((past be.v) (at.p (the.d (front-left.n (of.p (the.d table.n)))))))",
            "((the.d (|A| block.n)) ((past be.v) (the.d ((first.a block.n) (that.rel (you.pro (past move.v)))))))",
        ] {
            let out = r(s);
            assert!(!out.contains(['(', ')', '|']) && !out.contains(".n") && !out.contains(".d"), "{out}");
        }
    }

    #[test]
    fn unknown_constructs_are_gaps() {
        assert!(matches!(realize(&"(what.pro ((pres be.v) happy.a))".parse().unwrap()), Err(SurfaceError::RealizationGap(_))));
    }

    #[test]
    fn flip_is_an_involution() {
        let u: Ulf = "(I.pro ((past move.v) (adv-s (before.ps (you.pro (past move.v))))))".parse().unwrap();
        assert_eq!(flip_person(&flip_person(&u)), u);
        assert_ne!(flip_person(&u), u);
    }
}
