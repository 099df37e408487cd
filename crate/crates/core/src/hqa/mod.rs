//! Historical question answering over episodic memory.
//!
//! Candidate times run from the present backwards. Each is filtered by the
//! question's temporal constraints and paired with the facts that hold in
//! the scene reconstructed for it; the surviving times answer the question.

pub mod constraint;
pub mod frame;

use std::cell::OnceCell;
use std::collections::BTreeMap;

use thiserror::Error;

use crate::memory::{Clock, EpisodicMemory, MemoryError};
use crate::ulf::Ulf;
use crate::world::{describe_location, eval_relation, table_region, Relation, Scene, SpatialFact, TableRegion, World};

pub use constraint::{
    apply_frequency, compile_constraint, filter_binary, filter_unary, is_recent, BinaryRel, ConstraintKind, Frequency,
    ModA, TemporalConstraint, UnaryPred,
};
pub use frame::{clause_frame, extract_query_frame, Category, Polarity, Predicate, QueryFrame, Restrictor, Tense, Term};

#[derive(Debug, Error)]
pub enum HqaError {
    #[error("unsupported question shape: {0}")]
    UnsupportedQuestionShape(Ulf),
    #[error("unknown temporal modifier: {0}")]
    UnknownModifier(Ulf),
    #[error("the event {0} never happened")]
    EmptyObjectEvent(Ulf),
    #[error("no block named {0:?}")]
    UnknownBlock(String),
    #[error(transparent)]
    Memory(#[from] MemoryError),
}

/// A fact attached to a time token during evaluation.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SalientFact {
    Moved { block: String },
    Holds(SpatialFact),
    Located {
        block: String,
        facts: Vec<SpatialFact>,
        region: Option<TableRegion>,
    },
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct AnswerSet {
    /// Retained tokens, newest first.
    pub times: Vec<usize>,
    pub facts: BTreeMap<usize, Vec<SalientFact>>,
    pub presupposition_failed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum AnswerPlan {
    Yes,
    No,
    Ident { bindings: Vec<String> },
    Where {
        block: String,
        facts: Vec<SpatialFact>,
        region: Option<TableRegion>,
    },
    When { elapsed: Clock },
    Count { n: usize },
    /// Deny the question's existential presupposition.
    Negated,
    DontKnow,
    Greeting,
}

#[derive(Debug, Clone)]
pub struct HqaResult {
    pub frame: Option<QueryFrame>,
    pub set: AnswerSet,
    pub plan: AnswerPlan,
}

/// The pragmatic default: the single most recent time, for past-tense
/// questions that carry no unary, frequency, since/until or ordinal limit.
pub fn infer_default_constraint(frame: &QueryFrame, constraints: &[TemporalConstraint]) -> Option<TemporalConstraint> {
    if frame.tense != Tense::Past || frame.np_temporal.is_some() || frame.count_events {
        return None;
    }
    let blocks = constraints.iter().any(|c| {
        c.is_ever()
            || matches!(
                c.kind,
                ConstraintKind::Unary(_)
                    | ConstraintKind::Frequency(_)
                    | ConstraintKind::Binary {
                        rel: BinaryRel::Since | BinaryRel::Until,
                        ..
                    }
            )
    });
    (!blocks).then(|| TemporalConstraint::unary(UnaryPred::Last))
}

/// Read-only view of a session used to answer questions.
#[derive(Clone)]
pub struct Kb<'a> {
    pub memory: &'a EpisodicMemory,
    pub world: &'a World,
    pub now: Clock,
    scenes: OnceCell<Vec<Scene>>,
}

impl<'a> Kb<'a> {
    pub fn new(memory: &'a EpisodicMemory, world: &'a World, now: Clock) -> Self {
        Kb {
            memory,
            world,
            now,
            scenes: OnceCell::new(),
        }
    }

    /// The scene at token `t`, from a history built once per view.
    fn scene(&self, t: usize) -> Result<&Scene, HqaError> {
        self.memory.token(t)?;
        if self.scenes.get().is_none() {
            let _ = self.scenes.set(self.memory.scene_history()?);
        }
        Ok(&self.scenes.get().expect("just set")[t / 2])
    }

    fn blocks(&self) -> Vec<String> {
        let scene = self.memory.current_scene();
        let mut v: Vec<String> = self.world.block_names().filter(|n| scene.contains(n)).map(String::from).collect();
        for n in scene.names() {
            if !v.iter().any(|m| m == n) {
                v.push(n.to_string());
            }
        }
        v
    }

    fn check_names(&self, frame: &QueryFrame) -> Result<(), HqaError> {
        fn names(t: &Term, out: &mut Vec<String>) {
            match t {
                Term::Name(n) => out.push(n.clone()),
                Term::Choice(ns) | Term::Conj(ns) => out.extend(ns.iter().cloned()),
                _ => {}
            }
        }
        let mut all = Vec::new();
        names(&frame.subject, &mut all);
        frame.objects.iter().for_each(|o| names(o, &mut all));
        if let Predicate::Move { dest: Some((_, objs)) } = &frame.predicate {
            objs.iter().for_each(|o| names(o, &mut all));
        }
        let scene = self.memory.current_scene();
        match all.into_iter().find(|n| !scene.contains(n)) {
            Some(n) => Err(HqaError::UnknownBlock(n)),
            None => Ok(()),
        }
    }

    fn matches(&self, r: &Restrictor, block: &str) -> bool {
        r.color.is_none_or(|c| self.world.color_of(block) == Some(c))
    }

    fn term_admits(&self, t: &Term, block: &str) -> bool {
        match t {
            Term::Name(n) => n == block,
            Term::Wh(r) | Term::HowMany(r) | Term::Indef { restrictor: r, .. } => self.matches(r, block),
            Term::Choice(ns) | Term::Conj(ns) => ns.iter().any(|n| n == block),
            Term::Speaker => true,
            Term::Described { .. } => false,
        }
    }

    /// Relation facts for `s` against the object terms in `scene`.
    fn relation_facts(&self, scene: &Scene, s: &str, rel: Relation, objects: &[Term]) -> Result<Vec<SpatialFact>, HqaError> {
        let others: Vec<String> = self.blocks().into_iter().filter(|b| b != s).collect();
        let holds = |f: &SpatialFact| eval_relation(scene, f).map_err(MemoryError::from);
        let mut out = Vec::new();
        if rel == Relation::Between {
            let pairs: Vec<[String; 2]> = match objects {
                [Term::Name(a), Term::Name(b)] => vec![[a.clone(), b.clone()]],
                [t] => {
                    let pool: Vec<&String> = others.iter().filter(|o| self.term_admits(t, o)).collect();
                    let mut v = Vec::new();
                    for (i, a) in pool.iter().enumerate() {
                        for b in &pool[i + 1..] {
                            v.push([(*a).clone(), (*b).clone()]);
                        }
                    }
                    v
                }
                _ => Vec::new(),
            };
            for [a, b] in pairs {
                if a == s || b == s {
                    continue;
                }
                let f = SpatialFact::new(s, rel, &[&a, &b]);
                if holds(&f)? {
                    out.push(f);
                }
            }
            return Ok(out);
        }
        let (pool, need): (Vec<&String>, usize) = match objects.first() {
            None => (others.iter().collect(), 1),
            Some(Term::Conj(ns)) => (others.iter().filter(|o| ns.contains(o)).collect(), ns.len()),
            Some(Term::Indef { count, .. }) => {
                let t = &objects[0];
                (others.iter().filter(|o| self.term_admits(t, o)).collect(), *count)
            }
            Some(t) => (others.iter().filter(|o| self.term_admits(t, o)).collect(), 1),
        };
        for o in pool {
            let f = SpatialFact::new(s, rel, &[o]);
            if holds(&f)? {
                out.push(f);
            }
        }
        if out.len() < need {
            out.clear();
        }
        Ok(out)
    }

    fn location(&self, scene: &Scene, block: &str) -> Result<SalientFact, HqaError> {
        let facts = describe_location(scene, block).map_err(MemoryError::from)?;
        let region = if facts.is_empty() {
            Some(table_region(scene, block).map_err(MemoryError::from)?)
        } else {
            None
        };
        Ok(SalientFact::Located {
            block: block.to_string(),
            facts,
            region,
        })
    }

    /// Facts relevant to `frame` at token `t`.
    pub fn facts_for(&self, frame: &QueryFrame, t: usize) -> Result<Vec<SalientFact>, HqaError> {
        let m = self.memory;
        match &frame.predicate {
            Predicate::Move { dest } => {
                let Some(mv) = m.move_at(t) else {
                    return Ok(Vec::new());
                };
                if !self.term_admits(&frame.subject, &mv.block) {
                    return Ok(Vec::new());
                }
                let after = self.scene(t + 1)?;
                if let Some((rel, objs)) = dest {
                    if self.relation_facts(after, &mv.block, *rel, objs)?.is_empty() {
                        return Ok(Vec::new());
                    }
                }
                if frame.category == Category::Where {
                    return Ok(vec![self.location(after, &mv.block)?]);
                }
                Ok(vec![SalientFact::Moved { block: mv.block.clone() }])
            }
            Predicate::Spatial(rel) => {
                let scene = self.scene(t)?;
                let mut out = Vec::new();
                for s in self.blocks() {
                    if self.term_admits(&frame.subject, &s) {
                        out.extend(
                            self.relation_facts(scene, &s, *rel, &frame.objects)?
                                .into_iter()
                                .map(SalientFact::Holds),
                        );
                    }
                }
                Ok(out)
            }
            Predicate::Located => match &frame.subject {
                Term::Name(n) => Ok(vec![self.location(self.scene(t)?, n)?]),
                _ => Ok(Vec::new()),
            },
            Predicate::Identity => Ok(Vec::new()),
        }
    }

    /// Tokens at which an embedded event or noun phrase holds. `outer` supplies
    /// the referent for an elided object.
    pub fn resolve_event_times(&self, object: &Ulf, outer: &QueryFrame) -> Result<Vec<usize>, HqaError> {
        let m = self.memory;
        let move_times = |block: Option<&str>| -> Vec<usize> {
            m.moves()
                .iter()
                .filter(|mv| block.is_none_or(|b| b == mv.block))
                .map(|mv| mv.at)
                .collect()
        };
        if object.is_atom("elided.pro") {
            return Ok(move_times(outer.subject.name()));
        }
        if let Some(n) = object.as_atom().and_then(|a| a.name_text()) {
            if let Some(k) = n.strip_prefix("Now").and_then(|k| k.parse::<usize>().ok()) {
                return Ok(m.token(k).map(|t| vec![t.index]).unwrap_or_default());
            }
        }
        if let Some([d, n]) = object.as_list() {
            if d.is_atom("the.d") {
                if n.is_atom("beginning.n") || n.is_atom("start.n") {
                    return Ok(vec![0]);
                }
                if n.is_atom("move.n") {
                    return Ok(move_times(None));
                }
            }
        }
        if let Some(Term::Name(n)) = frame::term(object) {
            if !m.current_scene().contains(&n) {
                return Err(HqaError::UnknownBlock(n));
            }
            return Ok(move_times(Some(&n)));
        }
        let sub = clause_frame(object)?;
        self.check_names(&sub)?;
        Ok(self.evaluate(&sub, false)?.times)
    }

    /// Runs the candidate/filter/fact pipeline for one frame.
    pub fn evaluate(&self, frame: &QueryFrame, use_default: bool) -> Result<AnswerSet, HqaError> {
        let latest = self.memory.latest().index;
        let mut candidates: Vec<usize> = match frame.tense {
            Tense::Past => (0..=latest).rev().collect(),
            Tense::Pres => vec![latest],
        };
        let constraints: Vec<TemporalConstraint> =
            frame.modifiers.iter().map(compile_constraint).collect::<Result<_, _>>()?;
        let ever = constraints.iter().any(TemporalConstraint::is_ever);
        // "right before X" means the nearest time that carries a fact, so the
        // narrowing waits until empty tokens are gone.
        let mut nearest = Vec::new();
        for c in &constraints {
            if let ConstraintKind::Binary { rel, object } = &c.kind {
                let objects = self.resolve_event_times(object, frame)?;
                let mod_a = match c.mod_a {
                    Some(ModA::Just | ModA::Right) => {
                        nearest.push(*rel);
                        ever.then_some(ModA::Ever)
                    }
                    m => m.or(ever.then_some(ModA::Ever)),
                };
                candidates = filter_binary(&candidates, *rel, &objects, mod_a)
                    .ok_or_else(|| HqaError::EmptyObjectEvent(object.clone()))?;
            }
        }
        let mut facts = BTreeMap::new();
        for &t in &candidates {
            facts.insert(t, self.facts_for(frame, t)?);
        }
        for c in &constraints {
            if let ConstraintKind::Frequency(f) = c.kind {
                facts = apply_frequency(&candidates, &facts, f);
            }
        }
        let mut times: Vec<usize> = candidates
            .iter()
            .copied()
            .filter(|t| facts.get(t).is_some_and(|v| !v.is_empty()))
            .collect();
        for rel in nearest {
            let pick = match rel {
                BinaryRel::After | BinaryRel::Since => times.iter().min(),
                _ => times.iter().max(),
            };
            times = pick.into_iter().copied().collect();
        }
        for c in &constraints {
            if let ConstraintKind::Unary(p) = c.kind {
                times = filter_unary(&times, p, c.mod_a, self.memory.times(), self.now);
            }
        }
        if use_default {
            if let Some(d) = infer_default_constraint(frame, &constraints) {
                if let ConstraintKind::Unary(p) = d.kind {
                    times = filter_unary(&times, p, d.mod_a, self.memory.times(), self.now);
                }
            }
        }
        times.sort_unstable_by(|a, b| b.cmp(a));
        facts.retain(|t, _| times.contains(t));
        Ok(AnswerSet {
            presupposition_failed: times.is_empty(),
            times,
            facts,
        })
    }

    /// Blocks bound to the wh-term across the retained facts, in world order.
    fn bindings(&self, frame: &QueryFrame, set: &AnswerSet) -> Vec<String> {
        let subject_wh = frame.wh().is_none_or(|(_, subj)| subj);
        let mut found: Vec<&str> = Vec::new();
        for fs in set.facts.values() {
            for f in fs {
                match f {
                    SalientFact::Moved { block } => found.push(block),
                    SalientFact::Holds(sf) if subject_wh => found.push(&sf.subject),
                    SalientFact::Holds(sf) => found.extend(sf.objects.iter().map(String::as_str)),
                    SalientFact::Located { .. } => {}
                }
            }
        }
        self.blocks().into_iter().filter(|b| found.contains(&b.as_str())).collect()
    }

    fn described(&self, clause: &Ulf, ordinal: UnaryPred) -> Result<Vec<String>, HqaError> {
        let sub = clause_frame(clause)?;
        let mut set = self.evaluate(&sub, false)?;
        let keep = filter_unary(&set.times, ordinal, None, self.memory.times(), self.now);
        set.facts.retain(|t, _| keep.contains(t));
        set.times = keep;
        Ok(self.bindings(&sub, &set))
    }

    /// Answers an anaphora-resolved question.
    pub fn answer(&self, query: &Ulf) -> Result<HqaResult, HqaError> {
        if frame::sentence_of(query).is_atom("hello.gr") {
            return Ok(HqaResult {
                frame: None,
                set: AnswerSet::default(),
                plan: AnswerPlan::Greeting,
            });
        }
        let frame = extract_query_frame(query)?;
        self.check_names(&frame)?;
        if let (Predicate::Identity, Some(Term::Described { ordinal, clause })) = (&frame.predicate, frame.objects.first()) {
            let bindings = self.described(clause, *ordinal)?;
            let plan = if bindings.is_empty() {
                AnswerPlan::Negated
            } else {
                AnswerPlan::Ident { bindings }
            };
            return Ok(HqaResult {
                frame: Some(frame),
                set: AnswerSet::default(),
                plan,
            });
        }
        let set = match self.evaluate(&frame, true) {
            Ok(s) => s,
            Err(HqaError::EmptyObjectEvent(_)) => AnswerSet {
                presupposition_failed: true,
                ..AnswerSet::default()
            },
            Err(e) => return Err(e),
        };
        let plan = self.plan(&frame, &set)?;
        Ok(HqaResult {
            frame: Some(frame),
            set,
            plan,
        })
    }

    fn plan(&self, frame: &QueryFrame, set: &AnswerSet) -> Result<AnswerPlan, HqaError> {
        let neg = frame.polarity == Polarity::Neg;
        Ok(match frame.category {
            Category::YesNo => {
                if set.times.is_empty() == neg {
                    AnswerPlan::Yes
                } else {
                    AnswerPlan::No
                }
            }
            Category::HowMany => {
                let n = if frame.count_events {
                    set.times.len()
                } else {
                    self.bindings(frame, set).len()
                };
                AnswerPlan::Count { n }
            }
            Category::When => match set.times.first() {
                Some(&t) => AnswerPlan::When {
                    elapsed: self.memory.elapsed(t, self.now)?,
                },
                None => AnswerPlan::Negated,
            },
            Category::Where => {
                let latest = set.times.first().and_then(|t| set.facts.get(t)).and_then(|v| v.first());
                match latest {
                    Some(SalientFact::Located { block, facts, region }) => AnswerPlan::Where {
                        block: block.clone(),
                        facts: facts.clone(),
                        region: *region,
                    },
                    _ if frame.subject.name().is_some() && matches!(frame.predicate, Predicate::Move { .. }) => {
                        AnswerPlan::Negated
                    }
                    _ => AnswerPlan::DontKnow,
                }
            }
            Category::IdentWhich | Category::OrderCompare => {
                let bindings = self.bindings(frame, set);
                if bindings.is_empty() {
                    if frame.wh().is_some() {
                        AnswerPlan::Negated
                    } else {
                        AnswerPlan::DontKnow
                    }
                } else {
                    AnswerPlan::Ident { bindings }
                }
            }
        })
    }
}
