//! Symbolic episodic memory: time tokens, move facts and utterances.
//!
//! Only moves are stored; any past scene is rebuilt by undoing moves from the
//! current scene, newest first.

use std::cmp::Ordering;
use std::fmt;

use thiserror::Error;

use crate::ulf::{print_sexpr, Ulf};
use crate::world::{relations_holding, Point3, Relation, Scene, SpatialFact, WorldError};

pub const DEFAULT_NOISE_THRESHOLD: f64 = 0.02;

/// Seconds on the session clock.
pub type Clock = f64;

#[derive(Debug, Error)]
pub enum MemoryError {
    #[error("unknown time |Now{0}|")]
    UnknownTime(usize),
    #[error("clock went backwards: {then} after {now}")]
    ClockRegression { now: Clock, then: Clock },
    #[error(transparent)]
    World(#[from] WorldError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Init,
    InProgress,
    Finished,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeToken {
    pub index: usize,
    pub clock: Clock,
}

impl TimeToken {
    pub fn phase(&self) -> Phase {
        match self.index {
            0 => Phase::Init,
            i if i % 2 == 1 => Phase::InProgress,
            _ => Phase::Finished,
        }
    }

    pub fn name(&self) -> String {
        format!("Now{}", self.index)
    }

    pub fn to_ulf(&self) -> Ulf {
        Ulf::name(&self.name())
    }
}

impl fmt::Display for TimeToken {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|Now{}|", self.index)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MoveFact {
    pub block: String,
    pub from: Point3,
    pub to: Point3,
    /// Index of the in-progress (odd) token.
    pub at: usize,
}

impl MoveFact {
    /// `((|B| ((past move.v) (from.p-arg ($ loc ..)) (to.p-arg ($ loc ..)))) * |NowK|)`
    pub fn to_ulf(&self) -> Ulf {
        let prop = Ulf::list([
            Ulf::name(&self.block),
            Ulf::list([
                Ulf::list([Ulf::atom("past"), Ulf::atom("move.v")]),
                Ulf::list([Ulf::atom("from.p-arg"), Ulf::loc(self.from.to_array())]),
                Ulf::list([Ulf::atom("to.p-arg"), Ulf::loc(self.to.to_array())]),
            ]),
        ]);
        Ulf::list([prop, Ulf::atom("*"), Ulf::name(&format!("Now{}", self.at))])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Speaker {
    User,
    System,
}

#[derive(Debug, Clone, PartialEq)]
pub enum UtteranceContent {
    Ulf(Ulf),
    Text(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Utterance {
    pub speaker: Speaker,
    pub content: UtteranceContent,
    pub at: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum MoveOutcome {
    Recorded { in_progress: usize, finished: usize },
    Noise { displacement: f64 },
}

/// A fact attached to a time token.
#[derive(Debug, Clone, PartialEq)]
pub enum Fact {
    Move(MoveFact),
    Spatial(SpatialFact),
}

/// Restricts `facts_at` to one block and/or relation.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Focus {
    pub block: Option<String>,
    pub relation: Option<Relation>,
}

#[derive(Debug, Clone)]
pub struct EpisodicMemory {
    times: Vec<TimeToken>,
    moves: Vec<MoveFact>,
    utterances: Vec<Utterance>,
    current: Scene,
    noise_threshold: f64,
}

impl EpisodicMemory {
    pub fn new(initial: Scene, clock: Clock) -> Self {
        EpisodicMemory {
            times: vec![TimeToken { index: 0, clock }],
            moves: Vec::new(),
            utterances: Vec::new(),
            current: initial,
            noise_threshold: DEFAULT_NOISE_THRESHOLD,
        }
    }

    pub fn with_noise_threshold(mut self, meters: f64) -> Self {
        self.noise_threshold = meters;
        self
    }

    pub fn times(&self) -> &[TimeToken] {
        &self.times
    }

    pub fn moves(&self) -> &[MoveFact] {
        &self.moves
    }

    pub fn utterances(&self) -> &[Utterance] {
        &self.utterances
    }

    pub fn current_scene(&self) -> &Scene {
        &self.current
    }

    pub fn latest(&self) -> TimeToken {
        *self.times.last().expect("memory always holds |Now0|")
    }

    pub fn token(&self, index: usize) -> Result<TimeToken, MemoryError> {
        self.times.get(index).copied().ok_or(MemoryError::UnknownTime(index))
    }

    /// Records a perceived move, creating the in-progress and finished tokens.
    pub fn record_move(
        &mut self,
        block: &str,
        from: Point3,
        to: Point3,
        clock: Clock,
    ) -> Result<MoveOutcome, MemoryError> {
        self.current.position(block)?;
        let displacement = from.distance(&to);
        if displacement < self.noise_threshold {
            return Ok(MoveOutcome::Noise { displacement });
        }
        let last = self.latest().clock;
        if clock < last {
            return Err(MemoryError::ClockRegression { now: last, then: clock });
        }
        let next = self.current.apply_move(block, to)?;
        let in_progress = self.times.len();
        self.times.push(TimeToken { index: in_progress, clock });
        self.times.push(TimeToken { index: in_progress + 1, clock });
        self.moves.push(MoveFact {
            block: block.into(),
            from,
            to,
            at: in_progress,
        });
        self.current = next;
        Ok(MoveOutcome::Recorded {
            in_progress,
            finished: in_progress + 1,
        })
    }

    /// Utterances attach to the latest existing token.
    pub fn record_utterance(&mut self, speaker: Speaker, content: UtteranceContent) {
        let at = self.latest().index;
        self.utterances.push(Utterance { speaker, content, at });
    }

    /// The scene as it was at token `t`. At an in-progress token the moving
    /// block is still at its source location.
    pub fn reconstruct_scene(&self, t: usize) -> Result<Scene, MemoryError> {
        self.token(t)?;
        let mut scene = self.current.clone();
        for m in self.moves.iter().rev() {
            if m.at < t {
                break;
            }
            scene = scene.invert_move(&m.block, m.from)?;
        }
        Ok(scene)
    }

    /// Every past scene at once, indexed by the number of moves applied.
    /// Token `t` sees entry `t / 2`.
    pub fn scene_history(&self) -> Result<Vec<Scene>, MemoryError> {
        let mut scenes = vec![self.current.clone()];
        for m in self.moves.iter().rev() {
            let prev = scenes.last().expect("non-empty").invert_move(&m.block, m.from)?;
            scenes.push(prev);
        }
        scenes.reverse();
        Ok(scenes)
    }

    pub fn move_at(&self, t: usize) -> Option<&MoveFact> {
        if t % 2 == 1 {
            self.moves.get(t / 2)
        } else {
            None
        }
    }

    /// Move facts at `t` plus spatial relations in the reconstructed scene.
    pub fn facts_at(&self, t: usize, focus: &Focus) -> Result<Vec<Fact>, MemoryError> {
        let scene = self.reconstruct_scene(t)?;
        let mut out = Vec::new();
        if let Some(m) = self.move_at(t) {
            if focus.block.as_deref().is_none_or(|b| b == m.block) {
                out.push(Fact::Move(m.clone()));
            }
        }
        let subjects: Vec<String> = match &focus.block {
            Some(b) => vec![b.clone()],
            None => scene.names().map(String::from).collect(),
        };
        for s in subjects {
            for f in relations_holding(&scene, &s)? {
                if focus.relation.is_none_or(|r| r == f.relation) {
                    out.push(Fact::Spatial(f));
                }
            }
        }
        Ok(out)
    }

    /// Wall-clock seconds between token `t` and `now`.
    pub fn elapsed(&self, t: usize, now: Clock) -> Result<Clock, MemoryError> {
        Ok((now - self.token(t)?.clock).max(0.0))
    }

    pub fn ordering(&self, a: usize, b: usize) -> Result<Ordering, MemoryError> {
        self.token(a)?;
        self.token(b)?;
        Ok(a.cmp(&b))
    }

    /// `(|Now_a| before.p |Now_b|)`-style proposition derived from indices.
    pub fn ordering_fact(&self, a: usize, b: usize) -> Result<Option<Ulf>, MemoryError> {
        let prep = match self.ordering(a, b)? {
            Ordering::Less => "before.p",
            Ordering::Greater => "after.p",
            Ordering::Equal => return Ok(None),
        };
        Ok(Some(Ulf::list([
            Ulf::name(&format!("Now{a}")),
            Ulf::atom(prep),
            Ulf::name(&format!("Now{b}")),
        ])))
    }

    /// One S-expression per line: initial locations, orderings, moves, utterances.
    pub fn dump(&self) -> Result<String, MemoryError> {
        let mut lines = Vec::new();
        let initial = self.reconstruct_scene(0)?;
        for (name, p) in initial.positions() {
            let prop = Ulf::list([Ulf::name(name), Ulf::atom("at-loc.p"), Ulf::loc(p.to_array())]);
            lines.push(Ulf::list([prop, Ulf::atom("*"), Ulf::name("Now0")]));
        }
        for w in self.times.windows(2) {
            if let Some(f) = self.ordering_fact(w[0].index, w[1].index)? {
                lines.push(f);
            }
        }
        lines.extend(self.moves.iter().map(MoveFact::to_ulf));
        for u in &self.utterances {
            let who = match u.speaker {
                Speaker::User => "User",
                Speaker::System => "David",
            };
            let what = match &u.content {
                UtteranceContent::Ulf(ulf) => ulf.clone(),
                UtteranceContent::Text(t) => Ulf::name(&t.replace('|', "")),
            };
            let prop = Ulf::list([
                Ulf::name(who),
                Ulf::list([Ulf::list([Ulf::atom("past"), Ulf::atom("say.v")]), what]),
            ]);
            lines.push(Ulf::list([prop, Ulf::atom("*"), Ulf::name(&format!("Now{}", u.at))]));
        }
        Ok(lines.iter().map(print_sexpr).collect::<Vec<_>>().join("\n"))
    }
}
