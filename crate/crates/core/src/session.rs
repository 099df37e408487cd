//! Dialogue sessions: moves and questions in, answers and a JSONL transcript out.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::discourse::{DiscourseContext, DiscourseError};
use crate::hqa::{AnswerPlan, HqaError, Kb};
use crate::memory::{Clock, EpisodicMemory, MemoryError, MoveOutcome, Speaker, UtteranceContent};
use crate::surface::{realize, substitute_and_uninvert, SurfaceError};
use crate::transduction::{bundled, parse_question, ParseFailure, Transducer, TOP_TREE};
use crate::ulf::print_sexpr;
use crate::world::{Point3, Scene, World, WorldError, WorldFile};

pub const CLARIFY: &str = "Sorry, I didn't understand that. Could you rephrase the question?";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EventKind {
    Init { world: WorldFile },
    Move { block: String, to: [f64; 3] },
    Ask { text: String },
    Answer { text: String, ulf: String },
    Noise { block: String, to: [f64; 3], displacement: f64 },
    /// `block` and `to` are set when a move was rejected.
    Error {
        code: ErrorCode,
        message: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        block: Option<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        to: Option<[f64; 3]>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionEvent {
    pub seq: u64,
    pub clock: Clock,
    #[serde(flatten)]
    pub kind: EventKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ErrorCode {
    ParseFailure,
    UnresolvedReference,
    UnsupportedQuestion,
    UnknownBlock,
    OutOfBounds,
    Interpenetration,
    ClockRegression,
    RealizationGap,
    Internal,
}

#[derive(Debug, Error)]
pub enum SessionError {
    #[error("{code:?}: {message}")]
    Rejected { code: ErrorCode, message: String },
}

impl SessionError {
    pub fn code(&self) -> ErrorCode {
        match self {
            SessionError::Rejected { code, .. } => *code,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClockMode {
    Real,
    Simulated,
}

/// One system turn.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Reply {
    pub text: String,
    pub ulf: Option<String>,
    pub error: Option<ErrorCode>,
}

#[derive(Debug, Clone)]
pub struct Session {
    world: World,
    memory: EpisodicMemory,
    discourse: DiscourseContext,
    transcript: Vec<SessionEvent>,
    transducer: Transducer,
    clock_mode: ClockMode,
}

fn world_code(e: &WorldError) -> ErrorCode {
    match e {
        WorldError::UnknownBlock(_) => ErrorCode::UnknownBlock,
        WorldError::OutOfBounds { .. } => ErrorCode::OutOfBounds,
        WorldError::Interpenetration { .. } => ErrorCode::Interpenetration,
        _ => ErrorCode::Internal,
    }
}

fn memory_code(e: &MemoryError) -> ErrorCode {
    match e {
        MemoryError::World(w) => world_code(w),
        MemoryError::ClockRegression { .. } => ErrorCode::ClockRegression,
        MemoryError::UnknownTime(_) => ErrorCode::Internal,
    }
}

impl Session {
    /// A session over the bundled trees, starting at clock 0.
    pub fn new(world: World) -> Self {
        Session::with_transducer(world, bundled(), 0.0)
    }

    pub fn with_transducer(world: World, mut transducer: Transducer, clock: Clock) -> Self {
        for b in world.block_names() {
            transducer.lexicon_mut().add_block_name(b);
        }
        let init = SessionEvent {
            seq: 0,
            clock,
            kind: EventKind::Init { world: world.to_file() },
        };
        Session {
            memory: EpisodicMemory::new(world.scene.clone(), clock),
            world,
            discourse: DiscourseContext::new(),
            transcript: vec![init],
            transducer,
            clock_mode: ClockMode::Simulated,
        }
    }

    pub fn with_clock_mode(mut self, mode: ClockMode) -> Self {
        self.clock_mode = mode;
        self
    }

    pub fn clock_mode(&self) -> ClockMode {
        self.clock_mode
    }

    pub fn world(&self) -> &World {
        &self.world
    }

    pub fn memory(&self) -> &EpisodicMemory {
        &self.memory
    }

    pub fn discourse(&self) -> &DiscourseContext {
        &self.discourse
    }

    pub fn transcript(&self) -> &[SessionEvent] {
        &self.transcript
    }

    pub fn last_clock(&self) -> Clock {
        self.transcript.last().map_or(0.0, |e| e.clock)
    }

    pub fn scene_at(&self, token: Option<usize>) -> Result<Scene, SessionError> {
        match token {
            None => Ok(self.memory.current_scene().clone()),
            Some(t) => self.memory.reconstruct_scene(t).map_err(|e| SessionError::Rejected {
                code: memory_code(&e),
                message: e.to_string(),
            }),
        }
    }

    fn push(&mut self, clock: Clock, kind: EventKind) {
        let seq = self.transcript.len() as u64;
        self.transcript.push(SessionEvent { seq, clock, kind });
    }

    fn reject(&mut self, clock: Clock, code: ErrorCode, message: String, attempt: (&str, Point3)) -> SessionError {
        let clock = if clock.is_finite() { clock.max(self.last_clock()) } else { self.last_clock() };
        self.push(
            clock,
            EventKind::Error {
                code,
                message: message.clone(),
                block: Some(attempt.0.to_string()),
                to: Some(attempt.1.to_array()).filter(|p| p.iter().all(|v| v.is_finite())),
            },
        );
        SessionError::Rejected { code, message }
    }

    /// Records a perceived move. Failures leave the state unchanged apart
    /// from an error event.
    pub fn handle_move(&mut self, block: &str, to: Point3, clock: Clock) -> Result<MoveOutcome, SessionError> {
        if clock < self.last_clock() || !clock.is_finite() {
            let msg = format!("clock {clock} is before {}", self.last_clock());
            return Err(self.reject(clock, ErrorCode::ClockRegression, msg, (block, to)));
        }
        let from = match self.memory.current_scene().position(block) {
            Ok(p) => p,
            Err(e) => return Err(self.reject(clock, world_code(&e), e.to_string(), (block, to))),
        };
        match self.memory.record_move(block, from, to, clock) {
            Ok(MoveOutcome::Noise { displacement }) => {
                self.push(
                    clock,
                    EventKind::Noise {
                        block: block.into(),
                        to: to.to_array(),
                        displacement,
                    },
                );
                Ok(MoveOutcome::Noise { displacement })
            }
            Ok(out) => {
                self.push(clock, EventKind::Move { block: block.into(), to: to.to_array() });
                Ok(out)
            }
            Err(e) => Err(self.reject(clock, memory_code(&e), e.to_string(), (block, to))),
        }
    }

    /// Answers a question. Never fails: problems become clarification or
    /// diagnostic replies.
    pub fn handle_ask(&mut self, text: &str, clock: Clock) -> Reply {
        let clock = if clock.is_finite() { clock.max(self.last_clock()) } else { self.last_clock() };
        self.push(clock, EventKind::Ask { text: text.into() });
        let reply = match self.respond(text, clock) {
            Ok(r) => r,
            Err((code, message)) => {
                self.push(
                    clock,
                    EventKind::Error {
                        code,
                        message,
                        block: None,
                        to: None,
                    },
                );
                Reply {
                    text: clarification(code, text),
                    ulf: None,
                    error: Some(code),
                }
            }
        };
        self.push(
            clock,
            EventKind::Answer {
                text: reply.text.clone(),
                ulf: reply.ulf.clone().unwrap_or_default(),
            },
        );
        reply
    }

    fn respond(&mut self, text: &str, clock: Clock) -> Result<Reply, (ErrorCode, String)> {
        let parsed = parse_question(text, TOP_TREE, &self.transducer).map_err(|e| {
            let code = match e {
                ParseFailure::Engine(_) => ErrorCode::Internal,
                _ => ErrorCode::ParseFailure,
            };
            (code, e.to_string())
        })?;
        let resolved = self.discourse.resolve_anaphora(&parsed).map_err(|e| match e {
            DiscourseError::UnresolvedReference(_) => (ErrorCode::UnresolvedReference, e.to_string()),
        })?;
        let result = Kb::new(&self.memory, &self.world, clock).answer(&resolved).map_err(|e| {
            let code = match &e {
                HqaError::UnsupportedQuestionShape(_) | HqaError::UnknownModifier(_) => ErrorCode::UnsupportedQuestion,
                HqaError::UnknownBlock(_) => ErrorCode::UnknownBlock,
                HqaError::EmptyObjectEvent(_) => ErrorCode::Internal,
                HqaError::Memory(m) => memory_code(m),
            };
            (code, e.to_string())
        })?;
        let answer = substitute_and_uninvert(&resolved, result.frame.as_ref(), &result.plan)
            .and_then(|u| realize(&u).map(|t| (u, t)));
        let (ulf, text_out) = answer.map_err(|e| match e {
            SurfaceError::MissingBinding(_) | SurfaceError::RealizationGap(_) => (ErrorCode::RealizationGap, e.to_string()),
        })?;
        let bound: Vec<String> = match &result.plan {
            AnswerPlan::Ident { bindings } => bindings.clone(),
            _ => Vec::new(),
        };
        self.memory.record_utterance(Speaker::User, UtteranceContent::Ulf(resolved.clone()));
        self.memory.record_utterance(Speaker::System, UtteranceContent::Text(text_out.clone()));
        self.discourse.register_entities(&resolved, &bound);
        self.discourse.set_last_answer(ulf.clone());
        self.discourse.next_turn();
        Ok(Reply {
            text: text_out,
            ulf: Some(print_sexpr(&ulf)),
            error: None,
        })
    }

    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for e in &self.transcript {
            out.push_str(&serde_json::to_string(e).expect("events serialize"));
            out.push('\n');
        }
        out
    }

    pub fn save_transcript(&self, path: &std::path::Path) -> std::io::Result<()> {
        std::fs::write(path, self.to_jsonl())
    }
}

fn clarification(code: ErrorCode, text: &str) -> String {
    match code {
        ErrorCode::ParseFailure | ErrorCode::UnsupportedQuestion => CLARIFY.into(),
        ErrorCode::UnresolvedReference => "Sorry, which block do you mean?".into(),
        ErrorCode::UnknownBlock => "Sorry, I don't see that block on the table.".into(),
        ErrorCode::RealizationGap => "I don't know how to say that.".into(),
        _ => format!("Something went wrong answering {:?}.", text.trim()),
    }
}

#[derive(Debug, Error)]
pub enum ReplayError {
    #[error("transcript line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("transcript does not start with an init event")]
    MissingInit,
    #[error("world in transcript: {0}")]
    World(#[from] WorldError),
}

impl ReplayError {
    /// Process exit status for this failure.
    pub fn exit_code(&self) -> i32 {
        3
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AskCheck {
    pub seq: u64,
    pub question: String,
    pub expected: Option<String>,
    pub actual: String,
}

impl AskCheck {
    pub fn matches(&self) -> bool {
        self.expected.as_deref().is_none_or(|e| e == self.actual)
    }
}

#[derive(Debug, Clone)]
pub struct ReplayReport {
    pub checks: Vec<AskCheck>,
    pub session: Session,
}

impl ReplayReport {
    pub fn mismatches(&self) -> usize {
        self.checks.iter().filter(|c| !c.matches()).count()
    }

    pub fn exit_code(&self) -> i32 {
        if self.mismatches() == 0 {
            0
        } else {
            2
        }
    }
}

pub fn parse_transcript(text: &str) -> Result<Vec<SessionEvent>, ReplayError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|e| ReplayError::Syntax {
                line: i + 1,
                message: e.to_string(),
            })
        })
        .collect()
}

/// Re-executes a transcript under its recorded clock and compares every
/// regenerated answer with the recorded one.
pub fn replay(text: &str) -> Result<ReplayReport, ReplayError> {
    replay_with(text, bundled())
}

pub fn replay_with(text: &str, transducer: Transducer) -> Result<ReplayReport, ReplayError> {
    let events = parse_transcript(text)?;
    let Some(SessionEvent {
        clock,
        kind: EventKind::Init { world },
        ..
    }) = events.first()
    else {
        return Err(ReplayError::MissingInit);
    };
    let mut session = Session::with_transducer(World::from_file(world)?, transducer, *clock);
    let mut checks: Vec<AskCheck> = Vec::new();
    let mut pending: Option<usize> = None;
    for e in &events[1..] {
        match &e.kind {
            EventKind::Init { .. } => {
                return Err(ReplayError::Syntax {
                    line: e.seq as usize + 1,
                    message: "second init event".into(),
                })
            }
            EventKind::Error {
                code: ErrorCode::ClockRegression,
                ..
            } => {
                // the attempted clock is not kept, so copy the rejection through
                session.push(e.clock, e.kind.clone());
            }
            EventKind::Move { block, to }
            | EventKind::Noise { block, to, .. }
            | EventKind::Error {
                block: Some(block),
                to: Some(to),
                ..
            } => {
                // rejections are re-recorded by the session itself
                let _ = session.handle_move(block, Point3::from(*to), e.clock);
            }
            EventKind::Ask { text } => {
                let r = session.handle_ask(text, e.clock);
                checks.push(AskCheck {
                    seq: e.seq,
                    question: text.clone(),
                    expected: None,
                    actual: r.text,
                });
                pending = Some(checks.len() - 1);
            }
            EventKind::Answer { text, .. } => {
                if let Some(i) = pending.take() {
                    checks[i].expected = Some(text.clone());
                }
            }
            EventKind::Error { block: Some(_), .. } => session.push(e.clock, e.kind.clone()),
            EventKind::Error { .. } => {}
        }
    }
    Ok(ReplayReport { checks, session })
}
