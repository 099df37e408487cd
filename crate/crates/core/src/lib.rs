//! Blocks-world historical question answering: ULF, transduction-tree
//! parsing, episodic memory with scene reconstruction, temporal
//! constraints and answer generation.

pub mod discourse;
pub mod hqa;
pub mod memory;
pub mod session;
pub mod surface;
pub mod transduction;
pub mod ulf;
pub mod world;

pub use memory::{EpisodicMemory, MoveFact, MoveOutcome, TimeToken};
pub use transduction::{parse_question, tidy_input, FeatureLexicon, ParseFailure, Transducer, TreeSet};
pub use ulf::{classify_atom, parse_sexpr, print_sexpr, well_formed, AtomKind, ReadError, Ulf, UlfAtom};
pub use world::{eval_relation, Point3, Relation, Scene, SpatialFact, World, WorldError};
pub use discourse::{DiscourseContext, DiscourseError, Role};
pub use hqa::{AnswerPlan, AnswerSet, HqaError, HqaResult, Kb, QueryFrame, SalientFact};
pub use session::{replay, ErrorCode, EventKind, Reply, ReplayError, ReplayReport, Session, SessionError, SessionEvent};
pub use surface::{realize, substitute_and_uninvert, SurfaceError};
