//! Command-line and network front ends for the blocks-world dialogue engine.

pub mod repl;
pub mod server;

use std::path::Path;

use anyhow::Context;
use bwqa_core::transduction::{bundled, load_dir};
use bwqa_core::{Transducer, World};

pub fn load_world(path: &Path) -> anyhow::Result<World> {
    World::load(path).with_context(|| format!("loading world {}", path.display()))
}

/// Trees from `dir`, or the bundled set.
pub fn load_transducer(dir: Option<&Path>) -> anyhow::Result<Transducer> {
    match dir {
        Some(d) => load_dir(d).with_context(|| format!("loading trees from {}", d.display())),
        None => Ok(bundled()),
    }
}
