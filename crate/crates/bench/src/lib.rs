//! Workloads shared by the benchmarks in `benches/`.

use bwqa_core::{Point3, Session, World};

pub const LOGO_ROW: &str = include_str!("../../core/data/worlds/logo-row.json");

pub fn logo_row() -> World {
    World::from_json(LOGO_ROW).expect("bundled world parses")
}

/// A session with `n` recorded moves, shuffling blocks between two rows.
pub fn session_with_moves(n: usize) -> Session {
    let world = logo_row();
    let names: Vec<String> = world.block_names().map(String::from).collect();
    let mut s = Session::new(world);
    let mut back_row = vec![false; names.len()];
    let mut recorded = 0;
    let mut i = 0;
    while recorded < n {
        let k = i % names.len();
        let x = -0.56 + 0.16 * k as f64;
        let y = if back_row[k] { -0.6 } else { 0.3 };
        if s.handle_move(&names[k], Point3::new(x, y, 0.075), i as f64).is_ok() {
            back_row[k] = !back_row[k];
            recorded += 1;
        }
        i += 1;
    }
    s
}
