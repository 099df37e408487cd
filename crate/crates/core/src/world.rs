//! Simulated table of blocks and centroid-threshold spatial relations.
//!
//! Frame: x grows to the viewer's right, y grows away from the viewer, z is up.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const DEFAULT_SIDE: f64 = 0.15;
pub const DEFAULT_TABLE: [f64; 2] = [1.5, 1.5];

#[derive(Debug, Error)]
pub enum WorldError {
    #[error("unknown block {0}")]
    UnknownBlock(String),
    #[error("position for {block} out of bounds: {pos}")]
    OutOfBounds { block: String, pos: Point3 },
    #[error("{block} would interpenetrate {other}")]
    Interpenetration { block: String, other: String },
    #[error("duplicate block name {0}")]
    DuplicateBlock(String),
    #[error("invalid world: {0}")]
    Invalid(String),
    #[error("world file: {0}")]
    Io(#[from] std::io::Error),
    #[error("world file: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 3]", into = "[f64; 3]")]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point3 {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Point3 { x, y, z }
    }

    pub fn distance(&self, o: &Point3) -> f64 {
        ((self.x - o.x).powi(2) + (self.y - o.y).powi(2) + (self.z - o.z).powi(2)).sqrt()
    }

    pub fn horizontal_distance(&self, o: &Point3) -> f64 {
        ((self.x - o.x).powi(2) + (self.y - o.y).powi(2)).sqrt()
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }
}

impl From<[f64; 3]> for Point3 {
    fn from(a: [f64; 3]) -> Self {
        Point3::new(a[0], a[1], a[2])
    }
}

impl From<Point3> for [f64; 3] {
    fn from(p: Point3) -> Self {
        p.to_array()
    }
}

impl fmt::Display for Point3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.x, self.y, self.z)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Color {
    Red,
    Green,
    Blue,
}

impl Color {
    pub fn as_str(self) -> &'static str {
        match self {
            Color::Red => "red",
            Color::Green => "green",
            Color::Blue => "blue",
        }
    }

    pub fn from_word(w: &str) -> Option<Color> {
        match w.to_ascii_lowercase().as_str() {
            "red" => Some(Color::Red),
            "green" => Some(Color::Green),
            "blue" => Some(Color::Blue),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Block {
    pub name: String,
    pub color: Color,
}

/// Positions of every block at one time.
#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    positions: BTreeMap<String, Point3>,
    side: f64,
    half_extents: [f64; 2],
}

impl Scene {
    pub fn new(side: f64, table: [f64; 2]) -> Self {
        Scene {
            positions: BTreeMap::new(),
            side,
            half_extents: [table[0] / 2.0, table[1] / 2.0],
        }
    }

    pub fn with_block(mut self, name: &str, at: Point3) -> Result<Self, WorldError> {
        if self.positions.contains_key(name) {
            return Err(WorldError::DuplicateBlock(name.into()));
        }
        self.check_bounds(name, &at)?;
        self.check_clearance(name, &at)?;
        self.positions.insert(name.to_string(), at);
        Ok(self)
    }

    pub fn side(&self) -> f64 {
        self.side
    }

    pub fn half_extents(&self) -> [f64; 2] {
        self.half_extents
    }

    pub fn position(&self, name: &str) -> Result<Point3, WorldError> {
        self.positions
            .get(name)
            .copied()
            .ok_or_else(|| WorldError::UnknownBlock(name.into()))
    }

    pub fn contains(&self, name: &str) -> bool {
        self.positions.contains_key(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.positions.keys().map(String::as_str)
    }

    pub fn positions(&self) -> &BTreeMap<String, Point3> {
        &self.positions
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// Places `block` at `to`, enforcing the table and interpenetration invariants.
    pub fn apply_move(&self, block: &str, to: Point3) -> Result<Scene, WorldError> {
        self.position(block)?;
        self.check_bounds(block, &to)?;
        self.check_clearance(block, &to)?;
        let mut next = self.clone();
        next.positions.insert(block.to_string(), to);
        Ok(next)
    }

    /// Returns `block` to the location it was moved from.
    pub fn invert_move(&self, block: &str, from: Point3) -> Result<Scene, WorldError> {
        self.apply_move(block, from)
    }

    fn check_bounds(&self, block: &str, p: &Point3) -> Result<(), WorldError> {
        let ok = p.x.is_finite()
            && p.y.is_finite()
            && p.z.is_finite()
            && p.z >= self.side / 2.0 - 1e-9
            && p.x.abs() <= self.half_extents[0] + self.side
            && p.y.abs() <= self.half_extents[1] + self.side;
        if ok {
            Ok(())
        } else {
            Err(WorldError::OutOfBounds {
                block: block.into(),
                pos: *p,
            })
        }
    }

    fn check_clearance(&self, block: &str, p: &Point3) -> Result<(), WorldError> {
        let min = 0.8 * self.side;
        for (other, q) in &self.positions {
            if other != block && p.distance(q) < min {
                return Err(WorldError::Interpenetration {
                    block: block.into(),
                    other: other.clone(),
                });
            }
        }
        Ok(())
    }

    /// Verifies every scene invariant; used by tests and world loading.
    pub fn check_invariants(&self) -> Result<(), WorldError> {
        for (name, p) in &self.positions {
            self.check_bounds(name, p)?;
            self.check_clearance(name, p)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Relation {
    On,
    Above,
    Below,
    Touching,
    Near,
    Between,
    Behind,
    InFrontOf,
    LeftOf,
    RightOf,
}

impl Relation {
    pub const ALL: [Relation; 10] = [
        Relation::On,
        Relation::Above,
        Relation::Below,
        Relation::Touching,
        Relation::Near,
        Relation::Between,
        Relation::Behind,
        Relation::InFrontOf,
        Relation::LeftOf,
        Relation::RightOf,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Relation::On => "on",
            Relation::Above => "above",
            Relation::Below => "below",
            Relation::Touching => "touching",
            Relation::Near => "near",
            Relation::Between => "between",
            Relation::Behind => "behind",
            Relation::InFrontOf => "in-front-of",
            Relation::LeftOf => "left-of",
            Relation::RightOf => "right-of",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Relation> {
        Relation::ALL.into_iter().find(|r| r.tag() == tag)
    }

    pub fn arity(self) -> usize {
        if self == Relation::Between {
            2
        } else {
            1
        }
    }

    /// Description salience: lower is more salient.
    pub fn salience_rank(self) -> u8 {
        match self {
            Relation::On => 0,
            Relation::Between => 1,
            Relation::Touching => 2,
            Relation::Near => 3,
            Relation::Behind | Relation::InFrontOf | Relation::LeftOf | Relation::RightOf => 4,
            Relation::Above | Relation::Below => 5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SpatialFact {
    pub subject: String,
    pub relation: Relation,
    pub objects: Vec<String>,
}

impl SpatialFact {
    pub fn new(subject: &str, relation: Relation, objects: &[&str]) -> Self {
        SpatialFact {
            subject: subject.into(),
            relation,
            objects: objects.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn validate(&self) -> Result<(), WorldError> {
        if self.objects.len() != self.relation.arity() {
            return Err(WorldError::Invalid(format!(
                "{} takes {} object(s)",
                self.relation.tag(),
                self.relation.arity()
            )));
        }
        if self.objects.contains(&self.subject) {
            return Err(WorldError::Invalid("subject listed among objects".into()));
        }
        Ok(())
    }
}

impl fmt::Display for SpatialFact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({}", self.relation.tag(), self.subject)?;
        for o in &self.objects {
            write!(f, ", {o}")?;
        }
        f.write_str(")")
    }
}

/// Truth of a relation under the centroid threshold models.
pub fn eval_relation(scene: &Scene, fact: &SpatialFact) -> Result<bool, WorldError> {
    fact.validate()?;
    let s = scene.side();
    let a = scene.position(&fact.subject)?;
    let b = scene.position(&fact.objects[0])?;
    let dx = a.x - b.x;
    let dy = a.y - b.y;
    let dz = a.z - b.z;
    let horiz = a.horizontal_distance(&b);
    let touching = a.distance(&b) <= 1.1 * s;
    Ok(match fact.relation {
        Relation::Touching => touching,
        Relation::On => (0.8 * s..=1.2 * s).contains(&dz) && horiz < 0.5 * s,
        Relation::Above => dz > 0.8 * s && horiz < s,
        Relation::Below => -dz > 0.8 * s && horiz < s,
        Relation::Near => horiz <= 2.0 * s && !touching,
        Relation::Behind => dy.abs() > dx.abs() && dy > 0.5 * s,
        Relation::InFrontOf => dy.abs() > dx.abs() && -dy > 0.5 * s,
        Relation::RightOf => dx.abs() >= dy.abs() && dx > 0.5 * s,
        Relation::LeftOf => dx.abs() >= dy.abs() && -dx > 0.5 * s,
        Relation::Between => {
            let c = scene.position(&fact.objects[1])?;
            between(&a, &b, &c, s)
        }
    })
}

fn between(p: &Point3, a: &Point3, c: &Point3, side: f64) -> bool {
    let ac = [c.x - a.x, c.y - a.y, c.z - a.z];
    let ap = [p.x - a.x, p.y - a.y, p.z - a.z];
    let len2 = ac.iter().map(|v| v * v).sum::<f64>();
    if len2 == 0.0 {
        return false;
    }
    let t = ac.iter().zip(&ap).map(|(u, v)| u * v).sum::<f64>() / len2;
    if t <= 0.0 || t >= 1.0 {
        return false;
    }
    let dev2 = (0..3).map(|i| (ap[i] - t * ac[i]).powi(2)).sum::<f64>();
    dev2.sqrt() < 0.5 * side
}

/// Viewer-order comparison for objects (left to right, then front to back).
fn spatial_order(scene: &Scene, a: &str, b: &str) -> std::cmp::Ordering {
    let (pa, pb) = (scene.positions[a], scene.positions[b]);
    pa.x.total_cmp(&pb.x)
        .then(pa.y.total_cmp(&pb.y))
        .then_with(|| a.cmp(b))
}

/// Every relation that holds for `subject` against the other blocks.
/// `between` objects are listed in viewer order, each pair once.
pub fn relations_holding(scene: &Scene, subject: &str) -> Result<Vec<SpatialFact>, WorldError> {
    scene.position(subject)?;
    let others: Vec<&str> = scene.names().filter(|n| *n != subject).collect();
    let mut out = Vec::new();
    for rel in Relation::ALL {
        if rel == Relation::Between {
            for (i, a) in others.iter().enumerate() {
                for c in &others[i + 1..] {
                    let mut pair = [*a, *c];
                    pair.sort_by(|x, y| spatial_order(scene, x, y));
                    let f = SpatialFact::new(subject, rel, &pair);
                    if eval_relation(scene, &f)? {
                        out.push(f);
                    }
                }
            }
        } else {
            for o in &others {
                let f = SpatialFact::new(subject, rel, &[o]);
                if eval_relation(scene, &f)? {
                    out.push(f);
                }
            }
        }
    }
    out.dedup();
    Ok(out)
}

/// The most salient relation class for `subject`, at most two facts.
///
/// Among `between` facts only the tightest pair is kept.
pub fn describe_location(scene: &Scene, subject: &str) -> Result<Vec<SpatialFact>, WorldError> {
    let facts = relations_holding(scene, subject)?;
    let Some(best) = facts.iter().map(|f| f.relation.salience_rank()).min() else {
        return Ok(Vec::new());
    };
    let mut class: Vec<SpatialFact> = facts
        .into_iter()
        .filter(|f| f.relation.salience_rank() == best)
        .collect();
    if class[0].relation == Relation::Between {
        let span = |f: &SpatialFact| {
            let a = scene.positions[&f.objects[0]];
            let c = scene.positions[&f.objects[1]];
            a.distance(&c)
        };
        class.sort_by(|f, g| span(f).total_cmp(&span(g)).then_with(|| f.objects.cmp(&g.objects)));
        class.truncate(1);
    } else {
        class.sort_by(|f, g| f.objects.cmp(&g.objects).then(f.relation.cmp(&g.relation)));
        class.truncate(2);
    }
    Ok(class)
}

/// Coarse table region used when no relation describes a block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TableRegion {
    pub depth: Option<&'static str>,
    pub lateral: Option<&'static str>,
}

pub fn table_region(scene: &Scene, block: &str) -> Result<TableRegion, WorldError> {
    let p = scene.position(block)?;
    let [hx, hy] = scene.half_extents();
    let lateral = if p.x < -hx / 3.0 {
        Some("left")
    } else if p.x > hx / 3.0 {
        Some("right")
    } else {
        None
    };
    let depth = if p.y < -hy / 3.0 {
        Some("front")
    } else if p.y > hy / 3.0 {
        Some("back")
    } else {
        None
    };
    Ok(TableRegion { depth, lateral })
}

/// The block catalog plus initial scene, as stored in a world file.
#[derive(Debug, Clone, PartialEq)]
pub struct World {
    pub blocks: Vec<Block>,
    pub scene: Scene,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorldFile {
    pub blocks: Vec<WorldBlock>,
    #[serde(default = "default_side")]
    pub side: f64,
    #[serde(default = "default_table")]
    pub table: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorldBlock {
    pub name: String,
    pub color: Color,
    pub position: Point3,
}

fn default_side() -> f64 {
    DEFAULT_SIDE
}

fn default_table() -> [f64; 2] {
    DEFAULT_TABLE
}

impl World {
    pub fn from_file(file: &WorldFile) -> Result<World, WorldError> {
        if file.side <= 0.0 {
            return Err(WorldError::Invalid("side must be positive".into()));
        }
        let mut scene = Scene::new(file.side, file.table);
        let mut blocks = Vec::with_capacity(file.blocks.len());
        for b in &file.blocks {
            if b.name.contains('|') || b.name.trim().is_empty() {
                return Err(WorldError::Invalid(format!("bad block name {:?}", b.name)));
            }
            scene = scene.with_block(&b.name, b.position)?;
            blocks.push(Block {
                name: b.name.clone(),
                color: b.color,
            });
        }
        Ok(World { blocks, scene })
    }

    pub fn to_file(&self) -> WorldFile {
        WorldFile {
            blocks: self
                .blocks
                .iter()
                .map(|b| WorldBlock {
                    name: b.name.clone(),
                    color: b.color,
                    position: self.scene.positions[&b.name],
                })
                .collect(),
            side: self.scene.side(),
            table: [self.scene.half_extents[0] * 2.0, self.scene.half_extents[1] * 2.0],
        }
    }

    pub fn from_json(text: &str) -> Result<World, WorldError> {
        World::from_file(&serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<World, WorldError> {
        World::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn color_of(&self, name: &str) -> Option<Color> {
        self.blocks.iter().find(|b| b.name == name).map(|b| b.color)
    }

    pub fn block_names(&self) -> impl Iterator<Item = &str> {
        self.blocks.iter().map(|b| b.name.as_str())
    }
}
