//! Decodes a token string into a flat modular robot on a 2D grid.
//!
//! The decoder is a turtle interpreter: module tokens grow the body in the
//! current direction, turn tokens rotate it, brackets save and restore the
//! cursor. Collisions and per-kind limits skip tokens instead of failing, so
//! every string with a core decodes to some body.

use std::collections::HashMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::controller::OscillatorParams;
use crate::lsystem::SymbolToken;

/// Cardinal growth direction on the grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridDir {
    East,
    North,
    West,
    South,
}

impl GridDir {
    pub fn offset(self) -> (i32, i32) {
        match self {
            GridDir::East => (1, 0),
            GridDir::North => (0, 1),
            GridDir::West => (-1, 0),
            GridDir::South => (0, -1),
        }
    }

    pub fn turned_left(self) -> Self {
        match self {
            GridDir::East => GridDir::North,
            GridDir::North => GridDir::West,
            GridDir::West => GridDir::South,
            GridDir::South => GridDir::East,
        }
    }

    pub fn turned_right(self) -> Self {
        match self {
            GridDir::East => GridDir::South,
            GridDir::South => GridDir::West,
            GridDir::West => GridDir::North,
            GridDir::North => GridDir::East,
        }
    }

    /// Unit vector in world coordinates before any heading rotation.
    pub fn as_vec(self) -> (f64, f64) {
        let (x, y) = self.offset();
        (x as f64, y as f64)
    }
}

/// Module kind; joints carry their oscillator parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModuleKind {
    Core,
    Brick,
    Joint(OscillatorParams),
}

impl ModuleKind {
    fn letter(&self) -> char {
        match self {
            ModuleKind::Core => 'C',
            ModuleKind::Brick => 'B',
            ModuleKind::Joint(_) => 'J',
        }
    }
}

/// Attachment of a non-core module to its parent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Attachment {
    pub parent: usize,
    /// Unit grid direction from the parent to this module.
    pub attach_dir: GridDir,
}

/// One placed module.
#[derive(Debug, Clone, PartialEq)]
pub struct BodyModule {
    pub id: usize,
    pub kind: ModuleKind,
    pub grid_pos: (i32, i32),
    /// `None` exactly for the core.
    pub attachment: Option<Attachment>,
}

/// Decoded morphology: a tree of modules rooted at the core.
#[derive(Debug, Clone, PartialEq)]
pub struct BodyGraph {
    modules: Vec<BodyModule>,
    n_joints: usize,
    n_bricks: usize,
}

/// Maximum number of joints and bricks a body may contain.
#[derive(Debug, Clone, Copy)]
pub struct BodyLimits {
    pub max_joints: usize,
    pub max_bricks: usize,
}

impl Default for BodyLimits {
    fn default() -> Self {
        Self {
            max_joints: 10,
            max_bricks: 20,
        }
    }
}

/// Morphological descriptors recorded for every robot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MorphDescriptors {
    pub size: usize,
    pub n_joints: usize,
    pub n_bricks: usize,
    /// Number of modules with at least two children.
    pub branching: usize,
    /// Bounding-box aspect ratio, smaller dimension over larger, in `(0, 1]`.
    pub proportion: f64,
}

#[derive(Debug, Error, PartialEq)]
pub enum BodyError {
    #[error("token sequence contains no core token")]
    NoCore,
}

impl BodyGraph {
    pub fn modules(&self) -> &[BodyModule] {
        &self.modules
    }

    pub fn len(&self) -> usize {
        self.modules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modules.is_empty()
    }

    pub fn n_joints(&self) -> usize {
        self.n_joints
    }

    pub fn n_bricks(&self) -> usize {
        self.n_bricks
    }

    pub fn core(&self) -> &BodyModule {
        &self.modules[0]
    }

    /// Iterator over joint modules with their oscillator parameters.
    pub fn joints(&self) -> impl Iterator<Item = (&BodyModule, OscillatorParams)> {
        self.modules.iter().filter_map(|m| match m.kind {
            ModuleKind::Joint(p) => Some((m, p)),
            _ => None,
        })
    }

    /// Ids of the direct children of `id`.
    pub fn children_of(&self, id: usize) -> Vec<usize> {
        self.modules
            .iter()
            .filter(|m| m.attachment.map(|a| a.parent) == Some(id))
            .map(|m| m.id)
            .collect()
    }

    /// Number of modules in the subtree rooted at `id`, excluding `id`.
    pub fn descendant_count(&self, id: usize) -> usize {
        self.descendants(id).len()
    }

    /// Depth-first list of strict descendants of `id`.
    pub fn descendants(&self, id: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack = self.children_of(id);
        while let Some(m) = stack.pop() {
            out.push(m);
            stack.extend(self.children_of(m));
        }
        out
    }

    /// Debug dump, one module per line: `id kind (x,y) parent`.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        for m in &self.modules {
            let parent = match m.attachment {
                Some(a) => a.parent.to_string(),
                None => "-".to_string(),
            };
            let _ = writeln!(
                s,
                "{} {} ({},{}) {}",
                m.id,
                m.kind.letter(),
                m.grid_pos.0,
                m.grid_pos.1,
                parent
            );
        }
        s
    }
}

/// Turtle-decodes `tokens` into a body.
///
/// The first core token is placed at the origin with growth direction east;
/// later core tokens are skipped. A brick or joint is placed one cell ahead
/// of the cursor unless the cell is occupied or its kind limit is reached,
/// in which case the token is skipped and the state is unchanged.
pub fn decode(tokens: &[SymbolToken], limits: BodyLimits) -> Result<BodyGraph, BodyError> {
    if !tokens.iter().any(|t| t.is_core()) {
        return Err(BodyError::NoCore);
    }

    let mut modules: Vec<BodyModule> = Vec::new();
    let mut occupied: HashMap<(i32, i32), usize> = HashMap::new();
    let mut n_joints = 0usize;
    let mut n_bricks = 0usize;

    let mut cursor: Option<usize> = None;
    let mut dir = GridDir::East;
    let mut stack: Vec<(Option<usize>, GridDir)> = Vec::new();

    for tok in tokens {
        match tok {
            SymbolToken::Core => {
                if modules.is_empty() {
                    modules.push(BodyModule {
                        id: 0,
                        kind: ModuleKind::Core,
                        grid_pos: (0, 0),
                        attachment: None,
                    });
                    occupied.insert((0, 0), 0);
                    cursor = Some(0);
                }
            }
            SymbolToken::Brick | SymbolToken::Joint(_) => {
                let Some(at) = cursor else { continue };
                let kind = match tok {
                    SymbolToken::Brick => {
                        if n_bricks >= limits.max_bricks {
                            continue;
                        }
                        ModuleKind::Brick
                    }
                    SymbolToken::Joint(p) => {
                        if n_joints >= limits.max_joints {
                            continue;
                        }
                        ModuleKind::Joint(*p)
                    }
                    _ => unreachable!(),
                };
                let (px, py) = modules[at].grid_pos;
                let (dx, dy) = dir.offset();
                let target = (px + dx, py + dy);
                if occupied.contains_key(&target) {
                    continue;
                }
                let id = modules.len();
                match kind {
                    ModuleKind::Brick => n_bricks += 1,
                    ModuleKind::Joint(_) => n_joints += 1,
                    ModuleKind::Core => {}
                }
                modules.push(BodyModule {
                    id,
                    kind,
                    grid_pos: target,
                    attachment: Some(Attachment {
                        parent: at,
                        attach_dir: dir,
                    }),
                });
                occupied.insert(target, id);
                cursor = Some(id);
            }
            SymbolToken::TurnLeft => dir = dir.turned_left(),
            SymbolToken::TurnRight => dir = dir.turned_right(),
            SymbolToken::PushBranch => stack.push((cursor, dir)),
            SymbolToken::PopBranch => {
                if let Some((c, d)) = stack.pop() {
                    cursor = c;
                    dir = d;
                }
            }
        }
    }

    Ok(BodyGraph {
        modules,
        n_joints,
        n_bricks,
    })
}

/// Computes the morphological descriptors of a body.
pub fn descriptors(body: &BodyGraph) -> MorphDescriptors {
    let mut child_count = vec![0usize; body.len()];
    for m in body.modules() {
        if let Some(a) = m.attachment {
            child_count[a.parent] += 1;
        }
    }
    let branching = child_count.iter().filter(|&&c| c >= 2).count();

    let (mut min_x, mut max_x, mut min_y, mut max_y) = (i32::MAX, i32::MIN, i32::MAX, i32::MIN);
    for m in body.modules() {
        min_x = min_x.min(m.grid_pos.0);
        max_x = max_x.max(m.grid_pos.0);
        min_y = min_y.min(m.grid_pos.1);
        max_y = max_y.max(m.grid_pos.1);
    }
    let w = (max_x - min_x + 1) as f64;
    let h = (max_y - min_y + 1) as f64;

    MorphDescriptors {
        size: body.len(),
        n_joints: body.n_joints(),
        n_bricks: body.n_bricks(),
        branching,
        proportion: w.min(h) / w.max(h),
    }
}
