use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{DualLoop, PlanarWindow};

/// Cells (enclosed lattice vertices) of a loop, translated so the minimum
/// coordinates are zero and sorted.
pub type Shape = Vec<(i32, i32)>;

fn apply(k: usize, (x, y): (i32, i32)) -> (i32, i32) {
    match k {
        0 => (x, y),
        1 => (-y, x),
        2 => (-x, -y),
        3 => (y, -x),
        4 => (-x, y),
        5 => (y, x),
        6 => (x, -y),
        _ => (-y, -x),
    }
}

fn normalize(cells: impl IntoIterator<Item = (i32, i32)>) -> Shape {
    let mut v: Vec<(i32, i32)> = cells.into_iter().collect();
    let mx = v.iter().map(|c| c.0).min().unwrap_or(0);
    let my = v.iter().map(|c| c.1).min().unwrap_or(0);
    for c in &mut v {
        c.0 -= mx;
        c.1 -= my;
    }
    v.sort_unstable();
    v
}

/// Distinct normalized images of a cell set under the eight symmetries of the square.
pub fn orientations(cells: &[(i32, i32)]) -> Vec<Shape> {
    let set: BTreeSet<Shape> = (0..8).map(|k| normalize(cells.iter().map(|&c| apply(k, c)))).collect();
    set.into_iter().collect()
}

/// Lexicographically smallest normalized image: equal exactly on congruent cell sets.
pub fn canonical_shape(cells: &[(i32, i32)]) -> Shape {
    orientations(cells).into_iter().next().unwrap_or_default()
}

const STEPS: [(i32, i32); 4] = [(1, 0), (-1, 0), (0, 1), (0, -1)];

/// Boundary edge counts `[horizontal, vertical]` of a cell set.
fn boundary_counts(shape: &[(i32, i32)]) -> [usize; 2] {
    let set: BTreeSet<(i32, i32)> = shape.iter().copied().collect();
    let mut out = [0, 0];
    for &(x, y) in shape {
        for (i, (dx, dy)) in STEPS.iter().enumerate() {
            if !set.contains(&(x + dx, y + dy)) {
                out[i / 2] += 1;
            }
        }
    }
    out
}

fn span_of(shape: &[(i32, i32)]) -> usize {
    let set: BTreeSet<(i32, i32)> = shape.iter().copied().collect();
    let mut all = set.clone();
    for &(x, y) in shape {
        for (dx, dy) in STEPS {
            all.insert((x + dx, y + dy));
        }
    }
    all.len()
}

/// A congruence class of loops together with the per-type quantities used by
/// frequency schedules.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LoopType {
    /// Canonical enclosed cell set.
    pub shape: Shape,
    pub length: usize,
    /// Vertices inside or adjacent to the loop.
    pub span: usize,
    /// Number of distinct orientations (images up to translation).
    pub orientations: usize,
    /// Loops of this type enclosing a fixed vertex: orientations × area.
    pub origin_count: usize,
    /// For a fixed horizontal (index 0) or vertical (index 1) primal edge,
    /// the number of loops of this type whose dual cycle crosses it.
    pub edge_crossings: [usize; 2],
}

impl LoopType {
    pub fn from_cells(cells: &[(i32, i32)]) -> Self {
        let orients = orientations(cells);
        let shape = orients[0].clone();
        let [h, v] = boundary_counts(&shape);
        let mut crossings = [0, 0];
        for o in &orients {
            let c = boundary_counts(o);
            crossings[0] += c[0];
            crossings[1] += c[1];
        }
        LoopType {
            span: span_of(&shape),
            length: h + v,
            orientations: orients.len(),
            origin_count: orients.len() * shape.len(),
            edge_crossings: crossings,
            shape,
        }
    }

    pub fn area(&self) -> usize {
        self.shape.len()
    }

    /// Stable textual key, e.g. `l6a2:0.0/1.0`.
    pub fn id(&self) -> String {
        let cells: Vec<String> = self.shape.iter().map(|(x, y)| format!("{x}.{y}")).collect();
        format!("l{}a{}:{}", self.length, self.area(), cells.join("/"))
    }
}

pub fn canonical_loop_type(window: &PlanarWindow, lp: &DualLoop) -> LoopType {
    LoopType::from_cells(&lp.shape(window))
}
