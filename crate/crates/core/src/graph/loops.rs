use std::collections::{BTreeMap, HashMap};

use super::{LoopType, PlanarWindow};
use crate::error::{invalid, Error, Result};

/// Largest predicted candidate count `enumerate_dual_loops` will attempt.
pub const DEFAULT_LOOP_CAP: u64 = 50_000_000;

/// Fixed polyomino counts by area (OEIS A001168), used to predict the work of
/// an enumeration before starting it.
const FIXED_POLYOMINOES: [u64; 16] = [
    1, 1, 2, 6, 19, 63, 216, 760, 2725, 9910, 36446, 135268, 505861, 1903890, 7204874, 27394666,
];

/// A simple closed cycle in the dual of a planar window.
///
/// Stored through the lattice vertices it encloses (`cells`), the dual cycle
/// as a face sequence (starting at the smallest face, continuing towards the
/// smaller of its two neighbours), the primal edges crossed by the cycle
/// (`edges[i]` separates `faces[i]` and `faces[i+1]`), and the span
/// `V_γ`: enclosed vertices plus the outer endpoints of crossed edges.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DualLoop {
    cells: Vec<usize>,
    faces: Vec<usize>,
    edges: Vec<usize>,
    span: Vec<usize>,
}

impl DualLoop {
    /// The loop bounding `cells`, if that boundary is a single simple cycle
    /// lying among the bounded faces of the window.
    pub fn from_cells(window: &PlanarWindow, cells: &[usize]) -> Option<DualLoop> {
        if window.is_periodic() || cells.is_empty() {
            return None;
        }
        let mut cells = cells.to_vec();
        cells.sort_unstable();
        cells.dedup();
        if cells.iter().any(|&v| window.is_border(v)) {
            return None;
        }
        let g = window.graph();
        let inside = |v: usize| cells.binary_search(&v).is_ok();
        let mut crossed = Vec::new();
        let mut span = cells.clone();
        for &c in &cells {
            for &(nb, e) in g.neighbors(c) {
                if !inside(nb) {
                    crossed.push(e);
                    span.push(nb);
                }
            }
        }
        span.sort_unstable();
        span.dedup();
        // incidence of dual vertices; a simple cycle has every degree exactly 2
        let mut at: HashMap<usize, Vec<usize>> = HashMap::new();
        for &e in &crossed {
            for f in window.dual_edge(e) {
                at.entry(f).or_default().push(e);
            }
        }
        if at.values().any(|es| es.len() != 2) {
            return None;
        }
        let start = *at.keys().min()?;
        let other = |e: usize, f: usize| {
            let [a, b] = window.dual_edge(e);
            if a == f {
                b
            } else {
                a
            }
        };
        let [e0, e1] = [at[&start][0], at[&start][1]];
        let first = if other(e0, start) <= other(e1, start) { e0 } else { e1 };
        let mut faces = vec![start];
        let mut edges = vec![first];
        let mut f = other(first, start);
        let mut e = first;
        while f != start {
            faces.push(f);
            let es = &at[&f];
            e = if es[0] == e { es[1] } else { es[0] };
            edges.push(e);
            f = other(e, f);
        }
        if edges.len() != crossed.len() {
            return None;
        }
        Some(DualLoop { cells, faces, edges, span })
    }

    /// Rebuild a loop from its face sequence (either orientation, any start).
    pub fn from_faces(window: &PlanarWindow, faces: &[usize]) -> Result<DualLoop> {
        if faces.len() < 4 {
            return Err(invalid("a dual loop has at least four faces"));
        }
        let mut by_pair = HashMap::new();
        for e in 0..window.graph().m() {
            let [a, b] = window.dual_edge(e);
            by_pair.insert((a.min(b), a.max(b)), e);
        }
        let mut crossed = Vec::with_capacity(faces.len());
        for i in 0..faces.len() {
            let (a, b) = (faces[i], faces[(i + 1) % faces.len()]);
            let e = by_pair
                .get(&(a.min(b), a.max(b)))
                .ok_or_else(|| invalid(format!("faces {a} and {b} are not adjacent")))?;
            crossed.push(*e);
        }
        // a horizontal ray from a vertex crosses the duals of horizontal edges to its right
        let mut cells = Vec::new();
        for v in 0..window.graph().n() {
            let (x, y) = window.coords(v);
            let hits = crossed
                .iter()
                .filter(|&&e| {
                    let (a, b) = window.graph().edge(e);
                    let ((ax, ay), (bx, by)) = (window.coords(a), window.coords(b));
                    ay == y && by == y && ax.min(bx) >= x
                })
                .count();
            if hits % 2 == 1 {
                cells.push(v);
            }
        }
        let lp = DualLoop::from_cells(window, &cells).ok_or_else(|| invalid("face sequence is not a simple interior loop"))?;
        let mut a = lp.edges.clone();
        let mut b = crossed;
        a.sort_unstable();
        b.sort_unstable();
        if a != b {
            return Err(invalid("face sequence does not match the enclosed region"));
        }
        Ok(lp)
    }

    pub fn cells(&self) -> &[usize] {
        &self.cells
    }

    pub fn faces(&self) -> &[usize] {
        &self.faces
    }

    /// Primal edges dual to the loop's edges, in cycle order.
    pub fn crossed_edges(&self) -> &[usize] {
        &self.edges
    }

    /// `V_γ`, sorted.
    pub fn span(&self) -> &[usize] {
        &self.span
    }

    pub fn length(&self) -> usize {
        self.edges.len()
    }

    pub fn area(&self) -> usize {
        self.cells.len()
    }

    pub fn encloses(&self, v: usize) -> bool {
        self.cells.binary_search(&v).is_ok()
    }

    pub fn spans(&self, v: usize) -> bool {
        self.span.binary_search(&v).is_ok()
    }

    pub fn crosses(&self, e: usize) -> bool {
        self.edges.contains(&e)
    }

    /// Enclosed cells as signed coordinates.
    pub fn shape(&self, window: &PlanarWindow) -> Vec<(i32, i32)> {
        self.cells
            .iter()
            .map(|&v| {
                let (x, y) = window.coords(v);
                (x as i32, y as i32)
            })
            .collect()
    }
}

fn max_area(max_length: usize) -> usize {
    // a region of area a has perimeter at least 2·ceil(2·sqrt(a))
    let mut a = 1;
    while 2 * ((2.0 * ((a + 1) as f64).sqrt()).ceil() as usize) <= max_length {
        a += 1;
    }
    a
}

/// Predicted number of candidate regions the enumeration visits.
pub fn predicted_candidates(window: &PlanarWindow, max_length: usize) -> u64 {
    let anchors = (0..window.graph().n()).filter(|&v| !window.is_border(v)).count() as u64;
    let a = max_area(max_length);
    let per_anchor: u64 = if a < FIXED_POLYOMINOES.len() {
        FIXED_POLYOMINOES[1..=a].iter().sum()
    } else {
        u64::MAX / 2
    };
    anchors.saturating_mul(per_anchor)
}

/// Every simple dual loop of length at most `max_length` whose enclosed
/// vertices all lie off the window border, once each.
///
/// Candidate regions are grown cell by cell (Redelmeier's method, each fixed
/// polyomino produced once, anchored at its smallest vertex id) and kept when
/// their boundary is a single simple cycle short enough.
pub fn enumerate_dual_loops(window: &PlanarWindow, max_length: usize) -> Result<Vec<DualLoop>> {
    enumerate_with_cap(window, max_length, DEFAULT_LOOP_CAP)
}

pub fn enumerate_with_cap(window: &PlanarWindow, max_length: usize, cap: u64) -> Result<Vec<DualLoop>> {
    if max_length < 4 {
        return Err(invalid("max loop length must be at least 4"));
    }
    if window.is_periodic() {
        return Err(invalid("dual loops are enumerated on planar windows only"));
    }
    let predicted = predicted_candidates(window, max_length);
    if predicted > cap {
        return Err(Error::Budget(format!("loop enumeration predicts {predicted} candidates, cap is {cap}")));
    }
    let amax = max_area(max_length);
    let g = window.graph();
    let n = g.n();
    let mut reached = vec![false; n];
    let mut out = Vec::new();
    let mut poly = Vec::with_capacity(amax);

    #[allow(clippy::too_many_arguments)]
    fn grow(
        window: &PlanarWindow,
        anchor: usize,
        amax: usize,
        max_length: usize,
        untried: &mut Vec<usize>,
        poly: &mut Vec<usize>,
        reached: &mut [bool],
        out: &mut Vec<DualLoop>,
    ) {
        while let Some(c) = untried.pop() {
            poly.push(c);
            if let Some(lp) = DualLoop::from_cells(window, poly) {
                if lp.length() <= max_length {
                    out.push(lp);
                }
            }
            if poly.len() < amax {
                let mut newly = Vec::new();
                for &(nb, _) in window.graph().neighbors(c) {
                    if nb > anchor && !window.is_border(nb) && !reached[nb] {
                        reached[nb] = true;
                        newly.push(nb);
                    }
                }
                let mut next = untried.clone();
                next.extend_from_slice(&newly);
                grow(window, anchor, amax, max_length, &mut next, poly, reached, out);
                for v in newly {
                    reached[v] = false;
                }
            }
            poly.pop();
        }
    }

    for anchor in 0..n {
        if window.is_border(anchor) {
            continue;
        }
        reached[anchor] = true;
        let mut untried = vec![anchor];
        grow(window, anchor, amax, max_length, &mut untried, &mut poly, &mut reached, &mut out);
        reached[anchor] = false;
    }
    out.sort_by(|a, b| (a.length(), &a.cells).cmp(&(b.length(), &b.cells)));
    Ok(out)
}

/// Enumerated loops of a window with their types and lookup tables.
#[derive(Clone, Debug)]
pub struct LoopCatalog {
    max_length: usize,
    loops: Vec<DualLoop>,
    types: Vec<LoopType>,
    type_of: Vec<usize>,
    by_edge: Vec<Vec<usize>>,
    by_span: Vec<Vec<usize>>,
}

impl LoopCatalog {
    pub fn build(window: &PlanarWindow, max_length: usize) -> Result<Self> {
        let loops = enumerate_dual_loops(window, max_length)?;
        Ok(Self::from_loops(window, max_length, loops))
    }

    pub fn from_loops(window: &PlanarWindow, max_length: usize, loops: Vec<DualLoop>) -> Self {
        let mut by_shape: BTreeMap<(usize, String), LoopType> = BTreeMap::new();
        let raw: Vec<LoopType> = loops.iter().map(|l| super::canonical_loop_type(window, l)).collect();
        for t in &raw {
            by_shape.entry((t.length, t.id())).or_insert_with(|| t.clone());
        }
        let types: Vec<LoopType> = by_shape.into_values().collect();
        let index: HashMap<String, usize> = types.iter().enumerate().map(|(i, t)| (t.id(), i)).collect();
        let type_of = raw.iter().map(|t| index[&t.id()]).collect();
        let g = window.graph();
        let mut by_edge = vec![Vec::new(); g.m()];
        let mut by_span = vec![Vec::new(); g.n()];
        for (i, l) in loops.iter().enumerate() {
            for &e in l.crossed_edges() {
                by_edge[e].push(i);
            }
            for &v in l.span() {
                by_span[v].push(i);
            }
        }
        LoopCatalog { max_length, loops, types, type_of, by_edge, by_span }
    }

    pub fn max_length(&self) -> usize {
        self.max_length
    }

    pub fn loops(&self) -> &[DualLoop] {
        &self.loops
    }

    pub fn len(&self) -> usize {
        self.loops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.loops.is_empty()
    }

    pub fn types(&self) -> &[LoopType] {
        &self.types
    }

    pub fn type_of(&self, i: usize) -> usize {
        self.type_of[i]
    }

    pub fn loops_crossing(&self, e: usize) -> &[usize] {
        &self.by_edge[e]
    }

    pub fn loops_spanning(&self, v: usize) -> &[usize] {
        &self.by_span[v]
    }

    /// Loops of type `t` enclosing `reference`, and whether that falls short
    /// of the full orbit count (window too small around the reference).
    pub fn origin_count(&self, t: usize, reference: usize) -> (usize, bool) {
        let count = self
            .loops
            .iter()
            .enumerate()
            .filter(|(i, l)| self.type_of[*i] == t && l.encloses(reference))
            .count();
        (count, count < self.types[t].origin_count)
    }
}
