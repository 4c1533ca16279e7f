use std::collections::BTreeSet;

use serde::Serialize;

use super::{is_fixed_edge, sample_couplings, Descriptor};
use crate::error::{invalid, Result};
use crate::exec::Exec;
use crate::graph::PlanarWindow;
use crate::rng::replica_seed;

/// A cycle around a vertex with few edges on or touching it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChokingCycle {
    /// Cycle vertices in order around the cycle.
    pub vertices: Vec<usize>,
    /// Edges on the cycle or incident to a cycle vertex (the choking count is their number).
    pub touching: Vec<usize>,
    /// Vertices strictly inside.
    pub enclosed: usize,
}

impl ChokingCycle {
    pub fn count(&self) -> usize {
        self.touching.len()
    }
}

fn rectangle(window: &PlanarWindow, x0: usize, y0: usize, x1: usize, y1: usize) -> Vec<usize> {
    let mut ring = Vec::new();
    for x in x0..x1 {
        ring.push(window.vertex(x, y0));
    }
    for y in y0..y1 {
        ring.push(window.vertex(x1, y));
    }
    for x in (x0 + 1..=x1).rev() {
        ring.push(window.vertex(x, y1));
    }
    for y in (y0 + 1..=y1).rev() {
        ring.push(window.vertex(x0, y));
    }
    ring
}

/// Edges of a closed vertex cycle.
pub fn cycle_edges(window: &PlanarWindow, cycle: &[usize]) -> Result<Vec<usize>> {
    let g = window.graph();
    (0..cycle.len())
        .map(|i| {
            let (a, b) = (cycle[i], cycle[(i + 1) % cycle.len()]);
            g.edge_between(a, b).ok_or_else(|| invalid(format!("{a} and {b} are not adjacent")))
        })
        .collect()
}

/// The smallest axis-aligned rectangular cycle around `v` with fewer than `n`
/// edges on or touching it.
///
/// Rectangles are tried by enclosed area, then by touching count, then by
/// position. On the square lattice every vertex is surrounded by such
/// rectangles, so restricting to them loses no vertex that can be choked
/// inside the window, although a non-rectangular cycle may occasionally have
/// a smaller count.
pub fn find_choking_cycle(window: &PlanarWindow, v: usize, n: usize) -> Option<ChokingCycle> {
    if window.is_periodic() || window.is_border(v) {
        return None;
    }
    let (vx, vy) = window.coords(v);
    let g = window.graph();
    let mut candidates = Vec::new();
    for x0 in 0..vx {
        for x1 in vx + 1..window.width() {
            for y0 in 0..vy {
                for y1 in vy + 1..window.height() {
                    let area = (x1 - x0 - 1) * (y1 - y0 - 1);
                    candidates.push((area, x0, y0, x1, y1));
                }
            }
        }
    }
    candidates.sort_unstable();
    let mut best: Option<(usize, usize, ChokingCycle)> = None;
    for (area, x0, y0, x1, y1) in candidates {
        if let Some((a, _, _)) = &best {
            if area > *a {
                break;
            }
        }
        let ring = rectangle(window, x0, y0, x1, y1);
        let touching: BTreeSet<usize> = ring.iter().flat_map(|&u| g.neighbors(u).iter().map(|&(_, e)| e)).collect();
        if touching.len() >= n {
            continue;
        }
        let count = touching.len();
        if best.as_ref().map_or(true, |(_, c, _)| count < *c) {
            best = Some((area, count, ChokingCycle { vertices: ring, touching: touching.into_iter().collect(), enclosed: area }));
        }
    }
    best.map(|(_, _, c)| c)
}

/// Frequency with which every edge of `cycle` is fixed under fresh couplings
/// on the window. Returns (estimate, standard error).
pub fn estimate_fixed_cycle_probability(
    window: &PlanarWindow,
    cycle: &[usize],
    descriptor: Descriptor,
    trials: usize,
    seed: u64,
    exec: Exec,
) -> Result<(f64, f64)> {
    if trials == 0 {
        return Err(invalid("trials must be positive"));
    }
    let edges = cycle_edges(window, cycle)?;
    let g = window.graph();
    let hits = exec.map(trials, |t| -> Result<bool> {
        let c = sample_couplings(g, descriptor, replica_seed(seed, t as u64))?;
        Ok(edges.iter().all(|&e| is_fixed_edge(g, &c, e)))
    });
    let mut k = 0usize;
    for h in hits {
        k += usize::from(h?);
    }
    let p = k as f64 / trials as f64;
    Ok((p, (p * (1.0 - p) / trials as f64).sqrt()))
}
