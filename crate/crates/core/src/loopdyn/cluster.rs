use std::collections::VecDeque;

use rand_distr::{Distribution, Exp1};
use serde::Serialize;

use super::FrequencySchedule;
use crate::error::{invalid, Result};
use crate::graph::{LoopCatalog, PlanarWindow};
use crate::rng::{keyed_rng, Stream};

/// The set of vertices whose spins at time `τ` can influence `vertex`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DependencyCluster {
    /// Sorted.
    pub vertices: Vec<usize>,
    /// Loops that rang before `τ` and were pulled in.
    pub rung_loops: usize,
    /// `τ` times the well-definedness sum.
    pub budget: f64,
    /// Whether the budget is below one (subcritical branching domination).
    pub budget_ok: bool,
    /// The cluster reached the window border, where loops are cut off, so it
    /// may be smaller than on the infinite lattice.
    pub truncated: bool,
}

/// Whether loop `i` rings before `tau`: its own clock, keyed by loop index.
pub fn rings_before(seed: u64, i: usize, rate: f64, tau: f64) -> bool {
    if rate <= 0.0 {
        return false;
    }
    let mut rng = keyed_rng(seed, Stream::Clocks, i as u64);
    let first: f64 = Exp1.sample(&mut rng);
    first / rate < tau
}

/// Closure of `{vertex}` under: a rung loop whose span meets the set brings
/// in its whole span.
pub fn closure_under_rings(window: &PlanarWindow, catalog: &LoopCatalog, vertex: usize, rung: impl Fn(usize) -> bool) -> (Vec<usize>, usize, bool) {
    let n = window.graph().n();
    let mut inside = vec![false; n];
    let mut looked = vec![false; catalog.len()];
    let mut queue = VecDeque::from([vertex]);
    inside[vertex] = true;
    let mut rung_loops = 0;
    while let Some(v) = queue.pop_front() {
        for &i in catalog.loops_spanning(v) {
            if looked[i] {
                continue;
            }
            looked[i] = true;
            if !rung(i) {
                continue;
            }
            rung_loops += 1;
            for &u in catalog.loops()[i].span() {
                if !inside[u] {
                    inside[u] = true;
                    queue.push_back(u);
                }
            }
        }
    }
    let vertices: Vec<usize> = (0..n).filter(|&v| inside[v]).collect();
    let truncated = vertices.iter().any(|&v| window.is_border(v));
    (vertices, rung_loops, truncated)
}

pub fn dependency_cluster(
    window: &PlanarWindow,
    catalog: &LoopCatalog,
    schedule: &FrequencySchedule,
    tau: f64,
    seed: u64,
    vertex: usize,
) -> Result<DependencyCluster> {
    if !(tau > 0.0) {
        return Err(invalid("tau must be positive"));
    }
    if vertex >= window.graph().n() {
        return Err(invalid("vertex outside the window"));
    }
    let (vertices, rung_loops, truncated) =
        closure_under_rings(window, catalog, vertex, |i| rings_before(seed, i, schedule.rate(catalog.type_of(i)), tau));
    let budget = tau * schedule.well_definedness;
    Ok(DependencyCluster { vertices, rung_loops, budget, budget_ok: budget < 1.0, truncated })
}
