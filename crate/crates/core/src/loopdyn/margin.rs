use serde::Serialize;

use super::run::{LoopDynamics, LoopRunRecord};
use crate::disorder::Coupling;
use crate::error::Result;

/// How far the coupling of one edge can move without changing a run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Margin {
    pub edge: usize,
    /// Smallest |H| over evaluations of loops crossing the edge; `None` when
    /// no such loop was evaluated (no finite margin).
    pub epsilon: Option<f64>,
    pub evaluations: usize,
    /// Evaluation attaining the margin.
    pub argmin: Option<usize>,
    /// Shift of the edge coupling, of size ε in the direction that drives the
    /// minimising evaluation through zero. Scale it past 1 to change the run.
    pub sign_boundary_direction: Option<f64>,
}

/// Margin of `edge` in a completed run.
///
/// The spins at every evaluation are rebuilt by replaying the recorded flips
/// from the initial configuration.
pub fn perturbation_margin(dynamics: &LoopDynamics<'_>, record: &LoopRunRecord, edge: usize) -> Margin {
    let catalog = dynamics.catalog();
    let g = dynamics.window().graph();
    let (a, b) = g.edge(edge);
    let mut config = record.initial.clone();
    let mut best: Option<(f64, usize, f64)> = None;
    let mut count = 0;
    for (k, e) in record.evaluations.iter().enumerate() {
        let lp = &catalog.loops()[e.loop_index];
        if lp.crosses(edge) {
            count += 1;
            let prod = f64::from(config[a] * config[b]);
            if best.map_or(true, |(m, _, _)| e.h.abs() < m) {
                best = Some((e.h.abs(), k, prod * e.h.signum()));
            }
        }
        if e.action.flipped() {
            for &c in lp.cells() {
                config[c] = -config[c];
            }
        }
    }
    Margin {
        edge,
        epsilon: best.map(|b| b.0),
        evaluations: count,
        argmin: best.map(|b| b.1),
        sign_boundary_direction: best.map(|(m, _, dir)| dir * m),
    }
}

/// Rerun with the edge coupling shifted by `delta` and compare executed flips.
pub fn replay_identical(
    dynamics: &LoopDynamics<'_>,
    record: &LoopRunRecord,
    coupling: &Coupling,
    edge: usize,
    delta: f64,
) -> Result<bool> {
    let shifted = coupling.with_value(edge, coupling.get(edge) + delta);
    let again = dynamics.run(&shifted, record.initial.clone(), record.horizon, record.seed)?;
    Ok(again.flip_sequence() == record.flip_sequence())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::disorder::{sample_couplings, Descriptor};
    use crate::graph::{Boundary, LoopCatalog, PlanarWindow};
    use crate::loopdyn::FrequencySchedule;
    use crate::rng::{stream_rng, Stream};
    use crate::spin::SpinConfig;

    #[test]
    fn margins_hold_and_break() {
        let w = PlanarWindow::new(6, 6, Boundary::Free).unwrap();
        let cat = LoopCatalog::build(&w, 6).unwrap();
        let s = FrequencySchedule::new(cat.types(), 10.0).unwrap();
        let dynamics = LoopDynamics::new(&w, &cat, &s).unwrap();
        let c = sample_couplings(w.graph(), Descriptor::Gaussian { sd: 1.0 }, 3).unwrap();
        let s0 = SpinConfig::random(36, 0.5, &mut stream_rng(3, Stream::InitialSpins));
        let r = dynamics.run(&c, s0, 100.0 / s.max_rate(), 3).unwrap();
        let mut broke = 0;
        for e in 0..w.graph().m() {
            let m = perturbation_margin(&dynamics, &r, e);
            match m.epsilon {
                None => {
                    // border edges between two border vertices are crossed by no loop
                    assert_eq!(m.evaluations, 0);
                    assert!(replay_identical(&dynamics, &r, &c, e, 5.0).unwrap());
                }
                Some(eps) => {
                    assert!(replay_identical(&dynamics, &r, &c, e, eps / 2.0).unwrap());
                    assert!(replay_identical(&dynamics, &r, &c, e, -eps / 2.0).unwrap());
                    let push = 1.1 * m.sign_boundary_direction.unwrap();
                    broke += usize::from(!replay_identical(&dynamics, &r, &c, e, push).unwrap());
                }
            }
        }
        assert!(broke > 0);
    }
}
