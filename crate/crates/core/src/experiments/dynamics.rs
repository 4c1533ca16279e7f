use rand::Rng;
use serde_json::json;

use super::{mean_se, Bundle, ExperimentConfig};
use crate::disorder::Coupling;
use crate::error::Result;
use crate::exec::Exec;
use crate::glauber::{
    classify_freezing, estimate_strongly_freezing, run_coupled_monotone, slice_constant, EventStream, Glauber,
};
use crate::graph::{Boundary, Graph, PlanarWindow};
use crate::rng::{replica_seed, stream_rng, Stream};
use crate::spin::{BoundaryCondition, Spin, SpinConfig};

/// Two cliques glued at one vertex, times five levels. The lower two levels
/// start at +1, the upper two at -1, and in the middle level one clique is
/// -1 and the other +1. The glued vertex then always sees a tie.
pub(crate) fn nonfreezing_cylinder(cfg: &ExperimentConfig, exec: Exec) -> Result<Bundle> {
    let replicas: usize = cfg.get("run.replicas", 200)?;
    let horizon: f64 = cfg.get("dynamics.horizon", 100.0)?;
    let n: usize = cfg.get("graph.n", 4)?;
    let seed = cfg.seed()?;
    let slice = Graph::shared_clique_pair(n)?;
    let g = Graph::cylinder(&slice, -2, 2)?;
    let k = slice.n();
    let shared = 2 * k;
    let c = Coupling::constant(&g);
    let runs = exec.map(replicas, |r| -> Result<(u64, u64, u64, bool)> {
        let s = replica_seed(seed, r as u64);
        let mut sigma = SpinConfig::uniform(g.n(), 1);
        for v in 3 * k..5 * k {
            sigma[v] = -1;
        }
        for v in 1..n {
            sigma[shared + v] = -1;
        }
        sigma[shared] = if stream_rng(s, Stream::InitialSpins).gen::<bool>() { 1 } else { -1 };
        let rec = Glauber::new(&g, &c).log_rings(true).run(sigma, horizon, &EventStream::new(s, g.n()))?;
        let others = (0..g.n()).filter(|&v| v != shared).map(|v| rec.counters[v].flips).sum();
        let rings = rec.rings.as_deref().unwrap_or_default();
        let ties = rings.iter().filter(|e| e.vertex == shared).all(|e| e.delta == 0.0);
        Ok((rec.counters[shared].flips, rec.counters[shared].rings, others, ties))
    });
    let runs = runs.into_iter().collect::<Result<Vec<_>>>()?;
    let flips: Vec<f64> = runs.iter().map(|r| r.0 as f64).collect();
    let (mean, se) = mean_se(&flips);
    let others: u64 = runs.iter().map(|r| r.2).sum();
    let all_ties = runs.iter().all(|r| r.3);
    let passed = others == 0 && all_ties && (40.0..=60.0).contains(&mean);
    let mut csv = String::from("replica,shared_flips,shared_rings,other_flips,all_ties\n");
    for (i, r) in runs.iter().enumerate() {
        csv += &format!("{i},{},{},{},{}\n", r.0, r.1, r.2, r.3);
    }
    let summary = json!({
        "replicas": replicas, "horizon": horizon, "shared_vertex": shared,
        "mean_shared_flips": mean, "stderr": se, "other_flips": others, "every_shared_ring_tied": all_ties,
    });
    Ok(Bundle::new("nonfreezing-cylinder", passed, summary).with_file("replicas.csv", csv))
}

/// Radius-2 ball of the 4-regular tree. Leaves under two children are pinned
/// +1 and under the other two -1, so the root sits on a permanent tie.
pub(crate) fn even_tree_tie(cfg: &ExperimentConfig, exec: Exec) -> Result<Bundle> {
    let replicas: usize = cfg.get("run.replicas", 100)?;
    let horizon: f64 = cfg.get("dynamics.horizon", 100.0)?;
    let seed = cfg.seed()?;
    let g = Graph::regular_tree(4, 2)?;
    let c = Coupling::constant(&g);
    let sign = |child: usize| -> Spin { if child <= 2 { 1 } else { -1 } };
    let mut bc = BoundaryCondition::free(g.n());
    for child in 1..=4 {
        for leaf in 5 + 3 * (child - 1)..8 + 3 * (child - 1) {
            bc.pin(leaf, sign(child));
        }
    }
    let runs = exec.map(replicas, |r| -> Result<(u64, u64, bool)> {
        let s = replica_seed(seed, r as u64);
        let mut sigma = SpinConfig::uniform(g.n(), 1);
        for child in 1..=4 {
            sigma[child] = sign(child);
        }
        sigma[0] = if stream_rng(s, Stream::InitialSpins).gen::<bool>() { 1 } else { -1 };
        bc.apply(&mut sigma);
        let rec = Glauber::new(&g, &c)
            .boundary(bc.clone())
            .log_rings(true)
            .run(sigma, horizon, &EventStream::new(s, g.n()))?;
        let child_flips = (1..=4).map(|v| rec.counters[v].flips).sum();
        let rings = rec.rings.as_deref().unwrap_or_default();
        let ties = rings.iter().filter(|e| e.vertex == 0).all(|e| e.delta == 0.0);
        Ok((rec.counters[0].flips, child_flips, ties))
    });
    let runs = runs.into_iter().collect::<Result<Vec<_>>>()?;
    let root_moved = runs.iter().filter(|r| r.0 >= 1).count();
    let child_flips: u64 = runs.iter().map(|r| r.1).sum();
    let all_ties = runs.iter().all(|r| r.2);
    let passed = child_flips == 0 && all_ties && root_moved * 100 >= 95 * replicas;
    let mut csv = String::from("replica,root_flips,child_flips,root_rings_tied\n");
    for (i, r) in runs.iter().enumerate() {
        csv += &format!("{i},{},{},{}\n", r.0, r.1, r.2);
    }
    let summary = json!({
        "replicas": replicas, "horizon": horizon, "root_flipped_in": root_moved,
        "child_flips": child_flips, "every_root_ring_tied": all_ties,
    });
    Ok(Bundle::new("evenTree-tie", passed, summary).with_file("replicas.csv", csv))
}

/// Random ordered pairs on a torus with J = 1 share one event stream.
pub(crate) fn monotone_coupling(cfg: &ExperimentConfig, exec: Exec) -> Result<Bundle> {
    let replicas: usize = cfg.get("run.replicas", 1000)?;
    let horizon: f64 = cfg.get("dynamics.horizon", 20.0)?;
    let width: usize = cfg.get("graph.width", 6)?;
    let seed = cfg.seed()?;
    let w = PlanarWindow::new(width, width, Boundary::Periodic)?;
    let g = w.graph();
    let c = Coupling::constant(g);
    let runs = exec.map(replicas, |r| -> Result<(u64, u64)> {
        let s = replica_seed(seed, r as u64);
        let mut rng = stream_rng(s, Stream::InitialSpins);
        let low = SpinConfig::random(g.n(), 0.5, &mut rng);
        let lift = SpinConfig::random(g.n(), 0.5, &mut rng);
        let high = SpinConfig((0..g.n()).map(|v| low[v].max(lift[v])).collect());
        let free = BoundaryCondition::free(g.n());
        let rec = run_coupled_monotone(g, &c, low, high, free.clone(), free, horizon, s)?;
        Ok((rec.checks, rec.violations))
    });
    let runs = runs.into_iter().collect::<Result<Vec<_>>>()?;
    let checks: u64 = runs.iter().map(|r| r.0).sum();
    let violations: u64 = runs.iter().map(|r| r.1).sum();
    let summary = json!({ "pairs": replicas, "horizon": horizon, "checks": checks, "violations": violations });
    Ok(Bundle::new("monotone-coupling", violations == 0, summary))
}

/// One replica on a cylinder with the two end slice pairs pinned, each end
/// to its own random sign. Returns (quiet, slice constant, flips).
pub fn pinned_cylinder_run(cyl: &Graph, slice_n: usize, horizon: f64, trailing: f64, seed: u64) -> Result<(bool, bool, u64)> {
    let levels = cyl.levels().len();
    let mut rng = stream_rng(seed, Stream::InitialSpins);
    let mut sigma = SpinConfig::random(cyl.n(), 0.5, &mut rng);
    let low: Spin = if rng.gen::<bool>() { 1 } else { -1 };
    let high: Spin = if rng.gen::<bool>() { 1 } else { -1 };
    let mut bc = BoundaryCondition::free(cyl.n());
    for (l, s) in [(0, low), (1, low), (levels - 2, high), (levels - 1, high)] {
        for v in l * slice_n..(l + 1) * slice_n {
            bc.pin(v, s);
        }
    }
    bc.apply(&mut sigma);
    let rec = Glauber::new(cyl, &Coupling::constant(cyl))
        .boundary(bc)
        .run(sigma, horizon, &EventStream::new(seed, cyl.n()))?;
    let report = classify_freezing(cyl, &rec, trailing)?;
    Ok((report.is_quiet(), slice_constant(cyl, &rec.final_config), rec.total_flips()))
}

pub(crate) fn freeze_in_slices(cfg: &ExperimentConfig, exec: Exec) -> Result<Bundle> {
    let replicas: usize = cfg.get("run.replicas", 50)?;
    let horizon: f64 = cfg.get("dynamics.horizon", 1e4)?;
    let trailing: f64 = cfg.get("dynamics.trailing", 0.2)?;
    let seed = cfg.seed()?;
    let mut rows = Vec::new();
    let mut csv = String::from("cylinder,replica,quiet,slice_constant,flips\n");
    let mut passed = true;
    for (i, (name, slice, high)) in [("K4x[0..10]", Graph::complete(4), 10), ("C5x[0..12]", Graph::cycle(5)?, 12)]
        .into_iter()
        .enumerate()
    {
        let cyl = Graph::cylinder(&slice, 0, high)?;
        let sub = replica_seed(seed, i as u64);
        let runs = exec.map(replicas, |r| pinned_cylinder_run(&cyl, slice.n(), horizon, trailing, replica_seed(sub, r as u64)));
        let runs = runs.into_iter().collect::<Result<Vec<_>>>()?;
        let good = runs.iter().filter(|r| r.0 && r.1).count();
        passed &= good == replicas;
        for (r, x) in runs.iter().enumerate() {
            csv += &format!("{name},{r},{},{},{}\n", x.0, x.1, x.2);
        }
        rows.push(json!({ "cylinder": name, "frozen_slice_constant": good, "replicas": replicas }));
    }
    let summary = json!({ "horizon": horizon, "trailing_fraction": trailing, "cylinders": rows });
    Ok(Bundle::new("freeze-in-slices", passed, summary).with_file("replicas.csv", csv))
}

pub const STRONGLY_FREEZING_SIZES: [usize; 4] = [10, 20, 40, 80];

pub(crate) fn strongly_freezing(cfg: &ExperimentConfig, _exec: Exec) -> Result<Bundle> {
    let samples: usize = cfg.get("run.samples", 10_000)?;
    let d: usize = cfg.get("graph.d", 2)?;
    let seed = cfg.seed()?;
    let mut est = Vec::new();
    for (i, &n) in STRONGLY_FREEZING_SIZES.iter().enumerate() {
        est.push(estimate_strongly_freezing(n, d, samples, replica_seed(seed, i as u64))?);
    }
    let passed = est.windows(2).all(|w| w[1].0 >= w[0].0 - 2.0 * (w[0].1.powi(2) + w[1].1.powi(2)).sqrt());
    let mut csv = String::from("n,value,stderr,samples\n");
    for (n, (p, se)) in STRONGLY_FREEZING_SIZES.iter().zip(&est) {
        csv += &format!("{n},{p},{se},{samples}\n");
    }
    let rows: Vec<_> = STRONGLY_FREEZING_SIZES.iter().zip(&est).map(|(n, (p, se))| json!({"n": n, "p": p, "stderr": se})).collect();
    let summary = json!({ "d": d, "samples": samples, "estimates": rows });
    Ok(Bundle::new("strongly-freezing", passed, summary).with_file("estimates.csv", csv))
}
