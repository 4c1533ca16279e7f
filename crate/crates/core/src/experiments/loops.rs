use rand::seq::index::sample;
use serde_json::json;

use super::{mean_se, Bundle, ExperimentConfig};
use crate::disorder::{sample_couplings, Coupling, Descriptor};
use crate::error::Result;
use crate::exec::Exec;
use crate::graph::{Boundary, LoopCatalog, PlanarWindow};
use crate::loopdyn::{dependency_cluster, perturbation_margin, replay_identical, scan_loops, FrequencySchedule, LoopDynamics};
use crate::rng::{replica_seed, stream_rng, Stream};
use crate::spin::SpinConfig;

/// Catalog counts on a window of `cells_w × cells_h` unit cells.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LoopCounts {
    pub plaquettes: usize,
    pub length6_through_vertex: usize,
    pub up_to_8_through_vertex: usize,
    pub length8_shapes: usize,
}

pub fn loop_counts(cells_w: usize, cells_h: usize) -> Result<LoopCounts> {
    let w = PlanarWindow::new(cells_w + 1, cells_h + 1, Boundary::Free)?;
    let cat = LoopCatalog::build(&w, 8)?;
    let v = w.vertex(cells_w / 2, cells_h / 2);
    let through = |max: usize| cat.loops().iter().filter(|l| l.length() <= max && l.encloses(v)).count();
    Ok(LoopCounts {
        plaquettes: cat.loops().iter().filter(|l| l.length() == 4).count(),
        length6_through_vertex: through(6) - through(4),
        up_to_8_through_vertex: through(8),
        length8_shapes: cat.types().iter().filter(|t| t.length == 8).map(|t| t.orientations).sum(),
    })
}

pub(crate) fn loop_count(cfg: &ExperimentConfig, _exec: Exec) -> Result<Bundle> {
    let cw: usize = cfg.get("graph.width", 8)?;
    let ch: usize = cfg.get("graph.height", cw)?;
    let got = loop_counts(cw, ch)?;
    let plaquettes = (cw - 1) * (ch - 1);
    let passed = got.plaquettes == plaquettes
        && got.length6_through_vertex == 4
        && got.up_to_8_through_vertex == 27
        && got.length8_shapes == 7;
    let summary = json!({
        "cells": [cw, ch],
        "plaquettes": got.plaquettes, "plaquettes_expected": plaquettes,
        "length6_through_vertex": got.length6_through_vertex,
        "up_to_8_through_vertex": got.up_to_8_through_vertex,
        "length8_shapes_up_to_translation": got.length8_shapes,
    });
    Ok(Bundle::new("loop-count", passed, summary))
}

/// Dependency cluster sizes at the window centre with the time chosen so
/// the branching budget is one half.
pub fn cluster_sizes_at_centre(width: usize, c: f64, max_length: usize, clusters: usize, seed: u64, exec: Exec) -> Result<Vec<(usize, bool)>> {
    let w = PlanarWindow::new(width, width, Boundary::Free)?;
    let cat = LoopCatalog::build(&w, max_length)?;
    let s = FrequencySchedule::new(cat.types(), c)?;
    let tau = 0.5 / s.well_definedness;
    let v = w.vertex(width / 2, width / 2);
    let out = exec.map(clusters, |i| dependency_cluster(&w, &cat, &s, tau, replica_seed(seed, i as u64), v));
    out.into_iter().map(|d| d.map(|d| (d.vertices.len(), d.truncated))).collect()
}

pub(crate) fn loop_cluster_budget(cfg: &ExperimentConfig, exec: Exec) -> Result<Bundle> {
    let clusters: usize = cfg.get("run.replicas", 1000)?;
    let c: f64 = cfg.get("dynamics.c", 10.0)?;
    let lmax: usize = cfg.get("dynamics.max_length", 8)?;
    let bound: f64 = cfg.get("dynamics.budget", 2.4)?;
    let width: usize = cfg.get("graph.width", 41)?;
    let sizes = cluster_sizes_at_centre(width, c, lmax, clusters, cfg.seed()?, exec)?;
    let xs: Vec<f64> = sizes.iter().map(|s| s.0 as f64).collect();
    let (mean, se) = mean_se(&xs);
    let truncated = sizes.iter().filter(|s| s.1).count();
    let max = sizes.iter().map(|s| s.0).max().unwrap_or(0);
    let passed = truncated == 0 && mean <= bound;
    let csv: String = std::iter::once("cluster,size,truncated\n".to_string())
        .chain(sizes.iter().enumerate().map(|(i, s)| format!("{i},{},{}\n", s.0, s.1)))
        .collect();
    let summary = json!({
        "clusters": clusters, "window": width, "c": c, "max_length": lmax,
        "mean_size": mean, "stderr": se, "max_size": max, "truncated": truncated, "bound": bound,
    });
    Ok(Bundle::new("loop-cluster-budget", passed, summary).with_file("clusters.csv", csv))
}

/// One replica of the terminal-state check: (quiet, positive loops left, energy never rose).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TerminalRun {
    pub quiet: bool,
    pub positive_loops: usize,
    pub monotone_energy: bool,
}

pub fn terminal_runs(
    dynamics: &LoopDynamics<'_>,
    coupling: &Coupling,
    horizon: f64,
    trailing: f64,
    replicas: usize,
    seed: u64,
    exec: Exec,
) -> Result<Vec<TerminalRun>> {
    let w = dynamics.window();
    let runs = exec.map(replicas, |r| -> Result<TerminalRun> {
        let s = replica_seed(seed, r as u64);
        let s0 = SpinConfig::random(w.graph().n(), 0.5, &mut stream_rng(s, Stream::InitialSpins));
        let rec = dynamics.run(coupling, s0, horizon, s)?;
        let scan = scan_loops(w, dynamics.catalog(), coupling, &rec.final_config);
        Ok(TerminalRun {
            quiet: rec.quiet_over(trailing),
            positive_loops: scan.positive,
            monotone_energy: rec.energy_trace.windows(2).all(|p| p[1].1 <= p[0].1 + 1e-9),
        })
    });
    runs.into_iter().collect()
}

/// Horizons tried, in units of the fastest loop's mean waiting time.
pub const HORIZON_FACTORS: [f64; 8] = [1e2, 2e2, 4e2, 8e2, 1.6e3, 3.2e3, 6.4e3, 1.28e4];

pub(crate) fn loop_terminal_gsp(cfg: &ExperimentConfig, exec: Exec) -> Result<Bundle> {
    let replicas: usize = cfg.get("run.replicas", 50)?;
    let c: f64 = cfg.get("dynamics.c", 10.0)?;
    let lmax: usize = cfg.get("dynamics.max_length", 8)?;
    let trailing: f64 = cfg.get("dynamics.trailing", 0.2)?;
    let width: usize = cfg.get("graph.width", 8)?;
    let seed = cfg.seed()?;
    let w = PlanarWindow::new(width, width, Boundary::Free)?;
    let cat = LoopCatalog::build(&w, lmax)?;
    let s = FrequencySchedule::new(cat.types(), c)?;
    let dynamics = LoopDynamics::new(&w, &cat, &s)?;
    let coupling = Coupling::constant(w.graph());
    let needed = (replicas * 9).div_ceil(10);
    let mut tried = Vec::new();
    let mut last = Vec::new();
    for k in HORIZON_FACTORS {
        last = terminal_runs(&dynamics, &coupling, k / s.max_rate(), trailing, replicas, seed, exec)?;
        let quiet = last.iter().filter(|r| r.quiet).count();
        tried.push(json!({ "factor": k, "quiet": quiet }));
        if quiet >= needed {
            break;
        }
    }
    let quiet = last.iter().filter(|r| r.quiet).count();
    let quiet_with_positive = last.iter().filter(|r| r.quiet && r.positive_loops > 0).count();
    let monotone = last.iter().all(|r| r.monotone_energy);
    let passed = quiet >= needed && quiet_with_positive == 0 && monotone;
    let csv: String = std::iter::once("replica,quiet,positive_loops,monotone_energy\n".to_string())
        .chain(last.iter().enumerate().map(|(i, r)| format!("{i},{},{},{}\n", r.quiet, r.positive_loops, r.monotone_energy)))
        .collect();
    let summary = json!({
        "replicas": replicas, "window": width, "max_length": lmax, "c": c,
        "horizons": tried, "quiet": quiet, "quiet_needed": needed,
        "quiet_with_positive_loops": quiet_with_positive, "energy_monotone": monotone,
    });
    Ok(Bundle::new("loop-terminal-gsp", passed, summary).with_file("replicas.csv", csv))
}

/// Per-run tallies of the margin replay check.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct MarginTally {
    pub edges: usize,
    pub slack: usize,
    /// Replays at ±ε/2 that changed the run.
    pub inside_failures: usize,
    /// Replays at 1.1 ε towards the sign boundary that changed the run.
    pub broken: usize,
}

pub fn margin_run(dynamics: &LoopDynamics<'_>, horizon: f64, edges: usize, seed: u64) -> Result<MarginTally> {
    let g = dynamics.window().graph();
    let c = sample_couplings(g, Descriptor::Gaussian { sd: 1.0 }, seed)?;
    let s0 = SpinConfig::random(g.n(), 0.5, &mut stream_rng(seed, Stream::InitialSpins));
    let rec = dynamics.run(&c, s0, horizon, seed)?;
    let mut t = MarginTally::default();
    for e in sample(&mut stream_rng(seed, Stream::Sampler), g.m(), edges.min(g.m())) {
        t.edges += 1;
        let m = perturbation_margin(dynamics, &rec, e);
        match (m.epsilon, m.sign_boundary_direction) {
            (Some(eps), Some(dir)) => {
                for d in [eps / 2.0, -eps / 2.0] {
                    t.inside_failures += usize::from(!replay_identical(dynamics, &rec, &c, e, d)?);
                }
                t.broken += usize::from(!replay_identical(dynamics, &rec, &c, e, 1.1 * dir)?);
            }
            _ => t.slack += 1,
        }
    }
    Ok(t)
}

pub(crate) fn perturbation_margin_exp(cfg: &ExperimentConfig, exec: Exec) -> Result<Bundle> {
    let replicas: usize = cfg.get("run.replicas", 50)?;
    let edges: usize = cfg.get("run.edges", 10)?;
    let width: usize = cfg.get("graph.width", 8)?;
    let lmax: usize = cfg.get("dynamics.max_length", 8)?;
    let seed = cfg.seed()?;
    let w = PlanarWindow::new(width, width, Boundary::Free)?;
    let cat = LoopCatalog::build(&w, lmax)?;
    let s = FrequencySchedule::new(cat.types(), 10.0)?;
    let dynamics = LoopDynamics::new(&w, &cat, &s)?;
    let horizon = 100.0 / s.max_rate();
    let tallies = exec.map(replicas, |r| margin_run(&dynamics, horizon, edges, replica_seed(seed, r as u64)));
    let tallies = tallies.into_iter().collect::<Result<Vec<_>>>()?;
    let sum = |f: fn(&MarginTally) -> usize| tallies.iter().map(f).sum::<usize>();
    let failures = sum(|t| t.inside_failures);
    let mut csv = String::from("run,edges,slack,inside_failures,broken\n");
    for (i, t) in tallies.iter().enumerate() {
        csv += &format!("{i},{},{},{},{}\n", t.edges, t.slack, t.inside_failures, t.broken);
    }
    let summary = json!({
        "runs": replicas, "edges": sum(|t| t.edges), "slack": sum(|t| t.slack),
        "inside_failures": failures, "broken_past_margin": sum(|t| t.broken),
    });
    Ok(Bundle::new("perturbation-margin", failures == 0, summary).with_file("runs.csv", csv))
}
