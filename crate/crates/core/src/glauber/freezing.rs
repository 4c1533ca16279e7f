use rand::Rng;
use serde::Serialize;
use serde_json::json;

use super::events::EventStream;
use super::run::{local_delta, Glauber, RunRecord};
use crate::disorder::Coupling;
use crate::error::{invalid, Result};
use crate::exec::Exec;
use crate::graph::Graph;
use crate::rng::{replica_seed, stream_rng, Stream};
use crate::spin::{BoundaryCondition, Spin, SpinConfig};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "class", rename_all = "kebab-case")]
pub enum FreezingClass {
    AllQuiet,
    AllQuietSliceConstant,
    Active { active: Vec<usize>, components: Vec<Vec<usize>> },
}

/// Finite-horizon reading of the freezing notions. A vertex is quiet when it
/// did not flip during the trailing window `[T(1-f), T]`; nothing here says
/// anything about infinite time.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FreezingReport {
    pub tag: &'static str,
    pub trailing_fraction: f64,
    pub window_start: f64,
    pub class: FreezingClass,
}

impl FreezingReport {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).unwrap_or_else(|_| json!(null))
    }

    pub fn is_quiet(&self) -> bool {
        !matches!(self.class, FreezingClass::Active { .. })
    }
}

/// Every level of a cylinder-labelled graph carries a single spin.
pub fn slice_constant(graph: &Graph, config: &SpinConfig) -> bool {
    let levels = graph.levels();
    !levels.is_empty()
        && levels.iter().all(|&h| {
            let s = graph.slice(h);
            s.iter().all(|&v| config[v] == config[s[0]])
        })
}

pub fn classify_freezing(graph: &Graph, record: &RunRecord, trailing_fraction: f64) -> Result<FreezingReport> {
    if !(trailing_fraction > 0.0 && trailing_fraction < 1.0) {
        return Err(invalid("trailing fraction must lie in (0, 1)"));
    }
    let start = record.horizon * (1.0 - trailing_fraction);
    let active: Vec<usize> = (0..graph.n())
        .filter(|&v| record.counters[v].last_flip_time.is_some_and(|t| t >= start))
        .collect();
    let class = if active.is_empty() {
        if slice_constant(graph, &record.final_config) {
            FreezingClass::AllQuietSliceConstant
        } else {
            FreezingClass::AllQuiet
        }
    } else {
        let comps = graph.components_where(|v| active.binary_search(&v).is_ok());
        let mut groups: Vec<Vec<usize>> = Vec::new();
        for &v in &active {
            let c = comps[v].expect("active vertex has a component");
            if c == groups.len() {
                groups.push(Vec::new());
            }
            groups[c].push(v);
        }
        FreezingClass::Active { active, components: groups }
    };
    Ok(FreezingReport { tag: "HEURISTIC", trailing_fraction, window_start: start, class })
}

/// Monte Carlo test of the possibly-self-freezing property of `subset`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PsfEstimate {
    pub tag: &'static str,
    pub psf: bool,
    pub trials: usize,
    /// First (sign, trial) in which a subset vertex flipped.
    pub witness: Option<(Spin, usize)>,
}

/// Start `subset` monochromatic (both signs), everything else i.i.d.
/// symmetric, and watch `trials` independent runs per sign.
pub fn is_psf_estimate(
    graph: &Graph,
    coupling: &Coupling,
    subset: &[usize],
    trials: usize,
    horizon: f64,
    seed: u64,
    exec: Exec,
) -> Result<PsfEstimate> {
    if subset.is_empty() {
        return Err(invalid("subset must be nonempty"));
    }
    let n = graph.n();
    let mut witness = None;
    for (si, sign) in [(0u64, 1 as Spin), (1, -1)] {
        let flipped = exec.map(trials, |t| -> Result<bool> {
            let s = replica_seed(seed, 2 * t as u64 + si);
            let mut sigma = SpinConfig::random(n, 0.5, &mut stream_rng(s, Stream::InitialSpins));
            for &v in subset {
                sigma[v] = sign;
            }
            let r = Glauber::new(graph, coupling).run(sigma, horizon, &EventStream::new(s, n))?;
            Ok(subset.iter().any(|&v| r.counters[v].flips > 0))
        });
        for (t, f) in flipped.into_iter().enumerate() {
            if f? && witness.is_none() {
                witness = Some((sign, t));
            }
        }
        if witness.is_some() {
            break;
        }
    }
    Ok(PsfEstimate { tag: "ESTIMATE", psf: witness.is_none(), trials, witness })
}

/// The sign `s` such that every vertex of `slice` has at least `d + 1` more
/// neighbours inside the slice with spin `s` than with `-s`, if any.
pub fn strongly_good_sign(graph: &Graph, slice: &[usize], config: &SpinConfig, d: usize) -> Option<Spin> {
    let mut inside = vec![false; graph.n()];
    for &v in slice {
        inside[v] = true;
    }
    [1 as Spin, -1].into_iter().find(|&s| {
        slice.iter().all(|&v| {
            let lead: i64 = graph
                .neighbors(v)
                .iter()
                .filter(|&&(u, _)| inside[u])
                .map(|&(u, _)| if config[u] == s { 1 } else { -1 })
                .sum();
            lead >= d as i64 + 1
        })
    })
}

/// Probability, under i.i.d. symmetric spins on `K_n`, that every vertex
/// has at least `d + 1` more neighbours of one sign than of the other.
/// Returns (estimate, standard error).
pub fn estimate_strongly_freezing(n: usize, d: usize, samples: usize, seed: u64) -> Result<(f64, f64)> {
    if n < 2 || samples == 0 {
        return Err(invalid("need n >= 2 and at least one sample"));
    }
    let mut rng = stream_rng(seed, Stream::Sampler);
    let need = d as i64 + 1;
    let mut hits = 0usize;
    for _ in 0..samples {
        let plus = (0..n).filter(|_| rng.gen::<bool>()).count() as i64;
        let minus = n as i64 - plus;
        // in K_n a vertex sees every other vertex
        let good = |p: i64, m: i64| (p == 0 || (p - 1) - m >= need) && (m == 0 || p - (m - 1) >= need);
        if good(plus, minus) || good(minus, plus) {
            hits += 1;
        }
    }
    let p = hits as f64 / samples as f64;
    Ok((p, (p * (1.0 - p) / samples as f64).sqrt()))
}

/// Slice kind for the explicit freeze-in-slices flip procedures.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SliceKind {
    Cycle,
    Complete,
}

/// A feasible flip sequence taking a cylinder configuration to one that is
/// constant on every slice, processing slices upward from the pinned bottom.
///
/// `pinned_low` and `pinned_high` are the numbers of monochromatic slices at
/// each end that stay untouched (two for cycle slices, one for complete
/// slices). Every flip in the returned sequence has energy change at most
/// zero at the moment it is made.
pub fn freeze_in_slices_procedure(
    graph: &Graph,
    kind: SliceKind,
    config: &SpinConfig,
    pinned_low: usize,
    pinned_high: usize,
) -> Result<(Vec<usize>, SpinConfig)> {
    let levels = graph.levels();
    if levels.len() < pinned_low + pinned_high + 1 || pinned_low == 0 || pinned_high == 0 {
        return Err(invalid("cylinder too short for the requested pinned slices"));
    }
    let slices: Vec<Vec<usize>> = levels.iter().map(|&h| graph.slice(h)).collect();
    let constant = |c: &SpinConfig, s: &[usize]| s.iter().all(|&v| c[v] == c[s[0]]);
    let mut c = config.clone();
    for s in slices[..pinned_low].iter().chain(&slices[levels.len() - pinned_high..]) {
        if !constant(&c, s) {
            return Err(invalid("end slices are not monochromatic"));
        }
    }
    let j = vec![1.0; graph.m()];
    let mut flips = Vec::new();
    for i in pinned_low..levels.len() - pinned_high {
        let below = c[slices[i - 1][0]];
        let here = &slices[i];
        let count = |c: &SpinConfig, s: Spin| here.iter().filter(|&&v| c[v] == s).count();
        let target = match kind {
            SliceKind::Cycle => {
                let none_agree = count(&c, below) == 0;
                let above_all_minus = slices[i + 1].iter().all(|&v| c[v] == -below);
                if none_agree && above_all_minus {
                    -below
                } else {
                    below
                }
            }
            SliceKind::Complete => {
                let plus = count(&c, 1);
                let minus = here.len() - plus;
                match plus.cmp(&minus) {
                    std::cmp::Ordering::Greater => 1,
                    std::cmp::Ordering::Less => -1,
                    std::cmp::Ordering::Equal => below,
                }
            }
        };
        // flip any vertex of the wrong sign that is allowed to move, until none is left
        loop {
            let next = here.iter().copied().find(|&v| c[v] != target && local_delta(graph, &j, &c, v) <= 0.0);
            match next {
                Some(v) => {
                    c[v] = target;
                    flips.push(v);
                }
                None => break,
            }
        }
        if !constant(&c, here) {
            return Err(invalid(format!("procedure stuck at level {}", levels[i])));
        }
    }
    Ok((flips, c))
}

/// Apply `flips` in order, checking that each is allowed by the zero-temperature rule.
pub fn replay_flips(graph: &Graph, coupling: &Coupling, config: &SpinConfig, bc: &BoundaryCondition, flips: &[usize]) -> Result<SpinConfig> {
    let mut c = config.clone();
    for (k, &v) in flips.iter().enumerate() {
        if bc.is_pinned(v) {
            return Err(invalid(format!("step {k} flips pinned vertex {v}")));
        }
        if local_delta(graph, coupling.values(), &c, v) > 0.0 {
            return Err(invalid(format!("step {k} raises the energy at vertex {v}")));
        }
        c[v] = -c[v];
    }
    Ok(c)
}
