use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use serde::Serialize;
use serde_json::json;

use super::FrequencySchedule;
use crate::disorder::Coupling;
use crate::error::{invalid, Error, Result};
use crate::graph::{Boundary, DualLoop, LoopCatalog, PlanarWindow};
use crate::rng::{keyed_rng, stream_rng, Stream};
use crate::spin::{energy, SpinConfig};

/// Energy carried by the edges a loop crosses: `-Σ J_xy σ_x σ_y` over them.
/// Positive means flipping the enclosed vertices lowers the energy by twice this.
pub fn loop_hamiltonian(window: &PlanarWindow, lp: &DualLoop, coupling: &Coupling, config: &SpinConfig) -> f64 {
    let g = window.graph();
    -lp.crossed_edges()
        .iter()
        .map(|&e| {
            let (u, v) = g.edge(e);
            coupling.get(e) * f64::from(config[u]) * f64::from(config[v])
        })
        .sum::<f64>()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Action {
    Flip,
    CoinFlip,
    CoinStay,
    Stay,
}

impl Action {
    pub fn flipped(self) -> bool {
        matches!(self, Action::Flip | Action::CoinFlip)
    }

    pub fn name(self) -> &'static str {
        match self {
            Action::Flip => "flip",
            Action::CoinFlip => "coin-flip",
            Action::CoinStay => "coin-stay",
            Action::Stay => "stay",
        }
    }
}

/// One ring of one loop.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Evaluation {
    pub time: f64,
    pub loop_index: usize,
    pub h: f64,
    pub action: Action,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LoopRunRecord {
    pub horizon: f64,
    pub seed: u64,
    pub max_length: usize,
    pub initial: SpinConfig,
    pub final_config: SpinConfig,
    pub evaluations: Vec<Evaluation>,
    pub vertex_flips: Vec<u64>,
    /// (time, energy) at the start and after every executed flip.
    pub energy_trace: Vec<(f64, f64)>,
    /// Incrementally tracked energy at the end.
    pub tracked_energy: f64,
    /// Energy recomputed from scratch at the end.
    pub final_energy: f64,
}

impl LoopRunRecord {
    pub fn flips(&self) -> impl Iterator<Item = &Evaluation> {
        self.evaluations.iter().filter(|e| e.action.flipped())
    }

    /// (loop, time bits) of every executed flip; equal sequences mean identical runs.
    pub fn flip_sequence(&self) -> Vec<(usize, u64)> {
        self.flips().map(|e| (e.loop_index, e.time.to_bits())).collect()
    }

    pub fn last_flip_time(&self) -> Option<f64> {
        self.flips().last().map(|e| e.time)
    }

    /// No flip in `[T(1-f), T]`.
    pub fn quiet_over(&self, trailing_fraction: f64) -> bool {
        self.last_flip_time().map_or(true, |t| t < self.horizon * (1.0 - trailing_fraction))
    }

    /// `time,loop_canonical_id,h_value,action`; the id is the loop type and its first face.
    pub fn events_csv(&self, catalog: &LoopCatalog) -> String {
        let mut out = String::from("time,loop_canonical_id,h_value,action\n");
        for e in &self.evaluations {
            let t = &catalog.types()[catalog.type_of(e.loop_index)];
            let f0 = catalog.loops()[e.loop_index].faces()[0];
            out.push_str(&format!("{:?},{}@{},{:?},{}\n", e.time, t.id(), f0, e.h, e.action.name()));
        }
        out
    }

    /// `type,time,energy_change` rows for every type with at least one flip, plus a zero row per type.
    pub fn type_energy_csv(&self, catalog: &LoopCatalog) -> String {
        let mut out = String::from("type,time,energy_change\n");
        for t in 0..catalog.types().len() {
            let id = catalog.types()[t].id();
            for (time, e) in energy_accounting(self, catalog, t) {
                out.push_str(&format!("{id},{time:?},{e:?}\n"));
            }
        }
        out
    }
}

/// Cumulative energy change from executed energy-reducing flips of loops of type `t`.
pub fn energy_accounting(record: &LoopRunRecord, catalog: &LoopCatalog, t: usize) -> Vec<(f64, f64)> {
    let mut out = vec![(0.0, 0.0)];
    let mut acc = 0.0;
    for e in &record.evaluations {
        if e.action == Action::Flip && catalog.type_of(e.loop_index) == t {
            acc -= 2.0 * e.h;
            out.push((e.time, acc));
        }
    }
    out
}

/// Signs of all loop Hamiltonians in a configuration.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct LoopScan {
    pub positive: usize,
    pub zero: usize,
    pub negative: usize,
}

impl LoopScan {
    /// No enumerated loop can lower the energy: an `L_max`-local ground state.
    pub fn is_local_ground_state(&self) -> bool {
        self.positive == 0
    }
}

pub fn scan_loops(window: &PlanarWindow, catalog: &LoopCatalog, coupling: &Coupling, config: &SpinConfig) -> LoopScan {
    let mut s = LoopScan::default();
    for lp in catalog.loops() {
        let h = loop_hamiltonian(window, lp, coupling, config);
        if h > 0.0 {
            s.positive += 1;
        } else if h < 0.0 {
            s.negative += 1;
        } else {
            s.zero += 1;
        }
    }
    s
}

/// Loop dynamics on a window: one Poisson clock per enumerated loop, with
/// the rate of its type. At a ring the enclosed vertices flip if the loop
/// Hamiltonian is positive, flip on a +1 coin if it is exactly zero, and stay
/// otherwise.
pub struct LoopDynamics<'a> {
    window: &'a PlanarWindow,
    catalog: &'a LoopCatalog,
    schedule: &'a FrequencySchedule,
    cumulative: Vec<f64>,
}

impl<'a> LoopDynamics<'a> {
    pub fn new(window: &'a PlanarWindow, catalog: &'a LoopCatalog, schedule: &'a FrequencySchedule) -> Result<Self> {
        let ids: Vec<String> = catalog.types().iter().map(|t| t.id()).collect();
        if ids != schedule.type_ids {
            return Err(invalid("schedule was not built for this window's loop types"));
        }
        let mut acc = 0.0;
        let cumulative = (0..catalog.len())
            .map(|i| {
                acc += schedule.rate(catalog.type_of(i));
                acc
            })
            .collect();
        Ok(LoopDynamics { window, catalog, schedule, cumulative })
    }

    pub fn total_rate(&self) -> f64 {
        self.cumulative.last().copied().unwrap_or(0.0)
    }

    pub fn window(&self) -> &PlanarWindow {
        self.window
    }

    pub fn catalog(&self) -> &LoopCatalog {
        self.catalog
    }

    pub fn schedule(&self) -> &FrequencySchedule {
        self.schedule
    }

    /// Rings come from one aggregate Poisson process thinned onto loops in
    /// proportion to their rates; the k-th coin of loop `i` is the k-th draw
    /// of its own coin stream.
    pub fn run(&self, coupling: &Coupling, sigma0: SpinConfig, horizon: f64, seed: u64) -> Result<LoopRunRecord> {
        let g = self.window.graph();
        coupling.check_len(g)?;
        if sigma0.len() != g.n() {
            return Err(invalid("configuration does not match the window"));
        }
        if !(horizon > 0.0) {
            return Err(invalid("horizon must be positive"));
        }
        let mut config = sigma0;
        if let Boundary::Fixed(_) = self.window.boundary() {
            self.window.boundary_condition().apply(&mut config);
        }
        let exact_ties = coupling.ties_possible();
        let initial = config.clone();
        let mut e = energy(g, coupling.values(), &config);
        let mut trace = vec![(0.0, e)];
        let mut evaluations = Vec::new();
        let mut vertex_flips = vec![0u64; g.n()];
        let mut coins: Vec<Option<ChaCha8Rng>> = vec![None; self.catalog.len()];
        let total = self.total_rate();
        let mut clock = stream_rng(seed, Stream::Clocks);
        let mut t = 0.0;
        if total > 0.0 {
            loop {
                let gap: f64 = Exp1.sample(&mut clock);
                t += gap / total;
                if t > horizon {
                    break;
                }
                let u = clock.gen::<f64>() * total;
                let i = self.cumulative.partition_point(|&c| c <= u).min(self.catalog.len() - 1);
                let coin_rng = coins[i].get_or_insert_with(|| keyed_rng(seed, Stream::Coins, i as u64));
                let heads = coin_rng.gen::<bool>();
                let lp = &self.catalog.loops()[i];
                let h = loop_hamiltonian(self.window, lp, coupling, &config);
                let zero = if exact_ties {
                    h == 0.0
                } else if h.abs() < 1e-12 {
                    return Err(Error::Degenerate(format!("|H| = {:e} on loop {i} under continuous couplings", h.abs())));
                } else {
                    false
                };
                let action = if zero {
                    if heads {
                        Action::CoinFlip
                    } else {
                        Action::CoinStay
                    }
                } else if h > 0.0 {
                    Action::Flip
                } else {
                    Action::Stay
                };
                if action.flipped() {
                    for &c in lp.cells() {
                        config[c] = -config[c];
                        vertex_flips[c] += 1;
                    }
                    e -= 2.0 * h;
                    trace.push((t, e));
                }
                evaluations.push(Evaluation { time: t, loop_index: i, h, action });
            }
        }
        let final_energy = energy(g, coupling.values(), &config);
        Ok(LoopRunRecord {
            horizon,
            seed,
            max_length: self.catalog.max_length(),
            initial,
            final_config: config,
            evaluations,
            vertex_flips,
            energy_trace: trace,
            tracked_energy: e,
            final_energy,
        })
    }

    pub fn summary_json(&self, record: &LoopRunRecord, coupling: &Coupling, trailing_fraction: f64) -> serde_json::Value {
        let scan = scan_loops(self.window, self.catalog, coupling, &record.final_config);
        json!({
            "notion": format!("loop-local ground state up to length {}", record.max_length),
            "max_length": record.max_length,
            "terminal_local_ground_state": scan.is_local_ground_state(),
            "loop_scan_residual": scan.positive,
            "loop_scan_zero": scan.zero,
            "quiet": record.quiet_over(trailing_fraction),
            "flips": record.flips().count(),
            "evaluations": record.evaluations.len(),
            "initial_energy": record.energy_trace[0].1,
            "final_energy": record.final_energy,
            "seed": record.seed,
            "horizon": record.horizon,
        })
    }
}

pub fn run_loop_dynamics(
    window: &PlanarWindow,
    catalog: &LoopCatalog,
    coupling: &Coupling,
    sigma0: SpinConfig,
    schedule: &FrequencySchedule,
    horizon: f64,
    seed: u64,
) -> Result<LoopRunRecord> {
    LoopDynamics::new(window, catalog, schedule)?.run(coupling, sigma0, horizon, seed)
}
