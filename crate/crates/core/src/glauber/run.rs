use serde::Serialize;
use serde_json::json;

use super::events::{EventStream, Ring};
use crate::disorder::Coupling;
use crate::error::{invalid, Error, Result};
use crate::graph::Graph;
use crate::spin::{energy, BoundaryCondition, Spin, SpinConfig};

/// Energy change from flipping `v`: 2 Σ_{y~v} J_vy σ_v σ_y.
pub fn delta_h(graph: &Graph, coupling: &Coupling, config: &SpinConfig, bc: &BoundaryCondition, v: usize) -> Result<f64> {
    if bc.is_pinned(v) {
        return Err(invalid(format!("vertex {v} is pinned")));
    }
    Ok(local_delta(graph, coupling.values(), config, v))
}

pub(crate) fn local_delta(graph: &Graph, j: &[f64], config: &SpinConfig, v: usize) -> f64 {
    let s = f64::from(config[v]);
    2.0 * graph.neighbors(v).iter().map(|&(u, e)| j[e] * s * f64::from(config[u])).sum::<f64>()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FlipEvent {
    pub time: f64,
    pub vertex: usize,
    pub delta: f64,
}

/// Every ring, when requested: what the vertex saw and what it did.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RingEvent {
    pub time: f64,
    pub vertex: usize,
    pub delta: f64,
    pub coin: Spin,
    pub flipped: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct VertexCounters {
    pub rings: u64,
    pub tie_rings: u64,
    pub flips: u64,
    pub energy_reducing_flips: u64,
    pub last_flip_time: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunRecord {
    pub horizon: f64,
    pub seed: u64,
    pub initial: SpinConfig,
    pub final_config: SpinConfig,
    pub flips: Vec<FlipEvent>,
    pub rings: Option<Vec<RingEvent>>,
    pub counters: Vec<VertexCounters>,
    /// (time, energy) at the start and after each energy-reducing flip.
    pub energy_trace: Vec<(f64, f64)>,
}

impl RunRecord {
    pub fn initial_energy(&self) -> f64 {
        self.energy_trace[0].1
    }

    pub fn final_energy(&self) -> f64 {
        self.energy_trace.last().expect("trace starts with t=0").1
    }

    pub fn total_flips(&self) -> u64 {
        self.flips.len() as u64
    }

    pub fn energy_reducing_flips(&self) -> u64 {
        self.counters.iter().map(|c| c.energy_reducing_flips).sum()
    }

    /// `vertex,flips,energy_reducing_flips,last_flip_time,final_spin`
    pub fn counters_csv(&self) -> String {
        let mut out = String::from("vertex,flips,energy_reducing_flips,last_flip_time,final_spin\n");
        for (v, c) in self.counters.iter().enumerate() {
            let last = c.last_flip_time.map(|t| format!("{t:?}")).unwrap_or_default();
            out.push_str(&format!("{v},{},{},{last},{}\n", c.flips, c.energy_reducing_flips, self.final_config[v]));
        }
        out
    }

    /// `time,vertex,delta_h`
    pub fn events_csv(&self) -> String {
        let mut out = String::from("time,vertex,delta_h\n");
        for f in &self.flips {
            out.push_str(&format!("{:?},{},{:?}\n", f.time, f.vertex, f.delta));
        }
        out
    }

    pub fn summary_json(&self, classification: serde_json::Value) -> serde_json::Value {
        json!({
            "classification": classification,
            "initial_energy": self.initial_energy(),
            "final_energy": self.final_energy(),
            "total_flips": self.total_flips(),
            "energy_reducing_flips": self.energy_reducing_flips(),
            "seed": self.seed,
            "horizon": self.horizon,
        })
    }
}

/// One trajectory driven ring by ring from outside.
pub(crate) struct Trajectory<'a> {
    graph: &'a Graph,
    j: &'a [f64],
    exact_ties: bool,
    config: SpinConfig,
    energy: f64,
    counters: Vec<VertexCounters>,
    flips: Vec<FlipEvent>,
    rings: Option<Vec<RingEvent>>,
    trace: Vec<(f64, f64)>,
    initial: SpinConfig,
}

impl<'a> Trajectory<'a> {
    pub(crate) fn new(graph: &'a Graph, coupling: &'a Coupling, mut sigma0: SpinConfig, bc: &BoundaryCondition, log_rings: bool) -> Result<Self> {
        coupling.check_len(graph)?;
        if sigma0.len() != graph.n() || bc.len() != graph.n() {
            return Err(invalid("configuration and boundary must cover every vertex"));
        }
        bc.apply(&mut sigma0);
        let e0 = energy(graph, coupling.values(), &sigma0);
        Ok(Trajectory {
            graph,
            j: coupling.values(),
            exact_ties: coupling.ties_possible(),
            energy: e0,
            counters: vec![VertexCounters::default(); graph.n()],
            flips: Vec::new(),
            rings: log_rings.then(Vec::new),
            trace: vec![(0.0, e0)],
            initial: sigma0.clone(),
            config: sigma0,
        })
    }

    pub(crate) fn config(&self) -> &SpinConfig {
        &self.config
    }

    /// Apply one ring. On a tie the vertex adopts the coin value.
    pub(crate) fn ring(&mut self, r: Ring) -> Result<bool> {
        let v = r.vertex;
        let d = local_delta(self.graph, self.j, &self.config, v);
        let tie = if self.exact_ties {
            d == 0.0
        } else if d.abs() < 1e-12 {
            return Err(Error::Degenerate(format!("|dH| = {:e} at vertex {v} under continuous couplings", d.abs())));
        } else {
            false
        };
        let c = &mut self.counters[v];
        c.rings += 1;
        let flip = if tie {
            c.tie_rings += 1;
            r.coin != self.config[v]
        } else {
            d < 0.0
        };
        if flip {
            self.config[v] = -self.config[v];
            c.flips += 1;
            c.last_flip_time = Some(r.time);
            self.flips.push(FlipEvent { time: r.time, vertex: v, delta: d });
            if d < 0.0 {
                c.energy_reducing_flips += 1;
                self.energy += d;
                self.trace.push((r.time, self.energy));
            }
        }
        if let Some(log) = &mut self.rings {
            log.push(RingEvent { time: r.time, vertex: v, delta: d, coin: r.coin, flipped: flip });
        }
        Ok(flip)
    }

    pub(crate) fn finish(self, horizon: f64, seed: u64) -> RunRecord {
        RunRecord {
            horizon,
            seed,
            initial: self.initial,
            final_config: self.config,
            flips: self.flips,
            rings: self.rings,
            counters: self.counters,
            energy_trace: self.trace,
        }
    }
}

/// Zero-temperature Glauber dynamics with a fixed boundary.
///
/// Each unpinned vertex carries a rate-one clock. At a ring the vertex flips
/// if that strictly lowers the energy, stays if it would raise it, and on an
/// exact tie takes the value of the ring's coin.
pub struct Glauber<'a> {
    graph: &'a Graph,
    coupling: &'a Coupling,
    bc: BoundaryCondition,
    log_rings: bool,
}

impl<'a> Glauber<'a> {
    pub fn new(graph: &'a Graph, coupling: &'a Coupling) -> Self {
        Glauber { graph, coupling, bc: BoundaryCondition::free(graph.n()), log_rings: false }
    }

    pub fn boundary(mut self, bc: BoundaryCondition) -> Self {
        self.bc = bc;
        self
    }

    pub fn log_rings(mut self, on: bool) -> Self {
        self.log_rings = on;
        self
    }

    pub fn run(&self, sigma0: SpinConfig, horizon: f64, stream: &EventStream) -> Result<RunRecord> {
        if !(horizon > 0.0) {
            return Err(invalid("horizon must be positive"));
        }
        if stream.len() != self.graph.n() {
            return Err(invalid("event stream does not match the graph"));
        }
        let mut traj = Trajectory::new(self.graph, self.coupling, sigma0, &self.bc, self.log_rings)?;
        let active: Vec<bool> = (0..self.graph.n()).map(|v| !self.bc.is_pinned(v)).collect();
        for r in stream.rings(&active, horizon) {
            traj.ring(r)?;
        }
        Ok(traj.finish(horizon, stream.seed()))
    }
}

pub fn run_glauber(
    graph: &Graph,
    coupling: &Coupling,
    sigma0: SpinConfig,
    bc: BoundaryCondition,
    horizon: f64,
    seed: u64,
) -> Result<RunRecord> {
    Glauber::new(graph, coupling).boundary(bc).run(sigma0, horizon, &EventStream::new(seed, graph.n()))
}

/// Two runs driven by the same rings and coins.
#[derive(Clone, Debug, Serialize)]
pub struct CoupledRecord {
    pub low: RunRecord,
    pub high: RunRecord,
    /// Rings after which the order `low <= high` was checked.
    pub checks: u64,
    pub violations: u64,
}

/// Run a lower and an upper initial configuration on one shared event
/// stream, checking the pointwise order after every ring that changed either.
#[allow(clippy::too_many_arguments)]
pub fn run_coupled_monotone(
    graph: &Graph,
    coupling: &Coupling,
    low: SpinConfig,
    high: SpinConfig,
    bc_low: BoundaryCondition,
    bc_high: BoundaryCondition,
    horizon: f64,
    seed: u64,
) -> Result<CoupledRecord> {
    if coupling.values().iter().any(|&j| j < 0.0) {
        return Err(invalid("monotone coupling needs ferromagnetic couplings"));
    }
    if !low.le(&high) || !bc_low.le(&bc_high) {
        return Err(invalid("initial configurations or boundaries are not ordered"));
    }
    if !(horizon > 0.0) {
        return Err(invalid("horizon must be positive"));
    }
    let stream = EventStream::new(seed, graph.n());
    let mut a = Trajectory::new(graph, coupling, low, &bc_low, false)?;
    let mut b = Trajectory::new(graph, coupling, high, &bc_high, false)?;
    let active: Vec<bool> = (0..graph.n()).map(|v| !bc_low.is_pinned(v)).collect();
    let (mut checks, mut violations) = (0, 0);
    for r in stream.rings(&active, horizon) {
        let fa = a.ring(r)?;
        let fb = b.ring(r)?;
        if fa || fb {
            checks += 1;
            if !a.config().le(b.config()) {
                violations += 1;
            }
        }
    }
    Ok(CoupledRecord { low: a.finish(horizon, seed), high: b.finish(horizon, seed), checks, violations })
}
