use serde::Serialize;
use serde_json::json;

use crate::disorder::Coupling;
use crate::error::{invalid, Error, Result};
use crate::exec::Exec;
use crate::graph::{Graph, PlanarWindow};
use crate::spin::{energy, SpinConfig};

/// Largest vertex count accepted by the exhaustive scan.
pub const MAX_EXHAUSTIVE_VERTICES: usize = 30;
/// Energies this close to the minimum count as minimal.
pub const DEGENERACY_TOLERANCE: f64 = 1e-12;
const CANDIDATE_CAP: usize = 4096;
const CHUNK_BITS: u32 = 14;

/// All global energy minimizers of a finite graph, one per global-flip pair
/// (vertex 0 at +1).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GroundStateReport {
    pub notion: &'static str,
    pub energy: f64,
    /// Sorted by bitstring.
    pub minimizers: Vec<SpinConfig>,
    pub degenerate: bool,
    /// Unsatisfied edges of each minimizer.
    pub unsatisfied: Vec<Vec<usize>>,
    /// The minimizer list hit its cap; more exist.
    pub truncated: bool,
    pub scanned: u64,
}

impl GroundStateReport {
    pub fn unique(&self) -> bool {
        self.minimizers.len() == 1 && !self.truncated
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "notion": self.notion,
            "energy": self.energy,
            "minimizers": self.minimizers.iter().map(SpinConfig::bitstring).collect::<Vec<_>>(),
            "unsatisfied": self.unsatisfied,
            "degenerate": self.degenerate,
            "truncated": self.truncated,
            "scanned": self.scanned,
        })
    }
}

pub fn unsatisfied_edges(graph: &Graph, coupling: &Coupling, config: &SpinConfig) -> Vec<usize> {
    (0..graph.m())
        .filter(|&e| {
            let (u, v) = graph.edge(e);
            coupling.get(e) * f64::from(config[u] * config[v]) < 0.0
        })
        .collect()
}

struct ChunkResult {
    best: f64,
    candidates: Vec<(f64, u64)>,
    overflow: bool,
}

fn gray(i: u64) -> u64 {
    i ^ (i >> 1)
}

fn config_of(n: usize, g: u64) -> SpinConfig {
    // bit b of the Gray code set means vertex b+1 is -1
    SpinConfig((0..n).map(|v| if v > 0 && g >> (v - 1) & 1 == 1 { -1 } else { 1 }).collect())
}

/// Exhaustive minimisation over the `2^(n-1)` configurations with vertex 0 at +1.
///
/// The range is cut into Gray-code chunks scanned independently (in parallel
/// under `Exec::Parallel`) with incremental energies; near-minimal
/// candidates are then re-evaluated from scratch, so the result does not
/// depend on the chunking.
pub fn enumerate_ground_states(graph: &Graph, coupling: &Coupling, exec: Exec) -> Result<GroundStateReport> {
    coupling.check_len(graph)?;
    let n = graph.n();
    if n == 0 {
        return Err(invalid("empty graph"));
    }
    if n > MAX_EXHAUSTIVE_VERTICES {
        return Err(Error::Budget(format!("{n} vertices exceed the exhaustive limit of {MAX_EXHAUSTIVE_VERTICES}")));
    }
    let bits = (n - 1) as u32;
    let total: u64 = 1 << bits;
    let chunk_bits = bits.min(CHUNK_BITS);
    let chunks = (total >> chunk_bits) as usize;
    let j = coupling.values();
    let scale: f64 = j.iter().map(|x| x.abs()).sum::<f64>().max(1.0);
    let tol = 1e-9 * scale;
    let results = exec.map(chunks, |c| {
        let start = (c as u64) << chunk_bits;
        let end = start + (1u64 << chunk_bits);
        let mut config = config_of(n, gray(start));
        let mut e = energy(graph, j, &config);
        let mut r = ChunkResult { best: f64::INFINITY, candidates: Vec::new(), overflow: false };
        let mut i = start;
        loop {
            if e < r.best - tol {
                r.best = e;
                let best = r.best;
                r.candidates.retain(|&(x, _)| x <= best + tol);
            }
            if e <= r.best + tol {
                if r.candidates.len() < CANDIDATE_CAP {
                    r.candidates.push((e, gray(i)));
                } else {
                    r.overflow = true;
                }
            }
            i += 1;
            if i == end {
                break;
            }
            let v = i.trailing_zeros() as usize + 1;
            let s = f64::from(config[v]);
            let d: f64 = 2.0 * graph.neighbors(v).iter().map(|&(u, f)| j[f] * s * f64::from(config[u])).sum::<f64>();
            config[v] = -config[v];
            e += d;
        }
        r
    });
    let best = results.iter().map(|r| r.best).fold(f64::INFINITY, f64::min);
    let mut overflow = false;
    let mut exact: Vec<(f64, SpinConfig)> = Vec::new();
    for r in &results {
        overflow |= r.overflow && r.best <= best + tol;
        for &(x, g) in &r.candidates {
            if x <= best + tol {
                let c = config_of(n, g);
                exact.push((energy(graph, j, &c), c));
            }
        }
    }
    let min = exact.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let mut minimizers: Vec<SpinConfig> =
        exact.into_iter().filter(|(x, _)| (x - min).abs() <= DEGENERACY_TOLERANCE).map(|p| p.1).collect();
    minimizers.sort_by_key(SpinConfig::bitstring);
    minimizers.dedup();
    let unsatisfied = minimizers.iter().map(|m| unsatisfied_edges(graph, coupling, m)).collect();
    Ok(GroundStateReport {
        notion: "global-minimizer",
        energy: min,
        degenerate: minimizers.len() > 1 || overflow,
        minimizers,
        unsatisfied,
        truncated: overflow,
        scanned: total,
    })
}

/// Exhaustive scan of a small torus; also reports whether the minimizers are
/// exactly the two constant configurations.
pub fn check_torus_unique_gsp(window: &PlanarWindow, coupling: &Coupling, exec: Exec) -> Result<(GroundStateReport, bool)> {
    if !window.is_periodic() {
        return Err(invalid("torus check needs a periodic window"));
    }
    if window.graph().n() > 25 {
        return Err(Error::Budget("torus check is limited to 25 vertices".into()));
    }
    let report = enumerate_ground_states(window.graph(), coupling, exec)?;
    let mono = report.minimizers.len() == 1 && report.minimizers[0].is_uniform();
    Ok((report, mono))
}
