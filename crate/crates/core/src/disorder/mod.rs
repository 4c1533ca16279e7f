//! Random couplings and the structures they force: fixed edges, fixed
//! spanning trees of slices, choking cycles, and site-percolation helpers.

mod choking;
mod fixed;
mod percolation;

pub use choking::{cycle_edges, estimate_fixed_cycle_probability, find_choking_cycle, ChokingCycle};
pub use fixed::{
    estimate_fixed_slice_probability, find_fixed_spanning_tree, fixed_tree_criterion, is_fixed_edge, FixedTree,
    EXHAUSTIVE_TREE_LIMIT,
};
pub use percolation::{cluster_sizes, majority_recolor, PercColoring};

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Distribution, Exp, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, parse_err, Error, Result};
use crate::graph::Graph;
use crate::rng::{splitmix64, stream_rng, Stream};

/// Law of a coupling supported on the positive half-line.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum PositiveLaw {
    Exponential { mean: f64 },
    HalfGaussian { sd: f64 },
    Uniform { low: f64, high: f64 },
}

/// How the per-edge couplings were generated.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Descriptor {
    Gaussian { sd: f64 },
    UniformSymmetric { half_width: f64 },
    Constant,
    Positive(PositiveLaw),
    /// Values supplied by hand or read from a file with no generating law.
    Explicit,
}

impl Descriptor {
    /// Continuous laws: ties between sums are null events, so exact zeros in
    /// energy differences indicate a degenerate instance.
    pub fn is_continuous(&self) -> bool {
        matches!(self, Descriptor::Gaussian { .. } | Descriptor::UniformSymmetric { .. } | Descriptor::Positive(_))
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            Descriptor::Gaussian { sd } => sd > 0.0 && sd.is_finite(),
            Descriptor::UniformSymmetric { half_width } => half_width > 0.0 && half_width.is_finite(),
            Descriptor::Positive(PositiveLaw::Exponential { mean }) => mean > 0.0 && mean.is_finite(),
            Descriptor::Positive(PositiveLaw::HalfGaussian { sd }) => sd > 0.0 && sd.is_finite(),
            Descriptor::Positive(PositiveLaw::Uniform { low, high }) => 0.0 <= low && low < high && high.is_finite(),
            Descriptor::Constant | Descriptor::Explicit => true,
        };
        if ok {
            Ok(())
        } else {
            Err(invalid(format!("bad coupling parameters in {self}")))
        }
    }

    fn draw<R: Rng>(&self, rng: &mut R) -> f64 {
        match *self {
            Descriptor::Gaussian { sd } => Normal::new(0.0, sd).expect("validated").sample(rng),
            Descriptor::UniformSymmetric { half_width } => rng.gen_range(-half_width..half_width),
            Descriptor::Positive(PositiveLaw::Exponential { mean }) => Exp::new(1.0 / mean).expect("validated").sample(rng),
            Descriptor::Positive(PositiveLaw::HalfGaussian { sd }) => {
                Normal::new(0.0, sd).expect("validated").sample(rng).abs()
            }
            Descriptor::Positive(PositiveLaw::Uniform { low, high }) => rng.gen_range(low..high),
            Descriptor::Constant | Descriptor::Explicit => 1.0,
        }
    }
}

impl fmt::Display for Descriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Descriptor::Gaussian { sd } => write!(f, "gaussian:{sd}"),
            Descriptor::UniformSymmetric { half_width } => write!(f, "uniform:{half_width}"),
            Descriptor::Constant => write!(f, "constant"),
            Descriptor::Positive(PositiveLaw::Exponential { mean }) => write!(f, "exponential:{mean}"),
            Descriptor::Positive(PositiveLaw::HalfGaussian { sd }) => write!(f, "half-gaussian:{sd}"),
            Descriptor::Positive(PositiveLaw::Uniform { low, high }) => write!(f, "positive-uniform:{low}:{high}"),
            Descriptor::Explicit => write!(f, "explicit"),
        }
    }
}

impl FromStr for Descriptor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        let num = |i: usize| -> Result<f64> {
            parts
                .get(i)
                .ok_or_else(|| invalid(format!("descriptor {s:?} is missing a parameter")))?
                .parse::<f64>()
                .map_err(|e| invalid(format!("descriptor {s:?}: {e}")))
        };
        let d = match parts[0] {
            "gaussian" if parts.len() == 1 => Descriptor::Gaussian { sd: 1.0 },
            "gaussian" => Descriptor::Gaussian { sd: num(1)? },
            "uniform" => Descriptor::UniformSymmetric { half_width: num(1)? },
            "constant" => Descriptor::Constant,
            "exponential" => Descriptor::Positive(PositiveLaw::Exponential { mean: num(1)? }),
            "half-gaussian" => Descriptor::Positive(PositiveLaw::HalfGaussian { sd: num(1)? }),
            "positive-uniform" => Descriptor::Positive(PositiveLaw::Uniform { low: num(1)?, high: num(2)? }),
            "explicit" => Descriptor::Explicit,
            other => return Err(invalid(format!("unknown coupling law {other:?}"))),
        };
        let expected = match d {
            Descriptor::Gaussian { .. } => parts.len() <= 2,
            Descriptor::Positive(PositiveLaw::Uniform { .. }) => parts.len() == 3,
            Descriptor::Constant | Descriptor::Explicit => parts.len() == 1,
            _ => parts.len() == 2,
        };
        if !expected {
            return Err(invalid(format!("descriptor {s:?} has the wrong number of parameters")));
        }
        d.validate()?;
        Ok(d)
    }
}

/// Per-edge interaction strengths, indexed like `Graph::edges`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Coupling {
    values: Vec<f64>,
    descriptor: Descriptor,
    seed: u64,
    /// Draws discarded because of a repeated or zero value.
    resamples: u32,
}

/// Sample one coupling per edge, in edge order.
///
/// Continuous laws must give pairwise distinct nonzero values; a sample that
/// does not is discarded and redrawn from a fresh sub-seed.
pub fn sample_couplings(graph: &Graph, descriptor: Descriptor, seed: u64) -> Result<Coupling> {
    descriptor.validate()?;
    if !descriptor.is_continuous() {
        return Ok(Coupling { values: vec![1.0; graph.m()], descriptor, seed, resamples: 0 });
    }
    for attempt in 0..64u32 {
        let sub = if attempt == 0 { seed } else { splitmix64(seed ^ u64::from(attempt)) };
        let mut rng = stream_rng(sub, Stream::Couplings);
        let values: Vec<f64> = (0..graph.m()).map(|_| descriptor.draw(&mut rng)).collect();
        if generic(&values) {
            return Ok(Coupling { values, descriptor, seed, resamples: attempt });
        }
    }
    Err(Error::Degenerate(format!("could not draw distinct nonzero couplings from {descriptor}")))
}

fn generic(values: &[f64]) -> bool {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    values.iter().all(|&v| v != 0.0) && sorted.windows(2).all(|w| w[0] != w[1])
}

impl Coupling {
    pub fn constant(graph: &Graph) -> Self {
        Coupling { values: vec![1.0; graph.m()], descriptor: Descriptor::Constant, seed: 0, resamples: 0 }
    }

    pub fn explicit(values: Vec<f64>) -> Self {
        Coupling { values, descriptor: Descriptor::Explicit, seed: 0, resamples: 0 }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, e: usize) -> f64 {
        self.values[e]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn descriptor(&self) -> Descriptor {
        self.descriptor
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn resamples(&self) -> u32 {
        self.resamples
    }

    /// Same law and seed, one edge changed. Used for perturbation replays.
    pub fn with_value(&self, e: usize, value: f64) -> Self {
        let mut c = self.clone();
        c.values[e] = value;
        c
    }

    pub fn with_values(&self, values: Vec<f64>) -> Self {
        Coupling { values, ..self.clone() }
    }

    /// Exact-zero comparisons are meaningful (integer-valued couplings).
    pub fn ties_possible(&self) -> bool {
        !self.descriptor.is_continuous()
    }

    pub(crate) fn check_len(&self, graph: &Graph) -> Result<()> {
        if self.values.len() == graph.m() {
            Ok(())
        } else {
            Err(invalid(format!("coupling has {} values for {} edges", self.values.len(), graph.m())))
        }
    }

    /// `coupling <law> seed <seed>` header, then `u v J` per edge.
    pub fn write(&self, graph: &Graph) -> String {
        let mut out = format!("coupling {} seed {}\n", self.descriptor, self.seed);
        for (&(u, v), j) in graph.edges().iter().zip(&self.values) {
            out.push_str(&format!("{u} {v} {j:?}\n"));
        }
        out
    }

    pub fn read(graph: &Graph, text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'));
        let (hl, header) = lines.next().ok_or_else(|| parse_err(1, "empty coupling file"))?;
        let h: Vec<&str> = header.split_whitespace().collect();
        if h.len() != 4 || h[0] != "coupling" || h[2] != "seed" {
            return Err(parse_err(hl + 1, "expected `coupling <law> seed <n>`"));
        }
        let descriptor: Descriptor = h[1].parse().map_err(|e: Error| parse_err(hl + 1, e))?;
        let seed: u64 = h[3].parse().map_err(|e| parse_err(hl + 1, e))?;
        let mut values = Vec::with_capacity(graph.m());
        for (i, line) in lines {
            let f: Vec<&str> = line.split_whitespace().collect();
            if f.len() != 3 {
                return Err(parse_err(i + 1, "expected `u v J`"));
            }
            let u: usize = f[0].parse().map_err(|e| parse_err(i + 1, e))?;
            let v: usize = f[1].parse().map_err(|e| parse_err(i + 1, e))?;
            let j: f64 = f[2].parse().map_err(|e| parse_err(i + 1, e))?;
            let e = values.len();
            if e >= graph.m() || graph.edge(e) != (u.min(v), u.max(v)) {
                return Err(parse_err(i + 1, format!("edge ({u},{v}) out of order or not in the graph")));
            }
            values.push(j);
        }
        if values.len() != graph.m() {
            return Err(parse_err(0, format!("{} couplings for {} edges", values.len(), graph.m())));
        }
        Ok(Coupling { values, descriptor, seed, resamples: 0 })
    }
}
