//! Spin configurations, pinned boundaries and the EA energy.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::graph::Graph;

pub type Spin = i8;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SpinConfig(pub Vec<Spin>);

impl SpinConfig {
    pub fn uniform(n: usize, s: Spin) -> Self {
        SpinConfig(vec![s; n])
    }

    /// I.i.d. spins, +1 with probability `p_plus`.
    pub fn random<R: Rng>(n: usize, p_plus: f64, rng: &mut R) -> Self {
        SpinConfig((0..n).map(|_| if rng.gen::<f64>() < p_plus { 1 } else { -1 }).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn negated(&self) -> Self {
        SpinConfig(self.0.iter().map(|&s| -s).collect())
    }

    pub fn is_uniform(&self) -> bool {
        self.0.windows(2).all(|w| w[0] == w[1])
    }

    /// Pointwise order: every spin of `self` is at most the matching spin of `other`.
    pub fn le(&self, other: &SpinConfig) -> bool {
        self.0.len() == other.0.len() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// `1` for +1 and `0` for -1, vertex 0 first.
    pub fn bitstring(&self) -> String {
        self.0.iter().map(|&s| if s > 0 { '1' } else { '0' }).collect()
    }

    pub fn from_bitstring(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '1' | '+' => Ok(1),
                '0' | '-' => Ok(-1),
                other => Err(invalid(format!("bad spin character {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(SpinConfig)
    }
}

impl std::ops::Index<usize> for SpinConfig {
    type Output = Spin;
    fn index(&self, v: usize) -> &Spin {
        &self.0[v]
    }
}

impl std::ops::IndexMut<usize> for SpinConfig {
    fn index_mut(&mut self, v: usize) -> &mut Spin {
        &mut self.0[v]
    }
}

/// Pinned vertices and their values.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundaryCondition {
    pinned: Vec<Option<Spin>>,
}

impl BoundaryCondition {
    pub fn free(n: usize) -> Self {
        BoundaryCondition { pinned: vec![None; n] }
    }

    pub fn from_pairs(n: usize, pairs: impl IntoIterator<Item = (usize, Spin)>) -> Self {
        let mut bc = Self::free(n);
        for (v, s) in pairs {
            bc.pinned[v] = Some(s);
        }
        bc
    }

    pub fn pin(&mut self, v: usize, s: Spin) {
        self.pinned[v] = Some(s);
    }

    pub fn value(&self, v: usize) -> Option<Spin> {
        self.pinned.get(v).copied().flatten()
    }

    pub fn is_pinned(&self, v: usize) -> bool {
        self.value(v).is_some()
    }

    pub fn len(&self) -> usize {
        self.pinned.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pinned.is_empty()
    }

    pub fn pinned_vertices(&self) -> impl Iterator<Item = (usize, Spin)> + '_ {
        self.pinned.iter().enumerate().filter_map(|(v, s)| s.map(|s| (v, s)))
    }

    pub fn count(&self) -> usize {
        self.pinned.iter().filter(|s| s.is_some()).count()
    }

    /// Overwrite pinned entries of `config` with their boundary values.
    pub fn apply(&self, config: &mut SpinConfig) {
        for (v, s) in self.pinned_vertices() {
            config[v] = s;
        }
    }

    /// Pointwise order on the pinned values; both must pin the same set.
    pub fn le(&self, other: &BoundaryCondition) -> bool {
        self.pinned.len() == other.pinned.len()
            && self.pinned.iter().zip(&other.pinned).all(|(a, b)| match (a, b) {
                (None, None) => true,
                (Some(x), Some(y)) => x <= y,
                _ => false,
            })
    }
}

/// H = -sum_{xy} J_xy s_x s_y.
pub fn energy(graph: &Graph, couplings: &[f64], config: &SpinConfig) -> f64 {
    -graph
        .edges()
        .iter()
        .zip(couplings)
        .map(|(&(u, v), &j)| j * f64::from(config[u]) * f64::from(config[v]))
        .sum::<f64>()
}

/// Value J_xy s_x s_y of one edge; positive means satisfied.
pub fn edge_value(graph: &Graph, couplings: &[f64], config: &SpinConfig, e: usize) -> f64 {
    let (u, v) = graph.edge(e);
    couplings[e] * f64::from(config[u]) * f64::from(config[v])
}
