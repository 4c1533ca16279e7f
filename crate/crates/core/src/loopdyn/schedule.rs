use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::graph::LoopType;

/// Exponent the per-edge decay sums are checked against: loops of length at
/// least `l` crossing any fixed edge must ring at total rate below `e^{-10 l}`.
pub const DECAY_EXPONENT: f64 = 10.0;

/// Decay sums at one length threshold, per edge direction.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecayCheck {
    pub length: usize,
    /// Horizontal edges first, then vertical.
    pub sums: [f64; 2],
    pub bound: f64,
}

/// Clock rates per loop type, constant on each congruence class.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FrequencySchedule {
    pub c: f64,
    pub max_length: usize,
    pub type_ids: Vec<String>,
    pub rates: Vec<f64>,
    /// Σ over types of (loops enclosing a vertex) · rate · span.
    pub well_definedness: f64,
    pub decay: Vec<DecayCheck>,
}

impl FrequencySchedule {
    /// Default rates `e^{-c l} / (n · S · k_l)`: `n` loops of the type enclose
    /// a given vertex, `S` is its span and `k_l` the number of types of length
    /// `l`, so the well-definedness sum is `Σ_l e^{-c l}`.
    pub fn new(types: &[LoopType], c: f64) -> Result<Self> {
        if types.is_empty() {
            return Err(invalid("no loop types"));
        }
        if !(c > 0.0 && c.is_finite()) {
            return Err(invalid("decay constant must be positive"));
        }
        let mut per_length: BTreeMap<usize, usize> = BTreeMap::new();
        for t in types {
            *per_length.entry(t.length).or_default() += 1;
        }
        let rates = types
            .iter()
            .map(|t| (-c * t.length as f64).exp() / (t.origin_count * t.span * per_length[&t.length]) as f64)
            .collect();
        Self::custom(types, rates, c)
    }

    /// Any rates constant on types; both summability checks are run.
    pub fn custom(types: &[LoopType], rates: Vec<f64>, c: f64) -> Result<Self> {
        if rates.len() != types.len() || rates.iter().any(|&f| !(f >= 0.0 && f.is_finite())) {
            return Err(invalid("one finite nonnegative rate per type is required"));
        }
        let max_length = types.iter().map(|t| t.length).max().unwrap_or(0);
        let well_definedness: f64 =
            types.iter().zip(&rates).map(|(t, &f)| t.origin_count as f64 * f * t.span as f64).sum();
        if !well_definedness.is_finite() {
            return Err(invalid("well-definedness sum diverges"));
        }
        let mut decay = Vec::new();
        for l in 1..=max_length + 1 {
            let mut sums = [0.0; 2];
            for (t, &f) in types.iter().zip(&rates) {
                if t.length >= l {
                    sums[0] += t.edge_crossings[0] as f64 * f;
                    sums[1] += t.edge_crossings[1] as f64 * f;
                }
            }
            let bound = (-DECAY_EXPONENT * l as f64).exp();
            for (d, name) in [(0, "horizontal"), (1, "vertical")] {
                if sums[d] >= bound {
                    return Err(Error::ScheduleRejected { length: l, direction: name, sum: sums[d], bound });
                }
            }
            decay.push(DecayCheck { length: l, sums, bound });
        }
        Ok(FrequencySchedule {
            c,
            max_length,
            type_ids: types.iter().map(LoopType::id).collect(),
            rates,
            well_definedness,
            decay,
        })
    }

    pub fn rate(&self, t: usize) -> f64 {
        self.rates[t]
    }

    /// Rate of the unit plaquette type, the fastest clock under the default rule.
    pub fn max_rate(&self) -> f64 {
        self.rates.iter().copied().fold(0.0, f64::max)
    }
}
