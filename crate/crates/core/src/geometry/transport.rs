use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use super::forest::ForestView;
use crate::error::{invalid, Error, Result};
use crate::exec::Exec;

/// Nonnegative integer mass as a function of tree distance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum MassFn {
    /// 1 at distance exactly `k`.
    Exactly(usize),
    /// 1 at distances `1..=k`.
    AtMost(usize),
}

impl MassFn {
    pub fn value(self, k: usize) -> f64 {
        match self {
            MassFn::Exactly(j) => (k == j) as u8 as f64,
            MassFn::AtMost(j) => (k >= 1 && k <= j) as u8 as f64,
        }
    }
}

impl fmt::Display for MassFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MassFn::Exactly(k) => write!(f, "eq:{k}"),
            MassFn::AtMost(k) => write!(f, "le:{k}"),
        }
    }
}

impl FromStr for MassFn {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, k) = s.split_once(':').ok_or_else(|| invalid(format!("mass function `{s}` needs eq:K or le:K")))?;
        let k: usize = k.parse().map_err(|_| invalid(format!("bad distance in `{s}`")))?;
        match kind {
            "eq" => Ok(MassFn::Exactly(k)),
            "le" => Ok(MassFn::AtMost(k)),
            _ => Err(invalid(format!("unknown mass function `{kind}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MtEstimate {
    /// Mass each vertex sends up its stem.
    pub lhs: f64,
    /// Mean mass received from roots over the core.
    pub rhs: f64,
    pub core_size: usize,
}

/// Sent versus received mass for `f` of tree distance, truncated at
/// `margin`, averaged over vertices at least `margin` from the border.
pub fn mt_estimate(forest: &ForestView, f: MassFn, margin: usize) -> Result<MtEstimate> {
    let core: Vec<usize> = (0..forest.n()).filter(|&v| forest.depth_in(v) >= margin).collect();
    if core.is_empty() {
        return Err(invalid(format!("margin {margin} leaves no core in a {}x{} window", forest.width(), forest.height())));
    }
    let lhs = (1..=margin).map(|k| f.value(k)).sum();
    let received: f64 = core.iter().map(|&v| forest.roots(v, margin).iter().map(|&(_, d)| f.value(d)).sum::<f64>()).sum();
    Ok(MtEstimate { lhs, rhs: received / core.len() as f64, core_size: core.len() })
}

/// Child endpoints `v` of forest edges `(v, parent v)` inside the box of
/// ℓ∞ radius `n` around `center` that lie on an in-box tree path joining
/// two vertices of the box boundary (ℓ∞ distance exactly `n`).
pub fn boundary_path_edges(forest: &ForestView, center: (usize, usize), n: usize) -> Result<Vec<usize>> {
    let (cx, cy) = center;
    if cx < n || cy < n || cx + n >= forest.width() || cy + n >= forest.height() {
        return Err(invalid(format!("box of radius {n} around {center:?} leaves the window")));
    }
    let dist = |v: usize| {
        let (x, y) = forest.coords(v);
        x.abs_diff(cx).max(y.abs_diff(cy))
    };
    let parent_in_box = |v: usize| match forest.parent(v) {
        super::forest::Parent::Vertex(u) if dist(u) <= n => Some(u),
        _ => None,
    };
    let in_box: Vec<usize> =
        (cy - n..=cy + n).flat_map(|y| (cx - n..=cx + n).map(move |x| (x, y))).map(|(x, y)| forest.vertex(x, y)).collect();
    // top-down order of the in-box forest, then boundary counts per subtree
    let mut top = vec![usize::MAX; forest.n()];
    let mut order: Vec<usize> = in_box.iter().copied().filter(|&v| parent_in_box(v).is_none()).collect();
    for &v in &order {
        top[v] = v;
    }
    let mut i = 0;
    while i < order.len() {
        let v = order[i];
        for &c in forest.children(v) {
            if dist(c) <= n {
                top[c] = top[v];
                order.push(c);
            }
        }
        i += 1;
    }
    let mut sub = vec![0usize; forest.n()];
    for &v in order.iter().rev() {
        sub[v] += (dist(v) == n) as usize;
        if let Some(u) = parent_in_box(v) {
            sub[u] += sub[v];
        }
    }
    Ok(in_box
        .into_iter()
        .filter(|&v| parent_in_box(v).is_some() && sub[v] >= 1 && sub[top[v]] > sub[v])
        .collect())
}

pub fn count_boundary_path_edges(forest: &ForestView, center: (usize, usize), n: usize) -> Result<usize> {
    boundary_path_edges(forest, center, n).map(|e| e.len())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EnRow {
    pub n: usize,
    pub mean: f64,
    pub stderr: f64,
    pub seeds: usize,
}

/// Mean of `e_n / n` over directed forests on the smallest square window
/// holding the largest box, for each `n`.
pub fn estimate_en(p: f64, ns: &[usize], seeds: usize, seed: u64, exec: Exec) -> Result<Vec<EnRow>> {
    let big = *ns.iter().max().ok_or_else(|| invalid("no box sizes"))?;
    if seeds < 2 {
        return Err(invalid("need at least two seeds for a standard error"));
    }
    let side = 2 * big + 1;
    let per_seed: Vec<Result<Vec<f64>>> = exec.map(seeds, |i| {
        let f = ForestView::sample_directed(side, side, p, crate::rng::replica_seed(seed, i as u64))?;
        ns.iter().map(|&n| Ok(count_boundary_path_edges(&f, (big, big), n)? as f64 / n as f64)).collect()
    });
    let per_seed: Vec<Vec<f64>> = per_seed.into_iter().collect::<Result<_>>()?;
    Ok(ns
        .iter()
        .enumerate()
        .map(|(k, &n)| {
            let xs: Vec<f64> = per_seed.iter().map(|r| r[k]).collect();
            let mean = xs.iter().sum::<f64>() / xs.len() as f64;
            let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (xs.len() - 1) as f64;
            EnRow { n, mean, stderr: (var / xs.len() as f64).sqrt(), seeds }
        })
        .collect())
}

pub fn en_csv(rows: &[EnRow]) -> String {
    let mut s = String::from("n,value,stderr,seeds\n");
    for r in rows {
        s.push_str(&format!("{},{},{},{}\n", r.n, r.mean, r.stderr, r.seeds));
    }
    s
}
