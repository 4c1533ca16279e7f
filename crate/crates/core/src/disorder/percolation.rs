use rand::Rng;
use serde::Serialize;

use crate::error::{invalid, Result};
use crate::graph::Graph;
use crate::rng::{stream_rng, Stream};

/// I.i.d. black/white site colouring.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PercColoring {
    pub black: Vec<bool>,
}

impl PercColoring {
    pub fn sample(n: usize, p: f64, seed: u64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(invalid(format!("open probability {p} outside [0,1]")));
        }
        let mut rng = stream_rng(seed, Stream::Coloring);
        Ok(PercColoring { black: (0..n).map(|_| rng.gen::<f64>() < p).collect() })
    }

    pub fn density(&self) -> f64 {
        self.black.iter().filter(|&&b| b).count() as f64 / self.black.len().max(1) as f64
    }
}

/// Vertices whose closed neighbourhood is strictly more black than white.
pub fn majority_recolor(graph: &Graph, coloring: &PercColoring) -> Vec<bool> {
    (0..graph.n())
        .map(|v| {
            let black = usize::from(coloring.black[v])
                + graph.neighbors(v).iter().filter(|&&(u, _)| coloring.black[u]).count();
            2 * black > graph.degree(v) + 1
        })
        .collect()
}

/// Sizes of the connected components of the subgraph induced by `member`, largest first.
pub fn cluster_sizes(graph: &Graph, member: impl Fn(usize) -> bool) -> Vec<usize> {
    let comps = graph.components_where(member);
    let mut sizes = vec![0usize; comps.iter().flatten().max().map_or(0, |m| m + 1)];
    for c in comps.into_iter().flatten() {
        sizes[c] += 1;
    }
    sizes.sort_unstable_by(|a, b| b.cmp(a));
    sizes
}
