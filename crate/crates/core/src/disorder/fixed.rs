use std::collections::VecDeque;

use petgraph::unionfind::UnionFind;
use serde::Serialize;

use super::{sample_couplings, Coupling, Descriptor};
use crate::error::{invalid, Result};
use crate::exec::Exec;
use crate::graph::Graph;
use crate::rng::replica_seed;

/// Subsets up to this size are searched over every spanning tree and root.
pub const EXHAUSTIVE_TREE_LIMIT: usize = 8;

/// |J_xy| beats the summed |J| of the other edges at x, or at y. Ties are not fixed.
pub fn is_fixed_edge(graph: &Graph, coupling: &Coupling, e: usize) -> bool {
    let (x, y) = graph.edge(e);
    let j = coupling.get(e).abs();
    let others = |v: usize| -> f64 {
        graph.neighbors(v).iter().filter(|&&(_, f)| f != e).map(|&(_, f)| coupling.get(f).abs()).sum()
    };
    j > others(x) || j > others(y)
}

/// A spanning tree of a vertex subset whose edges dominate everything else
/// touching the subset, with a compatible elimination order.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FixedTree {
    /// Tree edges (graph edge ids), sorted.
    pub edges: Vec<usize>,
    /// Vertices leaves-first; each has at most one tree neighbour later in the order.
    pub order: Vec<usize>,
    /// False when the subset was too large for an exhaustive search and only
    /// the heaviest spanning tree was tried.
    pub exhaustive: bool,
}

/// Check one tree rooted at `root`: every non-root vertex's edge towards the
/// root must exceed the summed |J| of all non-tree edges touching the subset
/// plus the vertex's other tree edges. Returns the leaves-first order on success.
pub fn fixed_tree_criterion(
    graph: &Graph,
    coupling: &Coupling,
    subset: &[usize],
    tree: &[usize],
    root: usize,
) -> Option<Vec<usize>> {
    let inside = |v: usize| subset.contains(&v);
    let in_tree = |e: usize| tree.contains(&e);
    let outside: f64 = (0..graph.m())
        .filter(|&e| {
            let (a, b) = graph.edge(e);
            (inside(a) || inside(b)) && !in_tree(e)
        })
        .map(|e| coupling.get(e).abs())
        .sum();
    let mut parent_edge = vec![usize::MAX; graph.n()];
    let mut seen = vec![false; graph.n()];
    let mut bfs = Vec::with_capacity(subset.len());
    let mut queue = VecDeque::from([root]);
    seen[root] = true;
    while let Some(v) = queue.pop_front() {
        bfs.push(v);
        for &(u, e) in graph.neighbors(v) {
            if in_tree(e) && !seen[u] {
                seen[u] = true;
                parent_edge[u] = e;
                queue.push_back(u);
            }
        }
    }
    if bfs.len() != subset.len() {
        return None;
    }
    for &v in &bfs[1..] {
        let up = parent_edge[v];
        let rest: f64 = graph
            .neighbors(v)
            .iter()
            .filter(|&&(_, e)| e != up && in_tree(e))
            .map(|&(_, e)| coupling.get(e).abs())
            .sum();
        if coupling.get(up).abs() <= outside + rest {
            return None;
        }
    }
    bfs.reverse();
    Some(bfs)
}

fn induced_edges(graph: &Graph, subset: &[usize]) -> Vec<usize> {
    (0..graph.m())
        .filter(|&e| {
            let (a, b) = graph.edge(e);
            subset.contains(&a) && subset.contains(&b)
        })
        .collect()
}

fn spanning_trees(graph: &Graph, subset: &[usize], edges: &[usize]) -> Vec<Vec<usize>> {
    fn rec(
        graph: &Graph,
        edges: &[usize],
        i: usize,
        need: usize,
        chosen: &mut Vec<usize>,
        uf: &UnionFind<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if chosen.len() == need {
            out.push(chosen.clone());
            return;
        }
        if edges.len() - i < need - chosen.len() {
            return;
        }
        let e = edges[i];
        let (a, b) = graph.edge(e);
        if !uf.equiv(a, b) {
            let mut with = uf.clone();
            with.union(a, b);
            chosen.push(e);
            rec(graph, edges, i + 1, need, chosen, &with, out);
            chosen.pop();
        }
        rec(graph, edges, i + 1, need, chosen, uf, out);
    }
    let mut out = Vec::new();
    let uf = UnionFind::new(graph.n());
    rec(graph, edges, 0, subset.len() - 1, &mut Vec::new(), &uf, &mut out);
    out
}

/// Search for a fixed spanning tree of `subset`.
///
/// Subsets of at most [`EXHAUSTIVE_TREE_LIMIT`] vertices try every spanning
/// tree and every root. Larger subsets try only the maximum-|J| spanning tree
/// (with every root) and mark the result as not exhaustive: absence then
/// proves nothing.
pub fn find_fixed_spanning_tree(graph: &Graph, coupling: &Coupling, subset: &[usize]) -> Result<Option<FixedTree>> {
    coupling.check_len(graph)?;
    let mut subset = subset.to_vec();
    subset.sort_unstable();
    subset.dedup();
    if subset.is_empty() || subset.iter().any(|&v| v >= graph.n()) {
        return Err(invalid("subset must be nonempty and inside the graph"));
    }
    let comps = graph.components_where(|v| subset.binary_search(&v).is_ok());
    if subset.iter().any(|&v| comps[v] != Some(0)) {
        return Err(invalid("subset does not induce a connected subgraph"));
    }
    if subset.len() == 1 {
        return Ok(Some(FixedTree { edges: Vec::new(), order: subset, exhaustive: true }));
    }
    let edges = induced_edges(graph, &subset);
    let exhaustive = subset.len() <= EXHAUSTIVE_TREE_LIMIT;
    let trees = if exhaustive {
        spanning_trees(graph, &subset, &edges)
    } else {
        let mut by_weight = edges.clone();
        by_weight.sort_by(|&a, &b| coupling.get(b).abs().total_cmp(&coupling.get(a).abs()).then(a.cmp(&b)));
        let mut uf = UnionFind::new(graph.n());
        let tree: Vec<usize> = by_weight
            .into_iter()
            .filter(|&e| {
                let (a, b) = graph.edge(e);
                uf.union(a, b)
            })
            .collect();
        vec![tree]
    };
    for mut tree in trees {
        tree.sort_unstable();
        for &root in &subset {
            if let Some(order) = fixed_tree_criterion(graph, coupling, &subset, &tree, root) {
                return Ok(Some(FixedTree { edges: tree, order, exhaustive }));
            }
        }
    }
    Ok(None)
}

/// Monte Carlo frequency of a fixed spanning tree on `subset` under fresh
/// couplings. Returns (estimate, standard error).
pub fn estimate_fixed_slice_probability(
    graph: &Graph,
    subset: &[usize],
    descriptor: Descriptor,
    trials: usize,
    seed: u64,
    exec: Exec,
) -> Result<(f64, f64)> {
    if trials == 0 {
        return Err(invalid("trials must be positive"));
    }
    let hits = exec.map(trials, |t| -> Result<bool> {
        let c = sample_couplings(graph, descriptor, replica_seed(seed, t as u64))?;
        Ok(find_fixed_spanning_tree(graph, &c, subset)?.is_some())
    });
    let mut k = 0usize;
    for h in hits {
        k += usize::from(h?);
    }
    let p = k as f64 / trials as f64;
    Ok((p, (p * (1.0 - p) / trials as f64).sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Boundary, PlanarWindow};
    use proptest::prelude::*;

    fn star() -> Graph {
        Graph::from_edges(5, &[(0, 1), (0, 2), (0, 3), (0, 4)], "star").unwrap()
    }

    #[test]
    fn heavy_star_edge_is_fixed() {
        let c = Coupling::explicit(vec![10.0, 1.0, 1.0, -1.0]);
        assert!(is_fixed_edge(&star(), &c, 0));
        assert!(is_fixed_edge(&star(), &c, 1)); // leaf side: nothing else at vertex 2
    }

    #[test]
    fn uniform_grid_interior_edge_is_not_fixed() {
        let w = PlanarWindow::new(5, 5, Boundary::Free).unwrap();
        let g = w.graph();
        let c = Coupling::constant(g);
        let e = g.edge_between(w.vertex(2, 2), w.vertex(3, 2)).unwrap();
        assert!(!is_fixed_edge(g, &c, e));
    }

    #[test]
    fn two_vertex_slice_with_dominant_edge() {
        let g = Graph::cylinder(&Graph::path(2), -1, 1).unwrap();
        let slice = g.slice(0);
        let inner = g.edge_between(slice[0], slice[1]).unwrap();
        let mut j = vec![0.01; g.m()];
        j[inner] = 5.0;
        let tree = find_fixed_spanning_tree(&g, &Coupling::explicit(j), &slice).unwrap().unwrap();
        assert_eq!(tree.edges, vec![inner]);
        assert!(tree.exhaustive);
    }

    #[test]
    fn equal_couplings_give_no_tree() {
        let g = Graph::cylinder(&Graph::complete(3), -1, 1).unwrap();
        assert!(find_fixed_spanning_tree(&g, &Coupling::constant(&g), &g.slice(0)).unwrap().is_none());
    }

    #[test]
    fn disconnected_subset_rejected() {
        let g = Graph::path(5);
        assert!(find_fixed_spanning_tree(&g, &Coupling::constant(&g), &[0, 2]).is_err());
    }

    #[test]
    fn tree_order_has_one_later_neighbour() {
        let g = Graph::path(4);
        let c = Coupling::explicit(vec![9.0, 100.0, 9.0]);
        let t = find_fixed_spanning_tree(&g, &c, &[0, 1, 2, 3]).unwrap().unwrap();
        for (i, &v) in t.order.iter().enumerate() {
            let later = t.order[i + 1..]
                .iter()
                .filter(|&&u| g.edge_between(u, v).is_some_and(|e| t.edges.contains(&e)))
                .count();
            assert!(later <= 1);
        }
    }

    proptest! {
        #[test]
        fn fixedness_is_monotone_in_own_coupling(seed in 0u64..500, e in 0usize..24, scale in 1.0f64..10.0) {
            let w = PlanarWindow::new(4, 4, Boundary::Free).unwrap();
            let g = w.graph();
            let c = sample_couplings(g, Descriptor::Gaussian { sd: 1.0 }, seed).unwrap();
            let e = e % g.m();
            let bigger = c.with_value(e, c.get(e) * scale);
            prop_assert!(!is_fixed_edge(g, &c, e) || is_fixed_edge(g, &bigger, e));
        }
    }
}
