use std::collections::VecDeque;

use petgraph::unionfind::UnionFind;
use rand::Rng;
use serde::Serialize;

use super::local::{for_each_connected_subset, verify_local_ground_state, LocalCheck};
use crate::disorder::Coupling;
use crate::error::{invalid, Result};
use crate::graph::{Graph, Label};
use crate::rng::{keyed_rng, Stream};
use crate::spin::{BoundaryCondition, Spin, SpinConfig};

fn leaves(tree: &Graph) -> Vec<bool> {
    (0..tree.n())
        .map(|v| matches!(tree.label(v), Label::Tree { leaf: true, .. }) || (tree.n() > 1 && tree.degree(v) == 1))
        .collect()
}

/// BFS parent edge of every vertex from vertex 0 (`usize::MAX` at the root), and BFS order.
fn rooted(tree: &Graph) -> (Vec<usize>, Vec<usize>) {
    let mut parent = vec![usize::MAX; tree.n()];
    let mut seen = vec![false; tree.n()];
    let mut order = Vec::with_capacity(tree.n());
    let mut q = VecDeque::from([0]);
    seen[0] = true;
    while let Some(v) = q.pop_front() {
        order.push(v);
        for &(u, e) in tree.neighbors(v) {
            if !seen[u] {
                seen[u] = true;
                parent[u] = e;
                q.push_back(u);
            }
        }
    }
    (parent, order)
}

/// Root +1, then each child set so that its parent edge is satisfied unless
/// `unsatisfied(e)`.
fn propagate(tree: &Graph, coupling: &Coupling, unsatisfied: impl Fn(usize) -> bool) -> SpinConfig {
    let (parent, order) = rooted(tree);
    let mut s = SpinConfig::uniform(tree.n(), 1);
    for &v in &order[1..] {
        let e = parent[v];
        let (a, b) = tree.edge(e);
        let p = if a == v { b } else { a };
        let sign: Spin = if coupling.get(e) >= 0.0 { 1 } else { -1 };
        s[v] = s[p] * sign * if unsatisfied(e) { -1 } else { 1 };
    }
    s
}

fn leaf_boundary(tree: &Graph, config: &SpinConfig) -> BoundaryCondition {
    let leaf = leaves(tree);
    BoundaryCondition::from_pairs(tree.n(), (0..tree.n()).filter(|&v| leaf[v]).map(|v| (v, config[v])))
}

/// A ground state on a tree ball with exactly one unsatisfied edge.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TreeFlip {
    pub config: SpinConfig,
    pub edge: usize,
    pub check: LocalCheck,
}

/// Look for a light edge (|J| < h, both ends internal) whose two sides each
/// stay connected to the leaves through heavy edges (|J| >= h). The
/// all-satisfied configuration with the far side of that edge flipped is
/// then checked at level `k` with the leaves pinned to its own values.
pub fn construct_tree_flip_gsp(tree: &Graph, coupling: &Coupling, h: f64, k: usize) -> Result<Option<TreeFlip>> {
    if !tree.is_tree() {
        return Err(invalid("input is not a tree"));
    }
    coupling.check_len(tree)?;
    if !(h > 0.0) {
        return Err(invalid("threshold must be positive"));
    }
    let leaf = leaves(tree);
    let mut uf = UnionFind::new(tree.n());
    for (e, &(a, b)) in tree.edges().iter().enumerate() {
        if coupling.get(e).abs() >= h {
            uf.union(a, b);
        }
    }
    let mut reaches = vec![false; tree.n()];
    for v in (0..tree.n()).filter(|&v| leaf[v]) {
        reaches[uf.find(v)] = true;
    }
    let (_, order) = rooted(tree);
    let mut depth_rank = vec![0; tree.n()];
    for (i, &v) in order.iter().enumerate() {
        depth_rank[v] = i;
    }
    let mut light: Vec<usize> = (0..tree.m())
        .filter(|&e| {
            let (a, b) = tree.edge(e);
            coupling.get(e).abs() < h && !leaf[a] && !leaf[b] && reaches[uf.find(a)] && reaches[uf.find(b)]
        })
        .collect();
    light.sort_by_key(|&e| {
        let (a, b) = tree.edge(e);
        depth_rank[a].max(depth_rank[b])
    });
    let Some(&edge) = light.first() else {
        return Ok(None);
    };
    let config = propagate(tree, coupling, |e| e == edge);
    let check = verify_local_ground_state(tree, coupling, &config, &leaf_boundary(tree, &config), k)?;
    Ok(Some(TreeFlip { config, edge, check }))
}

/// All-satisfied configuration of a tree (vertex 0 at +1).
pub fn all_satisfied(tree: &Graph, coupling: &Coupling) -> Result<SpinConfig> {
    if !tree.is_tree() {
        return Err(invalid("input is not a tree"));
    }
    Ok(propagate(tree, coupling, |_| false))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TreeGsp {
    pub config: SpinConfig,
    /// Light edges every small set around them outweighs.
    pub free_edges: Vec<usize>,
    /// Free edges the coins left unsatisfied.
    pub unsatisfied: Vec<usize>,
    pub check: LocalCheck,
}

/// Light edges `e` (|J_e| < ε) such that every connected set of at most `k`
/// internal vertices containing exactly one endpoint of `e` has boundary
/// edges with |J| >= ε strictly outnumbering and strictly outweighing its
/// light boundary edges.
pub fn free_edges(tree: &Graph, coupling: &Coupling, eps: f64, k: usize) -> Vec<usize> {
    let leaf = leaves(tree);
    let heavy = |e: usize| coupling.get(e).abs() >= eps;
    (0..tree.m())
        .filter(|&e| !heavy(e))
        .filter(|&e| {
            let (a, b) = tree.edge(e);
            [(a, b), (b, a)].into_iter().all(|(inside, outside)| {
                if leaf[inside] {
                    return true;
                }
                let allowed = |v: usize| !leaf[v] && v != outside;
                for_each_connected_subset(tree, inside, k, false, &allowed, &mut |set| {
                    let (mut nh, mut nl, mut wh, mut wl) = (0usize, 0usize, 0.0, 0.0);
                    for &v in set {
                        for &(u, f) in tree.neighbors(v) {
                            if !set.contains(&u) {
                                let j = coupling.get(f).abs();
                                if heavy(f) {
                                    nh += 1;
                                    wh += j;
                                } else {
                                    nl += 1;
                                    wl += j;
                                }
                            }
                        }
                    }
                    nh > nl && wh > wl
                })
            })
        })
        .collect()
}

/// Independent fair coin per free edge deciding whether it is satisfied;
/// every other edge satisfied.
pub fn sample_tree_invariant_gsp(tree: &Graph, coupling: &Coupling, eps: f64, seed: u64, k: usize) -> Result<TreeGsp> {
    if !tree.is_tree() {
        return Err(invalid("input is not a tree"));
    }
    coupling.check_len(tree)?;
    let free = free_edges(tree, coupling, eps, k);
    let unsatisfied: Vec<usize> =
        free.iter().copied().filter(|&e| keyed_rng(seed, Stream::Sampler, e as u64).gen::<bool>()).collect();
    let config = propagate(tree, coupling, |e| unsatisfied.binary_search(&e).is_ok());
    let check = verify_local_ground_state(tree, coupling, &config, &leaf_boundary(tree, &config), k)?;
    Ok(TreeGsp { config, free_edges: free, unsatisfied, check })
}
