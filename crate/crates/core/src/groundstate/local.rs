use serde::Serialize;

use crate::disorder::Coupling;
use crate::error::{invalid, Error, Result};
use crate::graph::Graph;
use crate::spin::{BoundaryCondition, SpinConfig};

/// Subset budget for local verification.
pub const SUBSET_BUDGET: u64 = 10_000_000;

/// Visit every connected vertex set of size at most `k` that contains `root`
/// and only `allowed` vertices; with `root_is_min` only sets whose smallest
/// vertex is `root`. Each set is visited once (exclusive-neighbourhood growth).
/// The visitor returns `false` to stop.
pub fn for_each_connected_subset(
    graph: &Graph,
    root: usize,
    k: usize,
    root_is_min: bool,
    allowed: &dyn Fn(usize) -> bool,
    visit: &mut dyn FnMut(&[usize]) -> bool,
) -> bool {
    struct Ctx<'a> {
        graph: &'a Graph,
        root: usize,
        k: usize,
        root_is_min: bool,
        allowed: &'a dyn Fn(usize) -> bool,
        in_sub: Vec<bool>,
        touched: Vec<u32>,
        sub: Vec<usize>,
    }
    fn enter(ctx: &mut Ctx<'_>, w: usize) {
        ctx.in_sub[w] = true;
        ctx.sub.push(w);
        for &(u, _) in ctx.graph.neighbors(w) {
            ctx.touched[u] += 1;
        }
    }
    fn leave(ctx: &mut Ctx<'_>, w: usize) {
        ctx.in_sub[w] = false;
        ctx.sub.pop();
        for &(u, _) in ctx.graph.neighbors(w) {
            ctx.touched[u] -= 1;
        }
    }
    fn extend(ctx: &mut Ctx<'_>, mut ext: Vec<usize>, visit: &mut dyn FnMut(&[usize]) -> bool) -> bool {
        if !visit(&ctx.sub) {
            return false;
        }
        if ctx.sub.len() == ctx.k {
            return true;
        }
        while let Some(w) = ext.pop() {
            let mut next = ext.clone();
            for &(u, _) in ctx.graph.neighbors(w) {
                let fresh = !ctx.in_sub[u] && ctx.touched[u] == 0 && u != w;
                if fresh && (ctx.allowed)(u) && (!ctx.root_is_min || u > ctx.root) && !next.contains(&u) {
                    next.push(u);
                }
            }
            enter(ctx, w);
            let go = extend(ctx, next, visit);
            leave(ctx, w);
            if !go {
                return false;
            }
        }
        true
    }
    if k == 0 || !allowed(root) {
        return true;
    }
    let n = graph.n();
    let mut ctx = Ctx {
        graph,
        root,
        k,
        root_is_min,
        allowed,
        in_sub: vec![false; n],
        touched: vec![0; n],
        sub: Vec::with_capacity(k),
    };
    enter(&mut ctx, root);
    let mut ext = Vec::new();
    for &(u, _) in graph.neighbors(root) {
        if allowed(u) && (!root_is_min || u > root) && !ext.contains(&u) {
            ext.push(u);
        }
    }
    extend(&mut ctx, ext, visit)
}

/// `Σ J σσ` over edges with exactly one endpoint in `set`.
pub fn boundary_sum(graph: &Graph, coupling: &Coupling, config: &SpinConfig, set: &[usize]) -> f64 {
    let mut inside = vec![false; graph.n()];
    for &v in set {
        inside[v] = true;
    }
    set.iter()
        .flat_map(|&v| graph.neighbors(v).iter().map(move |&(u, e)| (v, u, e)))
        .filter(|&(_, u, _)| !inside[u])
        .map(|(v, u, e)| coupling.get(e) * f64::from(config[v] * config[u]))
        .sum()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "result", rename_all = "kebab-case")]
pub enum LocalCheck {
    Pass { subsets: u64 },
    /// A connected set whose flip would lower the energy.
    Witness { subset: Vec<usize>, boundary_sum: f64 },
}

impl LocalCheck {
    pub fn passed(&self) -> bool {
        matches!(self, LocalCheck::Pass { .. })
    }
}

/// Check that no connected set of at most `k` unpinned vertices can be
/// flipped to lower the energy. Singletons are tried first, so a single
/// flippable vertex is reported as itself.
pub fn verify_local_ground_state(
    graph: &Graph,
    coupling: &Coupling,
    config: &SpinConfig,
    bc: &BoundaryCondition,
    k: usize,
) -> Result<LocalCheck> {
    verify_with_budget(graph, coupling, config, bc, k, SUBSET_BUDGET)
}

pub fn verify_with_budget(
    graph: &Graph,
    coupling: &Coupling,
    config: &SpinConfig,
    bc: &BoundaryCondition,
    k: usize,
    budget: u64,
) -> Result<LocalCheck> {
    coupling.check_len(graph)?;
    if k == 0 {
        return Err(invalid("subset size bound must be at least 1"));
    }
    if config.len() != graph.n() {
        return Err(invalid("configuration does not match the graph"));
    }
    const STRICT: f64 = -1e-12;
    let free = |v: usize| !bc.is_pinned(v);
    for v in (0..graph.n()).filter(|&v| free(v)) {
        let s = boundary_sum(graph, coupling, config, &[v]);
        if s < STRICT {
            return Ok(LocalCheck::Witness { subset: vec![v], boundary_sum: s });
        }
    }
    let mut count = 0u64;
    let mut witness = None;
    let mut over = false;
    for root in (0..graph.n()).filter(|&v| free(v)) {
        let done = for_each_connected_subset(graph, root, k, true, &free, &mut |set| {
            count += 1;
            if count > budget {
                over = true;
                return false;
            }
            let s = boundary_sum(graph, coupling, config, set);
            if s < STRICT {
                let mut w = set.to_vec();
                w.sort_unstable();
                witness = Some((w, s));
                return false;
            }
            true
        });
        if over {
            return Err(Error::Budget(format!("more than {budget} connected subsets")));
        }
        if !done {
            break;
        }
    }
    Ok(match witness {
        Some((subset, boundary_sum)) => LocalCheck::Witness { subset, boundary_sum },
        None => LocalCheck::Pass { subsets: count },
    })
}
