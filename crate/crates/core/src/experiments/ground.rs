use serde_json::json;

use super::{Bundle, ExperimentConfig};
use crate::disorder::{cluster_sizes, is_fixed_edge, majority_recolor, sample_couplings, Coupling, Descriptor, PercColoring};
use crate::error::Result;
use crate::exec::Exec;
use crate::graph::{Boundary, Graph, PlanarWindow};
use crate::groundstate::{
    check_torus_unique_gsp, construct_tree_flip_gsp, enumerate_ground_states, plaquette_frustration_check,
    sample_tree_invariant_gsp, unsatisfied_edges, unsatisfied_subgraph,
};
use crate::rng::replica_seed;

/// Exhaustive minimiser of one free window instance, then its unsatisfied
/// dual set and frustrated faces. Returns (forest, unique, faces covered).
pub fn unsat_forest_instance(window: &PlanarWindow, coupling: &Coupling, exec: Exec) -> Result<(bool, bool, bool)> {
    let g = window.graph();
    let report = enumerate_ground_states(g, coupling, exec)?;
    let best = &report.minimizers[0];
    let forest = unsatisfied_subgraph(window, coupling, best).forest;
    let unsat = unsatisfied_edges(g, coupling, best);
    let covered = plaquette_frustration_check(window, coupling)
        .frustrated
        .iter()
        .all(|&f| window.face_edges(f).iter().any(|e| unsat.contains(e)));
    Ok((forest, report.unique(), covered))
}

pub(crate) fn unsat_forest(cfg: &ExperimentConfig, exec: Exec) -> Result<Bundle> {
    let replicas: usize = cfg.get("run.replicas", 100)?;
    let width: usize = cfg.get("graph.width", 4)?;
    let height: usize = cfg.get("graph.height", width)?;
    let law: Descriptor = cfg.get("coupling.law", Descriptor::Gaussian { sd: 1.0 })?;
    let seed = cfg.seed()?;
    let w = PlanarWindow::new(width, height, Boundary::Free)?;
    let mut rows = Vec::new();
    for r in 0..replicas {
        let c = sample_couplings(w.graph(), law, replica_seed(seed, r as u64))?;
        rows.push(unsat_forest_instance(&w, &c, exec)?);
    }
    let count = |f: fn(&(bool, bool, bool)) -> bool| rows.iter().filter(|r| f(r)).count();
    let (forests, unique, covered) = (count(|r| r.0), count(|r| r.1), count(|r| r.2));
    let mut csv = String::from("instance,forest,unique,frustrated_faces_covered\n");
    for (i, r) in rows.iter().enumerate() {
        csv += &format!("{i},{},{},{}\n", r.0, r.1, r.2);
    }
    let passed = forests == replicas && unique == replicas && covered == replicas;
    let summary = json!({
        "instances": replicas, "window": [width, height], "law": law.to_string(),
        "forests": forests, "unique_minimizers": unique, "frustrated_faces_covered": covered,
    });
    Ok(Bundle::new("unsat-forest", passed, summary).with_file("instances.csv", csv))
}

/// Number of (fixed edge, minimiser) pairs in which the fixed edge is unsatisfied.
pub fn fixed_edge_violations(graph: &Graph, coupling: &Coupling, exec: Exec) -> Result<(usize, usize)> {
    let report = enumerate_ground_states(graph, coupling, exec)?;
    let fixed: Vec<usize> = (0..graph.m()).filter(|&e| is_fixed_edge(graph, coupling, e)).collect();
    let bad = report.unsatisfied.iter().map(|u| fixed.iter().filter(|e| u.contains(e)).count()).sum();
    Ok((fixed.len(), bad))
}

pub(crate) fn fixed_edges(cfg: &ExperimentConfig, exec: Exec) -> Result<Bundle> {
    let replicas: usize = cfg.get("run.replicas", 100)?;
    let width: usize = cfg.get("graph.width", 3)?;
    let height: usize = cfg.get("graph.height", width)?;
    let law: Descriptor = cfg.get("coupling.law", Descriptor::Gaussian { sd: 1.0 })?;
    let seed = cfg.seed()?;
    let w = PlanarWindow::new(width, height, Boundary::Free)?;
    let mut csv = String::from("instance,fixed_edges,violations\n");
    let (mut total_fixed, mut total_bad) = (0, 0);
    for r in 0..replicas {
        let c = sample_couplings(w.graph(), law, replica_seed(seed, r as u64))?;
        let (f, bad) = fixed_edge_violations(w.graph(), &c, exec)?;
        total_fixed += f;
        total_bad += bad;
        csv += &format!("{r},{f},{bad}\n");
    }
    let summary = json!({ "instances": replicas, "fixed_edges": total_fixed, "violations": total_bad });
    Ok(Bundle::new("fixed-edges", total_bad == 0, summary).with_file("instances.csv", csv))
}

pub(crate) fn torus_uniform(_cfg: &ExperimentConfig, exec: Exec) -> Result<Bundle> {
    let mut rows = Vec::new();
    let mut passed = true;
    for (k, expected) in [(3usize, -18.0), (4, -32.0)] {
        let w = PlanarWindow::new(k, k, Boundary::Periodic)?;
        let (report, mono) = check_torus_unique_gsp(&w, &Coupling::constant(w.graph()), exec)?;
        passed &= mono && report.energy == expected;
        rows.push(json!({ "side": k, "energy": report.energy, "expected": expected, "monochromatic_pair_only": mono }));
    }
    Ok(Bundle::new("torus-uniform", passed, json!({ "tori": rows })))
}

fn abs_quantile(c: &Coupling, q: f64) -> f64 {
    let mut v: Vec<f64> = c.values().iter().map(|x| x.abs()).collect();
    v.sort_by(f64::total_cmp);
    v[((v.len() - 1) as f64 * q) as usize]
}

/// Both tree constructions on Gaussian couplings: a flipped light edge, and
/// coin-chosen free edges. Every produced state is checked locally.
pub(crate) fn tree_gsp(cfg: &ExperimentConfig, _exec: Exec) -> Result<Bundle> {
    let replicas: usize = cfg.get("run.replicas", 20)?;
    let depth: u32 = cfg.get("graph.depth", 6)?;
    let k: usize = cfg.get("dynamics.k", 6)?;
    let seed = cfg.seed()?;
    let t = Graph::regular_tree(3, depth)?;
    let (mut flips, mut flips_ok, mut free, mut sampled_ok) = (0, 0, 0, 0);
    let mut csv = String::from("instance,flip_edge,flip_verified,free_edges,unsatisfied,sample_verified\n");
    for r in 0..replicas {
        let s = replica_seed(seed, r as u64);
        let c = sample_couplings(&t, Descriptor::Gaussian { sd: 1.0 }, s)?;
        let eps = abs_quantile(&c, 0.05);
        let flip = construct_tree_flip_gsp(&t, &c, eps, k)?;
        let sample = sample_tree_invariant_gsp(&t, &c, eps, s, k)?;
        if let Some(f) = &flip {
            flips += 1;
            flips_ok += usize::from(f.check.passed());
        }
        free += sample.free_edges.len();
        sampled_ok += usize::from(sample.check.passed());
        csv += &format!(
            "{r},{},{},{},{},{}\n",
            flip.as_ref().map_or(String::new(), |f| f.edge.to_string()),
            flip.as_ref().map_or(false, |f| f.check.passed()),
            sample.free_edges.len(),
            sample.unsatisfied.len(),
            sample.check.passed()
        );
    }
    let passed = flips_ok == flips && sampled_ok == replicas && flips > 0;
    let summary = json!({
        "instances": replicas, "depth": depth, "k": k, "flip_states": flips, "flip_states_verified": flips_ok,
        "free_edges": free, "samples_verified": sampled_ok,
    });
    Ok(Bundle::new("tree-gsp", passed, summary).with_file("instances.csv", csv))
}

/// Largest cluster outside the majority-recoloured set, over many colourings.
pub const MAJORITY_CLUSTER_CAP: usize = 50;

pub(crate) fn majority_percolation(cfg: &ExperimentConfig, exec: Exec) -> Result<Bundle> {
    let replicas: usize = cfg.get("run.replicas", 100)?;
    let depth: u32 = cfg.get("graph.depth", 10)?;
    let p: f64 = cfg.get("coupling.p", 0.99)?;
    let seed = cfg.seed()?;
    let g = Graph::regular_tree(4, depth)?;
    let worst = exec.map(replicas, |r| -> Result<usize> {
        let c = PercColoring::sample(g.n(), p, replica_seed(seed, r as u64))?;
        let red = majority_recolor(&g, &c);
        Ok(cluster_sizes(&g, |v| !red[v]).into_iter().max().unwrap_or(0))
    });
    let worst = worst.into_iter().collect::<Result<Vec<_>>>()?;
    let max = worst.iter().copied().max().unwrap_or(0);
    let csv: String = std::iter::once("replica,largest_other_cluster\n".to_string())
        .chain(worst.iter().enumerate().map(|(i, w)| format!("{i},{w}\n")))
        .collect();
    let summary = json!({ "replicas": replicas, "depth": depth, "p": p, "largest_other_cluster": max, "cap": MAJORITY_CLUSTER_CAP });
    Ok(Bundle::new("majority-percolation", max <= MAJORITY_CLUSTER_CAP, summary).with_file("replicas.csv", csv))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_unsat_forest() {
        let mut c = ExperimentConfig::named("unsat-forest");
        c.set("run.replicas", 5);
        c.set("graph.width", 3);
        let b = unsat_forest(&c, Exec::Sequential).unwrap();
        assert!(b.passed, "{}", b.summary);
        assert_eq!(b.files[0].1.lines().count(), 6);
    }

    #[test]
    fn torus_energies() {
        let b = torus_uniform(&ExperimentConfig::named("torus-uniform"), Exec::Sequential).unwrap();
        assert!(b.passed, "{}", b.summary);
    }
}
