//! Named, seeded experiments over the library, with flat-text configuration
//! and JSON/CSV result bundles.

mod config;
pub mod dynamics;
pub mod geometry;
pub mod ground;
pub mod loops;

use std::fs;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

pub use config::ExperimentConfig;

use crate::error::{invalid, Result};
use crate::exec::Exec;

/// Keys every experiment accepts.
pub const COMMON_KEYS: &[&str] = &["experiment.name", "run.seed", "run.out", "run.jobs"];

pub struct Experiment {
    pub name: &'static str,
    /// The statement the experiment checks on finite windows.
    pub claim: &'static str,
    /// Rough wall-clock cost at default settings.
    pub budget: &'static str,
    /// Settings it reads besides [`COMMON_KEYS`].
    pub keys: &'static [&'static str],
    run: fn(&ExperimentConfig, Exec) -> Result<Bundle>,
}

/// Outcome of one experiment run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Bundle {
    pub name: String,
    pub passed: bool,
    pub summary: Value,
    /// Extra files as (name, contents).
    pub files: Vec<(String, String)>,
}

impl Bundle {
    pub(crate) fn new(name: &str, passed: bool, summary: Value) -> Self {
        Bundle { name: name.to_string(), passed, summary, files: Vec::new() }
    }

    pub(crate) fn with_file(mut self, name: &str, contents: String) -> Self {
        self.files.push((name.to_string(), contents));
        self
    }

    /// Summary JSON with the name and verdict folded in.
    pub fn summary_text(&self) -> String {
        let mut v = serde_json::json!({ "experiment": self.name, "passed": self.passed });
        v["summary"] = self.summary.clone();
        serde_json::to_string_pretty(&v).expect("json values serialize") + "\n"
    }

    /// Write `summary.json` and the extra files into `dir`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("summary.json"), self.summary_text())?;
        for (name, body) in &self.files {
            fs::write(dir.join(name), body)?;
        }
        Ok(())
    }
}

pub fn list_experiments() -> &'static [Experiment] {
    REGISTRY
}

pub fn find_experiment(name: &str) -> Option<&'static Experiment> {
    REGISTRY.iter().find(|e| e.name == name)
}

/// Check the configuration against the experiment's keys, then run it.
pub fn run_experiment(config: &ExperimentConfig, exec: Exec) -> Result<Bundle> {
    let name = config.name().ok_or_else(|| invalid("configuration has no experiment.name"))?;
    let exp = find_experiment(name).ok_or_else(|| invalid(format!("unknown experiment `{name}`")))?;
    for k in config.keys() {
        if !COMMON_KEYS.contains(&k) && !exp.keys.contains(&k) {
            return Err(invalid(format!("experiment `{name}` does not take `{k}`")));
        }
    }
    (exp.run)(config, exec)
}

pub(crate) fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, f64::NAN);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

static REGISTRY: &[Experiment] = &[
    Experiment {
        name: "nonfreezing-cylinder",
        claim: "a cylinder over two cliques sharing a vertex need not freeze: the shared vertex ties forever",
        budget: "<1 s",
        keys: &["run.replicas", "dynamics.horizon", "graph.n"],
        run: dynamics::nonfreezing_cylinder,
    },
    Experiment {
        name: "evenTree-tie",
        claim: "even-regular trees do not freeze: a balanced root keeps flipping",
        budget: "<1 s",
        keys: &["run.replicas", "dynamics.horizon"],
        run: dynamics::even_tree_tie,
    },
    Experiment {
        name: "monotone-coupling",
        claim: "ordered starts driven by shared clocks and coins stay ordered (ferromagnetic)",
        budget: "~2 s",
        keys: &["run.replicas", "dynamics.horizon", "graph.width"],
        run: dynamics::monotone_coupling,
    },
    Experiment {
        name: "freeze-in-slices",
        claim: "cylinders over cycles and cliques freeze into slice-constant states",
        budget: "~5 s",
        keys: &["run.replicas", "dynamics.horizon", "dynamics.trailing"],
        run: dynamics::freeze_in_slices,
    },
    Experiment {
        name: "strongly-freezing",
        claim: "complete graphs: the all-vertices (d+1)-majority event becomes likelier as n grows",
        budget: "<1 s",
        keys: &["run.samples", "graph.d"],
        run: dynamics::strongly_freezing,
    },
    Experiment {
        name: "unsat-forest",
        claim: "unsatisfied bonds of a planar ground state form a dual forest",
        budget: "<1 s",
        keys: &["run.replicas", "graph.width", "graph.height", "coupling.law"],
        run: ground::unsat_forest,
    },
    Experiment {
        name: "fixed-edges",
        claim: "fixed edges are satisfied in every ground state",
        budget: "<1 s",
        keys: &["run.replicas", "graph.width", "graph.height", "coupling.law"],
        run: ground::fixed_edges,
    },
    Experiment {
        name: "torus-uniform",
        claim: "with all couplings equal to one the lattice has a single ground state pair",
        budget: "~1 s",
        keys: &[],
        run: ground::torus_uniform,
    },
    Experiment {
        name: "tree-gsp",
        claim: "trees carry many ground state pairs: one light edge left unsatisfied, or coin-chosen free edges",
        budget: "~2 s",
        keys: &["run.replicas", "graph.depth", "dynamics.k"],
        run: ground::tree_gsp,
    },
    Experiment {
        name: "majority-percolation",
        claim: "strongly biased colourings of trees leave only small non-majority clusters",
        budget: "<1 s",
        keys: &["run.replicas", "graph.depth", "coupling.p"],
        run: ground::majority_percolation,
    },
    Experiment {
        name: "loop-count",
        claim: "dual loop counts against closed-form values",
        budget: "<1 s",
        keys: &["graph.width", "graph.height"],
        run: loops::loop_count,
    },
    Experiment {
        name: "loop-cluster-budget",
        claim: "loop dynamics is well defined: dependency clusters are finite and small",
        budget: "<1 s",
        keys: &["run.replicas", "dynamics.c", "dynamics.max_length", "dynamics.budget", "graph.width"],
        run: loops::loop_cluster_budget,
    },
    Experiment {
        name: "loop-terminal-gsp",
        claim: "weak limits of loop dynamics are loop-local ground states",
        budget: "~3 s",
        keys: &["run.replicas", "dynamics.c", "dynamics.max_length", "dynamics.trailing", "graph.width"],
        run: loops::loop_terminal_gsp,
    },
    Experiment {
        name: "perturbation-margin",
        claim: "runs are flexible: couplings can move by the margin without changing any flip",
        budget: "~1 s",
        keys: &["run.replicas", "run.edges", "graph.width", "dynamics.max_length"],
        run: loops::perturbation_margin_exp,
    },
    Experiment {
        name: "cross-lemma",
        claim: "snails of perpendicularly meeting crosses intersect",
        budget: "~5 s",
        keys: &["run.replicas", "graph.width"],
        run: geometry::cross_lemma,
    },
    Experiment {
        name: "mass-transport",
        claim: "in single-infinite forests each vertex has one expected root at every tree distance",
        budget: "~5 s",
        keys: &["run.replicas", "graph.width", "geometry.margin", "geometry.max_distance", "geometry.p"],
        run: geometry::mass_transport,
    },
    Experiment {
        name: "en-growth",
        claim: "boundary-path edges of single-infinite forests grow faster than the box side",
        budget: "<1 s",
        keys: &["run.replicas", "geometry.sizes", "geometry.p"],
        run: geometry::en_growth,
    },
];
