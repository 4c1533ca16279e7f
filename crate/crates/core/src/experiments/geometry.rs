use serde_json::json;

use super::{Bundle, ExperimentConfig};
use crate::error::{invalid, Result};
use crate::exec::Exec;
use crate::geometry::{check_cross_lemma, en_csv, estimate_en, mt_estimate, sample_lemma_instance, ForestView, MassFn};
use crate::rng::replica_seed;

/// Outcome of one sampled lemma instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LemmaRow {
    pub index: u64,
    pub n: usize,
    pub m: usize,
    pub distance: usize,
    pub bound: usize,
    pub holds: bool,
}

/// Draw `count` valid instances on `size × size` windows, skipping seeds
/// whose path offers no meeting crosses.
pub fn lemma_rows(size: i64, count: usize, seed: u64, exec: Exec) -> Result<Vec<LemmaRow>> {
    let mut rows = Vec::with_capacity(count);
    let mut next = 0u64;
    while rows.len() < count {
        if next > 20 * count as u64 + 100 {
            return Err(invalid(format!("only {} usable instances in {next} draws", rows.len())));
        }
        let batch = count - rows.len();
        let start = next;
        let found = exec.map(batch, |i| {
            let k = start + i as u64;
            sample_lemma_instance(size, replica_seed(seed, k), 200).map(|inst| {
                let cert = check_cross_lemma(&inst.path, inst.p, inst.q, inst.n, inst.m);
                (k, inst.n, inst.m, cert)
            })
        });
        next += batch as u64;
        for (k, n, m, cert) in found.into_iter().flatten() {
            let cert = cert.map_err(|_| invalid("sampled instance lost its precondition"))?;
            rows.push(LemmaRow { index: k, n, m, distance: cert.distance, bound: cert.bound, holds: cert.holds });
        }
    }
    Ok(rows)
}

pub(crate) fn cross_lemma(cfg: &ExperimentConfig, exec: Exec) -> Result<Bundle> {
    let count: usize = cfg.get("run.replicas", 1000)?;
    let size: i64 = cfg.get("graph.width", 64)?;
    let rows = lemma_rows(size, count, cfg.seed()?, exec)?;
    let violations = rows.iter().filter(|r| !r.holds).count();
    let mut csv = String::from("draw,n,m,distance,bound,holds\n");
    for r in &rows {
        csv += &format!("{},{},{},{},{},{}\n", r.index, r.n, r.m, r.distance, r.bound, r.holds);
    }
    let summary = json!({ "instances": rows.len(), "size": size, "violations": violations });
    Ok(Bundle::new("cross-lemma", violations == 0, summary).with_file("instances.csv", csv))
}

/// Mean received mass for `1{k = n}`, `n = 1..=max_distance`, over seeds.
pub fn mt_profile(width: usize, p: f64, margin: usize, max_distance: usize, seeds: usize, seed: u64, exec: Exec) -> Result<Vec<f64>> {
    let per_seed = exec.map(seeds, |i| -> Result<Vec<f64>> {
        let f = ForestView::sample_directed(width, width, p, replica_seed(seed, i as u64))?;
        (1..=max_distance).map(|n| mt_estimate(&f, MassFn::Exactly(n), margin).map(|e| e.rhs)).collect()
    });
    let per_seed = per_seed.into_iter().collect::<Result<Vec<_>>>()?;
    Ok((0..max_distance).map(|k| per_seed.iter().map(|r| r[k]).sum::<f64>() / seeds as f64).collect())
}

pub(crate) fn mass_transport(cfg: &ExperimentConfig, exec: Exec) -> Result<Bundle> {
    let seeds: usize = cfg.get("run.replicas", 10)?;
    let width: usize = cfg.get("graph.width", 512)?;
    let margin: usize = cfg.get("geometry.margin", 8)?;
    let max_distance: usize = cfg.get("geometry.max_distance", 5)?;
    let p: f64 = cfg.get("geometry.p", 0.5)?;
    let seed = cfg.seed()?;
    let column = ForestView::sample_directed(2 * margin + 3, 2 * margin + 3, 1.0, seed)?;
    let col = mt_estimate(&column, MassFn::AtMost(3), margin)?;
    let rhs = mt_profile(width, p, margin, max_distance, seeds, seed, exec)?;
    let passed = col.lhs == col.rhs && rhs.iter().all(|r| (r - 1.0).abs() <= 0.05);
    let mut csv = String::from("n,value,seeds\n");
    for (k, r) in rhs.iter().enumerate() {
        csv += &format!("{},{r},{seeds}\n", k + 1);
    }
    let summary = json!({
        "column": { "lhs": col.lhs, "rhs": col.rhs },
        "window": width, "margin": margin, "p": p, "seeds": seeds, "received": rhs,
    });
    Ok(Bundle::new("mass-transport", passed, summary).with_file("received.csv", csv))
}

pub(crate) fn en_growth(cfg: &ExperimentConfig, exec: Exec) -> Result<Bundle> {
    let seeds: usize = cfg.get("run.replicas", 20)?;
    let p: f64 = cfg.get("geometry.p", 0.5)?;
    let sizes: Vec<usize> = cfg
        .raw("geometry.sizes")
        .unwrap_or("8,16,32,64")
        .split(',')
        .map(|s| s.trim().parse().map_err(|_| invalid(format!("bad box size `{s}`"))))
        .collect::<Result<_>>()?;
    let rows = estimate_en(p, &sizes, seeds, cfg.seed()?, exec)?;
    let passed = rows.windows(2).all(|w| w[1].mean > w[0].mean);
    let summary = json!({ "p": p, "seeds": seeds, "rows": serde_json::to_value(&rows).unwrap_or_default() });
    Ok(Bundle::new("en-growth", passed, summary).with_file("en.csv", en_csv(&rows)))
}
