//! Independent reference computations shared by the integration tests.
//! Nothing here calls into the library's algorithms; inputs are plain edge
//! lists and coordinates.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet};

pub fn energy(edges: &[(usize, usize)], j: &[f64], s: &[i8]) -> f64 {
    -edges.iter().zip(j).map(|(&(u, v), &w)| w * f64::from(s[u] * s[v])).sum::<f64>()
}

fn spins(n: usize, bits: u64) -> Vec<i8> {
    (0..n).map(|v| if bits >> v & 1 == 1 { -1 } else { 1 }).collect()
}

/// Minimum energy and every configuration attaining it (within `1e-9`), by
/// scanning all `2^n` configurations.
pub fn brute_force(n: usize, edges: &[(usize, usize)], j: &[f64]) -> (f64, Vec<Vec<i8>>) {
    assert!(n <= 20);
    let mut best = f64::INFINITY;
    let mut arg = Vec::new();
    for bits in 0..1u64 << n {
        let s = spins(n, bits);
        let e = energy(edges, j, &s);
        if e < best - 1e-9 {
            best = e;
            arg.clear();
        }
        if (e - best).abs() <= 1e-9 {
            arg.push(s);
        }
    }
    (best, arg)
}

pub struct UnionFind(Vec<usize>);

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }

    pub fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        self.0[x] = r;
        r
    }

    /// False when `a` and `b` were already joined.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        self.0[ra] = rb;
        ra != rb
    }
}

/// The two faces of a `w × h` vertex grid on either side of the edge
/// `a`-`b`, with `(w-1)(h-1)` standing for the outer face.
pub fn faces_of_edge(w: usize, h: usize, a: (usize, usize), b: (usize, usize)) -> [usize; 2] {
    let outer = (w - 1) * (h - 1);
    let face = |fx: i64, fy: i64| {
        if fx < 0 || fy < 0 || fx >= w as i64 - 1 || fy >= h as i64 - 1 {
            outer
        } else {
            fy as usize * (w - 1) + fx as usize
        }
    };
    let (x, y) = (a.0.min(b.0) as i64, a.1.min(b.1) as i64);
    if a.1 == b.1 {
        [face(x, y - 1), face(x, y)]
    } else {
        [face(x - 1, y), face(x, y)]
    }
}

/// Dual loops of a grid of `cw × ch` unit cells: simple cycles of length at
/// most `max_len` in the cell adjacency graph, each given by the set of
/// lattice points it encloses (points with coordinates in `0..=cw`, `0..=ch`;
/// cell `(i, j)` has centre `(i + 1/2, j + 1/2)`).
pub fn dfs_loops(cw: usize, ch: usize, max_len: usize) -> Vec<(usize, BTreeSet<(usize, usize)>)> {
    let id = |i: usize, j: usize| j * cw + i;
    let nbrs = |c: usize| {
        let (i, j) = (c % cw, c / cw);
        let mut v = Vec::new();
        if i > 0 {
            v.push(id(i - 1, j));
        }
        if i + 1 < cw {
            v.push(id(i + 1, j));
        }
        if j > 0 {
            v.push(id(i, j - 1));
        }
        if j + 1 < ch {
            v.push(id(i, j + 1));
        }
        v
    };
    let mut seen: HashSet<Vec<usize>> = HashSet::new();
    let mut out = Vec::new();
    // each cycle is found from its smallest cell, in both directions; the
    // sorted cell list dedupes the two directions
    fn walk(
        start: usize,
        path: &mut Vec<usize>,
        on: &mut Vec<bool>,
        max_len: usize,
        nbrs: &dyn Fn(usize) -> Vec<usize>,
        found: &mut dyn FnMut(&[usize]),
    ) {
        let last = *path.last().unwrap();
        for n in nbrs(last) {
            if n == start && path.len() >= 4 {
                found(path);
            } else if n > start && !on[n] && path.len() < max_len {
                on[n] = true;
                path.push(n);
                walk(start, path, on, max_len, nbrs, found);
                path.pop();
                on[n] = false;
            }
        }
    }
    let mut on = vec![false; cw * ch];
    for s in 0..cw * ch {
        let mut path = vec![s];
        on[s] = true;
        walk(s, &mut path, &mut on, max_len, &nbrs, &mut |cyc: &[usize]| {
            let mut key = cyc.to_vec();
            key.sort_unstable();
            if seen.insert(key) {
                out.push((cyc.len(), enclosed_points(cyc, cw, ch)));
            }
        });
        on[s] = false;
    }
    out
}

/// Lattice points strictly inside the polygon through the cell centres,
/// by ray casting in doubled coordinates.
fn enclosed_points(cycle: &[usize], cw: usize, ch: usize) -> BTreeSet<(usize, usize)> {
    let pts: Vec<(i64, i64)> = cycle.iter().map(|&c| (2 * (c % cw) as i64 + 1, 2 * (c / cw) as i64 + 1)).collect();
    let mut inside = BTreeSet::new();
    for x in 0..=cw {
        for y in 0..=ch {
            let (px, py) = (2 * x as i64, 2 * y as i64);
            let mut crossings = 0;
            for k in 0..pts.len() {
                let (a, b) = (pts[k], pts[(k + 1) % pts.len()]);
                // vertical polygon edges only can cross a horizontal ray;
                // horizontal ones sit at odd y and never touch even py
                if a.0 == b.0 && a.0 > px && (a.1.min(b.1) < py && py < a.1.max(b.1)) {
                    crossings += 1;
                }
            }
            if crossings % 2 == 1 {
                inside.insert((x, y));
            }
        }
    }
    inside
}

/// Normalise a point set by translation.
pub fn translate_to_origin(s: &BTreeSet<(usize, usize)>) -> BTreeSet<(usize, usize)> {
    let mx = s.iter().map(|p| p.0).min().unwrap_or(0);
    let my = s.iter().map(|p| p.1).min().unwrap_or(0);
    s.iter().map(|&(x, y)| (x - mx, y - my)).collect()
}

/// n choose k as a float.
pub fn binomial(n: u64, k: u64) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}
