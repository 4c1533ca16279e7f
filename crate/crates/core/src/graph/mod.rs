//! Finite graphs: lattice windows with their duals, regular tree balls,
//! cylinders, products and the shared-clique counterexample, plus dual-loop
//! enumeration on lattice windows.

mod loops;
mod loop_type;
mod text;
mod window;

pub use loop_type::{canonical_shape, canonical_loop_type, LoopType, Shape};
pub use loops::{enumerate_dual_loops, DualLoop, LoopCatalog, DEFAULT_LOOP_CAP};
pub use text::{read_graph, read_window, write_graph, write_window};
pub use window::{Boundary, PlanarWindow};

use petgraph::unionfind::UnionFind;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Per-vertex metadata.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Label {
    Plain,
    Lattice { x: i64, y: i64 },
    Tree { depth: u32, leaf: bool },
    Cylinder { level: i64, slice: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Graph {
    adj: Vec<Vec<(usize, usize)>>,
    edges: Vec<(usize, usize)>,
    labels: Vec<Label>,
    marked: Vec<usize>,
    recipe: String,
}

impl Graph {
    /// Build from an edge list. Edges are stored as `(min, max)` in the order given.
    pub fn from_edges(n: usize, edges: &[(usize, usize)], recipe: impl Into<String>) -> Result<Self> {
        let mut adj = vec![Vec::new(); n];
        let mut stored = Vec::with_capacity(edges.len());
        let mut seen = std::collections::HashSet::with_capacity(edges.len());
        for (e, &(a, b)) in edges.iter().enumerate() {
            if a >= n || b >= n {
                return Err(invalid(format!("edge {e} ({a},{b}) out of range")));
            }
            if a == b {
                return Err(invalid(format!("self-loop at {a}")));
            }
            let key = (a.min(b), a.max(b));
            if !seen.insert(key) {
                return Err(invalid(format!("duplicate edge {key:?}")));
            }
            adj[a].push((b, e));
            adj[b].push((a, e));
            stored.push(key);
        }
        Ok(Graph { adj, edges: stored, labels: vec![Label::Plain; n], marked: Vec::new(), recipe: recipe.into() })
    }

    pub fn with_labels(mut self, labels: Vec<Label>) -> Self {
        assert_eq!(labels.len(), self.n());
        self.labels = labels;
        self
    }

    pub fn with_marked(mut self, mut marked: Vec<usize>) -> Self {
        marked.sort_unstable();
        marked.dedup();
        self.marked = marked;
        self
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> (usize, usize) {
        self.edges[e]
    }

    /// `(neighbour, edge id)` pairs.
    pub fn neighbors(&self, v: usize) -> &[(usize, usize)] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn edge_between(&self, u: usize, v: usize) -> Option<usize> {
        let (a, b) = if self.adj[u].len() <= self.adj[v].len() { (u, v) } else { (v, u) };
        self.adj[a].iter().find(|&&(w, _)| w == b).map(|&(_, e)| e)
    }

    pub fn label(&self, v: usize) -> Label {
        self.labels[v]
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn marked(&self) -> &[usize] {
        &self.marked
    }

    pub fn recipe(&self) -> &str {
        &self.recipe
    }

    /// Leaves of a tree ball (label `leaf`).
    pub fn boundary_vertices(&self) -> Vec<usize> {
        (0..self.n()).filter(|&v| matches!(self.labels[v], Label::Tree { leaf: true, .. })).collect()
    }

    /// Component index per vertex for the subgraph induced by `keep`.
    pub fn components_where(&self, keep: impl Fn(usize) -> bool) -> Vec<Option<usize>> {
        let n = self.n();
        let mut uf = UnionFind::<usize>::new(n);
        for &(u, v) in &self.edges {
            if keep(u) && keep(v) {
                uf.union(u, v);
            }
        }
        let mut index = std::collections::HashMap::new();
        (0..n)
            .map(|v| {
                if !keep(v) {
                    return None;
                }
                let r = uf.find(v);
                let next = index.len();
                Some(*index.entry(r).or_insert(next))
            })
            .collect()
    }

    pub fn is_connected(&self) -> bool {
        self.n() == 0 || self.components_where(|_| true).iter().all(|c| *c == Some(0))
    }

    pub fn is_tree(&self) -> bool {
        self.n() > 0 && self.m() + 1 == self.n() && self.is_connected()
    }

    /// Distinct cylinder levels present, ascending.
    pub fn levels(&self) -> Vec<i64> {
        let mut lv: Vec<i64> = self
            .labels
            .iter()
            .filter_map(|l| match l {
                Label::Cylinder { level, .. } => Some(*level),
                _ => None,
            })
            .collect();
        lv.sort_unstable();
        lv.dedup();
        lv
    }

    pub fn slice(&self, level: i64) -> Vec<usize> {
        (0..self.n())
            .filter(|&v| matches!(self.labels[v], Label::Cylinder { level: l, .. } if l == level))
            .collect()
    }

    pub fn path(n: usize) -> Self {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Graph::from_edges(n, &edges, format!("path n={n}")).expect("valid path")
    }

    pub fn cycle(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(invalid("cycle needs at least 3 vertices"));
        }
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Graph::from_edges(n, &edges, format!("cycle n={n}"))
    }

    pub fn complete(n: usize) -> Self {
        let mut edges = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                edges.push((a, b));
            }
        }
        Graph::from_edges(n, &edges, format!("complete n={n}")).expect("valid clique")
    }

    /// Ball of radius `depth` around the root of the `degree`-regular tree,
    /// vertices numbered breadth-first from the root.
    pub fn regular_tree(degree: usize, depth: u32) -> Result<Self> {
        if degree < 3 {
            return Err(invalid("tree degree must be at least 3"));
        }
        if depth < 1 {
            return Err(invalid("tree depth must be at least 1"));
        }
        let mut labels = vec![Label::Tree { depth: 0, leaf: false }];
        let mut edges = Vec::new();
        let mut frontier = vec![0usize];
        for d in 1..=depth {
            let mut next = Vec::new();
            for &p in &frontier {
                let kids = if p == 0 { degree } else { degree - 1 };
                for _ in 0..kids {
                    let c = labels.len();
                    labels.push(Label::Tree { depth: d, leaf: d == depth });
                    edges.push((p, c));
                    next.push(c);
                }
            }
            frontier = next;
        }
        Ok(Graph::from_edges(labels.len(), &edges, format!("tree degree={degree} depth={depth}"))?
            .with_labels(labels))
    }

    /// `slice × [low..high]`, level-major numbering: vertex `(level, s)` has id
    /// `(level - low) * slice.n() + s`. Marked slice vertices stay marked in
    /// every level.
    pub fn cylinder(slice: &Graph, low: i64, high: i64) -> Result<Self> {
        if slice.n() == 0 {
            return Err(invalid("cylinder slice is empty"));
        }
        if low > high {
            return Err(invalid("cylinder needs low <= high"));
        }
        let k = slice.n();
        let levels = (high - low + 1) as usize;
        let mut edges = Vec::new();
        let mut labels = Vec::with_capacity(k * levels);
        let mut marked = Vec::new();
        for li in 0..levels {
            for s in 0..k {
                labels.push(Label::Cylinder { level: low + li as i64, slice: s });
            }
            for &(a, b) in slice.edges() {
                edges.push((li * k + a, li * k + b));
            }
            if li + 1 < levels {
                for s in 0..k {
                    edges.push((li * k + s, (li + 1) * k + s));
                }
            }
            marked.extend(slice.marked().iter().map(|&s| li * k + s));
        }
        let recipe = format!("cylinder low={low} high={high} slice=[{}]", slice.recipe());
        Ok(Graph::from_edges(k * levels, &edges, recipe)?.with_labels(labels).with_marked(marked))
    }

    /// Cartesian product; vertex `(a, b)` has id `a * other.n() + b`.
    pub fn product(&self, other: &Graph) -> Self {
        let (n, k) = (self.n(), other.n());
        let mut edges = Vec::new();
        for a in 0..n {
            for &(x, y) in other.edges() {
                edges.push((a * k + x, a * k + y));
            }
        }
        for &(a, b) in self.edges() {
            for x in 0..k {
                edges.push((a * k + x, b * k + x));
            }
        }
        let recipe = format!("product left=[{}] right=[{}]", self.recipe, other.recipe);
        Graph::from_edges(n * k, &edges, recipe).expect("product of simple graphs is simple")
    }

    /// Two copies of K_n glued at one vertex. Vertex 0 is shared (and marked),
    /// `1..n` is the rest of copy A, `n..2n-1` the rest of copy B.
    pub fn shared_clique_pair(n: usize) -> Result<Self> {
        if n < 4 {
            return Err(invalid("shared clique pair needs n >= 4"));
        }
        let copy_a: Vec<usize> = std::iter::once(0).chain(1..n).collect();
        let copy_b: Vec<usize> = std::iter::once(0).chain(n..2 * n - 1).collect();
        let mut edges = Vec::new();
        for copy in [&copy_a, &copy_b] {
            for i in 0..copy.len() {
                for j in i + 1..copy.len() {
                    edges.push((copy[i], copy[j]));
                }
            }
        }
        Ok(Graph::from_edges(2 * n - 1, &edges, format!("shared-clique-pair n={n}"))?.with_marked(vec![0]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_edge_count(n: usize) -> usize {
        // pairs of distinct vertices lying in a common copy
        let copy = |v: usize| -> [bool; 2] { [v == 0 || v < n, v == 0 || v >= n] };
        let mut c = 0;
        for a in 0..2 * n - 1 {
            for b in a + 1..2 * n - 1 {
                let (ca, cb) = (copy(a), copy(b));
                if (ca[0] && cb[0]) || (ca[1] && cb[1]) {
                    c += 1;
                }
            }
        }
        c
    }

    #[test]
    fn tree_sizes() {
        assert_eq!(Graph::regular_tree(3, 1).unwrap().n(), 4);
        assert_eq!(Graph::regular_tree(4, 2).unwrap().n(), 17);
        let big = Graph::regular_tree(4, 5).unwrap();
        assert_eq!(big.n(), 1 + 4 * (3usize.pow(5) - 1) / 2);
        assert!(big.is_tree());
        assert_eq!(big.boundary_vertices().len(), 4 * 3usize.pow(4));
        assert!(Graph::regular_tree(2, 3).is_err());
    }

    #[test]
    fn cylinder_shapes() {
        let p = Graph::cylinder(&Graph::complete(1), 0, 5).unwrap();
        assert_eq!((p.n(), p.m()), (6, 5));
        assert_eq!(p.edges(), Graph::path(6).edges());
        let c4 = Graph::cycle(4).unwrap();
        let same = Graph::cylinder(&c4, 0, 0).unwrap();
        assert_eq!(same.edges(), c4.edges());
        let k3 = Graph::cylinder(&Graph::complete(3), -2, 2).unwrap();
        assert_eq!(k3.n(), 15);
        for v in k3.slice(0) {
            assert_eq!(k3.degree(v), 4);
        }
        for v in k3.slice(-2) {
            assert_eq!(k3.degree(v), 3);
        }
        for &(u, v) in k3.edges() {
            let lv = |x| match k3.label(x) {
                Label::Cylinder { level, .. } => level,
                _ => unreachable!(),
            };
            assert!((lv(u) - lv(v)).abs() <= 1);
        }
    }

    #[test]
    fn shared_clique_counts() {
        let g = Graph::shared_clique_pair(4).unwrap();
        assert_eq!(g.n(), 7);
        assert_eq!(g.degree(0), 6);
        assert_eq!(g.marked(), &[0]);
        let g5 = Graph::shared_clique_pair(5).unwrap();
        assert_eq!(g5.n(), 9);
        assert_eq!(g5.m(), brute_edge_count(5));
        assert_eq!(g5.m(), 20);
        let cyl = Graph::cylinder(&g, -2, 2).unwrap();
        assert_eq!(cyl.n(), 35);
        assert_eq!(cyl.marked().len(), 5);
        assert!(Graph::shared_clique_pair(3).is_err());
    }

    #[test]
    fn product_of_paths_is_grid() {
        let g = Graph::path(3).product(&Graph::path(4));
        assert_eq!(g.n(), 12);
        assert_eq!(g.m(), 3 * 3 + 2 * 4);
        assert_eq!(g.max_degree(), 4);
    }

    #[test]
    fn rejects_bad_edges() {
        assert!(Graph::from_edges(2, &[(0, 0)], "").is_err());
        assert!(Graph::from_edges(2, &[(0, 1), (1, 0)], "").is_err());
        assert!(Graph::from_edges(2, &[(0, 2)], "").is_err());
    }

    #[test]
    fn components() {
        let g = Graph::path(5);
        let comp = g.components_where(|v| v != 2);
        assert_eq!(comp, vec![Some(0), Some(0), None, Some(1), Some(1)]);
        assert!(g.is_tree());
        assert!(!Graph::cycle(4).unwrap().is_tree());
    }
}
