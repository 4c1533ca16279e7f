use std::collections::VecDeque;
use std::fmt::Write as _;

use petgraph::unionfind::UnionFind;
use rand::Rng;
use serde::Serialize;

use crate::error::{invalid, parse_err, Result};
use crate::rng::{keyed_rng, Stream};

/// Where a vertex's parent edge leads.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Parent {
    Vertex(usize),
    /// The parent lies outside the window.
    Outside,
    /// The vertex is the root of a finite tree.
    Root,
}

/// A forest on the vertices of a `width × height` window (vertex `y·width + x`),
/// given by parent pointers between lattice neighbours.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ForestView {
    width: usize,
    height: usize,
    parent: Vec<Parent>,
    #[serde(skip)]
    children: Vec<Vec<usize>>,
}

impl ForestView {
    pub fn new(width: usize, height: usize, parent: Vec<Parent>) -> Result<Self> {
        if width == 0 || height == 0 || parent.len() != width * height {
            return Err(invalid("parent map does not match the window"));
        }
        let mut children = vec![Vec::new(); parent.len()];
        for (v, p) in parent.iter().enumerate() {
            if let Parent::Vertex(u) = *p {
                if u >= parent.len() {
                    return Err(invalid(format!("parent {u} of {v} is out of range")));
                }
                let (a, b) = (v % width, v / width);
                let (c, d) = (u % width, u / width);
                if a.abs_diff(c) + b.abs_diff(d) != 1 {
                    return Err(invalid(format!("parent {u} of {v} is not a lattice neighbour")));
                }
                children[u].push(v);
            }
        }
        // 0 unseen, 1 on the current chain, 2 known to end
        let mut state = vec![0u8; parent.len()];
        for s in 0..parent.len() {
            let mut chain = Vec::new();
            let mut v = s;
            loop {
                match state[v] {
                    1 => return Err(invalid("parent map has a cycle")),
                    2 => break,
                    _ => {}
                }
                state[v] = 1;
                chain.push(v);
                match parent[v] {
                    Parent::Vertex(u) => v = u,
                    _ => break,
                }
            }
            for c in chain {
                state[c] = 2;
            }
        }
        Ok(ForestView { width, height, parent, children })
    }

    /// Every vertex points to the one above it.
    pub fn column(width: usize, height: usize) -> Self {
        Self::directed(width, height, |_, _| true)
    }

    /// Every vertex points to the one on its right.
    pub fn row(width: usize, height: usize) -> Self {
        Self::directed(width, height, |_, _| false)
    }

    fn directed(width: usize, height: usize, mut up: impl FnMut(usize, usize) -> bool) -> Self {
        let mut parent = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                parent.push(if up(x, y) {
                    if y + 1 < height { Parent::Vertex(x + (y + 1) * width) } else { Parent::Outside }
                } else if x + 1 < width {
                    Parent::Vertex(x + 1 + y * width)
                } else {
                    Parent::Outside
                });
            }
        }
        Self::new(width, height, parent).expect("monotone parents are acyclic")
    }

    /// Each vertex's parent is the vertex above with probability `p`, else
    /// the one to the right. Parent steps increase `x + y`, so there are no
    /// cycles and every stem leaves the window.
    pub fn sample_directed(width: usize, height: usize, p: f64, seed: u64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(invalid("direction probability must lie in [0, 1]"));
        }
        let mut rng = keyed_rng(seed, Stream::Sampler, 0);
        Ok(Self::directed(width, height, |_, _| rng.gen::<f64>() < p))
    }

    /// Orient undirected lattice edges forming a forest: each component hangs
    /// from its smallest border vertex (parent outside) or, failing that,
    /// from its smallest vertex (a root).
    pub fn from_tree_edges(width: usize, height: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let n = width * height;
        let mut adj = vec![Vec::new(); n];
        let mut uf = UnionFind::new(n);
        for &(a, b) in edges {
            if a >= n || b >= n {
                return Err(invalid("edge endpoint outside the window"));
            }
            if !uf.union(a, b) {
                return Err(invalid("edges contain a cycle"));
            }
            adj[a].push(b);
            adj[b].push(a);
        }
        let border = |v: usize| v % width == 0 || v % width == width - 1 || v / width == 0 || v / width == height - 1;
        let mut parent = vec![Parent::Root; n];
        let mut seen = vec![false; n];
        let mut order: Vec<usize> = (0..n).filter(|&v| border(v)).collect();
        order.extend((0..n).filter(|&v| !border(v)));
        for s in order {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            parent[s] = if border(s) { Parent::Outside } else { Parent::Root };
            let mut q = VecDeque::from([s]);
            while let Some(v) = q.pop_front() {
                for &u in &adj[v] {
                    if !seen[u] {
                        seen[u] = true;
                        parent[u] = Parent::Vertex(v);
                        q.push_back(u);
                    }
                }
            }
        }
        Self::new(width, height, parent)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn n(&self) -> usize {
        self.parent.len()
    }

    pub fn vertex(&self, x: usize, y: usize) -> usize {
        y * self.width + x
    }

    pub fn coords(&self, v: usize) -> (usize, usize) {
        (v % self.width, v / self.width)
    }

    pub fn parent(&self, v: usize) -> Parent {
        self.parent[v]
    }

    pub fn children(&self, v: usize) -> &[usize] {
        &self.children[v]
    }

    /// ℓ∞ distance to the window border.
    pub fn depth_in(&self, v: usize) -> usize {
        let (x, y) = self.coords(v);
        x.min(y).min(self.width - 1 - x).min(self.height - 1 - y)
    }

    pub fn is_border(&self, v: usize) -> bool {
        self.depth_in(v) == 0
    }

    /// Undirected tree neighbours of `v`.
    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        let up = match self.parent[v] {
            Parent::Vertex(u) => Some(u),
            _ => None,
        };
        up.into_iter().chain(self.children[v].iter().copied())
    }

    /// `v` followed by its ancestors inside the window.
    pub fn stem(&self, v: usize) -> Vec<usize> {
        let mut out = vec![v];
        let mut cur = v;
        while let Parent::Vertex(u) = self.parent[cur] {
            out.push(u);
            cur = u;
        }
        out
    }

    /// Whether the stem of `v` leaves the window.
    pub fn stem_exits(&self, v: usize) -> bool {
        self.parent[*self.stem(v).last().unwrap()] == Parent::Outside
    }

    /// Descendants of `v` (including `v` at depth 0) down to `max_depth`.
    pub fn roots(&self, v: usize, max_depth: usize) -> Vec<(usize, usize)> {
        let mut out = vec![(v, 0)];
        let mut i = 0;
        while i < out.len() {
            let (u, d) = out[i];
            if d < max_depth {
                out.extend(self.children[u].iter().map(|&c| (c, d + 1)));
            }
            i += 1;
        }
        out
    }

    /// Component label of every vertex and the number of components.
    pub fn components(&self) -> (Vec<usize>, usize) {
        let mut uf = UnionFind::new(self.n());
        for (v, p) in self.parent.iter().enumerate() {
            if let Parent::Vertex(u) = *p {
                uf.union(u, v);
            }
        }
        let mut label = vec![usize::MAX; self.n()];
        let mut ids = vec![usize::MAX; self.n()];
        let mut count = 0;
        for v in 0..self.n() {
            let r = uf.find(v);
            if ids[r] == usize::MAX {
                ids[r] = count;
                count += 1;
            }
            label[v] = ids[r];
        }
        (label, count)
    }

    /// Border vertices per component.
    pub fn boundary_contacts(&self) -> Vec<usize> {
        let (label, count) = self.components();
        let mut out = vec![0; count];
        for v in (0..self.n()).filter(|&v| self.is_border(v)) {
            out[label[v]] += 1;
        }
        out
    }

    /// `forest width=W height=H` followed by `v parent` lines, the parent
    /// being an index, `out` or `root`.
    pub fn to_text(&self) -> String {
        let mut s = format!("forest width={} height={}\n", self.width, self.height);
        for (v, p) in self.parent.iter().enumerate() {
            let _ = match p {
                Parent::Vertex(u) => writeln!(s, "{v} {u}"),
                Parent::Outside => writeln!(s, "{v} out"),
                Parent::Root => writeln!(s, "{v} root"),
            };
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'));
        let (_, header) = lines.next().ok_or_else(|| parse_err(1, "empty input"))?;
        let mut dims = [None, None];
        for tok in header.split_whitespace().skip(1) {
            let (k, v) = tok.split_once('=').ok_or_else(|| parse_err(1, format!("bad header token {tok}")))?;
            let slot = match k {
                "width" => 0,
                "height" => 1,
                _ => return Err(parse_err(1, format!("unknown header key {k}"))),
            };
            dims[slot] = Some(v.parse::<usize>().map_err(|e| parse_err(1, e.to_string()))?);
        }
        if !header.starts_with("forest") {
            return Err(parse_err(1, "expected a forest header"));
        }
        let (Some(w), Some(h)) = (dims[0], dims[1]) else {
            return Err(parse_err(1, "header needs width and height"));
        };
        let mut parent = vec![None; w * h];
        for (i, line) in lines {
            let mut it = line.split_whitespace();
            let (Some(a), Some(b), None) = (it.next(), it.next(), it.next()) else {
                return Err(parse_err(i + 1, "expected `v parent`"));
            };
            let v: usize = a.parse().map_err(|_| parse_err(i + 1, format!("bad vertex {a}")))?;
            let p = match b {
                "out" => Parent::Outside,
                "root" => Parent::Root,
                _ => Parent::Vertex(b.parse().map_err(|_| parse_err(i + 1, format!("bad parent {b}")))?),
            };
            let slot = parent.get_mut(v).ok_or_else(|| parse_err(i + 1, format!("vertex {v} outside the window")))?;
            if slot.replace(p).is_some() {
                return Err(parse_err(i + 1, format!("vertex {v} listed twice")));
            }
        }
        let parent: Option<Vec<Parent>> = parent.into_iter().collect();
        Self::new(w, h, parent.ok_or_else(|| parse_err(0, "some vertices have no parent line"))?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn column_and_row() {
        let c = ForestView::column(4, 3);
        assert_eq!(c.parent(c.vertex(1, 0)), Parent::Vertex(c.vertex(1, 1)));
        assert_eq!(c.parent(c.vertex(1, 2)), Parent::Outside);
        assert_eq!(c.components().1, 4);
        assert_eq!(ForestView::sample_directed(4, 3, 1.0, 7).unwrap(), c);
        assert_eq!(ForestView::sample_directed(4, 3, 0.0, 7).unwrap(), ForestView::row(4, 3));
        assert!(ForestView::sample_directed(4, 3, 1.5, 7).is_err());
    }

    #[test]
    fn rejects_cycles_and_jumps() {
        let mut p = vec![Parent::Root; 4];
        p[0] = Parent::Vertex(1);
        p[1] = Parent::Vertex(3);
        p[3] = Parent::Vertex(2);
        p[2] = Parent::Vertex(0);
        assert!(ForestView::new(2, 2, p).is_err());
        let mut p = vec![Parent::Root; 4];
        p[0] = Parent::Vertex(3);
        assert!(ForestView::new(2, 2, p).is_err());
        assert!(ForestView::from_tree_edges(2, 2, &[(0, 1), (1, 3), (3, 2), (2, 0)]).is_err());
    }

    #[test]
    fn stems_and_roots_agree() {
        for seed in 0..5 {
            let f = ForestView::sample_directed(12, 12, 0.5, seed).unwrap();
            for v in 0..f.n() {
                assert!(f.stem_exits(v));
                for (u, d) in f.roots(v, 30) {
                    let s = f.stem(u);
                    assert_eq!(s.get(d), Some(&v));
                }
            }
        }
    }

    #[test]
    fn text_round_trip() {
        let f = ForestView::sample_directed(7, 5, 0.3, 2).unwrap();
        assert_eq!(ForestView::from_text(&f.to_text()).unwrap(), f);
        let g = ForestView::from_tree_edges(3, 3, &[(4, 1), (4, 3)]).unwrap();
        assert_eq!(ForestView::from_text(&g.to_text()).unwrap(), g);
        assert!(ForestView::from_text("forest width=2 height=1\n0 out\n").is_err());
        assert!(ForestView::from_text("forest width=2 height=1\n0 out\n1 out\n1 out\n").is_err());
    }
}
