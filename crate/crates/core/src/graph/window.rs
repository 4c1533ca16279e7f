use serde::{Deserialize, Serialize};

use super::{Graph, Label};
use crate::error::{invalid, Result};
use crate::spin::{BoundaryCondition, Spin};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Boundary {
    Free,
    /// Border vertices pinned to the given spin.
    Fixed(Spin),
    Periodic,
}

/// A `width × height` window of the square lattice with its dual.
///
/// Vertex `(x, y)` has id `y * width + x`. Faces are the unit squares: face
/// `(fx, fy)` has lower-left corner `(fx, fy)`. In planar modes there are
/// `(width-1)(height-1)` faces plus one outer face with id `faces()`; on the
/// torus there are `width·height` faces and no outer face.
#[derive(Clone, Debug)]
pub struct PlanarWindow {
    width: usize,
    height: usize,
    boundary: Boundary,
    graph: Graph,
    dual: Vec<[usize; 2]>,
}

impl PlanarWindow {
    pub fn new(width: usize, height: usize, boundary: Boundary) -> Result<Self> {
        if width < 2 || height < 2 {
            return Err(invalid("window dimensions must be at least 2"));
        }
        if boundary == Boundary::Periodic && (width < 3 || height < 3) {
            return Err(invalid("periodic windows need dimensions of at least 3"));
        }
        if let Boundary::Fixed(s) = boundary {
            if s != 1 && s != -1 {
                return Err(invalid("fixed boundary spin must be +1 or -1"));
            }
        }
        let periodic = boundary == Boundary::Periodic;
        let id = |x: usize, y: usize| y * width + x;
        let mut edges = Vec::new();
        for y in 0..height {
            for x in 0..width {
                if x + 1 < width || periodic {
                    edges.push((id(x, y), id((x + 1) % width, y)));
                }
                if y + 1 < height || periodic {
                    edges.push((id(x, y), id(x, (y + 1) % height)));
                }
            }
        }
        let labels = (0..width * height)
            .map(|v| Label::Lattice { x: (v % width) as i64, y: (v / width) as i64 })
            .collect();
        let mode = match boundary {
            Boundary::Free => "free".to_string(),
            Boundary::Fixed(s) => format!("fixed{}", if s > 0 { '+' } else { '-' }),
            Boundary::Periodic => "periodic".to_string(),
        };
        let graph = Graph::from_edges(width * height, &edges, format!("window width={width} height={height} boundary={mode}"))?
            .with_labels(labels);
        let mut w = PlanarWindow { width, height, boundary, graph, dual: Vec::new() };
        w.dual = (0..w.graph.m()).map(|e| w.compute_dual(e)).collect();
        Ok(w)
    }

    fn compute_dual(&self, e: usize) -> [usize; 2] {
        let (a, b) = self.graph.edge(e);
        let (ax, ay) = self.coords(a);
        let (bx, by) = self.coords(b);
        if ay == by {
            // horizontal edge from its left end
            let x = if (ax + 1) % self.width == bx { ax } else { bx };
            [self.face_or_outer(x as i64, ay as i64 - 1), self.face_or_outer(x as i64, ay as i64)]
        } else {
            let y = if (ay + 1) % self.height == by { ay } else { by };
            [self.face_or_outer(ax as i64 - 1, y as i64), self.face_or_outer(ax as i64, y as i64)]
        }
    }

    fn face_or_outer(&self, fx: i64, fy: i64) -> usize {
        if self.boundary == Boundary::Periodic {
            let fx = fx.rem_euclid(self.width as i64) as usize;
            let fy = fy.rem_euclid(self.height as i64) as usize;
            return fy * self.width + fx;
        }
        let (fw, fh) = (self.width as i64 - 1, self.height as i64 - 1);
        if fx < 0 || fy < 0 || fx >= fw || fy >= fh {
            self.faces()
        } else {
            (fy * fw + fx) as usize
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn is_periodic(&self) -> bool {
        self.boundary == Boundary::Periodic
    }

    pub fn vertex(&self, x: usize, y: usize) -> usize {
        y * self.width + x
    }

    pub fn coords(&self, v: usize) -> (usize, usize) {
        (v % self.width, v / self.width)
    }

    /// Vertex at signed coordinates, if inside (wrapping on the torus).
    pub fn vertex_at(&self, x: i64, y: i64) -> Option<usize> {
        if self.is_periodic() {
            let x = x.rem_euclid(self.width as i64) as usize;
            let y = y.rem_euclid(self.height as i64) as usize;
            return Some(self.vertex(x, y));
        }
        if x < 0 || y < 0 || x >= self.width as i64 || y >= self.height as i64 {
            None
        } else {
            Some(self.vertex(x as usize, y as usize))
        }
    }

    /// Vertices on the window's border (none on the torus).
    pub fn is_border(&self, v: usize) -> bool {
        if self.is_periodic() {
            return false;
        }
        let (x, y) = self.coords(v);
        x == 0 || y == 0 || x + 1 == self.width || y + 1 == self.height
    }

    /// Number of bounded faces.
    pub fn faces(&self) -> usize {
        if self.is_periodic() {
            self.width * self.height
        } else {
            (self.width - 1) * (self.height - 1)
        }
    }

    pub fn outer_face(&self) -> Option<usize> {
        (!self.is_periodic()).then(|| self.faces())
    }

    /// Number of dual vertices (faces plus the outer face in planar modes).
    pub fn dual_vertex_count(&self) -> usize {
        self.faces() + usize::from(!self.is_periodic())
    }

    /// The two faces separated by primal edge `e`.
    pub fn dual_edge(&self, e: usize) -> [usize; 2] {
        self.dual[e]
    }

    /// An edge is interior when both of its sides are bounded faces.
    pub fn is_interior_edge(&self, e: usize) -> bool {
        let outer = self.outer_face();
        self.dual[e].iter().all(|&f| Some(f) != outer)
    }

    pub fn face_coords(&self, f: usize) -> (usize, usize) {
        let fw = if self.is_periodic() { self.width } else { self.width - 1 };
        (f % fw, f / fw)
    }

    /// Corners of a bounded face: lower-left, lower-right, upper-right, upper-left.
    pub fn face_corners(&self, f: usize) -> [usize; 4] {
        let (fx, fy) = self.face_coords(f);
        let (x1, y1) = ((fx + 1) % self.width, (fy + 1) % self.height);
        [self.vertex(fx, fy), self.vertex(x1, fy), self.vertex(x1, y1), self.vertex(fx, y1)]
    }

    /// Edges around a bounded face, in corner order.
    pub fn face_edges(&self, f: usize) -> [usize; 4] {
        let c = self.face_corners(f);
        let g = &self.graph;
        [0, 1, 2, 3].map(|i| g.edge_between(c[i], c[(i + 1) % 4]).expect("face edge exists"))
    }

    /// Border pinning for `Fixed` windows.
    pub fn boundary_condition(&self) -> BoundaryCondition {
        let n = self.graph.n();
        match self.boundary {
            Boundary::Fixed(s) => BoundaryCondition::from_pairs(n, (0..n).filter(|&v| self.is_border(v)).map(|v| (v, s))),
            _ => BoundaryCondition::free(n),
        }
    }
}
