use petgraph::unionfind::UnionFind;
use serde::Serialize;

use crate::disorder::Coupling;
use crate::graph::PlanarWindow;
use crate::spin::{Spin, SpinConfig};

/// Dual bonds of unsatisfied edges and whether they form a forest in the
/// dual (outer face included as one dual vertex).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UnsatisfiedDual {
    /// Primal edge ids, sorted.
    pub edges: Vec<usize>,
    pub forest: bool,
}

pub fn unsatisfied_subgraph(window: &PlanarWindow, coupling: &Coupling, config: &SpinConfig) -> UnsatisfiedDual {
    let g = window.graph();
    let edges: Vec<usize> = (0..g.m())
        .filter(|&e| {
            let (u, v) = g.edge(e);
            coupling.get(e) * f64::from(config[u] * config[v]) < 0.0
        })
        .collect();
    let mut uf = UnionFind::new(window.dual_vertex_count());
    let forest = edges.iter().all(|&e| {
        let [a, b] = window.dual_edge(e);
        uf.union(a, b)
    });
    UnsatisfiedDual { edges, forest }
}

/// Faces whose four couplings multiply to a negative number.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Frustration {
    pub frustrated: Vec<usize>,
    /// Every frustrated face has an unsatisfied edge under all 16 corner patterns.
    pub invariant_holds: bool,
}

pub fn plaquette_frustration_check(window: &PlanarWindow, coupling: &Coupling) -> Frustration {
    let g = window.graph();
    let frustrated: Vec<usize> = (0..window.faces())
        .filter(|&f| window.face_edges(f).iter().map(|&e| coupling.get(e)).product::<f64>() < 0.0)
        .collect();
    let invariant_holds = frustrated.iter().all(|&f| {
        let corners = window.face_corners(f);
        (0u8..16).all(|mask| {
            let spin = |v: usize| -> Spin {
                let k = corners.iter().position(|&c| c == v).expect("edge endpoint is a corner");
                if mask >> k & 1 == 1 {
                    1
                } else {
                    -1
                }
            };
            window.face_edges(f).iter().any(|&e| {
                let (a, b) = g.edge(e);
                coupling.get(e) * f64::from(spin(a) * spin(b)) < 0.0
            })
        })
    });
    Frustration { frustrated, invariant_holds }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum WallKind {
    ClosedLoop,
    BoundaryToBoundary,
    BoundaryToInterior,
    Interior,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WallComponent {
    pub edges: Vec<usize>,
    /// Wall edges on the window border (their dual ends at the outer face).
    pub boundary_contacts: usize,
    /// The component contains a cycle that avoids the outer face.
    pub closed_loop: bool,
    pub kind: WallKind,
}

/// Edges whose satisfied/unsatisfied status differs between two
/// configurations, grouped into dual components.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DomainWall {
    pub edges: Vec<usize>,
    pub components: Vec<WallComponent>,
}

impl DomainWall {
    pub fn has_closed_loop(&self) -> bool {
        self.components.iter().any(|c| c.closed_loop)
    }
}

pub fn domain_walls(window: &PlanarWindow, a: &SpinConfig, b: &SpinConfig) -> DomainWall {
    let g = window.graph();
    let edges: Vec<usize> = (0..g.m())
        .filter(|&e| {
            let (u, v) = g.edge(e);
            a[u] * a[v] != b[u] * b[v]
        })
        .collect();
    let outer = window.outer_face();
    let nf = window.dual_vertex_count();
    // components over bounded faces only; border edges hang off their inner face
    let mut uf = UnionFind::new(nf);
    let mut cyclic = vec![false; nf];
    let mut cycle_edges = Vec::new();
    for &e in &edges {
        let [p, q] = window.dual_edge(e);
        if Some(p) == outer || Some(q) == outer {
            continue;
        }
        if !uf.union(p, q) {
            cycle_edges.push(p);
        }
    }
    for f in cycle_edges {
        cyclic[uf.find(f)] = true;
    }
    let mut index: Vec<Option<usize>> = vec![None; nf];
    let mut components: Vec<WallComponent> = Vec::new();
    for &e in &edges {
        let [p, q] = window.dual_edge(e);
        let inner = if Some(p) == outer { q } else { p };
        let root = uf.find(inner);
        let c = *index[root].get_or_insert_with(|| {
            components.push(WallComponent {
                edges: Vec::new(),
                boundary_contacts: 0,
                closed_loop: cyclic[root],
                kind: WallKind::Interior,
            });
            components.len() - 1
        });
        components[c].edges.push(e);
        if Some(p) == outer || Some(q) == outer {
            components[c].boundary_contacts += 1;
        }
    }
    for c in &mut components {
        c.kind = if c.closed_loop {
            WallKind::ClosedLoop
        } else {
            match c.boundary_contacts {
                0 => WallKind::Interior,
                1 => WallKind::BoundaryToInterior,
                _ => WallKind::BoundaryToBoundary,
            }
        };
    }
    DomainWall { edges, components }
}
