//! Lattice paths (directions, ray crossings, crosses, snails) and forests on
//! windows (stems, roots, component classes, transport estimates).

mod classify;
mod cross;
mod forest;
mod path;
mod transport;

pub use classify::{classify_component, Classification, ComponentClass};
pub use cross::{
    backbite_path, check_cross_lemma, nth_cross, nth_snail, random_winding_path, sample_lemma_instance, snail_of, Axis,
    Cross, LemmaCertificate, LemmaInstance, LemmaPrecondition, Snail, Unavailable,
};
pub use forest::{ForestView, Parent};
pub use path::{double_spiral, ray_intersections, staircase, LatticePath, Point, RayCrossing, Tag, Q};
pub use transport::{
    boundary_path_edges, count_boundary_path_edges, en_csv, estimate_en, mt_estimate, EnRow, MassFn, MtEstimate,
};
