//! Exact and local ground states: exhaustive minimisation, connected-subset
//! verification, unsatisfied-bond forests, frustration, domain walls, and
//! the tree constructions with several ground states.

mod exhaustive;
mod local;
mod planar;
mod tree;

pub use exhaustive::{
    check_torus_unique_gsp, enumerate_ground_states, unsatisfied_edges, GroundStateReport, DEGENERACY_TOLERANCE,
    MAX_EXHAUSTIVE_VERTICES,
};
pub use local::{boundary_sum, for_each_connected_subset, verify_local_ground_state, verify_with_budget, LocalCheck, SUBSET_BUDGET};
pub use planar::{
    domain_walls, plaquette_frustration_check, unsatisfied_subgraph, DomainWall, Frustration, UnsatisfiedDual,
    WallComponent, WallKind,
};
pub use tree::{all_satisfied, construct_tree_flip_gsp, free_edges, sample_tree_invariant_gsp, TreeFlip, TreeGsp};
