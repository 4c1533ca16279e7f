//! Loop dynamics on lattice windows: frequency schedules, clock-driven loop
//! flips, dependency clusters and perturbation margins.

mod cluster;
mod margin;
mod run;
mod schedule;

pub use cluster::{closure_under_rings, dependency_cluster, rings_before, DependencyCluster};
pub use margin::{perturbation_margin, replay_identical, Margin};
pub use run::{
    energy_accounting, loop_hamiltonian, run_loop_dynamics, scan_loops, Action, Evaluation, LoopDynamics,
    LoopRunRecord, LoopScan,
};
pub use schedule::{DecayCheck, FrequencySchedule, DECAY_EXPONENT};
