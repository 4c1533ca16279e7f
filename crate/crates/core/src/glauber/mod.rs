//! Zero-temperature Glauber dynamics: event streams, runs with pinned
//! boundaries, the monotone coupling, and finite-horizon freezing reports.

mod events;
mod freezing;
mod run;

pub use events::{EventStream, Ring, Rings};
pub use freezing::{
    classify_freezing, estimate_strongly_freezing, freeze_in_slices_procedure, is_psf_estimate, replay_flips,
    slice_constant, strongly_good_sign, FreezingClass, FreezingReport, PsfEstimate, SliceKind,
};
pub use run::{
    delta_h, run_coupled_monotone, run_glauber, CoupledRecord, FlipEvent, Glauber, RingEvent, RunRecord,
    VertexCounters,
};
