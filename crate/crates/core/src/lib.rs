//! Queued quantum collision models.
//!
//! A qubit system is served by a single-server FIFO queue of ancilla
//! qubits. The classical queue (Lindley's recursion) fixes, for every
//! ancilla, how long it waited, how long the system sat idle before it, and
//! how long the two interacted. Those three durations parameterize the
//! waiting, idle and interaction channels of a stochastic map on the
//! system state.
//!
//! The crate is `no_std` and needs only `alloc`. IO, configuration and
//! the command-line front end live in the `qqcm` crate.
#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod collision;
pub mod distributions;
pub mod error;
pub mod linalg;
pub mod lindley;
pub mod quadrature;
pub mod quantum;
pub mod queue;
pub mod rng;

pub use collision::{
    ensemble_average, fixed_point, long_run_stats, mean_state, CollisionEngine, CollisionSample, EnsembleStats,
    FixedPoint, FixedPointMode, LongRunStats, MeanState, ModelSpec, TrajectoryRecord,
};
pub use distributions::{pdf_difference, DifferenceLaw, DistributionSpec};
pub use error::{Error, Result};
pub use linalg::{CMatrix, C64};
pub use lindley::{empirical_cdf, idle_cdf, lindley_fixed_point, lindley_iterate, CdfGrid, GridSpec, LindleySolution};
pub use quantum::{
    apply_dephasing, coherence, partial_swap_unitary, partial_trace_ancilla, propagate, xxz_liouvillian, Channel,
    ChannelSpec, DensityMatrix, DephasingConvention, Superoperator,
};
pub use queue::{lindley_step, simulate_queue, utilization, LindleyWalk, QueueTrace};
pub use rng::RngStream;
