//! Reference propagators, parametrix comparison, dispersive kernel decay, Strichartz
//! quotients and the gluing of short-window estimates.

pub(crate) mod exponents;
pub(crate) mod glue;
pub(crate) mod kernel;
pub(crate) mod propagate;
pub(crate) mod strichartz;

pub use exponents::{exponent_consistency, ExponentRecord, Q};
pub use glue::{glue_intervals, partition_coverage, window_count, window_cutoff, GlueRecord};
pub use kernel::{kernel_decay_fit, short_separation_constant, KernelConfig, KernelDecay};
pub use propagate::{
    adjoint_defect, duhamel_compare, flat_exact, parametrix_run, reference_propagate, Direction, DuhamelRecord, Generator,
    PropagatorMethod, PropagatorRun, Quantization,
};
pub use strichartz::{
    focusing_datum, lp_in_time, strichartz_quotient, DyadicEvolution, FlatModel, QuasilinearModel, StrichartzConfig,
    StrichartzReport,
};
