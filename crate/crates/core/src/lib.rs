//! Constructive one-point Hölder extension into `R`, `l_inf^m`, `c0`, `c`
//! and sampled `C(K)`, with the coverings and certificates behind them.
//!
//! Every extension routine re-verifies its output against the whole domain
//! before returning it.

pub mod counterexample;
pub mod error;
pub mod extend_c;
pub mod extend_ck;
pub mod extend_core;
pub mod numeric;
#[cfg(test)]
mod proptests;
pub mod sample;
pub mod selftest;
pub mod spaces;
pub mod targets;

pub use counterexample::{
    gen_counterexample, select_k, selection_value, verify_counterexample, CounterexampleInstance,
    ObstructionCertificate,
};
pub use error::{Error, Result};
pub use extend_c::{
    c0_extend, c_extend, c_feasible, cone_cover, forced_intervals, linf_partition, verify_partition, ConeCover,
    PartitionTrace,
};
pub use extend_ck::{
    almost_extend_net, ck_extend, ck_feasible, embed_c_into_ck, infconv_ck, reduce_ck_to_c, xi_modulus,
    AlmostExtension, CkFeasibility, Embedding, ModulusTable,
};
pub use extend_core::{
    feasibility_interval, infconv_extend, linf_vector_extend, scalar_extend, sup_extend, vector_certificate,
    FeasibilityCertificate, Interval, OnePointExtend, PartialMap, Policy, TargetValue,
};
pub use spaces::{HolderParams, LinearMap, NormedSpace, Point, SpaceKind};
pub use targets::{sup_dist, sup_dist_fn, EcSeq, FiniteFunction, FiniteMetricSpace, Target};
