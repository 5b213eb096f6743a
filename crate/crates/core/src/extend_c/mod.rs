//! Extensions into the sequence spaces `c0` and `c`, and the coverings of
//! finite-dimensional spaces they rely on.

pub mod cones;
pub mod partition;
pub mod sequences;

pub use cones::{cone_cover, ConeCover};
pub use partition::{linf_partition, verify_partition, BandFamily, Cell, ConeNode, PartitionTrace};
pub use sequences::{
    c0_extend, c0_extend_with_cover, c_extend, c_feasible, forced_intervals, C0Trace, CFeasibility, CTrace,
    C0_CONE_DELTA, C0_EPSILON_FRACTION,
};
