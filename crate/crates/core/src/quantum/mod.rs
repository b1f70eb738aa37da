//! Exact simulation of GHZ sources, equatorial projective measurements,
//! white noise and the network distribution, together with the analytic
//! distributions used as an independent fast path.

pub mod assemble;
pub mod closed_form;
pub mod measure;
pub mod state;
pub mod swap;
pub mod table;

use num_complex::Complex64;

/// Single-qubit operator, row-major.
pub type Op2 = [[Complex64; 2]; 2];

pub use assemble::{
    compose_network, compose_network_routed, network_table, single_source_table, split_visibility,
};
pub use measure::{BobScheme, MeasurementScheme, Scheme, XYObservable, BOB_AXES};
pub use state::{DensityOperator, StateVector};
pub use swap::{ghz_like_basis, swap_joint_table, SwapTable};
pub use table::CorrelationTable;
