//! Dense complex linear algebra and quantum-state utilities: tensor
//! products, Schmidt decomposition, POVM validation and measurement, and the
//! distance functions the rest of the crate leans on.

pub mod complete;
pub mod distance;
pub mod gates;
pub mod matrix;
pub mod povm;
pub mod random;
pub mod schmidt;
pub mod state;
pub mod svd;

pub use complete::complete_columns;
pub use distance::{overlap, trace_distance_pure, tv_distance};
pub use matrix::CMatrix;
pub use povm::{measure, validate_povm, Measurement, Povm, PovmValidation};
pub use schmidt::{schmidt_decompose, SchmidtDecomposition};
pub use state::{tensor, StateVector};
pub use svd::{hermitian_eigen, nonnegative_eigenspace_projector, operator_norm, svd, Svd};
