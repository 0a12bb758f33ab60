#[cfg(feature = "selftest")]
pub mod acceptance;
pub mod circlegeom;
pub mod error;
pub mod linalg;
pub mod metrics;
pub mod numrange;
#[cfg(feature = "selftest")]
pub mod oracle;
pub mod pauli;
pub mod search;
pub mod subsets;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, DensityState, SchattenP, UnitaryOperator};
