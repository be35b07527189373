//! Moduli of quiver representations: exact linear algebra over ℚ and 𝔽_p,
//! King stability, generic extension dimensions, determinantal
//! semi-invariants and presentations of universal localizations.
//!
//! ```
//! use quiver_moduli::quiver::{examples::kronecker, DimVector, Weight};
//! use quiver_moduli::generic::{moduli_dimension, GenericExtTable};
//!
//! let q = kronecker(3);
//! let table = GenericExtTable::new(&q).unwrap();
//! let d = moduli_dimension(&table, &DimVector(vec![2, 2]), &Weight(vec![-1, 1])).unwrap();
//! assert_eq!(d, 5);
//! ```

pub mod error;
pub mod exec;
pub mod field;
pub mod generic;
pub mod io;
pub mod localization;
pub mod matrix;
pub mod oracle;
pub mod quiver;
pub mod rep;

pub use error::{Error, Result};
pub use exec::Execution;
pub use field::{Field, FieldTag, PrimeField, Rationals};
pub use matrix::Matrix;
pub use quiver::{Arrow, DimVector, Path, Quiver, Weight};
pub use rep::{GroupElement, Representation};

/// Crate version, embedded in reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
