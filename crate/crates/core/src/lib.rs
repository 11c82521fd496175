//! Concrete matrix order unit spaces on finite-dimensional C*-algebras
//! X = ⊕ᵢ M_{nᵢ}(ℂ): absolute values, order-unit norms, order
//! projections, hereditary ideals X_x, kernels and quotients of
//! completely absolute value preserving maps, and the K₀ group with the
//! corner-inclusion homomorphism — together with randomized property
//! suites that certify or refute each construction with reproducible
//! counterexample certificates.

pub mod axioms;
pub mod capmaps;
pub mod error;
pub mod ideals;
pub mod ktheory;
pub mod numerics;
pub mod oup;
pub mod report;
pub mod sampling;
pub mod space;

pub use error::{Error, Result};
pub use numerics::{ComplexMatrix, Tolerances};
pub use report::{Counterexample, Verdict};
pub use space::{Element, SpaceSpec};
