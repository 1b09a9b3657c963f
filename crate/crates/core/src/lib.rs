//! Exact switching, equivalence and trade tools for Butson Hadamard
//! matrices.
//!
//! Matrices are stored in exponent form over `⟨ζ_k⟩`, so orthogonality is
//! decided exactly in `Z[ζ_k]`. A float path covers general complex
//! Hadamard matrices where a switching coefficient is an arbitrary unit
//! complex number.

pub mod bmatrix;
pub mod construct;
pub mod cyclo;
pub mod equiv;
pub mod error;
pub mod explorer;
pub mod sites;
pub mod switchcore;
pub mod trades;

pub use bmatrix::{Axis, BHMatrix, Monomial, UMatrix};
pub use cyclo::Cyc;
pub use error::{Error, Result};
