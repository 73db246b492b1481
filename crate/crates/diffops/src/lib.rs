//! Exact computation in rings of differential operators with filtrations.
//!
//! Everything here is exact: coefficients are arbitrary-precision rationals
//! (or prime-field scalars in the characteristic-p toolkit), and every
//! certificate, dimension count and growth estimate is reproducible.
//!
//! The crate is organised around runnable examples; each one walks a major
//! capability end to end:
//!
//! * `weyl_arithmetic` - normal-form products, commutators and the
//!   conjugation identity for powers of a polynomial.
//! * `bernstein_dimensions` - weighted Bernstein level bases, dimension
//!   counting, slope comparison witnesses.
//! * `filtration_growth` - dimension sequences, degree/multiplicity fits,
//!   reindexing and domination certificates.
//! * `invariant_rings` - finite matrix groups, Reynolds averaging,
//!   differential powers and the differential signature.
//! * `simplicity_certificates` - reduction-to-unit moves and membership
//!   certificates for linear simplicity constants.
//! * `localizations` - operator actions on R_f and on R_f[s] f^s, the Theta
//!   homomorphism, specialisation.
//! * `bernstein_sato` - the functional-equation solver with its
//!   integer-specialisation verifier.
//! * `char_p_splitting` - divided-power operators, splitting ideals,
//!   F-purity and F-regularity diagnostics, Veronese class counts.
//!
//! Run one with `cargo run --example weyl_arithmetic`.  The same operations
//! are scriptable through the thin `diffops` binary; see the README.

pub mod bernstein;
pub mod charp;
pub mod cli;
pub mod dmod;
pub mod error;
pub mod filtration;
pub mod invariants;
pub mod linalg;
pub mod mono;
pub mod poly;
pub mod rat;
pub mod simplicity;
pub mod spoly;
pub mod text;
pub mod weyl;

pub use error::{Error, Result};
