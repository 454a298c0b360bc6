//! Zero counting for the harmonic family
//!
//! ```text
//! f_a(z) = a/(n+1) z^(n+1) - 1/n z^(-n) + 1/(n+1) conj(z)^(n+1) - a/n conj(z)^(-n) - 1
//! ```
//!
//! The critical curve of `f_a` is the unit circle and its image (the caustic) is an
//! affine image of a one-cusped epicycloid. The winding number `W` of the caustic
//! about the origin fixes the total number of zeros, `2(n - W) + 1`, and `W` only
//! changes at the critical parameter values where a right-side real-axis crossing
//! of the caustic passes through the origin.
//!
//! The crate computes all of these quantities and, independently, a certified zero
//! census built from argument-principle subdivision and Newton refinement.

pub mod caustic;
pub mod census;
pub mod cli;
mod error;
pub mod family;
pub mod output;
pub mod theorem;
pub mod winding;

pub use error::{Error, Result};
pub use family::FamilyParams;
