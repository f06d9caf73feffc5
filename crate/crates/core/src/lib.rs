//! Hurwitz orbits of genus-one Lefschetz monodromy factorizations.
//!
//! Factorizations are tuples of torus Dehn twist powers over a disk or a
//! sphere. The crate enumerates their Hurwitz orbits under the braid
//! group, certifies infinite orbits, cross-checks finite indices by coset
//! enumeration, and checks the hyperelliptic relations on homology.

mod json_int;

pub mod braid;
pub mod canonical;
pub mod certify;
pub mod coset;
pub mod hurwitz;
pub mod orbit;
pub mod sl2;
pub mod symplectic;

pub use braid::BraidWord;
pub use canonical::CanonicalKey;
pub use certify::InfinityCertificate;
pub use hurwitz::{Base, Direction, Factorization};
pub use orbit::{OrbitGraph, OrbitOptions};
pub use sl2::{IntMatrix2, TorusCurve, TwistPower};
