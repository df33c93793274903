//! Computational toolkit for translation surfaces and their deformations:
//! period coordinates, the SL(2,R)/horocycle/geodesic actions, tremor
//! deformations along signed foliation cocycles, the genus-2 locus of two
//! tori glued along a slit, straightline flow with first-return interval
//! exchanges and foliation-cocycle cones, and convex-covering estimators
//! for box-counting dimension experiments.

pub mod builders;
pub mod cochain;
pub mod cocycle;
pub mod convex;
pub mod cover;
pub mod eigenform;
pub mod error;
pub mod flip;
pub mod flow;
pub mod geom;
pub mod homology;
pub mod linalg;
pub mod linear;
pub mod loops;
pub mod num;
pub mod saddle;
pub mod specfile;
pub mod surface;
pub mod transverse;
pub mod tremor;

pub use error::{Error, Result};
pub use geom::{Mat2, Vec2};
pub use num::{Rat, Scalar};
pub use surface::{Dart, TranslationSurface, Tri, Triangulation};

/// Deterministic, platform-independent PRNG from an explicit 64-bit seed.
pub fn rng(seed: u64) -> rand_chacha::ChaCha8Rng {
    use rand::SeedableRng;
    rand_chacha::ChaCha8Rng::seed_from_u64(seed)
}
