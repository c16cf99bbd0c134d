//! Romu rotate-multiply pseudo-random generators and the tooling around them.
//!
//! * [`generators`]: bit-exact generators, their inverses, seeding and stream derivation.
//! * [`scaled`] and [`capacity`]: scaled-down variants, their measured capacity and its
//!   extrapolation.
//! * [`cycles`]: exhaustive cycle censuses of small state maps.
//! * [`mono_search`]: RomuMono32 d-values, seed-blocks and constant heuristics.
//! * [`risk`]: short-cycle and stream-overlap probabilities in the log2 domain.
//! * [`smoke`] and [`external`]: internal statistical smoke tests and the bridge to
//!   external test suites.
//! * [`emit`], [`dotplot`], [`bench`]: byte serialization, successive-pair plots and timing.
//!
//! The `parallel` feature (on by default) runs batch work on rayon; see [`exec`].
//!
//! These generators are invertible and must never be used for cryptography.

pub mod bench;
mod bitset;
pub mod capacity;
pub mod cycles;
pub mod dotplot;
pub mod emit;
pub mod error;
pub mod exec;
pub mod external;
pub mod fast;
pub mod generators;
pub mod mono_search;
#[cfg(test)]
mod properties;
pub mod risk;
pub mod scaled;
pub mod smoke;

pub use error::{Error, Result};
pub use generators::{
    make_stream, mod_inverse, rotl, rotr, seed_mono32, Family, GeneratorOutput, GeneratorSpec,
    Order, OutputRule, RomuState,
};
