//! Rank/select bit vectors.
//!
//! [`RankBitVector`] is a plain directory-backed vector used as an oracle and
//! as an uncompressed backend. [`PlaBitVector`] stores one-positions as a
//! piecewise linear approximation and supports appends.

mod packed;
mod pla;
mod rank;

pub use packed::{PackedArray, PackedBits};
pub use pla::{PlaBitVector, PlaConfig, DEFAULT_CORRECTION_BITS, DEFAULT_DELTA};
pub use rank::RankBitVector;
