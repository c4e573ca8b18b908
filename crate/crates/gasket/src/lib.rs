//! Unique-coding structure of fat Sierpinski gaskets.
//!
//! A planar gasket is generated by the maps `x ↦ (x + d)/β` over the digit
//! triangle `Ω_M = {(i,j) : i+j ≤ M}` with `1 < β < M+1`, so the pieces
//! overlap and points can have many codings. This crate computes and
//! certifies the two critical bases that govern how many:
//!
//! * `β_G(M)` — below it the set of uniquely coded points is finite,
//! * `β_c(M)` — above it that set has positive Hausdorff dimension,
//!
//! together with the machinery around them: quasi-greedy expansions and
//! their inverse, Thue–Morse block towers and the base ladders they induce,
//! lexicographic membership tests for the intrinsic univoque set, coding
//! multiplicity by branch and bound, subshift dimension bounds, and SVG
//! rendering of the first-generation geometry.
//!
//! All real numbers flow through [`interval::RealInterval`], an
//! arbitrary-precision dyadic interval type with directed rounding, so every
//! reported value is a certified enclosure.

pub mod cli;
pub mod critical;
pub mod expansion;
pub mod geometry;
pub mod interval;
pub mod sft;
pub mod symbolic;
pub mod tm;
pub mod univoque;

pub use expansion::Beta;
pub use interval::{Dyadic, RealInterval};
