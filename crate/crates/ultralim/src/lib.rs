//! Exact-arithmetic toolkit for compactified word spaces over zero-dimensional
//! base spaces, Deaconu-Renault systems presented as branch atlases, the
//! associated inverse-limit shift system, and constructive pseudo-orbit
//! lifting and shadowing.
//!
//! Everything is dyadic and exact: distances are stored as [`level::Level`]
//! exponents (`2^-n` or `0`), points and words are eventually periodic and
//! carry canonical forms with decidable equality, and all enumerations
//! (bases, tuples) are frozen and documented so that metric values are
//! reproducible.

pub mod bits;
pub mod clopen;
pub mod convergence;
pub mod error;
pub mod eventually;
pub mod invlim;
pub mod level;
pub mod point;
pub mod sampling;
pub mod shadowing;
pub mod space;
pub mod suites;
pub mod systems;
pub mod words;

pub use bits::Bits;
pub use clopen::ClopenSet;
pub use error::{Error, Result};
pub use level::Level;
pub use point::{CantorPoint, Point};
pub use space::BaseSpace;
