//! Fixed-precision p-adic arithmetic and the dynamical systems built on it.
//!
//! The crate is organized around one pipeline: digit sequences for an odd
//! prime p ([`symbolic`]), the p-adic integers they encode ([`padic`]), the
//! skew product on Z_p x [0,1) that consumes digits one at a time
//! ([`solenoid`]), statistics that decide whether an orbit equidistributes
//! ([`equidist`]), and the digit-sum vanishing criterion with its
//! Stickelberger coefficient table ([`criterion`]).
//!
//! Everything is a pure function on immutable values: no operation mutates
//! its input, and all randomness comes from the counter-based generator in
//! [`prng`], so identical seeds reproduce identical results on any platform
//! and at any thread count.
//!
//! Precision is a budget, never an approximation. A `PadicInt` knows N
//! digits; asking for digit N or beyond is a hard [`Error::PrecisionExhausted`],
//! not a silent zero, and arithmetic propagates the minimum precision of its
//! operands.

pub mod cli;
pub mod criterion;
pub mod equidist;
pub mod padic;
pub mod prng;
pub mod solenoid;
pub mod symbolic;

mod error;

pub use error::Error;

pub type Result<T> = std::result::Result<T, Error>;
