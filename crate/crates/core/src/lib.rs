//! Digit-indexed q-ary error-correcting codes.
//!
//! The crate builds linear block codes whose parity checks are tied to the
//! base-p digits of each position's index:
//!
//! * [`prototype`]: the SEC-DED code `[p^r, p^r - r - 1, 3]_p` for any prime p.
//! * [`a1`]: the ternary adaptive-length SEC-DED code keeping one index per inverse pair.
//! * [`a2`]: the ternary distance-4 code built from 3-wise independent index sets,
//!   plus its sparse variant.
//! * [`nwxli`]: codes from any certified k-wise independent index set, including
//!   the ternary Golay code.
//!
//! [`oracles`] holds brute-force certifiers and [`channel`] a seeded
//! q-ary symmetric channel simulator.

pub mod a1;
pub mod a2;
pub mod channel;
pub mod code_model;
pub mod digit_arith;
pub mod error;
pub mod nwxli;
pub mod oracles;
pub mod prototype;
pub mod wxli;

pub use code_model::{
    Codec, CodeSpec, Codeword, Correction, DecodeOutcome, Decoded, Family, Label, Position, Role,
};
pub use digit_arith::DigitVec;
pub use error::{CodeError, Result};
