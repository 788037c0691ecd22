//! Coherent information, decoder success bounds and classical spin-model
//! mappings for small CSS codes under Pauli noise.
//!
//! The crate is organised bottom-up: [`f2linalg`] provides packed GF(2)
//! linear algebra, [`css_code`] builds codes with their logical operators
//! and sector maps, [`code_zoo`] constructs the standard families,
//! [`channels`] enumerates errors into sector distributions, [`info`]
//! evaluates information-theoretic quantities on those distributions,
//! [`statmech`] builds the dual random-bond models and [`mc`] samples them.

pub mod channels;
pub mod code_zoo;
pub mod css_code;
pub mod error;
pub mod f2linalg;
pub mod info;
pub mod mc;
pub mod statmech;

pub use css_code::{CodeDistance, CssCode, SectorKey};
pub use error::{Error, Result};
pub use f2linalg::{BitMatrix, BitVector};
