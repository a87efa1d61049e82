//! Source-normalized journal impact indicators.
//!
//! The crate covers the whole pipeline: building a resolved [`corpus`],
//! selecting the citing journals ([`selection`]), computing RIP, original and
//! revised SNIP and the related source-normalized variants ([`indicators`]),
//! and a synthetic-corpus laboratory for checking the normalization
//! properties of those indicators ([`synthlab`]).

pub mod corpus;
pub mod error;
pub mod exact;
pub mod fixtures;
pub mod indicators;
pub mod selection;
pub mod synthlab;

pub use error::{Error, Result};
