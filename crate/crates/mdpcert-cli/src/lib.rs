//! File formats and query grammar of the `mdpcert` command line tool.
//!
//! The binary in this crate wires these onto the solver and checker crates;
//! keeping them in a library makes the formats testable end to end.

pub mod cert_format;
pub mod model_format;
pub mod query;
pub mod rational;
