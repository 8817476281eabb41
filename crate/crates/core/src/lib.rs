//! Web information extraction fabric.
//!
//! - [`wetdl`]: the XML task language.
//! - [`dataflow`]: compiling task networks into plans and running them.
//! - [`operators`]: the generic services a network is built from.
//! - [`ierel`]: example-driven wrapper learning by context generalization.
//! - [`adapt`]: adaptation policies and reconfiguration planning.
//! - [`evalkit`]: synthetic sources, scoring and result tables.

pub mod document;
pub mod markup;
pub mod xml;

pub mod adapt;
pub mod dataflow;
pub mod evalkit;
pub mod ierel;
pub mod operators;
pub mod wetdl;
