//! Exact intersection-theoretic engine for two-ray links of blow-ups of
//! rank-one Fano threefolds.

pub mod catalog;
pub mod lattice;
pub mod link;
pub mod rational;
pub mod report;
pub mod smallness;
