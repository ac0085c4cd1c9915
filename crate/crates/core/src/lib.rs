//! Percolation under graph quotients.
//!
//! The crate provides lazily generated graphs ([`graph`]), group actions and
//! covering maps ([`cover`]), the exploratory enhancement model and its exact
//! enumeration oracle ([`enhance`]), the exploration-lifting coupling between a
//! graph and its quotient ([`couple`]), pivotality and surgery constructions
//! ([`pivotal`]) and a Monte Carlo harness ([`harness`]).

pub mod couple;
pub mod cover;
pub mod enhance;
pub mod graph;
pub mod harness;
pub mod pivotal;
pub mod rng;
