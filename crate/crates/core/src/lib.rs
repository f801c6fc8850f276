//! Rooted grid minors.
//!
//! Given a graph `G`, a root set `Z` of size `k`, and a pseudomodel of a
//! subgraph of the `n x n` grid in `G`, [`extract::extract`] either finds a
//! `g x g` subgrid whose model can be extended so that the first `k`
//! first-column branches each capture a root, or returns a separation of
//! order below `k` cutting the roots off a grid row. Every answer is
//! checkable with the validators in [`model`] and [`separation`], and the
//! exhaustive routines in [`oracle`] re-derive the claims on small inputs.

pub mod bundle;
pub mod error;
pub mod extract;
pub mod graph;
pub mod grid;
pub mod instance;
pub mod model;
pub mod oracle;
pub mod par;
pub mod report;
pub mod separation;
