//! Multiplexer-tree optimization for Yosys JSON netlists.
//!
//! The crate reads a gate-level module, extracts its multiplexer trees,
//! and shrinks them three ways: context propagation along tree paths,
//! SAT-backed reachability queries over pruned sub-graphs, and a full
//! rebuild of recognized case statements through reduced decision
//! diagrams. Area is measured as AND gates in an and-inverter graph,
//! and every rewrite can be certified against the original module by
//! exhaustive simulation or a SAT miter.
//!
//! Mux polarity follows Yosys throughout: `Y = S ? B : A`. Parallel
//! muxes are one-hot; overlapping select bits read as zero, not as a
//! priority chain.

pub mod aig;
pub mod eval;
pub mod json;
pub mod muxtree;
pub mod netlist;
pub mod pipeline;
pub mod restructure;
pub mod sat;
pub mod subsat;
