//! walkforge: exact quantum-circuit synthesis for continuous-time quantum
//! walks on composite graphs.
//!
//! The walk on a graph with adjacency matrix `A` evolves a state by
//! `U(t) = exp(-i t γ A)`. For the graph families handled here the evolution
//! fast-forwards: the emitted circuit has a fixed gate structure for every
//! `t`, with the time dependence confined to phase-gate angles. The crate
//! bundles the graph constructors, a dense spectral oracle used as ground
//! truth, the gate-level IR, the synthesizer, an expression parser, and a
//! verification harness that checks every emitted circuit against the
//! oracle.

pub mod circuit;
pub mod error;
pub mod graph;
pub mod oracle;
pub mod parse;
pub mod synth;
pub mod verify;

pub use circuit::{Circuit, Control, Gate, GateKind, Polarity};
pub use error::{Result, WalkError};
pub use graph::{Graph, InterdependentPair, WalkParams};
pub use parse::parse_expr;
pub use synth::{graph_of, synth, WalkExpr};
