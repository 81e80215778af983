//! Circuit construction and simulation for maximum-biclique search on
//! bipartite graphs.
//!
//! The pipeline: [`bigraph`] models graphs and the exact classical predicate,
//! [`circuit`] provides the gate set and the qubit layout, [`oracle`] builds
//! the reversible marking circuits and amplitude-amplification plans,
//! [`sim`] executes plans on a dense statevector or a basis-tracked engine,
//! and [`grover`] wraps everything into fixed-size and maximum searches.
//! [`cli`] backs the `qmbs` binary.

pub mod bigraph;
pub mod circuit;
pub mod cli;
pub mod grover;
pub mod oracle;
pub mod sim;
