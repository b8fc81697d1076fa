//! Exact and approximate counting of graph retractions, list homomorphisms,
//! surjective homomorphisms and compactions, with the gadget constructions
//! used to relate them.

pub mod approx;
pub mod blocked;
pub mod classify;
pub mod count;
pub mod csp;
pub mod error;
pub mod gadget;
pub mod graph;
pub mod hom_type;
pub mod io;
pub mod rng;
pub mod verify;

pub use error::{Error, Result};
pub use graph::{Block, BlockedInstance, Coupling, DiGraph, Graph, GraphBuilder, ListedInstance};
