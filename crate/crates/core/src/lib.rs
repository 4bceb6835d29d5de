//! Procedural generation and verification of abstract graph-reasoning
//! benchmarks: topology classification, symmetry classification,
//! spectral-gap regression and bridge counting.

pub mod automorphism;
pub mod bridges;
pub mod corpus;
pub mod dataset;
pub mod error;
pub mod graph;
pub mod layout;
pub mod render;
pub mod sample;
pub mod spectral;
pub mod spectral_gen;
pub mod symmetry;
pub mod topology;

pub use error::{Error, Result};
pub use graph::Graph;
