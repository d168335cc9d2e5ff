//! Directed networks with prescribed blockmodel structure, generated from
//! triad-type counts.
//!
//! Two generators are provided: [`rl::rl_generate`], a density-preserving
//! local search toward target counts, and [`ergm::mcmc_generate`], a
//! Metropolis-Hastings sampler over weighted triad terms. Results are
//! scored with pre-specified blockmodeling ([`fit`]).

pub mod blockmodel;
pub mod ergm;
pub mod error;
pub mod fit;
pub mod graph;
pub mod harness;
pub mod measures;
pub mod paths;
pub mod rl;
pub mod rng;
pub mod terms;
pub mod triad;

pub use blockmodel::{BlockType, BlockmodelKind, BlockmodelSpec, Image, LevelOfErrors, Partition};
pub use error::{Error, Result};
pub use graph::DirectedGraph;
pub use terms::{Statistic, TermSet, TermSetName};
pub use triad::{CensusDelta, TriadCensus, TriadType};
