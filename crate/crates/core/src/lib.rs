pub mod approx;
pub mod bayesian;
pub mod error;
pub mod game;
pub mod graph;
pub mod harness;
pub mod linprog;
pub mod recovery;
pub mod reductions;
pub mod rng;

pub use error::{Error, Result};
pub use game::{BimatrixGame, MixedProfile, RegretCertificate};
pub use graph::PlantedGraph;
