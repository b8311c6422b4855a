//! Greedy training of shallow ridge-function expansions for PDEs.
//!
//! The crate discretizes a PDE loss (energy, penalized energy, PINN residual
//! or a convex nonlinear energy) with a quadrature rule and builds the
//! solution one neuron at a time with the orthogonal greedy algorithm (OGA)
//! or the relaxed greedy algorithm (RGA).
//!
//! ```no_run
//! use greedy_pde::experiments::{run, ExperimentConfig};
//!
//! let config = ExperimentConfig::preset("ex1-neumann").unwrap();
//! let report = run(&config).unwrap();
//! println!("{}", report.to_text());
//! ```

pub mod argmax;
pub mod dictionary;
pub mod error;
pub mod experiments;
pub mod greedy;
pub mod metrics;
pub mod problem;
pub mod quadrature;

pub use error::{Error, Result};
