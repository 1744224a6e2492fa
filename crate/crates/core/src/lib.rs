//! Trajectory simulation of non-Markovian stochastic Schrödinger equations
//! for a two-level atom coupled to a discrete-mode bath.
//!
//! The crate covers colored-noise synthesis ([`bath`]), the system model and
//! exact reference solutions ([`models`]), the scalar closure for the memory
//! term ([`ansatz`]), linear and normalized steppers for coherent, quadrature,
//! heterodyne and homodyne unravelings ([`sse`]), and deterministic parallel
//! averaging ([`ensemble`]).
//!
//! ```no_run
//! use nmsse::config::ScenarioConfig;
//! use nmsse::ensemble::{compare, run_ensemble};
//! use nmsse::run::exact_curve;
//! use nmsse::sse::Scenario;
//!
//! let cfg = ScenarioConfig::default();
//! let result = run_ensemble(&Scenario::new(&cfg)?, 1000, 8)?;
//! let exact = exact_curve(cfg.g, cfg.delta, cfg.grid()?);
//! let report = compare(&result, &exact, 0.15)?;
//! println!("max deviation {}", report.max_component());
//! # Ok::<(), nmsse::Error>(())
//! ```

pub mod ansatz;
pub mod bath;
pub mod config;
pub mod ensemble;
pub mod error;
pub mod grid;
pub mod linalg;
pub mod models;
pub mod output;
pub mod rng;
pub mod run;
pub mod sse;

pub use error::{Error, Result};
pub use grid::TimeGrid;
