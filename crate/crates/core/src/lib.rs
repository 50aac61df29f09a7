//! Random walks on symmetrically self-similar graphs built from a finite
//! cell graph: exact walk functions, the blow-up construction, iteration of
//! the transition function, the Green function at the origin and its
//! oscillating asymptotics, with brute-force oracles for checking.

pub mod asymptotics;
pub mod blowup;
pub mod cellgraph;
pub mod dynamics;
pub mod error;
pub mod exactalg;
pub mod extended;
pub mod fixtures;
pub mod greens;
pub mod oracle;
pub mod serde_util;
pub mod walkfn;

pub use asymptotics::{AsymptoticProfile, FitReport, RatioReport};
pub use blowup::{blow_up, BlowupGraph, ExportFormat};
pub use cellgraph::{load_cell_graph, AxiomReport, CellGraph};
pub use dynamics::{JuliaKind, JuliaVerdict};
pub use error::{Error, Result};
pub use exactalg::{ExtRational, Polynomial, RationalFunction};
pub use extended::BigComplex;
pub use greens::{CoefficientMode, GreenSeries, OmegaSamples, SingularDecomposition};
pub use oracle::{FiniteChain, PowerMode};
pub use walkfn::{ScalingParams, WalkFunctions};

/// Re-exported so downstream crates use the same big-number types.
pub use rug;
