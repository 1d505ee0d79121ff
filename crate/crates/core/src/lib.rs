//! Linear two-class classifier trained through its Wolfe dual, together with
//! audits of the dual solution, Gaussian test beds and a multiclass engine.
//!
//! Everything is generic over [`Scalar`] (`f32` or `f64`); the aliases at the
//! crate root fix the scalar to `f64`.

pub mod dataset;
pub mod diagnostics;
pub mod document;
pub mod error;
pub mod experiment;
pub mod gaussian;
pub mod geometry;
pub mod json;
pub mod linalg;
pub mod model;
pub mod multiclass;
pub mod scalar;
pub mod solver;

pub use dataset::LabeledDataset;
pub use diagnostics::{diagnose, DiagnoseOptions, DiagnosticsReport};
pub use document::ModelDocument;
pub use error::{Error, Result};
pub use geometry::{Label, LinearLocus, Matrix};
pub use model::{fit, DecisionOutput, EigenlocusModel, ExtremePoint, MarginGeometry};
pub use scalar::Scalar;
pub use solver::{
    duality_gap, hard_margin_c, solve_dual, DualProblem, DualSolution, SolverOptions,
    HARD_MARGIN_EPS,
};

pub type Dataset = LabeledDataset<f64>;
pub type Model = EigenlocusModel<f64>;
pub type Problem = DualProblem<f64>;
pub type Solution = DualSolution<f64>;
pub type Options = SolverOptions<f64>;
pub type Locus = LinearLocus<f64>;
