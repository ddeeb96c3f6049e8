//! Band/gap structure of periodic Jacobi matrices and numerical checks of
//! sharp lower bounds on the total gap length.
//!
//! Band edges are computed twice, independently: as eigenvalues of the
//! `k = 0` and `k = pi` Floquet matrices ([`bands`], [`eigen`]) and as roots
//! of `Delta(lambda)^2 = 4` for the transfer-matrix discriminant
//! ([`discriminant`]).

pub mod bands;
pub mod cli;
pub mod discriminant;
pub mod eigen;
pub mod error;
pub mod estimates;
pub mod fuzz;
pub mod instance;
pub mod perturbation;
pub mod report;

pub use bands::{
    band_structure, cross_check, floquet_matrix, Band, Boundary, Gap, Spectrum, SpectrumSummary,
};
pub use discriminant::{
    band_edges_by_bisection, band_edges_by_transfer_matrix, discriminant, dispersion, level_count,
    transfer_matrix,
};
pub use eigen::{symmetric_eigenvalues, SymmetricMatrix};
pub use error::{Error, Result};
pub use estimates::{check_estimates, estimate_rhs, EstimateReport, InequalityId};
pub use fuzz::{fuzz_estimates, random_instance, sharpness_search, FuzzConfig, FuzzReport};
pub use instance::PeriodicJacobi;
pub use perturbation::{first_order_prediction, h_matrix, theorem1_instance, theorem1_report};
