//! Concentration graph selection for Gaussian data.
//!
//! Given a sample from a multivariate normal distribution, the crate decides
//! for every pair of variables whether the corresponding entry of the
//! precision (inverse covariance) matrix is zero, and assembles the decisions
//! into an undirected graph. Three individual tests are available:
//!
//! - an exact conditional test whose thresholds are beta quantiles placed on
//!   the positive-definiteness interval of one covariance entry (optimal
//!   among unbiased tests, [`individual::neyman_test`]);
//! - the equivalent exact two-sided test on the sample partial correlation
//!   ([`individual::partial_corr_exact_test`]);
//! - the asymptotic Fisher-z test ([`individual::fisher_z_test`]).
//!
//! [`selection::select_graph`] runs one test per pair at the Bonferroni-split
//! level so the family-wise error rate stays below the family level, and
//! [`simulation::estimate_fwer`] measures that error rate as a function of
//! the sample size with reproducible parallel Monte-Carlo.

pub mod cli;
pub mod dist;
pub mod error;
pub mod individual;
pub mod matrix;
pub mod selection;
pub mod simulation;

pub use dist::{
    beta_quantile, fisher_z, fisher_z_with_scale, null_beta_params, partial_corr_null_cdf,
    partial_corr_null_quantile, reg_inc_beta, std_normal_cdf, std_normal_quantile, BetaParams,
    NullCorrDensityParams,
};
pub use error::{Error, Result};
pub use individual::{
    fisher_z_test, neyman_test, neyman_test_s_space, neyman_thresholds_s_space,
    partial_corr_exact_test, run_individual_test, TestConfig, TestDecision, TestMethod,
};
pub use matrix::{
    det_quadratic_coeffs, partial_correlation, partial_correlation_matrix, sample_covariance,
    sample_covariance_with_divisor, CovarianceDivisor, ObservationMatrix, PartialCorrelation,
    QuadCoeffs, SampleCovariance, SymMatrix,
};
pub use selection::{
    count_false_edges, individual_level, pair_count, select_graph, select_graph_from_covariance,
    AdjacencyMatrix, ProcedureConfig, ProcedureMethod,
};
pub use simulation::{
    estimate_fwer, replication_rng, sample_mvn, true_graph, FwerCurve, FwerExperiment, FwerRow,
    MvnModel, DEFAULT_ZERO_TOL,
};
