//! Individual tests for a single edge hypothesis "the precision-matrix entry
//! (i, j) is zero": the conditionally exact test built from the beta law of
//! one off-diagonal covariance entry (in covariance space and in correlation
//! space), the exact partial-correlation test, and the asymptotic Fisher-z
//! test.

use crate::dist::{
    beta_quantile, fisher_z, null_beta_params, partial_corr_null_quantile, std_normal_quantile,
    NullCorrDensityParams,
};
use crate::error::{Error, Result};
use crate::matrix::{det_quadratic_coeffs, partial_correlation, SampleCovariance};

/// Which individual test decides an edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TestMethod {
    /// Conditionally exact test with beta-quantile thresholds (optimal
    /// unbiased).
    Neyman,
    /// Exact two-sided test on the sample partial correlation.
    PartialCorrExact,
    /// Asymptotic test on the Fisher z-transform of the partial correlation.
    FisherZ,
}

/// Configuration of one individual test.
#[derive(Debug, Clone, Copy)]
pub struct TestConfig {
    pub level: f64,
    pub method: TestMethod,
}

impl TestConfig {
    pub fn new(level: f64, method: TestMethod) -> Result<Self> {
        check_level(level)?;
        Ok(Self { level, method })
    }
}

/// Outcome of one individual test.
///
/// The acceptance interval is closed: a statistic exactly on a threshold
/// accepts. The tie set has probability zero under the continuous model.
#[derive(Debug, Clone, Copy)]
pub struct TestDecision {
    /// True = reject the zero-entry hypothesis (edge present).
    pub reject: bool,
    /// The test statistic.
    pub statistic: f64,
    /// Endpoints (low, high) of the acceptance interval.
    pub thresholds: (f64, f64),
}

impl TestDecision {
    fn decide(statistic: f64, lo: f64, hi: f64) -> Self {
        Self {
            reject: statistic < lo || statistic > hi,
            statistic,
            thresholds: (lo, hi),
        }
    }
}

fn check_level(level: f64) -> Result<()> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::InvalidInput(format!(
            "significance level must lie in (0, 1), got {level}"
        )));
    }
    Ok(())
}

fn check_pd(s: &SampleCovariance) -> Result<()> {
    if let Err(k) = s.matrix().cholesky_lower() {
        return Err(crate::matrix::not_positive_definite("sample covariance", k));
    }
    Ok(())
}

/// Acceptance thresholds (c1, c2) for the covariance entry s_ij itself:
/// c1 = x1 + (x2 - x1) q and c2 = x2 - (x2 - x1) q, where (x1, x2) is the
/// positive-definiteness interval of the entry and q is the (level/2)-quantile
/// of the symmetric beta law with shapes (n - N)/2.
pub fn neyman_thresholds_s_space(
    s: &SampleCovariance,
    i: usize,
    j: usize,
    level: f64,
) -> Result<(f64, f64)> {
    check_level(level)?;
    check_pd(s)?;
    let params = null_beta_params(s.n_obs(), s.n_vars())?;
    let q = beta_quantile(&params, level / 2.0)?;
    let quad = det_quadratic_coeffs(s, i, j)?;
    let width = quad.x2 - quad.x1;
    Ok((quad.x1 + width * q, quad.x2 - width * q))
}

/// The conditionally exact edge test in correlation space: accept iff
/// 2q - 1 <= r^{i,j} <= 1 - 2q. Equivalent to the covariance-space form of
/// `neyman_test_s_space` and to `partial_corr_exact_test`.
pub fn neyman_test(s: &SampleCovariance, i: usize, j: usize, level: f64) -> Result<TestDecision> {
    check_level(level)?;
    let r = partial_correlation(s, i, j)?.r;
    let params = null_beta_params(s.n_obs(), s.n_vars())?;
    let q = beta_quantile(&params, level / 2.0)?;
    Ok(TestDecision::decide(r, 2.0 * q - 1.0, 1.0 - 2.0 * q))
}

/// The same test carried out on the covariance entry s_ij against the
/// thresholds of `neyman_thresholds_s_space`. Retained as an independent
/// cross-check of `neyman_test`.
pub fn neyman_test_s_space(
    s: &SampleCovariance,
    i: usize,
    j: usize,
    level: f64,
) -> Result<TestDecision> {
    let (c1, c2) = neyman_thresholds_s_space(s, i, j, level)?;
    Ok(TestDecision::decide(s.get(i, j), c1, c2))
}

/// Exact two-sided test on the sample partial correlation: reject iff
/// |r^{i,j}| exceeds the (1 - level/2)-quantile of its exact null law.
pub fn partial_corr_exact_test(
    s: &SampleCovariance,
    i: usize,
    j: usize,
    level: f64,
) -> Result<TestDecision> {
    check_level(level)?;
    let r = partial_correlation(s, i, j)?.r;
    let params = NullCorrDensityParams::new(s.n_obs(), s.n_vars())?;
    let c = partial_corr_null_quantile(&params, 1.0 - level / 2.0)?;
    Ok(TestDecision::decide(r, -c, c))
}

/// Asymptotic test on z = (sqrt(n)/2) ln((1+r)/(1-r)) against standard normal
/// quantiles. A partial correlation that rounds to |r| = 1 carries an
/// infinite statistic and is treated as a rejection, not an error.
pub fn fisher_z_test(s: &SampleCovariance, i: usize, j: usize, level: f64) -> Result<TestDecision> {
    check_level(level)?;
    if s.n_obs() <= s.n_vars() {
        return Err(Error::InvalidInput(format!(
            "need more observations than variables, got n = {}, N = {}",
            s.n_obs(),
            s.n_vars()
        )));
    }
    let r = partial_correlation(s, i, j)?.r;
    let z = if r.abs() < 1.0 {
        fisher_z(r, s.n_obs())?
    } else {
        r.signum() * f64::INFINITY
    };
    let zc = std_normal_quantile(1.0 - level / 2.0)?;
    Ok(TestDecision::decide(z, -zc, zc))
}

/// Runs the test chosen by the configuration.
pub fn run_individual_test(
    s: &SampleCovariance,
    i: usize,
    j: usize,
    config: &TestConfig,
) -> Result<TestDecision> {
    match config.method {
        TestMethod::Neyman => neyman_test(s, i, j, config.level),
        TestMethod::PartialCorrExact => partial_corr_exact_test(s, i, j, config.level),
        TestMethod::FisherZ => fisher_z_test(s, i, j, config.level),
    }
}
