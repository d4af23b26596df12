//! Special functions and distributions: regularized incomplete beta and its
//! inverse, standard normal CDF/quantile, the exact null law of the sample
//! partial correlation, and the Fisher z-transform.

use crate::error::{Error, Result};

const LN_SQRT_TWO_PI: f64 = 0.918_938_533_204_672_7;
const SQRT_2: f64 = std::f64::consts::SQRT_2;
const FRAC_1_SQRT_PI: f64 = 0.564_189_583_547_756_3;

/// Shape parameters of a beta distribution; both strictly positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaParams {
    pub alpha_shape: f64,
    pub beta_shape: f64,
}

impl BetaParams {
    pub fn new(alpha_shape: f64, beta_shape: f64) -> Result<Self> {
        if !(alpha_shape > 0.0 && alpha_shape.is_finite())
            || !(beta_shape > 0.0 && beta_shape.is_finite())
        {
            return Err(Error::InvalidInput(format!(
                "beta shapes must be positive and finite, got ({alpha_shape}, {beta_shape})"
            )));
        }
        Ok(Self {
            alpha_shape,
            beta_shape,
        })
    }

    pub fn symmetric(shape: f64) -> Result<Self> {
        Self::new(shape, shape)
    }
}

/// Symmetric beta law governing one off-diagonal covariance entry (after the
/// affine map onto its positive-definiteness interval) and the shifted sample
/// partial correlation under the null: both shapes equal (n - N) / 2.
pub fn null_beta_params(n_obs: usize, n_vars: usize) -> Result<BetaParams> {
    if n_obs <= n_vars {
        return Err(Error::InvalidInput(format!(
            "need more observations than variables, got n = {n_obs}, N = {n_vars}"
        )));
    }
    BetaParams::symmetric((n_obs - n_vars) as f64 / 2.0)
}

/// Parameters of the exact null density of the sample partial correlation,
/// f(x) proportional to (1 - x^2)^{(n - N - 2)/2} on [-1, 1].
#[derive(Debug, Clone, Copy)]
pub struct NullCorrDensityParams {
    n_obs: usize,
    n_vars: usize,
}

impl NullCorrDensityParams {
    pub fn new(n_obs: usize, n_vars: usize) -> Result<Self> {
        if n_obs <= n_vars {
            return Err(Error::InvalidInput(format!(
                "need more observations than variables, got n = {n_obs}, N = {n_vars}"
            )));
        }
        Ok(Self { n_obs, n_vars })
    }

    pub fn n_obs(&self) -> usize {
        self.n_obs
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    /// The exponent parameter (n - N - 2) / 2, possibly half-integral.
    pub fn k(&self) -> f64 {
        (self.n_obs as f64 - self.n_vars as f64 - 2.0) / 2.0
    }

    fn beta_params(&self) -> BetaParams {
        // n > N is enforced at construction, so the shapes are positive.
        BetaParams {
            alpha_shape: (self.n_obs - self.n_vars) as f64 / 2.0,
            beta_shape: (self.n_obs - self.n_vars) as f64 / 2.0,
        }
    }
}

/// Lanczos approximation of ln Gamma for positive arguments.
fn ln_gamma(x: f64) -> f64 {
    #[allow(clippy::excessive_precision)] // published coefficient digits
    const COEF: [f64; 9] = [
        0.999_999_999_999_809_93,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_13,
        -176.615_029_162_140_59,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_571_6e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        // reflection
        let pi = std::f64::consts::PI;
        (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x)
    } else {
        let x = x - 1.0;
        let t = x + 7.5;
        let mut a = COEF[0];
        for (i, &c) in COEF.iter().enumerate().skip(1) {
            a += c / (x + i as f64);
        }
        LN_SQRT_TWO_PI + (x + 0.5) * t.ln() - t + a.ln()
    }
}

fn ln_beta(a: f64, b: f64) -> f64 {
    ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
}

/// Regularized incomplete beta function I_x(alpha, beta).
///
/// Continued-fraction evaluation (modified Lentz) with the symmetry switch at
/// the mean alpha / (alpha + beta).
pub fn reg_inc_beta(p: &BetaParams, x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::InvalidInput(format!(
            "incomplete beta argument must lie in [0, 1], got {x}"
        )));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x == 1.0 {
        return Ok(1.0);
    }
    let (a, b) = (p.alpha_shape, p.beta_shape);
    if x <= a / (a + b) {
        beta_cf_regularized(a, b, x)
    } else {
        Ok(1.0 - beta_cf_regularized(b, a, 1.0 - x)?)
    }
}

/// I_x(a, b) for x away from 1 via the standard continued fraction.
fn beta_cf_regularized(a: f64, b: f64, x: f64) -> Result<f64> {
    const MAX_ITER: usize = 400;
    const EPS: f64 = 1e-16;
    const TINY: f64 = 1e-300;

    let ln_prefix = a * x.ln() + b * (-x).ln_1p() - ln_beta(a, b);
    let prefix = ln_prefix.exp() / a;

    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=MAX_ITER {
        let mf = m as f64;
        let m2 = 2.0 * mf;
        let aa = mf * (b - mf) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + mf) * (qab + mf) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            return Ok((prefix * h).clamp(0.0, 1.0));
        }
    }
    Err(Error::Numerical(format!(
        "incomplete beta continued fraction did not converge for a={a}, b={b}, x={x}"
    )))
}

fn beta_pdf(p: &BetaParams, x: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        return 0.0;
    }
    ((p.alpha_shape - 1.0) * x.ln() + (p.beta_shape - 1.0) * (-x).ln_1p()
        - ln_beta(p.alpha_shape, p.beta_shape))
    .exp()
}

/// Inverse of the regularized incomplete beta: x with I_x(p) = prob.
///
/// Bisection-safeguarded Newton iteration; converges to |I_x - prob| well
/// below 1e-10 for any positive shapes.
pub fn beta_quantile(p: &BetaParams, prob: f64) -> Result<f64> {
    if !(prob > 0.0 && prob < 1.0) {
        return Err(Error::InvalidInput(format!(
            "quantile probability must lie in (0, 1), got {prob}"
        )));
    }
    let mut lo = 0.0f64;
    let mut hi = 1.0f64;
    let mut x = p.alpha_shape / (p.alpha_shape + p.beta_shape);
    for _ in 0..200 {
        let f = reg_inc_beta(p, x)? - prob;
        if f.abs() <= 1e-12 {
            return Ok(x);
        }
        if f > 0.0 {
            hi = x;
        } else {
            lo = x;
        }
        let pdf = beta_pdf(p, x);
        let newton = x - f / pdf;
        x = if pdf > 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if hi - lo <= 2.0 * f64::EPSILON * hi.max(1e-300) {
            return Ok(x);
        }
    }
    Err(Error::Numerical(format!(
        "beta quantile iteration did not converge for shapes ({}, {}), prob {prob}",
        p.alpha_shape, p.beta_shape
    )))
}

/// erf via its positive-term series (|x| small) or the Lentz continued
/// fraction for erfc (|x| large); near machine accuracy over the real line.
fn erfc(x: f64) -> f64 {
    if x < 0.0 {
        return 2.0 - erfc(-x);
    }
    if x <= 2.0 {
        1.0 - erf_series(x)
    } else {
        erfc_cf(x)
    }
}

/// erf(x) = 2x e^{-x^2}/sqrt(pi) * sum_k (2x^2)^k / (1*3*...*(2k+1))
fn erf_series(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    let x2 = x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 0.0;
    loop {
        k += 1.0;
        term *= 2.0 * x2 / (2.0 * k + 1.0);
        sum += term;
        if term < f64::EPSILON * sum {
            break;
        }
    }
    2.0 * x * (-x2).exp() * FRAC_1_SQRT_PI * sum
}

/// erfc(x) = e^{-x^2}/sqrt(pi) / (x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))
fn erfc_cf(x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut f = x;
    let mut c = x;
    let mut d = 0.0;
    for m in 1..200 {
        let a = m as f64 / 2.0;
        d = x + a * d;
        if d.abs() < TINY {
            d = TINY;
        }
        d = 1.0 / d;
        c = x + a / c;
        if c.abs() < TINY {
            c = TINY;
        }
        let del = c * d;
        f *= del;
        if (del - 1.0).abs() < f64::EPSILON {
            break;
        }
    }
    (-x * x).exp() * FRAC_1_SQRT_PI / f
}

/// Standard normal cumulative distribution function.
pub fn std_normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / SQRT_2)
}

/// Standard normal quantile (inverse CDF).
///
/// Rational initial approximation refined by one Newton step against the
/// erfc-based CDF; absolute error well below 1e-9.
pub fn std_normal_quantile(prob: f64) -> Result<f64> {
    if !(prob > 0.0 && prob < 1.0) {
        return Err(Error::InvalidInput(format!(
            "quantile probability must lie in (0, 1), got {prob}"
        )));
    }
    let x = normal_quantile_approx(prob);
    // Newton polish: x' = x - (Phi(x) - p) / phi(x)
    let pdf = (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt();
    if pdf > 0.0 {
        Ok(x - (std_normal_cdf(x) - prob) / pdf)
    } else {
        Ok(x)
    }
}

/// Piecewise rational approximation of the normal quantile (Acklam), relative
/// error about 1e-9 before polishing.
fn normal_quantile_approx(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969_683_028_665_376e1,
        2.209_460_984_245_205e2,
        -2.759_285_104_469_687e2,
        1.383_577_518_672_69e2,
        -3.066_479_806_614_716e1,
        2.506_628_277_459_239,
    ];
    const B: [f64; 5] = [
        -5.447_609_879_822_406e1,
        1.615_858_368_580_409e2,
        -1.556_989_798_598_866e2,
        6.680_131_188_771_972e1,
        -1.328_068_155_288_572e1,
    ];
    const C: [f64; 6] = [
        -7.784_894_002_430_293e-3,
        -3.223_964_580_411_365e-1,
        -2.400_758_277_161_838,
        -2.549_732_539_343_734,
        4.374_664_141_464_968,
        2.938_163_982_698_783,
    ];
    const D: [f64; 4] = [
        7.784_695_709_041_462e-3,
        3.224_671_290_700_398e-1,
        2.445_134_137_142_996,
        3.754_408_661_907_416,
    ];
    const P_LOW: f64 = 0.02425;

    if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        let q = (-2.0 * (-p).ln_1p()).sqrt();
        -(((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    }
}

/// CDF of the exact null density of the sample partial correlation.
///
/// The change of variable u = (x + 1) / 2 maps the density onto the symmetric
/// beta law of `null_beta_params`, so this is I_{(x+1)/2} of that law.
pub fn partial_corr_null_cdf(params: &NullCorrDensityParams, x: f64) -> Result<f64> {
    if !(-1.0..=1.0).contains(&x) {
        return Err(Error::InvalidInput(format!(
            "correlation argument must lie in [-1, 1], got {x}"
        )));
    }
    reg_inc_beta(&params.beta_params(), (x + 1.0) / 2.0)
}

/// Quantile of the exact null law of the sample partial correlation.
pub fn partial_corr_null_quantile(params: &NullCorrDensityParams, prob: f64) -> Result<f64> {
    Ok(2.0 * beta_quantile(&params.beta_params(), prob)? - 1.0)
}

/// Fisher z-transform with the sqrt(n) scaling: z = (sqrt(n)/2) ln((1+r)/(1-r)).
pub fn fisher_z(r: f64, n_obs: usize) -> Result<f64> {
    fisher_z_with_scale(r, (n_obs as f64).sqrt())
}

/// Fisher z-transform with a caller-chosen scale factor in place of sqrt(n).
///
/// Written as a difference of ln_1p terms so the transform is exactly
/// antisymmetric in r.
pub fn fisher_z_with_scale(r: f64, scale: f64) -> Result<f64> {
    if !(r > -1.0 && r < 1.0) {
        return Err(Error::InvalidInput(format!(
            "Fisher transform requires |r| < 1, got {r}"
        )));
    }
    Ok(scale * 0.5 * (r.ln_1p() - (-r).ln_1p()))
}
