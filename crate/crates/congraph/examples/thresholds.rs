//! Prints the acceptance thresholds of the three individual tests across a
//! range of sample sizes, and checks that the exact correlation threshold
//! equals 1 - 2q.
//!
//! Run with: cargo run --example thresholds

use congraph::{
    beta_quantile, fisher_z, null_beta_params, partial_corr_null_quantile, std_normal_quantile,
    NullCorrDensityParams,
};

fn main() {
    let n_vars = 10;
    let alpha = 0.05;
    println!("individual level alpha = {alpha}, N = {n_vars} variables\n");
    println!(
        "{:>5} {:>8} {:>12} {:>12} {:>14} {:>12}",
        "n", "K", "q", "1 - 2q", "exact c", "z implies"
    );
    for n_obs in [11, 12, 15, 20, 40, 100, 400] {
        let k = (n_obs as f64 - n_vars as f64 - 2.0) / 2.0;
        let beta = null_beta_params(n_obs, n_vars).unwrap();
        let q = beta_quantile(&beta, alpha / 2.0).unwrap();
        let c = partial_corr_null_quantile(
            &NullCorrDensityParams::new(n_obs, n_vars).unwrap(),
            1.0 - alpha / 2.0,
        )
        .unwrap();
        assert!((c - (1.0 - 2.0 * q)).abs() < 1e-9);
        // the Fisher test rejects iff |r| exceeds this implied value
        let zc = std_normal_quantile(1.0 - alpha / 2.0).unwrap();
        let implied = inverse_fisher(zc, n_obs);
        println!(
            "{n_obs:>5} {k:>8.1} {q:>12.6} {:>12.6} {c:>14.6} {implied:>12.6}",
            1.0 - 2.0 * q
        );
    }
    println!(
        "\nfisher z threshold at alpha = {alpha}: {}",
        std_normal_quantile(1.0 - alpha / 2.0).unwrap()
    );
    println!("note how the implied Fisher cut sits below the exact one for small n;");
    println!("that is the anti-conservative regime the simulations quantify.");
}

/// |r| whose Fisher statistic equals z at the given sample size.
fn inverse_fisher(z: f64, n_obs: usize) -> f64 {
    // solve fisher_z(r, n) = z by bisection
    let mut lo = 0.0;
    let mut hi = 1.0 - 1e-12;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if fisher_z(mid, n_obs).unwrap() < z {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
