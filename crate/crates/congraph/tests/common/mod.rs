//! Helpers shared by the integration test suites.
#![allow(dead_code)]

use congraph::{sample_covariance, sample_mvn, MvnModel, SampleCovariance, SymMatrix};
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform double strictly inside (0, 1).
pub fn uniform(rng: &mut ChaCha8Rng) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / 9007199254740992.0)
}

pub fn uniform_in(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * uniform(rng)
}

/// Random symmetric matrix with entries uniform in [-1, 1].
pub fn random_symmetric(rng: &mut ChaCha8Rng, dim: usize) -> SymMatrix {
    let mut m = SymMatrix::zeros(dim);
    for i in 0..dim {
        for j in i..dim {
            m.set(i, j, uniform_in(rng, -1.0, 1.0));
        }
    }
    m
}

/// Random symmetric positive definite matrix L L' with a diagonal bounded
/// away from zero.
pub fn random_spd(rng: &mut ChaCha8Rng, dim: usize) -> SymMatrix {
    let mut l = vec![0.0; dim * dim];
    for i in 0..dim {
        for j in 0..=i {
            l[i * dim + j] = if i == j {
                uniform_in(rng, 0.3, 1.5)
            } else {
                uniform_in(rng, -0.8, 0.8)
            };
        }
    }
    let mut m = SymMatrix::zeros(dim);
    for i in 0..dim {
        for j in i..dim {
            let mut s = 0.0;
            for k in 0..dim {
                s += l[i * dim + k] * l[j * dim + k];
            }
            m.set(i, j, s);
        }
    }
    m
}

/// Sample covariance of n draws from a zero-mean Gaussian with the given
/// covariance; positive definite with probability one for n >= dim + 1.
pub fn wishart_covariance(
    rng: &mut ChaCha8Rng,
    covariance: SymMatrix,
    n: usize,
) -> SampleCovariance {
    let model = MvnModel::new(vec![0.0; covariance.dim()], covariance).unwrap();
    let data = sample_mvn(&model, n, rng).unwrap();
    sample_covariance(&data).unwrap()
}

/// Sample covariance of n standard normal draws over `dim` variables.
pub fn null_covariance(rng: &mut ChaCha8Rng, dim: usize, n: usize) -> SampleCovariance {
    wishart_covariance(rng, SymMatrix::identity(dim), n)
}
