//! Monte-Carlo harness: multivariate normal sampling, ground-truth graphs
//! from a model's precision matrix, and family-wise error rate estimation
//! over a grid of sample sizes with reproducible parallel random streams.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::matrix::{ObservationMatrix, SymMatrix};
use crate::selection::{
    count_false_edges, select_graph, AdjacencyMatrix, ProcedureConfig, ProcedureMethod,
};

/// Relative threshold below which a precision-matrix entry counts as zero.
pub const DEFAULT_ZERO_TOL: f64 = 1e-12;

/// Multivariate normal model N(mu, lambda) with a positive definite
/// covariance, checked at construction.
#[derive(Debug, Clone)]
pub struct MvnModel {
    mean: Vec<f64>,
    covariance: SymMatrix,
    chol_lower: Vec<f64>,
}

impl MvnModel {
    pub fn new(mean: Vec<f64>, covariance: SymMatrix) -> Result<Self> {
        let dim = covariance.dim();
        if dim < 2 {
            return Err(Error::InvalidInput(format!(
                "model needs at least 2 variables, got {dim}"
            )));
        }
        if mean.len() != dim {
            return Err(Error::InvalidInput(format!(
                "mean length {} does not match covariance dimension {dim}",
                mean.len()
            )));
        }
        let chol_lower = covariance
            .cholesky_lower()
            .map_err(|k| crate::matrix::not_positive_definite("model covariance", k))?;
        Ok(Self {
            mean,
            covariance,
            chol_lower,
        })
    }

    /// Zero-mean model with identity covariance.
    pub fn standard(dim: usize) -> Result<Self> {
        Self::new(vec![0.0; dim], SymMatrix::identity(dim))
    }

    pub fn n_vars(&self) -> usize {
        self.covariance.dim()
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    pub fn covariance(&self) -> &SymMatrix {
        &self.covariance
    }

    /// The precision matrix, the inverse of the covariance.
    pub fn precision(&self) -> SymMatrix {
        self.covariance
            .inverse_spd()
            .expect("covariance was verified positive definite at construction")
    }
}

/// Ground-truth graph of a model: an edge wherever the precision entry is
/// nonzero relative to the largest entry.
pub fn true_graph(model: &MvnModel, zero_tol: f64) -> AdjacencyMatrix {
    let p = model.precision();
    let dim = p.dim();
    let mut scale = 0.0f64;
    for i in 0..dim {
        for j in 0..dim {
            scale = scale.max(p.get(i, j).abs());
        }
    }
    let mut g = AdjacencyMatrix::empty(dim);
    for i in 0..dim {
        for j in (i + 1)..dim {
            g.set_edge(i, j, p.get(i, j).abs() > zero_tol * scale);
        }
    }
    g
}

/// Uniform double strictly inside (0, 1), 53-bit resolution.
#[inline]
pub(crate) fn uniform_open01<R: RngCore>(rng: &mut R) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / 9007199254740992.0)
}

/// Standard normal variate via the inverse CDF applied to a uniform draw,
/// so streams are deterministic across platforms.
#[inline]
pub(crate) fn standard_normal<R: RngCore>(rng: &mut R) -> f64 {
    crate::dist::std_normal_quantile(uniform_open01(rng)).expect("uniform draw lies in (0, 1)")
}

/// Draws n observations from the model: each row is mu + L z with L the lower
/// Cholesky factor of the covariance and z i.i.d. standard normal.
pub fn sample_mvn<R: RngCore>(
    model: &MvnModel,
    n: usize,
    rng: &mut R,
) -> Result<ObservationMatrix> {
    if n < 2 {
        return Err(Error::InvalidInput(format!(
            "need at least 2 observations, got {n}"
        )));
    }
    let dim = model.n_vars();
    let l = &model.chol_lower;
    let mut data = vec![0.0; n * dim];
    let mut z = vec![0.0; dim];
    for t in 0..n {
        for zi in z.iter_mut() {
            *zi = standard_normal(rng);
        }
        let row = &mut data[t * dim..(t + 1) * dim];
        for i in 0..dim {
            let mut acc = model.mean[i];
            for k in 0..=i {
                acc += l[i * dim + k] * z[k];
            }
            row[i] = acc;
        }
    }
    Ok(ObservationMatrix::from_raw(n, dim, data))
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Independent generator for one replication, keyed by
/// (seed, method, n, replication) so results do not depend on scheduling.
pub fn replication_rng(
    seed: u64,
    method: ProcedureMethod,
    n: usize,
    replication: u64,
) -> ChaCha8Rng {
    let mut state = seed;
    let mut key = [0u8; 32];
    for chunk in key.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    let method_id: u64 = match method {
        ProcedureMethod::Delta1Fisher => 0,
        ProcedureMethod::Delta2Neyman => 1,
    };
    debug_assert!(n < (1 << 22) && replication < (1 << 40));
    let stream = (method_id << 62) | ((n as u64) << 40) | replication;
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(stream);
    rng
}

/// One Monte-Carlo experiment: a model, a grid of sample sizes, a family
/// level, a replication budget, and the procedures to compare.
#[derive(Debug, Clone)]
pub struct FwerExperiment {
    model: MvnModel,
    n_grid: Vec<usize>,
    family_level: f64,
    replications: usize,
    seed: u64,
    methods: Vec<ProcedureMethod>,
    non_pd_as_error: bool,
}

impl FwerExperiment {
    pub fn new(
        model: MvnModel,
        n_grid: Vec<usize>,
        family_level: f64,
        replications: usize,
        seed: u64,
        methods: Vec<ProcedureMethod>,
    ) -> Result<Self> {
        if n_grid.is_empty() {
            return Err(Error::InvalidInput("empty sample-size grid".into()));
        }
        let dim = model.n_vars();
        for &n in &n_grid {
            if n < dim + 1 {
                return Err(Error::InvalidInput(format!(
                    "grid sample size {n} is below N + 1 = {}",
                    dim + 1
                )));
            }
        }
        if !(family_level > 0.0 && family_level < 1.0) {
            return Err(Error::InvalidInput(format!(
                "family level must lie in (0, 1), got {family_level}"
            )));
        }
        if replications == 0 {
            return Err(Error::InvalidInput("need at least 1 replication".into()));
        }
        if methods.is_empty() {
            return Err(Error::InvalidInput("no procedures selected".into()));
        }
        Ok(Self {
            model,
            n_grid,
            family_level,
            replications,
            seed,
            methods,
            non_pd_as_error: false,
        })
    }

    /// Count replications with a non-positive-definite sample covariance as
    /// family-wise errors instead of excluding them from the denominator.
    pub fn with_non_pd_as_error(mut self, flag: bool) -> Self {
        self.non_pd_as_error = flag;
        self
    }

    pub fn model(&self) -> &MvnModel {
        &self.model
    }

    pub fn n_grid(&self) -> &[usize] {
        &self.n_grid
    }
}

/// One (method, n) point of an estimated FWER curve.
#[derive(Debug, Clone, Copy)]
pub struct FwerRow {
    pub method: ProcedureMethod,
    pub n_obs: usize,
    /// Fraction of replications with at least one false edge.
    pub fwer: f64,
    /// Replications entering the denominator.
    pub replications: usize,
    /// Binomial standard error sqrt(p (1 - p) / replications).
    pub std_error: f64,
    /// Replications dropped (or counted as errors) for a degenerate sample
    /// covariance.
    pub failures: usize,
}

/// Estimated FWER as a function of the sample size, per procedure.
#[derive(Debug, Clone)]
pub struct FwerCurve {
    rows: Vec<FwerRow>,
}

impl FwerCurve {
    pub fn rows(&self) -> &[FwerRow] {
        &self.rows
    }

    /// CSV rendering with header `method,n,fwer,reps,stderr,failures`.
    /// Floating-point fields print with full round-trip precision.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("method,n,fwer,reps,stderr,failures\n");
        for row in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                row.method.label(),
                row.n_obs,
                row.fwer,
                row.replications,
                row.std_error,
                row.failures
            ));
        }
        out
    }

    pub fn write_csv(&self, path: &std::path::Path) -> Result<()> {
        std::fs::write(path, self.to_csv())?;
        Ok(())
    }
}

/// Runs the experiment: for every (method, n) it draws `replications`
/// independent samples, selects a graph, and counts replications with at
/// least one false edge against the model's true graph.
///
/// Replication r of a given (method, n) uses a generator derived from
/// (seed, method, n, r), so the estimate is identical for any worker count
/// and any execution order. Replications whose sample covariance is not
/// positive definite are reported in the `failures` column; by default they
/// are excluded from the denominator.
pub fn estimate_fwer(experiment: &FwerExperiment) -> Result<FwerCurve> {
    let truth = true_graph(&experiment.model, DEFAULT_ZERO_TOL);
    let mut rows = Vec::with_capacity(experiment.methods.len() * experiment.n_grid.len());
    for &method in &experiment.methods {
        let config = ProcedureConfig::new(experiment.family_level, method)?;
        for &n in &experiment.n_grid {
            let outcomes: Vec<u8> = (0..experiment.replications)
                .into_par_iter()
                .map(|rep| -> Result<u8> {
                    let mut rng = replication_rng(experiment.seed, method, n, rep as u64);
                    let data = sample_mvn(&experiment.model, n, &mut rng)?;
                    match select_graph(&data, &config) {
                        Ok(graph) => {
                            let (false_pos, _) = count_false_edges(&graph, &truth)?;
                            Ok(u8::from(false_pos > 0))
                        }
                        Err(Error::DegenerateMatrix(_)) => Ok(2),
                        Err(e) => Err(e),
                    }
                })
                .collect::<Result<Vec<u8>>>()?;
            let failures = outcomes.iter().filter(|&&o| o == 2).count();
            let errors = outcomes.iter().filter(|&&o| o == 1).count();
            let (numerator, denominator) = if experiment.non_pd_as_error {
                (errors + failures, experiment.replications)
            } else {
                (errors, experiment.replications - failures)
            };
            let fwer = if denominator > 0 {
                numerator as f64 / denominator as f64
            } else {
                0.0
            };
            let std_error = if denominator > 0 {
                (fwer * (1.0 - fwer) / denominator as f64).sqrt()
            } else {
                0.0
            };
            rows.push(FwerRow {
                method,
                n_obs: n,
                fwer,
                replications: denominator,
                std_error,
                failures,
            });
        }
    }
    Ok(FwerCurve { rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path_precision(dim: usize) -> SymMatrix {
        // tridiagonal, diagonally dominant, hence positive definite
        let mut p = SymMatrix::identity(dim);
        for i in 0..dim - 1 {
            p.set(i, i + 1, 0.3);
        }
        p
    }

    #[test]
    fn true_graph_diagonal_is_empty() {
        let model =
            MvnModel::new(vec![0.0; 3], SymMatrix::from_diagonal(&[1.0, 2.0, 0.5])).unwrap();
        assert_eq!(true_graph(&model, DEFAULT_ZERO_TOL).edge_count(), 0);
    }

    #[test]
    fn true_graph_recovers_path_from_inverse() {
        let dim = 5;
        let precision = path_precision(dim);
        let covariance = precision.inverse_spd().unwrap();
        let model = MvnModel::new(vec![0.0; dim], covariance).unwrap();
        let g = true_graph(&model, DEFAULT_ZERO_TOL);
        let expected: Vec<(usize, usize)> = (0..dim - 1).map(|i| (i, i + 1)).collect();
        assert_eq!(g.edges().collect::<Vec<_>>(), expected);
    }

    #[test]
    fn true_graph_matches_chosen_sparsity() {
        let mut precision = SymMatrix::from_diagonal(&[2.0, 2.0, 2.0, 2.0]);
        precision.set(0, 3, 0.5);
        precision.set(1, 2, -0.4);
        let covariance = precision.inverse_spd().unwrap();
        let model = MvnModel::new(vec![0.0; 4], covariance).unwrap();
        let g = true_graph(&model, DEFAULT_ZERO_TOL);
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 3), (1, 2)]);
    }

    #[test]
    fn model_rejects_indefinite_covariance() {
        let bad = SymMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 1.0]]).unwrap();
        assert!(matches!(
            MvnModel::new(vec![0.0; 2], bad),
            Err(Error::DegenerateMatrix(_))
        ));
        assert!(MvnModel::standard(1).is_err());
    }

    #[test]
    fn sampling_reproduces_covariance() {
        let mut cov = SymMatrix::from_diagonal(&[1.0, 1.0, 1.0]);
        cov.set(0, 1, 0.6);
        cov.set(1, 2, -0.3);
        let model = MvnModel::new(vec![1.0, -2.0, 0.5], cov.clone()).unwrap();
        let mut rng = replication_rng(7, ProcedureMethod::Delta2Neyman, 100, 0);
        let data = sample_mvn(&model, 100_000, &mut rng).unwrap();
        let s = crate::matrix::sample_covariance(&data).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert!(
                    (s.get(i, j) - cov.get(i, j)).abs() < 0.02,
                    "covariance entry ({i},{j}): {} vs {}",
                    s.get(i, j),
                    cov.get(i, j)
                );
            }
        }
        let mean_0: f64 =
            (0..data.n_obs()).map(|t| data.get(t, 0)).sum::<f64>() / data.n_obs() as f64;
        assert!((mean_0 - 1.0).abs() < 0.02);
    }

    #[test]
    fn sampling_is_deterministic_per_stream() {
        let model = MvnModel::standard(4).unwrap();
        let mut a = replication_rng(123, ProcedureMethod::Delta1Fisher, 10, 5);
        let mut b = replication_rng(123, ProcedureMethod::Delta1Fisher, 10, 5);
        let da = sample_mvn(&model, 10, &mut a).unwrap();
        let db = sample_mvn(&model, 10, &mut b).unwrap();
        for t in 0..10 {
            for i in 0..4 {
                assert_eq!(da.get(t, i).to_bits(), db.get(t, i).to_bits());
            }
        }
        // distinct replications get distinct draws
        let mut c = replication_rng(123, ProcedureMethod::Delta1Fisher, 10, 6);
        let dc = sample_mvn(&model, 10, &mut c).unwrap();
        assert!(dc.get(0, 0) != da.get(0, 0));
    }

    #[test]
    fn single_replication_estimate_is_binary() {
        let model = MvnModel::standard(3).unwrap();
        let exp = FwerExperiment::new(
            model,
            vec![10],
            0.1,
            1,
            42,
            vec![ProcedureMethod::Delta2Neyman],
        )
        .unwrap();
        let curve = estimate_fwer(&exp).unwrap();
        let f = curve.rows()[0].fwer;
        assert!(f == 0.0 || f == 1.0);
    }

    #[test]
    fn estimate_is_identical_across_worker_counts() {
        let model = MvnModel::standard(4).unwrap();
        let exp = FwerExperiment::new(
            model,
            vec![6, 9],
            0.2,
            200,
            9001,
            vec![ProcedureMethod::Delta1Fisher, ProcedureMethod::Delta2Neyman],
        )
        .unwrap();
        let mut outputs = Vec::new();
        for workers in [1usize, 2, 4] {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(workers)
                .build()
                .unwrap();
            let curve = pool.install(|| estimate_fwer(&exp)).unwrap();
            outputs.push(curve.to_csv());
        }
        assert_eq!(outputs[0], outputs[1]);
        assert_eq!(outputs[1], outputs[2]);
    }

    #[test]
    fn fisher_procedure_overshoots_near_small_samples() {
        // at n barely above N the Fisher procedure rejects far more often
        // than the exact one
        let exp = FwerExperiment::new(
            MvnModel::standard(10).unwrap(),
            vec![12],
            0.1,
            2_000,
            606,
            vec![ProcedureMethod::Delta1Fisher, ProcedureMethod::Delta2Neyman],
        )
        .unwrap();
        let curve = estimate_fwer(&exp).unwrap();
        let f1 = curve.rows()[0].fwer;
        let f2 = curve.rows()[1].fwer;
        assert!(f1 > f2 + 0.3, "delta1 {f1} should dominate delta2 {f2}");
        assert!(f2 < 0.12, "delta2 stays near the family level, got {f2}");
    }

    #[test]
    fn fisher_fwer_decreases_from_tightest_sample_size() {
        let exp = FwerExperiment::new(
            MvnModel::standard(40).unwrap(),
            vec![41, 71],
            0.1,
            800,
            607,
            vec![ProcedureMethod::Delta1Fisher],
        )
        .unwrap();
        let curve = estimate_fwer(&exp).unwrap();
        let at_41 = curve.rows()[0].fwer;
        let at_71 = curve.rows()[1].fwer;
        assert!(
            at_41 > at_71,
            "fwer should fall from n = N + 1 ({at_41}) to n = N + 31 ({at_71})"
        );
    }

    #[test]
    fn experiment_validation() {
        let model = MvnModel::standard(3).unwrap();
        assert!(FwerExperiment::new(
            model.clone(),
            vec![3],
            0.1,
            10,
            1,
            vec![ProcedureMethod::Delta2Neyman]
        )
        .is_err());
        assert!(FwerExperiment::new(model.clone(), vec![], 0.1, 10, 1, vec![]).is_err());
        assert!(FwerExperiment::new(
            model,
            vec![5],
            0.1,
            0,
            1,
            vec![ProcedureMethod::Delta2Neyman]
        )
        .is_err());
    }

    #[test]
    fn csv_shape_and_header() {
        let model = MvnModel::standard(3).unwrap();
        let exp = FwerExperiment::new(
            model,
            vec![5, 8, 11],
            0.1,
            50,
            3,
            vec![ProcedureMethod::Delta1Fisher, ProcedureMethod::Delta2Neyman],
        )
        .unwrap();
        let curve = estimate_fwer(&exp).unwrap();
        let csv = curve.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "method,n,fwer,reps,stderr,failures");
        assert_eq!(lines.len(), 1 + 2 * 3);
        assert!(lines[1].starts_with("delta1,5,"));
        assert!(lines[4].starts_with("delta2,5,"));
    }
}
