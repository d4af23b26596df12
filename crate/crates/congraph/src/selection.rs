//! Bonferroni-type multiple decision procedures mapping a sample to a
//! selected graph: delta1 runs a Fisher-z test per pair, delta2 runs the
//! conditionally exact test per pair, each at individual level
//! 2 alpha / (N (N - 1)) so the family-wise error rate is bounded by alpha.

use crate::dist::{beta_quantile, fisher_z, null_beta_params, std_normal_quantile};
use crate::error::{Error, Result};
use crate::matrix::{
    partial_correlation_matrix, sample_covariance, ObservationMatrix, SampleCovariance,
};

/// Symmetric binary adjacency matrix with a zero diagonal.
///
/// Only the strict upper triangle is stored, so symmetry and the zero
/// diagonal hold by construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdjacencyMatrix {
    n_vars: usize,
    upper: Vec<bool>,
}

impl AdjacencyMatrix {
    /// Graph with no edges.
    pub fn empty(n_vars: usize) -> Self {
        Self {
            upper: vec![false; n_vars * n_vars.saturating_sub(1) / 2],
            n_vars,
        }
    }

    /// Graph with every edge present.
    pub fn complete(n_vars: usize) -> Self {
        Self {
            upper: vec![true; n_vars * n_vars.saturating_sub(1) / 2],
            n_vars,
        }
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    fn index(&self, i: usize, j: usize) -> usize {
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        i * self.n_vars - i * (i + 1) / 2 + (j - i - 1)
    }

    /// Whether the edge (i, j) is present; the diagonal is always absent.
    pub fn edge(&self, i: usize, j: usize) -> bool {
        assert!(i < self.n_vars && j < self.n_vars, "vertex out of range");
        if i == j {
            return false;
        }
        self.upper[self.index(i, j)]
    }

    /// Sets the edge (i, j) = (j, i). Panics on a diagonal index.
    pub fn set_edge(&mut self, i: usize, j: usize, present: bool) {
        assert!(i < self.n_vars && j < self.n_vars, "vertex out of range");
        assert!(i != j, "self-loops are excluded");
        let idx = self.index(i, j);
        self.upper[idx] = present;
    }

    /// Number of edges present.
    pub fn edge_count(&self) -> usize {
        self.upper.iter().filter(|&&e| e).count()
    }

    /// Edges as (i, j) pairs with i < j, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n_vars).flat_map(move |i| {
            ((i + 1)..self.n_vars).filter_map(move |j| self.edge(i, j).then_some((i, j)))
        })
    }

    /// Dense 0/1 CSV rendering, one row per line.
    pub fn to_dense_csv(&self) -> String {
        let mut out = String::new();
        for i in 0..self.n_vars {
            for j in 0..self.n_vars {
                if j > 0 {
                    out.push(',');
                }
                out.push(if i != j && self.edge(i, j) { '1' } else { '0' });
            }
            out.push('\n');
        }
        out
    }

    /// Edge-list rendering: one "i,j" line per edge, i < j, 1-based.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        for (i, j) in self.edges() {
            out.push_str(&format!("{},{}\n", i + 1, j + 1));
        }
        out
    }
}

/// Multiple decision procedure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProcedureMethod {
    /// Fisher-z individual tests (the standard procedure).
    Delta1Fisher,
    /// Conditionally exact individual tests (the optimal procedure).
    Delta2Neyman,
}

impl ProcedureMethod {
    pub fn label(&self) -> &'static str {
        match self {
            ProcedureMethod::Delta1Fisher => "delta1",
            ProcedureMethod::Delta2Neyman => "delta2",
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        match text.trim() {
            "delta1" | "fisher" => Ok(ProcedureMethod::Delta1Fisher),
            "delta2" | "neyman" => Ok(ProcedureMethod::Delta2Neyman),
            other => Err(Error::InvalidInput(format!(
                "unknown procedure {other:?}; expected delta1 or delta2"
            ))),
        }
    }
}

/// Family-level configuration of a selection procedure.
#[derive(Debug, Clone, Copy)]
pub struct ProcedureConfig {
    pub fwer_level: f64,
    pub method: ProcedureMethod,
}

impl ProcedureConfig {
    pub fn new(fwer_level: f64, method: ProcedureMethod) -> Result<Self> {
        if !(fwer_level > 0.0 && fwer_level < 1.0) {
            return Err(Error::InvalidInput(format!(
                "family level must lie in (0, 1), got {fwer_level}"
            )));
        }
        Ok(Self { fwer_level, method })
    }
}

/// Number of unordered variable pairs M = N (N - 1) / 2.
pub fn pair_count(n_vars: usize) -> usize {
    n_vars * n_vars.saturating_sub(1) / 2
}

/// Individual two-sided level used per pair: 2 alpha / (N (N - 1)), i.e. the
/// Bonferroni split alpha / M over the M pairs.
pub fn individual_level(fwer_level: f64, n_vars: usize) -> f64 {
    2.0 * fwer_level / (n_vars as f64 * (n_vars as f64 - 1.0))
}

/// Selects a concentration graph from observations: runs the configured
/// individual test for every pair at the Bonferroni-split level and places an
/// edge wherever the test rejects.
pub fn select_graph(data: &ObservationMatrix, config: &ProcedureConfig) -> Result<AdjacencyMatrix> {
    let s = sample_covariance(data)?;
    select_graph_from_covariance(&s, config)
}

/// Same as `select_graph`, starting from a precomputed sample covariance.
///
/// All pair statistics come from a single inversion of the covariance matrix;
/// the result is the same as running the per-pair tests one at a time.
pub fn select_graph_from_covariance(
    s: &SampleCovariance,
    config: &ProcedureConfig,
) -> Result<AdjacencyMatrix> {
    let n_vars = s.n_vars();
    let n_obs = s.n_obs();
    if n_vars < 2 {
        return Err(Error::InvalidInput(format!(
            "need at least 2 variables, got {n_vars}"
        )));
    }
    if n_obs <= n_vars {
        return Err(Error::InvalidInput(format!(
            "need at least N + 1 observations, got n = {n_obs} for N = {n_vars}"
        )));
    }
    // One per-tail probability shared by every pair.
    let per_tail = config.fwer_level / (n_vars as f64 * (n_vars as f64 - 1.0));
    let r = partial_correlation_matrix(s)?;
    let mut graph = AdjacencyMatrix::empty(n_vars);
    match config.method {
        ProcedureMethod::Delta2Neyman => {
            let q = beta_quantile(&null_beta_params(n_obs, n_vars)?, per_tail)?;
            let threshold = 1.0 - 2.0 * q;
            for i in 0..n_vars {
                for j in (i + 1)..n_vars {
                    graph.set_edge(i, j, r.get(i, j).abs() > threshold);
                }
            }
        }
        ProcedureMethod::Delta1Fisher => {
            let zc = std_normal_quantile(1.0 - per_tail)?;
            for i in 0..n_vars {
                for j in (i + 1)..n_vars {
                    let rij = r.get(i, j);
                    let reject = if rij.abs() < 1.0 {
                        fisher_z(rij, n_obs)?.abs() > zc
                    } else {
                        true // infinite statistic
                    };
                    graph.set_edge(i, j, reject);
                }
            }
        }
    }
    Ok(graph)
}

/// Counts disagreements between a selected graph and the ground truth:
/// (false positives, false negatives) over unordered pairs.
pub fn count_false_edges(
    selected: &AdjacencyMatrix,
    truth: &AdjacencyMatrix,
) -> Result<(usize, usize)> {
    if selected.n_vars() != truth.n_vars() {
        return Err(Error::InvalidInput(format!(
            "graph dimensions differ: {} vs {}",
            selected.n_vars(),
            truth.n_vars()
        )));
    }
    let mut false_positives = 0;
    let mut false_negatives = 0;
    for i in 0..selected.n_vars() {
        for j in (i + 1)..selected.n_vars() {
            match (selected.edge(i, j), truth.edge(i, j)) {
                (true, false) => false_positives += 1,
                (false, true) => false_negatives += 1,
                _ => {}
            }
        }
    }
    Ok((false_positives, false_negatives))
}
