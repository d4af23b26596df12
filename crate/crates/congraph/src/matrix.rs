//! Covariance-side matrix arithmetic: sample covariances, cofactors, the
//! quadratic expansion of the determinant in one off-diagonal entry (with the
//! positive-definiteness interval it defines), and sample partial
//! correlations.

use crate::error::{Error, Result};

/// Dense symmetric matrix with full row-major storage.
///
/// Both triangles are kept bit-identical: every mutation writes `(i, j)` and
/// `(j, i)` together, and constructors canonicalize to the upper triangle.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    /// Zero matrix of the given dimension.
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![0.0; dim * dim],
        }
    }

    /// Identity matrix of the given dimension.
    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.set(i, i, 1.0);
        }
        m
    }

    /// Diagonal matrix from the given entries.
    pub fn from_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m.set(i, i, d);
        }
        m
    }

    /// Builds from full rows. Entries must be finite and the matrix exactly
    /// symmetric; the stored value is taken from the upper triangle.
    #[allow(clippy::needless_range_loop)]
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return Err(Error::InvalidInput("empty matrix".into()));
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::InvalidInput(format!(
                    "row {} has {} entries, expected {}",
                    i + 1,
                    row.len(),
                    dim
                )));
            }
            for &v in row {
                if !v.is_finite() {
                    return Err(Error::InvalidInput("non-finite matrix entry".into()));
                }
            }
        }
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in i..dim {
                if rows[i][j] != rows[j][i] {
                    return Err(Error::InvalidInput(format!(
                        "matrix is not symmetric at ({}, {})",
                        i + 1,
                        j + 1
                    )));
                }
                m.set(i, j, rows[i][j]);
            }
        }
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    /// Sets entries `(i, j)` and `(j, i)` to the same value.
    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.data[i * self.dim + j] = value;
        self.data[j * self.dim + i] = value;
    }

    /// Copy with the off-diagonal entry `(i, j)` (and `(j, i)`) replaced by `x`.
    pub fn with_entry(&self, i: usize, j: usize, x: f64) -> Self {
        let mut m = self.clone();
        m.set(i, j, x);
        m
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Determinant via LU factorization with partial pivoting.
    pub fn det(&self) -> f64 {
        let mut buf = self.data.clone();
        det_in_place(&mut buf, self.dim)
    }

    /// Cofactor of entry `(i, j)`: `(-1)^{i+j}` times the minor obtained by
    /// deleting row `i` and column `j`. Indices are zero-based.
    pub fn cofactor(&self, i: usize, j: usize) -> Result<f64> {
        let n = self.dim;
        if i >= n || j >= n {
            return Err(Error::InvalidInput(format!(
                "cofactor index ({i}, {j}) out of range for dimension {n}"
            )));
        }
        if n == 1 {
            return Ok(1.0);
        }
        let m = n - 1;
        let mut minor = vec![0.0; m * m];
        let mut r = 0;
        for row in 0..n {
            if row == i {
                continue;
            }
            let mut c = 0;
            for col in 0..n {
                if col == j {
                    continue;
                }
                minor[r * m + c] = self.get(row, col);
                c += 1;
            }
            r += 1;
        }
        let sign = if (i + j).is_multiple_of(2) { 1.0 } else { -1.0 };
        Ok(sign * det_in_place(&mut minor, m))
    }

    /// True iff the matrix is strictly positive definite (all Cholesky pivots
    /// positive). Semidefinite and indefinite matrices return false.
    pub fn is_positive_definite(&self) -> bool {
        self.cholesky_lower().is_ok()
    }

    /// Lower Cholesky factor, or the zero-based index of the first
    /// non-positive pivot (equivalently, the first non-positive leading
    /// principal minor).
    pub(crate) fn cholesky_lower(&self) -> std::result::Result<Vec<f64>, usize> {
        let n = self.dim;
        let mut l = vec![0.0; n * n];
        for j in 0..n {
            let mut d = self.get(j, j);
            for k in 0..j {
                d -= l[j * n + k] * l[j * n + k];
            }
            if d <= 0.0 || !d.is_finite() {
                return Err(j);
            }
            let ljj = d.sqrt();
            l[j * n + j] = ljj;
            for i in (j + 1)..n {
                let mut s = self.get(i, j);
                for k in 0..j {
                    s -= l[i * n + k] * l[j * n + k];
                }
                l[i * n + j] = s / ljj;
            }
        }
        Ok(l)
    }

    /// Inverse of a symmetric positive definite matrix via its Cholesky
    /// factor.
    pub fn inverse_spd(&self) -> Result<SymMatrix> {
        self.inverse_spd_impl()
            .map_err(|k| not_positive_definite("matrix", k))
    }

    /// As `inverse_spd`, reporting the failing pivot index instead of a
    /// rendered error.
    pub(crate) fn inverse_spd_impl(&self) -> std::result::Result<SymMatrix, usize> {
        let n = self.dim;
        let l = self.cholesky_lower()?;
        // Invert the lower-triangular factor in place.
        let mut linv = vec![0.0; n * n];
        for i in 0..n {
            linv[i * n + i] = 1.0 / l[i * n + i];
            for j in 0..i {
                let mut s = 0.0;
                for k in j..i {
                    s += l[i * n + k] * linv[k * n + j];
                }
                linv[i * n + j] = -s / l[i * n + i];
            }
        }
        // inverse = linv' * linv
        let mut out = SymMatrix::zeros(n);
        for i in 0..n {
            for j in i..n {
                let mut s = 0.0;
                for k in j..n {
                    s += linv[k * n + i] * linv[k * n + j];
                }
                out.set(i, j, s);
            }
        }
        Ok(out)
    }

    /// Parses a square matrix from CSV text (no header). Requires symmetry up
    /// to a small relative tolerance and symmetrizes by averaging.
    #[allow(clippy::needless_range_loop)]
    pub fn parse_csv(text: &str) -> Result<Self> {
        let grid = parse_numeric_csv(text, false)?;
        let dim = grid.len();
        if grid.iter().any(|row| row.len() != dim) {
            return Err(Error::InvalidInput(format!(
                "expected a square matrix, got {} rows of {} columns",
                dim,
                grid[0].len()
            )));
        }
        let scale = grid
            .iter()
            .flatten()
            .fold(0.0f64, |acc, v| acc.max(v.abs()))
            .max(1.0);
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in i..dim {
                if (grid[i][j] - grid[j][i]).abs() > 1e-12 * scale {
                    return Err(Error::InvalidInput(format!(
                        "matrix is not symmetric at ({}, {})",
                        i + 1,
                        j + 1
                    )));
                }
                m.set(i, j, 0.5 * (grid[i][j] + grid[j][i]));
            }
        }
        Ok(m)
    }
}

/// Degenerate-matrix error naming the first non-positive leading principal
/// minor (zero-based pivot index in, one-based minor out).
pub(crate) fn not_positive_definite(what: &str, pivot: usize) -> Error {
    Error::DegenerateMatrix(format!(
        "{what} is not positive definite: leading principal minor {} is not positive",
        pivot + 1
    ))
}

/// LU determinant with partial pivoting; consumes the buffer.
fn det_in_place(a: &mut [f64], n: usize) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let mut det = 1.0;
    for col in 0..n {
        let mut pivot_row = col;
        let mut pivot_abs = a[col * n + col].abs();
        for row in (col + 1)..n {
            let v = a[row * n + col].abs();
            if v > pivot_abs {
                pivot_abs = v;
                pivot_row = row;
            }
        }
        if pivot_abs == 0.0 {
            return 0.0;
        }
        if pivot_row != col {
            for k in 0..n {
                a.swap(pivot_row * n + k, col * n + k);
            }
            det = -det;
        }
        let pivot = a[col * n + col];
        det *= pivot;
        for row in (col + 1)..n {
            let factor = a[row * n + col] / pivot;
            if factor == 0.0 {
                continue;
            }
            for k in (col + 1)..n {
                a[row * n + k] -= factor * a[col * n + k];
            }
        }
    }
    det
}

/// Observations in rows, variables in columns.
#[derive(Debug, Clone)]
pub struct ObservationMatrix {
    n_obs: usize,
    n_vars: usize,
    data: Vec<f64>, // row-major
}

impl ObservationMatrix {
    /// Builds from rows of observations. Requires at least 2 rows, at least
    /// 2 columns, and finite entries.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        if rows.len() < 2 {
            return Err(Error::InvalidInput(format!(
                "need at least 2 observations, got {}",
                rows.len()
            )));
        }
        let n_vars = rows[0].len();
        if n_vars < 2 {
            return Err(Error::InvalidInput(format!(
                "need at least 2 variables, got {n_vars}"
            )));
        }
        let mut data = Vec::with_capacity(rows.len() * n_vars);
        for (t, row) in rows.iter().enumerate() {
            if row.len() != n_vars {
                return Err(Error::InvalidInput(format!(
                    "row {} has {} values, expected {}",
                    t + 1,
                    row.len(),
                    n_vars
                )));
            }
            for &v in row {
                if !v.is_finite() {
                    return Err(Error::InvalidInput(format!(
                        "non-finite value in row {}",
                        t + 1
                    )));
                }
                data.push(v);
            }
        }
        Ok(Self {
            n_obs: rows.len(),
            n_vars,
            data,
        })
    }

    pub(crate) fn from_raw(n_obs: usize, n_vars: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), n_obs * n_vars);
        Self {
            n_obs,
            n_vars,
            data,
        }
    }

    pub fn n_obs(&self) -> usize {
        self.n_obs
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    #[inline]
    pub fn get(&self, t: usize, i: usize) -> f64 {
        self.data[t * self.n_vars + i]
    }

    /// Observation `t` as a slice over variables.
    pub fn row(&self, t: usize) -> &[f64] {
        &self.data[t * self.n_vars..(t + 1) * self.n_vars]
    }

    /// Swaps the observation/variable axes.
    pub fn transpose(&self) -> Result<Self> {
        let mut data = vec![0.0; self.data.len()];
        for t in 0..self.n_obs {
            for i in 0..self.n_vars {
                data[i * self.n_obs + t] = self.get(t, i);
            }
        }
        if self.n_vars < 2 || self.n_obs < 2 {
            return Err(Error::InvalidInput(
                "transposed matrix needs at least 2 rows and 2 columns".into(),
            ));
        }
        Ok(Self {
            n_obs: self.n_vars,
            n_vars: self.n_obs,
            data,
        })
    }

    /// Parses observations from CSV text: an optional header line followed by
    /// rows of comma-separated decimal numbers ('.' decimal point).
    pub fn parse_csv(text: &str) -> Result<Self> {
        let rows = parse_numeric_csv(text, true)?;
        Self::from_rows(&rows)
    }

    /// Reads observations from a CSV file.
    pub fn read_csv(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse_csv(&text)
    }
}

/// Parses CSV into numeric rows. When `allow_header` is set and the first
/// non-blank line has a field that does not parse as a number, it is skipped.
fn parse_numeric_csv(text: &str, allow_header: bool) -> Result<Vec<Vec<f64>>> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut width: Option<usize> = None;
    let mut first_data_line = true;
    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if first_data_line && allow_header {
            let looks_numeric = fields.iter().all(|f| f.parse::<f64>().is_ok());
            if !looks_numeric {
                first_data_line = false;
                continue; // header
            }
        }
        first_data_line = false;
        let mut row = Vec::with_capacity(fields.len());
        for (col, field) in fields.iter().enumerate() {
            let value: f64 = field.parse().map_err(|_| Error::Parse {
                line: lineno,
                column: col + 1,
                message: format!("cannot parse {field:?} as a number"),
            })?;
            if !value.is_finite() {
                return Err(Error::Parse {
                    line: lineno,
                    column: col + 1,
                    message: format!("non-finite value {field:?}"),
                });
            }
            row.push(value);
        }
        if let Some(w) = width {
            if row.len() != w {
                return Err(Error::Parse {
                    line: lineno,
                    column: row.len(),
                    message: format!("expected {} fields, found {}", w, row.len()),
                });
            }
        } else {
            width = Some(row.len());
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::InvalidInput("no data rows in CSV input".into()));
    }
    Ok(rows)
}

/// Divisor convention for the sample covariance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CovarianceDivisor {
    /// Divide by the number of observations n (default).
    #[default]
    SampleSize,
    /// Divide by n - 1.
    SampleSizeMinusOne,
}

/// Symmetric matrix of sample covariances together with the sample size it
/// was computed from.
#[derive(Debug, Clone)]
pub struct SampleCovariance {
    mat: SymMatrix,
    n_obs: usize,
}

impl SampleCovariance {
    /// Wraps an existing symmetric matrix as a sample covariance. Requires
    /// non-negative diagonal entries and n >= 2.
    pub fn from_matrix(mat: SymMatrix, n_obs: usize) -> Result<Self> {
        if n_obs < 2 {
            return Err(Error::InvalidInput(format!(
                "sample size must be at least 2, got {n_obs}"
            )));
        }
        for i in 0..mat.dim() {
            if mat.get(i, i) < 0.0 {
                return Err(Error::InvalidInput(format!(
                    "negative variance at diagonal entry {}",
                    i + 1
                )));
            }
        }
        Ok(Self { mat, n_obs })
    }

    pub fn n_obs(&self) -> usize {
        self.n_obs
    }

    pub fn n_vars(&self) -> usize {
        self.mat.dim()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.mat.get(i, j)
    }

    pub fn matrix(&self) -> &SymMatrix {
        &self.mat
    }

    pub fn is_positive_definite(&self) -> bool {
        self.mat.is_positive_definite()
    }
}

/// Sample covariance with divisor n.
pub fn sample_covariance(data: &ObservationMatrix) -> Result<SampleCovariance> {
    sample_covariance_with_divisor(data, CovarianceDivisor::SampleSize)
}

/// Sample covariance with a caller-chosen divisor convention.
pub fn sample_covariance_with_divisor(
    data: &ObservationMatrix,
    divisor: CovarianceDivisor,
) -> Result<SampleCovariance> {
    let n = data.n_obs();
    let p = data.n_vars();
    if n < 2 {
        return Err(Error::InvalidInput(format!(
            "need at least 2 observations, got {n}"
        )));
    }
    let mut means = vec![0.0; p];
    for t in 0..n {
        let row = data.row(t);
        for i in 0..p {
            means[i] += row[i];
        }
    }
    for m in &mut means {
        *m /= n as f64;
    }
    let denom = match divisor {
        CovarianceDivisor::SampleSize => n as f64,
        CovarianceDivisor::SampleSizeMinusOne => (n - 1) as f64,
    };
    let mut mat = SymMatrix::zeros(p);
    let mut centered = vec![0.0; p];
    let mut acc = vec![0.0; p * p];
    for t in 0..n {
        let row = data.row(t);
        for i in 0..p {
            centered[i] = row[i] - means[i];
        }
        for i in 0..p {
            let ci = centered[i];
            for j in i..p {
                acc[i * p + j] += ci * centered[j];
            }
        }
    }
    for i in 0..p {
        for j in i..p {
            mat.set(i, j, acc[i * p + j] / denom);
        }
    }
    SampleCovariance::from_matrix(mat, n)
}

/// Coefficients of the determinant of a symmetric matrix viewed as a function
/// of one off-diagonal entry x at position (i, j):
/// det = -a x^2 + b x + c, with real roots x1 <= x2. The open interval
/// (x1, x2) is exactly the set of x keeping the matrix positive definite when
/// the rest of the matrix admits it.
#[derive(Debug, Clone, Copy)]
pub struct QuadCoeffs {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub x1: f64,
    pub x2: f64,
    pub i: usize,
    pub j: usize,
}

impl QuadCoeffs {
    /// Evaluates -a x^2 + b x + c.
    pub fn eval(&self, x: f64) -> f64 {
        (-self.a * x + self.b) * x + self.c
    }
}

/// Expands det(S(x)) as a quadratic in the off-diagonal entry x at (i, j).
///
/// The coefficients come from evaluating the determinant at the three nodes
/// x in {s_ij - d, s_ij, s_ij + d} with d = max(1, |s_ij|) and solving the
/// three-point interpolation, which is exact for a quadratic.
pub fn det_quadratic_coeffs(s: &SampleCovariance, i: usize, j: usize) -> Result<QuadCoeffs> {
    let n = s.n_vars();
    if i >= n || j >= n {
        return Err(Error::InvalidInput(format!(
            "pair index ({i}, {j}) out of range for dimension {n}"
        )));
    }
    if i == j {
        return Err(Error::InvalidInput(
            "determinant expansion needs an off-diagonal entry (i != j)".into(),
        ));
    }
    let sij = s.get(i, j);
    let delta = sij.abs().max(1.0);
    let d_lo = s.matrix().with_entry(i, j, sij - delta).det();
    let d_mid = s.matrix().with_entry(i, j, sij).det();
    let d_hi = s.matrix().with_entry(i, j, sij + delta).det();

    let a = (2.0 * d_mid - d_lo - d_hi) / (2.0 * delta * delta);
    let b = (d_hi - d_lo) / (2.0 * delta) + 2.0 * a * sij;
    let c = d_mid + a * sij * sij - b * sij;

    if a <= 0.0 || a.is_nan() {
        return Err(Error::DegenerateMatrix(format!(
            "no positive-definite completion at ({}, {}): quadratic coefficient a = {a} is not positive",
            i + 1,
            j + 1
        )));
    }
    let disc = b * b + 4.0 * a * c;
    let scale = (b * b).max((4.0 * a * c).abs());
    if disc < -1e-9 * scale {
        return Err(Error::DegenerateMatrix(format!(
            "no positive-definite completion at ({}, {}): discriminant {disc} is negative",
            i + 1,
            j + 1
        )));
    }
    let sqrt_disc = disc.max(0.0).sqrt();
    // Roots of a x^2 - b x - c = 0, larger-magnitude root first.
    let q = if b >= 0.0 {
        0.5 * (b + sqrt_disc)
    } else {
        0.5 * (b - sqrt_disc)
    };
    let r1 = q / a;
    let r2 = if q != 0.0 { -c / q } else { 0.0 };
    let (x1, x2) = if r1 <= r2 { (r1, r2) } else { (r2, r1) };
    Ok(QuadCoeffs {
        a,
        b,
        c,
        x1,
        x2,
        i,
        j,
    })
}

/// Sample partial correlation between variables i and j given all others.
#[derive(Debug, Clone, Copy)]
pub struct PartialCorrelation {
    pub r: f64,
    pub i: usize,
    pub j: usize,
}

/// Sample partial correlation r^{i,j} = -S_ij / sqrt(S_ii S_jj) in terms of
/// cofactors of the sample covariance matrix. Requires a positive definite
/// covariance.
pub fn partial_correlation(s: &SampleCovariance, i: usize, j: usize) -> Result<PartialCorrelation> {
    let n = s.n_vars();
    if i >= n || j >= n || i == j {
        return Err(Error::InvalidInput(format!(
            "pair index ({i}, {j}) invalid for dimension {n}"
        )));
    }
    if let Err(k) = s.matrix().cholesky_lower() {
        return Err(not_positive_definite("sample covariance", k));
    }
    let cof_ij = s.matrix().cofactor(i, j)?;
    let cof_ii = s.matrix().cofactor(i, i)?;
    let cof_jj = s.matrix().cofactor(j, j)?;
    let prod = cof_ii * cof_jj;
    if prod <= 0.0 || prod.is_nan() {
        return Err(Error::DegenerateMatrix(format!(
            "diagonal cofactor product is not positive at ({}, {})",
            i + 1,
            j + 1
        )));
    }
    let r = (-cof_ij / prod.sqrt()).clamp(-1.0, 1.0);
    Ok(PartialCorrelation { r, i, j })
}

/// All sample partial correlations at once, via one inversion of the
/// covariance: r^{i,j} = -P_ij / sqrt(P_ii P_jj) where P is the inverse.
/// Agrees with the per-pair cofactor route; the diagonal is set to 1.
pub fn partial_correlation_matrix(s: &SampleCovariance) -> Result<SymMatrix> {
    let p = s
        .matrix()
        .inverse_spd_impl()
        .map_err(|k| not_positive_definite("sample covariance", k))?;
    let n = s.n_vars();
    let mut r = SymMatrix::identity(n);
    for i in 0..n {
        for j in (i + 1)..n {
            let denom = (p.get(i, i) * p.get(j, j)).sqrt();
            r.set(i, j, (-p.get(i, j) / denom).clamp(-1.0, 1.0));
        }
    }
    Ok(r)
}
