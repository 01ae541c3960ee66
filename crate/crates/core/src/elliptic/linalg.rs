//! Compressed sparse rows and a banded LU factorization with partial pivoting.

use crate::error::{LabError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    pub n_rows: usize,
    pub n_cols: usize,
    pub row_ptr: Vec<usize>,
    pub col_idx: Vec<usize>,
    pub values: Vec<f64>,
}

impl CsrMatrix {
    /// Builds a matrix from `(row, col, value)` triplets, summing duplicates.
    pub fn from_triplets(n_rows: usize, n_cols: usize, mut triplets: Vec<(usize, usize, f64)>) -> Self {
        triplets.sort_unstable_by_key(|&(r, c, _)| (r, c));
        let mut row_ptr = vec![0usize; n_rows + 1];
        let mut col_idx = Vec::with_capacity(triplets.len());
        let mut values: Vec<f64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in triplets {
            debug_assert!(r < n_rows && c < n_cols);
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
            } else {
                col_idx.push(c);
                values.push(v);
                row_ptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for r in 0..n_rows {
            row_ptr[r + 1] += row_ptr[r];
        }
        Self {
            n_rows,
            n_cols,
            row_ptr,
            col_idx,
            values,
        }
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.row_ptr[r]..self.row_ptr[r + 1];
        self.col_idx[range.clone()].iter().copied().zip(self.values[range].iter().copied())
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.row(r).find(|&(cc, _)| cc == c).map_or(0.0, |(_, v)| v)
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n_rows).map(|r| self.row(r).map(|(c, v)| v * x[c]).sum()).collect()
    }

    /// Lower and upper bandwidths.
    pub fn bandwidths(&self) -> (usize, usize) {
        let (mut kl, mut ku) = (0, 0);
        for r in 0..self.n_rows {
            for (c, _) in self.row(r) {
                if c < r {
                    kl = kl.max(r - c);
                } else {
                    ku = ku.max(c - r);
                }
            }
        }
        (kl, ku)
    }
}

/// LU factors of a square banded matrix. Row `r` of `upper` holds columns
/// `r - kl ..= r + kl + ku`; the extra `kl` columns absorb pivoting fill.
#[derive(Debug, Clone)]
pub struct BandedLu {
    n: usize,
    kl: usize,
    ku: usize,
    width: usize,
    upper: Vec<f64>,
    lower: Vec<f64>,
    pivots: Vec<usize>,
    pub min_pivot: f64,
    pub max_pivot: f64,
}

impl BandedLu {
    pub fn factor(a: &CsrMatrix) -> Result<Self> {
        if a.n_rows != a.n_cols {
            return Err(LabError::LinearSolver(format!("matrix is {} x {}, not square", a.n_rows, a.n_cols)));
        }
        let n = a.n_rows;
        let (kl, ku) = a.bandwidths();
        let width = 2 * kl + ku + 1;
        let mut upper = vec![0.0; n * width];
        for r in 0..n {
            for (c, v) in a.row(r) {
                upper[r * width + (c + kl - r)] += v;
            }
        }
        let mut lower = vec![0.0; n * kl.max(1)];
        let mut pivots = vec![0usize; n];
        let at = |r: usize, c: usize| r * width + (c + kl - r);
        let scale = a.values.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
        let (mut min_pivot, mut max_pivot) = (f64::INFINITY, 0.0f64);
        for k in 0..n {
            let last_row = (k + kl).min(n - 1);
            let last_col = (k + kl + ku).min(n - 1);
            let mut p = k;
            let mut best = upper[at(k, k)].abs();
            for r in k + 1..=last_row {
                let v = upper[at(r, k)].abs();
                if v > best {
                    best = v;
                    p = r;
                }
            }
            if !(best > 1e-300 && best > 1e-15 * scale) || !best.is_finite() {
                return Err(LabError::LinearSolver(format!(
                    "zero pivot in column {k} of {n} (|pivot| = {best:e}, matrix scale {scale:e}, \
                     pivot range so far [{min_pivot:e}, {max_pivot:e}])"
                )));
            }
            pivots[k] = p;
            if p != k {
                for c in k..=last_col {
                    upper.swap(at(k, c), at(p, c));
                }
            }
            let piv = upper[at(k, k)];
            min_pivot = min_pivot.min(piv.abs());
            max_pivot = max_pivot.max(piv.abs());
            for r in k + 1..=last_row {
                let m = upper[at(r, k)] / piv;
                lower[k * kl + (r - k - 1)] = m;
                upper[at(r, k)] = 0.0;
                if m != 0.0 {
                    for c in k + 1..=last_col {
                        upper[at(r, c)] -= m * upper[at(k, c)];
                    }
                }
            }
        }
        Ok(Self {
            n,
            kl,
            ku,
            width,
            upper,
            lower,
            pivots,
            min_pivot,
            max_pivot,
        })
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let (n, kl, ku, w) = (self.n, self.kl, self.ku, self.width);
        let mut x = b.to_vec();
        for k in 0..n {
            let p = self.pivots[k];
            if p != k {
                x.swap(k, p);
            }
            let xk = x[k];
            if xk != 0.0 {
                for r in k + 1..=(k + kl).min(n - 1) {
                    x[r] -= self.lower[k * kl + (r - k - 1)] * xk;
                }
            }
        }
        for k in (0..n).rev() {
            let mut s = x[k];
            for c in k + 1..=(k + kl + ku).min(n - 1) {
                s -= self.upper[k * w + (c + kl - k)] * x[c];
            }
            x[k] = s / self.upper[k * w + kl];
        }
        x
    }

    /// Ratio of extreme pivot magnitudes; a cheap conditioning indicator.
    pub fn pivot_ratio(&self) -> f64 {
        self.max_pivot / self.min_pivot
    }
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Solves `a x = b` with the given factors, refining until
/// `|a x - b|_inf <= rel_tol |b|_inf`.
pub fn solve_refined(a: &CsrMatrix, lu: &BandedLu, b: &[f64], rel_tol: f64) -> Result<Vec<f64>> {
    let bnorm = max_abs(b);
    if bnorm == 0.0 {
        return Ok(vec![0.0; b.len()]);
    }
    let mut x = lu.solve(b);
    let mut res_norm = f64::INFINITY;
    for _ in 0..4 {
        let ax = a.matvec(&x);
        let r: Vec<f64> = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
        res_norm = max_abs(&r);
        if res_norm <= rel_tol * bnorm {
            return Ok(x);
        }
        let dx = lu.solve(&r);
        for (xi, d) in x.iter_mut().zip(&dx) {
            *xi += d;
        }
    }
    Err(LabError::LinearSolver(format!(
        "residual {res_norm:e} exceeds {rel_tol:e} x |b| = {:e} after refinement (pivot ratio {:e})",
        rel_tol * bnorm,
        lu.pivot_ratio()
    )))
}
