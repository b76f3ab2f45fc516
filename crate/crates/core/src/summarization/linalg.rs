use std::fs::File;
use std::path::Path;

use crate::error::{Error, Result};

/// Dense square matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::NotSquare {
                    rows: n,
                    cols: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Ok(Self { n, data })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    /// `I + self`.
    pub fn shifted_identity(&self) -> Self {
        let mut m = self.clone();
        for i in 0..self.n {
            m.data[i * self.n + i] += 1.0;
        }
        m
    }

    /// First pair `(i, j)` with `|a_ij − a_ji| > tol·max(1, max|a|)`.
    pub fn asymmetry(&self, tol: f64) -> Option<(usize, usize)> {
        let scale = self.data.iter().fold(1.0f64, |acc, v| acc.max(v.abs()));
        for i in 0..self.n {
            for j in i + 1..self.n {
                if (self.get(i, j) - self.get(j, i)).abs() > tol * scale {
                    return Some((i, j));
                }
            }
        }
        None
    }

    pub fn load_csv(path: &Path) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .from_reader(File::open(path)?);
        let mut rows = Vec::new();
        for (i, record) in reader.records().enumerate() {
            let record = record.map_err(|e| Error::Parse(e.to_string()))?;
            let row = record
                .iter()
                .map(|t| t.trim().parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|_| Error::MalformedLine {
                    line: i + 1,
                    content: record.iter().collect::<Vec<_>>().join(","),
                })?;
            rows.push(row);
        }
        Self::from_rows(&rows)
    }

    pub fn save_csv(&self, path: &Path) -> Result<()> {
        let mut writer = csv::Writer::from_path(path).map_err(|e| Error::Io(e.to_string()))?;
        for i in 0..self.n {
            // `{:?}` prints the shortest string that parses back exactly
            writer
                .write_record(self.row(i).iter().map(|v| format!("{v:?}")))
                .map_err(|e| Error::Io(e.to_string()))?;
        }
        writer.flush()?;
        Ok(())
    }
}

/// Lower Cholesky factor of the principal submatrix on `index`.
/// Fails with the position of the first non-positive pivot.
pub fn cholesky(a: &SymMatrix, index: &[usize]) -> Result<Vec<f64>> {
    let k = index.len();
    let mut l = vec![0.0; k * k];
    for r in 0..k {
        extend_cholesky(a, &index[..r], &mut l, k, index[r])
            .map_err(|_| Error::FactorizationFailure(r))?;
    }
    Ok(l)
}

/// Fills row `r = prefix.len()` of the factor `l` (row stride `stride`) for
/// element `e`, returning the new pivot `l_rr`.
pub(crate) fn extend_cholesky(
    a: &SymMatrix,
    prefix: &[usize],
    l: &mut [f64],
    stride: usize,
    e: usize,
) -> Result<f64> {
    let r = prefix.len();
    for c in 0..r {
        let mut v = a.get(e, prefix[c]);
        for t in 0..c {
            v -= l[r * stride + t] * l[c * stride + t];
        }
        l[r * stride + c] = v / l[c * stride + c];
    }
    let mut d = a.get(e, e);
    for t in 0..r {
        d -= l[r * stride + t] * l[r * stride + t];
    }
    if !(d > 0.0) {
        return Err(Error::FactorizationFailure(r));
    }
    let pivot = d.sqrt();
    l[r * stride + r] = pivot;
    Ok(pivot)
}

pub const DEFAULT_JACOBI_TOL: f64 = 1e-10;
pub const MAX_JACOBI_SWEEPS: usize = 100;

/// Eigenvalues of a symmetric matrix, descending, by cyclic Jacobi rotations
/// until every off-diagonal entry is below `tol` in magnitude.
pub fn symmetric_eigenvalues(a: &SymMatrix, tol: f64) -> Result<Vec<f64>> {
    if let Some((row, col)) = a.asymmetry(1e-12) {
        return Err(Error::NotSymmetric { row, col });
    }
    let n = a.n();
    let mut m = a.clone();
    let off_max = |m: &SymMatrix| {
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i + 1..n {
                worst = worst.max(m.get(i, j).abs());
            }
        }
        worst
    };
    let mut sweeps = 0;
    while off_max(&m) >= tol {
        if sweeps == MAX_JACOBI_SWEEPS {
            return Err(Error::NoConvergence(sweeps));
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                let apq = m.get(p, q);
                if apq == 0.0 {
                    continue;
                }
                let theta = (m.get(q, q) - m.get(p, p)) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                rotate(&mut m, p, q, c, s);
            }
        }
    }
    let mut values: Vec<f64> = (0..n).map(|i| m.get(i, i)).collect();
    values.sort_by(|x, y| y.total_cmp(x));
    Ok(values)
}

/// `m ← Jᵀ m J` for the rotation in the `(p, q)` plane that zeroes `m_pq`.
fn rotate(m: &mut SymMatrix, p: usize, q: usize, c: f64, s: f64) {
    let n = m.n();
    for k in 0..n {
        let (mkp, mkq) = (m.get(k, p), m.get(k, q));
        m.set(k, p, c * mkp - s * mkq);
        m.set(k, q, s * mkp + c * mkq);
    }
    for k in 0..n {
        let (mpk, mqk) = (m.get(p, k), m.get(q, k));
        m.set(p, k, c * mpk - s * mqk);
        m.set(q, k, s * mpk + c * mqk);
    }
    m.set(p, q, 0.0);
    m.set(q, p, 0.0);
}
