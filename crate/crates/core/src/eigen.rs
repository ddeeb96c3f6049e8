//! Dense real symmetric eigenvalues by the cyclic Jacobi rotation method.
//!
//! The band-edge matrices are small (`p` up to a few hundred) and real, so
//! a plain cyclic sweep over all `(p, q)` pairs is accurate and has no
//! external dependency.

use crate::error::{Error, Result};

/// Sweep cap for [`symmetric_eigenvalues`].
pub const MAX_SWEEPS: usize = 100;

/// Convergence threshold on `off(M) / ||M||_F`.
pub const OFF_DIAGONAL_TOLERANCE: f64 = 1e-13;

/// An `n x n` real symmetric matrix stored densely in row-major order.
///
/// Symmetry is exact: every constructor either mirrors the upper triangle
/// or rejects asymmetric input.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix {
    n: usize,
    entries: Vec<f64>,
}

impl SymmetricMatrix {
    /// Builds the matrix from `f(i, j)` evaluated on `i <= j`; the lower
    /// triangle is mirrored.
    pub fn from_upper_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyMatrix);
        }
        let mut entries = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let v = f(i, j);
                entries[i * n + j] = v;
                entries[j * n + i] = v;
            }
        }
        Ok(Self { n, entries })
    }

    /// Builds the matrix from explicit rows, rejecting ragged or
    /// asymmetric input.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::EmptyMatrix);
        }
        let mut entries = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::NotSymmetric { row: i, col: row.len() });
            }
            entries.extend_from_slice(row);
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if entries[i * n + j] != entries[j * n + i] {
                    return Err(Error::NotSymmetric { row: i, col: j });
                }
            }
        }
        Ok(Self { n, entries })
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::from_upper_fn(n, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// `M + t I`.
    pub fn shifted(&self, t: f64) -> Self {
        let mut out = self.clone();
        for i in 0..self.n {
            out.entries[i * self.n + i] += t;
        }
        out
    }

    /// `P M P^T` for the permutation sending row `i` to row `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.n, "permutation length must equal dimension");
        let n = self.n;
        let mut entries = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                entries[perm[i] * n + perm[j]] = self.get(i, j);
            }
        }
        Self { n, entries }
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.entries.chunks(self.n).map(<[f64]>::to_vec).collect()
    }
}

/// All eigenvalues of `m`, ascending, with multiplicity.
pub fn symmetric_eigenvalues(m: &SymmetricMatrix) -> Result<Vec<f64>> {
    symmetric_eigenvalues_with_cap(m, MAX_SWEEPS)
}

/// As [`symmetric_eigenvalues`] with an explicit sweep cap.
pub fn symmetric_eigenvalues_with_cap(m: &SymmetricMatrix, max_sweeps: usize) -> Result<Vec<f64>> {
    let n = m.n;
    let mut w = m.entries.clone();
    if let Some(pos) = w.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite { name: "matrix", index: pos });
    }
    let threshold = OFF_DIAGONAL_TOLERANCE * m.frobenius_norm();

    let mut sweeps = 0;
    loop {
        if off_diagonal_norm(&w, n) <= threshold {
            break;
        }
        if sweeps == max_sweeps {
            return Err(Error::NoConvergence { sweeps });
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut w, n, p, q);
            }
        }
    }

    let mut eig: Vec<f64> = (0..n).map(|i| w[i * n + i]).collect();
    eig.sort_by(f64::total_cmp);
    Ok(eig)
}

fn off_diagonal_norm(w: &[f64], n: usize) -> f64 {
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += w[i * n + j] * w[i * n + j];
            }
        }
    }
    acc.sqrt()
}

/// One plane rotation annihilating `w[p][q]`.
fn rotate(w: &mut [f64], n: usize, p: usize, q: usize) {
    let apq = w[p * n + q];
    if apq == 0.0 {
        return;
    }
    let app = w[p * n + p];
    let aqq = w[q * n + q];
    let theta = (aqq - app) / (2.0 * apq);
    // Smaller root of t^2 + 2 theta t - 1 = 0.
    let t = if theta.abs() > 1e150 { 0.5 / theta } else { theta.signum() / (theta.abs() + theta.hypot(1.0)) };
    let c = 1.0 / t.hypot(1.0);
    let s = t * c;
    let tau = s / (1.0 + c);
    let h = t * apq;

    w[p * n + p] = app - h;
    w[q * n + q] = aqq + h;
    w[p * n + q] = 0.0;
    w[q * n + p] = 0.0;

    for r in 0..n {
        if r == p || r == q {
            continue;
        }
        let g = w[r * n + p];
        let hh = w[r * n + q];
        let new_rp = g - s * (hh + g * tau);
        let new_rq = hh + s * (g - hh * tau);
        w[r * n + p] = new_rp;
        w[p * n + r] = new_rp;
        w[r * n + q] = new_rq;
        w[q * n + r] = new_rq;
    }
}

/// Householder reduction of `m` to a similar symmetric tridiagonal matrix,
/// returned as `(diagonal, off_diagonal)`.
pub fn tridiagonalize(m: &SymmetricMatrix) -> (Vec<f64>, Vec<f64>) {
    let n = m.n;
    let mut w = m.entries.clone();
    let mut v = vec![0.0; n];
    let mut q = vec![0.0; n];
    for k in 0..n.saturating_sub(2) {
        let norm = ((k + 1)..n).map(|i| w[i * n + k].powi(2)).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let x0 = w[(k + 1) * n + k];
        let alpha = if x0 > 0.0 { -norm } else { norm };
        for (i, vi) in v.iter_mut().enumerate().skip(k + 1) {
            *vi = w[i * n + k];
        }
        v[k + 1] -= alpha;
        let vnorm = ((k + 1)..n).map(|i| v[i] * v[i]).sum::<f64>().sqrt();
        if vnorm == 0.0 {
            continue;
        }
        for vi in &mut v[k + 1..] {
            *vi /= vnorm;
        }
        // A22 <- H A22 H with H = I - 2 v v^T, via q = A22 v - (v^T A22 v) v.
        for i in (k + 1)..n {
            q[i] = ((k + 1)..n).map(|j| w[i * n + j] * v[j]).sum();
        }
        let kappa: f64 = ((k + 1)..n).map(|i| v[i] * q[i]).sum();
        for i in (k + 1)..n {
            q[i] -= kappa * v[i];
        }
        for i in (k + 1)..n {
            for j in (k + 1)..n {
                w[i * n + j] -= 2.0 * (v[i] * q[j] + q[i] * v[j]);
            }
        }
        w[(k + 1) * n + k] = alpha;
        w[k * n + k + 1] = alpha;
        for i in (k + 2)..n {
            w[i * n + k] = 0.0;
            w[k * n + i] = 0.0;
        }
    }
    let diag = (0..n).map(|i| w[i * n + i]).collect();
    let off = (0..n.saturating_sub(1)).map(|i| w[(i + 1) * n + i]).collect();
    (diag, off)
}

/// Number of eigenvalues of the symmetric tridiagonal `(diag, off)`
/// strictly below `x`, from the signs of the `LDL^T` pivots of `T - x I`.
pub fn sturm_count(diag: &[f64], off: &[f64], x: f64) -> usize {
    let scale = diag.iter().chain(off).fold(x.abs(), |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
    let tiny = f64::EPSILON * scale * 1e-3;
    let mut count = 0;
    let mut d = 1.0;
    for (i, &bi) in diag.iter().enumerate() {
        let coupling = if i == 0 { 0.0 } else { off[i - 1] * off[i - 1] / d };
        d = bi - x - coupling;
        if d == 0.0 {
            d = -tiny;
        }
        if d < 0.0 {
            count += 1;
        }
    }
    count
}

/// `k`-th smallest (0-based) eigenvalue of the tridiagonal, bisected inside
/// `[lo, hi]` to full working precision.
pub fn sturm_bisect(diag: &[f64], off: &[f64], k: usize, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if sturm_count(diag, off, mid) > k {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}
