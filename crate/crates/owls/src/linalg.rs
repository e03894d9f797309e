//! Dense symmetric linear algebra sized for moderate Gramians (m ≤ a few
//! hundred): a cyclic Jacobi eigensolver, Cholesky factorization, and a
//! minimal-norm pseudo-inverse solve. Jacobi is chosen over faster
//! tridiagonalization because it is simple, unconditionally stable, and
//! computes small eigenvalues of positive semidefinite matrices to absolute
//! accuracy near machine epsilon times the norm, which is exactly what the
//! conditioning statistics need.

use crate::{Error, Result};

/// Row-major square matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    n: usize,
    a: Vec<f64>,
}

/// Relative off-diagonal tolerance at which a Jacobi sweep is declared
/// converged, measured against the Frobenius norm of the input.
pub const JACOBI_TOL: f64 = 1e-12;

const MAX_SWEEPS: usize = 60;

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        Matrix {
            n,
            a: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n);
        for i in 0..n {
            m.a[i * n + i] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut a = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::LengthMismatch {
                    what: "matrix row",
                    expected: n,
                    got: row.len(),
                });
            }
            a.extend_from_slice(row);
        }
        Ok(Matrix { n, a })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.a[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.a[i * self.n + j] = v;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.a[i * self.n..(i + 1) * self.n]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.a
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.a
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.n;
        assert_eq!(x.len(), n);
        let mut y = vec![0.0; n];
        for i in 0..n {
            let mut s = 0.0;
            for (aij, xj) in self.row(i).iter().zip(x) {
                s += aij * xj;
            }
            y[i] = s;
        }
        y
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.a.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Verify symmetry to a relative tolerance; the Gramian assembly mirrors
    /// its upper triangle so assembled matrices pass bit-exactly.
    pub fn check_symmetric(&self, rel_tol: f64) -> Result<()> {
        let scale = self.frobenius_norm().max(1.0);
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                let dev = (self.get(i, j) - self.get(j, i)).abs();
                if dev > rel_tol * scale {
                    return Err(Error::NotSymmetric { i, j, dev });
                }
            }
        }
        Ok(())
    }

    fn off_diag_sq(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                let v = self.get(i, j);
                s += 2.0 * v * v;
            }
        }
        s
    }

    /// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, sorted
    /// ascending. The caller is responsible for symmetry.
    pub fn jacobi_eigenvalues(&self) -> Vec<f64> {
        let mut work = self.clone();
        work.jacobi_inner(None);
        let mut vals: Vec<f64> = (0..self.n).map(|i| work.get(i, i)).collect();
        vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        vals
    }

    /// Eigen-decomposition `A = V diag(vals) Vᵀ`; column j of `V` pairs with
    /// `vals[j]`, eigenvalues ascending.
    pub fn jacobi_eigen(&self) -> (Vec<f64>, Matrix) {
        let n = self.n;
        let mut work = self.clone();
        let mut v = Matrix::identity(n);
        work.jacobi_inner(Some(&mut v));
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| work.get(i, i).partial_cmp(&work.get(j, j)).unwrap());
        let vals: Vec<f64> = order.iter().map(|&i| work.get(i, i)).collect();
        let mut vecs = Matrix::zeros(n);
        for (newj, &oldj) in order.iter().enumerate() {
            for i in 0..n {
                vecs.set(i, newj, v.get(i, oldj));
            }
        }
        (vals, vecs)
    }

    fn jacobi_inner(&mut self, mut vectors: Option<&mut Matrix>) {
        let n = self.n;
        if n <= 1 {
            return;
        }
        let frob = self.frobenius_norm();
        if frob == 0.0 {
            return;
        }
        let stop = (JACOBI_TOL * frob) * (JACOBI_TOL * frob);
        for _sweep in 0..MAX_SWEEPS {
            if self.off_diag_sq() <= stop {
                break;
            }
            for p in 0..n - 1 {
                for q in (p + 1)..n {
                    let apq = self.get(p, q);
                    if apq == 0.0 {
                        continue;
                    }
                    let app = self.get(p, p);
                    let aqq = self.get(q, q);
                    // Skip rotations that cannot change anything at working
                    // precision; keeps the sweep count low on converged rows.
                    if apq.abs() <= f64::EPSILON * 0.5 * (app.abs() + aqq.abs()) * 1e-4 {
                        continue;
                    }
                    let tau = (aqq - app) / (2.0 * apq);
                    let t = if tau >= 0.0 {
                        1.0 / (tau + (1.0 + tau * tau).sqrt())
                    } else {
                        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                    };
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let s = t * c;
                    // Rotate rows/columns p and q of the symmetric matrix.
                    for k in 0..n {
                        let akp = self.get(k, p);
                        let akq = self.get(k, q);
                        self.set(k, p, c * akp - s * akq);
                        self.set(k, q, s * akp + c * akq);
                    }
                    for k in 0..n {
                        let apk = self.get(p, k);
                        let aqk = self.get(q, k);
                        self.set(p, k, c * apk - s * aqk);
                        self.set(q, k, s * apk + c * aqk);
                    }
                    // Re-symmetrize the rotated pair exactly.
                    let pq = 0.5 * (self.get(p, q) + self.get(q, p));
                    self.set(p, q, pq);
                    self.set(q, p, pq);
                    if let Some(v) = vectors.as_deref_mut() {
                        for k in 0..n {
                            let vkp = v.get(k, p);
                            let vkq = v.get(k, q);
                            v.set(k, p, c * vkp - s * vkq);
                            v.set(k, q, s * vkp + c * vkq);
                        }
                    }
                }
            }
        }
    }

    /// Cholesky solve `A x = b` for symmetric positive definite `A`.
    /// Returns `None` when a pivot is nonpositive (A not definite at working
    /// precision), in which case callers fall back to the eigen route.
    pub fn cholesky_solve(&self, b: &[f64]) -> Option<Vec<f64>> {
        let n = self.n;
        assert_eq!(b.len(), n);
        let mut l = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                let mut s = self.get(i, j);
                for k in 0..j {
                    s -= l[i * n + k] * l[j * n + k];
                }
                if i == j {
                    if !(s > 0.0) {
                        return None;
                    }
                    l[i * n + i] = s.sqrt();
                } else {
                    l[i * n + j] = s / l[j * n + j];
                }
            }
        }
        // Forward substitution L y = b.
        let mut y = vec![0.0; n];
        for i in 0..n {
            let mut s = b[i];
            for k in 0..i {
                s -= l[i * n + k] * y[k];
            }
            y[i] = s / l[i * n + i];
        }
        // Back substitution Lᵀ x = y.
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in (i + 1)..n {
                s -= l[k * n + i] * x[k];
            }
            x[i] = s / l[i * n + i];
        }
        Some(x)
    }

    /// Minimal-norm solution of `A x = b` for symmetric positive
    /// semidefinite `A` via eigen-decomposition: directions with eigenvalue
    /// at or below `rel_cutoff · λ_max` are dropped. For consistent systems
    /// this is the minimal-ℓ² solution; for inconsistent ones it is the
    /// minimal-norm least-squares solution.
    pub fn pseudo_solve(&self, b: &[f64], rel_cutoff: f64) -> Vec<f64> {
        let n = self.n;
        assert_eq!(b.len(), n);
        let (vals, vecs) = self.jacobi_eigen();
        let lambda_max = vals.iter().cloned().fold(0.0, f64::max);
        if lambda_max <= 0.0 {
            return vec![0.0; n];
        }
        let cutoff = rel_cutoff * lambda_max;
        let mut x = vec![0.0; n];
        for (j, &lam) in vals.iter().enumerate() {
            if lam <= cutoff {
                continue;
            }
            let mut proj = 0.0;
            for i in 0..n {
                proj += vecs.get(i, j) * b[i];
            }
            let scale = proj / lam;
            for i in 0..n {
                x[i] += scale * vecs.get(i, j);
            }
        }
        x
    }
}
