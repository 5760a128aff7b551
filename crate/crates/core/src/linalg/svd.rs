//! One-sided (Hestenes) Jacobi SVD for complex square matrices.

use super::{CMatrix, CVector, Result, C64};

const MAX_SWEEPS: usize = 80;

/// `A = U diag(s) V*`, singular values sorted in decreasing order.
#[derive(Clone, Debug)]
pub struct Svd {
    pub u: CMatrix,
    pub s: Vec<f64>,
    pub v: CMatrix,
}

impl Svd {
    /// Minimum-norm least-squares solution of `Ay = b`, dropping singular
    /// values below `cutoff`.
    pub fn pseudo_solve(&self, b: &CVector, cutoff: f64) -> CVector {
        let n = self.s.len();
        let mut y = CVector::zeros(n);
        for k in 0..n {
            if self.s[k] <= cutoff {
                continue;
            }
            let uk = self.u.column(k);
            let coef = uk.dot(b) / self.s[k];
            for i in 0..n {
                y[i] += self.v[(i, k)] * coef;
            }
        }
        y
    }
}

/// Column-major working storage: `cols[j]` is column `j`.
struct Columns {
    cols: Vec<Vec<C64>>,
}

impl Columns {
    fn of(a: &CMatrix) -> Self {
        let n = a.dim();
        let cols = (0..n).map(|j| (0..n).map(|i| a[(i, j)]).collect()).collect();
        Self { cols }
    }

    fn identity(n: usize) -> Self {
        let cols = (0..n)
            .map(|j| {
                (0..n)
                    .map(|i| if i == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) })
                    .collect()
            })
            .collect();
        Self { cols }
    }

    /// Applies `[u_p, u_q] ← [c u_p − s φ u_q, s u_p + c φ u_q]` with `φ = e^{−iθ}`.
    fn rotate(&mut self, p: usize, q: usize, c: f64, s: f64, phase: C64) {
        let (lo, hi) = self.cols.split_at_mut(q);
        let cp = &mut lo[p];
        let cq = &mut hi[0];
        for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
            let yq = *y * phase;
            let xp = *x;
            *x = xp * c - yq * s;
            *y = xp * s + yq * c;
        }
    }
}

fn jacobi(a: &CMatrix, want_v: bool) -> (Columns, Option<Columns>) {
    let n = a.dim();
    let mut u = Columns::of(a);
    let mut v = want_v.then(|| Columns::identity(n));
    let eps = f64::EPSILON;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let (alpha, beta, gamma) = {
                    let cp = &u.cols[p];
                    let cq = &u.cols[q];
                    let mut alpha = 0.0;
                    let mut beta = 0.0;
                    let mut gamma = C64::new(0.0, 0.0);
                    for (x, y) in cp.iter().zip(cq) {
                        alpha += x.norm_sqr();
                        beta += y.norm_sqr();
                        gamma += x.conj() * y;
                    }
                    (alpha, beta, gamma)
                };
                let g = gamma.norm();
                if g == 0.0 || g <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = (gamma / g).conj();
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                u.rotate(p, q, c, s, phase);
                if let Some(v) = v.as_mut() {
                    v.rotate(p, q, c, s, phase);
                }
            }
        }
        if !rotated {
            break;
        }
    }
    (u, v)
}

fn column_norm(col: &[C64]) -> f64 {
    col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Singular values in decreasing order.
pub fn singular_values(a: &CMatrix) -> Vec<f64> {
    let (u, _) = jacobi(a, false);
    let mut s: Vec<f64> = u.cols.iter().map(|c| column_norm(c)).collect();
    s.sort_by(|x, y| y.total_cmp(x));
    s
}

/// Full SVD.
pub fn svd(a: &CMatrix) -> Svd {
    let n = a.dim();
    let (u, v) = jacobi(a, true);
    let v = v.expect("requested V");
    let norms: Vec<f64> = u.cols.iter().map(|c| column_norm(c)).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| norms[y].total_cmp(&norms[x]));

    let mut umat = CMatrix::zeros(n);
    let mut vmat = CMatrix::zeros(n);
    let mut s = Vec::with_capacity(n);
    for (k, &j) in order.iter().enumerate() {
        let sigma = norms[j];
        s.push(sigma);
        for i in 0..n {
            vmat[(i, k)] = v.cols[j][i];
            if sigma > 0.0 {
                umat[(i, k)] = u.cols[j][i] / sigma;
            }
        }
    }
    complete_basis(&mut umat, &s);
    Svd { u: umat, s, v: vmat }
}

/// Fills the columns of `u` that belong to zero singular values with an
/// orthonormal completion (Gram–Schmidt against the standard basis).
fn complete_basis(u: &mut CMatrix, s: &[f64]) {
    let n = u.dim();
    let mut filled: Vec<usize> = (0..n).filter(|&k| s[k] > 0.0).collect();
    let missing: Vec<usize> = (0..n).filter(|&k| s[k] == 0.0).collect();
    let mut candidate = 0;
    for k in missing {
        while candidate < n {
            let mut w = CVector::basis(n, candidate);
            candidate += 1;
            for _ in 0..2 {
                for &j in &filled {
                    let col = u.column(j);
                    let proj = col.dot(&w);
                    for i in 0..n {
                        w[i] -= col[i] * proj;
                    }
                }
            }
            let norm = w.norm();
            if norm > 1e-8 {
                for i in 0..n {
                    u[(i, k)] = w[i] / norm;
                }
                filled.push(k);
                break;
            }
        }
    }
}

/// Spectral norm `‖A‖₂`.
pub fn op_norm(a: &CMatrix) -> Result<f64> {
    a.check_finite()?;
    Ok(singular_values(a)[0])
}

/// Smallest singular value; exactly `0.0` when a column vanishes.
pub fn sigma_min(a: &CMatrix) -> Result<f64> {
    a.check_finite()?;
    Ok(*singular_values(a).last().expect("dim >= 1"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;

    #[test]
    fn op_norm_examples() {
        assert_eq!(op_norm(&CMatrix::identity(3)).unwrap(), 1.0);
        assert_eq!(op_norm(&CMatrix::from_real_diag(&[0.0, -2.0])).unwrap(), 2.0);
        // N*N = diag(0, 1): singular values {1, 0}
        assert_eq!(op_norm(&CMatrix::shift(2)).unwrap(), 1.0);
    }

    #[test]
    fn sigma_min_examples() {
        assert_eq!(sigma_min(&CMatrix::identity(2)).unwrap(), 1.0);
        let d = CMatrix::from_real_diag(&[3.0, 1e-9]);
        assert!((sigma_min(&d).unwrap() - 1e-9).abs() <= 1e-17);
        let a = CMatrix::from_real_rows(&[&[0.0, 1.0], &[0.25, 0.0]]);
        assert!((sigma_min(&a).unwrap() - 0.25).abs() <= 1e-15);
        assert_eq!(sigma_min(&CMatrix::shift(3)).unwrap(), 0.0);
    }

    #[test]
    fn svd_reconstructs_general_matrix() {
        let a = CMatrix::from_fn(4, |i, j| {
            c((i as f64 + 1.0) * 0.3 - j as f64, (i * j) as f64 * 0.1 - 0.2)
        });
        let Svd { u, s, v } = svd(&a);
        let sig = CMatrix::from_real_diag(&s);
        let back = &(&u * &sig) * &v.adjoint();
        assert!((&back - &a).frobenius_norm() < 1e-12 * a.frobenius_norm());
        let utu = &u.adjoint() * &u;
        assert!((&utu - &CMatrix::identity(4)).frobenius_norm() < 1e-12);
        assert!(s.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn pseudo_solve_drops_null_directions() {
        let a = CMatrix::from_real_diag(&[1.0, 0.0]);
        let y = svd(&a).pseudo_solve(&CVector::from_real(&[2.0, 5.0]), 1e-13);
        assert_eq!(y, CVector::from_real(&[2.0, 0.0]));
    }

    #[test]
    fn non_finite_input_is_rejected() {
        let mut a = CMatrix::identity(2);
        a[(1, 0)] = c(f64::INFINITY, 0.0);
        assert!(op_norm(&a).is_err());
    }
}
