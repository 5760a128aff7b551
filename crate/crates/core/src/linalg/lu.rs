//! LU factorisation with partial pivoting.

use super::{CMatrix, CVector, LinalgError, Result, C64};

/// Backward-error target for [`solve`].
pub const TOL_SOLVE: f64 = 1e-12;
/// Relative pivot threshold below which a matrix is reported singular.
pub const EPS_PIVOT: f64 = 1e-14;

#[derive(Clone, Debug)]
pub struct Lu {
    lu: CMatrix,
    perm: Vec<usize>,
}

impl Lu {
    pub fn factor(a: &CMatrix) -> Result<Self> {
        a.check_finite()?;
        let n = a.dim();
        let scale = norm1(a);
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let (p, pivot) =
                (k..n)
                    .map(|i| (i, lu[(i, k)].norm()))
                    .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pivot <= EPS_PIVOT * scale || pivot == 0.0 {
                return Err(LinalgError::Singular { pivot });
            }
            if p != k {
                perm.swap(p, k);
                for j in 0..n {
                    let tmp = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = tmp;
                }
            }
            let inv = C64::new(1.0, 0.0) / lu[(k, k)];
            for i in (k + 1)..n {
                let f = lu[(i, k)] * inv;
                lu[(i, k)] = f;
                if f.re == 0.0 && f.im == 0.0 {
                    continue;
                }
                for j in (k + 1)..n {
                    let t = lu[(k, j)];
                    lu[(i, j)] -= f * t;
                }
            }
        }
        Ok(Self { lu, perm })
    }

    pub fn solve(&self, b: &CVector) -> CVector {
        let n = self.lu.dim();
        assert_eq!(b.dim(), n, "dimension mismatch in solve");
        let mut y: Vec<C64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let mut acc = y[i];
            for j in 0..i {
                acc -= self.lu[(i, j)] * y[j];
            }
            y[i] = acc;
        }
        for i in (0..n).rev() {
            let mut acc = y[i];
            for j in (i + 1)..n {
                acc -= self.lu[(i, j)] * y[j];
            }
            y[i] = acc / self.lu[(i, i)];
        }
        CVector::from_vec_unchecked(y)
    }

    pub fn inverse(&self) -> CMatrix {
        let n = self.lu.dim();
        let mut inv = CMatrix::zeros(n);
        for j in 0..n {
            let col = self.solve(&CVector::basis(n, j));
            for i in 0..n {
                inv[(i, j)] = col[i];
            }
        }
        inv
    }
}

fn norm1(a: &CMatrix) -> f64 {
    let n = a.dim();
    (0..n)
        .map(|j| (0..n).map(|i| a[(i, j)].norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Solves `Ay = b` by pivoted elimination.
pub fn solve(a: &CMatrix, b: &CVector) -> Result<CVector> {
    if a.dim() != b.dim() {
        return Err(LinalgError::DimensionMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    Ok(Lu::factor(a)?.solve(b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solve_examples() {
        let y = solve(&CMatrix::identity(2), &CVector::from_real(&[1.0, 2.0])).unwrap();
        assert_eq!(y, CVector::from_real(&[1.0, 2.0]));
        let y = solve(&CMatrix::from_real_diag(&[2.0, 4.0]), &CVector::from_real(&[2.0, 4.0])).unwrap();
        assert_eq!(y, CVector::from_real(&[1.0, 1.0]));
        let a = CMatrix::from_real_rows(&[&[1.0, 1.0], &[0.0, 1.0]]);
        let y = solve(&a, &CVector::from_real(&[2.0, 1.0])).unwrap();
        assert_eq!(y, CVector::from_real(&[1.0, 1.0]));
    }

    #[test]
    fn singular_matrix_reports_pivot() {
        let a = CMatrix::from_real_diag(&[1.0, 0.0]);
        match solve(&a, &CVector::from_real(&[1.0, 1.0])) {
            Err(LinalgError::Singular { pivot }) => assert_eq!(pivot, 0.0),
            other => panic!("expected singular error, got {other:?}"),
        }
    }

    #[test]
    fn dimension_mismatch() {
        assert!(matches!(
            solve(&CMatrix::identity(2), &CVector::zeros(3)),
            Err(LinalgError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn inverse_times_matrix_is_identity() {
        let a = CMatrix::from_real_rows(&[&[4.0, 1.0, 0.5], &[1.0, 3.0, -1.0], &[0.0, 2.0, 5.0]]);
        let inv = Lu::factor(&a).unwrap().inverse();
        let e = &(&a * &inv) - &CMatrix::identity(3);
        assert!(e.frobenius_norm() < 1e-14);
    }
}
