//! Eigenvalues by Householder reduction to Hessenberg form followed by
//! single-shift complex QR iteration with deflation.

use super::{CMatrix, LinalgError, Result, C64};

/// Total QR sweeps allowed per unit of dimension.
const QR_ITERS_PER_DIM: usize = 40;

/// Unitary reduction to upper Hessenberg form. Columns that are already in
/// Hessenberg shape are left untouched, so triangular input is preserved
/// bit-for-bit.
pub fn hessenberg(a: &CMatrix) -> CMatrix {
    let n = a.dim();
    let mut h = a.clone();
    if n < 3 {
        return h;
    }
    for k in 0..n - 2 {
        let below: f64 = ((k + 2)..n).map(|i| h[(i, k)].norm_sqr()).sum();
        if below == 0.0 {
            continue;
        }
        let x0 = h[(k + 1, k)];
        let xnorm = (below + x0.norm_sqr()).sqrt();
        let phase = if x0.norm() == 0.0 {
            C64::new(1.0, 0.0)
        } else {
            x0 / x0.norm()
        };
        let alpha = -phase * xnorm;
        let mut v: Vec<C64> = ((k + 1)..n).map(|i| h[(i, k)]).collect();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        // H ← (I − 2vv*/v*v) H
        for j in k..n {
            let s: C64 = v.iter().enumerate().map(|(r, vr)| vr.conj() * h[(k + 1 + r, j)]).sum();
            let f = s * (2.0 / vnorm2);
            for (r, vr) in v.iter().enumerate() {
                h[(k + 1 + r, j)] -= vr * f;
            }
        }
        // H ← H (I − 2vv*/v*v)
        for i in 0..n {
            let s: C64 = v.iter().enumerate().map(|(r, vr)| h[(i, k + 1 + r)] * vr).sum();
            let f = s * (2.0 / vnorm2);
            for (r, vr) in v.iter().enumerate() {
                h[(i, k + 1 + r)] -= f * vr.conj();
            }
        }
        for i in (k + 2)..n {
            h[(i, k)] = C64::new(0.0, 0.0);
        }
    }
    h
}

/// Eigenvalue of the trailing 2×2 block closer to its last diagonal entry.
fn wilkinson_shift(a: C64, b: C64, c: C64, d: C64) -> C64 {
    let half = (a - d) * 0.5;
    let disc = (half * half + b * c).sqrt();
    let mid = (a + d) * 0.5;
    let r1 = mid + disc;
    let r2 = mid - disc;
    if (r1 - d).norm() <= (r2 - d).norm() {
        r1
    } else {
        r2
    }
}

/// Complex Givens rotation `G` with `G [f; g] = [r; 0]`, returned as `(c, s)`
/// where `G = [[c, s], [−s̄, c]]` and `c` is real.
fn givens(f: C64, g: C64) -> (f64, C64) {
    let gn = g.norm();
    if gn == 0.0 {
        return (1.0, C64::new(0.0, 0.0));
    }
    let fnorm = f.norm();
    if fnorm == 0.0 {
        return (0.0, g.conj() / gn);
    }
    let r = fnorm.hypot(gn);
    let c = fnorm / r;
    let s = (f / fnorm) * g.conj() / r;
    (c, s)
}

/// All `d` eigenvalues of `a`, with algebraic multiplicity.
pub fn eigenvalues(a: &CMatrix) -> Result<Vec<C64>> {
    a.check_finite()?;
    let n = a.dim();
    let mut h = hessenberg(a);
    let mut eig = vec![C64::new(0.0, 0.0); n];
    let max_iters = QR_ITERS_PER_DIM * n;
    let eps = f64::EPSILON;
    let mut total = 0usize;
    let mut since_deflation = 0usize;
    let mut hi = n - 1;

    while hi > 0 {
        let mut l = hi;
        while l > 0 {
            let sub = h[(l, l - 1)].norm();
            let mut tst = h[(l - 1, l - 1)].norm() + h[(l, l)].norm();
            if tst == 0.0 {
                tst = window_norm(&h, 0, hi);
            }
            if sub <= eps * tst {
                h[(l, l - 1)] = C64::new(0.0, 0.0);
                break;
            }
            l -= 1;
        }
        if l == hi {
            eig[hi] = h[(hi, hi)];
            hi -= 1;
            since_deflation = 0;
            continue;
        }
        if total >= max_iters {
            return Err(LinalgError::NoConvergence {
                iterations: total,
                dump: format!("{h:?}"),
            });
        }
        total += 1;
        since_deflation += 1;

        let shift = if since_deflation.is_multiple_of(10) {
            h[(hi, hi)] + h[(hi, hi - 1)].norm() * 0.75
        } else {
            wilkinson_shift(h[(hi - 1, hi - 1)], h[(hi - 1, hi)], h[(hi, hi - 1)], h[(hi, hi)])
        };
        qr_step(&mut h, l, hi, shift);
    }
    eig[0] = h[(0, 0)];
    Ok(eig)
}

fn window_norm(h: &CMatrix, lo: usize, hi: usize) -> f64 {
    let mut s = 0.0;
    for i in lo..=hi {
        for j in lo..=hi {
            s += h[(i, j)].norm_sqr();
        }
    }
    s.sqrt()
}

/// One explicit shifted QR step `H − σI = QR, H ← RQ + σI` on the active
/// window `[lo, hi]`.
fn qr_step(h: &mut CMatrix, lo: usize, hi: usize, shift: C64) {
    for i in lo..=hi {
        h[(i, i)] -= shift;
    }
    let mut rots = Vec::with_capacity(hi - lo);
    for k in lo..hi {
        let (c, s) = givens(h[(k, k)], h[(k + 1, k)]);
        for j in k..=hi {
            let a = h[(k, j)];
            let b = h[(k + 1, j)];
            h[(k, j)] = a * c + s * b;
            h[(k + 1, j)] = -s.conj() * a + b * c;
        }
        rots.push((c, s));
    }
    for (idx, &(c, s)) in rots.iter().enumerate() {
        let k = lo + idx;
        let top = (k + 2).min(hi);
        for i in lo..=top {
            let a = h[(i, k)];
            let b = h[(i, k + 1)];
            h[(i, k)] = a * c + b * s.conj();
            h[(i, k + 1)] = -a * s + b * c;
        }
    }
    for i in lo..=hi {
        h[(i, i)] += shift;
    }
}

/// Optimal-matching distance `min_π max_i |a_i − b_π(i)|` between two
/// multisets. Exhaustive for sizes up to 8, greedy beyond.
pub fn multiset_distance(a: &[C64], b: &[C64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let n = a.len();
    if n == 0 {
        return 0.0;
    }
    if n <= 8 {
        let mut perm: Vec<usize> = (0..n).collect();
        let mut best = f64::INFINITY;
        permute(&mut perm, 0, &mut |p| {
            let d = (0..n).map(|i| (a[i] - b[p[i]]).norm()).fold(0.0, f64::max);
            if d < best {
                best = d;
            }
        });
        best
    } else {
        let mut used = vec![false; n];
        let mut worst: f64 = 0.0;
        for &x in a {
            let (j, d) = b
                .iter()
                .enumerate()
                .filter(|(j, _)| !used[*j])
                .map(|(j, &y)| (j, (x - y).norm()))
                .fold(
                    (usize::MAX, f64::INFINITY),
                    |acc, cur| if cur.1 < acc.1 { cur } else { acc },
                );
            used[j] = true;
            worst = worst.max(d);
        }
        worst
    }
}

fn permute(p: &mut Vec<usize>, k: usize, visit: &mut impl FnMut(&[usize])) {
    if k == p.len() {
        visit(p);
        return;
    }
    for i in k..p.len() {
        p.swap(k, i);
        permute(p, k + 1, visit);
        p.swap(k, i);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;

    fn sorted_re(mut v: Vec<C64>) -> Vec<f64> {
        v.sort_by(|a, b| a.re.total_cmp(&b.re));
        v.into_iter().map(|z| z.re).collect()
    }

    #[test]
    fn diagonal_eigenvalues() {
        let e = eigenvalues(&CMatrix::from_real_diag(&[1.0, 2.0, 3.0])).unwrap();
        assert_eq!(sorted_re(e), vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn nilpotent_eigenvalues_are_exactly_zero() {
        let e = eigenvalues(&CMatrix::shift(2)).unwrap();
        assert!(e.iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn characteristic_polynomial_example() {
        // λ² − 0.25 = 0
        let a = CMatrix::from_real_rows(&[&[0.0, 1.0], &[0.25, 0.0]]);
        let e = eigenvalues(&a).unwrap();
        assert!(multiset_distance(&e, &[c(0.5, 0.0), c(-0.5, 0.0)]) < 1e-14);
    }

    #[test]
    fn companion_matrix_roots() {
        // roots 1, 2, 3, 4: λ⁴ − 10λ³ + 35λ² − 50λ + 24
        let a = CMatrix::from_real_rows(&[
            &[10.0, -35.0, 50.0, -24.0],
            &[1.0, 0.0, 0.0, 0.0],
            &[0.0, 1.0, 0.0, 0.0],
            &[0.0, 0.0, 1.0, 0.0],
        ]);
        let e = eigenvalues(&a).unwrap();
        let want = [c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0), c(4.0, 0.0)];
        assert!(multiset_distance(&e, &want) < 1e-8 * 60.0);
    }

    #[test]
    fn rotation_has_complex_pair() {
        let a = CMatrix::from_real_rows(&[&[0.0, -1.0], &[1.0, 0.0]]);
        let e = eigenvalues(&a).unwrap();
        assert!(multiset_distance(&e, &[c(0.0, 1.0), c(0.0, -1.0)]) < 1e-14);
    }

    #[test]
    fn hessenberg_preserves_spectrum_and_shape() {
        let a = CMatrix::from_fn(5, |i, j| {
            c(((i * 7 + j * 3) % 5) as f64 - 2.0, (i as f64 - j as f64) * 0.3)
        });
        let h = hessenberg(&a);
        for i in 2..5 {
            for j in 0..i - 1 {
                assert_eq!(h[(i, j)], c(0.0, 0.0));
            }
        }
        assert!((h.trace() - a.trace()).norm() < 1e-12);
        assert!((h.frobenius_norm() - a.frobenius_norm()).abs() < 1e-12);
    }

    #[test]
    fn multiset_distance_matches_best_permutation() {
        let a = [c(0.0, 0.0), c(1.0, 0.0), c(2.0, 0.0)];
        let b = [c(2.0, 0.1), c(0.0, 0.0), c(1.0, 0.0)];
        assert!((multiset_distance(&a, &b) - 0.1).abs() < 1e-15);
    }
}
