//! Local spectra: exactly for single matrices through spectral projections,
//! and for families through neighbourhood probes of the equation
//! `(λI − F(h))x_h(λ) = x`.

mod probe;
mod region;
mod svep;

use thiserror::Error;

use crate::family::FamilyError;
use crate::linalg::{spectral_decomp, CMatrix, CVector, LinalgError, C64};
use crate::spectra::SpectraError;

pub use probe::{
    family_local_probe, family_local_spectrum_grid, local_spectral_space_member, member_from_grid, LocalGridContext,
    LocalParams, LocalProbe, MembershipReport, PointEval, MEMBER_RADIUS_ORDER,
};
pub use region::Region;
pub use svep::{
    local_extension_uniqueness_check, svep_falsification_probe, FnWitness, SvepReport, Witness, WitnessRecord,
};

/// Default clustering distance for exact local spectra.
pub const CLUSTER_TOL: f64 = 1e-5;
/// Default relative threshold on `‖P_i x‖`.
pub const TOL_LOC: f64 = 1e-8;
/// Relative tolerance of the extension residual.
pub const TOL_EXT: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LocalError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error(transparent)]
    Spectra(#[from] SpectraError),
    #[error("λ = {lambda} lies within {radius:e} of the supported eigenvalue {center}")]
    PoleProximity { lambda: C64, center: C64, radius: f64 },
    #[error("rectangle does not cover the spectral-radius disc of radius {radius:e}")]
    RectTooSmall { radius: f64 },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    ExactProjection,
    FamilyProbe,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SupportPoint {
    pub point: C64,
    /// `‖P_i x‖` for the exact method, the deciding probe's minimum tail
    /// `σ_min` for the family method.
    pub evidence: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LocalSpectrumReport {
    pub x: CVector,
    pub support: Vec<SupportPoint>,
    pub method: Method,
    /// Set for `x = 0`, whose local spectrum is empty by convention.
    pub zero_vector: bool,
}

impl LocalSpectrumReport {
    pub fn points(&self) -> Vec<C64> {
        self.support.iter().map(|s| s.point).collect()
    }
}

fn check_dim(a: &CMatrix, x: &CVector) -> Result<(), LocalError> {
    if a.dim() != x.dim() {
        return Err(LocalError::DimensionMismatch(a.dim(), x.dim()));
    }
    Ok(())
}

/// `Sp_A(x) = {λ_i : ‖P_i x‖ > tol_loc·‖x‖}`.
pub fn local_spectrum_exact(a: &CMatrix, x: &CVector, tol_loc: f64) -> Result<LocalSpectrumReport, LocalError> {
    local_spectrum_exact_with(a, x, tol_loc, CLUSTER_TOL)
}

pub fn local_spectrum_exact_with(
    a: &CMatrix,
    x: &CVector,
    tol_loc: f64,
    cluster_tol: f64,
) -> Result<LocalSpectrumReport, LocalError> {
    check_dim(a, x)?;
    if x.is_zero() {
        return Ok(LocalSpectrumReport {
            x: x.clone(),
            support: Vec::new(),
            method: Method::ExactProjection,
            zero_vector: true,
        });
    }
    let dec = spectral_decomp(a, cluster_tol)?;
    let xn = x.norm();
    let support = dec
        .clusters
        .iter()
        .filter_map(|cl| {
            let px = cl.projection.mul_vec(x).norm();
            (px > tol_loc * xn).then_some(SupportPoint {
                point: cl.center,
                evidence: px,
            })
        })
        .collect();
    Ok(LocalSpectrumReport {
        x: x.clone(),
        support,
        method: Method::ExactProjection,
        zero_vector: false,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExtensionEval {
    pub lambda: C64,
    pub value: CVector,
    /// Per supported cluster: its centre and `‖N_i^j P_i x‖` for `j < m_i`.
    pub pole_data: Vec<(C64, Vec<f64>)>,
    /// `‖(λI − A)·value − x‖`.
    pub residual: f64,
}

/// `x(λ) = Σ_i Σ_{j<m_i} (λ−λ_i)^{−(j+1)} N_i^j P_i x`, summed over the
/// clusters supporting `x`.
pub fn maximal_extension_eval(a: &CMatrix, x: &CVector, lambda: C64) -> Result<ExtensionEval, LocalError> {
    check_dim(a, x)?;
    let d = a.dim();
    if x.is_zero() {
        return Ok(ExtensionEval {
            lambda,
            value: CVector::zeros(d),
            pole_data: Vec::new(),
            residual: 0.0,
        });
    }
    let dec = spectral_decomp(a, CLUSTER_TOL)?;
    let xn = x.norm();
    let mut value = CVector::zeros(d);
    let mut pole_data = Vec::new();
    for cl in &dec.clusters {
        let px = cl.projection.mul_vec(x);
        if px.norm() <= TOL_LOC * xn {
            continue;
        }
        let dist = (lambda - cl.center).norm();
        if dist <= dec.radius {
            return Err(LocalError::PoleProximity {
                lambda,
                center: cl.center,
                radius: dec.radius,
            });
        }
        let inv = C64::new(1.0, 0.0) / (lambda - cl.center);
        let mut term = px;
        let mut factor = inv;
        let mut norms = Vec::with_capacity(cl.multiplicity);
        for _ in 0..cl.multiplicity.max(1) {
            norms.push(term.norm());
            value = &value + &term.scale(factor);
            term = cl.nilpotent.mul_vec(&term);
            factor *= inv;
        }
        pole_data.push((cl.center, norms));
    }
    let residual = (&a.shifted_from(lambda).mul_vec(&value) - x).norm();
    Ok(ExtensionEval {
        lambda,
        value,
        pole_data,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, solve};

    #[test]
    fn exact_examples() {
        let d = CMatrix::from_real_diag(&[1.0, 2.0]);
        let r = local_spectrum_exact(&d, &CVector::basis(2, 0), TOL_LOC).unwrap();
        assert_eq!(r.points().len(), 1);
        assert!((r.points()[0] - c(1.0, 0.0)).norm() < 1e-12);
        let r = local_spectrum_exact(&d, &CVector::from_real(&[1.0, 1.0]), TOL_LOC).unwrap();
        assert_eq!(r.points().len(), 2);
        let r = local_spectrum_exact(&CMatrix::shift(2), &CVector::basis(2, 0), TOL_LOC).unwrap();
        assert_eq!(r.points(), vec![c(0.0, 0.0)]);
        let r = local_spectrum_exact(&d, &CVector::zeros(2), TOL_LOC).unwrap();
        assert!(r.zero_vector && r.support.is_empty());
    }

    #[test]
    fn extension_examples() {
        let d = CMatrix::from_real_diag(&[1.0, 2.0]);
        let e = maximal_extension_eval(&d, &CVector::basis(2, 0), c(3.0, 0.0)).unwrap();
        assert!((&e.value - &CVector::from_real(&[0.5, 0.0])).norm() < 1e-12);
        let e = maximal_extension_eval(&d, &CVector::basis(2, 1), c(3.0, 0.0)).unwrap();
        assert!((&e.value - &CVector::from_real(&[0.0, 1.0])).norm() < 1e-12);
        // analytic at 2 because x has no component there
        let e = maximal_extension_eval(&d, &CVector::basis(2, 0), c(2.0, 0.0)).unwrap();
        assert!((&e.value - &CVector::from_real(&[1.0, 0.0])).norm() < 1e-12);
        let e = maximal_extension_eval(&d, &CVector::zeros(2), c(1.0, 0.0)).unwrap();
        assert!(e.value.is_zero());
        assert!(matches!(
            maximal_extension_eval(&d, &CVector::basis(2, 1), c(2.1, 0.0)),
            Err(LocalError::PoleProximity { .. })
        ));
    }

    #[test]
    fn extension_matches_solve_for_jordan_block() {
        let a = CMatrix::jordan(c(0.5, 0.0), 3);
        let x = CVector::from_real(&[1.0, -2.0, 0.5]);
        let lambda = c(2.0, 1.0);
        let e = maximal_extension_eval(&a, &x, lambda).unwrap();
        let y = solve(&a.shifted_from(lambda), &x).unwrap();
        assert!((&e.value - &y).norm() < TOL_EXT);
        assert!(e.residual <= TOL_EXT * (a.norm() + lambda.norm()) * e.value.norm());
        assert_eq!(e.pole_data[0].1.len(), 3);
    }
}
