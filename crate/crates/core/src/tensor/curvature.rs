//! Curvature decomposition in an orthonormal frame.
//!
//! With `g = δ` the decomposition reads
//!
//! ```text
//! Rm = W + 1/(n-2) Ric ∧ δ - R / (2(n-1)(n-2)) δ ∧ δ
//! ```
//!
//! where `∧` is the Kulkarni-Nomizu product
//! `(S ∧ T)_ijkl = S_ik T_jl + S_jl T_ik - S_il T_jk - S_jk T_il`.

use serde::{Deserialize, Serialize};

use super::{Riem4, Sym2};
use crate::error::{Error, Result};
use crate::tol;

pub const MIN_DIM: usize = 3;
pub const MAX_DIM: usize = 8;

pub(crate) fn check_dim(n: usize) -> Result<()> {
    if !(MIN_DIM..=MAX_DIM).contains(&n) {
        return Err(Error::UnsupportedDimension {
            n,
            reason: "supported range is 3..=8",
        });
    }
    Ok(())
}

#[cfg(not(feature = "kn-sign-flip"))]
const KN_SIGN: f64 = 1.0;
#[cfg(feature = "kn-sign-flip")]
const KN_SIGN: f64 = -1.0;

/// Kulkarni-Nomizu product of two symmetric forms.
pub fn kulkarni_nomizu(s: &Sym2, t: &Sym2) -> Result<Riem4> {
    s.check_dim(t)?;
    Ok(Riem4::from_fn_raw(s.dim(), |i, j, k, l| {
        KN_SIGN
            * (s.get(i, k) * t.get(j, l) + s.get(j, l) * t.get(i, k)
                - s.get(i, l) * t.get(j, k)
                - s.get(j, k) * t.get(i, l))
    }))
}

/// `Ric_jl = Σ_i Rm_ijil` and `R = tr Ric`.
pub fn ricci_contract(rm: &Riem4) -> (Sym2, f64) {
    let n = rm.dim();
    let ric = Sym2::symmetrize(n, |j, l| (0..n).map(|i| rm.get(i, j, i, l)).sum());
    let r = ric.trace();
    (ric, r)
}

/// Inverse of the decomposition: assembles `Rm` from a trace-free `W`, `Ric` and `R`.
pub fn reconstruct_riemann(w: &Riem4, ric: &Sym2, r: f64) -> Result<Riem4> {
    let n = w.dim();
    if ric.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: ric.dim(),
        });
    }
    check_dim(n)?;
    let bound = tol::INPUT * tol::scale(w.max_abs());
    let tr = w.max_trace();
    if tr > bound {
        return Err(Error::NotTraceFree {
            max_trace: tr,
            tol: bound,
        });
    }
    let nf = n as f64;
    let id = Sym2::identity(n);
    let ric_part = kulkarni_nomizu(ric, &id)?.scale(1.0 / (nf - 2.0));
    let scal_part = kulkarni_nomizu(&id, &id)?.scale(r / (2.0 * (nf - 1.0) * (nf - 2.0)));
    Ok(w.add(&ric_part).sub(&scal_part))
}

/// Weyl tensor `W = Rm - 1/(n-2) E ∧ δ - R/(2n(n-1)) δ ∧ δ`.
///
/// `(ric, r)` must agree with the contraction of `rm`.
pub fn weyl_part(rm: &Riem4, ric: &Sym2, r: f64) -> Result<Riem4> {
    let n = rm.dim();
    check_dim(n)?;
    let (ric_c, r_c) = ricci_contract(rm);
    ric.check_dim(&ric_c)?;
    let bound = tol::INPUT * tol::scale(rm.max_abs());
    let dric = (ric - &ric_c).max_abs();
    if dric > bound || (r - r_c).abs() > bound * n as f64 {
        return Err(Error::Inconsistent(format!(
            "Ricci data disagrees with the contraction of Rm (|ΔRic| = {dric:e}, |ΔR| = {:e})",
            (r - r_c).abs()
        )));
    }
    let nf = n as f64;
    let id = Sym2::identity(n);
    let e = ric.traceless();
    let e_part = kulkarni_nomizu(&e, &id)?.scale(1.0 / (nf - 2.0));
    let scal_part = kulkarni_nomizu(&id, &id)?.scale(r / (2.0 * nf * (nf - 1.0)));
    Ok(rm.sub(&e_part).sub(&scal_part))
}

/// Schouten tensor `A = (Ric - R/(2(n-1)) δ)/(n-2)` and `σ₂(A) = ((tr A)² - |A|²)/2`.
pub fn schouten_sigma2(ric: &Sym2, r: f64) -> Result<(Sym2, f64)> {
    let n = ric.dim();
    if n < 3 {
        return Err(Error::UnsupportedDimension {
            n,
            reason: "Schouten tensor needs n >= 3",
        });
    }
    let nf = n as f64;
    let shift = r / (2.0 * (nf - 1.0));
    let a = Sym2::from_fn(n, |i, j| {
        let d = if i == j { shift } else { 0.0 };
        (ric.get(i, j) - d) / (nf - 2.0)
    });
    let tr = a.trace();
    let sigma2 = 0.5 * (tr * tr - a.norm_sq());
    Ok((a, sigma2))
}

/// Pointwise curvature data of a metric, in an orthonormal frame.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvaturePoint {
    pub n: usize,
    pub rm: Riem4,
    pub ric: Sym2,
    /// Scalar curvature.
    pub r: f64,
    /// Traceless Ricci tensor.
    pub e: Sym2,
    pub w: Riem4,
    /// Schouten tensor.
    pub a: Sym2,
    pub sigma2_a: f64,
    /// `σ_ij = Rm_ijij`, zero on the diagonal.
    pub sectionals: Vec<Vec<f64>>,
}

impl CurvaturePoint {
    pub fn from_riemann(rm: Riem4) -> Result<Self> {
        let n = rm.dim();
        check_dim(n)?;
        let (ric, r) = ricci_contract(&rm);
        let e = ric.traceless();
        let w = weyl_part(&rm, &ric, r)?;
        let (a, sigma2_a) = schouten_sigma2(&ric, r)?;
        let sectionals = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { 0.0 } else { rm.sectional(i, j) })
                    .collect()
            })
            .collect();
        Ok(CurvaturePoint {
            n,
            rm,
            ric,
            r,
            e,
            w,
            a,
            sigma2_a,
            sectionals,
        })
    }

    pub fn ric_norm_sq(&self) -> f64 {
        self.ric.norm_sq()
    }

    pub fn e_norm_sq(&self) -> f64 {
        self.e.norm_sq()
    }

    pub fn w_norm_sq(&self) -> f64 {
        self.w.norm_sq()
    }

    pub fn rm_norm_sq(&self) -> f64 {
        self.rm.norm_sq()
    }

    /// Ricci eigenvalues, ascending.
    pub fn ricci_spectrum(&self) -> Vec<f64> {
        self.ric.eigenvalues()
    }

    /// `|W|² + 4/(n-2)|Ric|² - 2/((n-1)(n-2)) R²`, which must equal `|Rm|²`.
    pub fn rm_norm_sq_from_decomposition(&self) -> f64 {
        let nf = self.n as f64;
        self.w_norm_sq() + 4.0 / (nf - 2.0) * self.ric_norm_sq()
            - 2.0 / ((nf - 1.0) * (nf - 2.0)) * self.r * self.r
    }

    /// The same point with the metric multiplied by `c > 0`: orthonormal
    /// components of Rm, Ric, R all scale like `1/c`.
    pub fn rescaled(&self, c: f64) -> Result<CurvaturePoint> {
        CurvaturePoint::from_riemann(self.rm.scale(1.0 / c))
    }
}

/// Σ_kl Rm_ikjl S_kl.
pub fn rm_contract_sym(rm: &Riem4, s: &Sym2) -> Sym2 {
    let n = rm.dim();
    Sym2::symmetrize(n, |i, j| {
        let mut acc = 0.0;
        for k in 0..n {
            for l in 0..n {
                acc += rm.get(i, k, j, l) * s.get(k, l);
            }
        }
        acc
    })
}

/// Σ_kpq Rm_ikpq Rm_jkpq.
pub fn rm_square(rm: &Riem4) -> Sym2 {
    let n = rm.dim();
    Sym2::symmetrize(n, |i, j| {
        let mut acc = 0.0;
        for k in 0..n {
            for p in 0..n {
                for q in 0..n {
                    acc += rm.get(i, k, p, q) * rm.get(j, k, p, q);
                }
            }
        }
        acc
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn round_rm(n: usize) -> Riem4 {
        let id = Sym2::identity(n);
        kulkarni_nomizu(&id, &id).unwrap().scale(0.5)
    }

    #[test]
    #[cfg(not(feature = "kn-sign-flip"))]
    fn kn_of_identity_convention() {
        let id = Sym2::identity(3);
        let kn = kulkarni_nomizu(&id, &id).unwrap();
        assert_eq!(kn.get(0, 1, 0, 1), 2.0);
        assert_eq!(kn.get(0, 1, 1, 0), -2.0);
        assert_eq!(kn.get(0, 1, 0, 2), 0.0);
    }

    #[test]
    fn kn_dimension_mismatch() {
        assert!(kulkarni_nomizu(&Sym2::identity(3), &Sym2::identity(4)).is_err());
    }

    #[test]
    fn round_s3_ricci() {
        let (ric, r) = ricci_contract(&round_rm(3));
        assert_eq!(ric, Sym2::diag(&[2.0, 2.0, 2.0]));
        assert_eq!(r, 6.0);
    }

    #[test]
    fn flat_contracts_to_zero() {
        let (ric, r) = ricci_contract(&Riem4::zeros(4));
        assert_eq!(ric, Sym2::zeros(4));
        assert_eq!(r, 0.0);
    }

    #[test]
    fn s2_times_line_ricci() {
        let p = Sym2::diag(&[1.0, 1.0, 0.0]);
        let rm = kulkarni_nomizu(&p, &p).unwrap().scale(0.5);
        let (ric, r) = ricci_contract(&rm);
        assert_eq!(ric, Sym2::diag(&[1.0, 1.0, 0.0]));
        assert_eq!(r, 2.0);
    }

    #[test]
    fn reconstruct_round_s4_from_ricci() {
        let ric = Sym2::diag(&[3.0; 4]);
        let rm = reconstruct_riemann(&Riem4::zeros(4), &ric, 12.0).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                if i != j {
                    assert!((rm.sectional(i, j) - 1.0).abs() < 1e-14);
                }
            }
        }
        // brute-force oracle: δ_ik δ_jl - δ_il δ_jk
        let d = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
        let oracle = Riem4::from_fn_raw(4, |i, j, k, l| d(i, k) * d(j, l) - d(i, l) * d(j, k));
        assert!(rm.max_abs_diff(&oracle) < 1e-14);
    }

    #[test]
    fn reconstruct_flat() {
        let rm = reconstruct_riemann(&Riem4::zeros(5), &Sym2::zeros(5), 0.0).unwrap();
        assert_eq!(rm.max_abs(), 0.0);
    }

    #[test]
    fn reconstruct_rejects_traceful_weyl() {
        let w = round_rm(4);
        let err = reconstruct_riemann(&w, &Sym2::zeros(4), 0.0);
        assert!(matches!(err, Err(Error::NotTraceFree { .. })));
    }

    #[test]
    fn weyl_rejects_inconsistent_ricci() {
        let rm = round_rm(4);
        assert!(weyl_part(&rm, &Sym2::diag(&[3.0; 4]), 11.0).is_err());
        assert!(weyl_part(&rm, &Sym2::diag(&[3.0, 3.0, 3.0, 2.0]), 12.0).is_err());
    }

    #[test]
    fn weyl_vanishes_for_round_s4_and_in_dim_three() {
        let cp = CurvaturePoint::from_riemann(round_rm(4)).unwrap();
        assert!(cp.w.max_abs() < 1e-14);
        let p = Sym2::diag(&[1.0, 1.0, 0.0]);
        let rm = kulkarni_nomizu(&p, &p).unwrap().scale(0.5);
        let cp = CurvaturePoint::from_riemann(rm).unwrap();
        assert!(cp.w.max_abs() < 1e-12);
    }

    #[test]
    fn weyl_norm_of_s2xs2_positive_and_matches_expansion() {
        let p1 = Sym2::diag(&[1.0, 1.0, 0.0, 0.0]);
        let p2 = Sym2::diag(&[0.0, 0.0, 1.0, 1.0]);
        let rm = kulkarni_nomizu(&p1, &p1)
            .unwrap()
            .scale(0.5)
            .add(&kulkarni_nomizu(&p2, &p2).unwrap().scale(0.5));
        let cp = CurvaturePoint::from_riemann(rm).unwrap();
        // independent evaluation: |Rm|² = 8, |Ric|² = 4, R = 4
        let expansion = 8.0 - (4.0 / 2.0) * 4.0 + (2.0 / 6.0) * 16.0;
        assert!((cp.w_norm_sq() - expansion).abs() < 1e-13);
        assert!(cp.w_norm_sq() > 0.0);
    }

    #[test]
    fn schouten_examples() {
        let (a, s2) = schouten_sigma2(&Sym2::zeros(3), 0.0).unwrap();
        assert_eq!(a, Sym2::zeros(3));
        assert_eq!(s2, 0.0);

        let ric = Sym2::diag(&[2.0; 3]);
        let (_, s2) = schouten_sigma2(&ric, 6.0).unwrap();
        let lhs = 12.0 - 3.0 / 8.0 * 36.0;
        assert!((lhs - (-2.0 * s2)).abs() < 1e-14);
    }

    #[test]
    fn sectionals_sum_to_scalar() {
        let cp = CurvaturePoint::from_riemann(round_rm(5).scale(0.3)).unwrap();
        let total: f64 = cp.sectionals.iter().flatten().sum();
        assert!((total - cp.r).abs() < 1e-13);
        assert!(cp.e.trace().abs() < 1e-14);
    }
}
