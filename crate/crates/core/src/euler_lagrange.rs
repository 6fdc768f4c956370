//! Gradients and Euler-Lagrange residuals of the quadratic functionals.
//!
//! Everything is specialised to homogeneous models, where `∇R`, `∇²R` and
//! `ΔR` vanish. Those terms are still carried through the formulas from the
//! fields of [`HomogeneousCurvature`], which holds them as explicit zeros.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functionals::{self, FunctionalParams};
use crate::geometry::HomogeneousCurvature;
use crate::tensor::{rm_contract_sym, rm_square, Sym2, Tensor3};
use crate::tol;

/// Constrained Euler-Lagrange residual.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ElResidual {
    /// Trace-free tensor equation; zero at critical metrics.
    pub tensor: Sym2,
    /// Scalar equation evaluated on the unit-volume representative; `None`
    /// for non-compact models.
    pub scalar: Option<f64>,
    /// Multiplier `c` with `∇F = c g` at critical points.
    pub lagrange_c: f64,
}

impl ElResidual {
    pub fn tensor_norm(&self) -> f64 {
        self.tensor.norm()
    }
}

fn delta(n: usize) -> Sym2 {
    Sym2::identity(n)
}

fn assert_homogeneous(hc: &HomogeneousCurvature) {
    debug_assert!(hc.lap_scalar == 0.0);
    debug_assert!(hc.hess_scalar.max_abs() == 0.0);
    debug_assert!(hc.grad_scalar.iter().all(|&g| g == 0.0));
}

/// Gradient of `∫|Ric|²`.
pub fn grad_rho(hc: &HomogeneousCurvature) -> Sym2 {
    assert_homogeneous(hc);
    let cp = &hc.cp;
    let n = cp.n;
    let rm_ric = rm_contract_sym(&cp.rm, &cp.ric);
    &(&(&(&(-&hc.lap_ric) - &(2.0 * &rm_ric)) + &hc.hess_scalar)
        - &((0.5 * hc.lap_scalar) * &delta(n)))
        + &((0.5 * cp.ric_norm_sq()) * &delta(n))
}

/// Gradient of `∫R²`.
pub fn grad_s(hc: &HomogeneousCurvature) -> Sym2 {
    assert_homogeneous(hc);
    let cp = &hc.cp;
    let n = cp.n;
    &(&(&(2.0 * &hc.hess_scalar) - &((2.0 * hc.lap_scalar) * &delta(n)))
        - &((2.0 * cp.r) * &cp.ric))
        + &((0.5 * cp.r * cp.r) * &delta(n))
}

/// Gradient of `∫|Rm|²`.
pub fn grad_rm(hc: &HomogeneousCurvature) -> Sym2 {
    assert_homogeneous(hc);
    let cp = &hc.cp;
    let n = cp.n;
    let rm_ric = rm_contract_sym(&cp.rm, &cp.ric);
    let rm2 = rm_square(&cp.rm);
    &(&(&(&(&(-4.0 * &hc.lap_ric) + &(2.0 * &hc.hess_scalar)) - &(2.0 * &rm2))
        + &((0.5 * cp.rm_norm_sq()) * &delta(n)))
        - &(4.0 * &rm_ric))
        + &(4.0 * &cp.ric.square())
}

pub fn grad_ft(hc: &HomogeneousCurvature, t: f64) -> Sym2 {
    grad_fts(hc, FunctionalParams::ft(t))
}

/// Gradient of `F_{t,s}`, assembled term by term as in the closed formula.
pub fn grad_fts(hc: &HomogeneousCurvature, p: FunctionalParams) -> Sym2 {
    assert_homogeneous(hc);
    let cp = &hc.cp;
    let n = cp.n;
    let (t, s) = (p.t, p.s);
    let rm_ric = rm_contract_sym(&cp.rm, &cp.ric);
    let mut g = -(1.0 + 4.0 * s) * &hc.lap_ric;
    g = &g + &((1.0 + 2.0 * t + 2.0 * s) * &hc.hess_scalar);
    g = &g - &((0.5 * (1.0 + 4.0 * t) * hc.lap_scalar) * &delta(n));
    g = &g - &(2.0 * &rm_ric);
    g = &g - &((2.0 * t * cp.r) * &cp.ric);
    g = &g + &((0.5 * functionals::density(cp, p)) * &delta(n));
    if s != 0.0 {
        g = &g - &((2.0 * s) * &rm_square(&cp.rm));
        g = &g - &((4.0 * s) * &rm_ric);
        g = &g + &((4.0 * s) * &cp.ric.square());
    }
    g
}

pub fn constrained_residual_ft(
    hc: &HomogeneousCurvature,
    t: f64,
    lambda: Option<f64>,
) -> Result<ElResidual> {
    constrained_residual_fts(hc, FunctionalParams::ft(t), lambda)
}

/// Trace-free tensor equation plus the scalar equation.
///
/// `lambda` is the normalized functional value; the scalar residual is only
/// formed when it is supplied and the model has finite volume. With `s = 0`
/// the `s`-terms are skipped, so this is the `F_t` residual exactly.
pub fn constrained_residual_fts(
    hc: &HomogeneousCurvature,
    p: FunctionalParams,
    lambda: Option<f64>,
) -> Result<ElResidual> {
    assert_homogeneous(hc);
    let cp = &hc.cp;
    let n = cp.n;
    let nf = n as f64;
    let (t, s) = (p.t, p.s);
    let dens = functionals::density(cp, p);
    let rm_ric = rm_contract_sym(&cp.rm, &cp.ric);

    let mut res = -(1.0 + 4.0 * s) * &hc.lap_ric;
    res = &res + &((1.0 + 2.0 * t + 2.0 * s) * &hc.hess_scalar);
    res = &res - &(((2.0 * t - 2.0 * s) / nf * hc.lap_scalar) * &delta(n));
    res = &res + &((2.0 / nf * dens) * &delta(n));
    res = &res - &((2.0 * (1.0 + 2.0 * s)) * &rm_ric);
    res = &res - &((2.0 * t * cp.r) * &cp.ric);
    if s != 0.0 {
        res = &res - &((2.0 * s) * &rm_square(&cp.rm));
        res = &res + &((4.0 * s) * &cp.ric.square());
    }

    let scale = tol::scale(dens.abs().max(cp.r * cp.r).max(hc.lap_ric.max_abs()));
    let trace = res.trace();
    let max_trace = tol::IDENTITY_REL * scale * nf;
    if trace.abs() > max_trace {
        return Err(Error::NotTraceFree {
            max_trace: trace.abs(),
            tol: max_trace,
        });
    }

    // traced equation: n c = (n-4)/2 density - (n+4(n-1)t+4s)/2 ΔR
    let coef = nf + 4.0 * (nf - 1.0) * t + 4.0 * s;
    let lagrange_c = ((nf - 4.0) / 2.0 * dens - coef / 2.0 * hc.lap_scalar) / nf;

    let scalar = match (lambda, hc.volume.finite()) {
        (Some(lambda), Some(v)) => {
            // density of the unit-volume representative
            let unit_dens = dens * v.powf(4.0 / nf);
            Some(coef * hc.lap_scalar - (nf - 4.0) * (unit_dens - lambda))
        }
        _ => None,
    };

    Ok(ElResidual {
        tensor: res,
        scalar,
        lagrange_c,
    })
}

/// Residual of the equation characterising `F_{-1/4,-1/4}` critical
/// metrics, in which every second-order term has dropped out.
pub fn berger_quarter_residual(hc: &HomogeneousCurvature) -> Sym2 {
    let cp = &hc.cp;
    let n = cp.n;
    let nf = n as f64;
    let e = &cp.e;
    let mut res = -&rm_contract_sym(&cp.rm, e);
    res = &res + &(((nf - 6.0) / (2.0 * nf) * cp.r) * e);
    res = &res + &(((4.0 * cp.e_norm_sq() - cp.rm_norm_sq()) / (2.0 * nf)) * &delta(n));
    res = &res + &(0.5 * &rm_square(&cp.rm));
    &res - &e.square()
}

/// `C_ijk = ∇_k R_ij - ∇_j R_ik - (∇_k R δ_ij - ∇_j R δ_ik) / (2(n-1))`.
pub fn cotton(hc: &HomogeneousCurvature) -> Tensor3 {
    let n = hc.dim();
    let k2 = 1.0 / (2.0 * (n as f64 - 1.0));
    let d = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
    Tensor3::from_fn(n, |i, j, k| {
        hc.nabla_ric.get(k, i, j)
            - hc.nabla_ric.get(j, i, k)
            - k2 * (hc.grad_scalar[k] * d(i, j) - hc.grad_scalar[j] * d(i, k))
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityGaps {
    /// Pointwise Weitzenböck formula; vanishes at critical metrics only.
    pub weitzenbock_gap: f64,
    /// Pointwise `½|C|²` formula; vanishes on every metric.
    pub cotton_norm_gap: f64,
    /// Integrand of the Cotton integral formula after the divergence term is
    /// dropped; vanishes on unimodular left-invariant metrics.
    pub cotton_integral_gap: f64,
}

/// Pieces shared by the identity gaps.
struct Contractions {
    grad_e_sq: f64,
    grad_r_sq: f64,
    /// Σ ∇_k E_ij ∇_j E_ik
    cross: f64,
    /// Σ R_ikjl E_ij E_kl
    r_ee: f64,
    e_cube: f64,
    e_sq: f64,
    e_hess_r: f64,
}

fn contractions(hc: &HomogeneousCurvature) -> Contractions {
    let n = hc.dim();
    let ne = &hc.nabla_e;
    let mut cross = 0.0;
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                cross += ne.get(k, i, j) * ne.get(j, i, k);
            }
        }
    }
    let e = &hc.cp.e;
    Contractions {
        grad_e_sq: ne.norm_sq(),
        grad_r_sq: hc.grad_scalar.iter().map(|g| g * g).sum(),
        cross,
        r_ee: rm_contract_sym(&hc.cp.rm, e).dot(e),
        e_cube: e.trace_cube(),
        e_sq: e.norm_sq(),
        e_hess_r: e.dot(&hc.hess_scalar),
    }
}

pub fn identity_gaps(hc: &HomogeneousCurvature, t: f64) -> IdentityGaps {
    let n = hc.dim() as f64;
    let r = hc.cp.r;
    let c = contractions(hc);
    // ½Δ|E|² vanishes because |E|² is constant
    let half_lap_e_sq = 0.0;
    let weitzenbock_gap = c.grad_e_sq + (1.0 + 2.0 * t) * c.e_hess_r
        - 2.0 * c.r_ee
        - (2.0 + 2.0 * n * t) / n * r * c.e_sq
        - half_lap_e_sq;
    let half_c_sq = 0.5 * cotton(hc).norm_sq();
    let cotton_norm_gap = half_c_sq
        - (c.grad_e_sq - (n - 2.0).powi(2) / (4.0 * n * n * (n - 1.0)) * c.grad_r_sq - c.cross);
    let cotton_integral_gap =
        (c.grad_e_sq - (n - 2.0).powi(2) / (4.0 * n * (n - 1.0)) * c.grad_r_sq - half_c_sq)
            - (c.r_ee - c.e_cube - r * c.e_sq / n);
    IdentityGaps {
        weitzenbock_gap,
        cotton_norm_gap,
        cotton_integral_gap,
    }
}

/// Weitzenböck formula for `F_{t,s}` critical metrics.
pub fn weitzenbock_gap_fts(hc: &HomogeneousCurvature, p: FunctionalParams) -> f64 {
    let n = hc.dim() as f64;
    let (t, s) = (p.t, p.s);
    let r = hc.cp.r;
    let c = contractions(hc);
    let e_rm2 = hc.cp.e.dot(&rm_square(&hc.cp.rm));
    (1.0 + 4.0 * s) * c.grad_e_sq + (1.0 + 2.0 * t + 2.0 * s) * c.e_hess_r
        - 2.0 * (1.0 + 2.0 * s) * c.r_ee
        - (2.0 + 2.0 * n * t - 4.0 * s) / n * r * c.e_sq
        - 2.0 * s * e_rm2
        + 4.0 * s * c.e_cube
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{curvature_of, GeometrySpec};

    fn hc(spec: GeometrySpec) -> HomogeneousCurvature {
        curvature_of(&spec).unwrap()
    }

    #[test]
    fn round_spheres_are_critical() {
        for n in 3..=6 {
            let h = hc(GeometrySpec::round_sphere(n, 1.3));
            for t in [-1.0, -0.5, 0.0, 1.0] {
                for s in [0.0, 1.0] {
                    let p = FunctionalParams { t, s };
                    let r = constrained_residual_fts(&h, p, None).unwrap();
                    assert!(r.tensor_norm() < 1e-12, "n={n} t={t} s={s}");
                    let g = grad_fts(&h, p);
                    assert!((&g - &(r.lagrange_c * &Sym2::identity(n))).max_abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn gradient_is_linear_in_the_basis() {
        let h = hc(GeometrySpec::diagonal_su2([0.7, 1.4, 2.3]));
        let (t, s) = (0.37, -0.61);
        let lin = &(&grad_rho(&h) + &(t * &grad_s(&h))) + &(s * &grad_rm(&h));
        let direct = grad_fts(&h, FunctionalParams { t, s });
        assert!((&lin - &direct).max_abs() < 1e-12);
        let ft = &grad_rho(&h) + &(t * &grad_s(&h));
        assert!((&ft - &grad_ft(&h, t)).max_abs() < 1e-12);
    }

    #[test]
    fn s2_times_line_at_minus_half() {
        let h = hc(GeometrySpec::sphere_flat(3, 1.0, None));
        let r = constrained_residual_ft(&h, -0.5, None).unwrap();
        assert!(r.tensor_norm() < 1e-12);
        assert!(r.scalar.is_none());
    }

    #[test]
    fn unequal_product_at_t_zero() {
        // S²(2)×S²(1): Ric = diag(½,½,1,1), |Ric|² = 5/2
        let h = hc(GeometrySpec::product(2.0, 1.0));
        let r = constrained_residual_ft(&h, 0.0, None).unwrap();
        let ev = r.tensor.eigenvalues();
        for (a, b) in ev.iter().zip([-0.75, -0.75, 0.75, 0.75]) {
            assert!((a - b).abs() < 1e-13);
        }
        assert!((r.tensor_norm() - 1.5).abs() < 1e-13);
    }

    #[test]
    fn s_zero_is_bit_identical() {
        let h = hc(GeometrySpec::diagonal_su2([0.3, 1.0, 2.0]));
        for t in [-0.4, 0.1, 2.0] {
            let a = constrained_residual_ft(&h, t, Some(1.0)).unwrap();
            let b =
                constrained_residual_fts(&h, FunctionalParams { t, s: 0.0 }, Some(1.0)).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn einstein_product_is_fts_critical() {
        let h = hc(GeometrySpec::product(1.0, 1.0));
        let r = constrained_residual_fts(&h, FunctionalParams { t: 0.0, s: 1.0 }, None).unwrap();
        assert!(r.tensor_norm() < 1e-12);
    }

    #[test]
    fn quarter_equation_matches_general_residual() {
        for spec in [
            GeometrySpec::diagonal_su2([0.5, 1.7, 1.1]),
            GeometrySpec::sphere_flat(6, 0.8, None),
            GeometrySpec::product(1.0, 4.0),
        ] {
            let h = hc(spec);
            let a = berger_quarter_residual(&h);
            let b = constrained_residual_fts(&h, FunctionalParams { t: -0.25, s: -0.25 }, None)
                .unwrap()
                .tensor;
            assert!((&a - &b).max_abs() < 1e-12);
        }
    }

    #[test]
    fn cotton_symmetries_on_berger() {
        let h = hc(GeometrySpec::berger(4.0));
        let c = cotton(&h);
        assert!(c.max_abs() > 1e-3);
        for i in 0..3 {
            let mut tr = 0.0;
            for j in 0..3 {
                tr += c.get(j, j, i);
                for k in 0..3 {
                    assert!((c.get(i, j, k) + c.get(i, k, j)).abs() < 1e-12);
                }
            }
            assert!(tr.abs() < 1e-12);
        }
    }

    #[test]
    fn gaps_on_round_and_products() {
        for spec in [
            GeometrySpec::round_sphere(3, 1.0),
            GeometrySpec::product(2.0, 3.0),
        ] {
            let g = identity_gaps(&hc(spec), -0.5);
            assert!(g.weitzenbock_gap.abs() < 1e-12);
            assert!(g.cotton_norm_gap.abs() < 1e-12);
        }
    }

    #[test]
    fn cotton_identities_on_left_invariant_metrics() {
        let h = hc(GeometrySpec::su2([
            [1.3, 0.2, -0.1],
            [0.2, 0.6, 0.3],
            [-0.1, 0.3, 2.2],
        ]));
        let g = identity_gaps(&h, 0.0);
        assert!(g.cotton_norm_gap.abs() < 1e-11);
        assert!(g.cotton_integral_gap.abs() < 1e-11);
        // control: Berger x = 4 is not critical for t = 0
        let g = identity_gaps(&hc(GeometrySpec::berger(4.0)), 0.0);
        assert!(g.weitzenbock_gap.abs() > 1e-3);
    }

    #[test]
    fn weitzenbock_fts_reduces_at_s_zero() {
        let h = hc(GeometrySpec::diagonal_su2([0.4, 1.0, 1.9]));
        let a = weitzenbock_gap_fts(&h, FunctionalParams::ft(0.2));
        let b = identity_gaps(&h, 0.2).weitzenbock_gap;
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn residual_contracted_with_e_is_the_weitzenbock_gap() {
        // ⟨E, ΔE⟩ = -|∇E|² on homogeneous metrics, so contracting the tensor
        // equation with E reproduces the Weitzenböck expression.
        let h = hc(GeometrySpec::diagonal_su2([0.4, 1.0, 1.9]));
        for (t, s) in [(0.2, 0.0), (-0.3, 0.7)] {
            let p = FunctionalParams { t, s };
            let res = constrained_residual_fts(&h, p, None).unwrap().tensor;
            let lhs = res.dot(&h.cp.e);
            let gap = weitzenbock_gap_fts(&h, p);
            assert!((lhs - gap).abs() < 1e-11, "{lhs} {gap}");
        }
    }
}
