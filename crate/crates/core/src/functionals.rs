//! Quadratic curvature functionals on homogeneous models.
//!
//! On a homogeneous model every integrand is constant, so integrals are the
//! pointwise density times the volume.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::HomogeneousCurvature;
use crate::tensor::CurvaturePoint;

/// Coefficients of `∫|Ric|² + t∫R² + s∫|Rm|²`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FunctionalParams {
    pub t: f64,
    #[serde(default)]
    pub s: f64,
}

impl FunctionalParams {
    pub fn new(t: f64, s: f64) -> Result<Self> {
        if !t.is_finite() || !s.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "functional parameters must be finite (t = {t}, s = {s})"
            )));
        }
        Ok(FunctionalParams { t, s })
    }

    pub fn ft(t: f64) -> Self {
        FunctionalParams { t, s: 0.0 }
    }

    /// The value of `t` for which `F_t` is a multiple of the σ₂-functional.
    pub fn schouten_t(n: usize) -> f64 {
        let nf = n as f64;
        -nf / (4.0 * (nf - 1.0))
    }
}

/// `F_{-1/4}`; reports multiply its values by [`RIEMANN_REPORT_FACTOR`].
pub fn riemann_functional() -> FunctionalParams {
    FunctionalParams::ft(-0.25)
}

pub const RIEMANN_REPORT_FACTOR: f64 = 4.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FunctionalValue {
    pub density: f64,
    pub total: f64,
    pub normalized: f64,
    /// Value on the unit-volume representative; equal to `normalized`.
    pub lambda: f64,
}

/// `|Ric|² + tR²`, the `F_t` integrand.
pub fn ft_density(cp: &CurvaturePoint, t: f64) -> f64 {
    cp.ric_norm_sq() + t * cp.r * cp.r
}

/// `|Ric|² + tR² + s|Rm|²`. With `s = 0` this is exactly [`ft_density`].
pub fn density(cp: &CurvaturePoint, p: FunctionalParams) -> f64 {
    let base = ft_density(cp, p.t);
    if p.s == 0.0 {
        base
    } else {
        base + p.s * cp.rm_norm_sq()
    }
}

/// `V^{(4-n)/n}`.
pub fn normalization_factor(n: usize, volume: f64) -> f64 {
    let nf = n as f64;
    volume.powf((4.0 - nf) / nf)
}

pub fn eval(hc: &HomogeneousCurvature, p: FunctionalParams) -> Result<FunctionalValue> {
    let d = density(&hc.cp, p);
    let v = hc.volume.require(&hc.spec)?;
    let total = d * v;
    let normalized = normalization_factor(hc.dim(), v) * total;
    Ok(FunctionalValue {
        density: d,
        total,
        normalized,
        lambda: normalized,
    })
}

/// The functional evaluated after literally rescaling the metric to unit
/// volume. Agrees with `eval(..).normalized`.
pub fn unit_volume_value(hc: &HomogeneousCurvature, p: FunctionalParams) -> Result<f64> {
    let v = hc.volume.require(&hc.spec)?;
    let c = v.powf(-2.0 / hc.dim() as f64);
    let cp = hc.cp.rescaled(c)?;
    Ok(density(&cp, p))
}

/// `-2(n-2)² ∫σ₂(A)`.
pub fn sigma2_functional(hc: &HomogeneousCurvature) -> Result<f64> {
    let v = hc.volume.require(&hc.spec)?;
    let m = hc.dim() as f64 - 2.0;
    Ok(-2.0 * m * m * hc.cp.sigma2_a * v)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussBonnet {
    pub integral: f64,
    pub euler_characteristic: f64,
}

/// `∫(|W|² - 2|Ric|² + 2/3 R²)` and that integral over `32π²`.
pub fn gauss_bonnet_check(hc: &HomogeneousCurvature) -> Result<GaussBonnet> {
    if hc.dim() != 4 {
        return Err(Error::UnsupportedDimension {
            n: hc.dim(),
            reason: "the Gauss-Bonnet integrand is only defined here for n = 4",
        });
    }
    let v = hc.volume.require(&hc.spec)?;
    let cp = &hc.cp;
    let integrand = cp.w_norm_sq() - 2.0 * cp.ric_norm_sq() + 2.0 / 3.0 * cp.r * cp.r;
    let integral = integrand * v;
    Ok(GaussBonnet {
        integral,
        euler_characteristic: integral / (32.0 * PI * PI),
    })
}

/// The quantity `s|W|² + 4(n-2)(1+2(n-1)t)σ₂(A)` for `s = -(n+4(n-1)t)/4`,
/// which equals the `F_{t,s}` density at that `s`.
pub fn yamabe_quantity(cp: &CurvaturePoint, t: f64) -> (f64, f64) {
    let nf = cp.n as f64;
    let s = -(nf + 4.0 * (nf - 1.0) * t) / 4.0;
    let q = s * cp.w_norm_sq() + 4.0 * (nf - 2.0) * (1.0 + 2.0 * (nf - 1.0) * t) * cp.sigma2_a;
    (s, q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{curvature_of, GeometrySpec};

    #[test]
    fn round_s3_density() {
        let hc = curvature_of(&GeometrySpec::round_sphere(3, 1.0)).unwrap();
        for t in [-1.0, 0.0, 0.5, 2.0] {
            let d = density(&hc.cp, FunctionalParams::ft(t));
            assert!((d - (12.0 + 36.0 * t)).abs() < 1e-12);
        }
        assert!(density(&hc.cp, FunctionalParams::ft(-1.0 / 3.0)).abs() < 1e-13);
    }

    #[test]
    fn n4_normalized_is_total() {
        let hc = curvature_of(&GeometrySpec::product(1.0, 2.0)).unwrap();
        let v = eval(&hc, FunctionalParams::new(0.3, 0.2).unwrap()).unwrap();
        assert_eq!(v.normalized, v.total);
    }

    #[test]
    fn literal_rescaling_agrees() {
        for spec in [
            GeometrySpec::berger(2.5),
            GeometrySpec::round_sphere(5, 0.7),
            GeometrySpec::sphere_flat(5, 2.0, Some(vec![1.0, 3.0, 0.5])),
        ] {
            let hc = curvature_of(&spec).unwrap();
            let p = FunctionalParams::new(-0.2, 0.4).unwrap();
            let a = eval(&hc, p).unwrap().normalized;
            let b = unit_volume_value(&hc, p).unwrap();
            assert!((a - b).abs() < 1e-11 * a.abs().max(1.0), "{a} {b}");
        }
    }

    #[test]
    fn sigma2_matches_schouten_t() {
        for spec in [
            GeometrySpec::round_sphere(3, 1.0),
            GeometrySpec::berger(0.4),
            GeometrySpec::sphere_flat(5, 1.0, Some(vec![1.0, 1.0, 2.0])),
        ] {
            let hc = curvature_of(&spec).unwrap();
            let t = FunctionalParams::schouten_t(hc.dim());
            let a = sigma2_functional(&hc).unwrap();
            let b = eval(&hc, FunctionalParams::ft(t)).unwrap().total;
            assert!((a - b).abs() < 1e-11 * b.abs().max(1.0));
        }
        assert_eq!(FunctionalParams::schouten_t(5), -5.0 / 16.0);
    }

    #[test]
    fn gauss_bonnet_s4_and_products() {
        let hc = curvature_of(&GeometrySpec::round_sphere(4, 1.0)).unwrap();
        let gb = gauss_bonnet_check(&hc).unwrap();
        assert!((gb.integral / (64.0 * PI * PI) - 1.0).abs() < 1e-12);
        for (a, b) in [(1.0, 1.0), (1.0, 2.0), (3.0, 0.5)] {
            let hc = curvature_of(&GeometrySpec::product(a, b)).unwrap();
            let gb = gauss_bonnet_check(&hc).unwrap();
            assert!((gb.euler_characteristic - 4.0).abs() < 1e-10);
        }
        let hc = curvature_of(&GeometrySpec::round_sphere(3, 1.0)).unwrap();
        assert!(gauss_bonnet_check(&hc).is_err());
    }

    #[test]
    fn noncompact_total_is_an_error() {
        let hc = curvature_of(&GeometrySpec::sphere_flat(3, 1.0, None)).unwrap();
        let err = eval(&hc, FunctionalParams::ft(0.0)).unwrap_err();
        assert!(err.to_string().contains("flat_lengths"));
        assert!((density(&hc.cp, FunctionalParams::ft(0.0)) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn yamabe_quantity_is_the_density() {
        let hc = curvature_of(&GeometrySpec::sphere_flat(6, 1.3, None)).unwrap();
        for t in [-0.4, 0.0, 0.7] {
            let (s, q) = yamabe_quantity(&hc.cp, t);
            let d = density(&hc.cp, FunctionalParams { t, s });
            assert!((q - d).abs() < 1e-11 * d.abs().max(1.0));
        }
    }
}
