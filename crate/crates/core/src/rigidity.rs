//! Pointwise inequalities and spectral formulas behind the rigidity results.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::euler_lagrange;
use crate::geometry::HomogeneousCurvature;
use crate::tensor::{CurvaturePoint, Sym2};
use crate::tol::{self, Tolerances};

/// Eigenvalues of `E` and the sectional curvatures of the coordinate planes
/// of an `E`-eigenbasis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralData {
    pub n: usize,
    pub lambdas: Vec<f64>,
    /// Symmetric, zero diagonal.
    pub sigmas: Vec<Vec<f64>>,
}

impl SpectralData {
    pub fn new(lambdas: Vec<f64>, sigmas: Vec<Vec<f64>>) -> Result<Self> {
        let n = lambdas.len();
        if sigmas.len() != n || sigmas.iter().any(|row| row.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: sigmas.len(),
            });
        }
        let lscale = tol::scale(lambdas.iter().fold(0.0, |m: f64, l| m.max(l.abs())));
        let sum: f64 = lambdas.iter().sum();
        if sum.abs() > tol::CONSTRUCTION * lscale * n as f64 {
            return Err(Error::NotTraceFree {
                max_trace: sum.abs(),
                tol: tol::CONSTRUCTION,
            });
        }
        for i in 0..n {
            if sigmas[i][i] != 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "sigma[{i}][{i}] must be zero"
                )));
            }
            for j in 0..i {
                if sigmas[i][j] != sigmas[j][i] {
                    return Err(Error::SymmetryViolation {
                        which: "sectional matrix",
                        violation: (sigmas[i][j] - sigmas[j][i]).abs(),
                        tol: 0.0,
                    });
                }
            }
        }
        Ok(SpectralData { n, lambdas, sigmas })
    }

    /// Sectional curvatures alone, with `λ` read off from them as the
    /// traceless Ricci eigenvalues they determine: `λ_k = Σ_i σ_ik - R/n`.
    pub fn from_sectionals(sigmas: Vec<Vec<f64>>) -> Result<Self> {
        let n = sigmas.len();
        let r: f64 = sigmas.iter().flatten().sum();
        let lambdas = (0..n)
            .map(|k| sigmas[k].iter().sum::<f64>() - r / n as f64)
            .collect();
        Self::new(lambdas, sigmas)
    }

    /// Eigendecomposes `E` and evaluates the plane curvatures in its eigenbasis.
    pub fn from_curvature(cp: &CurvaturePoint) -> Self {
        let (mut lambdas, vecs) = cp.e.eigen();
        let n = cp.n;
        // remove the rounding-level trace so the constructor invariant holds
        let mean = lambdas.iter().sum::<f64>() / n as f64;
        lambdas.iter_mut().for_each(|l| *l -= mean);
        let mut sigmas = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in 0..i {
                let k = cp.rm.plane_curvature(&vecs[i], &vecs[j]);
                sigmas[i][j] = k;
                sigmas[j][i] = k;
            }
        }
        SpectralData { n, lambdas, sigmas }
    }

    /// `Σ_{i,j} σ_ij`.
    pub fn scalar(&self) -> f64 {
        self.sigmas.iter().flatten().sum()
    }

    fn lambda_sq(&self) -> f64 {
        self.lambdas.iter().map(|l| l * l).sum()
    }

    fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(|i| (i + 1..self.n).map(move |j| (i, j)))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropEst {
    /// `Σλ_iλ_jσ_ij - (n-2)/(2n) R Σλ²`
    pub gap: f64,
    /// `-(n-1)/n Σ_{i<j} (λ_i-λ_j)² σ_ij`; `gap ≤ proof_bound ≤ 0`.
    pub proof_bound: f64,
}

pub fn prop_est_gap(sd: &SpectralData) -> Result<PropEst> {
    if let Some(s) = sd.sigmas.iter().flatten().find(|s| **s < 0.0) {
        return Err(Error::Precondition(format!(
            "non-negative sectional curvature required, found {s}"
        )));
    }
    let n = sd.n as f64;
    let l = &sd.lambdas;
    let mut quad = 0.0;
    for i in 0..sd.n {
        for j in 0..sd.n {
            quad += l[i] * l[j] * sd.sigmas[i][j];
        }
    }
    let gap = quad - (n - 2.0) / (2.0 * n) * sd.scalar() * sd.lambda_sq();
    let proof_bound = -(n - 1.0) / n
        * sd.pairs()
            .map(|(i, j)| (l[i] - l[j]).powi(2) * sd.sigmas[i][j])
            .sum::<f64>();
    Ok(PropEst { gap, proof_bound })
}

/// `Σ_{i<j} (λ_i+λ_j)² σ_ij`, non-positive for non-positive curvature.
pub fn prop_est2_gap(sd: &SpectralData) -> Result<f64> {
    if let Some(s) = sd.sigmas.iter().flatten().find(|s| **s > 0.0) {
        return Err(Error::Precondition(format!(
            "non-positive sectional curvature required, found {s}"
        )));
    }
    let l = &sd.lambdas;
    Ok(sd
        .pairs()
        .map(|(i, j)| (l[i] + l[j]).powi(2) * sd.sigmas[i][j])
        .sum())
}

/// `Σλ_iλ_jσ_ij + R/n Σλ² + Σλ³`, the tensorial side of the same estimate.
pub fn prop_est2_lhs(sd: &SpectralData) -> f64 {
    let n = sd.n as f64;
    let l = &sd.lambdas;
    let mut quad = 0.0;
    for i in 0..sd.n {
        for j in 0..sd.n {
            quad += l[i] * l[j] * sd.sigmas[i][j];
        }
    }
    quad + sd.scalar() / n * sd.lambda_sq() + l.iter().map(|x| x * x * x).sum::<f64>()
}

/// `|E|³/√6 - |tr E³|` for a traceless symmetric 3×3 `E`.
pub fn cubic_bound_gap(e: &Sym2) -> Result<f64> {
    if e.dim() != 3 {
        return Err(Error::UnsupportedDimension {
            n: e.dim(),
            reason: "the cubic trace bound is only stated for n = 3",
        });
    }
    let tr = e.trace();
    let lim = tol::CONSTRUCTION * tol::scale(e.max_abs());
    if tr.abs() > lim {
        return Err(Error::NotTraceFree {
            max_trace: tr.abs(),
            tol: lim,
        });
    }
    Ok(e.norm().powi(3) / 6f64.sqrt() - e.trace_cube().abs())
}

/// Range of `t` in which the three-dimensional pinching argument applies.
pub fn pinching_range(t: f64) -> bool {
    (-1.0 / 3.0..-1.0 / 6.0).contains(&t)
}

/// `(1+6t)²/24 ≤ 2(1+2t)(3+8t)/(5+16t)²`. At `t = -5/16` the right side
/// is infinite and the comparison holds.
pub fn pinching_lemma_constant(t: f64) -> bool {
    let lhs = (1.0 + 6.0 * t).powi(2) / 24.0;
    let d = (5.0 + 16.0 * t).powi(2);
    if d == 0.0 {
        return true;
    }
    lhs <= 2.0 * (1.0 + 2.0 * t) * (3.0 + 8.0 * t) / d
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Pinching {
    /// `(1+6t)²/24 R² - |E|²`; positive when the pinching hypothesis holds.
    pub margin: f64,
    /// `(1+6t)R/3 + 4|E|/√6`. Bounds `(1+6t)/3 R²|E|² - 4R tr E³` from
    /// above after multiplication by `R|E|²`; negative under pinching when
    /// `1+6t < 0`.
    pub cubic_factor: f64,
    /// `|1+6t| R/3 - 4|E|/√6`; positive whenever `margin > 0` and `R > 0`.
    pub chain_slack: f64,
    /// Lemma constant comparison, reported for `t ∈ [-1/3, -1/6)`.
    pub lemma_constant: Option<bool>,
}

impl Pinching {
    /// The implication `margin > 0 ∧ R > 0 ⇒ chain_slack > 0`; `None` when
    /// the hypothesis is not met.
    pub fn sign_chain(&self, r: f64) -> Option<bool> {
        (self.margin > 0.0 && r > 0.0).then_some(self.chain_slack > 0.0)
    }
}

pub fn pinching_margin(cp: &CurvaturePoint, t: f64) -> Result<Pinching> {
    if cp.n != 3 {
        return Err(Error::UnsupportedDimension {
            n: cp.n,
            reason: "the pinching condition is three-dimensional",
        });
    }
    let k = 1.0 + 6.0 * t;
    let r = cp.r;
    let e_norm = cp.e.norm();
    let e4 = 4.0 / 6f64.sqrt() * e_norm;
    Ok(Pinching {
        margin: k * k / 24.0 * r * r - cp.e_norm_sq(),
        cubic_factor: k * r / 3.0 + e4,
        chain_slack: k.abs() * r / 3.0 - e4,
        lemma_constant: pinching_range(t).then(|| pinching_lemma_constant(t)),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FHalfSpectrum {
    pub mu_plus: f64,
    pub mu_minus: f64,
    /// `(n-4)R/4 - (n-2m)√(...)`; zero when `m` eigenvalues equal `mu_plus`.
    pub multiplicity_residual: f64,
}

/// Ricci eigenvalues forced by `∇E = 0` at an `F_{-1/2}` critical metric.
pub fn f_half_spectrum(r: f64, e_sq: f64, n: usize, m: usize) -> Result<FHalfSpectrum> {
    if n < 3 || m < 1 || m > n {
        return Err(Error::InvalidParameter(format!(
            "need n ≥ 3 and 1 ≤ m ≤ n, got n = {n}, m = {m}"
        )));
    }
    let nf = n as f64;
    let root = ((nf - 4.0).powi(2) * r * r / (16.0 * nf * nf) + e_sq / nf).sqrt();
    Ok(FHalfSpectrum {
        mu_plus: r / 4.0 + root,
        mu_minus: r / 4.0 - root,
        multiplicity_residual: (nf - 4.0) * r / 4.0 - (nf - 2.0 * m as f64) * root,
    })
}

/// `2μ² - Rμ - (2/n)(|E|² - (n-2)/(2n) R²)`.
pub fn f_half_quadratic(mu: f64, r: f64, e_sq: f64, n: usize) -> f64 {
    let nf = n as f64;
    2.0 * mu * mu - r * mu - 2.0 / nf * (e_sq - (nf - 2.0) / (2.0 * nf) * r * r)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FHalfClass {
    Einstein,
    #[serde(rename = "s2_x_flat")]
    S2xFlat,
    #[serde(rename = "s2_x_s2")]
    S2xS2,
    Other,
}

impl FHalfClass {
    pub fn as_str(self) -> &'static str {
        match self {
            FHalfClass::Einstein => "einstein",
            FHalfClass::S2xFlat => "s2_x_flat",
            FHalfClass::S2xS2 => "s2_x_s2",
            FHalfClass::Other => "other",
        }
    }
}

fn spectrum_matches(got: &[f64], want: &mut [f64], tol: f64) -> bool {
    want.sort_by(f64::total_cmp);
    got.iter()
        .zip(want.iter())
        .all(|(a, b)| (a - b).abs() <= tol)
}

/// Matches the Ricci spectrum of an `F_{-1/2}` critical metric with parallel
/// Ricci tensor against the possible product structures.
pub fn classify_f_half(hc: &HomogeneousCurvature, tols: &Tolerances) -> Result<FHalfClass> {
    let cp = &hc.cp;
    let n = cp.n;
    let res = euler_lagrange::constrained_residual_ft(hc, -0.5, None)?.tensor_norm();
    if res >= tols.classify_residual {
        return Err(Error::Precondition(format!(
            "not critical for t = -1/2: tensor residual {res:e} ≥ {:e}",
            tols.classify_residual
        )));
    }
    let grad = hc.nabla_ric.max_abs();
    if grad >= tols.classify_residual {
        return Err(Error::Precondition(format!(
            "Ricci tensor is not parallel: max |∇Ric| = {grad:e}"
        )));
    }
    let e = cp.e.norm();
    if e < tols.classify_einstein {
        return Ok(FHalfClass::Einstein);
    }
    let mu = cp.ricci_spectrum();
    let tol = tols.classify_spectrum * tol::scale(cp.r.abs());
    let mut flat = vec![0.0; n];
    flat[n - 2] = cp.r / 2.0;
    flat[n - 1] = cp.r / 2.0;
    if spectrum_matches(&mu, &mut flat, tol) {
        return Ok(FHalfClass::S2xFlat);
    }
    if n == 4 {
        let lo = cp.r / 4.0 - e / 2.0;
        let hi = cp.r / 4.0 + e / 2.0;
        if spectrum_matches(&mu, &mut [lo, lo, hi, hi], tol) {
            return Ok(FHalfClass::S2xS2);
        }
    }
    Ok(FHalfClass::Other)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{curvature_of, GeometrySpec};

    fn flat_sigmas(n: usize, v: f64) -> Vec<Vec<f64>> {
        (0..n)
            .map(|i| (0..n).map(|j| if i == j { 0.0 } else { v }).collect())
            .collect()
    }

    #[test]
    fn prop_est_examples() {
        let sd = SpectralData::new(vec![0.0; 4], flat_sigmas(4, 1.0)).unwrap();
        assert_eq!(prop_est_gap(&sd).unwrap().gap, 0.0);
        let sd =
            SpectralData::new(vec![1.0 / 3.0, 1.0 / 3.0, -2.0 / 3.0], flat_sigmas(3, 1.0)).unwrap();
        let p = prop_est_gap(&sd).unwrap();
        assert!(p.gap <= p.proof_bound + 1e-15 && p.proof_bound <= 0.0);
        let neg = SpectralData::new(vec![0.0; 3], flat_sigmas(3, -1.0)).unwrap();
        assert!(prop_est_gap(&neg).is_err());
    }

    #[test]
    fn spectral_data_validation() {
        assert!(SpectralData::new(vec![1.0, 0.0, 0.0], flat_sigmas(3, 1.0)).is_err());
        let mut s = flat_sigmas(3, 1.0);
        s[0][1] = 2.0;
        assert!(SpectralData::new(vec![0.0; 3], s).is_err());
    }

    #[test]
    fn prop_est2_examples() {
        let sd = SpectralData::new(vec![1.0, 1.0, -1.0, -1.0], flat_sigmas(4, -1.0)).unwrap();
        // pairs (0,1) and (2,3) contribute 4 each
        assert_eq!(prop_est2_gap(&sd).unwrap(), -8.0);
        assert!(
            prop_est2_gap(&SpectralData::new(vec![0.0; 4], flat_sigmas(4, 1.0)).unwrap()).is_err()
        );
    }

    #[test]
    fn prop_est2_equality_pattern_is_einstein() {
        let mut s = flat_sigmas(4, 0.0);
        let set = |s: &mut Vec<Vec<f64>>, i: usize, j: usize, v: f64| {
            s[i][j] = v;
            s[j][i] = v;
        };
        set(&mut s, 0, 1, -1.0);
        set(&mut s, 2, 3, -1.0);
        set(&mut s, 0, 2, -2.0);
        set(&mut s, 1, 3, -2.0);
        set(&mut s, 0, 3, -0.5);
        set(&mut s, 1, 2, -0.5);
        let sd = SpectralData::from_sectionals(s).unwrap();
        assert!(sd.lambdas.iter().all(|l| l.abs() < 1e-15));
        assert_eq!(prop_est2_gap(&sd).unwrap(), 0.0);
    }

    #[test]
    fn bridge_agrees_with_tensor_contractions() {
        let hc = curvature_of(&GeometrySpec::su2([
            [1.3, 0.2, -0.1],
            [0.2, 0.6, 0.3],
            [-0.1, 0.3, 2.2],
        ]))
        .unwrap();
        let cp = &hc.cp;
        let sd = SpectralData::from_curvature(cp);
        assert!((sd.scalar() - cp.r).abs() < 1e-12);
        let r_ee = crate::tensor::rm_contract_sym(&cp.rm, &cp.e).dot(&cp.e);
        let tensorial = r_ee + cp.r / 3.0 * cp.e_norm_sq() + cp.e.trace_cube();
        assert!((prop_est2_lhs(&sd) - tensorial).abs() < 1e-11);
        let pair_sum: f64 = sd
            .pairs()
            .map(|(i, j)| (sd.lambdas[i] + sd.lambdas[j]).powi(2) * sd.sigmas[i][j])
            .sum();
        assert!((pair_sum - tensorial).abs() < 1e-11);
    }

    #[test]
    fn cubic_bound_sharpness() {
        assert_eq!(cubic_bound_gap(&Sym2::zeros(3)).unwrap(), 0.0);
        let e = Sym2::diag(&[1.0, 1.0, -2.0]);
        assert!(cubic_bound_gap(&e).unwrap().abs() < 1e-12);
        assert!(cubic_bound_gap(&Sym2::diag(&[1.0, 0.0, 0.0])).is_err());
        assert!(cubic_bound_gap(&Sym2::zeros(4)).is_err());
    }

    #[test]
    fn pinching_examples() {
        let round = curvature_of(&GeometrySpec::round_sphere(3, 1.0)).unwrap();
        assert!(pinching_margin(&round.cp, -0.3).unwrap().margin > 0.0);
        let cyl = curvature_of(&GeometrySpec::sphere_flat(3, 1.0, None)).unwrap();
        let p = pinching_margin(&cyl.cp, -0.25).unwrap();
        assert!((p.margin - (4.0 / 96.0 - 2.0 / 3.0)).abs() < 1e-14);
        assert_eq!(p.lemma_constant, Some(true));
        assert!(pinching_margin(&round.cp, 0.0)
            .unwrap()
            .lemma_constant
            .is_none());
        let s4 = curvature_of(&GeometrySpec::round_sphere(4, 1.0)).unwrap();
        assert!(pinching_margin(&s4.cp, 0.0).is_err());
    }

    #[test]
    fn lemma_constant_on_grid() {
        for k in 0..100 {
            let t = -1.0 / 3.0 + k as f64 * (1.0 / 6.0) / 100.0;
            assert!(pinching_range(t));
            assert!(pinching_lemma_constant(t), "t = {t}");
        }
        assert!(pinching_lemma_constant(-5.0 / 16.0));
    }

    #[test]
    fn f_half_examples() {
        let f = f_half_spectrum(2.0, 2.0 / 3.0, 3, 2).unwrap();
        assert!((f.mu_plus - 1.0).abs() < 1e-15 && f.mu_minus.abs() < 1e-15);
        assert!(f.multiplicity_residual.abs() < 1e-15);
        let (r, esq) = (3.0, 0.36);
        let f = f_half_spectrum(r, esq, 4, 2).unwrap();
        assert!((f.mu_plus - (r / 4.0 + 0.3)).abs() < 1e-15);
        assert!((f.mu_minus - (r / 4.0 - 0.3)).abs() < 1e-15);
        for mu in [f.mu_plus, f.mu_minus] {
            assert!(f_half_quadratic(mu, r, esq, 4).abs() < 1e-12);
        }
        for n in 3..=8 {
            let f = f_half_spectrum(r, 0.0, n, n).unwrap();
            assert!(f_half_quadratic(f.mu_plus, r, 0.0, n).abs() < 1e-12);
            assert!(f_half_quadratic(f.mu_minus, r, 0.0, n).abs() < 1e-12);
        }
        assert!(f_half_spectrum(1.0, 0.0, 3, 0).is_err());
    }

    #[test]
    fn classification_cases() {
        let tols = Tolerances::default();
        let class = |spec| classify_f_half(&curvature_of(&spec).unwrap(), &tols).unwrap();
        assert_eq!(
            class(GeometrySpec::sphere_flat(3, 1.0, None)),
            FHalfClass::S2xFlat
        );
        assert_eq!(class(GeometrySpec::product(1.0, 3.0)), FHalfClass::S2xS2);
        assert_eq!(
            class(GeometrySpec::round_sphere(5, 2.0)),
            FHalfClass::Einstein
        );
        assert_eq!(
            class(GeometrySpec::sphere_flat(5, 1.0, Some(vec![1.0; 3]))),
            FHalfClass::S2xFlat
        );
        let berger = curvature_of(&GeometrySpec::berger(2.0)).unwrap();
        assert!(classify_f_half(&berger, &tols).is_err());
    }
}
