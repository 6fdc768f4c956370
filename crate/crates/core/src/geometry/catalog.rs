use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::lie::{self, Connection};
use super::spec::{metric_sym2, GeometrySpec};
use crate::error::{Error, Result};
use crate::tensor::{kulkarni_nomizu, CurvaturePoint, Riem4, Sym2, Tensor3};
use crate::tol;

/// Total volume of a model, or a marker for non-compact models.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Volume {
    Finite(f64),
    Noncompact,
}

impl Volume {
    pub fn finite(self) -> Option<f64> {
        match self {
            Volume::Finite(v) => Some(v),
            Volume::Noncompact => None,
        }
    }

    /// The finite volume, or an error explaining what is missing for `spec`.
    pub fn require(self, spec: &GeometrySpec) -> Result<f64> {
        self.finite()
            .ok_or_else(|| Error::Noncompact(noncompact_reason(spec)))
    }
}

fn noncompact_reason(spec: &GeometrySpec) -> String {
    match spec {
        GeometrySpec::SphereFlat { n, .. } => format!(
            "sphere_flat has no flat_lengths; supply params.flat_lengths ({} positive lengths) \
             to work on a compact torus quotient",
            n - 2
        ),
        GeometrySpec::LeftInvariant { .. } => {
            "left_invariant volume is only known for the su2 algebra".to_string()
        }
        _ => format!("{} is unexpectedly non-compact", spec.kind()),
    }
}

/// Complete curvature package of a homogeneous model.
///
/// All quantities are constant in the chosen orthonormal frame, so every
/// derivative of the scalar curvature vanishes; those terms are kept as
/// explicit zeros.
#[derive(Clone, Debug)]
pub struct HomogeneousCurvature {
    pub spec: GeometrySpec,
    pub cp: CurvaturePoint,
    /// Levi-Civita coefficients in the left-invariant frame. `None` for the
    /// closed-form symmetric models, whose curvature is parallel.
    pub connection: Option<Connection>,
    /// `∇_k R_ij`, indexed `(k, i, j)`.
    pub nabla_ric: Tensor3,
    /// Rough Laplacian `ΔR_ij`.
    pub lap_ric: Sym2,
    pub nabla_e: Tensor3,
    pub lap_e: Sym2,
    /// `∇_k R` (zero).
    pub grad_scalar: Vec<f64>,
    /// `∇²_ij R` (zero).
    pub hess_scalar: Sym2,
    /// `ΔR` (zero).
    pub lap_scalar: f64,
    pub volume: Volume,
}

impl HomogeneousCurvature {
    pub fn dim(&self) -> usize {
        self.cp.n
    }
}

/// Volume of the unit round sphere `Sⁿ`.
pub fn unit_sphere_volume(n: usize) -> f64 {
    // vol(S⁰) = 2, vol(S¹) = 2π, vol(Sⁿ) = 2π/(n-1) vol(Sⁿ⁻²)
    let mut v = if n % 2 == 0 { 2.0 } else { 2.0 * PI };
    let mut k = if n % 2 == 0 { 2 } else { 3 };
    while k <= n {
        v *= 2.0 * PI / (k as f64 - 1.0);
        k += 2;
    }
    v
}

/// Curvature of a union of orthogonal constant-curvature blocks.
fn block_curvature(n: usize, blocks: &[(Vec<usize>, f64)]) -> Riem4 {
    let mut rm = Riem4::zeros(n);
    for (idx, kappa) in blocks {
        let mut d = vec![0.0; n];
        for &i in idx {
            d[i] = 1.0;
        }
        let p = Sym2::diag(&d);
        let kn = kulkarni_nomizu(&p, &p).expect("same dimension");
        rm = rm.add(&kn.scale(0.5 * kappa));
    }
    rm
}

pub fn volume_of(spec: &GeometrySpec) -> Result<Volume> {
    spec.validate()?;
    Ok(match spec {
        GeometrySpec::RoundSphere { n, radius } => {
            Volume::Finite(unit_sphere_volume(*n) * radius.powi(*n as i32))
        }
        GeometrySpec::ProductSphereSphere { a, b } => Volume::Finite(16.0 * PI * PI * a * b),
        GeometrySpec::SphereFlat {
            a, flat_lengths, ..
        } => match flat_lengths {
            Some(ls) => Volume::Finite(4.0 * PI * a * ls.iter().product::<f64>()),
            None => Volume::Noncompact,
        },
        GeometrySpec::LeftInvariant { algebra, metric } => {
            if algebra.is_su2() {
                let det = metric_sym2(metric)?.eigenvalues().iter().product::<f64>();
                Volume::Finite(2.0 * PI * PI * det.sqrt())
            } else {
                Volume::Noncompact
            }
        }
        GeometrySpec::Berger { x } => Volume::Finite(2.0 * PI * PI * x.sqrt()),
    })
}

fn left_invariant_parts(spec: &GeometrySpec) -> Option<(lie::StructureConstants, Sym2)> {
    match spec {
        GeometrySpec::LeftInvariant { algebra, metric } => {
            Some((algebra.constants(), metric_sym2(metric).ok()?))
        }
        GeometrySpec::Berger { x } => {
            Some((lie::StructureConstants::su2(), Sym2::diag(&[*x, 1.0, 1.0])))
        }
        _ => None,
    }
}

fn closed_form_riemann(spec: &GeometrySpec) -> Option<Riem4> {
    match spec {
        GeometrySpec::RoundSphere { n, radius } => Some(block_curvature(
            *n,
            &[((0..*n).collect(), 1.0 / (radius * radius))],
        )),
        GeometrySpec::ProductSphereSphere { a, b } => Some(block_curvature(
            4,
            &[(vec![0, 1], 1.0 / a), (vec![2, 3], 1.0 / b)],
        )),
        GeometrySpec::SphereFlat { n, a, .. } => {
            Some(block_curvature(*n, &[(vec![0, 1], 1.0 / a)]))
        }
        _ => None,
    }
}

/// Curvature tensor and volume only; the cheap path used inside solvers.
pub fn riemann_of(spec: &GeometrySpec) -> Result<(Riem4, Volume)> {
    let volume = volume_of(spec)?;
    if let Some(rm) = closed_form_riemann(spec) {
        return Ok((rm, volume));
    }
    let (c, q) = left_invariant_parts(spec).expect("left-invariant variant");
    let (gamma, c_on) = lie::koszul_connection(&c, &q)?;
    Ok((lie::curvature_from_connection(&gamma, &c_on)?, volume))
}

/// Builds the full curvature package for a model geometry.
pub fn curvature_of(spec: &GeometrySpec) -> Result<HomogeneousCurvature> {
    let volume = volume_of(spec)?;
    let n = spec.dim();

    let (cp, connection, nabla_ric, lap_ric, nabla_e, lap_e) =
        if let Some(rm) = closed_form_riemann(spec) {
            // products of constant-curvature factors: parallel curvature
            let cp = CurvaturePoint::from_riemann(rm)?;
            (
                cp,
                None,
                Tensor3::zeros(n),
                Sym2::zeros(n),
                Tensor3::zeros(n),
                Sym2::zeros(n),
            )
        } else {
            let (c, q) = left_invariant_parts(spec).expect("left-invariant variant");
            let (gamma, c_on) = lie::koszul_connection(&c, &q)?;
            let rm = lie::curvature_from_connection(&gamma, &c_on)?;
            let cp = CurvaturePoint::from_riemann(rm)?;
            let d = lie::covariant_derivatives(&gamma, &cp.ric);
            (cp, Some(gamma), d.nabla_ric, d.lap_ric, d.nabla_e, d.lap_e)
        };

    // contracted second Bianchi identity with constant R: Σ_i ∇_i E_ij = 0
    let bianchi = (0..n)
        .map(|j| (0..n).map(|i| nabla_e.get(i, i, j)).sum::<f64>().abs())
        .fold(0.0, f64::max);
    let scale =
        tol::scale(cp.ric.max_abs()) * tol::scale(connection.as_ref().map_or(0.0, |g| g.max_abs()));
    if bianchi > tol::IDENTITY_REL * scale {
        return Err(Error::Inconsistent(format!(
            "contracted second Bianchi identity fails: {bianchi:e}"
        )));
    }

    Ok(HomogeneousCurvature {
        spec: spec.clone(),
        cp,
        connection,
        nabla_ric,
        lap_ric,
        nabla_e,
        lap_e,
        grad_scalar: vec![0.0; n],
        hess_scalar: Sym2::zeros(n),
        lap_scalar: 0.0,
        volume,
    })
}
