use serde::{Deserialize, Serialize};

use super::lie::StructureConstants;
use crate::error::{Error, Result};
use crate::tensor::{Sym2, MAX_DIM, MIN_DIM};

/// Lie algebra of a left-invariant model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Algebra {
    Named(NamedAlgebra),
    /// `constants[i][j][k] = c^k_ij`.
    Constants([[[f64; 3]; 3]; 3]),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NamedAlgebra {
    Su2,
}

impl Algebra {
    pub fn constants(&self) -> StructureConstants {
        match self {
            Algebra::Named(NamedAlgebra::Su2) => StructureConstants::su2(),
            Algebra::Constants(c) => StructureConstants::from_array(c),
        }
    }

    /// True when the model lives on SU(2) with the unit-sphere normalisation.
    pub fn is_su2(&self) -> bool {
        match self {
            Algebra::Named(NamedAlgebra::Su2) => true,
            Algebra::Constants(c) => StructureConstants::from_array(c) == StructureConstants::su2(),
        }
    }
}

/// Declarative description of a model geometry.
///
/// Size parameters multiply the standard metric: `ProductSphereSphere { a, b }`
/// is `a g_{S²} + b g_{S²}`, so its factors have curvature `1/a` and `1/b`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(
    tag = "kind",
    content = "params",
    rename_all = "snake_case",
    deny_unknown_fields
)]
pub enum GeometrySpec {
    /// Round sphere `Sⁿ` of the given radius.
    RoundSphere { n: usize, radius: f64 },
    /// `(S² × S², a g + b g)`.
    ProductSphereSphere { a: f64, b: f64 },
    /// `S²(a) × flat factor of dimension n-2`; with `flat_lengths` the flat
    /// factor is the rectangular torus with those circumferences.
    SphereFlat {
        n: usize,
        a: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        flat_lengths: Option<Vec<f64>>,
    },
    /// Left-invariant metric on a three-dimensional Lie group; `metric` is the
    /// Gram matrix of the Lie algebra basis.
    LeftInvariant {
        algebra: Algebra,
        metric: [[f64; 3]; 3],
    },
    /// SU(2) with metric `diag(x, 1, 1)`: the Hopf fibre scaled by `x`.
    Berger { x: f64 },
}

fn positive(name: &str, v: f64) -> Result<()> {
    if !(v.is_finite() && v > 0.0) {
        return Err(Error::InvalidGeometry(format!(
            "{name} must be a positive finite number, got {v}"
        )));
    }
    Ok(())
}

fn dim_in_range(n: usize) -> Result<()> {
    if !(MIN_DIM..=MAX_DIM).contains(&n) {
        return Err(Error::InvalidGeometry(format!(
            "dimension n = {n} outside {MIN_DIM}..={MAX_DIM}"
        )));
    }
    Ok(())
}

impl GeometrySpec {
    pub fn round_sphere(n: usize, radius: f64) -> Self {
        GeometrySpec::RoundSphere { n, radius }
    }

    pub fn product(a: f64, b: f64) -> Self {
        GeometrySpec::ProductSphereSphere { a, b }
    }

    pub fn sphere_flat(n: usize, a: f64, flat_lengths: Option<Vec<f64>>) -> Self {
        GeometrySpec::SphereFlat { n, a, flat_lengths }
    }

    pub fn su2(metric: [[f64; 3]; 3]) -> Self {
        GeometrySpec::LeftInvariant {
            algebra: Algebra::Named(NamedAlgebra::Su2),
            metric,
        }
    }

    pub fn diagonal_su2(x: [f64; 3]) -> Self {
        Self::su2([[x[0], 0.0, 0.0], [0.0, x[1], 0.0], [0.0, 0.0, x[2]]])
    }

    pub fn berger(x: f64) -> Self {
        GeometrySpec::Berger { x }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            GeometrySpec::RoundSphere { .. } => "round_sphere",
            GeometrySpec::ProductSphereSphere { .. } => "product_sphere_sphere",
            GeometrySpec::SphereFlat { .. } => "sphere_flat",
            GeometrySpec::LeftInvariant { .. } => "left_invariant",
            GeometrySpec::Berger { .. } => "berger",
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            GeometrySpec::RoundSphere { n, .. } | GeometrySpec::SphereFlat { n, .. } => *n,
            GeometrySpec::ProductSphereSphere { .. } => 4,
            GeometrySpec::LeftInvariant { .. } | GeometrySpec::Berger { .. } => 3,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            GeometrySpec::RoundSphere { n, radius } => {
                dim_in_range(*n)?;
                positive("radius", *radius)
            }
            GeometrySpec::ProductSphereSphere { a, b } => {
                positive("a", *a)?;
                positive("b", *b)
            }
            GeometrySpec::SphereFlat { n, a, flat_lengths } => {
                dim_in_range(*n)?;
                positive("a", *a)?;
                if let Some(ls) = flat_lengths {
                    if ls.len() != n - 2 {
                        return Err(Error::InvalidGeometry(format!(
                            "flat_lengths needs n - 2 = {} entries, got {}",
                            n - 2,
                            ls.len()
                        )));
                    }
                    for l in ls {
                        positive("flat length", *l)?;
                    }
                }
                Ok(())
            }
            GeometrySpec::LeftInvariant { algebra, metric } => {
                algebra.constants().validate()?;
                let q = metric_sym2(metric)?;
                let min = q.eigenvalues()[0];
                if !(min > crate::tol::SPD_MIN_EIGEN) {
                    return Err(Error::InvalidGeometry(format!(
                        "metric is not positive definite (smallest eigenvalue {min:e})"
                    )));
                }
                Ok(())
            }
            GeometrySpec::Berger { x } => positive("x", *x),
        }
    }

    /// The same geometry with its metric multiplied by `c > 0` (lengths scale by `√c`).
    pub fn scaled(&self, c: f64) -> Result<GeometrySpec> {
        positive("scale factor", c)?;
        let rc = c.sqrt();
        Ok(match self {
            GeometrySpec::RoundSphere { n, radius } => GeometrySpec::RoundSphere {
                n: *n,
                radius: radius * rc,
            },
            GeometrySpec::ProductSphereSphere { a, b } => {
                GeometrySpec::ProductSphereSphere { a: a * c, b: b * c }
            }
            GeometrySpec::SphereFlat { n, a, flat_lengths } => GeometrySpec::SphereFlat {
                n: *n,
                a: a * c,
                flat_lengths: flat_lengths
                    .as_ref()
                    .map(|ls| ls.iter().map(|l| l * rc).collect()),
            },
            GeometrySpec::LeftInvariant { algebra, metric } => GeometrySpec::LeftInvariant {
                algebra: algebra.clone(),
                metric: metric.map(|row| row.map(|v| v * c)),
            },
            GeometrySpec::Berger { x } => {
                GeometrySpec::su2([[x * c, 0.0, 0.0], [0.0, c, 0.0], [0.0, 0.0, c]])
            }
        })
    }
}

pub(crate) fn metric_sym2(metric: &[[f64; 3]; 3]) -> Result<Sym2> {
    let rows: Vec<Vec<f64>> = metric.iter().map(|r| r.to_vec()).collect();
    if rows.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::InvalidGeometry(
            "metric has non-finite entries".into(),
        ));
    }
    Sym2::from_rows(&rows, 1e-12)
        .map_err(|_| Error::InvalidGeometry("metric matrix is not symmetric".into()))
}
