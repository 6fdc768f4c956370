//! Left-invariant metrics: orthonormal frames, the Koszul connection, curvature
//! and covariant derivatives of left-invariant tensors.
//!
//! Everything is expressed in a left-invariant orthonormal frame `f_i`, where
//! tensor components are constants and derivatives are purely algebraic.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor::{Riem4, Sym2, Tensor3};
use crate::tol;

/// Structure constants `c^k_ij` of a Lie algebra: `[e_i, e_j] = Σ_k c^k_ij e_k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StructureConstants {
    n: usize,
    c: Vec<f64>,
}

fn levi_civita(i: usize, j: usize, k: usize) -> f64 {
    match (i, j, k) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
        _ => 0.0,
    }
}

impl StructureConstants {
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize, usize) -> f64) -> Self {
        let mut c = vec![0.0; n * n * n];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    c[(i * n + j) * n + k] = f(i, j, k);
                }
            }
        }
        StructureConstants { n, c }
    }

    /// su(2) normalised as `[e_i, e_j] = 2 ε_ijk e_k`, so that the metric `δ`
    /// is the unit round three-sphere.
    pub fn su2() -> Self {
        Self::from_fn(3, |i, j, k| 2.0 * levi_civita(i, j, k))
    }

    pub fn abelian(n: usize) -> Self {
        Self::from_fn(n, |_, _, _| 0.0)
    }

    /// From nested arrays indexed `[i][j][k] = c^k_ij`.
    pub fn from_array(c: &[[[f64; 3]; 3]; 3]) -> Self {
        Self::from_fn(3, |i, j, k| c[i][j][k])
    }

    pub fn to_array(&self) -> [[[f64; 3]; 3]; 3] {
        let mut out = [[[0.0; 3]; 3]; 3];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, col) in row.iter_mut().enumerate() {
                for (k, v) in col.iter_mut().enumerate() {
                    *v = self.get(i, j, k);
                }
            }
        }
        out
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    /// `c^k_ij`.
    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.c[(i * self.n + j) * self.n + k]
    }

    pub fn max_abs(&self) -> f64 {
        self.c.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn antisymmetry_violation(&self) -> f64 {
        let n = self.n;
        let mut m: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    m = m.max((self.get(i, j, k) + self.get(j, i, k)).abs());
                }
            }
        }
        m
    }

    /// Largest component of `[[e_i,e_j],e_l] + [[e_j,e_l],e_i] + [[e_l,e_i],e_j]`.
    pub fn jacobi_violation(&self) -> f64 {
        let n = self.n;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                for l in 0..n {
                    for m in 0..n {
                        let mut acc = 0.0;
                        for k in 0..n {
                            acc += self.get(i, j, k) * self.get(k, l, m)
                                + self.get(j, l, k) * self.get(k, i, m)
                                + self.get(l, i, k) * self.get(k, j, m);
                        }
                        worst = worst.max(acc.abs());
                    }
                }
            }
        }
        worst
    }

    pub fn validate(&self) -> Result<()> {
        let s = tol::scale(self.max_abs());
        let a = self.antisymmetry_violation();
        if a > tol::CONSTRUCTION * s {
            return Err(Error::InvalidGeometry(format!(
                "structure constants are not antisymmetric (violation {a:e})"
            )));
        }
        let jac = self.jacobi_violation();
        if jac > tol::CONSTRUCTION * s * s {
            return Err(Error::InvalidGeometry(format!(
                "structure constants violate the Jacobi identity (violation {jac:e})"
            )));
        }
        Ok(())
    }

    /// `tr ad(e_i)` for each basis vector; all zero for unimodular algebras.
    pub fn ad_traces(&self) -> Vec<f64> {
        (0..self.n)
            .map(|i| (0..self.n).map(|k| self.get(i, k, k)).sum())
            .collect()
    }

    /// Constants in the frame `f_i = Σ_a p[(a, i)] e_a`, given `p⁻¹`.
    fn transformed(&self, p: &DMatrix<f64>, pinv: &DMatrix<f64>) -> Self {
        let n = self.n;
        // c'^k_ij = Σ_abc P_ai P_bj c^c_ab (P⁻¹)_kc
        let mut tmp = vec![0.0; n * n * n];
        for i in 0..n {
            for j in 0..n {
                for c in 0..n {
                    let mut acc = 0.0;
                    for a in 0..n {
                        for b in 0..n {
                            acc += p[(a, i)] * p[(b, j)] * self.get(a, b, c);
                        }
                    }
                    tmp[(i * n + j) * n + c] = acc;
                }
            }
        }
        Self::from_fn(n, |i, j, k| {
            (0..n)
                .map(|c| tmp[(i * n + j) * n + c] * pinv[(k, c)])
                .sum()
        })
    }
}

/// Orthonormal frame of a left-invariant metric `Q` (Gram matrix of the Lie
/// algebra basis) and the structure constants expressed in it.
#[derive(Clone, Debug)]
pub struct OrthonormalFrame {
    /// `f_i = Σ_a transform[(a, i)] e_a`, `transform = Q^{-1/2}`.
    pub transform: DMatrix<f64>,
    pub constants: StructureConstants,
}

/// Orthonormalises through the symmetric square root `Q^{-1/2}`.
pub fn orthonormal_frame(c: &StructureConstants, q: &Sym2) -> Result<OrthonormalFrame> {
    let n = c.dim();
    if q.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: q.dim(),
        });
    }
    c.validate()?;
    let (vals, vecs) = q.eigen();
    if !(vals[0] > tol::SPD_MIN_EIGEN) || vals.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidGeometry(format!(
            "metric matrix is not positive definite (smallest eigenvalue {:e})",
            vals[0]
        )));
    }
    let build = |f: &dyn Fn(f64) -> f64| {
        let mut m = DMatrix::zeros(n, n);
        for (lam, v) in vals.iter().zip(&vecs) {
            let w = f(*lam);
            for a in 0..n {
                for b in 0..n {
                    m[(a, b)] += w * v[a] * v[b];
                }
            }
        }
        // exact symmetry
        (&m + m.transpose()) * 0.5
    };
    let p = build(&|l| 1.0 / l.sqrt());
    let pinv = build(&|l| l.sqrt());
    let constants = c.transformed(&p, &pinv);
    Ok(OrthonormalFrame {
        transform: p,
        constants,
    })
}

/// Levi-Civita connection coefficients `Γ^k_ij = ⟨∇_{f_i} f_j, f_k⟩` in an
/// orthonormal left-invariant frame.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Connection {
    n: usize,
    gamma: Vec<f64>,
}

impl Connection {
    pub fn zeros(n: usize) -> Self {
        Connection {
            n,
            gamma: vec![0.0; n * n * n],
        }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    /// `Γ^k_ij`.
    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.gamma[(i * self.n + j) * self.n + k]
    }

    pub fn max_abs(&self) -> f64 {
        self.gamma.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Largest `|Γ^k_ij + Γ^j_ik|`.
    pub fn compatibility_violation(&self) -> f64 {
        let n = self.n;
        let mut m: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    m = m.max((self.get(i, j, k) + self.get(i, k, j)).abs());
                }
            }
        }
        m
    }
}

/// Koszul formula for left-invariant fields:
/// `2⟨∇_{f_i} f_j, f_k⟩ = ⟨[f_i,f_j],f_k⟩ - ⟨[f_j,f_k],f_i⟩ + ⟨[f_k,f_i],f_j⟩`.
///
/// Returns the connection and the structure constants in the orthonormal frame.
pub fn koszul_connection(
    c: &StructureConstants,
    q: &Sym2,
) -> Result<(Connection, StructureConstants)> {
    let frame = orthonormal_frame(c, q)?;
    Ok((koszul_orthonormal(&frame.constants), frame.constants))
}

/// Koszul formula when the constants are already given in an orthonormal frame.
pub fn koszul_orthonormal(c: &StructureConstants) -> Connection {
    let n = c.dim();
    let mut gamma = vec![0.0; n * n * n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                gamma[(i * n + j) * n + k] =
                    0.5 * (c.get(i, j, k) - c.get(j, k, i) + c.get(k, i, j));
            }
        }
    }
    Connection { n, gamma }
}

/// `Rm_ijkl = ⟨R(f_i,f_j) f_l, f_k⟩` with
/// `R(X,Y)Z = ∇_X ∇_Y Z - ∇_Y ∇_X Z - ∇_{[X,Y]} Z`.
///
/// The result must pass curvature-symmetry validation; a failure means the
/// connection and constants do not belong together.
pub fn curvature_from_connection(gamma: &Connection, c: &StructureConstants) -> Result<Riem4> {
    let n = gamma.dim();
    if c.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: c.dim(),
        });
    }
    Riem4::from_fn_checked(
        n,
        |i, j, k, l| {
            let mut acc = 0.0;
            for p in 0..n {
                acc += gamma.get(j, l, p) * gamma.get(i, p, k)
                    - gamma.get(i, l, p) * gamma.get(j, p, k)
                    - c.get(i, j, p) * gamma.get(p, l, k);
            }
            acc
        },
        1e-10,
    )
}

/// `∇_k T_ij = -Γ^l_ki T_lj - Γ^l_kj T_il` for constant components `T_ij`.
pub fn nabla_sym2(gamma: &Connection, t: &Sym2) -> Tensor3 {
    let n = gamma.dim();
    Tensor3::from_fn(n, |k, i, j| {
        let mut acc = 0.0;
        for l in 0..n {
            acc -= gamma.get(k, i, l) * t.get(l, j) + gamma.get(k, j, l) * t.get(i, l);
        }
        acc
    })
}

/// Second covariant derivative `(∇²T)_{mkij} = (∇_m ∇T)_{kij}`, including the
/// correction on the derivative slot `k`. Indexed `[((m*n + k)*n + i)*n + j]`.
pub fn nabla2_sym2(gamma: &Connection, t: &Sym2) -> Vec<f64> {
    let n = gamma.dim();
    let s = nabla_sym2(gamma, t);
    let mut out = vec![0.0; n * n * n * n];
    for m in 0..n {
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let mut acc = 0.0;
                    for l in 0..n {
                        acc -= gamma.get(m, k, l) * s.get(l, i, j)
                            + gamma.get(m, i, l) * s.get(k, l, j)
                            + gamma.get(m, j, l) * s.get(k, i, l);
                    }
                    out[((m * n + k) * n + i) * n + j] = acc;
                }
            }
        }
    }
    out
}

/// Rough Laplacian `ΔT_ij = Σ_k (∇²T)_{kkij}`.
pub fn rough_laplacian(gamma: &Connection, t: &Sym2) -> Sym2 {
    let n = gamma.dim();
    let d2 = nabla2_sym2(gamma, t);
    Sym2::symmetrize(n, |i, j| {
        (0..n).map(|k| d2[((k * n + k) * n + i) * n + j]).sum()
    })
}

/// First and second covariant derivative data of the Ricci tensor.
#[derive(Clone, Debug)]
pub struct CovariantDerivatives {
    pub nabla_ric: Tensor3,
    pub lap_ric: Sym2,
    /// `∇E`; equal to `∇Ric` because the scalar curvature is constant.
    pub nabla_e: Tensor3,
    pub lap_e: Sym2,
}

pub fn covariant_derivatives(gamma: &Connection, ric: &Sym2) -> CovariantDerivatives {
    let nabla_ric = nabla_sym2(gamma, ric);
    let lap_ric = rough_laplacian(gamma, ric);
    let e = ric.traceless();
    CovariantDerivatives {
        nabla_e: nabla_sym2(gamma, &e),
        lap_e: rough_laplacian(gamma, &e),
        nabla_ric,
        lap_ric,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::ricci_contract;

    fn berger_q(x: f64) -> Sym2 {
        Sym2::diag(&[x, 1.0, 1.0])
    }

    #[test]
    fn su2_is_a_lie_algebra() {
        let c = StructureConstants::su2();
        assert_eq!(c.antisymmetry_violation(), 0.0);
        assert_eq!(c.jacobi_violation(), 0.0);
        assert_eq!(c.ad_traces(), vec![0.0; 3]);
    }

    #[test]
    fn rejects_jacobi_violation() {
        // [e0,e1] = e2, [e1,e2] = e0, [e2,e0] = e0: Jacobi sum is e2
        let c = StructureConstants::from_fn(3, |i, j, k| match (i, j, k) {
            (0, 1, 2) | (1, 2, 0) | (2, 0, 0) => 1.0,
            (1, 0, 2) | (2, 1, 0) | (0, 2, 0) => -1.0,
            _ => 0.0,
        });
        assert!(c.validate().is_err());
        assert!(koszul_connection(&c, &Sym2::identity(3)).is_err());
    }

    #[test]
    fn rejects_indefinite_metric() {
        let q = Sym2::diag(&[1.0, -1.0, 1.0]);
        assert!(koszul_connection(&StructureConstants::su2(), &q).is_err());
    }

    #[test]
    fn abelian_connection_vanishes() {
        let q = Sym2::from_rows(
            &[
                vec![2.0, 0.3, 0.1],
                vec![0.3, 1.0, 0.0],
                vec![0.1, 0.0, 0.5],
            ],
            0.0,
        )
        .unwrap();
        let (g, c) = koszul_connection(&StructureConstants::abelian(3), &q).unwrap();
        assert_eq!(g.max_abs(), 0.0);
        let rm = curvature_from_connection(&g, &c).unwrap();
        assert_eq!(rm.max_abs(), 0.0);
    }

    #[test]
    fn su2_bi_invariant_is_unit_sphere() {
        let (g, c) = koszul_connection(&StructureConstants::su2(), &Sym2::identity(3)).unwrap();
        let rm = curvature_from_connection(&g, &c).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    assert!((rm.sectional(i, j) - 1.0).abs() < 1e-14);
                }
            }
        }
        let (ric, r) = ricci_contract(&rm);
        assert!((r - 6.0).abs() < 1e-13);
        assert!((&ric - &Sym2::diag(&[2.0; 3])).max_abs() < 1e-14);
    }

    #[test]
    fn berger_sectionals_match_milnor_closed_form() {
        // Milnor frame: σ_23 = 4 - 3x, σ_12 = σ_13 = x
        for &x in &[0.3, 1.0, 2.5] {
            let (g, c) = koszul_connection(&StructureConstants::su2(), &berger_q(x)).unwrap();
            let rm = curvature_from_connection(&g, &c).unwrap();
            assert!((rm.sectional(1, 2) - (4.0 - 3.0 * x)).abs() < 1e-13);
            assert!((rm.sectional(0, 1) - x).abs() < 1e-13);
            assert!((rm.sectional(0, 2) - x).abs() < 1e-13);
        }
    }

    #[test]
    fn berger_limit_is_continuous() {
        let at = |x: f64| {
            let (g, c) = koszul_connection(&StructureConstants::su2(), &berger_q(x)).unwrap();
            curvature_from_connection(&g, &c).unwrap()
        };
        let round = at(1.0);
        for x in [1.0 + 1e-4, 1.0 - 1e-4] {
            let d = at(x).max_abs_diff(&round);
            assert!(d < 1e-3 && d > 0.0, "jump {d}");
        }
    }

    #[test]
    fn ricci_commutation_identity() {
        // (∇²T)_{pjik} - (∇²T)_{jpik} = -Σ_m (Rm_pjmi T_mk + Rm_pjmk T_im)
        let q = Sym2::from_rows(
            &[
                vec![1.7, 0.2, -0.3],
                vec![0.2, 0.9, 0.1],
                vec![-0.3, 0.1, 0.6],
            ],
            0.0,
        )
        .unwrap();
        let (g, c) = koszul_connection(&StructureConstants::su2(), &q).unwrap();
        let rm = curvature_from_connection(&g, &c).unwrap();
        let t = Sym2::from_rows(
            &[
                vec![0.4, -1.0, 0.5],
                vec![-1.0, 2.0, 0.3],
                vec![0.5, 0.3, -0.7],
            ],
            0.0,
        )
        .unwrap();
        let d2 = nabla2_sym2(&g, &t);
        let n = 3;
        let at = |m: usize, k: usize, i: usize, j: usize| d2[((m * n + k) * n + i) * n + j];
        for p in 0..n {
            for j in 0..n {
                for i in 0..n {
                    for k in 0..n {
                        let lhs = at(p, j, i, k) - at(j, p, i, k);
                        let rhs: f64 = -(0..n)
                            .map(|m| {
                                rm.get(p, j, m, i) * t.get(m, k) + rm.get(p, j, m, k) * t.get(i, m)
                            })
                            .sum::<f64>();
                        assert!((lhs - rhs).abs() < 1e-12, "{lhs} vs {rhs}");
                    }
                }
            }
        }
    }
}
