use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Rank-4 tensor with the algebraic symmetries of a curvature tensor.
///
/// Stored densely (`n⁴` entries). Sign convention: `R_ijij` is the sectional
/// curvature of the plane `e_i ∧ e_j`, so the unit round sphere has
/// `R_ijkl = δ_ik δ_jl - δ_il δ_jk`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Riem4 {
    n: usize,
    comps: Vec<f64>,
}

/// Largest violation of each defining symmetry.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SymmetryReport {
    pub antisym_first: f64,
    pub antisym_second: f64,
    pub pair: f64,
    pub bianchi: f64,
}

impl SymmetryReport {
    pub fn max(&self) -> f64 {
        self.antisym_first
            .max(self.antisym_second)
            .max(self.pair)
            .max(self.bianchi)
    }

    fn worst(&self) -> &'static str {
        let m = self.max();
        if m == self.antisym_first {
            "antisymmetry in (i,j)"
        } else if m == self.antisym_second {
            "antisymmetry in (k,l)"
        } else if m == self.pair {
            "pair symmetry"
        } else {
            "first Bianchi identity"
        }
    }
}

#[inline]
fn idx(n: usize, i: usize, j: usize, k: usize, l: usize) -> usize {
    ((i * n + j) * n + k) * n + l
}

impl Riem4 {
    pub fn zeros(n: usize) -> Self {
        Riem4 {
            n,
            comps: vec![0.0; n * n * n * n],
        }
    }

    /// Builds from a formula that is known to produce curvature symmetries
    /// (e.g. Kulkarni-Nomizu products). No projection is applied.
    pub(crate) fn from_fn_raw(
        n: usize,
        mut f: impl FnMut(usize, usize, usize, usize) -> f64,
    ) -> Self {
        let mut comps = vec![0.0; n * n * n * n];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        comps[idx(n, i, j, k, l)] = f(i, j, k, l);
                    }
                }
            }
        }
        Riem4 { n, comps }
    }

    /// Validates raw components against the curvature symmetries and returns
    /// their exact projection onto algebraic curvature tensors.
    ///
    /// `tol` is applied against `max(1, max |R_ijkl|)`.
    pub fn from_fn_checked(
        n: usize,
        f: impl FnMut(usize, usize, usize, usize) -> f64,
        tol: f64,
    ) -> Result<Self> {
        let raw = Self::from_fn_raw(n, f);
        let rep = raw.symmetry_report();
        let bound = tol * crate::tol::scale(raw.max_abs());
        if rep.max() > bound {
            return Err(Error::SymmetryViolation {
                which: rep.worst(),
                violation: rep.max(),
                tol: bound,
            });
        }
        Ok(raw.canonicalize())
    }

    /// Orthogonal projection onto tensors with all curvature symmetries.
    pub fn canonicalize(&self) -> Riem4 {
        let n = self.n;
        let a = Self::from_fn_raw(n, |i, j, k, l| {
            0.25 * (self.get(i, j, k, l) - self.get(j, i, k, l) - self.get(i, j, l, k)
                + self.get(j, i, l, k))
        });
        let b = Self::from_fn_raw(n, |i, j, k, l| {
            0.5 * (a.get(i, j, k, l) + a.get(k, l, i, j))
        });
        // b(B) is totally antisymmetric for B with the pair symmetries, so
        // subtracting it keeps them and enforces Bianchi.
        Self::from_fn_raw(n, |i, j, k, l| {
            let bianchi = (b.get(i, j, k, l) + b.get(i, k, l, j) + b.get(i, l, j, k)) / 3.0;
            b.get(i, j, k, l) - bianchi
        })
    }

    pub fn symmetry_report(&self) -> SymmetryReport {
        let n = self.n;
        let mut rep = SymmetryReport::default();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let r = self.get(i, j, k, l);
                        rep.antisym_first = rep.antisym_first.max((r + self.get(j, i, k, l)).abs());
                        rep.antisym_second =
                            rep.antisym_second.max((r + self.get(i, j, l, k)).abs());
                        rep.pair = rep.pair.max((r - self.get(k, l, i, j)).abs());
                        rep.bianchi = rep
                            .bianchi
                            .max((r + self.get(i, k, l, j) + self.get(i, l, j, k)).abs());
                    }
                }
            }
        }
        rep
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        self.comps[idx(self.n, i, j, k, l)]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.comps
    }

    pub fn norm_sq(&self) -> f64 {
        self.comps.iter().map(|v| v * v).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.comps.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Sectional curvature `R(e_i, e_j, e_i, e_j)` of a coordinate plane.
    pub fn sectional(&self, i: usize, j: usize) -> f64 {
        self.get(i, j, i, j)
    }

    /// `R(X, Y, X, Y)`; equals the sectional curvature when X, Y are orthonormal.
    pub fn plane_curvature(&self, x: &[f64], y: &[f64]) -> f64 {
        let n = self.n;
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                let xy = x[i] * y[j];
                if xy == 0.0 {
                    continue;
                }
                for k in 0..n {
                    for l in 0..n {
                        acc += self.get(i, j, k, l) * xy * x[k] * y[l];
                    }
                }
            }
        }
        acc
    }

    /// Components in a rotated orthonormal frame `f_a = Σ_i basis[a][i] e_i`.
    pub fn rotate(&self, basis: &[Vec<f64>]) -> Riem4 {
        let n = self.n;
        // contract one slot at a time: O(n⁵)
        let mut cur = self.comps.clone();
        for slot in 0..4 {
            let mut next = vec![0.0; cur.len()];
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        for l in 0..n {
                            let out = [i, j, k, l];
                            let mut acc = 0.0;
                            for m in 0..n {
                                let mut src = out;
                                src[slot] = m;
                                acc += basis[out[slot]][m]
                                    * cur[idx(n, src[0], src[1], src[2], src[3])];
                            }
                            next[idx(n, i, j, k, l)] = acc;
                        }
                    }
                }
            }
            cur = next;
        }
        Riem4 { n, comps: cur }
    }

    pub fn scale(&self, c: f64) -> Riem4 {
        Riem4 {
            n: self.n,
            comps: self.comps.iter().map(|v| c * v).collect(),
        }
    }

    pub fn add(&self, other: &Riem4) -> Riem4 {
        assert_eq!(self.n, other.n, "dimension mismatch");
        Riem4 {
            n: self.n,
            comps: self
                .comps
                .iter()
                .zip(&other.comps)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Riem4) -> Riem4 {
        self.add(&other.scale(-1.0))
    }

    pub fn max_abs_diff(&self, other: &Riem4) -> f64 {
        self.comps
            .iter()
            .zip(&other.comps)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    /// Largest `|Σ_i T_ijil|` over (j, l): the Ricci-type trace.
    pub fn max_trace(&self) -> f64 {
        let n = self.n;
        let mut m: f64 = 0.0;
        for j in 0..n {
            for l in 0..n {
                let tr: f64 = (0..n).map(|i| self.get(i, j, i, l)).sum();
                m = m.max(tr.abs());
            }
        }
        m
    }
}

/// Rank-3 tensor, used for `∇_k T_ij` (derivative slot first) and the Cotton tensor.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tensor3 {
    n: usize,
    comps: Vec<f64>,
}

impl Tensor3 {
    pub fn zeros(n: usize) -> Self {
        Tensor3 {
            n,
            comps: vec![0.0; n * n * n],
        }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize, usize) -> f64) -> Self {
        let mut comps = vec![0.0; n * n * n];
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    comps[(a * n + b) * n + c] = f(a, b, c);
                }
            }
        }
        Tensor3 { n, comps }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize, c: usize) -> f64 {
        self.comps[(a * self.n + b) * self.n + c]
    }

    pub fn norm_sq(&self) -> f64 {
        self.comps.iter().map(|v| v * v).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.comps.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn round(n: usize) -> Riem4 {
        let d = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
        Riem4::from_fn_raw(n, |i, j, k, l| d(i, k) * d(j, l) - d(i, l) * d(j, k))
    }

    #[test]
    fn round_sphere_has_all_symmetries() {
        let r = round(4);
        assert_eq!(r.symmetry_report().max(), 0.0);
        assert_eq!(r.sectional(0, 1), 1.0);
        assert_eq!(r.canonicalize(), r);
    }

    #[test]
    fn checked_constructor_rejects_broken_tensor() {
        let r = round(3);
        let err = Riem4::from_fn_checked(
            3,
            |i, j, k, l| {
                if (i, j, k, l) == (0, 1, 0, 1) {
                    2.0
                } else {
                    r.get(i, j, k, l)
                }
            },
            1e-12,
        );
        assert!(matches!(err, Err(Error::SymmetryViolation { .. })));
    }

    #[test]
    fn rotation_preserves_norm() {
        let r = round(3).scale(0.5);
        let c = 0.6_f64;
        let s = 0.8_f64;
        let basis = vec![vec![c, s, 0.0], vec![-s, c, 0.0], vec![0.0, 0.0, 1.0]];
        let rr = r.rotate(&basis);
        assert!((rr.norm_sq() - r.norm_sq()).abs() < 1e-14);
        // constant curvature is rotation invariant
        assert!(rr.max_abs_diff(&r) < 1e-15);
    }
}
