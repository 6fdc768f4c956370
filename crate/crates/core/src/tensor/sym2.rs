use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Symmetric bilinear form in an orthonormal frame.
///
/// Components are stored densely and kept exactly symmetric: every
/// constructor computes the upper triangle and mirrors it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sym2 {
    n: usize,
    comps: Vec<f64>,
}

impl Sym2 {
    pub fn zeros(n: usize) -> Self {
        Sym2 {
            n,
            comps: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::diag(&vec![1.0; n])
    }

    pub fn diag(d: &[f64]) -> Self {
        let n = d.len();
        Self::from_fn(n, |i, j| if i == j { d[i] } else { 0.0 })
    }

    /// Builds the form from `f(i, j)` evaluated on `i <= j` only.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut comps = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let v = f(i, j);
                comps[i * n + j] = v;
                comps[j * n + i] = v;
            }
        }
        Sym2 { n, comps }
    }

    /// Symmetric part `(a_ij + a_ji) / 2` of an arbitrary square array.
    pub fn symmetrize(n: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        Self::from_fn(n, |i, j| 0.5 * (f(i, j) + f(j, i)))
    }

    /// Accepts row-major data; rejects data whose asymmetry exceeds `tol`.
    pub fn from_rows(rows: &[Vec<f64>], tol: f64) -> Result<Self> {
        let n = rows.len();
        for r in rows {
            if r.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: r.len(),
                });
            }
        }
        for i in 0..n {
            for j in 0..i {
                let d = (rows[i][j] - rows[j][i]).abs();
                if d > tol * crate::tol::scale(rows[i][j]) {
                    return Err(Error::SymmetryViolation {
                        which: "sym2",
                        violation: d,
                        tol,
                    });
                }
            }
        }
        Ok(Self::symmetrize(n, |i, j| rows[i][j]))
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.comps[i * self.n + j]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.comps
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.n)
            .map(|i| self.comps[i * self.n..(i + 1) * self.n].to_vec())
            .collect()
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    /// Frobenius pairing `Σ_ij S_ij T_ij`.
    pub fn dot(&self, other: &Sym2) -> f64 {
        self.comps
            .iter()
            .zip(&other.comps)
            .map(|(a, b)| a * b)
            .sum()
    }

    pub fn norm_sq(&self) -> f64 {
        self.dot(self)
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.comps.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `S - (tr S / n) δ`.
    pub fn traceless(&self) -> Sym2 {
        let m = self.trace() / self.n as f64;
        Sym2::from_fn(self.n, |i, j| {
            if i == j {
                self.get(i, j) - m
            } else {
                self.get(i, j)
            }
        })
    }

    /// Matrix square `(S·S)_ij = Σ_k S_ik S_jk`.
    pub fn square(&self) -> Sym2 {
        let n = self.n;
        Sym2::from_fn(n, |i, j| {
            (0..n).map(|k| self.get(i, k) * self.get(j, k)).sum()
        })
    }

    /// `tr(S³) = Σ S_ij S_jk S_ki`.
    pub fn trace_cube(&self) -> f64 {
        self.square().dot(self)
    }

    pub fn quad_form(&self, v: &[f64]) -> f64 {
        let n = self.n;
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += self.get(i, j) * v[i] * v[j];
            }
        }
        acc
    }

    pub fn scale(&self, c: f64) -> Sym2 {
        Sym2 {
            n: self.n,
            comps: self.comps.iter().map(|v| c * v).collect(),
        }
    }

    pub fn to_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.n, self.n, &self.comps)
    }

    /// Eigenvalues in ascending order with matching unit eigenvectors.
    pub fn eigen(&self) -> (Vec<f64>, Vec<Vec<f64>>) {
        let eig = SymmetricEigen::new(self.to_matrix());
        let mut order: Vec<usize> = (0..self.n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
        let vectors = order
            .iter()
            .map(|&k| eig.eigenvectors.column(k).iter().copied().collect())
            .collect();
        (values, vectors)
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        self.eigen().0
    }

    pub(crate) fn check_dim(&self, other: &Sym2) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: other.n,
            });
        }
        Ok(())
    }
}

impl Add for &Sym2 {
    type Output = Sym2;
    fn add(self, rhs: &Sym2) -> Sym2 {
        assert_eq!(self.n, rhs.n, "dimension mismatch");
        Sym2 {
            n: self.n,
            comps: self
                .comps
                .iter()
                .zip(&rhs.comps)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &Sym2 {
    type Output = Sym2;
    fn sub(self, rhs: &Sym2) -> Sym2 {
        assert_eq!(self.n, rhs.n, "dimension mismatch");
        Sym2 {
            n: self.n,
            comps: self
                .comps
                .iter()
                .zip(&rhs.comps)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Neg for &Sym2 {
    type Output = Sym2;
    fn neg(self) -> Sym2 {
        self.scale(-1.0)
    }
}

impl Mul<&Sym2> for f64 {
    type Output = Sym2;
    fn mul(self, rhs: &Sym2) -> Sym2 {
        rhs.scale(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn from_fn_is_exactly_symmetric() {
        let s = Sym2::from_fn(4, |i, j| (i * 7 + j) as f64 * 0.1);
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(s.get(i, j), s.get(j, i));
            }
        }
    }

    #[test]
    fn rejects_asymmetric_rows() {
        let rows = vec![vec![1.0, 2.0], vec![2.5, 1.0]];
        assert!(Sym2::from_rows(&rows, 1e-12).is_err());
        let rows = vec![vec![1.0, 2.0], vec![2.0, 1.0]];
        assert!(Sym2::from_rows(&rows, 1e-12).is_ok());
    }

    #[test]
    fn eigen_sorted_and_orthonormal() {
        let s = Sym2::from_rows(
            &[
                vec![2.0, 1.0, 0.0],
                vec![1.0, 2.0, 0.0],
                vec![0.0, 0.0, -1.0],
            ],
            0.0,
        )
        .unwrap();
        let (vals, vecs) = s.eigen();
        assert!((vals[0] + 1.0).abs() < 1e-14);
        assert!((vals[1] - 1.0).abs() < 1e-14);
        assert!((vals[2] - 3.0).abs() < 1e-14);
        for (k, v) in vecs.iter().enumerate() {
            assert!((s.quad_form(v) - vals[k]).abs() < 1e-13);
        }
    }

    #[test]
    fn trace_cube_of_diag() {
        let e = Sym2::diag(&[1.0, 1.0, -2.0]);
        assert_eq!(e.trace_cube(), -6.0);
        assert_eq!(e.traceless(), e);
    }
}
