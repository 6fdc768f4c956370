//! Minimum sectional curvature.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::{Riem4, Sym2};
use crate::rng::trial_rng;

/// Whether a minimum is exact or only the best value found by sampling.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SectionalFlag {
    Exact,
    Sampled,
}

impl SectionalFlag {
    pub fn as_str(self) -> &'static str {
        match self {
            SectionalFlag::Exact => "exact",
            SectionalFlag::Sampled => "sampled",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MinSectional {
    pub value: f64,
    pub flag: SectionalFlag,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SectionalStrategy {
    /// Exact in dimension three, sampled otherwise.
    Auto,
    /// Always search over orthonormal pairs, even when n = 3.
    Sampled { starts: usize, seed: u64 },
}

pub const DEFAULT_STARTS: usize = 64;
pub const DEFAULT_SEED: u64 = 0x5ec7_10a1;

pub fn min_sectional(rm: &Riem4, strategy: SectionalStrategy) -> MinSectional {
    match strategy {
        SectionalStrategy::Auto if rm.dim() == 3 => MinSectional {
            value: exact_three(rm),
            flag: SectionalFlag::Exact,
        },
        SectionalStrategy::Auto => MinSectional {
            value: sampled(rm, DEFAULT_STARTS, DEFAULT_SEED),
            flag: SectionalFlag::Sampled,
        },
        SectionalStrategy::Sampled { starts, seed } => MinSectional {
            value: sampled(rm, starts, seed),
            flag: SectionalFlag::Sampled,
        },
    }
}

/// In dimension three the plane orthogonal to a unit vector v has curvature
/// `R/2 - Ric(v, v)`; minimise that quadratic form.
fn exact_three(rm: &Riem4) -> f64 {
    let (ric, r) = super::ricci_contract(rm);
    let form = Sym2::from_fn(3, |i, j| {
        let d = if i == j { 0.5 * r } else { 0.0 };
        d - ric.get(i, j)
    });
    form.eigenvalues()[0]
}

/// `M_Y[i][k] = Σ_jl Rm_ijkl Y_j Y_l`, so that `K(X, Y) = X·M_Y·X`.
fn partial_form(rm: &Riem4, y: &[f64]) -> Sym2 {
    let n = rm.dim();
    Sym2::symmetrize(n, |i, k| {
        let mut acc = 0.0;
        for j in 0..n {
            for l in 0..n {
                acc += rm.get(i, j, k, l) * y[j] * y[l];
            }
        }
        acc
    })
}

/// Best unit X orthogonal to `y` for fixed `y`: lowest eigenvector of the
/// form restricted to `y⊥` (the `y` direction is lifted out of the way).
fn best_partner(rm: &Riem4, y: &[f64], lift: f64) -> (f64, Vec<f64>) {
    let n = rm.dim();
    let m = partial_form(rm, y);
    let proj = |a: usize, b: usize| (if a == b { 1.0 } else { 0.0 }) - y[a] * y[b];
    let restricted = Sym2::symmetrize(n, |i, j| {
        let mut acc = 0.0;
        for a in 0..n {
            for b in 0..n {
                acc += proj(i, a) * m.get(a, b) * proj(b, j);
            }
        }
        acc + lift * y[i] * y[j]
    });
    let (vals, vecs) = restricted.eigen();
    (vals[0], vecs[0].clone())
}

fn orthonormal_pair(x: &mut [f64], y: &mut [f64]) -> bool {
    let nx = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if nx < 1e-12 {
        return false;
    }
    x.iter_mut().for_each(|v| *v /= nx);
    let d: f64 = x.iter().zip(y.iter()).map(|(a, b)| a * b).sum();
    y.iter_mut().zip(x.iter()).for_each(|(b, a)| *b -= d * a);
    let ny = y.iter().map(|v| v * v).sum::<f64>().sqrt();
    if ny < 1e-12 {
        return false;
    }
    y.iter_mut().for_each(|v| *v /= ny);
    true
}

/// Alternating exact minimisation over orthonormal pairs from every
/// coordinate plane plus `starts` random pairs. Returns the smallest value seen.
fn sampled(rm: &Riem4, starts: usize, seed: u64) -> f64 {
    let n = rm.dim();
    let lift = 1.0 + 4.0 * rm.as_slice().iter().map(|v| v.abs()).sum::<f64>();
    let mut best = f64::INFINITY;

    let mut descend = |mut x: Vec<f64>, mut y: Vec<f64>| {
        if !orthonormal_pair(&mut x, &mut y) {
            return;
        }
        let mut k = rm.plane_curvature(&x, &y);
        best = best.min(k);
        for _ in 0..200 {
            let (_, nx) = best_partner(rm, &y, lift);
            x = nx;
            let (kv, ny) = best_partner(rm, &x, lift);
            y = ny;
            best = best.min(kv);
            if k - kv <= 1e-15 * k.abs().max(1.0) {
                break;
            }
            k = kv;
        }
    };

    for i in 0..n {
        for j in (i + 1)..n {
            let mut x = vec![0.0; n];
            let mut y = vec![0.0; n];
            x[i] = 1.0;
            y[j] = 1.0;
            descend(x, y);
        }
    }
    for s in 0..starts {
        let mut rng = trial_rng(seed, "min-sectional", s as u64);
        let x: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let y: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        descend(x, y);
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::kulkarni_nomizu;

    fn block(n: usize, blocks: &[(&[usize], f64)]) -> Riem4 {
        let mut rm = Riem4::zeros(n);
        for (idx, kappa) in blocks {
            let mut d = vec![0.0; n];
            for &i in *idx {
                d[i] = 1.0;
            }
            let p = Sym2::diag(&d);
            rm = rm.add(&kulkarni_nomizu(&p, &p).unwrap().scale(0.5 * kappa));
        }
        rm
    }

    #[test]
    fn round_s3_exact() {
        let rm = block(3, &[(&[0, 1, 2], 1.0)]);
        let m = min_sectional(&rm, SectionalStrategy::Auto);
        assert_eq!(m.flag, SectionalFlag::Exact);
        assert!((m.value - 1.0).abs() < 1e-14);
    }

    #[test]
    fn s2_times_line_exact_zero() {
        let rm = block(3, &[(&[0, 1], 1.0)]);
        let m = min_sectional(&rm, SectionalStrategy::Auto);
        assert!(m.value.abs() < 1e-14);
    }

    #[test]
    fn s2xs2_sampled_zero() {
        let rm = block(4, &[(&[0, 1], 1.0), (&[2, 3], 1.0)]);
        let m = min_sectional(&rm, SectionalStrategy::Auto);
        assert_eq!(m.flag, SectionalFlag::Sampled);
        assert!(m.value.abs() < 1e-12, "{}", m.value);
    }

    #[test]
    fn sampled_agrees_with_exact_in_dim_three() {
        // curvature with a skewed Ricci tensor
        let ric = Sym2::from_rows(
            &[
                vec![1.5, 0.3, -0.2],
                vec![0.3, -0.4, 0.1],
                vec![-0.2, 0.1, 0.8],
            ],
            0.0,
        )
        .unwrap();
        let r = ric.trace();
        let rm = crate::tensor::reconstruct_riemann(&Riem4::zeros(3), &ric, r).unwrap();
        let exact = min_sectional(&rm, SectionalStrategy::Auto).value;
        let sampled = min_sectional(
            &rm,
            SectionalStrategy::Sampled {
                starts: 16,
                seed: 1,
            },
        )
        .value;
        assert!((exact - sampled).abs() < 1e-10, "{exact} vs {sampled}");
    }
}
