//! Seeded generators of random test data.

use nalgebra::{Matrix3, Quaternion, UnitQuaternion};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::tensor::{kulkarni_nomizu, ricci_contract, weyl_part, Riem4, Sym2};

pub fn sym2(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> Sym2 {
    let mut vals = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let v = scale * rng.random_range(-1.0..1.0);
            vals[i][j] = v;
            vals[j][i] = v;
        }
    }
    Sym2::from_fn(n, |i, j| vals[i][j])
}

pub fn traceless(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> Sym2 {
    sym2(rng, n, scale).traceless()
}

/// Algebraic curvature tensor: a sum of Kulkarni-Nomizu squares.
pub fn riem4(rng: &mut ChaCha8Rng, n: usize) -> Result<Riem4> {
    let mut rm = Riem4::zeros(n);
    for _ in 0..3 {
        let s = sym2(rng, n, 1.0);
        let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        rm = rm.add(&kulkarni_nomizu(&s, &s)?.scale(0.5 * sign));
    }
    Ok(rm)
}

/// Totally trace-free tensor, the Weyl part of a random curvature tensor.
pub fn weyl(rng: &mut ChaCha8Rng, n: usize) -> Result<Riem4> {
    let rm = riem4(rng, n)?;
    let (ric, r) = ricci_contract(&rm);
    weyl_part(&rm, &ric, r)
}

/// Symmetric positive-definite 3×3 matrix with eigenvalues log-uniform in
/// `[lo, hi]` and a uniformly random eigenframe.
pub fn spd3(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> [[f64; 3]; 3] {
    let q = loop {
        let v: [f64; 4] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.1 && norm <= 1.0 {
            break Quaternion::new(v[0], v[1], v[2], v[3]);
        }
    };
    let rot = UnitQuaternion::from_quaternion(q).to_rotation_matrix();
    let d = Matrix3::from_diagonal(&nalgebra::Vector3::from_fn(|_, _| {
        (rng.random_range(lo.ln()..hi.ln())).exp()
    }));
    let m = rot.matrix() * d * rot.matrix().transpose();
    std::array::from_fn(|i| std::array::from_fn(|j| 0.5 * (m[(i, j)] + m[(j, i)])))
}

/// Symmetric plane-curvature matrix with zero diagonal and entries of the
/// given sign, magnitudes uniform in `[0, 1)`.
pub fn sectionals(rng: &mut ChaCha8Rng, n: usize, sign: f64) -> Vec<Vec<f64>> {
    let mut s = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..i {
            let v = sign * rng.random_range(0.0..1.0);
            s[i][j] = v;
            s[j][i] = v;
        }
    }
    s
}

pub fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    rng.random_range(lo.ln()..hi.ln()).exp()
}
