//! Finite-difference Newton iteration for `∇f = 0`.

use nalgebra::{DMatrix, DVector};

use crate::error::Result;

/// Central differences along `dir` at `h, h/2, ..., h/2^(levels-1)` combined
/// by Richardson extrapolation, accurate to `O(h^(2 levels))`.
pub fn richardson_directional<F>(
    f: &F,
    u: &[f64],
    dir: &[f64],
    h: f64,
    levels: usize,
) -> Result<f64>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    let levels = levels.max(1);
    let at = |step: f64| -> Result<f64> {
        let p: Vec<f64> = u.iter().zip(dir).map(|(a, d)| a + step * d).collect();
        f(&p)
    };
    let mut table = Vec::with_capacity(levels);
    for k in 0..levels {
        let hk = h / 2f64.powi(k as i32);
        table.push((at(hk)? - at(-hk)?) / (2.0 * hk));
    }
    for m in 1..levels {
        let p = 4f64.powi(m as i32);
        for k in (m..levels).rev() {
            table[k] = (p * table[k] - table[k - 1]) / (p - 1.0);
        }
    }
    Ok(table[levels - 1])
}

pub fn fd_gradient<F>(f: &F, u: &[f64], h: f64, levels: usize) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    let n = u.len();
    (0..n)
        .map(|i| {
            let mut e = vec![0.0; n];
            e[i] = 1.0;
            richardson_directional(f, u, &e, h, levels)
        })
        .collect()
}

/// Symmetrised central difference of the finite-difference gradient.
pub fn fd_hessian<F>(
    f: &F,
    u: &[f64],
    h_grad: f64,
    levels: usize,
    h_hess: f64,
) -> Result<DMatrix<f64>>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    let n = u.len();
    let mut hm = DMatrix::zeros(n, n);
    for j in 0..n {
        let mut up = u.to_vec();
        let mut dn = u.to_vec();
        up[j] += h_hess;
        dn[j] -= h_hess;
        let gp = fd_gradient(f, &up, h_grad, levels)?;
        let gm = fd_gradient(f, &dn, h_grad, levels)?;
        for i in 0..n {
            hm[(i, j)] = (gp[i] - gm[i]) / (2.0 * h_hess);
        }
    }
    Ok((&hm + hm.transpose()) * 0.5)
}

#[derive(Clone, Copy, Debug)]
pub struct NewtonOptions {
    /// Target `|∇f|`. A stalled iterate still counts as converged below
    /// `tol · max(1, |f|)`.
    pub tol: f64,
    pub max_iter: usize,
    pub grad_step: f64,
    /// Richardson levels of the gradient.
    pub grad_levels: usize,
    pub hess_step: f64,
    /// Coordinates are clamped to `[-bound, bound]`.
    pub bound: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum NewtonStatus {
    Converged,
    MaxIterations,
    /// No damping produced a decrease of `|∇f|`.
    Stalled,
    /// The iterate reached the coordinate bound.
    Escaped,
    /// `f` could not be evaluated (left the domain).
    Failed(String),
}

#[derive(Clone, Debug)]
pub struct NewtonResult {
    pub u: Vec<f64>,
    pub grad: Vec<f64>,
    pub grad_norm: f64,
    pub iterations: usize,
    pub status: NewtonStatus,
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Levenberg-Marquardt damped Newton on the system `∇f(u) = 0`.
///
/// Each step solves `(HᵀH + μI) p = -Hᵀg`; `μ = 0` is the plain Newton step,
/// so saddle points stay attractive. The step is accepted when it lowers
/// `|∇f|`, otherwise `μ` grows.
pub fn newton<F>(f: &F, u0: &[f64], opts: &NewtonOptions) -> NewtonResult
where
    F: Fn(&[f64]) -> Result<f64>,
{
    let n = u0.len();
    let mut u = u0.to_vec();
    let fail = |u: Vec<f64>, it: usize, e: crate::Error| NewtonResult {
        u,
        grad: vec![f64::NAN; n],
        grad_norm: f64::NAN,
        iterations: it,
        status: NewtonStatus::Failed(e.to_string()),
    };
    let mut g = match fd_gradient(f, &u, opts.grad_step, opts.grad_levels) {
        Ok(g) => g,
        Err(e) => return fail(u, 0, e),
    };
    let mut gn = norm(&g);
    let mut mu = 0.0;
    for it in 0..opts.max_iter {
        if gn < opts.tol {
            return NewtonResult {
                u,
                grad: g,
                grad_norm: gn,
                iterations: it,
                status: NewtonStatus::Converged,
            };
        }
        let h = match fd_hessian(f, &u, opts.grad_step, opts.grad_levels, opts.hess_step) {
            Ok(h) => h,
            Err(e) => return fail(u, it, e),
        };
        let gv = DVector::from_column_slice(&g);
        let hth = h.transpose() * &h;
        let rhs = -(h.transpose() * &gv);
        let scale = hth.diagonal().max().max(1e-300);
        let mut accepted = false;
        for _ in 0..40 {
            let a = &hth + DMatrix::identity(n, n) * mu;
            let step = match a.clone().cholesky() {
                Some(c) => c.solve(&rhs),
                None => {
                    mu = if mu == 0.0 { 1e-12 * scale } else { mu * 10.0 };
                    continue;
                }
            };
            let trial: Vec<f64> = u
                .iter()
                .zip(step.iter())
                .map(|(a, p)| (a + p).clamp(-opts.bound, opts.bound))
                .collect();
            if let Ok(gt) = fd_gradient(f, &trial, opts.grad_step, opts.grad_levels) {
                let gtn = norm(&gt);
                if gtn < gn {
                    u = trial;
                    g = gt;
                    gn = gtn;
                    mu *= 0.1;
                    if mu < 1e-14 * scale {
                        mu = 0.0;
                    }
                    accepted = true;
                    break;
                }
            }
            mu = if mu == 0.0 { 1e-10 * scale } else { mu * 10.0 };
        }
        if !accepted {
            // the gradient floor is relative to |f|
            let floor = f(&u)
                .map(|v| opts.tol * v.abs().max(1.0))
                .unwrap_or(opts.tol);
            let status = if gn < floor {
                NewtonStatus::Converged
            } else {
                NewtonStatus::Stalled
            };
            return NewtonResult {
                u,
                grad: g,
                grad_norm: gn,
                iterations: it + 1,
                status,
            };
        }
        if u.iter().any(|x| x.abs() >= opts.bound) {
            return NewtonResult {
                u,
                grad: g,
                grad_norm: gn,
                iterations: it + 1,
                status: NewtonStatus::Escaped,
            };
        }
    }
    let status = if gn < opts.tol {
        NewtonStatus::Converged
    } else {
        NewtonStatus::MaxIterations
    };
    NewtonResult {
        u,
        grad: g,
        grad_norm: gn,
        iterations: opts.max_iter,
        status,
    }
}
