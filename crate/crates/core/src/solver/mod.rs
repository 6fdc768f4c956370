//! Critical points of the normalized functionals within homogeneous
//! ansatz families.

mod newton;
mod sweep;

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::euler_lagrange;
use crate::functionals::{self, FunctionalParams};
use crate::geometry::{curvature_of, riemann_of, GeometrySpec};
use crate::rng::trial_rng;
use crate::tensor::{min_sectional, CurvaturePoint, SectionalFlag, SectionalStrategy};

pub use newton::{
    fd_gradient, fd_hessian, newton, richardson_directional, NewtonOptions, NewtonResult,
    NewtonStatus,
};
pub use sweep::{sweep, t_grid, BranchEvent, SweepResult, SweepRow};

/// Finite-dimensional families of left-invariant metrics on SU(2), with the
/// overall scale fixed by pinning the first diagonal entry to 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// `diag(x, 1, 1)`.
    Berger,
    /// `diag(1, x₂, x₃)`.
    DiagonalSu2,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Berger => "berger",
            Family::DiagonalSu2 => "diagonal-su2",
        }
    }

    pub fn dim_params(self) -> usize {
        match self {
            Family::Berger => 1,
            Family::DiagonalSu2 => 2,
        }
    }

    pub fn param_names(self) -> &'static [&'static str] {
        match self {
            Family::Berger => &["x"],
            Family::DiagonalSu2 => &["x2", "x3"],
        }
    }

    /// Diagonal of the metric in the Lie algebra basis.
    pub fn diagonal(self, params: &[f64]) -> Result<[f64; 3]> {
        if params.len() != self.dim_params() {
            return Err(Error::DimensionMismatch {
                expected: self.dim_params(),
                got: params.len(),
            });
        }
        if let Some(p) = params.iter().find(|p| !(p.is_finite() && **p > 0.0)) {
            return Err(Error::InvalidParameter(format!(
                "{} parameters must be positive, got {p}",
                self.name()
            )));
        }
        Ok(match self {
            Family::Berger => [params[0], 1.0, 1.0],
            Family::DiagonalSu2 => [1.0, params[0], params[1]],
        })
    }

    pub fn embed(self, params: &[f64]) -> Result<GeometrySpec> {
        let d = self.diagonal(params)?;
        Ok(match self {
            Family::Berger => GeometrySpec::berger(d[0]),
            Family::DiagonalSu2 => GeometrySpec::diagonal_su2(d),
        })
    }

    /// Canonical representative modulo scale and coordinate permutations
    /// (the latter only for the diagonal family).
    pub fn canonical_key(self, params: &[f64]) -> Result<[f64; 3]> {
        let d = self.diagonal(params)?;
        let g = (d[0] * d[1] * d[2]).cbrt();
        let mut k = d.map(|x| x / g);
        if self == Family::DiagonalSu2 {
            k.sort_by(f64::total_cmp);
        }
        Ok(k)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "berger" => Ok(Family::Berger),
            "diagonal-su2" | "diagonal_su2" => Ok(Family::DiagonalSu2),
            _ => Err(Error::InvalidParameter(format!(
                "unknown family '{s}' (expected 'berger' or 'diagonal-su2')"
            ))),
        }
    }
}

/// Normalized functional `V^{(4-n)/n} F(g)` along the family.
pub fn reduced_value(family: Family, params: &[f64], p: FunctionalParams) -> Result<f64> {
    let spec = family.embed(params)?;
    let (rm, vol) = riemann_of(&spec)?;
    let v = vol.require(&spec)?;
    let cp = CurvaturePoint::from_riemann(rm)?;
    let n = cp.n as f64;
    Ok(functionals::density(&cp, p) * v.powf(4.0 / n))
}

fn reduced_log(family: Family, u: &[f64], p: FunctionalParams) -> Result<f64> {
    let params: Vec<f64> = u.iter().map(|x| x.exp()).collect();
    reduced_value(family, &params, p)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolveConfig {
    /// Number of generated starts.
    pub starts: usize,
    /// Start box for each parameter, `[lo, hi]`, sampled log-uniformly.
    pub start_box: [f64; 2],
    /// Try the symmetric point (all parameters 1) first.
    pub symmetric_start: bool,
    /// Explicit extra starts (family parameters), tried first.
    pub extra_starts: Vec<Vec<f64>>,
    /// Tolerance on the finite-difference gradient norm.
    pub tol: f64,
    pub max_iter: usize,
    /// Base step of the Richardson gradient in log coordinates.
    pub fd_step: f64,
    /// Richardson levels of the gradient.
    pub fd_levels: usize,
    pub hessian_step: f64,
    /// Bound on `|log parameter|`.
    pub log_bound: f64,
    pub dedup_tol: f64,
    /// Full Euler-Lagrange residual needed to accept a converged point.
    pub accept_residual: f64,
    /// Residual above which a converged point signals a reduction bug.
    pub mismatch_residual: f64,
    /// `|E|` below which a point is reported as Einstein.
    pub einstein_tol: f64,
    /// Sectional curvature below which a point counts as negatively curved.
    pub sectional_tol: f64,
    pub seed: u64,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            starts: 32,
            start_box: [0.01, 100.0],
            symmetric_start: true,
            extra_starts: Vec::new(),
            tol: 1e-10,
            max_iter: 200,
            fd_step: 0.1,
            fd_levels: 4,
            hessian_step: 1e-4,
            log_bound: 12.0,
            dedup_tol: 1e-6,
            accept_residual: 1e-8,
            mismatch_residual: 1e-6,
            einstein_tol: 1e-8,
            sectional_tol: 1e-8,
            seed: 0,
        }
    }
}

impl SolveConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidParameter(format!("solver config: {what}")));
        if !(self.start_box[0] > 0.0 && self.start_box[1] > self.start_box[0]) {
            return bad("start_box must satisfy 0 < lo < hi");
        }
        if self.starts == 0 && !self.symmetric_start && self.extra_starts.is_empty() {
            return bad("no start points");
        }
        for (name, v) in [
            ("tol", self.tol),
            ("fd_step", self.fd_step),
            ("hessian_step", self.hessian_step),
            ("log_bound", self.log_bound),
            ("dedup_tol", self.dedup_tol),
            ("accept_residual", self.accept_residual),
            ("mismatch_residual", self.mismatch_residual),
            ("einstein_tol", self.einstein_tol),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return bad(&format!("{name} must be positive"));
            }
        }
        if !(1..=8).contains(&self.fd_levels) {
            return bad("fd_levels must be between 1 and 8");
        }
        if self.max_iter == 0 {
            return bad("max_iter must be at least 1");
        }
        Ok(())
    }

    fn newton_options(&self) -> NewtonOptions {
        NewtonOptions {
            tol: self.tol,
            max_iter: self.max_iter,
            grad_step: self.fd_step,
            grad_levels: self.fd_levels,
            hess_step: self.hessian_step,
            bound: self.log_bound,
        }
    }
}

/// Start points in log coordinates: the symmetric point if enabled, explicit extras,
/// then the generated starts.
pub fn start_points(family: Family, config: &SolveConfig) -> Vec<Vec<f64>> {
    let d = family.dim_params();
    let (lo, hi) = (config.start_box[0].ln(), config.start_box[1].ln());
    let mut out = Vec::new();
    if config.symmetric_start {
        out.push(vec![0.0; d]);
    }
    for s in &config.extra_starts {
        if s.len() == d && s.iter().all(|x| *x > 0.0) {
            out.push(s.iter().map(|x| x.ln()).collect());
        }
    }
    match family {
        Family::Berger => {
            let k = config.starts.max(2);
            for i in 0..config.starts {
                out.push(vec![lo + (hi - lo) * i as f64 / (k - 1) as f64]);
            }
        }
        Family::DiagonalSu2 => {
            for i in 0..config.starts {
                let mut rng = trial_rng(config.seed, "solver-starts", i as u64);
                out.push((0..d).map(|_| rng.random_range(lo..hi)).collect());
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriticalPoint {
    pub family: Family,
    /// Family parameters with the gauge `x₁ = 1` of the family.
    pub params: Vec<f64>,
    pub t: f64,
    pub s: f64,
    /// Quantities below refer to the unit-volume representative.
    pub residual_tensor_norm: f64,
    pub residual_scalar: f64,
    pub residual_grad_norm: f64,
    pub is_einstein: bool,
    pub min_sectional: f64,
    pub sectional_flag: SectionalFlag,
    pub e_norm_sq: f64,
    pub r: f64,
    pub normalized_value: f64,
    pub lagrange_c: f64,
    pub classification: String,
    pub start_index: usize,
    pub iterations: usize,
}

impl CriticalPoint {
    pub fn spec(&self) -> Result<GeometrySpec> {
        self.family.embed(&self.params)
    }

    /// The same metric scaled to unit volume.
    pub fn unit_volume_spec(&self) -> Result<GeometrySpec> {
        unit_volume(&self.spec()?)
    }
}

pub fn unit_volume(spec: &GeometrySpec) -> Result<GeometrySpec> {
    let v = crate::geometry::volume_of(spec)?.require(spec)?;
    spec.scaled(v.powf(-2.0 / spec.dim() as f64))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StartDiagnostic {
    pub start_index: usize,
    pub start: Vec<f64>,
    pub status: String,
    pub grad_norm: f64,
    pub iterations: usize,
    pub residual: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveOutcome {
    pub points: Vec<CriticalPoint>,
    pub diagnostics: Vec<StartDiagnostic>,
}

pub fn classify(is_einstein: bool, min_sectional: f64, sectional_tol: f64) -> &'static str {
    if is_einstein {
        "einstein"
    } else if min_sectional >= -sectional_tol {
        "non_einstein_nonneg_sectional"
    } else {
        "non_einstein_negative_sectional"
    }
}

/// Evaluates the full Euler-Lagrange data at a family point.
pub fn assess(
    family: Family,
    params: &[f64],
    p: FunctionalParams,
    config: &SolveConfig,
) -> Result<CriticalPoint> {
    let unit = unit_volume(&family.embed(params)?)?;
    let hc = curvature_of(&unit)?;
    let value = functionals::eval(&hc, p)?;
    let res = euler_lagrange::constrained_residual_fts(&hc, p, Some(value.lambda))?;
    let ms = min_sectional(&hc.cp.rm, SectionalStrategy::Auto);
    let e_norm_sq = hc.cp.e_norm_sq();
    let is_einstein = e_norm_sq.sqrt() < config.einstein_tol;
    Ok(CriticalPoint {
        family,
        params: params.to_vec(),
        t: p.t,
        s: p.s,
        residual_tensor_norm: res.tensor_norm(),
        residual_scalar: res.scalar.unwrap_or(f64::NAN),
        residual_grad_norm: f64::NAN,
        is_einstein,
        min_sectional: ms.value,
        sectional_flag: ms.flag,
        e_norm_sq,
        r: hc.cp.r,
        normalized_value: value.normalized,
        lagrange_c: res.lagrange_c,
        classification: classify(is_einstein, ms.value, config.sectional_tol).to_string(),
        start_index: 0,
        iterations: 0,
    })
}

enum StartResult {
    Accepted(CriticalPoint),
    Rejected(StartDiagnostic),
}

fn run_start(
    family: Family,
    p: FunctionalParams,
    config: &SolveConfig,
    index: usize,
    u0: &[f64],
) -> Result<StartResult> {
    let f = |u: &[f64]| reduced_log(family, u, p);
    let r = newton(&f, u0, &config.newton_options());
    let start: Vec<f64> = u0.iter().map(|x| x.exp()).collect();
    let diag = |status: String, residual| StartDiagnostic {
        start_index: index,
        start: start.clone(),
        status,
        grad_norm: r.grad_norm,
        iterations: r.iterations,
        residual,
    };
    if r.status != NewtonStatus::Converged {
        let status = match &r.status {
            NewtonStatus::Failed(m) => format!("failed: {m}"),
            s => format!("{s:?}").to_lowercase(),
        };
        return Ok(StartResult::Rejected(diag(status, None)));
    }
    let params: Vec<f64> = r.u.iter().map(|x| x.exp()).collect();
    let mut cp = assess(family, &params, p, config)?;
    if cp.residual_tensor_norm > config.mismatch_residual {
        return Err(Error::ReductionMismatch {
            params,
            residual: cp.residual_tensor_norm,
        });
    }
    if cp.residual_tensor_norm >= config.accept_residual {
        return Ok(StartResult::Rejected(diag(
            "residual_above_acceptance".into(),
            Some(cp.residual_tensor_norm),
        )));
    }
    cp.residual_grad_norm = r.grad_norm;
    cp.start_index = index;
    cp.iterations = r.iterations;
    Ok(StartResult::Accepted(cp))
}

fn same_point(family: Family, a: &[f64], b: &[f64], tol: f64) -> bool {
    match (family.canonical_key(a), family.canonical_key(b)) {
        (Ok(ka), Ok(kb)) => ka.iter().zip(&kb).all(|(x, y)| (x - y).abs() < tol),
        _ => false,
    }
}

/// Multi-start search for critical points with the given log-coordinate
/// starts. Results are ordered by start index.
pub fn solve_from(
    family: Family,
    p: FunctionalParams,
    config: &SolveConfig,
    starts: &[Vec<f64>],
) -> Result<SolveOutcome> {
    config.validate()?;
    let results: Vec<Result<StartResult>> = starts
        .par_iter()
        .enumerate()
        .map(|(i, u0)| run_start(family, p, config, i, u0))
        .collect();
    let mut points: Vec<CriticalPoint> = Vec::new();
    let mut diagnostics = Vec::new();
    for r in results {
        match r? {
            StartResult::Accepted(cp) => {
                if let Some(prev) = points
                    .iter_mut()
                    .find(|q| same_point(family, &q.params, &cp.params, config.dedup_tol))
                {
                    // keep the better-converged representative
                    if cp.residual_tensor_norm < prev.residual_tensor_norm {
                        let idx = prev.start_index;
                        *prev = CriticalPoint {
                            start_index: idx,
                            ..cp
                        };
                    }
                } else {
                    points.push(cp);
                }
            }
            StartResult::Rejected(d) => diagnostics.push(d),
        }
    }
    Ok(SolveOutcome {
        points,
        diagnostics,
    })
}

pub fn solve(family: Family, p: FunctionalParams, config: &SolveConfig) -> Result<SolveOutcome> {
    solve_from(family, p, config, &start_points(family, config))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn berger_closed_form(x: f64, t: f64) -> f64 {
        (2.0 * PI * PI).powf(4.0 / 3.0)
            * x.powf(2.0 / 3.0)
            * ((12.0 + 4.0 * t) * x * x - (32.0 + 32.0 * t) * x + (32.0 + 64.0 * t))
    }

    #[test]
    fn reduced_value_matches_closed_form() {
        for &x in &[0.2, 1.0, 1.7, 5.0] {
            for &t in &[-0.4, 0.0, 0.8] {
                let v = reduced_value(Family::Berger, &[x], FunctionalParams::ft(t)).unwrap();
                let w = berger_closed_form(x, t);
                assert!((v - w).abs() < 1e-11 * w.abs().max(1.0), "x={x} t={t}");
            }
        }
        let v = reduced_value(Family::Berger, &[1.0], FunctionalParams::ft(-1.0 / 3.0)).unwrap();
        assert!(v.abs() < 1e-11);
    }

    #[test]
    fn reduced_value_is_scale_free() {
        let p = FunctionalParams::new(0.3, 0.1).unwrap();
        let a = reduced_value(Family::DiagonalSu2, &[2.0, 0.5], p).unwrap();
        let spec = GeometrySpec::diagonal_su2([3.0, 6.0, 1.5]);
        let hc = curvature_of(&spec).unwrap();
        let b = functionals::eval(&hc, p).unwrap().normalized;
        assert!((a - b).abs() < 1e-10 * a.abs());
        assert!(reduced_value(Family::Berger, &[-1.0], p).is_err());
    }

    #[test]
    fn canonical_key_collapses_permutations() {
        let f = Family::DiagonalSu2;
        // diag(1,2,2) ~ diag(2,1,2)/2 = diag(1, 1/2, 1)
        assert!(same_point(f, &[2.0, 2.0], &[0.5, 1.0], 1e-12));
        assert!(!same_point(f, &[2.0, 2.0], &[2.0, 3.0], 1e-6));
    }

    #[test]
    fn berger_quarter_has_two_points() {
        let out = solve(
            Family::Berger,
            FunctionalParams::ft(-0.25),
            &SolveConfig::default(),
        )
        .unwrap();
        assert_eq!(out.points.len(), 2, "{:?}", out.points);
        let round = out.points.iter().find(|c| c.is_einstein).unwrap();
        assert!(round.residual_tensor_norm < 1e-12);
        let other = out.points.iter().find(|c| !c.is_einstein).unwrap();
        assert!((other.params[0] - 4.0 / 11.0).abs() < 1e-8);
        assert!(other.e_norm_sq.sqrt() > 1e-3);
    }

    #[test]
    fn berger_t_zero_branch_is_nonnegatively_curved() {
        let out = solve(
            Family::Berger,
            FunctionalParams::ft(0.0),
            &SolveConfig::default(),
        )
        .unwrap();
        let other = out.points.iter().find(|c| !c.is_einstein).unwrap();
        assert!((other.params[0] - 2.0 / 3.0).abs() < 1e-8);
        assert!(other.min_sectional >= -1e-8);
        assert_eq!(other.classification, "non_einstein_nonneg_sectional");
    }
}
