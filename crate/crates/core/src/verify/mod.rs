//! Verification suites: seeded property checks over every identity,
//! inequality and classification instance the library implements.
//!
//! Each suite returns a [`SuiteOutcome`]; trials run in parallel and are
//! tallied in index order, so outcomes depend only on the seed.

pub mod gen;

use std::f64::consts::PI;

use rayon::prelude::*;
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::euler_lagrange::{
    constrained_residual_ft, constrained_residual_fts, cotton, identity_gaps, weitzenbock_gap_fts,
};
use crate::functionals::{self, gauss_bonnet_check, sigma2_functional, FunctionalParams};
use crate::geometry::lie::{
    curvature_from_connection, koszul_connection, orthonormal_frame, StructureConstants,
};
use crate::geometry::{curvature_of, GeometrySpec, HomogeneousCurvature};
use crate::report::SuiteOutcome;
use crate::rigidity::{
    classify_f_half, cubic_bound_gap, f_half_quadratic, f_half_spectrum, pinching_lemma_constant,
    pinching_margin, prop_est2_gap, prop_est2_lhs, prop_est_gap, FHalfClass, SpectralData,
};
use crate::rng::trial_rng;
use crate::solver::{
    richardson_directional, solve, sweep, t_grid, CriticalPoint, Family, SolveConfig,
};
use crate::tensor::{
    kulkarni_nomizu, reconstruct_riemann, ricci_contract, rm_square, schouten_sigma2, weyl_part,
    CurvaturePoint, Riem4, Sym2,
};
use crate::tol::{self, Tolerances};

type SuiteFn = fn(u64) -> SuiteOutcome;

/// Suite names in the order `all` runs them.
pub const SUITES: &[(&str, SuiteFn)] = &[
    ("decomposition", decomposition),
    ("schouten", schouten),
    ("kulkarni-nomizu", kn_product),
    ("geometry-two-path", geometry_two_path),
    ("bianchi", bianchi),
    ("gauss-bonnet", gauss_bonnet),
    ("einstein-criticality", einstein_criticality),
    ("product-criticality", product_criticality),
    ("prop-est", prop_est),
    ("prop-est2", prop_est2),
    ("cubic-bound", cubic_bound),
    ("pinching", pinching),
    ("f-half-spectrum", f_half),
    ("cotton-identity", cotton_identity),
    ("weitzenbock", weitzenbock),
    ("gradient-check", gradient_check),
    ("scale-invariance", scale_invariance),
    ("berger-landscape", berger_landscape),
    ("t-main", t_main),
];

pub fn suite_names() -> Vec<&'static str> {
    SUITES.iter().map(|(n, _)| *n).collect()
}

/// Runs one suite by name, or every suite for `all`.
pub fn run(name: &str, seed: u64) -> Result<Vec<SuiteOutcome>> {
    if name == "all" {
        return Ok(SUITES.iter().map(|(_, f)| f(seed)).collect());
    }
    SUITES
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, f)| vec![f(seed)])
        .ok_or_else(|| {
            Error::InvalidParameter(format!(
                "unknown suite `{name}`, expected `all` or one of {}",
                suite_names().join(", ")
            ))
        })
}

/// Running record of one suite.
struct Tally {
    name: &'static str,
    trials: usize,
    violations: usize,
    max_violation: f64,
    worst_ratio: f64,
    worst: Value,
    counterexample: Option<Value>,
    details: Map<String, Value>,
}

impl Tally {
    fn new(name: &'static str) -> Self {
        Tally {
            name,
            trials: 0,
            violations: 0,
            max_violation: 0.0,
            worst_ratio: f64::NEG_INFINITY,
            worst: Value::Null,
            counterexample: None,
            details: Map::new(),
        }
    }

    fn fail(&mut self, record: Value, amount: f64) {
        self.violations += 1;
        self.max_violation = self.max_violation.max(if amount.is_nan() {
            f64::INFINITY
        } else {
            amount
        });
        if self.counterexample.is_none() {
            self.counterexample = Some(record);
        }
    }

    /// Passes when `observed ≤ tol`.
    fn at_most(&mut self, case: Value, observed: f64, tol: f64) {
        self.trials += 1;
        let record = json!({"case": case, "observed": observed, "at_most": tol});
        let ratio = if tol > 0.0 { observed / tol } else { observed };
        if ratio > self.worst_ratio || ratio.is_nan() {
            self.worst_ratio = if ratio.is_nan() { f64::INFINITY } else { ratio };
            self.worst = record.clone();
        }
        if !(observed <= tol) {
            self.fail(record, observed - tol);
        }
    }

    /// Passes when `observed > bound`.
    fn above(&mut self, case: Value, observed: f64, bound: f64) {
        self.trials += 1;
        if !(observed > bound) {
            self.fail(
                json!({"case": case, "observed": observed, "above": bound}),
                bound - observed,
            );
        }
    }

    fn holds(&mut self, case: Value, ok: bool) {
        self.trials += 1;
        if !ok {
            self.fail(json!({"case": case, "holds": false}), 1.0);
        }
    }

    fn error(&mut self, case: Value, e: &Error) {
        self.trials += 1;
        self.fail(json!({"case": case, "error": e.to_string()}), f64::INFINITY);
    }

    fn detail(&mut self, key: &str, v: Value) {
        self.details.insert(key.into(), v);
    }

    fn finish(mut self) -> SuiteOutcome {
        if !self.worst.is_null() {
            self.details.insert("worst".into(), self.worst);
        }
        SuiteOutcome {
            name: self.name.into(),
            passed: self.violations == 0,
            trials: self.trials,
            violations: self.violations,
            max_violation: self.max_violation,
            counterexample: self.counterexample,
            details: Value::Object(self.details),
        }
    }
}

/// One check produced by a parallel trial.
enum Obs {
    AtMost(Value, f64, f64),
    Holds(Value, bool),
    Err(Value, String),
}

impl Tally {
    fn absorb(&mut self, obs: Vec<Obs>) {
        for o in obs {
            match o {
                Obs::AtMost(c, v, t) => self.at_most(c, v, t),
                Obs::Holds(c, ok) => self.holds(c, ok),
                Obs::Err(c, e) => {
                    self.trials += 1;
                    self.fail(json!({"case": c, "error": e}), f64::INFINITY);
                }
            }
        }
    }
}

/// Runs `count` trials in parallel with per-trial generators.
fn trials(
    tally: &mut Tally,
    seed: u64,
    count: usize,
    f: impl Fn(usize, &mut rand_chacha::ChaCha8Rng) -> Result<Vec<Obs>> + Sync,
) {
    let stream = tally.name;
    let results: Vec<Vec<Obs>> = (0..count)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(seed, stream, i as u64);
            f(i, &mut rng).unwrap_or_else(|e| vec![Obs::Err(json!({"trial": i}), e.to_string())])
        })
        .collect();
    for r in results {
        tally.absorb(r);
    }
}

fn scaled(tol: f64, magnitude: f64) -> f64 {
    tol * tol::scale(magnitude)
}

fn hc_of(spec: &GeometrySpec) -> Result<HomogeneousCurvature> {
    curvature_of(spec)
}

fn rows(s: &Sym2) -> Value {
    json!(s.rows())
}

fn round_sphere_rm(n: usize) -> Riem4 {
    let d = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
    Riem4::from_fn_raw(n, |i, j, k, l| d(i, k) * d(j, l) - d(i, l) * d(j, k))
}

fn decomposition(seed: u64) -> SuiteOutcome {
    let mut t = Tally::new("decomposition");
    trials(&mut t, seed, 500, |i, rng| {
        let n = 3 + i % 4;
        let w = gen::weyl(rng, n)?;
        let ric = gen::sym2(rng, n, 1.0);
        let r = ric.trace();
        let case = json!({"trial": i, "n": n});
        let rm = reconstruct_riemann(&w, &ric, r)?;
        let mag = rm.max_abs();
        let (ric2, r2) = ricci_contract(&rm);
        let w2 = weyl_part(&rm, &ric2, r2)?;
        let cp = CurvaturePoint::from_riemann(rm.clone())?;
        let sigma_sum: f64 = cp.sectionals.iter().flatten().sum();
        let mut out = vec![
            Obs::AtMost(
                json!({"check": "symmetries", "case": case}),
                rm.symmetry_report().max(),
                scaled(tol::CONSTRUCTION, mag),
            ),
            Obs::AtMost(
                json!({"check": "ricci roundtrip", "case": case}),
                (&ric2 - &ric).max_abs().max((r2 - r).abs()),
                scaled(tol::CONSTRUCTION, mag),
            ),
            Obs::AtMost(
                json!({"check": "weyl roundtrip", "case": case}),
                w2.max_abs_diff(&w),
                scaled(tol::CONSTRUCTION, mag),
            ),
            Obs::AtMost(
                json!({"check": "norm expansion", "case": case}),
                (cp.rm_norm_sq() - cp.rm_norm_sq_from_decomposition()).abs()
                    / tol::scale(cp.rm_norm_sq()),
                tol::IDENTITY_REL,
            ),
            Obs::AtMost(
                json!({"check": "R = sum of sectionals", "case": case}),
                (sigma_sum - cp.r).abs(),
                scaled(tol::CONSTRUCTION, cp.r),
            ),
            Obs::AtMost(
                json!({"check": "tr E", "case": case}),
                cp.e.trace().abs(),
                scaled(tol::CONSTRUCTION, cp.e.max_abs()),
            ),
            Obs::AtMost(
                json!({"check": "W trace", "case": case}),
                cp.w.max_trace(),
                scaled(tol::CONSTRUCTION, mag),
            ),
        ];
        if n == 3 {
            out.push(Obs::AtMost(
                json!({"check": "W = 0 in dimension 3", "case": case}),
                cp.w.max_abs(),
                scaled(tol::CONSTRUCTION, mag),
            ));
        }
        Ok(out)
    });

    // round-sphere oracle
    let n = 4;
    match reconstruct_riemann(&Riem4::zeros(n), &Sym2::identity(n).scale(3.0), 12.0) {
        Ok(rm) => t.at_most(
            json!("reconstruct round S4"),
            rm.max_abs_diff(&round_sphere_rm(n)),
            tol::CONSTRUCTION,
        ),
        Err(e) => t.error(json!("reconstruct round S4"), &e),
    }
    match reconstruct_riemann(&Riem4::zeros(3), &Sym2::zeros(3), 0.0) {
        Ok(rm) => t.at_most(json!("flat"), rm.max_abs(), 0.0),
        Err(e) => t.error(json!("flat"), &e),
    }
    match hc_of(&GeometrySpec::round_sphere(4, 1.0)) {
        Ok(h) => t.at_most(json!("W of round S4"), h.cp.w.max_abs(), tol::CONSTRUCTION),
        Err(e) => t.error(json!("W of round S4"), &e),
    }
    match hc_of(&GeometrySpec::product(1.0, 1.0)) {
        Ok(h) => {
            let cp = &h.cp;
            let nf = 4.0;
            let expansion = cp.rm_norm_sq() - 4.0 / (nf - 2.0) * cp.ric_norm_sq()
                + 2.0 / ((nf - 1.0) * (nf - 2.0)) * cp.r * cp.r;
            t.above(json!("|W|^2 of S2xS2"), cp.w_norm_sq(), 0.0);
            t.at_most(
                json!("|W|^2 expansion on S2xS2"),
                (expansion - cp.w_norm_sq()).abs() / tol::scale(cp.w_norm_sq()),
                tol::IDENTITY_REL,
            );
            t.detail("s2xs2_w_norm_sq", json!(cp.w_norm_sq()));
        }
        Err(e) => t.error(json!("S2xS2"), &e),
    }
    t.finish()
}

fn schouten(seed: u64) -> SuiteOutcome {
    let mut t = Tally::new("schouten");
    trials(&mut t, seed, 500, |i, rng| {
        let n = 3 + i % 4;
        let ric = gen::sym2(rng, n, 1.0);
        let r = ric.trace();
        let (_, s2) = schouten_sigma2(&ric, r)?;
        let nf = n as f64;
        let lhs = ric.norm_sq() - nf / (4.0 * (nf - 1.0)) * r * r;
        let rhs = -2.0 * (nf - 2.0).powi(2) * s2;
        Ok(vec![Obs::AtMost(
            json!({"trial": i, "n": n, "ric": rows(&ric)}),
            (lhs - rhs).abs() / tol::scale(ric.norm_sq() + r * r),
            tol::CONSTRUCTION,
        )])
    });
    match schouten_sigma2(&Sym2::identity(3).scale(2.0), 6.0) {
        Ok((_, s2)) => {
            // |Ric|² - (3/8) R² = 12 - 13.5 = -2 σ₂
            t.at_most(json!("unit S3"), (s2 - 0.75).abs(), tol::CONSTRUCTION);
        }
        Err(e) => t.error(json!("unit S3"), &e),
    }
    match schouten_sigma2(&Sym2::zeros(4), 0.0) {
        Ok((a, s2)) => t.at_most(json!("flat"), a.max_abs().max(s2.abs()), 0.0),
        Err(e) => t.error(json!("flat"), &e),
    }
    // σ₂ functional against the F_t value at t = -n/(4(n-1))
    let specs = [
        GeometrySpec::round_sphere(3, 1.0),
        GeometrySpec::round_sphere(6, 0.7),
        GeometrySpec::product(2.0, 0.5),
        GeometrySpec::sphere_flat(5, 1.0, Some(vec![1.0, 2.0, 0.5])),
        GeometrySpec::berger(0.4),
    ];
    for spec in specs {
        let case = json!({"spec": crate::report::to_value(&spec)});
        let res = hc_of(&spec).and_then(|h| {
            let n = h.dim();
            let s = sigma2_functional(&h)?;
            let f =
                functionals::eval(&h, FunctionalParams::ft(FunctionalParams::schouten_t(n)))?.total;
            Ok((s, f))
        });
        match res {
            Ok((s, f)) => t.at_most(case, (s - f).abs() / tol::scale(f), tol::IDENTITY_REL),
            Err(e) => t.error(case, &e),
        }
    }
    t.finish()
}

fn kn_product(seed: u64) -> SuiteOutcome {
    let mut t = Tally::new("kulkarni-nomizu");
    let d = Sym2::identity(3);
    match kulkarni_nomizu(&d, &d) {
        Ok(p) => {
            t.at_most(
                json!("(δ∧δ)_1212 = 2"),
                (p.get(0, 1, 0, 1) - 2.0).abs(),
                0.0,
            );
            t.at_most(
                json!("(δ∧δ)_1221 = -2"),
                (p.get(0, 1, 1, 0) + 2.0).abs(),
                0.0,
            );
            t.at_most(json!("(δ∧δ)_1213 = 0"), p.get(0, 1, 0, 2).abs(), 0.0);
        }
        Err(e) => t.error(json!("δ∧δ"), &e),
    }
    trials(&mut t, seed, 100, |i, rng| {
        let n = 3 + i % 6;
        let s = gen::sym2(rng, n, 1.0);
        let u = gen::sym2(rng, n, 1.0);
        let a = kulkarni_nomizu(&s, &u)?;
        let b = kulkarni_nomizu(&u, &s)?;
        let case = json!({"trial": i, "n": n});
        Ok(vec![
            Obs::AtMost(
                json!({"check": "commutes", "case": case}),
                a.max_abs_diff(&b),
                tol::CONSTRUCTION,
            ),
            Obs::AtMost(
                json!({"check": "symmetries", "case": case}),
                a.symmetry_report().max(),
                scaled(tol::CONSTRUCTION, a.max_abs()),
            ),
        ])
    });
    // the catalog's round sphere must have positive curvature
    match hc_of(&GeometrySpec::round_sphere(3, 1.0)) {
        Ok(h) => t.at_most(
            json!("unit S3 sectional = 1"),
            (h.cp.rm.sectional(0, 1) - 1.0).abs(),
            tol::CONSTRUCTION,
        ),
        Err(e) => t.error(json!("unit S3"), &e),
    }
    t.finish()
}

/// Unimodular three-dimensional algebra `[u, v] = L(u × v)`, `L` symmetric.
fn milnor_constants(l: &Sym2) -> StructureConstants {
    let eps = |i: usize, j: usize, m: usize| -> f64 {
        match (i, j, m) {
            (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
            (1, 0, 2) | (2, 1, 0) | (0, 2, 1) => -1.0,
            _ => 0.0,
        }
    };
    StructureConstants::from_fn(3, |i, j, k| {
        (0..3).map(|m| eps(i, j, m) * l.get(m, k)).sum()
    })
}

fn metric_sym2(q: &[[f64; 3]; 3]) -> Sym2 {
    Sym2::from_fn(3, |i, j| q[i][j])
}

fn geometry_two_path(seed: u64) -> SuiteOutcome {
    let mut t = Tally::new("geometry-two-path");
    for r in [0.5, 1.0, 2.0] {
        let q = r * r;
        let case = json!({"radius": r});
        let res = hc_of(&GeometrySpec::round_sphere(3, r)).and_then(|a| {
            let b = hc_of(&GeometrySpec::su2([
                [q, 0.0, 0.0],
                [0.0, q, 0.0],
                [0.0, 0.0, q],
            ]))?;
            Ok((a, b))
        });
        match res {
            Ok((a, b)) => {
                t.at_most(
                    json!({"check": "curvature", "case": case}),
                    a.cp.rm.max_abs_diff(&b.cp.rm),
                    1e-10,
                );
                let (va, vb) = (
                    a.volume.finite().unwrap_or(f64::NAN),
                    b.volume.finite().unwrap_or(f64::NAN),
                );
                t.at_most(
                    json!({"check": "volume", "case": case}),
                    (va - vb).abs() / va,
                    1e-12,
                );
            }
            Err(e) => t.error(case, &e),
        }
    }
    let limit = (|| -> Result<(f64, f64)> {
        let round = hc_of(&GeometrySpec::round_sphere(3, 1.0))?;
        let at_one = hc_of(&GeometrySpec::berger(1.0))?;
        let mut near: f64 = 0.0;
        for x in [1.0 - 1e-4, 1.0 + 1e-4] {
            near = near.max(
                hc_of(&GeometrySpec::berger(x))?
                    .cp
                    .rm
                    .max_abs_diff(&round.cp.rm),
            );
        }
        Ok((at_one.cp.rm.max_abs_diff(&round.cp.rm), near))
    })();
    match limit {
        Ok((exact, near)) => {
            t.at_most(json!("berger x = 1 equals round S3"), exact, 1e-12);
            t.at_most(json!("berger x = 1 ± 1e-4 close to round S3"), near, 1e-3);
        }
        Err(e) => t.error(json!("berger limit"), &e),
    }
    match koszul_connection(
        &StructureConstants::abelian(3),
        &metric_sym2(&[[2.0, 0.3, 0.0], [0.3, 1.0, 0.0], [0.0, 0.0, 0.5]]),
    ) {
        Ok((g, _)) => t.at_most(json!("abelian connection"), g.max_abs(), 0.0),
        Err(e) => t.error(json!("abelian"), &e),
    }
    trials(&mut t, seed, 200, |i, rng| {
        let q = gen::spd3(rng, 0.3, 3.0);
        let c = if i % 2 == 0 {
            StructureConstants::su2()
        } else {
            milnor_constants(&gen::sym2(rng, 3, 2.0))
        };
        let qs = metric_sym2(&q);
        let (gamma, cf) = koszul_connection(&c, &qs)?;
        let frame = orthonormal_frame(&c, &qs)?;
        let rm = curvature_from_connection(&gamma, &cf)?;
        let case = json!({"trial": i, "metric": q, "constants": c.to_array()});
        let mag = gamma.max_abs();
        Ok(vec![
            Obs::AtMost(
                json!({"check": "metric compatibility", "case": case}),
                gamma.compatibility_violation(),
                scaled(tol::CONSTRUCTION, mag),
            ),
            Obs::AtMost(
                json!({"check": "jacobi after orthonormalization", "case": case}),
                frame.constants.jacobi_violation(),
                scaled(tol::IDENTITY_REL, frame.constants.max_abs().powi(2)),
            ),
            Obs::AtMost(
                json!({"check": "curvature symmetries", "case": case}),
                rm.symmetry_report().max(),
                scaled(tol::CONSTRUCTION, rm.max_abs()),
            ),
        ])
    });
    t.finish()
}

fn bianchi(seed: u64) -> SuiteOutcome {
    let mut t = Tally::new("bianchi");
    trials(&mut t, seed, 200, |i, rng| {
        let q = gen::spd3(rng, 0.3, 3.0);
        let h = hc_of(&GeometrySpec::su2(q))?;
        let n = h.dim();
        let div = (0..n)
            .map(|j| (0..n).map(|k| h.nabla_e.get(k, k, j)).sum::<f64>().abs())
            .fold(0.0, f64::max);
        Ok(vec![Obs::AtMost(
            json!({"trial": i, "metric": q}),
            div,
            scaled(tol::IDENTITY_REL, h.nabla_e.max_abs()),
        )])
    });
    trials(&mut t, seed ^ 1, 20, |i, rng| {
        let a = gen::log_uniform(rng, 0.2, 5.0);
        let b = gen::log_uniform(rng, 0.2, 5.0);
        let h = hc_of(&GeometrySpec::product(a, b))?;
        let mut want = [1.0 / a, 1.0 / a, 1.0 / b, 1.0 / b];
        want.sort_by(f64::total_cmp);
        let got = h.cp.ricci_spectrum();
        let spec_err = got
            .iter()
            .zip(&want)
            .map(|(g, w)| (g - w).abs())
            .fold(0.0, f64::max);
        let n = 3 + i % 6;
        let flat = hc_of(&GeometrySpec::sphere_flat(n, a, None))?;
        let case = json!({"trial": i, "a": a, "b": b});
        Ok(vec![
            Obs::AtMost(
                json!({"check": "parallel Ricci on S2xS2", "case": case}),
                h.nabla_ric.max_abs(),
                tol::CONSTRUCTION,
            ),
            Obs::AtMost(
                json!({"check": "Ricci spectrum of S2xS2", "case": case}),
                spec_err,
                scaled(tol::CONSTRUCTION, 1.0 / a.min(b)),
            ),
            Obs::AtMost(
                json!({"check": "parallel Ricci on S2 x flat", "case": case, "n": n}),
                flat.nabla_ric.max_abs(),
                tol::CONSTRUCTION,
            ),
        ])
    });
    t.finish()
}

fn gauss_bonnet(_seed: u64) -> SuiteOutcome {
    let mut t = Tally::new("gauss-bonnet");
    match hc_of(&GeometrySpec::round_sphere(4, 1.0)).and_then(|h| gauss_bonnet_check(&h)) {
        Ok(gb) => {
            let want = 64.0 * PI * PI;
            t.at_most(
                json!("round S4 integral"),
                (gb.integral - want).abs() / want,
                1e-12,
            );
            t.at_most(
                json!("round S4 estimate"),
                (gb.euler_characteristic - 2.0).abs() / 2.0,
                1e-12,
            );
            t.detail("s4_estimate", json!(gb.euler_characteristic));
        }
        Err(e) => t.error(json!("round S4"), &e),
    }
    let mut estimates = Vec::new();
    for (a, b) in [(1.0, 1.0), (1.0, 2.0), (3.0, 0.5)] {
        let case = json!({"a": a, "b": b});
        match hc_of(&GeometrySpec::product(a, b)).and_then(|h| gauss_bonnet_check(&h)) {
            Ok(gb) => {
                t.at_most(case, (gb.euler_characteristic - 4.0).abs(), 1e-10);
                estimates.push(json!({"a": a, "b": b, "estimate": gb.euler_characteristic}));
            }
            Err(e) => t.error(case, &e),
        }
    }
    t.detail("s2xs2_estimates", Value::Array(estimates));
    // the flat torus block carries no Gauss-Bonnet integrand
    let flat = Riem4::zeros(4);
    match CurvaturePoint::from_riemann(flat) {
        Ok(cp) => {
            let integrand = cp.w_norm_sq() - 2.0 * cp.ric_norm_sq() + 2.0 / 3.0 * cp.r * cp.r;
            t.at_most(json!("flat integrand"), integrand.abs(), 0.0);
        }
        Err(e) => t.error(json!("flat"), &e),
    }
    t.finish()
}

fn einstein_criticality(_seed: u64) -> SuiteOutcome {
    let mut t = Tally::new("einstein-criticality");
    for n in 3..=6 {
        let h = match hc_of(&GeometrySpec::round_sphere(n, 1.0)) {
            Ok(h) => h,
            Err(e) => {
                t.error(json!({"n": n}), &e);
                continue;
            }
        };
        for tt in [-1.0, -0.5, -1.0 / 3.0, 0.0, 1.0] {
            for s in [0.0, 1.0] {
                let case = json!({"n": n, "t": tt, "s": s});
                match constrained_residual_fts(&h, FunctionalParams { t: tt, s }, None) {
                    Ok(r) => t.at_most(case, r.tensor_norm(), 1e-10),
                    Err(e) => t.error(case, &e),
                }
            }
            let a = constrained_residual_ft(&h, tt, None);
            let b = constrained_residual_fts(&h, FunctionalParams { t: tt, s: 0.0 }, None);
            if let (Ok(a), Ok(b)) = (a, b) {
                t.holds(
                    json!({"check": "s = 0 path identical", "n": n, "t": tt}),
                    a.tensor == b.tensor,
                );
            }
        }
    }
    let res = hc_of(&GeometrySpec::product(1.0, 1.0)).and_then(|h| {
        let iso = rm_square(&h.cp.rm).traceless().max_abs();
        let r = constrained_residual_fts(&h, FunctionalParams { t: 0.0, s: 1.0 }, None)?;
        Ok((iso, r.tensor_norm()))
    });
    match res {
        Ok((iso, res)) => {
            t.at_most(json!("S2xS2 Rm² isotropic"), iso, tol::CONSTRUCTION);
            t.at_most(
                json!("S2xS2 critical for t = 0, s = 1"),
                res,
                tol::CONSTRUCTION,
            );
        }
        Err(e) => t.error(json!("S2xS2"), &e),
    }
    t.finish()
}

/// Expected class of each `F_{-1/2}` critical instance.
fn f_half_instances() -> Vec<(GeometrySpec, FHalfClass, bool)> {
    vec![
        (
            GeometrySpec::sphere_flat(3, 1.0, None),
            FHalfClass::S2xFlat,
            true,
        ),
        (GeometrySpec::product(1.0, 1.0), FHalfClass::Einstein, false),
        (GeometrySpec::product(2.0, 1.0), FHalfClass::S2xS2, true),
        (GeometrySpec::product(5.0, 0.3), FHalfClass::S2xS2, true),
        (
            GeometrySpec::sphere_flat(5, 1.0, Some(vec![1.0, 1.0, 1.0])),
            FHalfClass::S2xFlat,
            true,
        ),
    ]
}

fn product_criticality(_seed: u64) -> SuiteOutcome {
    let mut t = Tally::new("product-criticality");
    let tols = Tolerances::default();
    let mut classes = Map::new();
    for (spec, want, off_critical) in f_half_instances() {
        let spec_v = crate::report::to_value(&spec);
        let h = match hc_of(&spec) {
            Ok(h) => h,
            Err(e) => {
                t.error(spec_v, &e);
                continue;
            }
        };
        match constrained_residual_ft(&h, -0.5, None) {
            Ok(r) => t.at_most(
                json!({"check": "critical at t = -1/2", "spec": spec_v}),
                r.tensor_norm(),
                1e-10,
            ),
            Err(e) => t.error(spec_v.clone(), &e),
        }
        if off_critical && matches!(spec, GeometrySpec::ProductSphereSphere { .. }) {
            for tt in [-0.6, -0.4] {
                match constrained_residual_ft(&h, tt, None) {
                    Ok(r) => t.above(
                        json!({"check": "not critical", "t": tt, "spec": spec_v}),
                        r.tensor_norm(),
                        1e-2,
                    ),
                    Err(e) => t.error(spec_v.clone(), &e),
                }
            }
        }
        // Ricci spectrum against the two roots of the eigenvalue quadratic
        let (r, e_sq, n) = (h.cp.r, h.cp.e_norm_sq(), h.dim());
        let spectrum = h.cp.ricci_spectrum();
        match f_half_spectrum(r, e_sq, n, 1) {
            Ok(roots) => {
                let tol_s = scaled(tols.classify_spectrum, r);
                let dist = spectrum
                    .iter()
                    .map(|mu| (mu - roots.mu_plus).abs().min((mu - roots.mu_minus).abs()))
                    .fold(0.0, f64::max);
                t.at_most(
                    json!({"check": "Ricci eigenvalues are roots", "spec": spec_v}),
                    dist,
                    tol_s,
                );
                let m = spectrum
                    .iter()
                    .filter(|mu| (*mu - roots.mu_plus).abs() <= tol_s)
                    .count();
                match f_half_spectrum(r, e_sq, n, m.max(1)) {
                    Ok(fs) if e_sq > 0.0 => t.at_most(
                        json!({"check": "multiplicity identity", "m": m, "spec": spec_v}),
                        fs.multiplicity_residual.abs(),
                        tol_s,
                    ),
                    Ok(_) => {}
                    Err(e) => t.error(spec_v.clone(), &e),
                }
            }
            Err(e) => t.error(spec_v.clone(), &e),
        }
        match classify_f_half(&h, &tols) {
            Ok(c) => {
                t.holds(json!({"check": "classification", "want": want.as_str(), "got": c.as_str(), "spec": spec_v}), c == want);
                classes.insert(
                    format!("{}:{}", spec.kind(), classes.len()),
                    json!(c.as_str()),
                );
            }
            Err(e) => t.error(spec_v, &e),
        }
    }
    t.detail("classes", Value::Object(classes));
    t.finish()
}

fn prop_est(seed: u64) -> SuiteOutcome {
    let mut t = Tally::new("prop-est");
    trials(&mut t, seed, 1000, |i, rng| {
        let n = 3 + i % 4;
        let sd = SpectralData::from_sectionals(gen::sectionals(rng, n, 1.0))?;
        let pe = prop_est_gap(&sd)?;
        let mag = sd.scalar().abs() * sd.lambdas.iter().map(|l| l * l).sum::<f64>();
        let lim = scaled(1e-12, mag);
        let case = json!({"trial": i, "lambdas": sd.lambdas, "sigmas": sd.sigmas});
        Ok(vec![
            Obs::AtMost(
                json!({"check": "gap <= proof_bound", "case": case}),
                pe.gap - pe.proof_bound,
                lim,
            ),
            Obs::AtMost(
                json!({"check": "proof_bound <= 0", "case": case}),
                pe.proof_bound,
                lim,
            ),
        ])
    });
    let flat = |n: usize, v: f64| -> Vec<Vec<f64>> {
        (0..n)
            .map(|i| (0..n).map(|j| if i == j { 0.0 } else { v }).collect())
            .collect()
    };
    // sharpness witness: λ = 0
    match SpectralData::new(vec![0.0; 4], flat(4, 1.0)).and_then(|sd| prop_est_gap(&sd)) {
        Ok(pe) => t.at_most(json!("gap at λ = 0"), pe.gap.abs(), 0.0),
        Err(e) => t.error(json!("λ = 0"), &e),
    }
    match SpectralData::new(vec![1.0 / 3.0, 1.0 / 3.0, -2.0 / 3.0], flat(3, 1.0))
        .and_then(|sd| prop_est_gap(&sd))
    {
        Ok(pe) => {
            t.at_most(
                json!("n = 3 example: gap <= proof_bound"),
                pe.gap - pe.proof_bound,
                1e-12,
            );
            t.at_most(
                json!("n = 3 example: proof_bound <= 0"),
                pe.proof_bound,
                1e-12,
            );
        }
        Err(e) => t.error(json!("n = 3 example"), &e),
    }
    // bridge from tensors: nearly round SU(2) metrics have positive curvature
    trials(&mut t, seed ^ 2, 50, |i, rng| {
        let q = gen::spd3(rng, 0.85, 1.15);
        let h = hc_of(&GeometrySpec::su2(q))?;
        let sd = SpectralData::from_curvature(&h.cp);
        if sd.sigmas.iter().flatten().any(|s| *s < 0.0) {
            return Ok(vec![]);
        }
        let pe = prop_est_gap(&sd)?;
        Ok(vec![Obs::AtMost(
            json!({"check": "bridge", "trial": i, "metric": q}),
            pe.gap - pe.proof_bound,
            scaled(1e-11, h.cp.r * h.cp.e_norm_sq()),
        )])
    });
    t.finish()
}

fn prop_est2(seed: u64) -> SuiteOutcome {
    let mut t = Tally::new("prop-est2");
    let mut equality_scan = 0usize;
    let results: Vec<(usize, Vec<Obs>)> = (0..1000)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(seed, "prop-est2", i as u64);
            let n = 3 + i % 4;
            let out = (|| -> Result<Vec<Obs>> {
                let sd = SpectralData::from_sectionals(gen::sectionals(&mut rng, n, -1.0))?;
                let gap = prop_est2_gap(&sd)?;
                let lhs = prop_est2_lhs(&sd);
                let mag = sd.scalar().abs() * sd.lambdas.iter().map(|l| l * l).sum::<f64>();
                let case = json!({"trial": i, "lambdas": sd.lambdas, "sigmas": sd.sigmas});
                let mut out = vec![
                    Obs::AtMost(
                        json!({"check": "value <= 0", "case": case}),
                        gap,
                        scaled(1e-12, mag),
                    ),
                    Obs::AtMost(
                        json!({"check": "tensor form", "case": case}),
                        (gap - lhs).abs(),
                        scaled(tol::IDENTITY_REL, mag),
                    ),
                ];
                if n == 4 && gap > -1e-10 {
                    let lmax = sd.lambdas.iter().fold(0.0f64, |m, l| m.max(l.abs()));
                    out.push(Obs::AtMost(
                        json!({"check": "equality forces Einstein", "case": case}),
                        lmax,
                        1e-6,
                    ));
                }
                Ok(out)
            })()
            .unwrap_or_else(|e| vec![Obs::Err(json!({"trial": i}), e.to_string())]);
            (n, out)
        })
        .collect();
    for (n, obs) in results {
        if n == 4 && obs.len() == 3 {
            equality_scan += 1;
        }
        t.absorb(obs);
    }
    t.detail("near_equality_cases", json!(equality_scan));
    let flat = |n: usize, v: f64| -> Vec<Vec<f64>> {
        (0..n)
            .map(|i| (0..n).map(|j| if i == j { 0.0 } else { v }).collect())
            .collect()
    };
    match SpectralData::new(vec![1.0, 1.0, -1.0, -1.0], flat(4, -1.0))
        .and_then(|sd| prop_est2_gap(&sd))
    {
        Ok(v) => t.at_most(
            json!("n = 4, σ = -1, λ = (1,1,-1,-1)"),
            (v + 8.0).abs(),
            1e-12,
        ),
        Err(e) => t.error(json!("n = 4 example"), &e),
    }
    // constant negative curvature: λ = 0 and equality
    match SpectralData::from_sectionals(flat(4, -1.0)).and_then(|sd| prop_est2_gap(&sd)) {
        Ok(v) => t.at_most(json!("hyperbolic equality"), v.abs(), 0.0),
        Err(e) => t.error(json!("hyperbolic"), &e),
    }
    t.finish()
}

fn cubic_bound(seed: u64) -> SuiteOutcome {
    let mut t = Tally::new("cubic-bound");
    trials(&mut t, seed, 1000, |i, rng| {
        let e = gen::traceless(rng, 3, 1.0);
        let gap = cubic_bound_gap(&e)?;
        Ok(vec![Obs::AtMost(
            json!({"trial": i, "E": rows(&e)}),
            -gap,
            1e-12 * tol::scale(e.norm().powi(3)),
        )])
    });
    match cubic_bound_gap(&Sym2::diag(&[1.0, 1.0, -2.0])) {
        Ok(g) => t.at_most(json!("sharpness at diag(1,1,-2)"), g.abs(), 1e-12),
        Err(e) => t.error(json!("diag(1,1,-2)"), &e),
    }
    match cubic_bound_gap(&Sym2::zeros(3)) {
        Ok(g) => t.at_most(json!("E = 0"), g.abs(), 0.0),
        Err(e) => t.error(json!("E = 0"), &e),
    }
    t.holds(
        json!("trace rejected"),
        cubic_bound_gap(&Sym2::diag(&[1.0, 0.0, 0.0])).is_err(),
    );
    t.finish()
}

fn pinching(seed: u64) -> SuiteOutcome {
    let mut t = Tally::new("pinching");
    let examples = (|| -> Result<(f64, f64)> {
        let round = hc_of(&GeometrySpec::round_sphere(3, 1.0))?;
        let s2r = hc_of(&GeometrySpec::sphere_flat(3, 1.0, None))?;
        Ok((
            pinching_margin(&round.cp, -0.25)?.margin,
            pinching_margin(&s2r.cp, -0.25)?.margin,
        ))
    })();
    match examples {
        Ok((round, s2r)) => {
            t.above(json!("round S3 pinched"), round, 0.0);
            t.above(json!("S2xR not pinched"), -s2r, 0.0);
            t.at_most(
                json!("S2xR margin value"),
                (s2r - (4.0 / 96.0 - 2.0 / 3.0)).abs(),
                1e-12,
            );
        }
        Err(e) => t.error(json!("examples"), &e),
    }
    for k in 0..100 {
        let tt = -1.0 / 3.0 + (1.0 / 6.0) * k as f64 / 100.0;
        t.holds(
            json!({"check": "lemma constant", "t": tt}),
            pinching_lemma_constant(tt),
        );
    }
    let mut hypothesis_met = 0usize;
    let results: Vec<(bool, Vec<Obs>)> = (0..500)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(seed, "pinching", i as u64);
            let out = (|| -> Result<(bool, Vec<Obs>)> {
                // three-dimensional curvature is fixed by its Ricci tensor
                let r = gen::log_uniform(&mut rng, 0.1, 10.0);
                let size = r * gen::log_uniform(&mut rng, 1e-3, 1.0);
                let e = gen::traceless(&mut rng, 3, size);
                let ric = &e + &Sym2::identity(3).scale(r / 3.0);
                let rm = reconstruct_riemann(&Riem4::zeros(3), &ric, r)?;
                let cp = CurvaturePoint::from_riemann(rm)?;
                let tt = rand::Rng::random_range(&mut rng, -1.0..0.5);
                let p = pinching_margin(&cp, tt)?;
                let case = json!({"trial": i, "t": tt, "R": cp.r, "E": rows(&cp.e), "margin": p.margin});
                Ok(match p.sign_chain(cp.r) {
                    Some(ok) => (true, vec![Obs::Holds(json!({"check": "sign chain", "case": case, "chain_slack": p.chain_slack}), ok)]),
                    None => (false, vec![]),
                })
            })()
            .unwrap_or_else(|e| (false, vec![Obs::Err(json!({"trial": i}), e.to_string())]));
            out
        })
        .collect();
    for (met, obs) in results {
        hypothesis_met += met as usize;
        t.absorb(obs);
    }
    t.detail("pinched_trials", json!(hypothesis_met));
    t.above(json!("pinched trials exist"), hypothesis_met as f64, 0.0);
    t.finish()
}

fn f_half(seed: u64) -> SuiteOutcome {
    let mut t = Tally::new("f-half-spectrum");
    match f_half_spectrum(2.0, 2.0 / 3.0, 3, 2) {
        Ok(fs) => {
            t.at_most(
                json!("S2xR roots"),
                (fs.mu_plus - 1.0).abs().max(fs.mu_minus.abs()),
                1e-12,
            );
            t.at_most(
                json!("S2xR multiplicity"),
                fs.multiplicity_residual.abs(),
                1e-12,
            );
        }
        Err(e) => t.error(json!("S2xR"), &e),
    }
    trials(&mut t, seed, 200, |i, rng| {
        let n = 3 + i % 6;
        let m = 1 + i % n;
        let r = gen::log_uniform(rng, 0.1, 10.0);
        let e_sq = rand::Rng::random_range(rng, 0.0..(r * r));
        let fs = f_half_spectrum(r, e_sq, n, m)?;
        let case = json!({"trial": i, "n": n, "R": r, "Esq": e_sq});
        let lim = scaled(1e-12, r * r);
        let mut out = vec![
            Obs::AtMost(
                json!({"check": "mu_plus root", "case": case}),
                f_half_quadratic(fs.mu_plus, r, e_sq, n).abs(),
                lim,
            ),
            Obs::AtMost(
                json!({"check": "mu_minus root", "case": case}),
                f_half_quadratic(fs.mu_minus, r, e_sq, n).abs(),
                lim,
            ),
        ];
        if n == 4 {
            let en = e_sq.sqrt();
            out.push(Obs::AtMost(
                json!({"check": "n = 4 roots", "case": case}),
                (fs.mu_plus - (r / 4.0 + en / 2.0))
                    .abs()
                    .max((fs.mu_minus - (r / 4.0 - en / 2.0)).abs()),
                scaled(1e-12, r),
            ));
        }
        Ok(out)
    });
    t.finish()
}

fn cotton_identity(seed: u64) -> SuiteOutcome {
    let mut t = Tally::new("cotton-identity");
    trials(&mut t, seed, 200, |i, rng| {
        let q = gen::spd3(rng, 0.5, 2.0);
        let h = hc_of(&GeometrySpec::su2(q))?;
        let g = identity_gaps(&h, 0.0);
        let c = cotton(&h);
        let n = h.dim();
        let mut antisym: f64 = 0.0;
        let mut trace: f64 = 0.0;
        for a in 0..n {
            for b in 0..n {
                trace = trace.max((0..n).map(|k| c.get(k, k, a)).sum::<f64>().abs());
                for k in 0..n {
                    antisym = antisym.max((c.get(a, b, k) + c.get(a, k, b)).abs());
                }
            }
        }
        let mag = h.nabla_e.norm_sq();
        let case = json!({"trial": i, "metric": q});
        Ok(vec![
            Obs::AtMost(
                json!({"check": "cotton norm identity", "case": case}),
                g.cotton_norm_gap.abs(),
                scaled(1e-11, mag),
            ),
            Obs::AtMost(
                json!({"check": "cotton integral formula", "case": case}),
                g.cotton_integral_gap.abs(),
                scaled(1e-11, mag),
            ),
            Obs::AtMost(
                json!({"check": "antisymmetry", "case": case}),
                antisym,
                scaled(tol::CONSTRUCTION, c.max_abs()),
            ),
            Obs::AtMost(
                json!({"check": "trace", "case": case}),
                trace,
                scaled(tol::CONSTRUCTION, c.max_abs()),
            ),
        ])
    });
    let zero = (|| -> Result<f64> {
        let a = cotton(&hc_of(&GeometrySpec::round_sphere(3, 1.0))?).max_abs();
        let b = cotton(&hc_of(&GeometrySpec::product(2.0, 1.0))?).max_abs();
        Ok(a.max(b))
    })();
    match zero {
        Ok(v) => t.at_most(json!("C = 0 on round S3 and S2xS2"), v, tol::CONSTRUCTION),
        Err(e) => t.error(json!("C = 0"), &e),
    }
    match hc_of(&GeometrySpec::berger(4.0)) {
        Ok(h) => t.above(json!("C != 0 on berger(4)"), cotton(&h).max_abs(), 1e-3),
        Err(e) => t.error(json!("berger(4)"), &e),
    }
    t.finish()
}

/// Non-Einstein critical points found by the solver, evaluated at unit volume.
fn critical_points(family: Family, t: f64, s: f64, seed: u64) -> Result<Vec<CriticalPoint>> {
    let config = SolveConfig {
        seed,
        ..SolveConfig::default()
    };
    Ok(solve(family, FunctionalParams::new(t, s)?, &config)?
        .points
        .into_iter()
        .filter(|p| !p.is_einstein)
        .collect())
}

fn weitzenbock(seed: u64) -> SuiteOutcome {
    let mut t = Tally::new("weitzenbock");
    let cases = [(-0.25, 0.0), (0.0, 0.0), (0.5, 0.0), (-0.25, 0.1)];
    let mut found = Vec::new();
    for (tt, s) in cases {
        let case = json!({"family": "berger", "t": tt, "s": s});
        let res = critical_points(Family::Berger, tt, s, seed).and_then(|pts| {
            let mut out = Vec::new();
            for p in pts {
                let h = hc_of(&p.unit_volume_spec()?)?;
                let p_ = FunctionalParams { t: tt, s };
                let gap = if s == 0.0 {
                    identity_gaps(&h, tt).weitzenbock_gap
                } else {
                    weitzenbock_gap_fts(&h, p_)
                };
                out.push((
                    p.params.clone(),
                    gap,
                    identity_gaps(&h, tt).cotton_integral_gap,
                ));
            }
            Ok(out)
        });
        match res {
            Ok(pts) => {
                t.above(
                    json!({"check": "non-Einstein point found", "case": case}),
                    pts.len() as f64,
                    0.0,
                );
                for (params, gap, cig) in pts {
                    t.at_most(json!({"check": "weitzenbock at critical point", "case": case, "params": params}), gap.abs(), 1e-8);
                    t.at_most(json!({"check": "cotton integral at critical point", "case": case, "params": params}), cig.abs(), 1e-8);
                    found.push(json!({"t": tt, "s": s, "params": params, "gap": gap}));
                }
            }
            Err(e) => t.error(case, &e),
        }
    }
    t.detail("critical_points", Value::Array(found));
    match hc_of(&GeometrySpec::berger(4.0)) {
        Ok(h) => {
            let g = identity_gaps(&h, 0.0).weitzenbock_gap;
            t.above(json!("control berger(4), t = 0"), g.abs(), 1e-3);
            t.detail("control_gap", json!(g));
        }
        Err(e) => t.error(json!("control"), &e),
    }
    t.finish()
}

/// `Pᵀ dQ P` with `P = Q^{-1/2}`: a metric variation in the orthonormal frame.
fn frame_variation(q: &[[f64; 3]; 3], dq: &Sym2) -> Result<Sym2> {
    let frame = orthonormal_frame(&StructureConstants::su2(), &metric_sym2(q))?;
    let p = frame.transform;
    let m = p.transpose() * dq.to_matrix() * &p;
    Ok(Sym2::symmetrize(3, |i, j| m[(i, j)]))
}

fn normalized_value(q: &[[f64; 3]; 3], p: FunctionalParams) -> Result<f64> {
    Ok(functionals::eval(&hc_of(&GeometrySpec::su2(*q))?, p)?.normalized)
}

fn gradient_check(seed: u64) -> SuiteOutcome {
    let mut t = Tally::new("gradient-check");
    trials(&mut t, seed, 50, |i, rng| {
        let q = if i % 2 == 0 {
            let x2 = gen::log_uniform(rng, 0.3, 3.0);
            let x3 = gen::log_uniform(rng, 0.3, 3.0);
            [[1.0, 0.0, 0.0], [0.0, x2, 0.0], [0.0, 0.0, x3]]
        } else {
            gen::spd3(rng, 0.3, 3.0)
        };
        let dq = gen::sym2(rng, 3, 1.0);
        let dq = dq.scale(1.0 / dq.norm());
        let tt = rand::Rng::random_range(rng, -1.0..1.0);
        let s = rand::Rng::random_range(rng, -0.5..0.5);
        let p = FunctionalParams::new(tt, s)?;
        let h = hc_of(&GeometrySpec::su2(q))?;
        let v = h.volume.require(&h.spec)?;
        let res = constrained_residual_fts(&h, p, None)?;
        let analytic = v.powf(4.0 / 3.0) * res.tensor.dot(&frame_variation(&q, &dq)?);
        let lam_min = metric_sym2(&q).eigenvalues()[0];
        let f = |u: &[f64]| -> Result<f64> {
            let qe: [[f64; 3]; 3] =
                std::array::from_fn(|a| std::array::from_fn(|b| q[a][b] + u[0] * dq.get(a, b)));
            normalized_value(&qe, p)
        };
        let fd = richardson_directional(&f, &[0.0], &[1.0], 0.05 * lam_min, 4)?;
        let rel = (fd - analytic).abs() / analytic.abs().max(1.0);
        Ok(vec![Obs::AtMost(
            json!({"trial": i, "metric": q, "direction": rows(&dq), "t": tt, "s": s, "fd": fd, "analytic": analytic}),
            rel,
            1e-5,
        )])
    });
    t.finish()
}

fn scale_invariance(seed: u64) -> SuiteOutcome {
    let mut t = Tally::new("scale-invariance");
    trials(&mut t, seed, 100, |i, rng| {
        let spec = match i % 5 {
            0 => GeometrySpec::round_sphere(3 + i % 4, gen::log_uniform(rng, 0.3, 3.0)),
            1 => GeometrySpec::product(
                gen::log_uniform(rng, 0.3, 3.0),
                gen::log_uniform(rng, 0.3, 3.0),
            ),
            2 => {
                let n = 3 + i % 4;
                let lengths = (0..n - 2)
                    .map(|_| gen::log_uniform(rng, 0.3, 3.0))
                    .collect();
                GeometrySpec::sphere_flat(n, gen::log_uniform(rng, 0.3, 3.0), Some(lengths))
            }
            3 => GeometrySpec::su2(gen::spd3(rng, 0.3, 3.0)),
            _ => GeometrySpec::berger(gen::log_uniform(rng, 0.1, 10.0)),
        };
        let c = gen::log_uniform(rng, 0.1, 10.0);
        let p = FunctionalParams::new(
            rand::Rng::random_range(rng, -1.0..1.0),
            rand::Rng::random_range(rng, -0.5..0.5),
        )?;
        let h = hc_of(&spec)?;
        let base = functionals::eval(&h, p)?.normalized;
        let other = functionals::eval(&hc_of(&spec.scaled(c)?)?, p)?.normalized;
        let literal = functionals::unit_volume_value(&h, p)?;
        let case =
            json!({"trial": i, "spec": crate::report::to_value(&spec), "c": c, "t": p.t, "s": p.s});
        Ok(vec![
            Obs::AtMost(
                json!({"check": "rescaling", "case": case}),
                (base - other).abs() / tol::scale(base),
                1e-10,
            ),
            Obs::AtMost(
                json!({"check": "literal unit volume", "case": case}),
                (base - literal).abs() / tol::scale(base),
                1e-10,
            ),
        ])
    });
    t.finish()
}

/// Berger sweep over `t ∈ [-0.45, 0.75]` and the exploratory point `t = 0.8`.
fn berger_landscape(seed: u64) -> SuiteOutcome {
    let mut t = Tally::new("berger-landscape");
    let config = SolveConfig {
        seed,
        ..SolveConfig::default()
    };
    let grid = match t_grid(-0.45, 0.75, 25) {
        Ok(g) => g,
        Err(e) => {
            t.error(json!("grid"), &e);
            return t.finish();
        }
    };
    match sweep(Family::Berger, &grid, 0.0, &config) {
        Ok(sw) => {
            let mut worst_sec = f64::INFINITY;
            let mut worst_res: f64 = 0.0;
            let mut closed_form: f64 = 0.0;
            for &tt in &grid {
                let branch: Vec<&CriticalPoint> = sw
                    .rows
                    .iter()
                    .filter(|r| r.t == tt)
                    .filter_map(|r| r.point.as_ref())
                    .filter(|p| !p.is_einstein)
                    .collect();
                t.above(
                    json!({"check": "non-Einstein branch exists", "t": tt}),
                    branch.len() as f64,
                    0.0,
                );
                for p in branch {
                    t.at_most(
                        json!({"check": "full residual", "t": tt, "params": p.params}),
                        p.residual_tensor_norm,
                        1e-8,
                    );
                    t.above(
                        json!({"check": "min sectional", "t": tt, "params": p.params}),
                        p.min_sectional,
                        -1e-8 - f64::EPSILON,
                    );
                    worst_sec = worst_sec.min(p.min_sectional);
                    worst_res = worst_res.max(p.residual_tensor_norm);
                    closed_form =
                        closed_form.max((p.params[0] - (2.0 + 4.0 * tt) / (3.0 + tt)).abs());
                }
            }
            t.detail("min_sectional_on_branch", json!(worst_sec));
            t.detail("max_residual_on_branch", json!(worst_res));
            t.detail("max_deviation_from_closed_form", json!(closed_form));
            t.detail("branch_events", crate::report::to_value(&sw.events));
        }
        Err(e) => t.error(json!("sweep"), &e),
    }
    match critical_points(Family::Berger, -0.25, 0.0, seed) {
        Ok(pts) => {
            let e_norm = pts.iter().map(|p| p.e_norm_sq.sqrt()).fold(0.0, f64::max);
            t.above(
                json!("t = -1/4 non-Einstein point with |E| > 1e-3"),
                e_norm,
                1e-3,
            );
        }
        Err(e) => t.error(json!("t = -1/4"), &e),
    }
    match critical_points(Family::Berger, 0.8, 0.0, seed) {
        Ok(pts) => {
            let m = pts
                .iter()
                .map(|p| p.min_sectional)
                .fold(f64::INFINITY, f64::min);
            t.detail("exploratory_t_0_8_min_sectional", json!(m));
            t.above(
                json!("exploratory: t = 0.8 branch has negative curvature"),
                -m,
                1e-6,
            );
        }
        Err(e) => t.error(json!("t = 0.8"), &e),
    }
    t.finish()
}

fn t_main(seed: u64) -> SuiteOutcome {
    let mut t = Tally::new("t-main");
    let config = SolveConfig {
        starts: 64,
        seed,
        ..SolveConfig::default()
    };
    let mut summary = Vec::new();
    for tt in [-0.6, -0.75, -1.0] {
        let p = FunctionalParams::ft(tt);
        for family in [Family::DiagonalSu2, Family::Berger] {
            let case = json!({"family": family.name(), "t": tt});
            match solve(family, p, &config) {
                Ok(out) => {
                    for cp in &out.points {
                        let ok = cp.e_norm_sq.sqrt() < config.einstein_tol
                            || cp.min_sectional < -config.sectional_tol;
                        t.holds(json!({"check": "Einstein or negatively curved", "case": case, "params": cp.params, "classification": cp.classification}), ok);
                    }
                    summary.push(json!({
                        "family": family.name(),
                        "t": tt,
                        "points": out.points.len(),
                        "non_einstein": out.points.iter().filter(|p| !p.is_einstein).count(),
                    }));
                }
                Err(e) => t.error(case, &e),
            }
        }
    }
    t.detail("solves", Value::Array(summary));
    t.finish()
}
