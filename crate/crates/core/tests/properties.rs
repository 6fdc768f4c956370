use proptest::prelude::*;

use curvfunc::euler_lagrange::constrained_residual_fts;
use curvfunc::functionals::{self, FunctionalParams};
use curvfunc::geometry::{curvature_of, GeometrySpec};
use curvfunc::report::to_json;
use curvfunc::rigidity::cubic_bound_gap;
use curvfunc::tensor::{
    kulkarni_nomizu, reconstruct_riemann, ricci_contract, weyl_part, CurvaturePoint, Riem4, Sym2,
};

fn sym2(n: usize) -> impl Strategy<Value = Sym2> {
    prop::collection::vec(-1.0f64..1.0, n * n)
        .prop_map(move |v| Sym2::symmetrize(n, |i, j| v[i * n + j]))
}

/// Algebraic curvature tensor as a signed sum of three Kulkarni-Nomizu squares.
fn riem4() -> impl Strategy<Value = Riem4> {
    (3usize..=6).prop_flat_map(|n| {
        (
            prop::collection::vec(sym2(n), 3),
            prop::collection::vec(prop::bool::ANY, 3),
        )
            .prop_map(move |(ss, signs)| {
                let mut rm = Riem4::zeros(n);
                for (s, pos) in ss.iter().zip(signs) {
                    let sign = if pos { 0.5 } else { -0.5 };
                    rm = rm.add(&kulkarni_nomizu(s, s).unwrap().scale(sign));
                }
                rm
            })
    })
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn weyl_decomposition_roundtrips(rm in riem4()) {
        let (ric, r) = ricci_contract(&rm);
        let w = weyl_part(&rm, &ric, r).unwrap();
        let back = reconstruct_riemann(&w, &ric, r).unwrap();
        prop_assert!(back.max_abs_diff(&rm) < 1e-12);
        let (wric, wr) = ricci_contract(&w);
        prop_assert!(wric.max_abs() < 1e-12 && wr.abs() < 1e-12);
    }

    #[test]
    fn norm_splits_orthogonally(rm in riem4()) {
        let cp = CurvaturePoint::from_riemann(rm).unwrap();
        prop_assert!(close(cp.rm_norm_sq(), cp.rm_norm_sq_from_decomposition(), 1e-12));
        prop_assert!(cp.w_norm_sq() >= -1e-12);
    }

    #[test]
    fn kulkarni_nomizu_is_symmetric_and_contracts(
        (s, t) in (3usize..=6).prop_flat_map(|n| (sym2(n), sym2(n)))
    ) {
        let st = kulkarni_nomizu(&s, &t).unwrap();
        prop_assert!(st.max_abs_diff(&kulkarni_nomizu(&t, &s).unwrap()) < 1e-15);
        let n = s.dim();
        let (ric, _) = ricci_contract(&kulkarni_nomizu(&Sym2::identity(n), &s).unwrap());
        // Ric(g ∧ h) = (n - 2) h + tr(h) g
        let expect = Sym2::from_fn(n, |i, j| {
            (n as f64 - 2.0) * s.get(i, j) + if i == j { s.trace() } else { 0.0 }
        });
        prop_assert!((&ric - &expect).max_abs() < 1e-13);
    }

    #[test]
    fn cubic_trace_bound(e in sym2(3)) {
        let e = e.traceless();
        prop_assert!(cubic_bound_gap(&e).unwrap() >= -1e-12);
    }

    #[test]
    fn normalized_value_is_scale_invariant(
        x in prop::array::uniform3(0.05f64..20.0),
        c in 0.01f64..100.0,
        t in -1.0f64..1.0,
        s in -1.0f64..1.0,
    ) {
        let p = FunctionalParams::new(t, s).unwrap();
        let spec = GeometrySpec::diagonal_su2(x);
        let a = functionals::eval(&curvature_of(&spec).unwrap(), p).unwrap().normalized;
        let b = functionals::eval(&curvature_of(&spec.scaled(c).unwrap()).unwrap(), p)
            .unwrap()
            .normalized;
        prop_assert!(close(a, b, 1e-10), "{a} vs {b}");
    }

    #[test]
    fn residual_is_scale_covariant(x in 0.05f64..20.0, c in 0.1f64..10.0, t in -1.0f64..1.0) {
        // the tensor residual has weight -2 under g -> c g
        let p = FunctionalParams::ft(t);
        let spec = GeometrySpec::berger(x);
        let r1 = constrained_residual_fts(&curvature_of(&spec).unwrap(), p, None).unwrap();
        let r2 = constrained_residual_fts(&curvature_of(&spec.scaled(c).unwrap()).unwrap(), p, None)
            .unwrap();
        prop_assert!(close(r1.tensor_norm(), c * c * r2.tensor_norm(), 1e-9));
    }

    #[test]
    fn berger_closed_form_branch_is_critical(t in -0.45f64..0.75) {
        let x = (2.0 + 4.0 * t) / (3.0 + t);
        let hc = curvature_of(&GeometrySpec::berger(x)).unwrap();
        let res = constrained_residual_fts(&hc, FunctionalParams::ft(t), None).unwrap();
        prop_assert!(res.tensor_norm() < 1e-9, "{}", res.tensor_norm());
    }

    #[test]
    fn report_floats_roundtrip(v in prop::collection::vec(prop::num::f64::NORMAL | prop::num::f64::SUBNORMAL, 1..20)) {
        let text = to_json(&v).unwrap();
        let back: Vec<f64> = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back, v);
    }
}
