use std::f64::consts::FRAC_PI_2;

use nalgebra::{SymmetricEigen, Vector3};
use num_complex::Complex64;
use proptest::prelude::*;

use homsurf::differentials::{abresch_rosenberg, ar_p, feasibility_audit, holomorphy_residual};
use homsurf::families::roots::RootSettings;
use homsurf::families::{
    gen_cmc_control, gen_example31, gen_example32, gen_example33, Branch, Example31Params, Example32Params, Example33Params,
};
use homsurf::fundamental::{residual_c0, residual_c2, residual_c3, residual_c4, DEFAULT_ALGEBRAIC_TOL};
use homsurf::grid::{d_z, d_zbar, residual_norm};
use homsurf::space::Point;
use homsurf::{check_all, AmbientChart, ConformalGrid, FundamentalField, ScalarField, SpaceParams, ToleranceProfile};

fn space() -> impl Strategy<Value = SpaceParams> {
    (-3.0..3.0f64, -1.5..1.5f64)
        .prop_filter("kappa - 4 tau^2 must not vanish", |(k, t)| (k - 4.0 * t * t).abs() > 1e-3)
        .prop_map(|(k, t)| SpaceParams::new(k, t).unwrap())
}

/// Points well inside the chart domain of any `kappa >= -3`.
fn point() -> impl Strategy<Value = Point> {
    (0.0..0.9f64, 0.0..std::f64::consts::TAU, -3.0..3.0f64).prop_map(|(r, a, z)| Point::new(r * a.cos(), r * a.sin(), z))
}

fn grid(s0: f64, t0: f64, h: f64, n: usize) -> ConformalGrid {
    ConformalGrid::new(s0, t0, h, h, n, n).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn metric_is_positive_definite(s in space(), p in point()) {
        let g = AmbientChart::new(s).metric_tensor(&p).unwrap();
        let eig = SymmetricEigen::new(g).eigenvalues;
        prop_assert!(eig.min() > 0.0);
    }

    #[test]
    fn vertical_field_is_killing(s in space(), p in point(), axis in 0usize..3) {
        let mut x = Vector3::zeros();
        x[axis] = 1.0;
        let r = AmbientChart::new(s).killing_residual(&p, &x).unwrap();
        prop_assert!(r.norm() <= 1e-8, "{}", r.norm());
    }

    #[test]
    fn q_is_node_local(s in space(), l in 0.2..3.0f64, h in 0.1..2.0f64, u in -0.9..0.9f64, a in -1.0..1.0f64, b in -1.0..1.0f64,
                       q0 in -2.0..2.0f64, q1 in -2.0..2.0f64) {
        // p chosen so that Q = q0 + i q1 at every node
        let g = grid(0.0, 0.0, 0.1, 5);
        let w = Complex64::new(h, s.tau);
        let aa = Complex64::new(a, b);
        let q = Complex64::new(q0, q1);
        let p = (q + s.coupling() * aa * aa / w) / 2.0;
        let c = |v: Complex64| ScalarField::constant(g, v);
        let d = FundamentalField::assemble_unchecked(s, g, c(l.into()), c(u.into()), c(h.into()), c(p), c(aa));
        let got = abresch_rosenberg(&d).unwrap();
        for v in got.coeff.values() {
            prop_assert!((v - q).norm() <= 1e-12 * (1.0 + q.norm() + p.norm()));
        }
    }

    #[test]
    fn feasibility_ignores_the_sign_of_tau(s in space()) {
        let flipped = SpaceParams::new(s.kappa, -s.tau).unwrap();
        let (a, b) = (feasibility_audit(&s), feasibility_audit(&flipped));
        prop_assert_eq!(a.tag, b.tag);
        prop_assert_eq!(a.allowed_h_interval, b.allowed_h_interval);
    }

    #[test]
    fn cmc_control_has_holomorphic_q(s in space(), c in -2.0..2.0f64) {
        prop_assume!(s.tau != 0.0 || c.abs() > 1e-3);
        let d = gen_cmc_control(&s, c, grid(-0.2, 0.1, 0.01, 21)).unwrap();
        prop_assert!(holomorphy_residual(&abresch_rosenberg(&d).unwrap()).max <= 1e-12);
        prop_assert!(check_all(&d, &ToleranceProfile::uniform(1e-10)).pass);
        // A never vanishes where the normal is not vertical
        if s.tau != 0.0 {
            for (v, u) in d.a.values().iter().zip(d.u.values()) {
                prop_assert!(!(v.norm() <= 1e-10 && u.re * u.re < 1.0 - 1e-6));
            }
        }
    }

    #[test]
    fn rotational_family_has_constant_p(kappa in prop::sample::select(vec![-1.0, 1.0]), a in 0.3..3.0f64, b in 0.05..2.0f64) {
        let p = Example31Params { kappa, a, b };
        let d = gen_example31(&p, grid(0.0, 0.0, 0.01, 11)).unwrap();
        for v in ar_p(&d).unwrap().coeff.values() {
            prop_assert!((v + 0.25).norm() <= 1e-9);
        }
        for s in [0.0, 0.05, 0.1] {
            prop_assert!(p.ode_residual(s).abs() <= 1e-10);
        }
    }

    #[test]
    fn wirtinger_operators_are_linear(c1 in -2.0..2.0f64, c2 in -2.0..2.0f64, w in 0.5..3.0f64) {
        let g = grid(-0.3, 0.2, 0.05, 13);
        let f = ScalarField::from_fn(g, |s, t| Complex64::new((w * s).sin(), s * t));
        let h = ScalarField::from_fn(g, |s, t| Complex64::new(t * t, (s - t).cos()));
        let (a, b) = (Complex64::new(c1, 0.3), Complex64::new(-0.7, c2));
        let lhs = d_z(&(&f.scale(a) + &h.scale(b)));
        let rhs = &d_z(&f).scale(a) + &d_z(&h).scale(b);
        prop_assert!(residual_norm(&(&lhs - &rhs)).max <= 1e-12);
        let conj = d_z(&f.conj()).conj();
        let direct = d_zbar(&f);
        prop_assert_eq!(conj.values(), direct.values());
    }
}

#[test]
fn type_rejects_violated_modulus_identity() {
    let s = SpaceParams::new(-1.0, 0.0).unwrap();
    let g = grid(0.0, 0.0, 0.1, 5);
    let c = |v: f64| ScalarField::constant(g, v.into());
    // 4|A|²/λ = 1 − u² needs |A| = 1/2 here
    let bad = FundamentalField::new(s, g, c(1.0), c(0.0), c(0.3), c(0.1), c(0.6), DEFAULT_ALGEBRAIC_TOL);
    assert!(bad.is_err());
    let ok = FundamentalField::new(s, g, c(1.0), c(0.0), c(0.3), c(0.1), c(0.5), DEFAULT_ALGEBRAIC_TOL);
    assert!(ok.is_ok());
}

fn halving_ratios(make: impl Fn(f64, usize) -> FundamentalField, h: f64, n: usize) -> Vec<(String, f64, f64)> {
    let coarse = check_all(&make(h, n), &ToleranceProfile::default());
    let fine = check_all(&make(h / 2.0, 2 * n - 1), &ToleranceProfile::default());
    ["c0", "c1", "c2", "c3", "gauss"]
        .iter()
        .map(|k| (k.to_string(), coarse.get(k).unwrap().max, fine.get(k).unwrap().max))
        .collect()
}

fn assert_order_two(name: &str, ratios: Vec<(String, f64, f64)>) {
    for (k, a, b) in ratios {
        // residuals already at roundoff carry no order information
        if a < 1e-11 {
            continue;
        }
        let r = a / b;
        assert!((3.2..=4.8).contains(&r), "{name} {k}: {a:e} -> {b:e}, ratio {r}");
    }
}

#[test]
fn rotational_family_converges_at_order_two() {
    for (kappa, a, b) in [(-1.0, 1.0, 1.0), (1.0, 1.0, 0.5)] {
        let p = Example31Params { kappa, a, b };
        assert_order_two(
            "rotational",
            halving_ratios(|h, n| gen_example31(&p, grid(0.1, 0.0, h, n)).unwrap(), 2e-3, 151),
        );
    }
}

#[test]
fn q_equals_one_family_converges_at_order_two() {
    for delta in [1, -1] {
        let p = Example32Params::new(delta, FRAC_PI_2 + 0.2, 1.0);
        let ratios = halving_ratios(
            |h, n| {
                let mut p = p;
                p.step = h;
                gen_example32(&p, grid(0.0, 0.0, h, n)).unwrap()
            },
            4e-3,
            101,
        );
        assert!(ratios.iter().all(|(_, a, _)| *a > 1e-11));
        assert_order_two("q = 1", ratios);
    }
}

fn example33() -> Example33Params {
    Example33Params {
        kappa: -1.0,
        tau: -0.3,
        branch: Branch::Plus,
        h0: 0.2,
        g0: 0.0,
        g_prime0: 1.0,
        step: 1e-3,
        root: RootSettings::default(),
    }
}

/// Expected to fail: the closed-form data of this family do not satisfy the
/// differential equations, so the residuals stall instead of shrinking.
#[test]
fn non_cmc_family_converges_at_order_two() {
    let p = example33();
    let ratios = halving_ratios(|h, n| gen_example33(&p, grid(-0.02, -0.02, h, n)).unwrap(), 8e-4, 51);
    assert_order_two("non-CMC", ratios);
}

#[test]
fn non_cmc_family_is_hyperbolic_and_nonconstant() {
    let p = example33();
    let d = gen_example33(&p, grid(-0.02, -0.02, 8e-4, 51)).unwrap();
    let h = d.h.real_values();
    assert!(h.iter().all(|h| 4.0 * h * h + p.kappa < 0.0));
    let spread = h.iter().cloned().fold(f64::MIN, f64::max) - h.iter().cloned().fold(f64::MAX, f64::min);
    assert!(spread >= 1e-4);
    assert!(holomorphy_residual(&abresch_rosenberg(&d).unwrap()).max <= 1e-10);
}

#[test]
fn c0_follows_from_the_other_equations() {
    // on integrable data the residual of C.0 is controlled by those of C.2–C.4 plus truncation
    let p = Example32Params::new(1, FRAC_PI_2 + 0.2, 1.0);
    for h in [4e-3, 2e-3] {
        let d = gen_example32(&p, grid(0.0, 0.0, h, 101)).unwrap();
        let others = [residual_c2(&d), residual_c3(&d), residual_c4(&d)]
            .iter()
            .map(|f| residual_norm(f).max)
            .fold(0.0, f64::max);
        let c0 = residual_norm(&residual_c0(&d)).max;
        let scale = d.magnitude().max(1.0).powi(3);
        assert!(c0 <= scale * (others + h * h), "h {h}: c0 {c0:e}, others {others:e}");
    }
}

#[test]
fn q_equals_one_family_has_real_or_imaginary_a() {
    for (delta, real) in [(1, true), (-1, false)] {
        let d = gen_example32(&Example32Params::new(delta, FRAC_PI_2 + 0.2, 1.0), grid(0.0, 0.0, 0.01, 11)).unwrap();
        for a in d.a.values() {
            assert_eq!(if real { a.im } else { a.re }, 0.0);
        }
    }
}
