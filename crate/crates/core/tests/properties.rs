mod common;

use std::f64::consts::PI;

use common::*;
use eigensphere::calculus::{euler, hessian, identity_one_check, kappa, laplacian, partial, r2_coprime};
use eigensphere::eigen::verify_eigenfunction;
use eigensphere::geometry::{
    cone_mean_curvature, frames, mean_curvature, newton_project, sample, NewtonOptions, VarietySpec,
};
use eigensphere::minimality::{
    check_minimal_codim1, check_minimal_codim2, conformality_diagnostics, flat_section_residual, MinimalityOptions,
    MinimalityStatus,
};
use eigensphere::search::SearchProblem;
use eigensphere::selftest::{random_harmonic, ring_axioms_hold};
use eigensphere::{parse, render, seeded_rng, GaussianRational, Monomial, Polynomial};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use proptest::prelude::*;

fn gaussian(re: i64, im: i64) -> GaussianRational {
    GaussianRational::from_integer(re) + GaussianRational::imaginary_unit() * GaussianRational::from_integer(im)
}

fn polynomial(nvars: usize, max_exp: u32, max_terms: usize) -> impl Strategy<Value = Polynomial> {
    prop::collection::vec((prop::collection::vec(0..=max_exp, nvars), -4i64..=4, -4i64..=4), 0..=max_terms)
        .prop_map(move |terms| {
            Polynomial::from_terms(nvars, terms.into_iter().map(|(e, re, im)| (Monomial::new(e), gaussian(re, im))))
                .unwrap()
        })
}

fn point(nvars: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.5f64..1.5, nvars)
}

/// Random expression text over x1..x4, z1, z2.
fn expression() -> impl Strategy<Value = String> {
    let leaf = prop_oneof![
        (1usize..=4).prop_map(|j| format!("x{j}")),
        (1usize..=2).prop_map(|j| format!("z{j}")),
        Just("i".to_string()),
        (0i64..=9).prop_map(|n| n.to_string()),
        (1i64..=9, 2i64..=9).prop_map(|(p, q)| format!("{p}/{q}")),
    ];
    leaf.prop_recursive(4, 24, 3, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a} + {b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a} - {b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("{a}*{b}")),
            (inner.clone(), 0u32..=3).prop_map(|(a, k)| format!("({a})^{k}")),
            inner.clone().prop_map(|a| format!("-({a})")),
            inner.prop_map(|a| format!("conj({a})")),
        ]
    })
}

/// Eigenfunctions from two independent constructions.
fn eigenfunction() -> impl Strategy<Value = Polynomial> {
    prop_oneof![
        (any::<u64>(), 3usize..=6, 1u32..=4).prop_map(|(s, n, k)| isotropic_power(s, n, k)),
        (0u32..=3, 0u32..=3).prop_filter("nonconstant", |(n, m)| n + m > 0).prop_map(|(n, m)| lawson(n, m)),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn ring_axioms(a in polynomial(3, 2, 4), b in polynomial(3, 2, 4), c in polynomial(3, 2, 4)) {
        prop_assert!(ring_axioms_hold(&a, &b, &c));
    }

    #[test]
    fn homogeneous_scaling(p in polynomial(3, 3, 6), k in 0u32..=6, x in point(3), t in -2.0f64..2.0) {
        let h = p.homogeneous_component(k);
        let tx: Vec<f64> = x.iter().map(|v| t * v).collect();
        let lhs = h.evaluate(&tx).unwrap();
        let rhs = h.evaluate(&x).unwrap() * t.powi(k as i32);
        prop_assert!((lhs - rhs).norm() <= 1e-12 * rhs.norm().max(1.0));
    }

    #[test]
    fn exact_division_inverts_multiplication(p in polynomial(3, 2, 4), d in polynomial(3, 2, 3)) {
        prop_assume!(!d.is_zero());
        prop_assert_eq!((&p * &d).exact_divide(&d).unwrap(), Some(p));
    }

    #[test]
    fn real_and_imaginary_parts_recombine(p in polynomial(4, 2, 6)) {
        let (re, im) = p.real_imag_parts();
        prop_assert!(re.is_real() && im.is_real());
        prop_assert_eq!(&re + &im.scale(&GaussianRational::imaginary_unit()), p);
    }

    #[test]
    fn render_parse_round_trip(p in polynomial(4, 3, 6)) {
        prop_assert_eq!(parse(&render(&p), 4).unwrap(), p);
    }

    #[test]
    fn conjugation_is_an_involution(e in expression()) {
        prop_assert_eq!(parse(&format!("conj(conj({e}))"), 4).unwrap(), parse(&e, 4).unwrap());
    }

    #[test]
    fn partials_commute(p in polynomial(3, 3, 5), i in 0usize..3, j in 0usize..3) {
        let a = partial(&partial(&p, i).unwrap(), j).unwrap();
        let b = partial(&partial(&p, j).unwrap(), i).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn laplacian_is_hessian_trace(p in polynomial(4, 3, 5)) {
        prop_assert_eq!(laplacian(&p), hessian(&p).trace());
    }

    #[test]
    fn product_rule(a in polynomial(4, 2, 4), b in polynomial(4, 2, 4)) {
        prop_assert!(identity_one_check(&a, &b).unwrap());
    }

    #[test]
    fn euler_field_pairing(p in polynomial(3, 3, 6), k in 0u32..=6) {
        let h = p.homogeneous_component(k);
        let half_r2 = Polynomial::r_squared(3).scale_rational(&BigRational::new(BigInt::from(1), BigInt::from(2)));
        let k_h = h.scale(&GaussianRational::from_integer(k as i64));
        prop_assert_eq!(kappa(&half_r2, &h).unwrap(), euler(&h));
        prop_assert_eq!(euler(&h), k_h);
    }
}

#[test]
fn z_plus_conjugate_is_twice_real_part() {
    for j in 1..=3 {
        let sum = &parse(&format!("z{j}"), 6).unwrap() + &parse(&format!("conj(z{j})"), 6).unwrap();
        assert_eq!(sum, parse(&format!("2*x{}", 2 * j - 1), 6).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn squared_laplacian_matches_isotropy(seed in any::<u64>(), nvars in 3usize..=5, k in 1u32..=4, eigen in any::<bool>()) {
        let p = if eigen { isotropic_power(seed, nvars, k) } else { random_harmonic(&mut seeded_rng(seed, 0), nvars, k) };
        prop_assert!(laplacian(&p).is_zero());
        prop_assert_eq!(laplacian(&(&p * &p)).is_zero(), kappa(&p, &p).unwrap().is_zero());
    }

    #[test]
    fn eigenvalues_match_geodesic_differences(p in eigenfunction(), seed in any::<u64>()) {
        let n = p.nvars() - 1;
        let report = verify_eigenfunction(&p, n).unwrap();
        prop_assert!(report.is_eigen);
        let k = report.k as f64;
        let lambda = -k * (k + n as f64 - 1.0);
        let numeric = p.to_numeric();
        let f = |x: &[f64]| numeric.eval(x);
        let mut rng = seeded_rng(seed, 1);
        for _ in 0..20 {
            let x = sphere_point(&mut rng, p.nvars());
            let value = f(&x);
            prop_assert!(rel_close(geodesic_laplacian(&f, &x), value * lambda, 1e-5));
            prop_assert!(rel_close(geodesic_gradient_square(&f, &x), value * value * (-k * k), 1e-5));
        }
    }

    #[test]
    fn radial_part_of_isotropic_gradient(p in eigenfunction(), seed in any::<u64>()) {
        // κ(P,P) - (kP)² = -k²P² on the sphere
        let k = verify_eigenfunction(&p, p.nvars() - 1).unwrap().k as f64;
        let kap = kappa(&p, &p).unwrap();
        let mut rng = seeded_rng(seed, 2);
        for _ in 0..10 {
            let x = sphere_point(&mut rng, p.nvars());
            let v = p.evaluate(&x).unwrap();
            let lhs = kap.evaluate(&x).unwrap() - (v * k) * (v * k);
            prop_assert!((lhs - v * v * (-k * k)).norm() < 1e-10 * (k * k).max(1.0) * v.norm_sqr().max(1.0));
        }
    }

    #[test]
    fn eigenfunctions_are_coprime_to_r_squared(p in eigenfunction()) {
        prop_assert!(r2_coprime(&p).unwrap());
        prop_assert!(r2_coprime(&(&p * &p)).unwrap());
    }

    #[test]
    fn conformal_harmonic_forms_are_isotropic(seed in any::<u64>(), k in 1u32..=4, eigen in any::<bool>()) {
        let f = if eigen { isotropic_power(seed, 4, k) } else { random_harmonic(&mut seeded_rng(seed, 3), 4, k) };
        let report = conformality_diagnostics(&f);
        if report.conformal {
            prop_assert!(kappa(&f, &f).unwrap().is_zero());
        }
        prop_assert_eq!(report.conformal, kappa(&f, &f).unwrap().is_zero());
    }

    #[test]
    fn verified_coefficients_have_tiny_residual(p in eigenfunction()) {
        let k = p.homogeneity().unwrap().unwrap();
        let problem = SearchProblem::new(p.nvars(), k).unwrap();
        let c: Vec<Complex64> = problem.basis().iter().map(|m| p.coefficient(m).to_complex64()).collect();
        prop_assert!(problem.residual_norm(&c) < 1e-13);
    }
}

#[test]
fn radial_component_is_minus_dimension() {
    let specs = [
        (4, vec!["x1^2 - x2^2 + x3^2 - x4^2"]),
        (4, vec!["4*x4^2 - 1"]),
        (4, vec!["x1*x2 - x3*x4"]),
        (4, vec!["x1^2 - x2^2 + x3^2 - x4^2", "2*x1*x2 + 2*x3*x4"]),
        (5, vec!["x1^3 - 3*x1*x2^2 + x3^3 - 3*x3*x4^2"]),
    ];
    for (nvars, cons) in specs {
        let cons: Vec<Polynomial> = cons.iter().map(|c| poly(c, nvars)).collect();
        let c = cons.len();
        let spec = VarietySpec::on_sphere(nvars, cons).unwrap();
        let cloud = sample(&spec, 40, 1, &NewtonOptions::default()).unwrap();
        for x in &cloud.points {
            let h = mean_curvature(&spec, x, &NewtonOptions::default()).unwrap();
            assert!((h.radial_component + (nvars - 1 - c) as f64).abs() < 1e-8, "{x:?}: {}", h.radial_component);
        }
    }
}

#[test]
fn level_set_and_cone_curvatures_agree() {
    let mut rng = seeded_rng(17, 0);
    for trial in 0..8 {
        let k = 2 + trial % 3;
        let (p, _) = random_harmonic(&mut rng, 4, k).real_imag_parts();
        if p.is_zero() {
            continue;
        }
        let spec = VarietySpec::on_sphere(4, vec![p.clone()]).unwrap();
        let cloud = sample(&spec, 30, trial as u64, &NewtonOptions::default()).unwrap();
        for x in &cloud.points {
            let h = mean_curvature(&spec, x, &NewtonOptions::default()).unwrap();
            let cone = cone_mean_curvature(&p, x).unwrap();
            // opposite orientation conventions: -trace(Hess) versus div(∇P/|∇P|)
            assert!((h.normal_components[0] + cone).abs() < 1e-8 * cone.abs().max(1.0), "{x:?}");
        }
    }
}

#[test]
fn frames_are_orthonormal() {
    let spec = VarietySpec::on_sphere(5, vec![poly("x1^2 - x2^2 + x3^2 - x4^2", 5), poly("x1*x5 - x2*x3", 5)]).unwrap();
    let cloud = sample(&spec, 30, 4, &NewtonOptions::default()).unwrap();
    for x in &cloud.points {
        let f = frames(&spec, x, 1e-8).unwrap();
        let all: Vec<_> = f.normals.iter().chain(&f.tangents).collect();
        assert_eq!(all.len(), 5);
        for (i, a) in all.iter().enumerate() {
            for (j, b) in all.iter().enumerate() {
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((a.dot(b) - expected).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn newton_projection_is_idempotent() {
    let spec = VarietySpec::on_sphere(4, vec![poly("x1^3 - 3*x1*x2^2 + x3*x4^2 - 1/3*x3^3", 4)]).unwrap();
    let o = NewtonOptions::default();
    let mut rng = seeded_rng(8, 0);
    for _ in 0..20 {
        let Ok(x) = newton_project(&spec, &sphere_point(&mut rng, 4), &o) else { continue };
        let y = newton_project(&spec, &x, &o).unwrap();
        let moved = x.iter().zip(&y).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(moved < o.tol);
    }
}

#[test]
fn geodesic_spheres_have_cotangent_curvature() {
    for nvars in 3..=5 {
        for (rho, cos2) in [(PI / 6.0, "3/4"), (PI / 4.0, "1/2"), (PI / 3.0, "1/4")] {
            let g = poly(&format!("x{nvars}^2 - {cos2}"), nvars);
            let spec = VarietySpec::on_sphere(nvars, vec![g]).unwrap();
            let cloud = sample(&spec, 20, 2, &NewtonOptions::default()).unwrap();
            let expected = (nvars as f64 - 2.0) / rho.tan();
            for x in &cloud.points {
                let h = mean_curvature(&spec, x, &NewtonOptions::default()).unwrap();
                assert!((h.normal_components[0].abs() - expected).abs() < 1e-6, "N={nvars} rho={rho}");
            }
        }
    }
}

fn rational(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn exact_certificates_pass_numerically(n in 1u32..=3, m in 1u32..=2, a in -5i64..=5, b in -5i64..=5) {
        prop_assume!(a != 0 || b != 0);
        let f = lawson(n, m);
        let o = MinimalityOptions { samples: 100, ..Default::default() };
        let v = check_minimal_codim1(&f, &rational(a, 1), &rational(b, 1), 3, &o).unwrap();
        if v.status == MinimalityStatus::ExactMinimal {
            prop_assert!(v.max_residual.unwrap() < 1e-8);
            prop_assert_eq!(v.samples, Some(100));
        }
    }

    #[test]
    fn verdict_is_scale_invariant(a in -5i64..=5, b in -5i64..=5, tp in -7i64..=7, tq in 1i64..=7) {
        prop_assume!((a != 0 || b != 0) && tp != 0);
        let f = poly("z1^2 + z2^2", 4);
        let o = MinimalityOptions { samples: 30, ..Default::default() };
        let t = rational(tp, tq);
        let (a, b) = (rational(a, 1), rational(b, 1));
        let v1 = check_minimal_codim1(&f, &a, &b, 3, &o).unwrap();
        let v2 = check_minimal_codim1(&f, &(&a * &t), &(&b * &t), 3, &o).unwrap();
        prop_assert_eq!(v1.status, v2.status);
    }
}

#[test]
fn sums_of_powers_have_flat_fibers() {
    for k in 2..=4 {
        let f = poly(&format!("z1^{k} + z2^{k}"), 5);
        let o = MinimalityOptions { samples: 60, ..Default::default() };
        let v = check_minimal_codim2(&f, 4, &o).unwrap();
        assert_eq!(v.status, MinimalityStatus::NumericMinimal);
        assert!(v.flat_section_residual.unwrap() < 1e-8);
        let (u, w) = f.real_imag_parts();
        let spec = VarietySpec::on_sphere(5, vec![u, w]).unwrap();
        for x in sample(&spec, 60, 3, &NewtonOptions::default()).unwrap().points {
            assert!(flat_section_residual(&x, k) < 1e-8);
        }
    }
}
