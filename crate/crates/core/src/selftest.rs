//! Exact identity suites run by the `selftest` command and the test suites.

use rand::Rng;
use serde::Serialize;

use crate::calculus::{euler, hess_grad_grad, identity_one_check, r2_coprime, radial_laplacian_law_holds};
use crate::error::Result;
use crate::parser::parse;
use crate::polycore::{GaussianRational, Polynomial};
use crate::seeded_rng;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub cases: usize,
    pub failures: usize,
}

impl CheckOutcome {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SelfTestReport {
    pub seed: u64,
    pub passed: bool,
    pub checks: Vec<CheckOutcome>,
}

/// Commutativity, associativity and distributivity on one triple.
pub fn ring_axioms_hold(a: &Polynomial, b: &Polynomial, c: &Polynomial) -> bool {
    a + b == b + a
        && a * b == b * a
        && &(a + b) + c == a + &(b + c)
        && &(a * b) * c == a * &(b * c)
        && a * &(b + c) == &(a * b) + &(a * c)
        && (a + &(-a)).is_zero()
}

/// A random nonzero harmonic form of degree `k`: a Gaussian-integer
/// combination of `(x_p ± i x_q)^k` with `p != q`.
pub fn random_harmonic<R: Rng + ?Sized>(rng: &mut R, nvars: usize, k: u32) -> Polynomial {
    assert!(nvars >= 2);
    loop {
        let mut sum = Polynomial::zero(nvars);
        for _ in 0..rng.random_range(1..=3) {
            let p = rng.random_range(0..nvars);
            let q = (p + rng.random_range(1..nvars)) % nvars;
            let xp = Polynomial::variable(nvars, p).expect("in range");
            let xq = Polynomial::variable(nvars, q).expect("in range");
            let unit = if rng.random_bool(0.5) {
                GaussianRational::imaginary_unit()
            } else {
                -GaussianRational::imaginary_unit()
            };
            let coeff = GaussianRational::from_integer(rng.random_range(-4..=4))
                + GaussianRational::imaginary_unit() * GaussianRational::from_integer(rng.random_range(-4..=4));
            let form = &xp + &xq.scale(&unit);
            sum = &sum + &form.pow(k).scale(&coeff);
        }
        if !sum.is_zero() {
            return sum;
        }
    }
}

fn tally<I: IntoIterator<Item = bool>>(name: &'static str, outcomes: I) -> CheckOutcome {
    let mut cases = 0;
    let mut failures = 0;
    for ok in outcomes {
        cases += 1;
        failures += usize::from(!ok);
    }
    CheckOutcome { name, cases, failures }
}

pub fn ring_axioms(seed: u64, cases: usize) -> CheckOutcome {
    let mut rng = seeded_rng(seed, 1);
    tally(
        "ring_axioms",
        (0..cases).map(|_| {
            let [a, b, c] = [0, 1, 2].map(|_| Polynomial::random(&mut rng, 3, 3, 4, true));
            ring_axioms_hold(&a, &b, &c)
        }),
    )
}

/// `Δ(φψ) = Δφ ψ + 2κ(φ, ψ) + φ Δψ` on random pairs of degree at most 4 in
/// four variables.
pub fn product_rule(seed: u64, cases: usize) -> Result<CheckOutcome> {
    let mut rng = seeded_rng(seed, 2);
    let mut results = Vec::with_capacity(cases);
    for _ in 0..cases {
        let phi = Polynomial::random(&mut rng, 4, 4, 5, true);
        let psi = Polynomial::random(&mut rng, 4, 4, 5, true);
        results.push(identity_one_check(&phi, &psi)?);
    }
    Ok(tally("product_rule", results))
}

/// `Σ x_i ∂_i P = k P` on each homogeneous component of random polynomials.
pub fn euler_identity(seed: u64, cases: usize) -> CheckOutcome {
    let mut rng = seeded_rng(seed, 3);
    tally(
        "euler",
        (0..cases).map(|_| {
            let p = Polynomial::random(&mut rng, 4, 5, 6, true);
            (0..=5).all(|k| {
                let h = p.homogeneous_component(k);
                euler(&h) == h.scale(&GaussianRational::from_integer(k as i64))
            })
        }),
    )
}

pub fn radial_law(max_k: u32, max_nvars: usize) -> CheckOutcome {
    tally(
        "radial_laplacian",
        (1..=max_nvars).flat_map(|n| (0..=max_k).map(move |k| radial_laplacian_law_holds(n, k))),
    )
}

/// `Hess P(∇P, ∇P) = 8P` for `P = x1² - x2² + x3² - x4²`.
pub fn golden_clifford() -> CheckOutcome {
    let p = parse("x1^2 - x2^2 + x3^2 - x4^2", 4).expect("valid");
    let ok = hess_grad_grad(&p) == p.scale(&GaussianRational::from_integer(8));
    tally("hess_grad_grad_clifford", [ok])
}

/// Nonzero harmonic forms are never divisible by `r²`.
pub fn harmonic_coprime(seed: u64, cases: usize) -> Result<CheckOutcome> {
    let mut rng = seeded_rng(seed, 4);
    let mut results = Vec::with_capacity(cases);
    for _ in 0..cases {
        let nvars = rng.random_range(3..=5);
        let k = rng.random_range(2..=5);
        results.push(r2_coprime(&random_harmonic(&mut rng, nvars, k))?);
    }
    Ok(tally("harmonic_r2_coprime", results))
}

pub fn run(seed: u64) -> Result<SelfTestReport> {
    let checks = vec![
        ring_axioms(seed, 50),
        product_rule(seed, 100)?,
        euler_identity(seed, 50),
        radial_law(5, 6),
        golden_clifford(),
        harmonic_coprime(seed, 100)?,
    ];
    let passed = checks.iter().all(CheckOutcome::passed);
    Ok(SelfTestReport { seed, passed, checks })
}
