//! Exact recognition of `(λ, μ)`-eigenfunctions on the unit sphere `S^n`.
//!
//! A homogeneous polynomial `P` of degree `k` in `n + 1` variables restricts
//! to a `(λ, μ)`-eigenfunction iff `ΔP = 0` and `ΔP² = 0` (equivalently
//! `κ(P, P) = 0`). The Laplacian sign convention is `Δ = div ∘ grad`, so the
//! sphere spectrum is non-positive: `λ = -k(k+n-1)` and `μ = -k²`.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use rand_distr::{Distribution, StandardNormal};
use serde::{Serialize, Serializer};

use crate::calculus::{kappa, laplacian};
use crate::error::{Error, FailedCondition, Result};
use crate::polycore::{NumericPolynomial, Polynomial};
use crate::seeded_rng;

/// Serializes integer-valued rationals as JSON integers, others as `"p/q"`.
pub(crate) fn serialize_rational<S: Serializer>(
    r: &Option<BigRational>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match r {
        None => s.serialize_none(),
        Some(r) if r.is_integer() => match i64::try_from(r.numer()) {
            Ok(v) => s.serialize_i64(v),
            Err(_) => s.serialize_str(&r.numer().to_string()),
        },
        Some(r) => s.serialize_str(&format!("{}/{}", r.numer(), r.denom())),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Failure {
    pub condition: FailedCondition,
    /// Polynomial that should have vanished: the lower-degree part for
    /// homogeneity, `ΔP` or `ΔP²` otherwise.
    pub residual: Polynomial,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EigenReport {
    pub is_eigen: bool,
    /// Degree of `P` (largest total degree when `P` is not homogeneous).
    pub k: u32,
    pub n: usize,
    #[serde(serialize_with = "serialize_rational")]
    pub lambda: Option<BigRational>,
    #[serde(serialize_with = "serialize_rational")]
    pub mu: Option<BigRational>,
    pub failure: Option<Failure>,
}

fn int(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

/// `-k(k+n-1)`.
pub fn sphere_eigenvalue(k: u32, n: usize) -> i64 {
    let (k, n) = (k as i64, n as i64);
    -k * (k + n - 1)
}

/// `-k²`.
pub fn sphere_mu(k: u32) -> i64 {
    -(k as i64) * (k as i64)
}

fn check_shape(p: &Polynomial, n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::SphereDimensionTooSmall(n));
    }
    if p.nvars() != n + 1 {
        return Err(Error::DimensionMismatch { expected: n + 1, found: p.nvars() });
    }
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    Ok(())
}

/// Decides whether `P|_{S^n}` is a `(λ, μ)`-eigenfunction.
pub fn verify_eigenfunction(p: &Polynomial, n: usize) -> Result<EigenReport> {
    check_shape(p, n)?;
    let top = p.total_degree().expect("nonzero");
    let fail = |condition, residual| EigenReport {
        is_eigen: false,
        k: top,
        n,
        lambda: None,
        mu: None,
        failure: Some(Failure { condition, residual }),
    };

    let Some(k) = p.homogeneity()? else {
        let lower = p - &p.homogeneous_component(top);
        return Ok(fail(FailedCondition::Homogeneity, lower));
    };
    let lap = laplacian(p);
    if !lap.is_zero() {
        return Ok(fail(FailedCondition::LaplacianP, lap));
    }
    // With ΔP = 0 the product rule gives Δ(P²) = 2κ(P, P); both routes are
    // computed and must agree.
    let lap_sq = laplacian(&(p * p));
    let self_pairing = kappa(p, p)?;
    assert_eq!(
        lap_sq.is_zero(),
        self_pairing.is_zero(),
        "Δ(P²) and κ(P, P) disagree for a harmonic P"
    );
    if !lap_sq.is_zero() {
        return Ok(fail(FailedCondition::LaplacianP2, lap_sq));
    }
    Ok(EigenReport {
        is_eigen: true,
        k,
        n,
        lambda: Some(int(sphere_eigenvalue(k, n))),
        mu: Some(int(sphere_mu(k))),
        failure: None,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct PairFailure {
    pub i: usize,
    pub j: usize,
    /// `κ(P_i, P_j)`, which must vanish identically.
    pub residual: Polynomial,
}

#[derive(Clone, Debug, Serialize)]
pub struct FamilyReport {
    pub is_family: bool,
    pub k: u32,
    pub n: usize,
    #[serde(serialize_with = "serialize_rational")]
    pub lambda: Option<BigRational>,
    #[serde(serialize_with = "serialize_rational")]
    pub mu: Option<BigRational>,
    pub members: Vec<EigenReport>,
    pub failing_pair: Option<PairFailure>,
}

/// Checks that `ps` is an eigenfamily on `S^n`.
///
/// On the unit sphere `κ_S(P_i, P_j) = κ(P_i, P_j) - (E P_i)(E P_j)` and the
/// Euler terms contribute `k² P_i P_j`, so with `μ = -k²` the pairwise
/// condition reduces to the exact identity `κ(P_i, P_j) = 0`.
pub fn verify_eigenfamily(ps: &[Polynomial], n: usize) -> Result<FamilyReport> {
    if ps.is_empty() {
        return Err(Error::EmptyFamily);
    }
    let members = ps
        .iter()
        .map(|p| verify_eigenfunction(p, n))
        .collect::<Result<Vec<_>>>()?;
    let mut degrees = ps.iter().filter_map(|p| p.homogeneity().ok().flatten());
    let k = members[0].k;
    if let Some(first) = degrees.next() {
        if let Some(other) = degrees.find(|&d| d != first) {
            return Err(Error::MixedDegrees(first, other));
        }
    }
    let mut report = FamilyReport {
        is_family: false,
        k,
        n,
        lambda: None,
        mu: None,
        members,
        failing_pair: None,
    };
    if !report.members.iter().all(|m| m.is_eigen) {
        return Ok(report);
    }
    for i in 0..ps.len() {
        for j in (i + 1)..ps.len() {
            let pairing = kappa(&ps[i], &ps[j])?;
            if !pairing.is_zero() {
                report.failing_pair = Some(PairFailure { i, j, residual: pairing });
                return Ok(report);
            }
        }
    }
    report.is_family = true;
    report.lambda = Some(int(sphere_eigenvalue(k, n)));
    report.mu = Some(int(sphere_mu(k)));
    Ok(report)
}

fn require_eigen(p: &Polynomial, n: usize) -> Result<EigenReport> {
    let report = verify_eigenfunction(p, n)?;
    match &report.failure {
        Some(f) => Err(Error::NotAnEigenfunction(f.condition)),
        None => Ok(report),
    }
}

/// `Δ(P^m) = 0` for every `2 <= m <= mmax`; the sphere is `S^{N-1}`.
pub fn power_harmonicity_check(p: &Polynomial, mmax: u32) -> Result<bool> {
    require_eigen(p, p.nvars().saturating_sub(1))?;
    let mut power = p.clone();
    for _ in 2..=mmax {
        power = &power * p;
        if !laplacian(&power).is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Number of random sphere points used by the finite-difference checks.
pub const FD_POINTS: usize = 20;
/// Relative tolerance of the finite-difference checks.
pub const FD_TOL: f64 = 1e-5;
const FD_STEP: f64 = 1e-3;

/// Uniform random point on the unit sphere in `R^nvars`.
pub fn random_sphere_point<R: rand::Rng + ?Sized>(rng: &mut R, nvars: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..nvars).map(|_| StandardNormal.sample(rng)).collect();
        let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if norm > 1e-6 {
            return v.into_iter().map(|a| a / norm).collect();
        }
    }
}

fn radial_extension(p: &NumericPolynomial, y: &[f64]) -> Complex64 {
    let norm = y.iter().map(|a| a * a).sum::<f64>().sqrt();
    let unit: Vec<f64> = y.iter().map(|a| a / norm).collect();
    p.eval(&unit)
}

/// Laplace–Beltrami of `P|_{S^{N-1}}` at a unit vector `x`, by fourth-order
/// central differences of the degree-zero extension `P(y/|y|)`, whose flat
/// Laplacian equals the sphere Laplacian on `|y| = 1`.
pub fn sphere_laplacian_fd(p: &NumericPolynomial, x: &[f64]) -> Complex64 {
    let h = FD_STEP;
    let g0 = radial_extension(p, x);
    let mut acc = Complex64::new(0.0, 0.0);
    let mut y = x.to_vec();
    for i in 0..x.len() {
        let mut at = |t: f64| {
            y[i] = x[i] + t;
            let v = radial_extension(p, &y);
            y[i] = x[i];
            v
        };
        let (p1, m1, p2, m2) = (at(h), at(-h), at(2.0 * h), at(-2.0 * h));
        acc += (-p2 + 16.0 * p1 - 30.0 * g0 + 16.0 * m1 - m2) / (12.0 * h * h);
    }
    acc
}

/// Bilinear square `Σ (∂_i g)²` of the tangential gradient at unit `x`.
pub fn sphere_gradient_square_fd(p: &NumericPolynomial, x: &[f64]) -> Complex64 {
    let h = FD_STEP;
    let mut acc = Complex64::new(0.0, 0.0);
    let mut y = x.to_vec();
    for i in 0..x.len() {
        let mut at = |t: f64| {
            y[i] = x[i] + t;
            let v = radial_extension(p, &y);
            y[i] = x[i];
            v
        };
        let d = (-at(2.0 * h) + 8.0 * at(h) - 8.0 * at(-h) + at(-2.0 * h)) / (12.0 * h);
        acc += d * d;
    }
    acc
}

pub(crate) fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
    (a - b).norm() <= tol * a.norm().max(b.norm()).max(1.0)
}

/// Checks `λ₂/2 - λ₁ = -k² = μ` with `λ₁ = -k(k+n-1)` and `λ₂ = -2k(2k+n-1)`,
/// and confirms `λ₂` numerically on `P²` at random sphere points.
pub fn mu_relation_check(p: &Polynomial, n: usize, rng_seed: u64) -> Result<bool> {
    let report = require_eigen(p, n)?;
    let k = report.k;
    let l1 = int(sphere_eigenvalue(k, n));
    let l2 = int(sphere_eigenvalue(2 * k, n));
    if &l2 / int(2) - &l1 != int(sphere_mu(k)) {
        return Ok(false);
    }
    let sq = (p * p).to_numeric();
    let l2 = sphere_eigenvalue(2 * k, n) as f64;
    let mut rng = seeded_rng(rng_seed, 0);
    for _ in 0..FD_POINTS {
        let x = random_sphere_point(&mut rng, n + 1);
        let fd = sphere_laplacian_fd(&sq, &x);
        if !close(fd, sq.eval(&x) * l2, FD_TOL) {
            return Ok(false);
        }
    }
    Ok(true)
}
