//! Minimality decisions for level sets of eigenfunctions on spheres.
//!
//! Codimension one: for a flat `(0, 0)`-eigenfunction `F` and a line
//! `a u + b v = 0` through the origin, `F⁻¹(l) ∩ Sⁿ` is minimal iff
//! `Q = Hess P(∇P, ∇P)` vanishes on it, where `P = a Re F + b Im F`. The
//! exact certificate is `Q ≡ 0` or `P | Q`; otherwise the normalized criterion
//! `Q / |∇P|³` is sampled on the sphere.
//!
//! Codimension two: the zero fiber of any `(λ, μ)`-eigenfunction is minimal;
//! [`check_minimal_codim2`] verifies this numerically through the level-set
//! mean curvature.

use std::f64::consts::PI;

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::calculus::{hess_grad_grad, kappa};
use crate::eigen::verify_eigenfunction;
use crate::error::{Error, Result};
use crate::geometry::{mean_curvature, sample_lenient, ConeCriterion, NewtonOptions, PointCloud, VarietySpec};
use crate::parser::{parse, render};
use crate::polycore::Polynomial;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum MinimalityStatus {
    ExactMinimal,
    NumericMinimal,
    NotMinimal,
    Inconclusive,
}

impl MinimalityStatus {
    pub fn is_minimal(self) -> bool {
        matches!(self, MinimalityStatus::ExactMinimal | MinimalityStatus::NumericMinimal)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Witness {
    pub point: Vec<f64>,
    /// On-variety residual `max_a |g_a(x)|`.
    pub residual: f64,
    /// Value of the criterion at the point.
    pub criterion: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MinimalityVerdict {
    pub status: MinimalityStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    /// Largest `|criterion|` over the regular samples.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_residual: Option<f64>,
    pub tol: f64,
    pub reject: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    /// Converged samples dropped by the regularity threshold.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub discarded_singular: Option<usize>,
    /// `max |⟨H, x⟩ + dim M|` over the samples (codimension two).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_radial_deviation: Option<f64>,
    /// `max min_j |z1 - ζ_j z2|` for `F = z1^k + z2^k`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub flat_section_residual: Option<f64>,
    /// `P = a Re F + b Im F` (codimension one).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pullback: Option<Polynomial>,
}

impl MinimalityVerdict {
    fn new(status: MinimalityStatus, opts: &MinimalityOptions) -> Self {
        Self {
            status,
            certificate: None,
            samples: None,
            max_residual: None,
            tol: opts.tol,
            reject: opts.reject,
            witness: None,
            reason: None,
            discarded_singular: None,
            max_radial_deviation: None,
            flat_section_residual: None,
            pullback: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MinimalityOptions {
    pub samples: usize,
    pub tol: f64,
    pub reject: f64,
    pub seed: u64,
    /// Also run the sampling check when an exact certificate exists.
    pub cross_check: bool,
    pub newton: NewtonOptions,
}

impl Default for MinimalityOptions {
    fn default() -> Self {
        Self {
            samples: 200,
            tol: 1e-8,
            reject: 1e-3,
            seed: 0,
            cross_check: true,
            newton: NewtonOptions::default(),
        }
    }
}

/// `a Re F + b Im F` with `(a, b)` rescaled by `1 / max(|a|, |b|)`.
///
/// The minimality criterion is invariant under rescaling the line, so no
/// square roots are taken.
pub fn line_pullback(f: &Polynomial, a: &BigRational, b: &BigRational) -> Result<Polynomial> {
    if a.is_zero() && b.is_zero() {
        return Err(Error::ZeroLine);
    }
    let scale = a.abs().max(b.abs());
    let (re, im) = f.real_imag_parts();
    Ok(&re.scale_rational(&(a / &scale)) + &im.scale_rational(&(b / &scale)))
}

fn require_eigen(f: &Polynomial, n: usize) -> Result<()> {
    let report = verify_eigenfunction(f, n)?;
    match report.failure {
        Some(fail) => Err(Error::NotAnEigenfunction(fail.condition)),
        None => Ok(()),
    }
}

/// Largest `|value|` and where it occurs.
struct Extremum {
    value: f64,
    index: usize,
}

fn extremum(values: &[f64]) -> Option<Extremum> {
    values
        .iter()
        .enumerate()
        .map(|(index, v)| Extremum { value: v.abs(), index })
        .max_by(|a, b| a.value.total_cmp(&b.value))
}

/// Maps sampled evidence onto a status.
fn numeric_status(
    verdict: &mut MinimalityVerdict,
    cloud: &PointCloud,
    criteria: &[f64],
    requested: usize,
) {
    verdict.samples = Some(criteria.len());
    verdict.discarded_singular = Some(cloud.stats.singular);
    let Some(ext) = extremum(criteria) else {
        verdict.status = MinimalityStatus::Inconclusive;
        verdict.reason = Some("no regular samples on the variety".into());
        return;
    };
    verdict.max_residual = Some(ext.value);
    if ext.value > verdict.reject {
        verdict.status = MinimalityStatus::NotMinimal;
        verdict.witness = Some(Witness {
            point: cloud.points[ext.index].clone(),
            residual: cloud.residuals[ext.index],
            criterion: criteria[ext.index],
        });
    } else if 2 * criteria.len() < requested {
        verdict.status = MinimalityStatus::Inconclusive;
        verdict.reason = Some(format!(
            "insufficient yield: {} of {} requested samples",
            criteria.len(),
            requested
        ));
    } else if ext.value < verdict.tol {
        verdict.status = MinimalityStatus::NumericMinimal;
    } else {
        verdict.status = MinimalityStatus::Inconclusive;
        verdict.reason = Some(format!(
            "max criterion {:e} lies between tol and reject",
            ext.value
        ));
    }
}

/// Samples `{P = 0} ∩ Sⁿ` and evaluates `Q / |∇P|³` at every regular point.
fn sample_cone_criterion(p: &Polynomial, opts: &MinimalityOptions) -> Result<(PointCloud, Vec<f64>)> {
    let spec = VarietySpec::on_sphere(p.nvars(), vec![p.clone()])?;
    let mut cloud = sample_lenient(&spec, opts.samples.max(1), opts.seed, &opts.newton)?;
    let crit = ConeCriterion::new(p, opts.newton.eps_reg)?;
    let values: Vec<Option<f64>> =
        cloud.points.par_iter().map(|x| crit.normalized_criterion(x).ok()).collect();
    // drop points where the gradient of P itself degenerates
    let degenerate = values.iter().filter(|v| v.is_none()).count();
    if degenerate > 0 {
        let mut kept = PointCloud { points: vec![], residuals: vec![], regularity: vec![], ..cloud.clone() };
        for (i, v) in values.iter().enumerate() {
            if v.is_some() {
                kept.points.push(cloud.points[i].clone());
                kept.residuals.push(cloud.residuals[i]);
                kept.regularity.push(cloud.regularity[i]);
            }
        }
        kept.stats.singular += degenerate;
        cloud = kept;
    }
    Ok((cloud, values.into_iter().flatten().collect()))
}

/// Decides minimality of `F⁻¹(l) ∩ Sⁿ` for the line `a u + b v = 0`.
pub fn check_minimal_codim1(
    f: &Polynomial,
    a: &BigRational,
    b: &BigRational,
    n: usize,
    opts: &MinimalityOptions,
) -> Result<MinimalityVerdict> {
    require_eigen(f, n)?;
    let p = line_pullback(f, a, b)?;
    let mut verdict = MinimalityVerdict::new(MinimalityStatus::Inconclusive, opts);
    if p.is_zero() {
        verdict.reason = Some("a Re F + b Im F vanishes identically".into());
        return Ok(verdict);
    }
    let q = hess_grad_grad(&p);
    let certificate = if q.is_zero() {
        Some("Q = 0".to_string())
    } else {
        q.exact_divide(&p)?.map(|quotient| render(&quotient))
    };
    verdict.pullback = Some(p.clone());

    if certificate.is_none() || (opts.cross_check && opts.samples > 0) {
        let (cloud, criteria) = sample_cone_criterion(&p, opts)?;
        numeric_status(&mut verdict, &cloud, &criteria, opts.samples);
    }
    if let Some(cert) = certificate {
        verdict.status = MinimalityStatus::ExactMinimal;
        verdict.certificate = Some(cert);
        verdict.reason = None;
        verdict.witness = None;
    }
    Ok(verdict)
}

/// Roots `ζ` of `ζ^k = -1`.
fn roots_of_minus_one(k: u32) -> Vec<Complex64> {
    (0..k)
        .map(|j| Complex64::from_polar(1.0, PI * (2 * j + 1) as f64 / k as f64))
        .collect()
}

/// `min_j |z1 - ζ_j z2|` over the `k`-th roots of `-1`, with
/// `z1 = x1 + i x2`, `z2 = x3 + i x4`.
pub fn flat_section_residual(x: &[f64], k: u32) -> f64 {
    let z1 = Complex64::new(x[0], x[1]);
    let z2 = Complex64::new(x[2], x[3]);
    roots_of_minus_one(k)
        .into_iter()
        .map(|zeta| (z1 - zeta * z2).norm())
        .fold(f64::INFINITY, f64::min)
}

/// `k` when `F = z1^k + z2^k`.
fn sum_of_powers_degree(f: &Polynomial) -> Option<u32> {
    if f.nvars() < 4 {
        return None;
    }
    let k = f.homogeneity().ok().flatten()?;
    (k >= 1 && parse(&format!("z1^{k} + z2^{k}"), f.nvars()).ok()? == *f).then_some(k)
}

/// Numerically verifies that `F⁻¹(0) ∩ Sⁿ` is minimal of codimension two.
///
/// The fiber is sampled before the eigenfunction conditions are examined, so
/// an empty or everywhere-singular fiber is reported as such even for inputs
/// that also fail the eigenfunction test.
pub fn check_minimal_codim2(f: &Polynomial, n: usize, opts: &MinimalityOptions) -> Result<MinimalityVerdict> {
    let report = verify_eigenfunction(f, n)?;
    let (u, v) = f.real_imag_parts();
    let spec = VarietySpec::on_sphere(f.nvars(), vec![u, v])?;
    let cloud = sample_lenient(&spec, opts.samples.max(1), opts.seed, &opts.newton)?;
    if cloud.is_empty() {
        return Err(if cloud.stats.singular > 0 {
            Error::SingularFiber(cloud.stats.singular)
        } else {
            Error::EmptyFiber
        });
    }
    if let Some(fail) = report.failure {
        return Err(Error::NotAnEigenfunction(fail.condition));
    }

    let curvatures = cloud
        .points
        .par_iter()
        .map(|x| mean_curvature(&spec, x, &opts.newton))
        .collect::<Result<Vec<_>>>()?;
    let criteria: Vec<f64> = curvatures
        .iter()
        .map(|c| c.normal_components.iter().fold(0.0f64, |m, v| if v.abs() > m.abs() { *v } else { m }))
        .collect();
    let dim = spec.dimension() as f64;
    let mut verdict = MinimalityVerdict::new(MinimalityStatus::Inconclusive, opts);
    verdict.max_radial_deviation = Some(
        curvatures
            .iter()
            .map(|c| (c.radial_component + dim).abs())
            .fold(0.0, f64::max),
    );
    if let Some(k) = sum_of_powers_degree(f) {
        verdict.flat_section_residual = Some(
            cloud
                .points
                .iter()
                .map(|x| flat_section_residual(x, k))
                .fold(0.0, f64::max),
        );
    }
    numeric_status(&mut verdict, &cloud, &criteria, opts.samples);
    Ok(verdict)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConformalityReport {
    /// `κ(u, u) - κ(v, v)`.
    pub difference: Polynomial,
    /// `κ(u, v)`.
    pub cross: Polynomial,
    /// Both polynomials vanish: `|∇u| = |∇v|` and `∇u ⊥ ∇v` everywhere.
    pub conformal: bool,
}

/// Horizontal conformality of `F = u + i v` with equal eigenvalues.
pub fn conformality_diagnostics(f: &Polynomial) -> ConformalityReport {
    let (u, v) = f.real_imag_parts();
    let uu = kappa(&u, &u).expect("same nvars");
    let vv = kappa(&v, &v).expect("same nvars");
    let difference = &uu - &vv;
    let cross = kappa(&u, &v).expect("same nvars");
    let conformal = difference.is_zero() && cross.is_zero();
    ConformalityReport { difference, cross, conformal }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum LawsonType {
    Sphere,
    Torus,
    KleinBottle,
}

/// Topological type of the Lawson surface `Im(z1^n conj(z2)^m) = 0`.
pub fn classify_lawson(n: u32, m: u32) -> Result<LawsonType> {
    match (n, m) {
        (0, 0) => Err(Error::BothZero),
        (0, _) | (_, 0) => Ok(LawsonType::Sphere),
        _ if (n as u64 * m as u64) % 2 == 1 => Ok(LawsonType::Torus),
        _ => Ok(LawsonType::KleinBottle),
    }
}

/// `z1^n * z2^m` in four real variables.
pub fn lawson_polynomial(n: u32, m: u32) -> Polynomial {
    let z1 = parse("z1", 4).expect("valid");
    let z2 = parse("z2", 4).expect("valid");
    &z1.pow(n) * &z2.pow(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse;

    fn p(s: &str, n: usize) -> Polynomial {
        parse(s, n).unwrap()
    }

    fn q(v: i64) -> BigRational {
        BigRational::from_integer(v.into())
    }

    #[test]
    fn pullback_examples() {
        let f = p("z1^2 + z2^2", 4);
        assert_eq!(line_pullback(&f, &q(1), &q(0)).unwrap(), p("x1^2 - x2^2 + x3^2 - x4^2", 4));
        assert_eq!(line_pullback(&f, &q(0), &q(1)).unwrap(), p("2*x1*x2 + 2*x3*x4", 4));
        let real = p("x1*x2 - x3^2", 4);
        assert_eq!(line_pullback(&real, &q(3), &q(5)).unwrap(), real.scale_rational(&BigRational::new(3.into(), 5.into())));
        assert!(matches!(line_pullback(&f, &q(0), &q(0)), Err(Error::ZeroLine)));
    }

    #[test]
    fn clifford_exact_certificate() {
        let opts = MinimalityOptions { samples: 50, ..Default::default() };
        let v = check_minimal_codim1(&p("z1^2 + z2^2", 4), &q(1), &q(0), 3, &opts).unwrap();
        assert_eq!(v.status, MinimalityStatus::ExactMinimal);
        assert_eq!(v.certificate.as_deref(), Some("8"));
        assert!(v.max_residual.unwrap() < 1e-8);
    }

    #[test]
    fn real_linear_form_is_rejected() {
        let r = check_minimal_codim1(&p("x1 + x2", 4), &q(1), &q(0), 3, &MinimalityOptions::default());
        assert!(matches!(r, Err(Error::NotAnEigenfunction(_))));
    }

    #[test]
    fn codim2_great_circles() {
        let opts = MinimalityOptions { samples: 100, ..Default::default() };
        let v = check_minimal_codim2(&p("z1^2 + z2^2", 4), 3, &opts).unwrap();
        assert_eq!(v.status, MinimalityStatus::NumericMinimal);
        assert!(v.max_radial_deviation.unwrap() < 1e-8);
        let v = check_minimal_codim2(&p("z1", 4), 3, &opts).unwrap();
        assert_eq!(v.status, MinimalityStatus::NumericMinimal);
    }

    #[test]
    fn codim2_real_function_has_singular_fiber() {
        let opts = MinimalityOptions { samples: 20, ..Default::default() };
        let r = check_minimal_codim2(&p("x1", 4), 3, &opts);
        assert!(matches!(r, Err(Error::SingularFiber(_))), "{r:?}");
    }

    #[test]
    fn conformality_examples() {
        for (n, m) in [(1, 1), (2, 1), (2, 2)] {
            assert!(conformality_diagnostics(&lawson_polynomial(n, m)).conformal);
        }
        let r = conformality_diagnostics(&p("x1 + 2*i*x2", 4));
        assert_eq!(r.difference, p("-3", 4));
        assert!(!r.conformal);
        assert!(conformality_diagnostics(&p("z1^2 + z2^2", 4)).conformal);
    }

    #[test]
    fn lawson_table() {
        assert_eq!(classify_lawson(0, 5).unwrap(), LawsonType::Sphere);
        assert_eq!(classify_lawson(1, 3).unwrap(), LawsonType::Torus);
        assert_eq!(classify_lawson(2, 1).unwrap(), LawsonType::KleinBottle);
        assert!(matches!(classify_lawson(0, 0), Err(Error::BothZero)));
    }

    #[test]
    fn flat_section_residual_on_plane() {
        // z1 = ζ z2 with ζ = e^{iπ/3}, a cube root of -1
        let zeta = Complex64::from_polar(1.0, PI / 3.0);
        let z2 = Complex64::new(0.6, 0.0);
        let z1 = zeta * z2;
        assert!(flat_section_residual(&[z1.re, z1.im, z2.re, z2.im, 0.0], 3) < 1e-15);
        assert!(flat_section_residual(&[0.6, 0.0, 0.6, 0.0, 0.0], 3) > 0.1);
    }
}
