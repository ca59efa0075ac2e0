//! Numerical search for harmonic homogeneous polynomials with isotropic
//! gradient, followed by exact rationalization.
//!
//! The unknowns are the complex coefficients `c_j = α_j + i β_j` of a degree-`d`
//! form `P = Σ c_j m_j`. The residual vector collects the real and imaginary
//! parts of the coefficients of `ΔP` and `κ(P, P)` plus the gauge term
//! `‖θ‖² - 1`, and is driven to zero by Levenberg–Marquardt from Gaussian
//! starting points.

use std::cmp::Ordering;

use nalgebra::{DMatrix, DVector};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::calculus::{kappa, laplacian};
use crate::eigen::verify_eigenfunction;
use crate::error::{Error, Result};
use crate::polycore::{GaussianRational, Monomial, Polynomial};
use crate::seeded_rng;

pub const DEFAULT_DENOMINATOR_BOUND: u64 = 64;
/// Residual below which a candidate counts as a solution.
pub const ACCEPT_RESIDUAL: f64 = 1e-10;

/// Residual map and Jacobian for a fixed number of variables and degree.
#[derive(Clone, Debug)]
pub struct SearchProblem {
    nvars: usize,
    degree: u32,
    basis: Vec<Monomial>,
    /// `(row, j, w)`: `(ΔP)_row += w c_j`.
    lap: Vec<(usize, usize, f64)>,
    lap_rows: usize,
    /// `(row, j, l, w)` with `j <= l`: `κ(P,P)_row += w c_j c_l`.
    kap: Vec<(usize, usize, usize, f64)>,
    kap_rows: usize,
}

fn index_of(monomials: &[Monomial], m: &Monomial) -> usize {
    monomials.binary_search(m).expect("degree-consistent monomial")
}

impl SearchProblem {
    pub fn new(nvars: usize, degree: u32) -> Result<Self> {
        if nvars < 3 {
            return Err(Error::SphereDimensionTooSmall(nvars.saturating_sub(1)));
        }
        let basis = Monomial::all_of_degree(nvars, degree);
        let polys: Vec<Polynomial> = basis
            .iter()
            .map(|m| Polynomial::from_terms(nvars, [(m.clone(), GaussianRational::from_integer(1))]))
            .collect::<Result<_>>()?;

        let lap_targets = if degree >= 2 { Monomial::all_of_degree(nvars, degree - 2) } else { Vec::new() };
        let mut lap = Vec::new();
        for (j, p) in polys.iter().enumerate() {
            for (m, c) in laplacian(p).terms() {
                lap.push((index_of(&lap_targets, m), j, c.to_complex64().re));
            }
        }

        let kap_targets = if degree >= 1 { Monomial::all_of_degree(nvars, 2 * degree - 2) } else { Vec::new() };
        let mut kap = Vec::new();
        for j in 0..polys.len() {
            for l in j..polys.len() {
                let factor = if j == l { 1.0 } else { 2.0 };
                for (m, c) in kappa(&polys[j], &polys[l])?.terms() {
                    kap.push((index_of(&kap_targets, m), j, l, factor * c.to_complex64().re));
                }
            }
        }
        Ok(Self {
            nvars,
            degree,
            basis,
            lap,
            lap_rows: lap_targets.len(),
            kap,
            kap_rows: kap_targets.len(),
        })
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn basis(&self) -> &[Monomial] {
        &self.basis
    }

    /// Number of real parameters, `2 * basis.len()`.
    pub fn num_params(&self) -> usize {
        2 * self.basis.len()
    }

    pub fn num_residuals(&self) -> usize {
        2 * (self.lap_rows + self.kap_rows) + 1
    }

    fn complex_coefficients(&self, theta: &[f64]) -> Vec<Complex64> {
        theta.chunks_exact(2).map(|p| Complex64::new(p[0], p[1])).collect()
    }

    fn laplacian_values(&self, c: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.lap_rows];
        for &(row, j, w) in &self.lap {
            out[row] += c[j] * w;
        }
        out
    }

    fn kappa_values(&self, c: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.kap_rows];
        for &(row, j, l, w) in &self.kap {
            out[row] += c[j] * c[l] * w;
        }
        out
    }

    /// Residual vector at `θ = (α_1, β_1, α_2, β_2, ...)`.
    pub fn residuals(&self, theta: &[f64]) -> DVector<f64> {
        let c = self.complex_coefficients(theta);
        let mut r = Vec::with_capacity(self.num_residuals());
        for v in self.laplacian_values(&c).into_iter().chain(self.kappa_values(&c)) {
            r.push(v.re);
            r.push(v.im);
        }
        r.push(theta.iter().map(|t| t * t).sum::<f64>() - 1.0);
        DVector::from_vec(r)
    }

    /// Analytic Jacobian of [`residuals`](Self::residuals).
    ///
    /// For a holomorphic residual `R` with `D = ∂R/∂c_j`:
    /// `∂Re R/∂α = Re D`, `∂Re R/∂β = -Im D`, `∂Im R/∂α = Im D`, `∂Im R/∂β = Re D`.
    pub fn jacobian(&self, theta: &[f64]) -> DMatrix<f64> {
        let c = self.complex_coefficients(theta);
        let mut jac = DMatrix::zeros(self.num_residuals(), self.num_params());
        let mut put = |row: usize, j: usize, d: Complex64| {
            jac[(2 * row, 2 * j)] += d.re;
            jac[(2 * row, 2 * j + 1)] -= d.im;
            jac[(2 * row + 1, 2 * j)] += d.im;
            jac[(2 * row + 1, 2 * j + 1)] += d.re;
        };
        for &(row, j, w) in &self.lap {
            put(row, j, Complex64::new(w, 0.0));
        }
        for &(row, j, l, w) in &self.kap {
            put(self.lap_rows + row, j, c[l] * w);
            put(self.lap_rows + row, l, c[j] * w);
        }
        let last = self.num_residuals() - 1;
        for (k, t) in theta.iter().enumerate() {
            jac[(last, k)] = 2.0 * t;
        }
        jac
    }

    /// Residual norm of a coefficient vector after scaling it to unit norm.
    pub fn residual_norm(&self, coefficients: &[Complex64]) -> f64 {
        let theta = normalized(&to_theta(coefficients));
        self.residuals(theta.as_slice()).norm()
    }
}

fn to_theta(c: &[Complex64]) -> DVector<f64> {
    DVector::from_iterator(2 * c.len(), c.iter().flat_map(|z| [z.re, z.im]))
}

fn normalized(theta: &DVector<f64>) -> DVector<f64> {
    let n = theta.norm();
    if n > 0.0 {
        theta / n
    } else {
        theta.clone()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SearchOptions {
    pub attempts: usize,
    pub seed: u64,
    pub denominator_bound: u64,
    pub max_iter: usize,
    /// Residual below which a candidate is rationalized.
    pub accept: f64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            attempts: 50,
            seed: 0,
            denominator_bound: DEFAULT_DENOMINATOR_BOUND,
            max_iter: 500,
            accept: ACCEPT_RESIDUAL,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SearchResult {
    pub attempt: usize,
    /// `[re, im]` per basis monomial, in ascending graded-lex order.
    pub coefficients: Vec<[f64; 2]>,
    pub residual: f64,
    pub exact: Option<Polynomial>,
}

impl SearchResult {
    pub fn complex_coefficients(&self) -> Vec<Complex64> {
        self.coefficients.iter().map(|[re, im]| Complex64::new(*re, *im)).collect()
    }
}

/// Damped Gauss–Newton on `‖r(θ)‖²`. Parameters with `free[k] == false` stay
/// fixed.
fn levenberg_marquardt(problem: &SearchProblem, mut theta: DVector<f64>, free: &[bool], max_iter: usize) -> DVector<f64> {
    let mut r = problem.residuals(theta.as_slice());
    let mut cost = r.norm_squared();
    let mut lambda = 1e-3;
    for _ in 0..max_iter {
        if cost < 1e-30 {
            break;
        }
        let mut jac = problem.jacobian(theta.as_slice());
        for (k, f) in free.iter().enumerate() {
            if !f {
                jac.column_mut(k).fill(0.0);
            }
        }
        let grad = jac.transpose() * &r;
        if grad.amax() < 1e-300 {
            break;
        }
        let normal = jac.transpose() * &jac;
        let mut accepted = false;
        while lambda < 1e16 {
            let mut damped = normal.clone();
            for k in 0..damped.nrows() {
                damped[(k, k)] += lambda * normal[(k, k)].max(1e-12);
            }
            let Some(chol) = damped.cholesky() else {
                lambda *= 4.0;
                continue;
            };
            let step = chol.solve(&(-&grad));
            let trial = &theta + &step;
            let trial_r = problem.residuals(trial.as_slice());
            let trial_cost = trial_r.norm_squared();
            if trial_cost < cost {
                let small_step = step.norm() <= 1e-16 * (1.0 + theta.norm());
                theta = trial;
                r = trial_r;
                cost = trial_cost;
                lambda = (lambda / 3.0).max(1e-15);
                accepted = !small_step;
                break;
            }
            lambda *= 4.0;
        }
        if !accepted {
            break;
        }
    }
    theta
}

/// Pins coefficients to zero, smallest first, while the re-solved residual
/// stays below `accept`.
fn sparsify(problem: &SearchProblem, mut theta: DVector<f64>, accept: f64, max_iter: usize) -> DVector<f64> {
    let m = problem.basis.len();
    let mut free = vec![true; 2 * m];
    loop {
        let mut order: Vec<usize> = (0..m).filter(|&j| free[2 * j]).collect();
        order.sort_by(|&a, &b| {
            let na = theta[2 * a].hypot(theta[2 * a + 1]);
            let nb = theta[2 * b].hypot(theta[2 * b + 1]);
            na.total_cmp(&nb).then(a.cmp(&b))
        });
        let mut progressed = false;
        for &j in order.iter().take(3) {
            let mut trial_free = free.clone();
            trial_free[2 * j] = false;
            trial_free[2 * j + 1] = false;
            let mut start = theta.clone();
            start[2 * j] = 0.0;
            start[2 * j + 1] = 0.0;
            let solved = normalized(&levenberg_marquardt(problem, start, &trial_free, max_iter));
            if problem.residuals(solved.as_slice()).norm() < accept {
                theta = solved;
                free = trial_free;
                progressed = true;
                break;
            }
        }
        if !progressed {
            return theta;
        }
    }
}

/// Nearest rational to `x` with denominator at most `bound`.
fn nearest_rational(x: f64, bound: u64) -> Option<BigRational> {
    if !x.is_finite() || x.abs() > 1e15 {
        return None;
    }
    let mut best: Option<(f64, i64, i64)> = None;
    for q in 1..=bound.max(1) as i64 {
        let p = (x * q as f64).round();
        let err = (x - p / q as f64).abs();
        if best.is_none_or(|(e, _, _)| err < e) {
            best = Some((err, p as i64, q));
        }
    }
    best.map(|(_, p, q)| BigRational::new(BigInt::from(p), BigInt::from(q)))
}

fn round_and_verify(basis: &[Monomial], nvars: usize, c: &[Complex64], bound: u64) -> Option<Polynomial> {
    let mut terms = Vec::with_capacity(c.len());
    for (m, z) in basis.iter().zip(c) {
        let g = GaussianRational::new(nearest_rational(z.re, bound)?, nearest_rational(z.im, bound)?);
        terms.push((m.clone(), g));
    }
    let p = Polynomial::from_terms(nvars, terms).ok()?;
    if p.is_zero() {
        return None;
    }
    let report = verify_eigenfunction(&p, nvars - 1).ok()?;
    report.is_eigen.then_some(p)
}

/// Rounds each coefficient to the nearest Gaussian rational with denominator
/// at most `denominator_bound` and keeps the result only if it passes the
/// exact eigenfunction test.
///
/// Coefficients are tried as given and then after division by the one of
/// largest modulus, which removes the arbitrary phase and scale.
pub fn rationalize_and_verify(
    nvars: usize,
    degree: u32,
    coefficients: &[Complex64],
    denominator_bound: u64,
) -> Option<Polynomial> {
    if nvars < 3 {
        return None;
    }
    let basis = Monomial::all_of_degree(nvars, degree);
    if basis.len() != coefficients.len() {
        return None;
    }
    if let Some(p) = round_and_verify(&basis, nvars, coefficients, denominator_bound) {
        return Some(p);
    }
    let pivot = coefficients
        .iter()
        .copied()
        .max_by(|a, b| a.norm().total_cmp(&b.norm()))?;
    if pivot.norm() == 0.0 {
        return None;
    }
    let scaled: Vec<Complex64> = coefficients.iter().map(|z| z / pivot).collect();
    round_and_verify(&basis, nvars, &scaled, denominator_bound)
}

fn run_attempt(problem: &SearchProblem, attempt: usize, opts: &SearchOptions) -> SearchResult {
    let mut rng = seeded_rng(opts.seed, attempt as u64);
    let init = DVector::from_iterator(
        problem.num_params(),
        (0..problem.num_params()).map(|_| StandardNormal.sample(&mut rng)),
    );
    let free = vec![true; problem.num_params()];
    let theta = normalized(&levenberg_marquardt(problem, normalized(&init), &free, opts.max_iter));
    let residual = problem.residuals(theta.as_slice()).norm();
    let coefficients = problem.complex_coefficients(theta.as_slice());

    let mut exact = None;
    if residual < opts.accept {
        exact = rationalize_and_verify(problem.nvars, problem.degree, &coefficients, opts.denominator_bound);
        if exact.is_none() {
            let sparse = sparsify(problem, theta.clone(), opts.accept, opts.max_iter);
            let c = problem.complex_coefficients(sparse.as_slice());
            exact = rationalize_and_verify(problem.nvars, problem.degree, &c, opts.denominator_bound);
        }
    }
    SearchResult {
        attempt,
        coefficients: coefficients.iter().map(|z| [z.re, z.im]).collect(),
        residual,
        exact,
    }
}

/// Multistart search; results are sorted by residual, ties by attempt index.
pub fn search_eigen_with(nvars: usize, degree: u32, opts: &SearchOptions) -> Result<Vec<SearchResult>> {
    let problem = SearchProblem::new(nvars, degree)?;
    let mut results: Vec<SearchResult> = (0..opts.attempts)
        .into_par_iter()
        .map(|a| run_attempt(&problem, a, opts))
        .collect();
    results.sort_by(|a, b| {
        a.residual
            .partial_cmp(&b.residual)
            .unwrap_or(Ordering::Equal)
            .then(a.attempt.cmp(&b.attempt))
    });
    Ok(results)
}

pub fn search_eigen(nvars: usize, degree: u32, attempts: usize, rng_seed: u64) -> Result<Vec<SearchResult>> {
    search_eigen_with(nvars, degree, &SearchOptions { attempts, seed: rng_seed, ..Default::default() })
}
