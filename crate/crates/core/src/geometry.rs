//! Numeric layer: Newton projection onto sphere-intersected varieties, level
//! set mean curvature, stereographic projection and CSV export.
//!
//! A variety is the common zero set of real constraints `g_1..g_c`, optionally
//! together with `g_0 = (|x|² - 1)/2`. The sphere constraint always comes
//! first, so the first Gram–Schmidt normal is the position vector and the
//! corresponding mean-curvature component is the radial sanity value `-dim M`.

use std::fs::File;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use num_rational::BigRational;
use rayon::prelude::*;
use serde::Serialize;

use crate::calculus::{gradient, hess_grad_grad, hessian, laplacian};
use crate::eigen::random_sphere_point;
use crate::error::{Error, Result};
use crate::polycore::{GaussianRational, NumericPolynomial, Polynomial};
use crate::seeded_rng;

pub const DEFAULT_TOL: f64 = 1e-12;
pub const DEFAULT_EPS_REG: f64 = 1e-8;
pub const DEFAULT_MAXITER: usize = 50;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NewtonOptions {
    pub tol: f64,
    pub eps_reg: f64,
    pub maxiter: usize,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self { tol: DEFAULT_TOL, eps_reg: DEFAULT_EPS_REG, maxiter: DEFAULT_MAXITER }
    }
}

/// Value, gradient and Hessian of one constraint in `f64`.
#[derive(Clone, Debug)]
struct CompiledConstraint {
    value: NumericPolynomial,
    grad: Vec<NumericPolynomial>,
    hess: Vec<NumericPolynomial>,
}

impl CompiledConstraint {
    fn new(p: &Polynomial) -> Self {
        let n = p.nvars();
        let h = hessian(p);
        Self {
            value: p.to_numeric(),
            grad: gradient(p).0.iter().map(Polynomial::to_numeric).collect(),
            hess: (0..n * n).map(|k| h.get(k / n, k % n).to_numeric()).collect(),
        }
    }

    fn hessian_at(&self, x: &[f64]) -> DMatrix<f64> {
        let n = x.len();
        DMatrix::from_fn(n, n, |i, j| self.hess[i * n + j].eval_real(x))
    }
}

/// Zero set of real polynomial constraints, optionally intersected with the
/// unit sphere.
#[derive(Clone, Debug)]
pub struct VarietySpec {
    nvars: usize,
    constraints: Vec<Polynomial>,
    include_sphere: bool,
    compiled: Vec<CompiledConstraint>,
}

/// `(|x|² - 1) / 2`.
pub fn sphere_constraint(nvars: usize) -> Polynomial {
    let half = GaussianRational::real(BigRational::new(1.into(), 2.into()));
    (&Polynomial::r_squared(nvars) - &Polynomial::one(nvars)).scale(&half)
}

impl VarietySpec {
    pub fn new(nvars: usize, constraints: Vec<Polynomial>, include_sphere: bool) -> Result<Self> {
        for (idx, g) in constraints.iter().enumerate() {
            if g.nvars() != nvars {
                return Err(Error::DimensionMismatch { expected: nvars, found: g.nvars() });
            }
            if !g.is_real() {
                return Err(Error::NonRealConstraint(idx + 1));
            }
        }
        let rows = constraints.len() + usize::from(include_sphere);
        if rows == 0 || rows + 1 > nvars {
            return Err(Error::InvalidVariety(format!(
                "{rows} equations in {nvars} variables do not cut out a positive-dimensional set"
            )));
        }
        let mut compiled = Vec::with_capacity(rows);
        if include_sphere {
            compiled.push(CompiledConstraint::new(&sphere_constraint(nvars)));
        }
        compiled.extend(constraints.iter().map(CompiledConstraint::new));
        Ok(Self { nvars, constraints, include_sphere, compiled })
    }

    /// `{g_1 = ... = g_c = 0} ∩ S^{N-1}`.
    pub fn on_sphere(nvars: usize, constraints: Vec<Polynomial>) -> Result<Self> {
        Self::new(nvars, constraints, true)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn constraints(&self) -> &[Polynomial] {
        &self.constraints
    }

    pub fn include_sphere(&self) -> bool {
        self.include_sphere
    }

    /// Number of equations including the sphere.
    pub fn num_equations(&self) -> usize {
        self.compiled.len()
    }

    /// Dimension of the variety at a regular point.
    pub fn dimension(&self) -> usize {
        self.nvars - self.compiled.len()
    }

    pub fn values(&self, x: &[f64]) -> DVector<f64> {
        DVector::from_iterator(self.compiled.len(), self.compiled.iter().map(|c| c.value.eval_real(x)))
    }

    /// `max_a |g_a(x)|` over all equations.
    pub fn residual(&self, x: &[f64]) -> f64 {
        self.values(x).amax()
    }

    /// Rows are constraint gradients, sphere first.
    pub fn jacobian(&self, x: &[f64]) -> DMatrix<f64> {
        DMatrix::from_fn(self.compiled.len(), self.nvars, |a, i| self.compiled[a].grad[i].eval_real(x))
    }

    fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.nvars {
            return Err(Error::DimensionMismatch { expected: self.nvars, found: x.len() });
        }
        Ok(())
    }
}

pub fn smallest_singular_value(m: &DMatrix<f64>) -> f64 {
    m.singular_values().iter().copied().fold(f64::INFINITY, f64::min)
}

/// Least-squares Newton iteration `x <- x - J⁺ g` onto the variety.
///
/// Converges when every equation is below `tol`; the landing point must then
/// have a constraint Jacobian with smallest singular value at least `eps_reg`.
/// Rank-deficient steps use the minimum-norm pseudo-inverse, so inconsistent
/// systems stall and end in `NonConvergence`.
pub fn newton_project(spec: &VarietySpec, seed: &[f64], opts: &NewtonOptions) -> Result<Vec<f64>> {
    spec.check_point(seed)?;
    let mut x = DVector::from_column_slice(seed);
    for iter in 0..=opts.maxiter {
        let g = spec.values(x.as_slice());
        let res = g.amax();
        if !res.is_finite() {
            return Err(Error::NonConvergence(iter));
        }
        let jac = spec.jacobian(x.as_slice());
        if res < opts.tol {
            let sigma = smallest_singular_value(&jac);
            if sigma < opts.eps_reg {
                return Err(Error::SingularJacobian(sigma));
            }
            // one more step takes the residual to rounding level
            if let Some(step) = newton_step(&jac, &g) {
                let polished = &x - step;
                if spec.values(polished.as_slice()).amax() <= res {
                    x = polished;
                }
            }
            return Ok(x.as_slice().to_vec());
        }
        if iter == opts.maxiter {
            break;
        }
        x -= newton_step(&jac, &g).ok_or(Error::NonConvergence(iter))?;
    }
    Err(Error::NonConvergence(opts.maxiter))
}

fn newton_step(jac: &DMatrix<f64>, g: &DVector<f64>) -> Option<DVector<f64>> {
    let svd = jac.clone().svd(true, true);
    let cutoff = svd.singular_values.max() * 1e-13;
    svd.solve(g, cutoff.max(f64::MIN_POSITIVE)).ok()
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct SampleStats {
    pub requested: usize,
    pub attempts: usize,
    pub nonconverged: usize,
    /// Converged points rejected by the regularity threshold.
    pub singular: usize,
    pub tol: f64,
    pub eps_reg: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct PointCloud {
    pub nvars: usize,
    pub points: Vec<Vec<f64>>,
    /// `max_a |g_a(x)|` per point.
    pub residuals: Vec<f64>,
    /// Smallest singular value of the constraint Jacobian per point.
    pub regularity: Vec<f64>,
    pub stereo: Option<Vec<Vec<f64>>>,
    pub stats: SampleStats,
}

impl PointCloud {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Adds stereographic images from the given one-based pole coordinate.
    pub fn attach_stereo(&mut self, pole: usize) -> Result<()> {
        let images = self
            .points
            .iter()
            .map(|x| stereographic(x, pole))
            .collect::<Result<Vec<_>>>()?;
        self.stereo = Some(images);
        Ok(())
    }
}

enum Outcome {
    Point { x: Vec<f64>, residual: f64, regularity: f64 },
    NonConverged,
    Singular,
}

fn attempt(spec: &VarietySpec, rng_seed: u64, index: usize, opts: &NewtonOptions) -> Outcome {
    let mut rng = seeded_rng(rng_seed, index as u64);
    let start = random_sphere_point(&mut rng, spec.nvars());
    match newton_project(spec, &start, opts) {
        Ok(x) => {
            let residual = spec.residual(&x);
            let regularity = smallest_singular_value(&spec.jacobian(&x));
            Outcome::Point { x, residual, regularity }
        }
        Err(Error::SingularJacobian(_)) => Outcome::Singular,
        Err(_) => Outcome::NonConverged,
    }
}

/// Samples up to `count` regular points without enforcing a minimum yield.
///
/// Attempt `i` draws its Gaussian seed from stream `i` of `rng_seed`, so the
/// output is identical however the batches are scheduled.
pub fn sample_lenient(
    spec: &VarietySpec,
    count: usize,
    rng_seed: u64,
    opts: &NewtonOptions,
) -> Result<PointCloud> {
    if count == 0 {
        return Err(Error::EmptySampleRequest);
    }
    let mut cloud = PointCloud {
        nvars: spec.nvars(),
        stats: SampleStats { requested: count, tol: opts.tol, eps_reg: opts.eps_reg, ..Default::default() },
        ..Default::default()
    };
    let max_attempts = 10 * count;
    let batch = count.max(16);
    let mut next = 0;
    while cloud.len() < count && next < max_attempts {
        let end = (next + batch).min(max_attempts);
        let outcomes: Vec<Outcome> =
            (next..end).into_par_iter().map(|i| attempt(spec, rng_seed, i, opts)).collect();
        for outcome in outcomes {
            if cloud.len() == count {
                break;
            }
            cloud.stats.attempts += 1;
            match outcome {
                Outcome::Point { x, residual, regularity } => {
                    cloud.points.push(x);
                    cloud.residuals.push(residual);
                    cloud.regularity.push(regularity);
                }
                Outcome::NonConverged => cloud.stats.nonconverged += 1,
                Outcome::Singular => cloud.stats.singular += 1,
            }
        }
        next = end;
    }
    Ok(cloud)
}

/// Samples `count` regular points of the variety. Fewer points are returned
/// only when at least half the request was met within `10 * count` attempts.
pub fn sample(spec: &VarietySpec, count: usize, rng_seed: u64, opts: &NewtonOptions) -> Result<PointCloud> {
    let cloud = sample_lenient(spec, count, rng_seed, opts)?;
    if 2 * cloud.len() < count {
        return Err(Error::InsufficientYield { requested: count, found: cloud.len() });
    }
    Ok(cloud)
}

/// Orthonormal normal and tangent frames at a point of a sphere-intersected
/// variety.
#[derive(Clone, Debug)]
pub struct Frames {
    /// `ν_0 = x, ν_1, ..., ν_c`.
    pub normals: Vec<DVector<f64>>,
    /// Row `b` holds `C_{b·}` with `ν_b = Σ_a C_{ba} ∇g_a(x)`.
    pub coefficients: DMatrix<f64>,
    pub tangents: Vec<DVector<f64>>,
}

fn orthogonalize(v: &mut DVector<f64>, basis: &[DVector<f64>], coef: Option<(&mut DVector<f64>, &DMatrix<f64>)>) {
    let mut coef = coef;
    // two passes of modified Gram–Schmidt
    for _ in 0..2 {
        for (j, u) in basis.iter().enumerate() {
            let proj = u.dot(v);
            v.axpy(-proj, u, 1.0);
            if let Some((c, rows)) = coef.as_mut() {
                let row = rows.row(j).transpose();
                c.axpy(-proj, &row, 1.0);
            }
        }
    }
}

pub fn frames(spec: &VarietySpec, x: &[f64], eps_reg: f64) -> Result<Frames> {
    spec.check_point(x)?;
    let jac = spec.jacobian(x);
    let (rows, n) = jac.shape();
    let mut normals: Vec<DVector<f64>> = Vec::with_capacity(rows);
    let mut coefficients = DMatrix::<f64>::zeros(rows, rows);
    for b in 0..rows {
        let mut v = jac.row(b).transpose();
        let mut c = DVector::<f64>::zeros(rows);
        c[b] = 1.0;
        let prior = coefficients.rows(0, b).clone_owned();
        orthogonalize(&mut v, &normals, Some((&mut c, &prior)));
        let norm = v.norm();
        if norm < eps_reg {
            return Err(Error::SingularJacobian(norm));
        }
        normals.push(v / norm);
        coefficients.set_row(b, &(c / norm).transpose());
    }

    let mut tangents: Vec<DVector<f64>> = Vec::with_capacity(n - rows);
    let mut used = vec![false; n];
    while tangents.len() < n - rows {
        let mut best: Option<(usize, DVector<f64>, f64)> = None;
        for j in (0..n).filter(|&j| !used[j]) {
            let mut v = DVector::<f64>::zeros(n);
            v[j] = 1.0;
            orthogonalize(&mut v, &normals, None);
            orthogonalize(&mut v, &tangents, None);
            let norm = v.norm();
            if best.as_ref().is_none_or(|(_, _, bn)| norm > *bn) {
                best = Some((j, v, norm));
            }
        }
        let (j, v, norm) = best.expect("a free coordinate direction remains");
        used[j] = true;
        tangents.push(v / norm);
    }
    Ok(Frames { normals, coefficients, tangents })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CurvatureSample {
    pub point: Vec<f64>,
    /// `⟨H, ν_b⟩` for the sphere-intrinsic normals `ν_1..ν_c`.
    pub normal_components: Vec<f64>,
    /// `⟨H, x⟩`; equals `-dim M` on any sphere-intersected variety.
    pub radial_component: f64,
    /// Smallest singular value of the constraint Jacobian.
    pub frame_condition: f64,
}

/// Mean-curvature vector components of `M = {g = 0} ∩ S^{N-1}` at `x`.
///
/// For a unit normal `ν_b = Σ_a C_{ba} ∇g_a` and tangent `e`, differentiating
/// `g_a` twice along `M` gives `⟨II(e, e), ν_b⟩ = -Σ_a C_{ba} Hess g_a(e, e)`;
/// the trace over an orthonormal tangent frame is the `ν_b` component of the
/// (unnormalized) mean-curvature vector.
pub fn mean_curvature(spec: &VarietySpec, x: &[f64], opts: &NewtonOptions) -> Result<CurvatureSample> {
    if !spec.include_sphere() {
        return Err(Error::InvalidVariety("mean curvature needs the sphere constraint".into()));
    }
    spec.check_point(x)?;
    let res = spec.residual(x);
    if res.is_nan() || res > 10.0 * opts.tol {
        return Err(Error::OffVariety(res));
    }
    let frame_condition = smallest_singular_value(&spec.jacobian(x));
    let fr = frames(spec, x, opts.eps_reg)?;
    let hessians: Vec<DMatrix<f64>> = spec.compiled.iter().map(|c| c.hessian_at(x)).collect();
    let components: Vec<f64> = (0..fr.normals.len())
        .map(|b| {
            let mut combo = DMatrix::<f64>::zeros(x.len(), x.len());
            for (a, h) in hessians.iter().enumerate() {
                combo += h * fr.coefficients[(b, a)];
            }
            -fr.tangents.iter().map(|e| e.dot(&(&combo * e))).sum::<f64>()
        })
        .collect();
    Ok(CurvatureSample {
        point: x.to_vec(),
        radial_component: components[0],
        normal_components: components[1..].to_vec(),
        frame_condition,
    })
}

/// Precompiled data for the cone criterion of a real polynomial `P`.
#[derive(Clone, Debug)]
pub struct ConeCriterion {
    grad: Vec<NumericPolynomial>,
    lap: NumericPolynomial,
    hgg: NumericPolynomial,
    eps_reg: f64,
}

impl ConeCriterion {
    pub fn new(p: &Polynomial, eps_reg: f64) -> Result<Self> {
        if !p.is_real() {
            return Err(Error::NonRealConstraint(1));
        }
        Ok(Self {
            grad: gradient(p).0.iter().map(Polynomial::to_numeric).collect(),
            lap: laplacian(p).to_numeric(),
            hgg: hess_grad_grad(p).to_numeric(),
            eps_reg,
        })
    }

    fn grad_norm(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.grad.len() {
            return Err(Error::DimensionMismatch { expected: self.grad.len(), found: x.len() });
        }
        let g = self.grad.iter().map(|d| d.eval_real(x).powi(2)).sum::<f64>().sqrt();
        if g.is_nan() || g <= self.eps_reg {
            return Err(Error::DegeneratePoint(g));
        }
        Ok(g)
    }

    /// `(ΔP |∇P|² - Hess P(∇P, ∇P)) / |∇P|³`, the divergence of the unit
    /// normal of the level set through `x`.
    pub fn mean_curvature(&self, x: &[f64]) -> Result<f64> {
        let g = self.grad_norm(x)?;
        Ok((self.lap.eval_real(x) * g * g - self.hgg.eval_real(x)) / (g * g * g))
    }

    /// `Hess P(∇P, ∇P) / |∇P|³`.
    pub fn normalized_criterion(&self, x: &[f64]) -> Result<f64> {
        let g = self.grad_norm(x)?;
        Ok(self.hgg.eval_real(x) / (g * g * g))
    }
}

/// Euclidean mean curvature of the level set of `P` through `x`.
pub fn cone_mean_curvature(p: &Polynomial, x: &[f64]) -> Result<f64> {
    ConeCriterion::new(p, DEFAULT_EPS_REG)?.mean_curvature(x)
}

pub const POLE_EPS: f64 = 1e-12;

/// Stereographic projection from the one-based coordinate `pole`:
/// `y_i = x_i / (1 - x_pole)` over the remaining coordinates.
pub fn stereographic(x: &[f64], pole: usize) -> Result<Vec<f64>> {
    if pole == 0 || pole > x.len() {
        return Err(Error::IndexOutOfRange { index: pole, nvars: x.len() });
    }
    let dist2: f64 = x
        .iter()
        .enumerate()
        .map(|(i, &v)| if i + 1 == pole { (v - 1.0).powi(2) } else { v * v })
        .sum();
    let denom = 1.0 - x[pole - 1];
    if dist2.sqrt() <= POLE_EPS || denom.abs() <= POLE_EPS {
        return Err(Error::PoleSingularity);
    }
    Ok(x.iter()
        .enumerate()
        .filter(|(i, _)| i + 1 != pole)
        .map(|(_, &v)| v / denom)
        .collect())
}

fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

/// Writes `x1..xN[,s1..][,residual,regularity]` with 17 significant digits,
/// rows in generation order.
pub fn export_cloud(pc: &PointCloud, path: impl AsRef<Path>) -> Result<()> {
    let mut w = csv::Writer::from_writer(File::create(path)?);
    let stereo_dim = pc.stereo.as_ref().map_or(0, |_| pc.nvars.saturating_sub(1));
    let mut header: Vec<String> = (1..=pc.nvars).map(|i| format!("x{i}")).collect();
    header.extend((1..=stereo_dim).map(|i| format!("s{i}")));
    header.push("residual".into());
    header.push("regularity".into());
    w.write_record(&header)?;
    for (idx, x) in pc.points.iter().enumerate() {
        let mut row: Vec<String> = x.iter().copied().map(fmt17).collect();
        if let Some(st) = &pc.stereo {
            row.extend(st[idx].iter().copied().map(fmt17));
        }
        row.push(fmt17(pc.residuals[idx]));
        row.push(fmt17(pc.regularity[idx]));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a file written by [`export_cloud`]. Sampling statistics are not
/// stored in the file and come back empty.
pub fn read_cloud(path: impl AsRef<Path>) -> Result<PointCloud> {
    let mut r = csv::Reader::from_reader(File::open(path)?);
    let header = r.headers()?.clone();
    let nvars = header.iter().filter(|h| h.starts_with('x')).count();
    let nstereo = header.iter().filter(|h| h.starts_with('s')).count();
    if header.len() != nvars + nstereo + 2 {
        return Err(Error::MalformedCloud(format!("unexpected header {header:?}")));
    }
    let mut pc = PointCloud { nvars, ..Default::default() };
    if nstereo > 0 {
        pc.stereo = Some(Vec::new());
    }
    for rec in r.records() {
        let rec = rec?;
        let vals = rec
            .iter()
            .map(|s| s.parse::<f64>().map_err(|e| Error::MalformedCloud(e.to_string())))
            .collect::<Result<Vec<f64>>>()?;
        if vals.len() != header.len() {
            return Err(Error::MalformedCloud("row length differs from header".into()));
        }
        pc.points.push(vals[..nvars].to_vec());
        if let Some(st) = pc.stereo.as_mut() {
            st.push(vals[nvars..nvars + nstereo].to_vec());
        }
        pc.residuals.push(vals[nvars + nstereo]);
        pc.regularity.push(vals[nvars + nstereo + 1]);
    }
    Ok(pc)
}
