//! Oracles shared by the integration suites. Nothing here calls the
//! library's own finite-difference or curvature code.
#![allow(dead_code)]

use eigensphere::{seeded_rng, GaussianRational, Polynomial};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn poly(text: &str, nvars: usize) -> Polynomial {
    eigensphere::parse(text, nvars).unwrap()
}

pub fn sphere_point<R: Rng>(rng: &mut R, nvars: usize) -> Vec<f64> {
    let v: Vec<f64> = (0..nvars).map(|_| StandardNormal.sample(rng)).collect();
    let n = v.iter().map(|t| t * t).sum::<f64>().sqrt();
    v.into_iter().map(|t| t / n).collect()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Orthonormal basis of `x^⊥` by Gram–Schmidt on the coordinate vectors.
pub fn tangent_basis(x: &[f64]) -> Vec<Vec<f64>> {
    let n = x.len();
    let mut basis: Vec<Vec<f64>> = vec![x.to_vec()];
    for i in 0..n {
        let mut v = vec![0.0; n];
        v[i] = 1.0;
        for _ in 0..2 {
            for u in &basis {
                let p = dot(u, &v);
                v.iter_mut().zip(u).for_each(|(a, b)| *a -= p * b);
            }
        }
        let norm = dot(&v, &v).sqrt();
        if norm > 1e-6 {
            basis.push(v.iter().map(|t| t / norm).collect());
        }
        if basis.len() == n {
            break;
        }
    }
    basis.remove(0);
    basis
}

fn geodesic(x: &[f64], e: &[f64], t: f64) -> Vec<f64> {
    x.iter().zip(e).map(|(a, b)| t.cos() * a + t.sin() * b).collect()
}

/// Laplace–Beltrami of `f` at `x` on the unit sphere: sum of second
/// derivatives along great circles through `x` in an orthonormal tangent
/// frame, fourth-order central differences.
pub fn geodesic_laplacian(f: &dyn Fn(&[f64]) -> Complex64, x: &[f64]) -> Complex64 {
    let h = 1e-3;
    let f0 = f(x);
    tangent_basis(x)
        .iter()
        .map(|e| {
            let g = |t: f64| f(&geodesic(x, e, t));
            (-g(2.0 * h) + g(h) * 16.0 - f0 * 30.0 + g(-h) * 16.0 - g(-2.0 * h)) / (12.0 * h * h)
        })
        .sum()
}

/// Complex-bilinear square of the sphere gradient: `Σ_i (d/dt f(γ_i(t)))²`.
pub fn geodesic_gradient_square(f: &dyn Fn(&[f64]) -> Complex64, x: &[f64]) -> Complex64 {
    let h = 1e-4;
    tangent_basis(x)
        .iter()
        .map(|e| {
            let g = |t: f64| f(&geodesic(x, e, t));
            let d = (g(-2.0 * h) - g(-h) * 8.0 + g(h) * 8.0 - g(2.0 * h)) / (12.0 * h);
            d * d
        })
        .sum()
}

pub fn rel_close(a: Complex64, b: Complex64, tol: f64) -> bool {
    (a - b).norm() <= tol * b.norm().max(1.0)
}

fn gaussian_integer<R: Rng>(rng: &mut R) -> GaussianRational {
    GaussianRational::from_integer(rng.random_range(-3..=3))
        + GaussianRational::imaginary_unit() * GaussianRational::from_integer(rng.random_range(-3..=3))
}

/// `(a · x)^k` with an isotropic Gaussian-integer vector `a`, built from
/// pairs `(u, ±i u)`. Always an eigenfunction with `μ = -k²`.
pub fn isotropic_power(seed: u64, nvars: usize, k: u32) -> Polynomial {
    let mut rng = seeded_rng(seed, 0);
    loop {
        let mut linear = Polynomial::zero(nvars);
        for pair in 0..nvars / 2 {
            let u = gaussian_integer(&mut rng);
            let i = GaussianRational::imaginary_unit();
            let v = if rng.random_bool(0.5) { u.clone() * i } else { -(u.clone() * i) };
            let xa = Polynomial::variable(nvars, 2 * pair).unwrap();
            let xb = Polynomial::variable(nvars, 2 * pair + 1).unwrap();
            linear = &linear + &(&xa.scale(&u) + &xb.scale(&v));
        }
        if !linear.is_zero() {
            return linear.pow(k);
        }
    }
}

/// `z1^n z2^m` in four variables.
pub fn lawson(n: u32, m: u32) -> Polynomial {
    &poly("z1", 4).pow(n) * &poly("z2", 4).pow(m)
}
