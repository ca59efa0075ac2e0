//! Exact differential operators on polynomials in flat `R^N`.
//!
//! `kappa` is the complex-bilinear gradient pairing `sum_i dp/dx_i * dq/dx_i`
//! with no conjugation anywhere. A Hermitian pairing would make `z1` fail the
//! isotropy test and break every eigenfunction check downstream.

use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::polycore::{GaussianRational, Monomial, Polynomial};

/// Vector of polynomials sharing one variable count, e.g. a gradient.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyVector(pub Vec<Polynomial>);

impl PolyVector {
    pub fn components(&self) -> &[Polynomial] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Complex-bilinear dot product.
    pub fn dot(&self, other: &PolyVector) -> Polynomial {
        let nvars = self.0.first().map_or(0, Polynomial::nvars);
        self.0
            .iter()
            .zip(&other.0)
            .fold(Polynomial::zero(nvars), |acc, (a, b)| &acc + &(a * b))
    }
}

/// Square matrix of polynomials, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyMatrix {
    dim: usize,
    entries: Vec<Polynomial>,
}

impl PolyMatrix {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> &Polynomial {
        &self.entries[i * self.dim + j]
    }

    pub fn trace(&self) -> Polynomial {
        let nvars = self.entries.first().map_or(0, Polynomial::nvars);
        (0..self.dim).fold(Polynomial::zero(nvars), |acc, i| &acc + self.get(i, i))
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.dim).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    /// `v^T M w` with complex-bilinear products.
    pub fn bilinear(&self, v: &PolyVector, w: &PolyVector) -> Polynomial {
        let nvars = self.entries.first().map_or(0, Polynomial::nvars);
        let mut acc = Polynomial::zero(nvars);
        for i in 0..self.dim {
            for j in 0..self.dim {
                let h = self.get(i, j);
                if h.is_zero() {
                    continue;
                }
                acc = &acc + &(&(h * &v.0[i]) * &w.0[j]);
            }
        }
        acc
    }
}

/// Formal partial derivative in the zero-based variable `index`.
pub fn partial(p: &Polynomial, index: usize) -> Result<Polynomial> {
    if index >= p.nvars() {
        return Err(Error::IndexOutOfRange { index: index + 1, nvars: p.nvars() });
    }
    let terms = p.terms().filter_map(|(m, c)| {
        let e = m.exponents()[index];
        if e == 0 {
            return None;
        }
        let mut exps = m.exponents().to_vec();
        exps[index] -= 1;
        let factor = BigRational::from_integer(e.into());
        Some((Monomial::new(exps), c.scale(&factor)))
    });
    Polynomial::from_terms(p.nvars(), terms)
}

fn d(p: &Polynomial, i: usize) -> Polynomial {
    partial(p, i).expect("index within nvars")
}

pub fn gradient(p: &Polynomial) -> PolyVector {
    PolyVector((0..p.nvars()).map(|i| d(p, i)).collect())
}

pub fn laplacian(p: &Polynomial) -> Polynomial {
    (0..p.nvars()).fold(Polynomial::zero(p.nvars()), |acc, i| &acc + &d(&d(p, i), i))
}

pub fn hessian(p: &Polynomial) -> PolyMatrix {
    let n = p.nvars();
    let grad = gradient(p);
    let mut entries = vec![Polynomial::zero(n); n * n];
    for i in 0..n {
        for j in i..n {
            let h = d(&grad.0[i], j);
            entries[j * n + i] = h.clone();
            entries[i * n + j] = h;
        }
    }
    PolyMatrix { dim: n, entries }
}

/// `sum_i dp/dx_i * dq/dx_i`, complex-bilinear.
pub fn kappa(p: &Polynomial, q: &Polynomial) -> Result<Polynomial> {
    if p.nvars() != q.nvars() {
        return Err(Error::DimensionMismatch { expected: p.nvars(), found: q.nvars() });
    }
    Ok(gradient(p).dot(&gradient(q)))
}

/// `Hess p (grad p, grad p)`.
pub fn hess_grad_grad(p: &Polynomial) -> Polynomial {
    let n = p.nvars();
    let grad = gradient(p);
    let mut acc = Polynomial::zero(n);
    let two = GaussianRational::from_integer(2);
    for i in 0..n {
        if grad.0[i].is_zero() {
            continue;
        }
        for j in i..n {
            let h = d(&grad.0[i], j);
            if h.is_zero() {
                continue;
            }
            let term = &(&h * &grad.0[i]) * &grad.0[j];
            acc = if i == j { &acc + &term } else { &acc + &term.scale(&two) };
        }
    }
    acc
}

/// Euler operator `sum_i x_i dp/dx_i`.
pub fn euler(p: &Polynomial) -> Polynomial {
    let mut out = Polynomial::zero(p.nvars());
    for (m, c) in p.terms() {
        let k = m.degree();
        if k != 0 {
            out.add_term(m.clone(), c.scale(&BigRational::from_integer(k.into())));
        }
    }
    out
}

/// True iff `r^2` does not divide `p`.
pub fn r2_coprime(p: &Polynomial) -> Result<bool> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    Ok(p.exact_divide(&Polynomial::r_squared(p.nvars()))?.is_none())
}

/// Checks `Δ(φψ) = Δφ·ψ + 2κ(φ,ψ) + φ·Δψ` exactly.
pub fn identity_one_check(phi: &Polynomial, psi: &Polynomial) -> Result<bool> {
    let k = kappa(phi, psi)?;
    let lhs = laplacian(&(phi * psi));
    let rhs = &(&(&laplacian(phi) * psi) + &k.scale(&GaussianRational::from_integer(2)))
        + &(phi * &laplacian(psi));
    Ok((&lhs - &rhs).is_zero())
}

/// `2k(N+2k-2)` such that `Δ r^{2k} = coeff * r^{2k-2}` in `N` variables.
pub fn radial_laplacian_coefficient(nvars: usize, k: u32) -> i64 {
    let (n, k) = (nvars as i64, k as i64);
    2 * k * (n + 2 * k - 2)
}

/// Exact check of `Δ r^{2k} = 2k(N+2k-2) r^{2k-2}`.
pub fn radial_laplacian_law_holds(nvars: usize, k: u32) -> bool {
    if k == 0 {
        return laplacian(&Polynomial::one(nvars)).is_zero();
    }
    let r2 = Polynomial::r_squared(nvars);
    let lhs = laplacian(&r2.pow(k));
    let coeff = GaussianRational::from_integer(radial_laplacian_coefficient(nvars, k));
    let rhs = r2.pow(k - 1).scale(&coeff);
    lhs == rhs
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse;

    fn p(s: &str, n: usize) -> Polynomial {
        parse(s, n).unwrap()
    }

    #[test]
    fn partial_examples() {
        assert_eq!(partial(&p("x1^3", 1), 0).unwrap(), p("3*x1^2", 1));
        assert_eq!(partial(&p("x1*x2", 2), 1).unwrap(), p("x1", 2));
        assert!(partial(&p("5 - 2*i", 3), 0).unwrap().is_zero());
        assert!(matches!(partial(&p("x1", 2), 2), Err(Error::IndexOutOfRange { index: 3, .. })));
    }

    #[test]
    fn gradient_examples() {
        let g = gradient(&p("x1^2 - x2^2 + x3^2 - x4^2", 4));
        let want: Vec<_> = ["2*x1", "-2*x2", "2*x3", "-2*x4"].iter().map(|s| p(s, 4)).collect();
        assert_eq!(g.0, want);
        let g = gradient(&Polynomial::r_squared(3));
        assert_eq!(g.0, vec![p("2*x1", 3), p("2*x2", 3), p("2*x3", 3)]);
        assert!(gradient(&p("7", 3)).0.iter().all(Polynomial::is_zero));
    }

    #[test]
    fn laplacian_examples() {
        assert!(laplacian(&p("x1^2 - x2^2", 2)).is_zero());
        for n in 1..6 {
            assert_eq!(laplacian(&Polynomial::r_squared(n)), p(&format!("{}", 2 * n), n));
        }
    }

    #[test]
    fn hessian_examples() {
        let h = hessian(&p("x1^2 - x2^2 + x3^2 - x4^2", 4));
        for i in 0..4 {
            for j in 0..4 {
                let want = if i != j { 0 } else if i % 2 == 0 { 2 } else { -2 };
                assert_eq!(h.get(i, j), &p(&want.to_string(), 4));
            }
        }
        let h = hessian(&p("2*x1*x2 + 2*x3*x4", 4));
        assert_eq!(h.get(0, 1), &p("2", 4));
        assert_eq!(h.get(3, 2), &p("2", 4));
        assert!(h.get(0, 2).is_zero() && h.get(0, 0).is_zero());
        assert!(h.is_symmetric());
    }

    #[test]
    fn kappa_examples() {
        let z1 = p("x1 + i*x2", 2);
        assert!(kappa(&z1, &z1).unwrap().is_zero());
        let f = p("z1^2 + z2^2", 4);
        assert!(kappa(&f, &f).unwrap().is_zero());
        assert!(kappa(&p("x1", 2), &p("x2", 2)).unwrap().is_zero());
        assert_eq!(kappa(&p("x1^2", 1), &p("x1^2", 1)).unwrap(), p("4*x1^2", 1));
        assert!(kappa(&p("x1", 2), &p("x1", 3)).is_err());
    }

    #[test]
    fn hess_grad_grad_examples() {
        let q = p("x1^2 - x2^2 + x3^2 - x4^2", 4);
        assert_eq!(hess_grad_grad(&q), q.scale(&GaussianRational::from_integer(8)));
        // grad = (x3, -x4, x1, -x2); Hess pairs (1,3) -> 1 and (2,4) -> -1:
        // 2*x3*x1 + 2*(-1)*(-x4)*(-x2) = 2*(x1*x3 - x2*x4).
        let s = p("x1*x3 - x2*x4", 4);
        assert_eq!(hess_grad_grad(&s), s.scale(&GaussianRational::from_integer(2)));
        assert!(hess_grad_grad(&p("3*x1 - x2 + 2*i*x4", 4)).is_zero());
    }

    #[test]
    fn euler_examples() {
        let r2 = Polynomial::r_squared(4);
        assert_eq!(euler(&r2), r2.scale(&GaussianRational::from_integer(2)));
        assert_eq!(euler(&p("x1 + x2^2", 2)), p("x1 + 2*x2^2", 2));
    }

    #[test]
    fn r2_coprime_examples() {
        assert!(r2_coprime(&p("x1^2 - x2^2", 3)).unwrap());
        let r2x1 = &Polynomial::r_squared(3) * &p("x1", 3);
        assert!(!r2_coprime(&r2x1).unwrap());
        assert!(matches!(r2_coprime(&Polynomial::zero(3)), Err(Error::ZeroPolynomial)));
    }

    #[test]
    fn identity_one_examples() {
        let x1 = p("x1", 3);
        assert!(identity_one_check(&x1, &x1).unwrap());
        assert!(identity_one_check(&Polynomial::r_squared(3), &x1).unwrap());
        assert!(identity_one_check(&x1, &p("x1", 2)).is_err());
    }

    #[test]
    fn radial_law_small_cases() {
        // Δ r^4 in 3 variables: r^4 = sum x_i^4 + 2 sum_{i<j} x_i^2 x_j^2,
        // Δ = 12 sum x_i^2 + 2*2*2 sum_{i<j}(x_i^2 + x_j^2) = 12 r^2 + 8 r^2.
        assert_eq!(radial_laplacian_coefficient(3, 2), 20);
        assert!(radial_laplacian_law_holds(3, 2));
        assert!(radial_laplacian_law_holds(4, 0));
    }
}
