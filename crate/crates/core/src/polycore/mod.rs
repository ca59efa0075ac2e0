//! Exact sparse multivariate polynomials over the Gaussian rationals.
//!
//! A [`Polynomial`] lives in a fixed number of real variables `x1..xN` and
//! keeps its terms in a `BTreeMap` keyed by graded-lex [`Monomial`]s, so the
//! stored form is canonical: equal polynomials have identical term maps and
//! no stored coefficient is zero.

mod gaussian;
mod monomial;

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;
use serde::{Serialize, Serializer};

pub use gaussian::GaussianRational;
pub use monomial::Monomial;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Polynomial {
    nvars: usize,
    terms: BTreeMap<Monomial, GaussianRational>,
}

impl Polynomial {
    pub fn zero(nvars: usize) -> Self {
        Self { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: GaussianRational) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(Monomial::one(nvars), c);
        p
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, GaussianRational::one())
    }

    /// The coordinate `x_{index+1}` (zero-based index).
    pub fn variable(nvars: usize, index: usize) -> Result<Self> {
        if index >= nvars {
            return Err(Error::IndexOutOfRange { index: index + 1, nvars });
        }
        let mut p = Self::zero(nvars);
        p.add_term(Monomial::variable(nvars, index), GaussianRational::one());
        Ok(p)
    }

    /// `r^2 = x1^2 + ... + xN^2`.
    pub fn r_squared(nvars: usize) -> Self {
        let mut p = Self::zero(nvars);
        for i in 0..nvars {
            let mut e = vec![0; nvars];
            e[i] = 2;
            p.add_term(Monomial::new(e), GaussianRational::one());
        }
        p
    }

    /// Builds a polynomial from `(monomial, coefficient)` pairs, merging
    /// repeated monomials.
    pub fn from_terms<I>(nvars: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Monomial, GaussianRational)>,
    {
        let mut p = Self::zero(nvars);
        for (m, c) in terms {
            if m.nvars() != nvars {
                return Err(Error::DimensionMismatch { expected: nvars, found: m.nvars() });
            }
            p.add_term(m, c);
        }
        Ok(p)
    }

    pub(crate) fn add_term(&mut self, m: Monomial, c: GaussianRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += &c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &GaussianRational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> GaussianRational {
        self.terms.get(m).cloned().unwrap_or_else(GaussianRational::zero)
    }

    pub fn leading_term(&self) -> Option<(&Monomial, &GaussianRational)> {
        self.terms.iter().next_back()
    }

    /// Largest total degree of a term, `None` for the zero polynomial.
    pub fn total_degree(&self) -> Option<u32> {
        self.leading_term().map(|(m, _)| m.degree())
    }

    pub fn is_real(&self) -> bool {
        self.terms.values().all(GaussianRational::is_real)
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    fn check_dims(&self, other: &Polynomial) -> Result<()> {
        if self.nvars != other.nvars {
            return Err(Error::DimensionMismatch { expected: self.nvars, found: other.nvars });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check_dims(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check_dims(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c);
        }
        Ok(out)
    }

    pub fn try_mul(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check_dims(other)?;
        let mut out = Polynomial::zero(self.nvars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        Ok(out)
    }

    pub fn pow(&self, k: u32) -> Polynomial {
        let mut acc = Polynomial::one(self.nvars);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    pub fn scale(&self, c: &GaussianRational) -> Polynomial {
        let mut out = Polynomial::zero(self.nvars);
        for (m, a) in &self.terms {
            out.add_term(m.clone(), a * c);
        }
        out
    }

    pub fn scale_rational(&self, s: &BigRational) -> Polynomial {
        self.scale(&GaussianRational::real(s.clone()))
    }

    /// Multiplies by a single term `c * m`.
    pub fn mul_term(&self, m: &Monomial, c: &GaussianRational) -> Polynomial {
        let mut out = Polynomial::zero(self.nvars);
        for (a, ca) in &self.terms {
            out.add_term(a.mul(m), ca * c);
        }
        out
    }

    /// Coefficient-wise complex conjugate (variables are real).
    pub fn conj(&self) -> Polynomial {
        Polynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c.conj())).collect(),
        }
    }

    /// Degree `k` when every term has total degree `k`, `None` for mixed
    /// degrees.
    pub fn homogeneity(&self) -> Result<Option<u32>> {
        let mut degrees = self.terms.keys().map(Monomial::degree);
        let first = degrees.next().ok_or(Error::ZeroPolynomial)?;
        Ok(degrees.all(|d| d == first).then_some(first))
    }

    /// The terms of total degree `k`.
    pub fn homogeneous_component(&self, k: u32) -> Polynomial {
        Polynomial {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() == k)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Exact quotient `q` with `self = divisor * q`, or `None` when the
    /// division leaves a remainder.
    ///
    /// Runs multivariate division by the single divisor under graded-lex
    /// order. With one divisor the remainder is zero iff the leading term of
    /// every intermediate dividend is divisible by the divisor's leading
    /// monomial, so the first non-divisible leading term ends the search.
    pub fn exact_divide(&self, divisor: &Polynomial) -> Result<Option<Polynomial>> {
        self.check_dims(divisor)?;
        let (lm, lc) = match divisor.leading_term() {
            Some((m, c)) => (m.clone(), c.clone()),
            None => return Err(Error::DivisionByZeroPolynomial),
        };
        let mut rem = self.clone();
        let mut quotient = Polynomial::zero(self.nvars);
        while let Some((m, c)) = rem.leading_term() {
            if !lm.divides(m) {
                return Ok(None);
            }
            let qm = m.div(&lm);
            let qc = c.checked_div(&lc).expect("leading coefficient is nonzero");
            rem = &rem - &divisor.mul_term(&qm, &qc);
            quotient.add_term(qm, qc);
        }
        Ok(Some(quotient))
    }

    /// Splits `p = re + i*im` into real-coefficient polynomials.
    pub fn real_imag_parts(&self) -> (Polynomial, Polynomial) {
        let mut re = Polynomial::zero(self.nvars);
        let mut im = Polynomial::zero(self.nvars);
        for (m, c) in &self.terms {
            re.add_term(m.clone(), GaussianRational::real(c.re().clone()));
            im.add_term(m.clone(), GaussianRational::real(c.im().clone()));
        }
        (re, im)
    }

    /// Evaluates at a real point in `f64`, summing terms in canonical order.
    pub fn evaluate(&self, x: &[f64]) -> Result<Complex64> {
        if x.len() != self.nvars {
            return Err(Error::DimensionMismatch { expected: self.nvars, found: x.len() });
        }
        Ok(self.to_numeric().eval(x))
    }

    /// Floating-point snapshot for repeated evaluation.
    pub fn to_numeric(&self) -> NumericPolynomial {
        NumericPolynomial {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.exponents().to_vec(), c.to_complex64()))
                .collect(),
        }
    }

    /// Random polynomial with small Gaussian-integer coefficients and total
    /// degree at most `max_degree`; used by property suites and self-tests.
    pub fn random<R: Rng + ?Sized>(
        rng: &mut R,
        nvars: usize,
        max_degree: u32,
        max_terms: usize,
        complex: bool,
    ) -> Polynomial {
        let mut p = Polynomial::zero(nvars);
        let nterms = rng.random_range(1..=max_terms.max(1));
        for _ in 0..nterms {
            let degree = rng.random_range(0..=max_degree);
            let mut exps = vec![0u32; nvars];
            for _ in 0..degree {
                exps[rng.random_range(0..nvars)] += 1;
            }
            let re = rng.random_range(-5i64..=5);
            let im = if complex { rng.random_range(-5i64..=5) } else { 0 };
            let c = GaussianRational::new(
                BigRational::from_integer(re.into()),
                BigRational::from_integer(im.into()),
            );
            p.add_term(Monomial::new(exps), c);
        }
        p
    }
}

impl<'a> Add<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    /// Panics on a variable-count mismatch; see [`Polynomial::try_add`].
    fn add(self, rhs: &'a Polynomial) -> Polynomial {
        self.try_add(rhs).expect("polynomial addition")
    }
}

impl<'a> Sub<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &'a Polynomial) -> Polynomial {
        self.try_sub(rhs).expect("polynomial subtraction")
    }
}

impl<'a> Mul<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &'a Polynomial) -> Polynomial {
        self.try_mul(rhs).expect("polynomial multiplication")
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::parser::render(self))
    }
}

impl Serialize for Polynomial {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&crate::parser::render(self))
    }
}

/// `f64` copy of a [`Polynomial`] for hot numeric loops.
#[derive(Clone, Debug)]
pub struct NumericPolynomial {
    nvars: usize,
    terms: Vec<(Vec<u32>, Complex64)>,
}

impl NumericPolynomial {
    pub fn nvars(&self) -> usize {
        self.nvars
    }

    /// Direct term-by-term evaluation in canonical (ascending graded-lex)
    /// order. `x.len()` must equal `nvars`.
    pub fn eval(&self, x: &[f64]) -> Complex64 {
        debug_assert_eq!(x.len(), self.nvars);
        let mut acc = Complex64::new(0.0, 0.0);
        for (exps, c) in &self.terms {
            let mut mono = 1.0;
            for (xi, &e) in x.iter().zip(exps) {
                if e != 0 {
                    mono *= xi.powi(e as i32);
                }
            }
            acc += c * mono;
        }
        acc
    }

    /// Real part of [`eval`](Self::eval); for real polynomials this is the value.
    pub fn eval_real(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.nvars);
        let mut acc = 0.0;
        for (exps, c) in &self.terms {
            let mut mono = c.re;
            for (xi, &e) in x.iter().zip(exps) {
                if e != 0 {
                    mono *= xi.powi(e as i32);
                }
            }
            acc += mono;
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse;

    fn p(s: &str, n: usize) -> Polynomial {
        parse(s, n).unwrap()
    }

    #[test]
    fn add_examples() {
        assert!((&p("x1", 2) + &p("-x1", 2)).is_zero());
        assert_eq!(&p("x1^2 + i*x2", 2) + &p("x1^2", 2), p("2*x1^2 + i*x2", 2));
        let q = p("3*x1*x2 - 1/2", 2);
        assert_eq!(&q + &Polynomial::zero(2), q);
        assert!(matches!(
            p("x1", 2).try_add(&p("x1", 3)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn mul_examples() {
        assert_eq!(&p("x1 + i*x2", 2) * &p("x1 - i*x2", 2), p("x1^2 + x2^2", 2));
        assert_eq!(&p("x1 + i*x2", 2) * &p("x1 + i*x2", 2), p("x1^2 - x2^2 + 2*i*x1*x2", 2));
        assert_eq!(&Polynomial::r_squared(3) * &p("x1", 3), p("x1^3 + x1*x2^2 + x1*x3^2", 3));
        assert!(p("x1", 2).try_mul(&p("x1", 1)).is_err());
    }

    #[test]
    fn pow_examples() {
        assert_eq!(p("x1 + i*x2", 2).pow(2), p("x1^2 - x2^2 + 2*i*x1*x2", 2));
        assert_eq!(p("7*x1 - x2^3", 2).pow(0), Polynomial::one(2));
        let q = p("x1 - 2*i*x2 + 1", 2);
        assert_eq!(q.pow(3), &q * &q.pow(2));
    }

    #[test]
    fn homogeneity_examples() {
        assert_eq!(p("x1^2 - x2^2 + x3^2 - x4^2", 4).homogeneity().unwrap(), Some(2));
        assert_eq!(p("x1 + x2^2", 2).homogeneity().unwrap(), None);
        assert_eq!(Polynomial::r_squared(5).homogeneity().unwrap(), Some(2));
        assert!(matches!(Polynomial::zero(3).homogeneity(), Err(Error::ZeroPolynomial)));
    }

    #[test]
    fn exact_divide_examples() {
        let clifford = p("x1^2 - x2^2 + x3^2 - x4^2", 4);
        let eight = clifford.scale(&GaussianRational::from_integer(8));
        assert_eq!(clifford_quotient(&eight, &clifford), Some(p("8", 4)));
        let r2 = Polynomial::r_squared(4);
        assert_eq!(p("x1^2 - x2^2", 4).exact_divide(&r2).unwrap(), None);
        let r2x1 = &r2 * &p("x1", 4);
        assert_eq!(r2x1.exact_divide(&r2).unwrap(), Some(p("x1", 4)));
        assert!(matches!(r2.exact_divide(&Polynomial::zero(4)), Err(Error::DivisionByZeroPolynomial)));
    }

    fn clifford_quotient(a: &Polynomial, b: &Polynomial) -> Option<Polynomial> {
        a.exact_divide(b).unwrap()
    }

    #[test]
    fn evaluate_examples() {
        let q = p("x1^2 - x2^2 + x3^2 - x4^2", 4);
        assert_eq!(q.evaluate(&[1.0, 0.0, 0.0, 0.0]).unwrap(), Complex64::new(1.0, 0.0));
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let v = q.evaluate(&[s, 0.0, s, 0.0]).unwrap();
        assert!((v.re - 1.0).abs() < 1e-15 && v.im == 0.0);
        let z1 = p("z1", 4);
        assert_eq!(z1.evaluate(&[0.6, 0.8, 0.0, 0.0]).unwrap(), Complex64::new(0.6, 0.8));
        assert!(q.evaluate(&[1.0, 0.0]).is_err());
    }

    #[test]
    fn real_imag_examples() {
        let (re, im) = p("(x1 + i*x2)^2", 2).real_imag_parts();
        assert_eq!(re, p("x1^2 - x2^2", 2));
        assert_eq!(im, p("2*x1*x2", 2));
        let real = p("x1^3 - 1/3*x2", 2);
        assert_eq!(real.real_imag_parts(), (real.clone(), Polynomial::zero(2)));
        let (re, im) = p("i*x1", 2).real_imag_parts();
        assert!(re.is_zero());
        assert_eq!(im, p("x1", 2));
    }

    #[test]
    fn canonical_form_drops_zero_terms() {
        let q = &p("x1*x2 + x3", 3) - &p("x1*x2", 3);
        assert_eq!(q.num_terms(), 1);
        assert_eq!(q, p("x3", 3));
    }
}
