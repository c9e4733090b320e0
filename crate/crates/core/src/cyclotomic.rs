//! Exact arithmetic in the cyclotomic fields `Q(w_n)`, `w_n = e^(2 pi i / n)`.
//!
//! A [`CyclotomicNumber`] is a rational polynomial in `w_n` reduced modulo the
//! n-th cyclotomic polynomial, so it always has exactly `phi(n)` coefficients
//! and equality is coefficientwise. Gaussian integers (`n = 4`) get their own
//! lightweight integer type, [`GaussianInt`].

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::groupring::ExactDomain;

/// Largest supported conductor.
pub const MAX_CONDUCTOR: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CyclotomicError {
    #[error("conductor must lie in 1..={MAX_CONDUCTOR}, got {0}")]
    BadConductor(usize),
    #[error("conductor mismatch: {0} vs {1}")]
    ConductorMismatch(usize, usize),
    #[error("root exponent {j} out of range for conductor {n}")]
    ExponentOutOfRange { n: usize, j: usize },
    #[error("expected {expected} conjugate values for conductor {d}, got {found}")]
    WrongConjugateCount {
        d: usize,
        expected: usize,
        found: usize,
    },
    #[error("conjugate product is not a rational integer: {0}")]
    NotRationalInteger(String),
}

pub fn totient(n: usize) -> usize {
    (1..=n).filter(|&k| k.gcd(&n) == 1).count()
}

fn cyclotomic_table() -> &'static [Vec<i64>] {
    static TABLE: OnceLock<Vec<Vec<i64>>> = OnceLock::new();
    TABLE.get_or_init(|| {
        // Phi_n = (x^n - 1) / prod_{d | n, d < n} Phi_d, by exact long division.
        let mut table: Vec<Vec<i64>> = vec![Vec::new()];
        for n in 1..=MAX_CONDUCTOR {
            let mut num = vec![0i64; n + 1];
            num[0] = -1;
            num[n] = 1;
            for d in (1..n).filter(|d| n % d == 0) {
                num = divide_monic(&num, &table[d]);
            }
            table.push(num);
        }
        table
    })
}

/// Quotient of `num` by the monic `den`; the division must be exact.
fn divide_monic(num: &[i64], den: &[i64]) -> Vec<i64> {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    let qd = rem.len() - 1 - dd;
    let mut quot = vec![0i64; qd + 1];
    for k in (0..=qd).rev() {
        let c = rem[k + dd];
        quot[k] = c;
        for (i, &d) in den.iter().enumerate() {
            rem[k + i] -= c * d;
        }
    }
    debug_assert!(rem.iter().all(|&c| c == 0), "inexact cyclotomic division");
    quot
}

/// Integer coefficients of `Phi_n`, lowest degree first.
pub fn cyclotomic_polynomial(n: usize) -> Result<&'static [i64], CyclotomicError> {
    if n == 0 || n > MAX_CONDUCTOR {
        return Err(CyclotomicError::BadConductor(n));
    }
    Ok(&cyclotomic_table()[n])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CycOp {
    Add,
    Sub,
    Mul,
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CyclotomicNumber {
    conductor: usize,
    coeffs: Vec<BigRational>,
}

impl fmt::Debug for CyclotomicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Cyc{}(", self.conductor)?;
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl CyclotomicNumber {
    /// Reduces an arbitrary-length rational polynomial in `w_n` mod `Phi_n`.
    fn reduce(conductor: usize, mut poly: Vec<BigRational>) -> Self {
        let phi = &cyclotomic_table()[conductor];
        let deg = phi.len() - 1;
        for top in (deg..poly.len()).rev() {
            let c = std::mem::take(&mut poly[top]);
            if c.is_zero() {
                continue;
            }
            // x^top = x^(top-deg) * (x^deg - Phi_n)
            for (i, &p) in phi[..deg].iter().enumerate() {
                if p != 0 {
                    poly[top - deg + i] -= &c * BigInt::from(p);
                }
            }
        }
        poly.resize(deg, BigRational::zero());
        CyclotomicNumber {
            conductor,
            coeffs: poly,
        }
    }

    fn check_conductor(n: usize) -> Result<(), CyclotomicError> {
        if n == 0 || n > MAX_CONDUCTOR {
            Err(CyclotomicError::BadConductor(n))
        } else {
            Ok(())
        }
    }

    pub fn zero(conductor: usize) -> Result<Self, CyclotomicError> {
        Self::from_integer(conductor, BigInt::zero())
    }

    pub fn one(conductor: usize) -> Result<Self, CyclotomicError> {
        Self::from_integer(conductor, BigInt::one())
    }

    pub fn from_integer(conductor: usize, value: BigInt) -> Result<Self, CyclotomicError> {
        Self::from_rational(conductor, BigRational::from_integer(value))
    }

    pub fn from_rational(conductor: usize, value: BigRational) -> Result<Self, CyclotomicError> {
        Self::check_conductor(conductor)?;
        let mut coeffs = vec![BigRational::zero(); totient(conductor)];
        coeffs[0] = value;
        Ok(CyclotomicNumber { conductor, coeffs })
    }

    /// `w_n^j`.
    pub fn root_power(conductor: usize, j: usize) -> Result<Self, CyclotomicError> {
        Self::check_conductor(conductor)?;
        let mut poly = vec![BigRational::zero(); conductor];
        poly[j % conductor] = BigRational::one();
        Ok(Self::reduce(conductor, poly))
    }

    /// The value of the rational polynomial `c_0 + c_1 w + ...` (any length).
    pub fn from_rational_poly(
        conductor: usize,
        poly: Vec<BigRational>,
    ) -> Result<Self, CyclotomicError> {
        Self::check_conductor(conductor)?;
        // fold powers >= n back using w^n = 1 before reducing mod Phi_n
        let mut folded = vec![BigRational::zero(); conductor];
        for (i, c) in poly.into_iter().enumerate() {
            folded[i % conductor] += c;
        }
        Ok(Self::reduce(conductor, folded))
    }

    pub fn conductor(&self) -> usize {
        self.conductor
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// `Some(q)` when the number is the rational constant `q`.
    pub fn as_rational(&self) -> Option<&BigRational> {
        if self.coeffs[1..].iter().all(Zero::is_zero) {
            Some(&self.coeffs[0])
        } else {
            None
        }
    }

    /// `Some(k)` when the number is the rational integer `k`.
    pub fn as_integer(&self) -> Option<BigInt> {
        self.as_rational()
            .filter(|q| q.is_integer())
            .map(|q| q.to_integer())
    }

    pub fn checked_op(&self, other: &Self, op: CycOp) -> Result<Self, CyclotomicError> {
        if self.conductor != other.conductor {
            return Err(CyclotomicError::ConductorMismatch(
                self.conductor,
                other.conductor,
            ));
        }
        Ok(match op {
            CycOp::Add => self.add_unchecked(other),
            CycOp::Sub => self.sub_unchecked(other),
            CycOp::Mul => self.mul_unchecked(other),
        })
    }

    fn add_unchecked(&self, other: &Self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        CyclotomicNumber {
            conductor: self.conductor,
            coeffs,
        }
    }

    fn sub_unchecked(&self, other: &Self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a - b)
            .collect();
        CyclotomicNumber {
            conductor: self.conductor,
            coeffs,
        }
    }

    fn mul_unchecked(&self, other: &Self) -> Self {
        let len = self.coeffs.len();
        let mut prod = vec![BigRational::zero(); 2 * len - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    prod[i + j] += a * b;
                }
            }
        }
        Self::reduce(self.conductor, prod)
    }

    /// Galois automorphism `w -> w^k`, `gcd(k, n) = 1`.
    pub fn galois(&self, k: usize) -> Self {
        let n = self.conductor;
        debug_assert_eq!(k.gcd(&n), 1);
        let mut poly = vec![BigRational::zero(); n];
        for (i, c) in self.coeffs.iter().enumerate() {
            poly[(i * k) % n] += c;
        }
        Self::reduce(n, poly)
    }

    /// Field norm down to `Q`: the product of all Galois conjugates.
    pub fn norm(&self) -> BigRational {
        let prod = self.conjugates_except_self();
        let total = self.mul_unchecked(&prod);
        total
            .as_rational()
            .cloned()
            .expect("field norm is rational")
    }

    fn conjugates_except_self(&self) -> Self {
        let n = self.conductor;
        let mut prod = Self::one(n).expect("valid conductor");
        for k in (2..n).filter(|k| k.gcd(&n) == 1) {
            prod = prod.mul_unchecked(&self.galois(k));
        }
        prod
    }

    /// Multiplicative inverse, `None` for zero. Uses `a^-1 = (prod of the other
    /// conjugates) / N(a)`.
    pub fn inverse(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let others = self.conjugates_except_self();
        let norm = self.mul_unchecked(&others);
        let n = norm.as_rational().expect("field norm is rational").clone();
        let coeffs = others.coeffs.into_iter().map(|c| c / &n).collect();
        Some(CyclotomicNumber {
            conductor: self.conductor,
            coeffs,
        })
    }
}

impl CyclotomicNumber {
    fn scalar_neg(&self) -> Self {
        CyclotomicNumber {
            conductor: self.conductor,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl ExactDomain for CyclotomicNumber {
    fn zero_like(&self) -> Self {
        Self::zero(self.conductor).expect("valid conductor")
    }
    fn one_like(&self) -> Self {
        Self::one(self.conductor).expect("valid conductor")
    }
    fn is_zero_elem(&self) -> bool {
        self.is_zero()
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self.mul_unchecked(other)
    }
    fn sub_ref(&self, other: &Self) -> Self {
        self.sub_unchecked(other)
    }
    fn neg_ref(&self) -> Self {
        self.scalar_neg()
    }
    fn exact_div(&self, divisor: &Self) -> Self {
        let inv = divisor.inverse().expect("Bareiss never divides by zero");
        self.mul_unchecked(&inv)
    }
}

/// Exact field arithmetic on two numbers of the same conductor.
pub fn cyc_arith(
    a: &CyclotomicNumber,
    b: &CyclotomicNumber,
    op: CycOp,
) -> Result<CyclotomicNumber, CyclotomicError> {
    a.checked_op(b, op)
}

/// `p(w_n^j)` for an integer polynomial `p` (lowest degree first).
pub fn eval_poly_at_root(
    p: &[BigInt],
    n: usize,
    j: usize,
) -> Result<CyclotomicNumber, CyclotomicError> {
    CyclotomicNumber::check_conductor(n)?;
    if j >= n {
        return Err(CyclotomicError::ExponentOutOfRange { n, j });
    }
    let mut poly = vec![BigRational::zero(); n];
    for (i, c) in p.iter().enumerate() {
        if !c.is_zero() {
            poly[(i * j) % n] += BigRational::from_integer(c.clone());
        }
    }
    Ok(CyclotomicNumber::reduce(n, poly))
}

/// Product of the values of one integral expression at every primitive d-th
/// root of unity, returned as the rational integer it must be.
///
/// `values` must hold one entry per `j` coprime to `d`, all of conductor `d`.
pub fn conjugate_product(values: &[CyclotomicNumber]) -> Result<BigInt, CyclotomicError> {
    let d = values.first().map(CyclotomicNumber::conductor).ok_or(
        CyclotomicError::WrongConjugateCount {
            d: 0,
            expected: 1,
            found: 0,
        },
    )?;
    let expected = totient(d);
    if values.len() != expected {
        return Err(CyclotomicError::WrongConjugateCount {
            d,
            expected,
            found: values.len(),
        });
    }
    let mut acc = CyclotomicNumber::one(d)?;
    for v in values {
        acc = acc.checked_op(v, CycOp::Mul)?;
    }
    acc.as_integer()
        .ok_or_else(|| CyclotomicError::NotRationalInteger(format!("{acc:?}")))
}

/// Gaussian integer `re + im * i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct GaussianInt {
    pub re: BigInt,
    pub im: BigInt,
}

impl GaussianInt {
    pub fn new(re: impl Into<BigInt>, im: impl Into<BigInt>) -> Self {
        GaussianInt {
            re: re.into(),
            im: im.into(),
        }
    }

    /// `p(i)` for an integer polynomial `p`.
    pub fn eval_poly<T: Clone + Into<BigInt>>(p: &[T]) -> Self {
        let mut re = BigInt::zero();
        let mut im = BigInt::zero();
        for (k, c) in p.iter().enumerate() {
            let c: BigInt = c.clone().into();
            match k % 4 {
                0 => re += c,
                1 => im += c,
                2 => re -= c,
                _ => im -= c,
            }
        }
        GaussianInt { re, im }
    }

    pub fn norm(&self) -> BigInt {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn conj(&self) -> Self {
        GaussianInt {
            re: self.re.clone(),
            im: -&self.im,
        }
    }

    pub fn to_cyclotomic(&self) -> CyclotomicNumber {
        CyclotomicNumber {
            conductor: 4,
            coeffs: vec![
                BigRational::from_integer(self.re.clone()),
                BigRational::from_integer(self.im.clone()),
            ],
        }
    }

    pub fn is_unit(&self) -> bool {
        self.norm().is_one()
    }

    pub fn is_real_nonneg(&self) -> bool {
        self.im.is_zero() && !self.re.is_negative()
    }
}

impl Add for &GaussianInt {
    type Output = GaussianInt;
    fn add(self, rhs: Self) -> GaussianInt {
        GaussianInt {
            re: &self.re + &rhs.re,
            im: &self.im + &rhs.im,
        }
    }
}

impl Sub for &GaussianInt {
    type Output = GaussianInt;
    fn sub(self, rhs: Self) -> GaussianInt {
        GaussianInt {
            re: &self.re - &rhs.re,
            im: &self.im - &rhs.im,
        }
    }
}

impl Mul for &GaussianInt {
    type Output = GaussianInt;
    fn mul(self, rhs: Self) -> GaussianInt {
        GaussianInt {
            re: &self.re * &rhs.re - &self.im * &rhs.im,
            im: &self.re * &rhs.im + &self.im * &rhs.re,
        }
    }
}

impl Neg for &GaussianInt {
    type Output = GaussianInt;
    fn neg(self) -> GaussianInt {
        GaussianInt {
            re: -&self.re,
            im: -&self.im,
        }
    }
}
