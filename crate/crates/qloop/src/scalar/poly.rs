//! Dense integer polynomials used as building blocks for the coefficient field.
//!
//! A `Poly` is an element of Z[u] with coefficients stored in ascending order
//! and no trailing zeros. The zero polynomial is the empty vector.

use num::bigint::BigInt;
use num::complex::Complex64;
use num::rational::BigRational;
use num::{Integer, One, Signed, Zero};
use std::fmt;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    coeffs: Vec<BigInt>,
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly{:?}", self.coeffs)
    }
}

impl Poly {
    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly::constant(BigInt::one())
    }

    pub fn constant(c: BigInt) -> Self {
        if c.is_zero() {
            Poly::zero()
        } else {
            Poly { coeffs: vec![c] }
        }
    }

    pub fn from_coeffs(coeffs: Vec<BigInt>) -> Self {
        let mut p = Poly { coeffs };
        p.trim();
        p
    }

    /// The monomial c*u^k, k >= 0.
    pub fn monomial(c: BigInt, k: usize) -> Self {
        if c.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = vec![BigInt::zero(); k + 1];
        coeffs[k] = c;
        Poly { coeffs }
    }

    fn trim(&mut self) {
        while self.coeffs.last().map_or(false, |c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; zero polynomial reports -1.
    pub fn degree(&self) -> i64 {
        self.coeffs.len() as i64 - 1
    }

    pub fn coeff(&self, k: usize) -> BigInt {
        self.coeffs.get(k).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn leading(&self) -> BigInt {
        self.coeffs.last().cloned().unwrap_or_else(BigInt::zero)
    }

    /// Lowest exponent with nonzero coefficient (0 for the zero polynomial).
    pub fn valuation(&self) -> usize {
        self.coeffs
            .iter()
            .position(|c| !c.is_zero())
            .unwrap_or(0)
    }

    /// Divide by u^k; panics if the valuation is smaller than k.
    pub fn shift_down(&self, k: usize) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        assert!(self.valuation() >= k, "shift_down below valuation");
        Poly {
            coeffs: self.coeffs[k..].to_vec(),
        }
    }

    /// Multiply by u^k.
    pub fn shift_up(&self, k: usize) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = vec![BigInt::zero(); k];
        coeffs.extend_from_slice(&self.coeffs);
        Poly { coeffs }
    }

    pub fn neg(&self) -> Poly {
        Poly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut coeffs = Vec::with_capacity(n);
        for k in 0..n {
            coeffs.push(self.coeff(k) + other.coeff(k));
        }
        Poly::from_coeffs(coeffs)
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        Poly::from_coeffs(coeffs)
    }

    pub fn mul_int(&self, c: &BigInt) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    /// Exact division; panics if `other` does not divide `self` in Z[u].
    pub fn div_exact(&self, other: &Poly) -> Poly {
        assert!(!other.is_zero(), "division by zero polynomial");
        if self.is_zero() {
            return Poly::zero();
        }
        let mut rem = self.coeffs.clone();
        let d = other.degree() as usize;
        let n = self.degree() as usize;
        assert!(n >= d, "exact division with too-small dividend");
        let lead = other.leading();
        let mut quot = vec![BigInt::zero(); n - d + 1];
        for k in (0..=n - d).rev() {
            let top = rem[k + d].clone();
            if top.is_zero() {
                continue;
            }
            let (c, r) = top.div_rem(&lead);
            assert!(r.is_zero(), "non-exact polynomial division");
            for (j, b) in other.coeffs.iter().enumerate() {
                rem[k + j] -= &c * b;
            }
            quot[k] = c;
        }
        assert!(rem.iter().all(|c| c.is_zero()), "non-exact polynomial division");
        Poly::from_coeffs(quot)
    }

    /// gcd of all coefficients (positive; 0 for the zero polynomial).
    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for c in &self.coeffs {
            g = g.gcd(c);
        }
        g
    }

    /// Primitive part with positive leading coefficient.
    pub fn primitive(&self) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut c = self.content();
        if self.leading().is_negative() {
            c = -c;
        }
        Poly {
            coeffs: self.coeffs.iter().map(|a| a / &c).collect(),
        }
    }

    /// Primitive gcd in Z[u], computed by the Euclidean algorithm over Q.
    pub fn gcd(&self, other: &Poly) -> Poly {
        if self.is_zero() {
            return other.primitive();
        }
        if other.is_zero() {
            return self.primitive();
        }
        let mut a = self.to_rational();
        let mut b = other.to_rational();
        while !b.iter().all(|c| c.is_zero()) {
            let r = rat_rem(&a, &b);
            a = b;
            b = r;
        }
        rat_to_primitive(&a)
    }

    fn to_rational(&self) -> Vec<BigRational> {
        self.coeffs
            .iter()
            .map(|c| BigRational::from_integer(c.clone()))
            .collect()
    }

    /// Evaluate at a complex point.
    pub fn eval_complex(&self, x: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for c in self.coeffs.iter().rev() {
            acc = acc * x + bigint_to_f64(c);
        }
        acc
    }
}

fn bigint_to_f64(c: &BigInt) -> f64 {
    num::ToPrimitive::to_f64(c).unwrap_or(f64::NAN)
}

fn rat_trim(v: &mut Vec<BigRational>) {
    while v.last().map_or(false, |c| c.is_zero()) {
        v.pop();
    }
}

fn rat_rem(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut rem = a.to_vec();
    rat_trim(&mut rem);
    let mut bb = b.to_vec();
    rat_trim(&mut bb);
    let db = bb.len() - 1;
    let lead = bb[db].clone();
    while rem.len() > db {
        let k = rem.len() - 1 - db;
        let c = rem.last().unwrap() / &lead;
        for (j, bj) in bb.iter().enumerate() {
            let t = &c * bj;
            rem[k + j] -= t;
        }
        rat_trim(&mut rem);
        if rem.is_empty() {
            break;
        }
    }
    rem
}

fn rat_to_primitive(a: &[BigRational]) -> Poly {
    let mut v = a.to_vec();
    rat_trim(&mut v);
    if v.is_empty() {
        return Poly::zero();
    }
    let mut denom_lcm = BigInt::one();
    for c in &v {
        denom_lcm = denom_lcm.lcm(c.denom());
    }
    let ints: Vec<BigInt> = v
        .iter()
        .map(|c| c.numer() * (&denom_lcm / c.denom()))
        .collect();
    Poly::from_coeffs(ints).primitive()
}

/// The N-th cyclotomic polynomial, computed by exact division of u^N - 1
/// by the cyclotomic polynomials of the proper divisors of N.
pub fn cyclotomic(n: u32) -> Poly {
    assert!(n >= 1);
    let mut num = Poly::monomial(BigInt::one(), n as usize).sub(&Poly::one());
    for d in 1..n {
        if n % d == 0 {
            num = num.div_exact(&cyclotomic(d));
        }
    }
    num
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::BigInt;

    fn p(coeffs: &[i64]) -> Poly {
        Poly::from_coeffs(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    #[test]
    fn mul_and_exact_division_roundtrip() {
        let a = p(&[1, 2, 1]);
        let b = p(&[-3, 1]);
        let c = a.mul(&b);
        assert_eq!(c.div_exact(&a), b);
        assert_eq!(c.div_exact(&b), a);
    }

    #[test]
    fn gcd_of_shifted_squares() {
        let a = p(&[-1, 0, 1]); // u^2 - 1
        let b = p(&[1, 2, 1]); // (u+1)^2
        assert_eq!(a.gcd(&b), p(&[1, 1]));
        assert_eq!(a.gcd(&Poly::zero()), p(&[-1, 0, 1]).primitive());
    }

    #[test]
    fn cyclotomic_small_orders() {
        assert_eq!(cyclotomic(1), p(&[-1, 1]));
        assert_eq!(cyclotomic(2), p(&[1, 1]));
        assert_eq!(cyclotomic(3), p(&[1, 1, 1]));
        assert_eq!(cyclotomic(4), p(&[1, 0, 1]));
        assert_eq!(cyclotomic(6), p(&[1, -1, 1]));
        assert_eq!(cyclotomic(8), p(&[1, 0, 0, 0, 1]));
        assert_eq!(cyclotomic(12), p(&[1, 0, -1, 0, 1]));
    }
}
