use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};

use super::{to_f64, CycNum, Rat};

/// Exact commutative ring usable as a series coefficient.
pub trait Coeff: Clone + PartialEq + fmt::Debug + Send + Sync + 'static {
    fn coeff_zero() -> Self;
    fn coeff_one() -> Self;
    fn coeff_from_i64(n: i64) -> Self;
    fn is_zero_coeff(&self) -> bool;
    fn add_in_place(&mut self, rhs: &Self);
    fn times(&self, rhs: &Self) -> Self;
    fn negated(&self) -> Self;

    /// `self += a * b`
    fn add_product(&mut self, a: &Self, b: &Self) {
        let p = a.times(b);
        self.add_in_place(&p);
    }
}

/// Coefficients that have a complex numerical value.
pub trait ComplexValue {
    fn to_complex(&self) -> Complex64;
}

impl Coeff for Rat {
    fn coeff_zero() -> Self {
        Zero::zero()
    }
    fn coeff_one() -> Self {
        num_traits::One::one()
    }
    fn coeff_from_i64(n: i64) -> Self {
        Rat::from_integer(BigInt::from(n))
    }
    fn is_zero_coeff(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add_in_place(&mut self, rhs: &Self) {
        *self += rhs;
    }
    fn times(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn negated(&self) -> Self {
        -self
    }
}

impl Coeff for BigInt {
    fn coeff_zero() -> Self {
        Zero::zero()
    }
    fn coeff_one() -> Self {
        num_traits::One::one()
    }
    fn coeff_from_i64(n: i64) -> Self {
        BigInt::from(n)
    }
    fn is_zero_coeff(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add_in_place(&mut self, rhs: &Self) {
        *self += rhs;
    }
    fn times(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn negated(&self) -> Self {
        -self
    }
    fn add_product(&mut self, a: &Self, b: &Self) {
        *self += a * b;
    }
}

impl Coeff for CycNum {
    fn coeff_zero() -> Self {
        CycNum::zero()
    }
    fn coeff_one() -> Self {
        CycNum::one()
    }
    fn coeff_from_i64(n: i64) -> Self {
        CycNum::from_i64(n)
    }
    fn is_zero_coeff(&self) -> bool {
        CycNum::is_zero(self)
    }
    fn add_in_place(&mut self, rhs: &Self) {
        self.add_assign(rhs);
    }
    fn times(&self, rhs: &Self) -> Self {
        self.mul(rhs)
    }
    fn negated(&self) -> Self {
        self.neg()
    }
}

impl ComplexValue for Rat {
    fn to_complex(&self) -> Complex64 {
        Complex64::new(to_f64(self), 0.0)
    }
}

impl ComplexValue for BigInt {
    fn to_complex(&self) -> Complex64 {
        Complex64::new(self.to_f64().unwrap_or(f64::NAN), 0.0)
    }
}

impl ComplexValue for CycNum {
    fn to_complex(&self) -> Complex64 {
        CycNum::to_complex(self)
    }
}

/// Element of the integral group ring `Z[Z/N]`, i.e. an integer polynomial in a
/// formal phase `x` with `x^N = 1`. Used to track how many times a symmetry phase
/// multiplies a term before averaging over the group.
#[derive(Clone, PartialEq, Eq)]
pub struct GroupRingElt {
    coeffs: Vec<BigInt>,
}

impl GroupRingElt {
    /// `x^k` in `Z[Z/n]`.
    pub fn generator_power(k: i64, n: usize) -> Self {
        assert!(n >= 1);
        let mut coeffs = vec![<BigInt as Zero>::zero(); n];
        coeffs[k.rem_euclid(n as i64) as usize] = BigInt::from(1);
        GroupRingElt { coeffs }
    }

    pub fn modulus(&self) -> usize {
        self.coeffs.len()
    }

    /// Coefficient of `x^k`; an unlifted constant only has the `k = 0` component.
    pub fn component(&self, k: usize) -> BigInt {
        let n = self.coeffs.len();
        if n == 1 && k != 0 {
            return <BigInt as Zero>::zero();
        }
        self.coeffs[k % n].clone()
    }

    pub fn components(&self) -> &[BigInt] {
        &self.coeffs
    }

    fn lifted(&self, n: usize) -> Self {
        if self.modulus() == n {
            return self.clone();
        }
        assert_eq!(self.modulus(), 1, "group ring moduli {} and {n} differ", self.modulus());
        let mut coeffs = vec![<BigInt as Zero>::zero(); n];
        coeffs[0] = self.coeffs[0].clone();
        GroupRingElt { coeffs }
    }
}

impl fmt::Debug for GroupRingElt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.coeffs)
    }
}

impl Coeff for GroupRingElt {
    fn coeff_zero() -> Self {
        GroupRingElt { coeffs: vec![<BigInt as Zero>::zero()] }
    }
    fn coeff_one() -> Self {
        GroupRingElt { coeffs: vec![BigInt::from(1)] }
    }
    fn coeff_from_i64(n: i64) -> Self {
        GroupRingElt { coeffs: vec![BigInt::from(n)] }
    }
    fn is_zero_coeff(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }
    fn add_in_place(&mut self, rhs: &Self) {
        if self.modulus() < rhs.modulus() {
            *self = self.lifted(rhs.modulus());
        }
        let rhs = rhs.lifted(self.modulus());
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a += b;
        }
    }
    fn times(&self, rhs: &Self) -> Self {
        let n = self.modulus().max(rhs.modulus());
        let (a, b) = (self.lifted(n), rhs.lifted(n));
        let mut coeffs = vec![<BigInt as Zero>::zero(); n];
        for (i, x) in a.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.coeffs.iter().enumerate() {
                if !y.is_zero() {
                    coeffs[(i + j) % n] += x * y;
                }
            }
        }
        GroupRingElt { coeffs }
    }
    fn negated(&self) -> Self {
        GroupRingElt { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn group_ring_wraps() {
        let x = GroupRingElt::generator_power(1, 5);
        let x4 = GroupRingElt::generator_power(-1, 5);
        assert_eq!(x.times(&x4), GroupRingElt::generator_power(0, 5));
        let mut s = GroupRingElt::coeff_zero();
        s.add_in_place(&x);
        s.add_in_place(&GroupRingElt::coeff_one());
        assert_eq!(s.component(0), BigInt::from(1));
        assert_eq!(s.component(1), BigInt::from(1));
        assert_eq!(GroupRingElt::coeff_from_i64(3).component(2), BigInt::from(0));
    }
}
