//! Exact arithmetic in `Q(ζ_N)`, elements stored as rational polynomials in a
//! fixed primitive root `ζ_N` reduced modulo the cyclotomic polynomial `Φ_N`.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Zero};
use once_cell::sync::Lazy;

use super::{fmt_rat, to_f64, ExactError, Rat};

/// Reduction tables for one conductor.
#[derive(Debug)]
pub struct CyclotomicField {
    conductor: u32,
    /// Coefficients of `Φ_N`, low degree first; monic.
    modulus: Vec<BigInt>,
    /// `powers[k]` is `x^k mod Φ_N` for `k < N`.
    powers: Vec<Vec<BigInt>>,
}

static FIELDS: Lazy<Mutex<HashMap<u32, Arc<CyclotomicField>>>> = Lazy::new(Default::default);
static POLYS: Lazy<Mutex<HashMap<u32, Vec<BigInt>>>> = Lazy::new(Default::default);

/// `Φ_n` by exact division of `x^n - 1` by `Φ_d` for the proper divisors `d`.
pub fn cyclotomic_polynomial(n: u32) -> Vec<BigInt> {
    assert!(n >= 1);
    if let Some(p) = POLYS.lock().unwrap().get(&n) {
        return p.clone();
    }
    let mut num = vec![BigInt::zero(); n as usize + 1];
    num[0] = BigInt::from(-1);
    num[n as usize] = BigInt::one();
    for d in (1..n).filter(|d| n % d == 0) {
        num = exact_div(&num, &cyclotomic_polynomial(d));
    }
    POLYS.lock().unwrap().insert(n, num.clone());
    num
}

/// Quotient of integer polynomials where `den` is monic and divides `num`.
fn exact_div(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    let qd = rem.len() - 1 - dd;
    let mut quo = vec![BigInt::zero(); qd + 1];
    for k in (0..=qd).rev() {
        let c = rem[k + dd].clone();
        if c.is_zero() {
            continue;
        }
        for (i, d) in den.iter().enumerate() {
            rem[k + i] -= &c * d;
        }
        quo[k] = c;
    }
    debug_assert!(rem.iter().all(Zero::is_zero), "inexact cyclotomic division");
    quo
}

impl CyclotomicField {
    pub fn get(conductor: u32) -> Arc<CyclotomicField> {
        assert!(conductor >= 1, "conductor must be positive");
        if let Some(f) = FIELDS.lock().unwrap().get(&conductor) {
            return f.clone();
        }
        let modulus = cyclotomic_polynomial(conductor);
        let phi = modulus.len() - 1;
        let mut powers = Vec::with_capacity(conductor as usize);
        let mut cur = vec![BigInt::zero(); phi];
        cur[0] = BigInt::one();
        for _ in 0..conductor {
            powers.push(cur.clone());
            // multiply by x, then fold the degree-phi term back
            let top = cur.pop().unwrap_or_default();
            cur.insert(0, BigInt::zero());
            if !top.is_zero() {
                for i in 0..phi {
                    cur[i] -= &top * &modulus[i];
                }
            }
        }
        let f = Arc::new(CyclotomicField { conductor, modulus, powers });
        FIELDS.lock().unwrap().insert(conductor, f.clone());
        f
    }

    pub fn conductor(&self) -> u32 {
        self.conductor
    }

    /// Degree `φ(N)` of the field.
    pub fn degree(&self) -> usize {
        self.modulus.len() - 1
    }

    pub fn modulus(&self) -> &[BigInt] {
        &self.modulus
    }

    fn power(&self, k: usize) -> &[BigInt] {
        &self.powers[k % self.conductor as usize]
    }
}

/// Element of `Q(ζ_N)`.
#[derive(Clone)]
pub struct CycNum {
    field: Arc<CyclotomicField>,
    coeffs: Vec<Rat>,
}

impl CycNum {
    pub fn from_rat(x: Rat) -> Self {
        CycNum { field: CyclotomicField::get(1), coeffs: vec![x] }
    }

    pub fn from_i64(x: i64) -> Self {
        Self::from_rat(Rat::from_integer(BigInt::from(x)))
    }

    pub fn zero() -> Self {
        Self::from_i64(0)
    }

    pub fn one() -> Self {
        Self::from_i64(1)
    }

    /// Builds `Σ_i coeffs[i] ζ_N^i` for arbitrary length, reducing modulo `Φ_N`.
    pub fn from_power_coeffs(conductor: u32, coeffs: &[Rat]) -> Self {
        let field = CyclotomicField::get(conductor);
        let mut out = vec![Rat::zero(); field.degree()];
        for (k, c) in coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (o, p) in out.iter_mut().zip(field.power(k)) {
                if !p.is_zero() {
                    *o += c * Rat::from_integer(p.clone());
                }
            }
        }
        CycNum { field, coeffs: out }
    }

    pub fn conductor(&self) -> u32 {
        self.field.conductor
    }

    pub fn field(&self) -> &Arc<CyclotomicField> {
        &self.field
    }

    /// Coordinates in the power basis `1, ζ, …, ζ^{φ(N)-1}`.
    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// Re-expresses the element over conductor `target`, a multiple of the current one.
    pub fn lift(&self, target: u32) -> CycNum {
        let n = self.conductor();
        if n == target {
            return self.clone();
        }
        assert!(target % n == 0, "cannot lift conductor {n} to {target}");
        let step = (target / n) as usize;
        let mut spread = vec![Rat::zero(); step * self.coeffs.len().max(1)];
        for (i, c) in self.coeffs.iter().enumerate() {
            spread[i * step] = c.clone();
        }
        CycNum::from_power_coeffs(target, &spread)
    }

    fn aligned(a: &CycNum, b: &CycNum) -> (CycNum, CycNum) {
        let l = a.conductor().lcm(&b.conductor());
        (a.lift(l), b.lift(l))
    }

    pub fn add(&self, other: &CycNum) -> CycNum {
        if self.conductor() != other.conductor() {
            let (a, b) = Self::aligned(self, other);
            return a.add(&b);
        }
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        CycNum { field: self.field.clone(), coeffs }
    }

    pub fn add_assign(&mut self, other: &CycNum) {
        if self.conductor() != other.conductor() {
            *self = self.add(other);
            return;
        }
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += b;
        }
    }

    pub fn neg(&self) -> CycNum {
        CycNum { field: self.field.clone(), coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }

    pub fn sub(&self, other: &CycNum) -> CycNum {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &CycNum) -> CycNum {
        if self.conductor() != other.conductor() {
            if other.conductor() == 1 {
                return self.scale(&other.coeffs[0]);
            }
            if self.conductor() == 1 {
                return other.scale(&self.coeffs[0]);
            }
            let (a, b) = Self::aligned(self, other);
            return a.mul(&b);
        }
        let phi = self.coeffs.len();
        let mut prod = vec![Rat::zero(); 2 * phi - 1];
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
        let mut out: Vec<Rat> = prod[..phi].to_vec();
        for (k, c) in prod.iter().enumerate().skip(phi) {
            if c.is_zero() {
                continue;
            }
            for (o, p) in out.iter_mut().zip(self.field.power(k)) {
                if !p.is_zero() {
                    *o += c * Rat::from_integer(p.clone());
                }
            }
        }
        CycNum { field: self.field.clone(), coeffs: out }
    }

    pub fn scale(&self, s: &Rat) -> CycNum {
        CycNum { field: self.field.clone(), coeffs: self.coeffs.iter().map(|c| c * s).collect() }
    }

    pub fn pow(&self, mut e: u64) -> CycNum {
        let mut base = self.clone();
        let mut acc = CycNum::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// Numerical value with `ζ_N = e^{2πi/N}`.
    pub fn to_complex(&self) -> Complex64 {
        let n = self.conductor() as f64;
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| Complex64::from_polar(to_f64(c), std::f64::consts::TAU * k as f64 / n))
            .sum()
    }
}

impl PartialEq for CycNum {
    fn eq(&self, other: &Self) -> bool {
        if self.conductor() == other.conductor() {
            self.coeffs == other.coeffs
        } else {
            let (a, b) = Self::aligned(self, other);
            a.coeffs == b.coeffs
        }
    }
}

impl fmt::Debug for CycNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for CycNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| match k {
                0 => fmt_rat(c),
                _ => format!("{}*z{}^{}", fmt_rat(c), self.conductor(), k),
            })
            .collect();
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

/// `ζ_N^k` exactly.
pub fn root_of_unity(k: i64, conductor: u32) -> CycNum {
    assert!(conductor >= 1);
    let r = k.rem_euclid(conductor as i64) as usize;
    let field = CyclotomicField::get(conductor);
    let coeffs = field.power(r).iter().map(|p| Rat::from_integer(p.clone())).collect();
    CycNum { field, coeffs }
}

/// The rational value of `c`, or an error carrying the irrational components.
pub fn cyc_to_rational(c: &CycNum) -> Result<Rat, ExactError> {
    let (head, tail) = c.coeffs.split_first().expect("cyclotomic element has at least one coordinate");
    if tail.iter().all(Zero::is_zero) {
        Ok(head.clone())
    } else {
        Err(ExactError::NotRational {
            conductor: c.conductor(),
            residual: tail.iter().map(fmt_rat).collect(),
        })
    }
}
