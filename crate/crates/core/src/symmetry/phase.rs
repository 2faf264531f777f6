use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;

use crate::exactmath::{frac, parse_rat, Rat};

use super::SymmetryError;

/// Diagonal phase symmetry `x_j ↦ e^{2πi p_j} x_j`, stored as `p = num / den`
/// with every `num_j` in `[0, den)` and `den` the least common denominator.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PhaseVector {
    num: Vec<i64>,
    den: i64,
}

impl PhaseVector {
    pub fn zero(dim: usize) -> Self {
        PhaseVector { num: vec![0; dim], den: 1 }
    }

    /// Canonical representative of `p mod Z^d`.
    pub fn from_rats(p: &[Rat]) -> Self {
        let reduced: Vec<Rat> = p.iter().map(frac).collect();
        let den = reduced.iter().fold(BigInt::from(1), |l, x| l.lcm(x.denom()));
        let den_i = den.to_i64().expect("phase denominator fits in i64");
        let num = reduced
            .iter()
            .map(|x| (x.numer() * (&den / x.denom())).to_i64().unwrap())
            .collect();
        PhaseVector { num, den: den_i }
    }

    /// Canonical form of `num / den`, numerators taken mod `den`.
    pub fn from_fraction(num: Vec<i64>, den: i64) -> Self {
        assert!(den > 0);
        let num: Vec<i64> = num.into_iter().map(|n| n.rem_euclid(den)).collect();
        let g = num.iter().fold(den, |g, &n| g.gcd(&n));
        PhaseVector { num: num.into_iter().map(|n| n / g).collect(), den: den / g }
    }

    pub fn dim(&self) -> usize {
        self.num.len()
    }

    pub fn denominator(&self) -> i64 {
        self.den
    }

    pub fn numerators(&self) -> &[i64] {
        &self.num
    }

    /// Order of the element in `Q^d / Z^d`.
    pub fn order(&self) -> i64 {
        self.den
    }

    pub fn is_zero(&self) -> bool {
        self.den == 1
    }

    pub fn coord(&self, j: usize) -> Rat {
        Rat::new(self.num[j].into(), self.den.into())
    }

    pub fn coords(&self) -> Vec<Rat> {
        (0..self.dim()).map(|j| self.coord(j)).collect()
    }

    /// `Σ_j p_j` with the canonical representatives.
    pub fn coord_sum(&self) -> Rat {
        Rat::new(self.num.iter().sum::<i64>().into(), self.den.into())
    }

    pub fn add(&self, other: &PhaseVector) -> PhaseVector {
        let l = self.den.lcm(&other.den);
        let (a, b) = (l / self.den, l / other.den);
        PhaseVector::from_fraction(self.num.iter().zip(&other.num).map(|(x, y)| x * a + y * b).collect(), l)
    }

    pub fn neg(&self) -> PhaseVector {
        PhaseVector::from_fraction(self.num.iter().map(|x| -x).collect(), self.den)
    }

    pub fn scale(&self, k: i64) -> PhaseVector {
        PhaseVector::from_fraction(self.num.iter().map(|x| x * k.rem_euclid(self.den)).collect(), self.den)
    }

    /// Parses `"a/b,c/d,…"`.
    pub fn parse(s: &str) -> Result<Self, SymmetryError> {
        let parts: Result<Vec<Rat>, _> = s.split(',').map(parse_rat).collect();
        parts.map(|p| PhaseVector::from_rats(&p)).map_err(|_| SymmetryError::Parse(s.to_string()))
    }
}

impl Ord for PhaseVector {
    fn cmp(&self, other: &Self) -> Ordering {
        for (a, b) in self.num.iter().zip(&other.num) {
            let lhs = *a as i128 * other.den as i128;
            let rhs = *b as i128 * self.den as i128;
            match lhs.cmp(&rhs) {
                Ordering::Equal => continue,
                o => return o,
            }
        }
        self.num.len().cmp(&other.num.len())
    }
}

impl PartialOrd for PhaseVector {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for PhaseVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = (0..self.dim()).map(|j| crate::exactmath::fmt_rat(&self.coord(j))).collect();
        write!(f, "{}", parts.join(","))
    }
}

impl fmt::Debug for PhaseVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({self})")
    }
}
