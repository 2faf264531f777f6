//! Invertible polynomial potentials: parsing, block structure, transposition and charges.

mod atoms;
mod parse;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::exactmath::{fmt_rat, invert_rational_matrix, is_integer, IntMat, Rat, RatMat};

pub use atoms::{decompose_atoms, Atom, AtomDecomposition, AtomKind};
pub use parse::parse_potential;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PotentialError {
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("{monomials} monomials in {variables} variables; an invertible potential needs a square system")]
    NotSquare { monomials: usize, variables: usize },
    #[error("exponent matrix is singular")]
    Singular,
    #[error("not an invertible potential (monomials {rows:?}): {reason}")]
    NotInvertible { rows: Vec<usize>, reason: String },
    #[error("degenerate charges {charges:?}: every charge must lie in (0,1)")]
    DegenerateCharges { charges: Vec<String> },
}

/// `W = Σ_i Π_j x_j^{a_ij}` with square, invertible exponent matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Potential {
    matrix: IntMat,
    names: Vec<String>,
}

impl Potential {
    pub fn from_matrix(matrix: IntMat) -> Result<Self, PotentialError> {
        let names = (1..=matrix.cols()).map(|i| format!("x{i}")).collect();
        Self::with_names(matrix, names)
    }

    pub fn with_names(matrix: IntMat, names: Vec<String>) -> Result<Self, PotentialError> {
        if !matrix.is_square() {
            return Err(PotentialError::NotSquare { monomials: matrix.rows(), variables: matrix.cols() });
        }
        assert_eq!(names.len(), matrix.cols());
        if matrix.rows() > 0 && matrix.determinant().is_zero() {
            return Err(PotentialError::Singular);
        }
        Ok(Potential { matrix, names })
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    /// Row `i` holds the exponents of monomial `i`.
    pub fn matrix(&self) -> &IntMat {
        &self.matrix
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// `|det A|`, the order of the diagonal symmetry group.
    pub fn abs_det(&self) -> u64 {
        use num_traits::ToPrimitive;
        self.matrix.determinant().abs().to_u64().expect("determinant fits in u64")
    }

    pub fn inverse(&self) -> RatMat {
        invert_rational_matrix(&self.matrix).expect("validated non-singular")
    }

    /// Monomial-sum text, e.g. `x1^3*x2 + x2^4`.
    pub fn canonical_text(&self) -> String {
        (0..self.dim())
            .map(|i| {
                self.matrix
                    .row(i)
                    .iter()
                    .enumerate()
                    .filter(|(_, &e)| e != 0)
                    .map(|(j, &e)| if e == 1 { self.names[j].clone() } else { format!("{}^{}", self.names[j], e) })
                    .collect::<Vec<_>>()
                    .join("*")
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

/// The dual potential with exponent matrix `Aᵀ`.
pub fn transpose_potential(p: &Potential) -> Potential {
    Potential { matrix: p.matrix.transpose(), names: p.names.clone() }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Charges {
    pub q: Vec<Rat>,
    /// `Σ q_j` when it is a positive integer.
    pub cy_degree: Option<i64>,
    /// Central charge `d - 2 Σ q_j`.
    pub cbar: Rat,
}

impl Charges {
    pub fn sum(&self) -> Rat {
        self.q.iter().sum()
    }

    pub fn is_calabi_yau(&self) -> bool {
        self.cy_degree.is_some()
    }

    /// `ĉ` as an integer; present whenever the Calabi-Yau condition holds.
    pub fn cbar_integer(&self) -> Option<i64> {
        use num_traits::ToPrimitive;
        is_integer(&self.cbar).then(|| self.cbar.to_integer().to_i64().unwrap())
    }
}

/// Solves `A q = (1,…,1)`.
pub fn compute_charges(p: &Potential) -> Result<Charges, PotentialError> {
    let ones = vec![Rat::one(); p.dim()];
    let q = p.inverse().mul_vec(&ones);
    if q.iter().any(|x| !x.is_positive() || *x >= Rat::one()) {
        return Err(PotentialError::DegenerateCharges { charges: q.iter().map(fmt_rat).collect() });
    }
    let sum: Rat = q.iter().sum();
    use num_traits::ToPrimitive;
    let cy_degree = (is_integer(&sum) && sum.is_positive()).then(|| sum.to_integer().to_i64().unwrap());
    let cbar = Rat::from_integer(p.dim().into()) - &sum * Rat::from_integer(2.into());
    Ok(Charges { q, cy_degree, cbar })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::{rat, rat_int};
    use proptest::prelude::*;

    #[test]
    fn quintic_charges() {
        let c = compute_charges(&parse_potential("x1^5+x2^5+x3^5+x4^5+x5^5").unwrap()).unwrap();
        assert_eq!(c.q, vec![rat(1, 5); 5]);
        assert_eq!(c.cy_degree, Some(1));
        assert_eq!(c.cbar, rat_int(3));
    }

    #[test]
    fn chain_is_not_calabi_yau() {
        let c = compute_charges(&parse_potential("x1^3*x2+x2^4").unwrap()).unwrap();
        assert_eq!(c.q, vec![rat(1, 4), rat(1, 4)]);
        assert_eq!(c.cy_degree, None);
        assert_eq!(c.sum(), rat(1, 2));
    }

    #[test]
    fn k3_chain_charges() {
        let c = compute_charges(&parse_potential("x1^3*x2+x2^4+x3^4+x4^4").unwrap()).unwrap();
        assert_eq!(c.q, vec![rat(1, 4); 4]);
        assert_eq!(c.cy_degree, Some(1));
        assert_eq!(c.cbar, rat_int(2));
        let dual = compute_charges(&transpose_potential(&parse_potential("x1^3*x2+x2^4+x3^4+x4^4").unwrap())).unwrap();
        assert_eq!(dual.q, vec![rat(1, 3), rat(1, 6), rat(1, 4), rat(1, 4)]);
        assert_eq!(dual.cbar, rat_int(2));
    }

    #[test]
    fn transposes() {
        let q = parse_potential("x1^5+x2^5+x3^5+x4^5+x5^5").unwrap();
        assert_eq!(transpose_potential(&q), q);
        let c = parse_potential("x1^3*x2+x2^4").unwrap();
        assert_eq!(transpose_potential(&c).matrix(), &IntMat::from_rows(&[vec![3, 0], vec![1, 4]]));
        assert_eq!(transpose_potential(&c).canonical_text(), "x1^3 + x1*x2^4");
        let l = parse_potential("x1^2*x2+x2^2*x1").unwrap();
        assert_eq!(transpose_potential(&l), l);
    }

    #[test]
    fn transpose_preserves_atom_kinds() {
        for s in ["x1^3*x2+x2^4+x3^4+x4^4", "x1^3*x2+x2^3*x1+x3^4+x4^4", "x1^2*x2+x2^3*x3+x3^4+x4^5*x5+x5^6*x4"] {
            let p = parse_potential(s).unwrap();
            let mut k1: Vec<_> = decompose_atoms(&p).unwrap().atoms.iter().map(|a| (a.kind, a.vars.len())).collect();
            let mut k2: Vec<_> =
                decompose_atoms(&transpose_potential(&p)).unwrap().atoms.iter().map(|a| (a.kind, a.vars.len())).collect();
            k1.sort_by_key(|x| format!("{x:?}"));
            k2.sort_by_key(|x| format!("{x:?}"));
            assert_eq!(k1, k2, "{s}");
        }
    }

    // Random sums of Fermat, chain and loop blocks.
    fn arb_blocks() -> impl Strategy<Value = Vec<(u8, Vec<i64>)>> {
        proptest::collection::vec((0u8..3, proptest::collection::vec(2i64..6, 1..4)), 1..4)
    }

    fn build(blocks: &[(u8, Vec<i64>)]) -> Potential {
        let d: usize = blocks.iter().map(|(k, e)| if *k == 0 { 1 } else { e.len().max(2) }).sum();
        let mut rows = vec![vec![0i64; d]; d];
        let mut off = 0;
        for (kind, exps) in blocks {
            let mut exps = exps.clone();
            if *kind == 0 {
                exps.truncate(1);
            } else if exps.len() < 2 {
                exps.push(3);
            }
            let k = exps.len();
            for (i, &e) in exps.iter().enumerate() {
                rows[off + i][off + i] = e;
                if i + 1 < k {
                    rows[off + i][off + i + 1] = 1;
                } else if *kind == 2 {
                    rows[off + i][off] = 1;
                }
            }
            off += k;
        }
        Potential::from_matrix(IntMat::from_rows(&rows)).unwrap()
    }

    proptest! {
        #[test]
        fn charge_invariants(blocks in arb_blocks()) {
            let p = build(&blocks);
            let c = compute_charges(&p).unwrap();
            let a = p.matrix().to_rat();
            for i in 0..p.dim() {
                let s: Rat = (0..p.dim()).map(|j| a.get(i, j) * &c.q[j]).sum();
                prop_assert_eq!(s, Rat::one());
            }
            prop_assert_eq!(&c.cbar, &(Rat::from_integer(p.dim().into()) - c.sum() * rat_int(2)));
            if c.is_calabi_yau() {
                let cb = c.cbar_integer().unwrap();
                prop_assert_eq!((cb - p.dim() as i64).rem_euclid(2), 0);
            }
            let t = transpose_potential(&p);
            prop_assert_eq!(transpose_potential(&t), p.clone());
            let ct = compute_charges(&t).unwrap();
            prop_assert_eq!(ct.sum(), c.sum());
            if p.matrix().is_symmetric() {
                prop_assert_eq!(ct.q, c.q);
            }
        }

        #[test]
        fn decomposition_partitions_and_reconstructs(blocks in arb_blocks()) {
            let p = build(&blocks);
            let dec = decompose_atoms(&p).unwrap();
            let mut all: Vec<usize> = dec.atoms.iter().flat_map(|a| a.vars.clone()).collect();
            all.sort();
            prop_assert_eq!(all, (0..p.dim()).collect::<Vec<_>>());
            let mut rebuilt = vec![vec![0i64; p.dim()]; p.dim()];
            for at in &dec.atoms {
                let k = at.vars.len();
                for i in 0..k {
                    rebuilt[at.rows[i]][at.vars[i]] = at.exponents[i];
                    let nxt = match at.kind {
                        AtomKind::Fermat => None,
                        AtomKind::Chain => (i + 1 < k).then(|| at.vars[i + 1]),
                        AtomKind::Loop => Some(at.vars[(i + 1) % k]),
                    };
                    if let Some(n) = nxt {
                        rebuilt[at.rows[i]][n] = 1;
                    }
                }
            }
            prop_assert_eq!(IntMat::from_rows(&rebuilt), p.matrix().clone());
        }
    }
}
