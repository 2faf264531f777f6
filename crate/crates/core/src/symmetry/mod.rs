//! Diagonal symmetry groups of invertible potentials and their duals.

mod phase;

use std::collections::{HashMap, HashSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use thiserror::Error;

use crate::exactmath::{is_integer, smith_normal_form, IntMat, Rat};
use crate::potential::{compute_charges, transpose_potential, Potential, PotentialError};

pub use phase::PhaseVector;

/// Largest `|det A|` for which groups are materialized.
pub const MAX_GROUP_ORDER: u64 = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SymmetryError {
    #[error("cannot parse group element {0:?}")]
    Parse(String),
    #[error("group element {element} has {found} coordinates, expected {expected}")]
    Dimension { element: String, found: usize, expected: usize },
    #[error("J_W ∉ SL_W: the Calabi-Yau condition fails")]
    NotCalabiYau,
    #[error("{0} is not a symmetry of the potential")]
    NotInAut(String),
    #[error("{0} is not in SL_W")]
    NotInSl(String),
    #[error("group does not contain the grading element J_W = {0}")]
    MissingGrading(String),
    #[error("|det A| = {0} exceeds the enumeration cap")]
    TooLarge(u64),
    #[error(transparent)]
    Potential(#[from] PotentialError),
}

/// Finite subgroup of `Q^d / Z^d`, with all elements materialized in sorted order.
#[derive(Clone, Debug)]
pub struct SymmetryGroup {
    dim: usize,
    generators: Vec<PhaseVector>,
    elements: Vec<PhaseVector>,
    invariants: Vec<u64>,
}

impl PartialEq for SymmetryGroup {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.elements == other.elements
    }
}

impl Eq for SymmetryGroup {}

impl SymmetryGroup {
    pub fn trivial(dim: usize) -> Self {
        SymmetryGroup { dim, generators: vec![], elements: vec![PhaseVector::zero(dim)], invariants: vec![] }
    }

    /// Closure of `generators` under addition mod 1.
    pub fn generated_by(dim: usize, generators: &[PhaseVector]) -> Self {
        let mut elements = vec![PhaseVector::zero(dim)];
        let mut seen: HashSet<PhaseVector> = elements.iter().cloned().collect();
        let mut kept = Vec::new();
        for g in generators {
            assert_eq!(g.dim(), dim);
            if seen.contains(g) {
                continue;
            }
            kept.push(g.clone());
            let base = elements.clone();
            let mut step = g.clone();
            while !seen.contains(&step) {
                for h in &base {
                    let e = h.add(&step);
                    seen.insert(e.clone());
                    elements.push(e);
                }
                step = step.add(g);
            }
        }
        elements.sort();
        let invariants = invariant_factors(dim, &kept);
        SymmetryGroup { dim, generators: kept, elements, invariants }
    }

    /// Subgroup built from an element list already known to be closed.
    fn from_closed_elements(dim: usize, mut elements: Vec<PhaseVector>) -> Self {
        elements.sort();
        let generators = minimal_generators(dim, &elements);
        let invariants = invariant_factors(dim, &generators);
        SymmetryGroup { dim, generators, elements, invariants }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn generators(&self) -> &[PhaseVector] {
        &self.generators
    }

    pub fn elements(&self) -> &[PhaseVector] {
        &self.elements
    }

    /// Invariant factors `d1 | d2 | …`, all larger than one.
    pub fn invariants(&self) -> &[u64] {
        &self.invariants
    }

    pub fn contains(&self, p: &PhaseVector) -> bool {
        self.elements.binary_search(p).is_ok()
    }

    pub fn is_subgroup_of(&self, other: &SymmetryGroup) -> bool {
        self.elements.iter().all(|e| other.contains(e))
    }

    /// Least common multiple of element orders.
    pub fn exponent(&self) -> i64 {
        self.generators.iter().fold(1, |l, g| l.lcm(&g.order()))
    }

    /// Generators as fraction strings, e.g. `["1/5,1/5,1/5,1/5,1/5"]`.
    pub fn generator_strings(&self) -> Vec<String> {
        self.generators.iter().map(|g| g.to_string()).collect()
    }

    /// Structure as text, e.g. `Z/5 x Z/5` or `1`.
    pub fn structure_text(&self) -> String {
        if self.invariants.is_empty() {
            "1".to_string()
        } else {
            self.invariants.iter().map(|d| format!("Z/{d}")).collect::<Vec<_>>().join(" x ")
        }
    }
}

/// Invariant factors of the group generated by `gens`, via SNF of the relation lattice.
fn invariant_factors(dim: usize, gens: &[PhaseVector]) -> Vec<u64> {
    let d = gens.iter().fold(1i64, |l, g| l.lcm(&g.denominator()));
    if d == 1 {
        return vec![];
    }
    let mut rows: Vec<Vec<i64>> = gens
        .iter()
        .map(|g| g.numerators().iter().map(|n| n * (d / g.denominator())).collect())
        .collect();
    for j in 0..dim {
        let mut r = vec![0; dim];
        r[j] = d;
        rows.push(r);
    }
    let snf = smith_normal_form(&IntMat::from_rows(&rows));
    let dd = BigInt::from(d);
    let mut inv: Vec<u64> = snf
        .factors
        .iter()
        .map(|e| (&dd / e).to_u64().unwrap())
        .filter(|&x| x > 1)
        .collect();
    inv.sort();
    inv
}

/// Greedy generating set: repeatedly adjoin an element of largest order not yet covered.
fn minimal_generators(dim: usize, elements: &[PhaseVector]) -> Vec<PhaseVector> {
    let mut by_order: Vec<&PhaseVector> = elements.iter().collect();
    by_order.sort_by(|a, b| b.order().cmp(&a.order()).then(a.cmp(b)));
    let mut gens = Vec::new();
    let mut current = SymmetryGroup::trivial(dim);
    for e in by_order {
        if current.order() == elements.len() {
            break;
        }
        if !current.contains(e) {
            gens.push(e.clone());
            current = SymmetryGroup::generated_by(dim, &gens);
        }
    }
    gens
}

fn check_size(p: &Potential) -> Result<(), SymmetryError> {
    let n = p.abs_det();
    if n > MAX_GROUP_ORDER {
        return Err(SymmetryError::TooLarge(n));
    }
    Ok(())
}

/// `Aut(W)`: generated by the columns of `A⁻¹` mod `Z^d`.
pub fn aut_group(p: &Potential) -> SymmetryGroup {
    let inv = p.inverse();
    let gens: Vec<PhaseVector> = (0..p.dim()).map(|j| PhaseVector::from_rats(&inv.column(j))).collect();
    let g = SymmetryGroup::generated_by(p.dim(), &gens);
    debug_assert_eq!(g.order() as u64, p.abs_det());
    g
}

/// Checked variant of [`aut_group`] honouring [`MAX_GROUP_ORDER`].
pub fn try_aut_group(p: &Potential) -> Result<SymmetryGroup, SymmetryError> {
    check_size(p)?;
    Ok(aut_group(p))
}

/// `J_W = (q_1, …, q_d) mod 1`.
pub fn grading_element(p: &Potential) -> Result<PhaseVector, SymmetryError> {
    Ok(PhaseVector::from_rats(&compute_charges(p)?.q))
}

pub fn grading_subgroup(p: &Potential) -> Result<SymmetryGroup, SymmetryError> {
    Ok(SymmetryGroup::generated_by(p.dim(), &[grading_element(p)?]))
}

fn in_sl(e: &PhaseVector) -> bool {
    is_integer(&e.coord_sum())
}

pub fn sl_subgroup(p: &Potential) -> SymmetryGroup {
    let aut = aut_group(p);
    let elements = aut.elements.into_iter().filter(in_sl).collect();
    SymmetryGroup::from_closed_elements(p.dim(), elements)
}

/// `A·p ∈ Z^d`.
pub fn is_symmetry(p: &Potential, e: &PhaseVector) -> bool {
    let a = p.matrix();
    (0..p.dim()).all(|i| {
        let s: i128 = (0..p.dim()).map(|j| a.get(i, j) as i128 * e.numerators()[j] as i128).sum();
        s % e.denominator() as i128 == 0
    })
}

/// All groups `G` with `⟨J_W⟩ ⊆ G ⊆ SL_W`, ordered by size then elements.
pub fn admissible_subgroups(p: &Potential) -> Result<Vec<SymmetryGroup>, SymmetryError> {
    check_size(p)?;
    let j = grading_element(p)?;
    if !in_sl(&j) {
        return Err(SymmetryError::NotCalabiYau);
    }
    let sl = sl_subgroup(p);
    let start = SymmetryGroup::generated_by(p.dim(), &[j]);
    let mut found: HashMap<Vec<PhaseVector>, SymmetryGroup> = HashMap::new();
    let mut frontier = vec![start.clone()];
    found.insert(start.elements.clone(), start);
    while let Some(h) = frontier.pop() {
        let mut done: HashSet<PhaseVector> = h.elements.iter().cloned().collect();
        for g in sl.elements() {
            if done.contains(g) {
                continue;
            }
            for e in h.elements() {
                done.insert(e.add(g));
            }
            let mut gens = h.generators.clone();
            gens.push(g.clone());
            let bigger = SymmetryGroup::generated_by(p.dim(), &gens);
            if !found.contains_key(&bigger.elements) {
                found.insert(bigger.elements.clone(), bigger.clone());
                frontier.push(bigger);
            }
        }
    }
    let mut groups: Vec<SymmetryGroup> = found.into_values().collect();
    groups.sort_by(|a, b| a.order().cmp(&b.order()).then_with(|| a.elements.cmp(&b.elements)));
    Ok(groups)
}

/// Integrality of the pairing `p̄·A·p`.
fn pairs_integrally(a: &IntMat, pbar: &PhaseVector, p: &PhaseVector) -> bool {
    let d = a.rows();
    let mut s: i128 = 0;
    for i in 0..d {
        let u = pbar.numerators()[i] as i128;
        if u == 0 {
            continue;
        }
        for j in 0..d {
            s += u * a.get(i, j) as i128 * p.numerators()[j] as i128;
        }
    }
    s % (pbar.denominator() as i128 * p.denominator() as i128) == 0
}

/// `G∨ ⊆ Aut(Wᵀ)`: all `p̄` pairing integrally with every element of `G`.
pub fn dual_group(p: &Potential, g: &SymmetryGroup) -> Result<SymmetryGroup, SymmetryError> {
    check_size(p)?;
    let a = p.matrix();
    let aut_dual = aut_group(&transpose_potential(p));
    let elements = aut_dual
        .elements
        .into_iter()
        .filter(|pbar| g.generators().iter().all(|x| pairs_integrally(a, pbar, x)))
        .collect();
    Ok(SymmetryGroup::from_closed_elements(p.dim(), elements))
}

/// Canonical coordinates `θ_j(n) ∈ [0,1)`.
pub fn theta_coords(n: &PhaseVector) -> Vec<Rat> {
    n.coords()
}

/// One `[0,1)^d` representative per group element.
pub fn box_representatives(g: &SymmetryGroup) -> Vec<PhaseVector> {
    g.elements.clone()
}

/// Parses `"g1;g2;…"`, each `gᵢ = "a/b,…"`.
pub fn parse_generators(text: &str, dim: usize) -> Result<Vec<PhaseVector>, SymmetryError> {
    text.split(';')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            let v = PhaseVector::parse(s)?;
            if v.dim() != dim {
                return Err(SymmetryError::Dimension { element: s.to_string(), found: v.dim(), expected: dim });
            }
            Ok(v)
        })
        .collect()
}

/// Closes user-supplied generators and checks `⟨J_W⟩ ⊆ G ⊆ SL_W`.
pub fn admissible_group(p: &Potential, generators: &[PhaseVector]) -> Result<SymmetryGroup, SymmetryError> {
    check_size(p)?;
    let j = grading_element(p)?;
    if !in_sl(&j) {
        return Err(SymmetryError::NotCalabiYau);
    }
    for g in generators {
        if !is_symmetry(p, g) {
            return Err(SymmetryError::NotInAut(g.to_string()));
        }
        if !in_sl(g) {
            return Err(SymmetryError::NotInSl(g.to_string()));
        }
    }
    let group = SymmetryGroup::generated_by(p.dim(), generators);
    if !group.contains(&j) {
        return Err(SymmetryError::MissingGrading(j.to_string()));
    }
    Ok(group)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::{rat, IntMat};
    use crate::potential::parse_potential;

    fn pot(s: &str) -> Potential {
        parse_potential(s).unwrap()
    }

    fn test_potentials() -> Vec<Potential> {
        [
            "x1^2+x2^2",
            "x1^3+x2^3+x3^3",
            "x1^5+x2^5+x3^5+x4^5+x5^5",
            "x1^3*x2+x2^4+x3^4+x4^4",
            "x1^3*x2+x2^3*x1+x3^4+x4^4",
        ]
        .iter()
        .map(|s| pot(s))
        .collect()
    }

    #[test]
    fn aut_examples() {
        let q = aut_group(&pot("x1^5+x2^5+x3^5+x4^5+x5^5"));
        assert_eq!(q.order(), 3125);
        assert_eq!(q.invariants(), &[5, 5, 5, 5, 5]);

        let m = Potential::from_matrix(IntMat::from_rows(&[vec![2, 1], vec![1, 2]])).unwrap();
        let g = aut_group(&m);
        assert_eq!(g.order(), 3);
        assert!(g.contains(&PhaseVector::parse("1/3,1/3").unwrap()));

        let c = Potential::from_matrix(IntMat::from_rows(&[vec![3, 1], vec![0, 4]])).unwrap();
        let g = aut_group(&c);
        assert_eq!(g.order(), 12);
        assert_eq!(g.invariants(), &[12]);
        for gen in g.generators() {
            assert!(theta_coords(gen).iter().all(|t| *t >= rat(0, 1) && *t < rat(1, 1)));
        }
    }

    #[test]
    fn grading_and_sl() {
        let q = pot("x1^5+x2^5+x3^5+x4^5+x5^5");
        assert_eq!(grading_element(&q).unwrap(), PhaseVector::parse("1/5,1/5,1/5,1/5,1/5").unwrap());
        assert_eq!(sl_subgroup(&q).order(), 625);
        let k3 = pot("x1^3*x2+x2^4+x3^4+x4^4");
        assert_eq!(grading_element(&k3).unwrap(), PhaseVector::parse("1/4,1/4,1/4,1/4").unwrap());
        let two = pot("x1^2+x2^2");
        assert_eq!(grading_element(&two).unwrap(), PhaseVector::parse("1/2,1/2").unwrap());
        let sl = sl_subgroup(&two);
        assert_eq!(box_representatives(&sl), vec![PhaseVector::zero(2), PhaseVector::parse("1/2,1/2").unwrap()]);
        let m = Potential::from_matrix(IntMat::from_rows(&[vec![2, 1], vec![1, 2]])).unwrap();
        assert_eq!(sl_subgroup(&m).order(), 1);
    }

    #[test]
    fn admissible_lists() {
        let two = admissible_subgroups(&pot("x1^2+x2^2")).unwrap();
        assert_eq!(two.len(), 1);
        assert_eq!(two[0].order(), 2);

        // SL/⟨J⟩ has prime order, so nothing lies strictly between.
        let cubic = admissible_subgroups(&pot("x1^3+x2^3+x3^3")).unwrap();
        let orders: Vec<usize> = cubic.iter().map(|g| g.order()).collect();
        assert_eq!(orders, vec![3, 9]);
        let sl = &cubic[1];
        for e in box_representatives(sl) {
            assert!(is_integer(&e.coord_sum()));
            assert!(e.coords().iter().all(|t| [rat(0, 1), rat(1, 3), rat(2, 3)].contains(t)));
        }

        let quintic = admissible_subgroups(&pot("x1^5+x2^5+x3^5+x4^5+x5^5")).unwrap();
        // Subgroups of (Z/5)^3: 1 + 31 + 31 + 1.
        assert_eq!(quintic.len(), 64);
        assert_eq!(quintic[0].order(), 5);
        assert_eq!(quintic.last().unwrap().order(), 625);

        let chain = pot("x1^3*x2+x2^4");
        assert_eq!(admissible_subgroups(&chain), Err(SymmetryError::NotCalabiYau));
    }

    #[test]
    fn duality_on_test_potentials() {
        for p in test_potentials() {
            let pv = transpose_potential(&p);
            let det = p.abs_det() as usize;
            let j = grading_subgroup(&p).unwrap();
            let sl = sl_subgroup(&p);
            assert_eq!(dual_group(&p, &j).unwrap(), sl_subgroup(&pv));
            assert_eq!(dual_group(&p, &sl).unwrap(), grading_subgroup(&pv).unwrap());
            assert_eq!(dual_group(&p, &aut_group(&p)).unwrap().order(), 1);
            for g in admissible_subgroups(&p).unwrap() {
                let gv = dual_group(&p, &g).unwrap();
                assert_eq!(g.order() * gv.order(), det);
                assert_eq!(dual_group(&pv, &gv).unwrap(), g);
                assert!(gv.contains(&grading_element(&pv).unwrap()));
                assert!(gv.is_subgroup_of(&sl_subgroup(&pv)));
                for n in g.elements() {
                    assert!(is_integer(&theta_coords(n).iter().sum()));
                }
            }
        }
    }

    #[test]
    fn user_groups_are_validated() {
        let q = pot("x1^5+x2^5+x3^5+x4^5+x5^5");
        let gens = parse_generators("1/5,1/5,1/5,1/5,1/5", 5).unwrap();
        assert_eq!(admissible_group(&q, &gens).unwrap().order(), 5);
        let bad = parse_generators("1/5,4/5,0,0,0", 5).unwrap();
        assert!(matches!(admissible_group(&q, &bad), Err(SymmetryError::MissingGrading(_))));
        let not_sl = parse_generators("1/5,0,0,0,0", 5).unwrap();
        assert!(matches!(admissible_group(&q, &not_sl), Err(SymmetryError::NotInSl(_))));
        let not_aut = parse_generators("1/3,2/3,0,0,0", 5).unwrap();
        assert!(matches!(admissible_group(&q, &not_aut), Err(SymmetryError::NotInAut(_))));
        assert!(matches!(parse_generators("1/5,1/5", 5), Err(SymmetryError::Dimension { .. })));
    }
}
