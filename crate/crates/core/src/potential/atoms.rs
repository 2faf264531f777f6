use serde::Serialize;

use super::{Potential, PotentialError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum AtomKind {
    Fermat,
    Loop,
    Chain,
}

/// One decoupled block of an invertible potential.
///
/// `vars` lists variable indices along the block: for a chain
/// `x_{v0}^{e0} x_{v1} + … + x_{vk}^{ek}` head to tail, for a loop starting at
/// its smallest index and following the pointer variable. `rows[i]` is the
/// monomial in which `vars[i]` carries the exponent `exponents[i]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Atom {
    pub kind: AtomKind,
    pub vars: Vec<usize>,
    pub exponents: Vec<i64>,
    pub rows: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AtomDecomposition {
    pub atoms: Vec<Atom>,
}

impl AtomDecomposition {
    /// True if some Fermat block is a bare square `x^2`.
    pub fn has_quadratic_fermat(&self) -> bool {
        self.atoms.iter().any(|a| a.kind == AtomKind::Fermat && a.exponents[0] == 2)
    }

    /// Atom containing variable `j`, with the position of `j` inside it.
    pub fn locate(&self, j: usize) -> Option<(usize, usize)> {
        self.atoms
            .iter()
            .enumerate()
            .find_map(|(ai, a)| a.vars.iter().position(|&v| v == j).map(|pos| (ai, pos)))
    }
}

/// Splits the exponent matrix into Fermat, loop and chain blocks.
pub fn decompose_atoms(p: &Potential) -> Result<AtomDecomposition, PotentialError> {
    let a = p.matrix();
    let d = p.dim();
    let reject = |rows: Vec<usize>, reason: &str| PotentialError::NotInvertible { rows, reason: reason.to_string() };

    // main[i] = variable raised to a power >= 2 in row i; pointer[i] = variable with exponent 1
    let mut main = vec![0usize; d];
    let mut pointer: Vec<Option<usize>> = vec![None; d];
    for i in 0..d {
        let support: Vec<(usize, i64)> = (0..d).map(|j| (j, a.get(i, j))).filter(|&(_, e)| e != 0).collect();
        match support.as_slice() {
            [(j, e)] if *e >= 2 => main[i] = *j,
            [(j1, e1), (j2, e2)] => match (*e1, *e2) {
                (e, 1) if e >= 2 => {
                    main[i] = *j1;
                    pointer[i] = Some(*j2);
                }
                (1, e) if e >= 2 => {
                    main[i] = *j2;
                    pointer[i] = Some(*j1);
                }
                _ => return Err(reject(vec![i], "two-variable monomial must be x^a*y with a >= 2")),
            },
            [(_, 1)] => return Err(reject(vec![i], "linear monomial")),
            _ => return Err(reject(vec![i], "monomial has more than two variables")),
        }
    }

    let mut row_of = vec![None; d];
    for i in 0..d {
        if let Some(prev) = row_of[main[i]] {
            return Err(reject(vec![prev, i], "variable is the leading variable of two monomials"));
        }
        row_of[main[i]] = Some(i);
    }
    let row_of: Vec<usize> = row_of.into_iter().map(|r| r.expect("bijection")).collect();

    let mut next = vec![None; d];
    let mut indegree = vec![0usize; d];
    for i in 0..d {
        if let Some(t) = pointer[i] {
            next[main[i]] = Some(t);
            indegree[t] += 1;
        }
    }
    if let Some(j) = (0..d).find(|&j| indegree[j] > 1) {
        let rows = (0..d).filter(|&i| pointer[i] == Some(j)).collect();
        return Err(reject(rows, "variable multiplies two different monomials"));
    }

    let mut seen = vec![false; d];
    let mut atoms = Vec::new();
    for head in (0..d).filter(|&j| indegree[j] == 0) {
        let mut vars = vec![head];
        seen[head] = true;
        let mut cur = head;
        while let Some(n) = next[cur] {
            vars.push(n);
            seen[n] = true;
            cur = n;
        }
        let kind = if vars.len() == 1 { AtomKind::Fermat } else { AtomKind::Chain };
        atoms.push(make_atom(kind, vars, &row_of, p));
    }
    for start in 0..d {
        if seen[start] {
            continue;
        }
        // every unvisited variable lies on a cycle; `start` is its smallest index
        let mut vars = vec![start];
        seen[start] = true;
        let mut cur = next[start].expect("cycle member has a successor");
        while cur != start {
            vars.push(cur);
            seen[cur] = true;
            cur = next[cur].expect("cycle member has a successor");
        }
        atoms.push(make_atom(AtomKind::Loop, vars, &row_of, p));
    }
    atoms.sort_by_key(|at| *at.vars.iter().min().unwrap());
    Ok(AtomDecomposition { atoms })
}

fn make_atom(kind: AtomKind, vars: Vec<usize>, row_of: &[usize], p: &Potential) -> Atom {
    let rows: Vec<usize> = vars.iter().map(|&v| row_of[v]).collect();
    let exponents = vars.iter().zip(&rows).map(|(&v, &r)| p.matrix().get(r, v)).collect();
    Atom { kind, vars, exponents, rows }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::parse_potential;

    fn atoms(s: &str) -> Vec<Atom> {
        decompose_atoms(&parse_potential(s).unwrap()).unwrap().atoms
    }

    #[test]
    fn quintic_is_five_fermats() {
        let a = atoms("x1^5+x2^5+x3^5+x4^5+x5^5");
        assert_eq!(a.len(), 5);
        assert!(a.iter().all(|at| at.kind == AtomKind::Fermat && at.exponents == vec![5]));
    }

    #[test]
    fn two_cycle_is_a_loop() {
        let a = atoms("x1^2*x2+x2^2*x1");
        assert_eq!(a, vec![Atom { kind: AtomKind::Loop, vars: vec![0, 1], exponents: vec![2, 2], rows: vec![0, 1] }]);
    }

    #[test]
    fn chain_head_to_tail() {
        let a = atoms("x1^3*x2+x2^4");
        assert_eq!(a, vec![Atom { kind: AtomKind::Chain, vars: vec![0, 1], exponents: vec![3, 4], rows: vec![0, 1] }]);
        // transposed chain runs the other way
        let a = atoms("x1^3 + x1*x2^4");
        assert_eq!(a[0].kind, AtomKind::Chain);
        assert_eq!(a[0].vars, vec![1, 0]);
        assert_eq!(a[0].exponents, vec![4, 3]);
    }

    #[test]
    fn loop_starts_at_smallest_index() {
        let a = atoms("x3^2*x1 + x1^3*x2 + x2^4*x3 + x4^5");
        assert_eq!(a[0].kind, AtomKind::Loop);
        assert_eq!(a[0].vars, vec![0, 1, 2]);
        assert_eq!(a[0].exponents, vec![3, 4, 2]);
        assert_eq!(a[1].kind, AtomKind::Fermat);
    }

    #[test]
    fn mixed_blocks_partition_variables() {
        let a = atoms("x1^3*x2+x2^4+x3^4+x4^4");
        let mut all: Vec<usize> = a.iter().flat_map(|at| at.vars.clone()).collect();
        all.sort();
        assert_eq!(all, vec![0, 1, 2, 3]);
        assert_eq!(a.iter().filter(|at| at.kind == AtomKind::Fermat).count(), 2);
    }

    #[test]
    fn unclassifiable_is_rejected() {
        let p = parse_potential("x1^3*x3 + x2^3*x3 + x3^3").unwrap();
        match decompose_atoms(&p) {
            Err(PotentialError::NotInvertible { rows, .. }) => assert_eq!(rows, vec![0, 1]),
            other => panic!("unexpected {other:?}"),
        }
        let p = parse_potential("x1^2*x2^2 + x2^3").unwrap();
        assert!(matches!(decompose_atoms(&p), Err(PotentialError::NotInvertible { .. })));
    }
}
