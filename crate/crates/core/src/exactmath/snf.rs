use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::IntMat;

pub type BigMat = Vec<Vec<BigInt>>;

/// Smith normal form `left * A * right = diag(factors)`.
#[derive(Clone, Debug)]
pub struct SnfResult {
    /// Diagonal entries `d1 | d2 | ...`, one per `min(rows, cols)`; trailing zeros for rank deficiency.
    pub factors: Vec<BigInt>,
    pub left: BigMat,
    pub right: BigMat,
}

impl SnfResult {
    /// Invariant factors larger than one (the nontrivial cyclic summands).
    pub fn nontrivial(&self) -> Vec<BigInt> {
        self.factors.iter().filter(|d| !d.is_one()).cloned().collect()
    }
}

pub fn smith_normal_form(a: &IntMat) -> SnfResult {
    let m = (0..a.rows()).map(|i| a.row(i).iter().map(|&x| BigInt::from(x)).collect()).collect();
    smith_normal_form_big(m, a.cols())
}

/// SNF of a big-integer matrix with `cols` columns (needed when `m` is empty).
pub fn smith_normal_form_big(mut m: BigMat, cols: usize) -> SnfResult {
    let rows = m.len();
    let mut left = identity(rows);
    let mut right = identity(cols);
    let n = rows.min(cols);

    for t in 0..n {
        loop {
            let Some((pi, pj)) = min_entry(&m, t) else {
                return finish(m, left, right, n);
            };
            if pi != t {
                m.swap(pi, t);
                left.swap(pi, t);
            }
            if pj != t {
                swap_cols(&mut m, pj, t);
                swap_cols(&mut right, pj, t);
            }
            let mut clean = true;
            for i in t + 1..rows {
                if m[i][t].is_zero() {
                    continue;
                }
                let q = m[i][t].div_floor(&m[t][t]);
                row_axpy(&mut m, i, t, &q);
                row_axpy(&mut left, i, t, &q);
                clean &= m[i][t].is_zero();
            }
            for j in t + 1..cols {
                if m[t][j].is_zero() {
                    continue;
                }
                let q = m[t][j].div_floor(&m[t][t]);
                col_axpy(&mut m, j, t, &q);
                col_axpy(&mut right, j, t, &q);
                clean &= m[t][j].is_zero();
            }
            if !clean {
                continue;
            }
            let offender = (t + 1..rows).find(|&i| {
                (t + 1..cols).any(|j| !m[i][j].is_multiple_of(&m[t][t]))
            });
            match offender {
                Some(i) => {
                    // pull the offending row into the pivot row and retry
                    row_axpy(&mut m, t, i, &BigInt::from(-1));
                    row_axpy(&mut left, t, i, &BigInt::from(-1));
                }
                None => break,
            }
        }
        if m[t][t].is_negative() {
            for x in m[t].iter_mut() {
                *x = -&*x;
            }
            for x in left[t].iter_mut() {
                *x = -&*x;
            }
        }
    }
    finish(m, left, right, n)
}

fn finish(m: BigMat, left: BigMat, right: BigMat, n: usize) -> SnfResult {
    let factors = (0..n).map(|i| m[i][i].clone()).collect();
    SnfResult { factors, left, right }
}

fn identity(n: usize) -> BigMat {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect()
}

fn min_entry(m: &BigMat, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize, BigInt)> = None;
    for (i, row) in m.iter().enumerate().skip(t) {
        for (j, x) in row.iter().enumerate().skip(t) {
            if x.is_zero() {
                continue;
            }
            let a = x.abs();
            if best.as_ref().map_or(true, |b| a < b.2) {
                best = Some((i, j, a));
            }
        }
    }
    best.map(|(i, j, _)| (i, j))
}

fn swap_cols(m: &mut BigMat, a: usize, b: usize) {
    for row in m.iter_mut() {
        row.swap(a, b);
    }
}

/// row[dst] -= q * row[src]
fn row_axpy(m: &mut BigMat, dst: usize, src: usize, q: &BigInt) {
    let src_row = m[src].clone();
    for (x, s) in m[dst].iter_mut().zip(src_row.iter()) {
        *x -= q * s;
    }
}

/// col[dst] -= q * col[src]
fn col_axpy(m: &mut BigMat, dst: usize, src: usize, q: &BigInt) {
    for row in m.iter_mut() {
        let s = row[src].clone();
        row[dst] -= q * s;
    }
}

#[cfg(test)]
fn big_mat_mul(a: &BigMat, b: &BigMat) -> BigMat {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| (0..inner).map(|k| &row[k] * &b[k][j]).sum())
                .collect()
        })
        .collect()
}

#[cfg(test)]
fn big_det(m: &BigMat) -> BigInt {
    let n = m.len();
    let mut a: Vec<Vec<num_rational::BigRational>> = m
        .iter()
        .map(|r| r.iter().map(|x| num_rational::BigRational::from_integer(x.clone())).collect())
        .collect();
    let mut det = num_rational::BigRational::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| !a[r][c].is_zero()) else {
            return BigInt::zero();
        };
        if p != c {
            a.swap(p, c);
            det = -det;
        }
        let piv = a[c][c].clone();
        det *= &piv;
        for r in c + 1..n {
            let f = &a[r][c] / &piv;
            for k in c..n {
                let v = &a[c][k] * &f;
                a[r][k] -= v;
            }
        }
    }
    det.to_integer()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn check(a: &IntMat, expected: &[i64]) {
        let r = smith_normal_form(a);
        let want: Vec<BigInt> = expected.iter().map(|&x| BigInt::from(x)).collect();
        assert_eq!(r.factors, want);
        verify_transforms(a, &r);
    }

    fn verify_transforms(a: &IntMat, r: &SnfResult) {
        let am: BigMat = a.to_rows().iter().map(|row| row.iter().map(|&x| BigInt::from(x)).collect()).collect();
        let d = big_mat_mul(&big_mat_mul(&r.left, &am), &r.right);
        for (i, row) in d.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                if i == j {
                    assert_eq!(x, &r.factors[i]);
                } else {
                    assert!(x.is_zero(), "off-diagonal ({i},{j}) = {x}");
                }
            }
        }
        assert!(big_det(&r.left).abs().is_one());
        assert!(big_det(&r.right).abs().is_one());
        for w in r.factors.windows(2) {
            assert!(w[0].is_zero() && w[1].is_zero() || !w[0].is_zero() && w[1].is_multiple_of(&w[0]));
        }
    }

    #[test]
    fn diagonal_is_fixed() {
        check(&IntMat::scalar(5, 5), &[5, 5, 5, 5, 5]);
    }

    #[test]
    fn loop_and_chain_matrices() {
        check(&IntMat::from_rows(&[vec![2, 1], vec![1, 2]]), &[1, 3]);
        check(&IntMat::from_rows(&[vec![3, 1], vec![0, 4]]), &[1, 12]);
    }

    #[test]
    fn rectangular_and_degenerate() {
        check(&IntMat::from_rows(&[vec![2, 4, 4], vec![-6, 6, 12]]), &[2, 6]);
        check(&IntMat::from_rows(&[vec![0, 0], vec![0, 0]]), &[0, 0]);
        check(&IntMat::from_rows(&[vec![2, 0], vec![0, 3]]), &[1, 6]);
    }

    proptest! {
        #[test]
        fn factors_multiply_to_determinant(entries in proptest::collection::vec(-6i64..7, 9)) {
            let a = IntMat::new(3, 3, entries);
            let r = smith_normal_form(&a);
            verify_transforms(&a, &r);
            let prod: BigInt = r.factors.iter().product();
            prop_assert_eq!(prod, a.determinant().abs());
        }
    }
}
