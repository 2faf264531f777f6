use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::{Rat, ExactError};

/// Dense integer matrix, row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IntMat {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

impl IntMat {
    pub fn new(rows: usize, cols: usize, data: Vec<i64>) -> Self {
        assert_eq!(data.len(), rows * cols, "IntMat data length");
        IntMat { rows, cols, data }
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        IntMat::new(r, c, rows.concat())
    }

    pub fn identity(n: usize) -> Self {
        Self::scalar(n, 1)
    }

    pub fn scalar(n: usize, s: i64) -> Self {
        let mut data = vec![0; n * n];
        for i in 0..n {
            data[i * n + i] = s;
        }
        IntMat::new(n, n, data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[i64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<i64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self.get(i, j));
            }
        }
        IntMat::new(self.cols, self.rows, data)
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && *self == self.transpose()
    }

    /// Submatrix on the given row and column index lists.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Self {
        let mut data = Vec::with_capacity(rows.len() * cols.len());
        for &i in rows {
            for &j in cols {
                data.push(self.get(i, j));
            }
        }
        IntMat::new(rows.len(), cols.len(), data)
    }

    pub fn to_rat(&self) -> RatMat {
        RatMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| Rat::from_integer(BigInt::from(x))).collect(),
        }
    }

    /// Exact determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> BigInt {
        assert!(self.is_square(), "determinant of non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut m: Vec<Vec<BigInt>> =
            (0..n).map(|i| self.row(i).iter().map(|&x| BigInt::from(x)).collect()).collect();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if m[k][k].is_zero() {
                match (k + 1..n).find(|&r| !m[r][k].is_zero()) {
                    Some(r) => {
                        m.swap(k, r);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                    m[i][j] = v / &prev;
                }
            }
            prev = m[k][k].clone();
        }
        sign * &m[n - 1][n - 1]
    }
}

impl fmt::Display for IntMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = (0..self.rows)
            .map(|i| {
                let r: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
                format!("[{}]", r.join(","))
            })
            .collect();
        write!(f, "[{}]", rows.join(","))
    }
}

/// Dense rational matrix, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatMat {
    rows: usize,
    cols: usize,
    data: Vec<Rat>,
}

impl RatMat {
    pub fn identity(n: usize) -> Self {
        let mut data = vec![Rat::zero(); n * n];
        for i in 0..n {
            data[i * n + i] = Rat::one();
        }
        RatMat { rows: n, cols: n, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Rat {
        &self.data[i * self.cols + j]
    }

    fn get_mut(&mut self, i: usize, j: usize) -> &mut Rat {
        &mut self.data[i * self.cols + j]
    }

    pub fn column(&self, j: usize) -> Vec<Rat> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn row(&self, i: usize) -> Vec<Rat> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn mul(&self, other: &RatMat) -> RatMat {
        assert_eq!(self.cols, other.rows);
        let mut data = Vec::with_capacity(self.rows * other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut s = Rat::zero();
                for k in 0..self.cols {
                    s += self.get(i, k) * other.get(k, j);
                }
                data.push(s);
            }
        }
        RatMat { rows: self.rows, cols: other.cols, data }
    }

    pub fn mul_vec(&self, v: &[Rat]) -> Vec<Rat> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| (0..self.cols).map(|k| self.get(i, k) * &v[k]).sum())
            .collect()
    }
}

/// Exact inverse by Gauss-Jordan elimination over the rationals.
pub fn invert_rational_matrix(a: &IntMat) -> Result<RatMat, ExactError> {
    if !a.is_square() {
        return Err(ExactError::NotSquare { rows: a.rows(), cols: a.cols() });
    }
    let n = a.rows();
    let mut m = a.to_rat();
    let mut inv = RatMat::identity(n);
    for col in 0..n {
        let pivot = (col..n).find(|&r| !m.get(r, col).is_zero()).ok_or(ExactError::Singular)?;
        if pivot != col {
            for j in 0..n {
                m.data.swap(pivot * n + j, col * n + j);
                inv.data.swap(pivot * n + j, col * n + j);
            }
        }
        let p = m.get(col, col).clone();
        for j in 0..n {
            *m.get_mut(col, j) /= &p;
            *inv.get_mut(col, j) /= &p;
        }
        for r in 0..n {
            if r == col || m.get(r, col).is_zero() {
                continue;
            }
            let f = m.get(r, col).clone();
            for j in 0..n {
                let mv = m.get(col, j) * &f;
                *m.get_mut(r, j) -= mv;
                let iv = inv.get(col, j) * &f;
                *inv.get_mut(r, j) -= iv;
            }
        }
    }
    Ok(inv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::rat;

    fn check_inverse(a: &IntMat, expected: &[&[(i64, i64)]]) {
        let inv = invert_rational_matrix(a).unwrap();
        for (i, row) in expected.iter().enumerate() {
            for (j, &(n, d)) in row.iter().enumerate() {
                assert_eq!(inv.get(i, j), &rat(n, d), "entry ({i},{j})");
            }
        }
        assert_eq!(a.to_rat().mul(&inv), RatMat::identity(a.rows()));
    }

    #[test]
    fn scalar_inverse() {
        let inv = invert_rational_matrix(&IntMat::scalar(5, 5)).unwrap();
        for i in 0..5 {
            for j in 0..5 {
                assert_eq!(inv.get(i, j), &if i == j { rat(1, 5) } else { rat(0, 1) });
            }
        }
    }

    #[test]
    fn small_inverses() {
        check_inverse(
            &IntMat::from_rows(&[vec![2, 1], vec![1, 2]]),
            &[&[(2, 3), (-1, 3)], &[(-1, 3), (2, 3)]],
        );
        check_inverse(
            &IntMat::from_rows(&[vec![3, 1], vec![0, 4]]),
            &[&[(1, 3), (-1, 12)], &[(0, 1), (1, 4)]],
        );
    }

    #[test]
    fn singular_is_rejected() {
        let a = IntMat::from_rows(&[vec![1, 2], vec![2, 4]]);
        assert!(matches!(invert_rational_matrix(&a), Err(ExactError::Singular)));
        assert!(a.determinant().is_zero());
    }

    #[test]
    fn determinants() {
        assert_eq!(IntMat::scalar(5, 5).determinant(), BigInt::from(3125));
        assert_eq!(IntMat::from_rows(&[vec![3, 1], vec![0, 4]]).determinant(), BigInt::from(12));
        let a = IntMat::from_rows(&[vec![0, 1, 0], vec![3, 0, 1], vec![0, 0, 2]]);
        assert_eq!(a.determinant(), BigInt::from(-6));
    }
}
