//! Exact integer/rational linear algebra: fraction-free elimination.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::scenario::Rational;

/// Divides a row by the gcd of its entries and makes the leading entry positive.
fn normalize(row: &mut [BigInt]) {
    let g = row.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
    if !g.is_zero() && !g.is_one() {
        for x in row.iter_mut() {
            *x /= &g;
        }
    }
    if let Some(lead) = row.iter().find(|x| !x.is_zero()) {
        if lead.is_negative() {
            for x in row.iter_mut() {
                *x = -&*x;
            }
        }
    }
}

/// Incremental row-echelon basis over the integers.
///
/// Each pushed row is reduced against the stored rows with cross
/// multiplication (no division other than exact content removal), so every
/// intermediate entry is an integer. Pivots are the first nonzero column of
/// each reduced row.
#[derive(Debug, Clone)]
pub struct EchelonBasis {
    width: usize,
    rows: Vec<(usize, Vec<BigInt>)>,
}

impl EchelonBasis {
    pub fn new(width: usize) -> Self {
        Self {
            width,
            rows: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn is_full(&self) -> bool {
        self.rows.len() == self.width
    }

    /// Returns true if `row` was independent of the rows pushed so far.
    pub fn push(&mut self, row: impl IntoIterator<Item = BigInt>) -> bool {
        let mut row: Vec<BigInt> = row.into_iter().collect();
        assert_eq!(row.len(), self.width, "row width mismatch");
        for (pivot, basis) in &self.rows {
            if row[*pivot].is_zero() {
                continue;
            }
            let a = basis[*pivot].clone();
            let b = row[*pivot].clone();
            for (x, y) in row.iter_mut().zip(basis) {
                *x = &a * &*x - &b * y;
            }
            normalize(&mut row);
        }
        match row.iter().position(|x| !x.is_zero()) {
            Some(pivot) => {
                normalize(&mut row);
                self.rows.push((pivot, row));
                true
            }
            None => false,
        }
    }
}

/// Exact rank of an integer matrix given as rows.
pub fn rank<R, I>(rows: R, width: usize) -> usize
where
    R: IntoIterator<Item = I>,
    I: IntoIterator<Item = BigInt>,
{
    let mut basis = EchelonBasis::new(width);
    for row in rows {
        basis.push(row);
        if basis.is_full() {
            break;
        }
    }
    basis.rank()
}

/// Solves the square integer system `a x = b` exactly with fraction-free
/// (Bareiss) elimination. Returns `None` when `a` is singular.
pub fn solve_square(a: &[Vec<BigInt>], b: &[BigInt]) -> Option<Vec<Rational>> {
    let n = a.len();
    assert_eq!(b.len(), n, "right-hand side length");
    let mut m: Vec<Vec<BigInt>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            assert_eq!(row.len(), n, "matrix is not square");
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    let mut prev = BigInt::one();
    for k in 0..n {
        let p = (k..n).find(|&i| !m[i][k].is_zero())?;
        m.swap(k, p);
        for i in k + 1..n {
            for j in k + 1..=n {
                let v = (&m[k][k] * &m[i][j] - &m[i][k] * &m[k][j]) / &prev;
                m[i][j] = v;
            }
            m[i][k] = BigInt::zero();
        }
        prev = m[k][k].clone();
    }
    let mut x = vec![Rational::zero(); n];
    for i in (0..n).rev() {
        let mut acc = Rational::from_integer(m[i][n].clone());
        for j in i + 1..n {
            acc -= Rational::from_integer(m[i][j].clone()) * &x[j];
        }
        x[i] = acc / Rational::from_integer(m[i][i].clone());
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(rows: &[&[i64]]) -> Vec<Vec<BigInt>> {
        rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
    }

    #[test]
    fn rank_of_small_matrices() {
        assert_eq!(rank(ints(&[&[1, 2], &[2, 4]]), 2), 1);
        assert_eq!(rank(ints(&[&[1, 2], &[3, 4]]), 2), 2);
        assert_eq!(rank(ints(&[&[0, 0, 0]]), 3), 0);
        assert_eq!(rank(ints(&[&[1, 1, 0], &[0, 1, 1], &[1, 0, -1]]), 3), 2);
    }

    #[test]
    fn echelon_reports_dependence() {
        let mut b = EchelonBasis::new(3);
        assert!(b.push(ints(&[&[2, 4, 6]]).remove(0)));
        assert!(!b.push(ints(&[&[1, 2, 3]]).remove(0)));
        assert!(b.push(ints(&[&[0, 1, 0]]).remove(0)));
        assert_eq!(b.rank(), 2);
    }

    #[test]
    fn solve_small_system() {
        let a = ints(&[&[2, 1], &[1, 3]]);
        let b: Vec<BigInt> = vec![BigInt::from(1), BigInt::from(1)];
        let x = solve_square(&a, &b).unwrap();
        assert_eq!(x, vec![Rational::new(2.into(), 5.into()), Rational::new(1.into(), 5.into())]);
        assert!(solve_square(&ints(&[&[1, 2], &[2, 4]]), &b).is_none());
    }

    #[test]
    fn solve_needs_row_swap() {
        let a = ints(&[&[0, 1], &[1, 0]]);
        let b: Vec<BigInt> = vec![BigInt::from(3), BigInt::from(-2)];
        let x = solve_square(&a, &b).unwrap();
        assert_eq!(x, vec![Rational::from_integer((-2).into()), Rational::from_integer(3.into())]);
    }
}
