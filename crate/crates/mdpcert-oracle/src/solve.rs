//! Fraction-free Gaussian elimination (Bareiss) with pivoting on the nonzero
//! structure. Deliberately independent of the solver crate's exact-LU code:
//! the oracle must not share a linear-solve path with the engines it is used
//! to validate.

use mdpcert_core::numeric::Rat;
use num::bigint::BigInt;
use num::traits::{One, Zero};

/// Solves `A x = b` exactly. Returns `None` if the matrix is singular.
pub fn solve_dense(a: Vec<Vec<Rat>>, b: Vec<Rat>) -> Option<Vec<Rat>> {
    let n = b.len();
    if n == 0 {
        return Some(Vec::new());
    }
    // Clear denominators row by row; the system becomes integral.
    let mut m: Vec<Vec<BigInt>> = Vec::with_capacity(n);
    for (row, rhs) in a.iter().zip(&b) {
        let mut lcm = BigInt::one();
        for entry in row.iter().chain(std::iter::once(rhs)) {
            lcm = num::integer::lcm(lcm, entry.denom().clone());
        }
        let mut int_row: Vec<BigInt> = row
            .iter()
            .map(|e| e.numer() * (&lcm / e.denom()))
            .collect();
        int_row.push(rhs.numer() * (&lcm / rhs.denom()));
        m.push(int_row);
    }

    // Bareiss: divisions by the previous pivot stay exact.
    let mut prev = BigInt::one();
    for k in 0..n {
        let pivot = (k..n).find(|&r| !m[r][k].is_zero())?;
        m.swap(k, pivot);
        for i in k + 1..n {
            for j in k + 1..=n {
                let num = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = num / &prev;
            }
            m[i][k] = BigInt::zero();
        }
        prev = m[k][k].clone();
    }

    let mut x = vec![Rat::zero(); n];
    for row in (0..n).rev() {
        let mut acc = Rat::from(m[row][n].clone());
        for col in row + 1..n {
            acc -= Rat::from(m[row][col].clone()) * &x[col];
        }
        x[row] = acc / Rat::from(m[row][row].clone());
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use mdpcert_core::numeric::rat;

    #[test]
    fn solves_small_system() {
        // x = 1/3 + 1/3 x  =>  x = 1/2
        let a = vec![vec![rat(2, 3)]];
        let b = vec![rat(1, 3)];
        assert_eq!(solve_dense(a, b).unwrap(), vec![rat(1, 2)]);
    }

    #[test]
    fn solves_three_by_three() {
        let a = vec![
            vec![rat(1, 1), rat(-1, 2), rat(0, 1)],
            vec![rat(0, 1), rat(3, 4), rat(-1, 4)],
            vec![rat(-1, 3), rat(0, 1), rat(1, 1)],
        ];
        let b = vec![rat(1, 2), rat(1, 1), rat(0, 1)];
        let x = solve_dense(a.clone(), b.clone()).unwrap();
        for i in 0..3 {
            let mut acc = rat(0, 1);
            for j in 0..3 {
                acc += &a[i][j] * &x[j];
            }
            assert_eq!(acc, b[i]);
        }
    }

    #[test]
    fn detects_singular() {
        let a = vec![vec![rat(0, 1), rat(0, 1)], vec![rat(1, 1), rat(1, 1)]];
        let b = vec![rat(1, 1), rat(1, 1)];
        assert!(solve_dense(a, b).is_none());
    }
}
