//! Exact matrix permanents.
//!
//! `perm_naive` expands the defining sum over all `n!` permutations and is the
//! oracle for small sizes. `perm_ryser` is the inclusion-exclusion formula
//! with Gray-code ordered subsets, `O(2^n · n)`. Summation is plain `f64`
//! complex arithmetic; for `n` beyond about 10 a compensated (Kahan) sum over
//! the subset terms is the natural upgrade.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;

pub const NAIVE_MAX_N: usize = 8;
pub const RYSER_MAX_N: usize = 30;

fn check_square(m: &ComplexMatrix) -> Result<usize> {
    if !m.is_square() {
        return Err(Error::NotSquare { rows: m.n_rows(), cols: m.n_cols() });
    }
    Ok(m.n_rows())
}

/// Sum over all permutations of products `Π_i m[i, σ(i)]`.
pub fn perm_naive(m: &ComplexMatrix) -> Result<C64> {
    let n = check_square(m)?;
    if n > NAIVE_MAX_N {
        return Err(Error::TooLarge { n, limit: NAIVE_MAX_N, method: "perm_naive" });
    }
    fn expand(m: &ComplexMatrix, row: usize, used: u32, acc: C64) -> C64 {
        let n = m.n_rows();
        if row == n {
            return acc;
        }
        let mut total = C64::new(0.0, 0.0);
        for col in 0..n {
            if used & (1 << col) == 0 {
                total += expand(m, row + 1, used | (1 << col), acc * m[(row, col)]);
            }
        }
        total
    }
    Ok(expand(m, 0, 0, C64::new(1.0, 0.0)))
}

/// Ryser's formula with Gray-code subset enumeration.
pub fn perm_ryser(m: &ComplexMatrix) -> Result<C64> {
    let n = check_square(m)?;
    if n > RYSER_MAX_N {
        return Err(Error::TooLarge { n, limit: RYSER_MAX_N, method: "perm_ryser" });
    }
    Ok(ryser_slice(m.entries(), n))
}

/// Permanent of a row-major `n × n` block. Sizes up to 3 use the explicit
/// expansion; larger ones go through Ryser. Allocation-free, for hot loops.
pub fn permanent_slice(a: &[C64], n: usize) -> C64 {
    debug_assert_eq!(a.len(), n * n);
    match n {
        0 => C64::new(1.0, 0.0),
        1 => a[0],
        2 => a[0] * a[3] + a[1] * a[2],
        3 => {
            a[0] * (a[4] * a[8] + a[5] * a[7])
                + a[1] * (a[3] * a[8] + a[5] * a[6])
                + a[2] * (a[3] * a[7] + a[4] * a[6])
        }
        _ => ryser_slice(a, n),
    }
}

fn ryser_slice(a: &[C64], n: usize) -> C64 {
    debug_assert!(n <= RYSER_MAX_N);
    let zero = C64::new(0.0, 0.0);
    let mut row_sums = [zero; RYSER_MAX_N];
    let mut in_subset = 0u32;
    let mut total = zero;
    for k in 1u64..(1u64 << n) {
        // Gray code: the bit that flips between g(k-1) and g(k).
        let j = k.trailing_zeros() as usize;
        let adding = in_subset & (1 << j) == 0;
        in_subset ^= 1 << j;
        for (i, s) in row_sums.iter_mut().take(n).enumerate() {
            if adding {
                *s += a[i * n + j];
            } else {
                *s -= a[i * n + j];
            }
        }
        let prod = row_sums.iter().take(n).fold(C64::new(1.0, 0.0), |p, s| p * s);
        if in_subset.count_ones().is_multiple_of(2) {
            total += prod;
        } else {
            total -= prod;
        }
    }
    if n % 2 == 1 {
        -total
    } else {
        total
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::u_zero;
    use proptest::prelude::*;

    fn ones(n: usize) -> ComplexMatrix {
        ComplexMatrix::from_fn(n, n, |_, _| C64::new(1.0, 0.0))
    }

    fn arb_matrix(max_n: usize) -> impl Strategy<Value = ComplexMatrix> {
        (1..=max_n).prop_flat_map(|n| {
            prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n * n).prop_map(move |v| {
                ComplexMatrix::from_rows(n, n, v.into_iter().map(|(re, im)| C64::new(re, im)).collect())
                    .unwrap()
            })
        })
    }

    #[test]
    fn identity_and_ones() {
        assert!((perm_naive(&ComplexMatrix::identity(3)).unwrap() - 1.0).norm() < 1e-15);
        assert!((perm_naive(&ones(3)).unwrap() - 6.0).norm() < 1e-12);
        assert!((perm_ryser(&ComplexMatrix::identity(4)).unwrap() - 1.0).norm() < 1e-15);
        assert!((perm_ryser(&ones(6)).unwrap() - 720.0).norm() < 1e-9);
    }

    #[test]
    fn u_zero_permanent_vanishes() {
        let u = u_zero();
        assert!(perm_naive(&u).unwrap().norm() < 1e-10);
        assert!(perm_ryser(&u).unwrap().norm() < 1e-10);
    }

    #[test]
    fn guards() {
        let rect = ComplexMatrix::zeros(2, 3);
        assert!(matches!(perm_naive(&rect), Err(Error::NotSquare { .. })));
        assert!(matches!(perm_ryser(&rect), Err(Error::NotSquare { .. })));
        assert!(matches!(perm_naive(&ones(9)), Err(Error::TooLarge { .. })));
        assert!(matches!(perm_ryser(&ones(31)), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn slice_matches_ryser_for_small_sizes() {
        let m = ComplexMatrix::from_fn(3, 3, |i, j| C64::new(i as f64 + 0.5, j as f64 - 0.25 * i as f64));
        let a = permanent_slice(m.entries(), 3);
        let b = perm_naive(&m).unwrap();
        assert!((a - b).norm() < 1e-12);
    }

    proptest! {
        #[test]
        fn ryser_matches_naive(m in arb_matrix(7)) {
            let a = perm_ryser(&m).unwrap();
            let b = perm_naive(&m).unwrap();
            prop_assert!((a - b).norm() <= 1e-10 * (1.0 + b.norm()));
        }

        #[test]
        fn row_phase_covariance(m in arb_matrix(5), alpha in 0.0f64..std::f64::consts::TAU, row in 0usize..5) {
            let n = m.n_rows();
            let row = row % n;
            let mut scaled = m.clone();
            for j in 0..n {
                scaled[(row, j)] *= C64::from_polar(1.0, alpha);
            }
            let p = perm_ryser(&m).unwrap();
            let q = perm_ryser(&scaled).unwrap();
            prop_assert!((q - p * C64::from_polar(1.0, alpha)).norm() <= 1e-12 * (1.0 + p.norm()));
        }

        #[test]
        fn diagonal_phases_preserve_modulus(m in arb_matrix(5), seed in prop::collection::vec(0.0f64..std::f64::consts::TAU, 10)) {
            let n = m.n_rows();
            let left = ComplexMatrix::phase_diagonal(&seed[..n]);
            let right = ComplexMatrix::phase_diagonal(&seed[5..5 + n]);
            let g = &(&left * &m) * &right;
            let p = perm_ryser(&m).unwrap().norm();
            let q = perm_ryser(&g).unwrap().norm();
            prop_assert!((p - q).abs() <= 1e-12 * (1.0 + p));
        }

        #[test]
        fn row_permutation_invariance(m in arb_matrix(6), a in 0usize..6, b in 0usize..6) {
            let n = m.n_rows();
            let mut w = m.clone();
            w.swap_rows(a % n, b % n);
            let p = perm_ryser(&m).unwrap();
            prop_assert!((perm_ryser(&w).unwrap() - p).norm() <= 1e-12 * (1.0 + p.norm()));
            let t = m.transpose();
            prop_assert!((perm_ryser(&t).unwrap() - p).norm() <= 1e-12 * (1.0 + p.norm()));
        }

        #[test]
        fn row_scaling_is_linear(m in arb_matrix(5), re in -2.0f64..2.0, im in -2.0f64..2.0) {
            let c = C64::new(re, im);
            let mut w = m.clone();
            for j in 0..m.n_cols() {
                w[(0, j)] *= c;
            }
            let p = perm_ryser(&m).unwrap();
            prop_assert!((perm_ryser(&w).unwrap() - c * p).norm() <= 1e-12 * (1.0 + p.norm() * c.norm()));
        }
    }
}
