//! Matrix permanents: Ryser's inclusion–exclusion formula and the naïve
//! permutation expansion it is checked against.

use crate::error::{Error, Result};

/// Largest matrix accepted by [`permanent`]; Ryser costs `O(2^n · n)`.
pub const MAX_PERMANENT_N: usize = 12;

/// Largest matrix accepted by [`permanent_naive`] (`n!` terms).
pub const MAX_NAIVE_N: usize = 8;

fn flatten(m: &[Vec<f64>], max: usize, what: &'static str) -> Result<(Vec<f64>, usize)> {
    let n = m.len();
    if n == 0 {
        return Err(Error::invalid("matrix must have at least one row"));
    }
    if n > max {
        return Err(Error::UnsupportedSize { what, n, max });
    }
    if let Some(row) = m.iter().find(|row| row.len() != n) {
        return Err(Error::invalid(format!("matrix is not square: {n} rows but a row of length {}", row.len())));
    }
    Ok((m.concat(), n))
}

/// Permanent of a square matrix given as rows.
pub fn permanent(m: &[Vec<f64>]) -> Result<f64> {
    let (data, n) = flatten(m, MAX_PERMANENT_N, "permanent")?;
    Ok(ryser(&data, n))
}

/// Permanent by explicit summation over all `n!` permutations.
pub fn permanent_naive(m: &[Vec<f64>]) -> Result<f64> {
    let (data, n) = flatten(m, MAX_NAIVE_N, "naive permanent")?;
    let mut total = 0.0;
    for_each_permutation(n, |perm| {
        total += perm.iter().enumerate().map(|(r, &c)| data[r * n + c]).product::<f64>();
    });
    Ok(total)
}

/// Ryser's formula over a row-major `n × n` slice, subsets visited in Gray-code
/// order so each step updates the row sums by a single column.
///
/// `perm(A) = (-1)^n Σ_{S ⊆ cols} (-1)^|S| Π_r Σ_{c ∈ S} a_rc`
pub(crate) fn ryser(a: &[f64], n: usize) -> f64 {
    debug_assert_eq!(a.len(), n * n);
    debug_assert!(n <= MAX_PERMANENT_N);
    let mut row_sums = [0.0f64; MAX_PERMANENT_N];
    let row_sums = &mut row_sums[..n];
    let mut total = 0.0;
    let mut gray = 0usize;
    for step in 1..(1usize << n) {
        let next = step ^ (step >> 1);
        let col = (next ^ gray).trailing_zeros() as usize;
        let sign = if next & (1 << col) != 0 { 1.0 } else { -1.0 };
        for (r, sum) in row_sums.iter_mut().enumerate() {
            *sum += sign * a[r * n + col];
        }
        gray = next;
        let prod: f64 = row_sums.iter().product();
        if next.count_ones() % 2 == 1 {
            total -= prod;
        } else {
            total += prod;
        }
    }
    if n % 2 == 1 {
        -total
    } else {
        total
    }
}

/// Calls `f` with every permutation of `0..n` (Heap's algorithm).
pub(crate) fn for_each_permutation(n: usize, mut f: impl FnMut(&[usize])) {
    let mut perm: Vec<usize> = (0..n).collect();
    let mut c = vec![0usize; n];
    f(&perm);
    let mut i = 1;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            f(&perm);
            c[i] += 1;
            i = 1;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn small_cases() {
        assert_eq!(permanent(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap(), 1.0);
        assert_eq!(permanent(&vec![vec![1.0; 3]; 3]).unwrap(), 6.0);
        assert_eq!(permanent(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap(), 10.0);
        assert_eq!(permanent_naive(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap(), 10.0);
        assert_eq!(permanent(&[vec![-2.5]]).unwrap(), -2.5);
    }

    #[test]
    fn all_ones_gives_factorial() {
        for n in 1..=8usize {
            let fact = (1..=n).product::<usize>() as f64;
            assert!((permanent(&vec![vec![1.0; n]; n]).unwrap() - fact).abs() < 1e-9 * fact);
        }
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(permanent(&[]).is_err());
        assert!(permanent(&[vec![1.0, 2.0], vec![3.0]]).is_err());
        assert!(matches!(
            permanent(&vec![vec![1.0; 13]; 13]),
            Err(Error::UnsupportedSize { n: 13, max: 12, .. })
        ));
        assert!(permanent_naive(&vec![vec![1.0; 9]; 9]).is_err());
    }

    #[test]
    fn heap_enumerates_every_permutation_once() {
        let mut seen = std::collections::HashSet::new();
        for_each_permutation(5, |p| {
            assert!(seen.insert(p.to_vec()));
        });
        assert_eq!(seen.len(), 120);
    }

    fn matrix(max_n: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
        (1..=max_n).prop_flat_map(|n| prop::collection::vec(prop::collection::vec(0.0f64..3.0, n), n))
    }

    proptest! {
        #[test]
        fn ryser_matches_expansion(m in matrix(6)) {
            let fast = permanent(&m).unwrap();
            let slow = permanent_naive(&m).unwrap();
            prop_assert!((fast - slow).abs() <= 1e-12 * slow.abs().max(1e-300), "{fast} vs {slow}");
        }

        #[test]
        fn invariant_under_row_and_column_permutations(m in matrix(6), r in 0usize..720, c in 0usize..720) {
            let n = m.len();
            let nth = |k: usize| {
                let mut out = Vec::new();
                let mut i = 0;
                for_each_permutation(n, |p| {
                    if i == k % (1..=n).product::<usize>() { out = p.to_vec(); }
                    i += 1;
                });
                out
            };
            let (rp, cp) = (nth(r), nth(c));
            let shuffled: Vec<Vec<f64>> = rp.iter().map(|&i| cp.iter().map(|&j| m[i][j]).collect()).collect();
            let a = permanent(&m).unwrap();
            let b = permanent(&shuffled).unwrap();
            prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1e-300));
        }
    }
}
