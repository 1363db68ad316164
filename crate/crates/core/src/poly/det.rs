//! Determinants of small matrices with polynomial entries.

use std::collections::HashMap;

use super::sparse::SparsePoly;

/// Determinant by Laplace expansion along rows, memoizing the minors of the
/// trailing rows by column subset.  Each minor is computed exactly once, so
/// an `n x n` determinant costs `O(n 2^n)` polynomial products.
pub fn det(m: &[Vec<SparsePoly>]) -> SparsePoly {
    let n = m.len();
    assert!(m.iter().all(|row| row.len() == n), "matrix must be square");
    assert!(n <= 16, "memoized expansion supports at most 16 columns");
    if n == 0 {
        return SparsePoly::one();
    }
    // Minors of rows r..n indexed by the column subset they use.
    let mut level: HashMap<u32, SparsePoly> = HashMap::new();
    level.insert(0, SparsePoly::one());
    for r in (0..n).rev() {
        let size = n - r;
        let mut next = HashMap::new();
        for cols in subsets_of_size(n, size) {
            let mut parts = Vec::new();
            for (pos, j) in bits(cols).enumerate() {
                let entry = &m[r][j];
                let rest = cols & !(1 << j);
                let Some(minor) = level.get(&rest) else { continue };
                if entry.is_zero() || minor.is_zero() {
                    continue;
                }
                let t = entry.mul(minor);
                parts.push(if pos % 2 == 0 { t } else { t.neg() });
            }
            next.insert(cols, SparsePoly::sum(parts.iter()));
        }
        level = next;
    }
    level.remove(&((1u32 << n) - 1)).unwrap()
}

/// Fraction-free Gaussian elimination (Bareiss); every division is exact.
pub fn det_bareiss(m: &[Vec<SparsePoly>]) -> SparsePoly {
    let n = m.len();
    assert!(m.iter().all(|row| row.len() == n), "matrix must be square");
    if n == 0 {
        return SparsePoly::one();
    }
    let mut a: Vec<Vec<SparsePoly>> = m.to_vec();
    let mut negate = false;
    let mut prev = SparsePoly::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(i, k);
                    negate = !negate;
                }
                None => return SparsePoly::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t = a[i][j].mul(&a[k][k]).sub(&a[i][k].mul(&a[k][j]));
                a[i][j] = t.div_exact(&prev).expect("Bareiss division must be exact");
            }
        }
        prev = a[k][k].clone();
    }
    let d = a[n - 1][n - 1].clone();
    if negate {
        d.neg()
    } else {
        d
    }
}

fn bits(x: u32) -> impl Iterator<Item = usize> {
    (0..32).filter(move |i| x & (1 << i) != 0)
}

fn subsets_of_size(n: usize, k: usize) -> impl Iterator<Item = u32> {
    (0u32..(1 << n)).filter(move |s| s.count_ones() as usize == k)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> SparsePoly {
        SparsePoly::parse_lenient(s).unwrap()
    }

    #[test]
    fn identity_and_two_by_two() {
        let id: Vec<Vec<SparsePoly>> = (0..4)
            .map(|i| (0..4).map(|j| SparsePoly::from_int((i == j) as i64)).collect())
            .collect();
        assert_eq!(det(&id), SparsePoly::one());
        assert_eq!(det_bareiss(&id), SparsePoly::one());
        let m = vec![vec![p("+1 r13"), p("+1")], vec![p("+1"), p("+1 r13")]];
        assert_eq!(det(&m), p("+1 r13^2 -1"));
        assert_eq!(det_bareiss(&m), p("+1 r13^2 -1"));
    }

    #[test]
    fn zero_row() {
        let m = vec![
            vec![p("+1 r13"), p("+2"), p("+1 h")],
            vec![SparsePoly::zero(), SparsePoly::zero(), SparsePoly::zero()],
            vec![p("+1"), p("+1 r23"), p("+3")],
        ];
        assert!(det(&m).is_zero());
        assert!(det_bareiss(&m).is_zero());
    }

    #[test]
    fn pivoting() {
        let m = vec![
            vec![SparsePoly::zero(), p("+1 r13"), p("+1")],
            vec![p("+1 r23"), p("+1"), SparsePoly::zero()],
            vec![p("+1"), SparsePoly::zero(), p("+1 h")],
        ];
        assert_eq!(det(&m), det_bareiss(&m));
    }
}
