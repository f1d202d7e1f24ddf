//! Longest common subsequence over arbitrary items with a custom equality.

/// Length of the LCS of `a` and `b`.
pub fn lcs_len<A, B>(a: &[A], b: &[B], eq: impl Fn(&A, &B) -> bool) -> usize {
    if a.is_empty() || b.is_empty() {
        return 0;
    }
    let mut prev = vec![0usize; b.len() + 1];
    let mut cur = vec![0usize; b.len() + 1];
    for x in a {
        for (j, y) in b.iter().enumerate() {
            cur[j + 1] = if eq(x, y) {
                prev[j] + 1
            } else {
                cur[j].max(prev[j + 1])
            };
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// Index pairs of one LCS. Among equal-length solutions the backtrace
/// prefers matching earlier positions of `a` to earlier positions of `b`.
pub fn lcs_pairs<A, B>(a: &[A], b: &[B], eq: impl Fn(&A, &B) -> bool) -> Vec<(usize, usize)> {
    let (n, m) = (a.len(), b.len());
    // suffix table so the forward walk can be greedy
    let mut t = vec![vec![0usize; m + 1]; n + 1];
    for i in (0..n).rev() {
        for j in (0..m).rev() {
            t[i][j] = if eq(&a[i], &b[j]) {
                t[i + 1][j + 1] + 1
            } else {
                t[i + 1][j].max(t[i][j + 1])
            };
        }
    }
    let mut pairs = Vec::with_capacity(t[0][0]);
    let (mut i, mut j) = (0, 0);
    while i < n && j < m {
        if eq(&a[i], &b[j]) && t[i][j] == t[i + 1][j + 1] + 1 {
            pairs.push((i, j));
            i += 1;
            j += 1;
        } else if t[i + 1][j] >= t[i][j + 1] {
            i += 1;
        } else {
            j += 1;
        }
    }
    pairs
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn small_cases() {
        let a: Vec<char> = "ABCBDAB".chars().collect();
        let b: Vec<char> = "BDCABA".chars().collect();
        assert_eq!(lcs_len(&a, &b, |x, y| x == y), 4);
        assert_eq!(lcs_pairs(&a, &b, |x, y| x == y).len(), 4);
        assert_eq!(lcs_len::<u8, u8>(&[], &[1], |x, y| x == y), 0);
    }

    proptest! {
        #[test]
        fn pairs_are_a_valid_common_subsequence(a in prop::collection::vec(0u8..4, 0..12), b in prop::collection::vec(0u8..4, 0..12)) {
            let pairs = lcs_pairs(&a, &b, |x, y| x == y);
            prop_assert_eq!(pairs.len(), lcs_len(&a, &b, |x, y| x == y));
            for w in pairs.windows(2) {
                prop_assert!(w[0].0 < w[1].0 && w[0].1 < w[1].1);
            }
            for &(i, j) in &pairs {
                prop_assert_eq!(a[i], b[j]);
            }
            prop_assert_eq!(lcs_len(&a, &b, |x, y| x == y), lcs_len(&b, &a, |x, y| x == y));
        }
    }
}
