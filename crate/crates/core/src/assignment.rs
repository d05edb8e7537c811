//! Square min-cost assignment by shortest augmenting paths with potentials
//! (the O(n³) Hungarian method).

use crate::scalar::Scalar;

/// Solves `min Σ cost[i][perm[i]]` over permutations of `0..n`.
///
/// Returns `(perm, total)` where `perm[row] = column`.
pub fn solve<T: Scalar>(cost: &[Vec<T>]) -> (Vec<usize>, T) {
    let n = cost.len();
    if n == 0 {
        return (Vec::new(), T::zero());
    }
    debug_assert!(cost.iter().all(|r| r.len() == n));
    // 1-based arrays; index 0 is the virtual source column
    let mut u = vec![T::zero(); n + 1];
    let mut v = vec![T::zero(); n + 1];
    let mut matched_row = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        matched_row[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![T::infinity(); n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = matched_row[j0];
            let mut delta = T::infinity();
            let mut j1 = 0usize;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[matched_row[j]] = u[matched_row[j]] + delta;
                    v[j] = v[j] - delta;
                } else {
                    minv[j] = minv[j] - delta;
                }
            }
            j0 = j1;
            if matched_row[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            matched_row[j0] = matched_row[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut perm = vec![0usize; n];
    for j in 1..=n {
        perm[matched_row[j] - 1] = j - 1;
    }
    let total = perm.iter().enumerate().map(|(i, &j)| cost[i][j]).sum();
    (perm, total)
}

#[cfg(test)]
mod tests {
    use super::solve;

    fn brute(cost: &[Vec<f64>]) -> f64 {
        fn go(cost: &[Vec<f64>], row: usize, used: &mut Vec<bool>) -> f64 {
            if row == cost.len() {
                return 0.0;
            }
            let mut best = f64::INFINITY;
            for j in 0..cost.len() {
                if !used[j] {
                    used[j] = true;
                    best = best.min(cost[row][j] + go(cost, row + 1, used));
                    used[j] = false;
                }
            }
            best
        }
        go(cost, 0, &mut vec![false; cost.len()])
    }

    #[test]
    fn small_matrices() {
        let (perm, total) = solve(&[vec![4.0, 1.0, 3.0], vec![2.0, 0.0, 5.0], vec![3.0, 2.0, 2.0]]);
        assert_eq!(total, 5.0);
        assert_eq!(perm, vec![1, 0, 2]);
        assert_eq!(solve::<f64>(&[]).1, 0.0);
        assert_eq!(solve(&[vec![7.5f32]]), (vec![0], 7.5));
    }

    #[test]
    fn agrees_with_enumeration() {
        let mut state = 12345u64;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 33) % 1000) as f64 / 100.0
        };
        for n in 1..=6 {
            for _ in 0..20 {
                let cost: Vec<Vec<f64>> = (0..n).map(|_| (0..n).map(|_| next()).collect()).collect();
                let (perm, total) = solve(&cost);
                let mut cols = perm.clone();
                cols.sort_unstable();
                assert_eq!(cols, (0..n).collect::<Vec<_>>());
                assert!((total - brute(&cost)).abs() < 1e-9);
            }
        }
    }
}
