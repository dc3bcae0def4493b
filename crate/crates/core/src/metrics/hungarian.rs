//! Minimum-cost assignment on a square cost matrix (Hungarian algorithm
//! with potentials, O(n^3)).

use ndarray::Array2;

/// Returns, for each row, the column it is assigned to in a minimum-cost
/// perfect matching of the square matrix `cost`.
pub(crate) fn min_cost_assignment(cost: &Array2<i64>) -> Vec<usize> {
    let n = cost.nrows();
    assert_eq!(n, cost.ncols(), "cost matrix must be square");
    if n == 0 {
        return Vec::new();
    }
    let inf = i64::MAX / 4;
    // 1-indexed potentials and matching; p[j] is the row matched to column j.
    let mut u = vec![0i64; n + 1];
    let mut v = vec![0i64; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![inf; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = inf;
            let mut j1 = 0usize;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost[[i0 - 1, j - 1]] - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        // Walk the augmenting path back to the virtual column 0.
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut assignment = vec![0usize; n];
    for j in 1..=n {
        if p[j] != 0 {
            assignment[p[j] - 1] = j - 1;
        }
    }
    assignment
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn total_cost(cost: &Array2<i64>, assignment: &[usize]) -> i64 {
        assignment
            .iter()
            .enumerate()
            .map(|(i, &j)| cost[[i, j]])
            .sum()
    }

    /// Brute-force minimum over all permutations.
    fn brute_force_min(cost: &Array2<i64>) -> i64 {
        let n = cost.nrows();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut best = i64::MAX;
        permute(&mut perm, 0, &mut |p| {
            best = best.min(total_cost(cost, p));
        });
        best
    }

    fn permute(items: &mut Vec<usize>, start: usize, visit: &mut impl FnMut(&[usize])) {
        if start == items.len() {
            visit(items);
            return;
        }
        for i in start..items.len() {
            items.swap(start, i);
            permute(items, start + 1, visit);
            items.swap(start, i);
        }
    }

    #[test]
    fn solves_a_known_instance() {
        let cost = array![[4i64, 1, 3], [2, 0, 5], [3, 2, 2]];
        let assignment = min_cost_assignment(&cost);
        assert_eq!(total_cost(&cost, &assignment), 5); // 1 + 2 + 2
    }

    #[test]
    fn assignment_is_a_permutation() {
        let cost = array![[7i64, 3], [3, 7]];
        let mut assignment = min_cost_assignment(&cost);
        assignment.sort_unstable();
        assert_eq!(assignment, vec![0, 1]);
    }

    #[test]
    fn matches_brute_force_on_random_matrices() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        for _ in 0..50 {
            let n = rng.random_range(1..=6);
            let cost = Array2::from_shape_fn((n, n), |_| rng.random_range(-20i64..=20));
            let assignment = min_cost_assignment(&cost);
            assert_eq!(total_cost(&cost, &assignment), brute_force_min(&cost));
        }
    }
}
