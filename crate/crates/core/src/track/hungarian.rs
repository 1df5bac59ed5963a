//! Minimum-cost linear assignment (Kuhn–Munkres via successive shortest
//! augmenting paths, O(n³)) on rectangular cost matrices with a forbidden
//! sentinel, plus deterministic lexicographic tie-breaking among optima.

/// Sentinel marking a pair that must never be assigned.
pub const FORBIDDEN: f64 = f64::INFINITY;

/// Dense rectangular cost matrix.
#[derive(Debug, Clone)]
pub struct CostMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl CostMatrix {
    /// All-zero matrix. Zero-sized dimensions are allowed and produce an
    /// empty or all-unassigned solution.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CostMatrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(
            rows.iter().all(|r| r.len() == cols),
            "ragged cost matrix rows"
        );
        CostMatrix {
            rows: rows.len(),
            cols,
            data: rows.iter().flatten().copied().collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        assert!(r < self.rows && c < self.cols, "cost index out of range");
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        assert!(r < self.rows && c < self.cols, "cost index out of range");
        self.data[r * self.cols + c] = v;
    }
}

/// Minimum-total-cost one-to-one assignment of rows to columns.
///
/// The smaller side is matched completely except where only [`FORBIDDEN`]
/// pairs remain; unmatched rows yield `None`. NaN entries are treated as
/// forbidden. Among equal-total-cost optima the result is the
/// lexicographically smallest sequence `(assignment of row 0, of row 1, …)`,
/// with `None` ordered after any column index.
pub fn hungarian(costs: &CostMatrix) -> Vec<Option<usize>> {
    if costs.rows == 0 {
        return Vec::new();
    }
    if costs.cols == 0 {
        return vec![None; costs.rows];
    }

    let n = costs.rows.max(costs.cols);
    // Forbidden entries become a finite BIG cost exceeding any real total, so
    // the solver uses them only when a row has no permitted column left;
    // those rows are reported unassigned afterwards.
    let max_abs = (0..costs.rows)
        .flat_map(|r| (0..costs.cols).map(move |c| (r, c)))
        .map(|(r, c)| costs.get(r, c))
        .filter(|v| v.is_finite())
        .fold(0.0f64, |m, v| m.max(v.abs()));
    let big = (max_abs + 1.0) * (n as f64 + 1.0);

    let square = |r: usize, c: usize| -> f64 {
        if r < costs.rows && c < costs.cols {
            let v = costs.get(r, c);
            if v.is_finite() {
                v
            } else {
                big
            }
        } else {
            0.0 // padding rows/cols absorb the imbalance at no cost
        }
    };

    let base = solve_square(n, &square);
    let base_total: f64 = (0..n).map(|r| square(r, base[r])).sum();

    // Lexicographic refinement: fix rows in order, trying smaller column
    // indices first; a candidate stands when some completion of the remaining
    // rows still reaches the optimal total.
    let tol = 1e-9 * (1.0 + base_total.abs());
    let mut fixed: Vec<usize> = Vec::with_capacity(n);
    let mut current = base;
    for row in 0..costs.rows.min(n) {
        let current_col = current[row];
        let mut chosen = current_col;
        for cand in 0..n {
            if cand >= current_col {
                break; // current solution already achieves this or better
            }
            if fixed.contains(&cand) {
                continue;
            }
            // Total of: fixed prefix + row→cand + best completion.
            let prefix: f64 = fixed
                .iter()
                .enumerate()
                .map(|(r, &c)| square(r, c))
                .sum::<f64>()
                + square(row, cand);
            let mut used: Vec<bool> = vec![false; n];
            for &c in fixed.iter().chain(std::iter::once(&cand)) {
                used[c] = true;
            }
            let remaining_rows: Vec<usize> = (row + 1..n).collect();
            let remaining_cols: Vec<usize> = (0..n).filter(|c| !used[*c]).collect();
            let m = remaining_rows.len();
            let completion = if m == 0 {
                0.0
            } else {
                let sub = |r: usize, c: usize| square(remaining_rows[r], remaining_cols[c]);
                let sol = solve_square(m, &sub);
                (0..m).map(|r| sub(r, sol[r])).sum()
            };
            if prefix + completion <= base_total + tol {
                chosen = cand;
                break;
            }
        }
        if chosen != current_col {
            // Re-solve the suffix under the new prefix to keep optimality.
            let mut used: Vec<bool> = vec![false; n];
            for &c in fixed.iter().chain(std::iter::once(&chosen)) {
                used[c] = true;
            }
            let remaining_rows: Vec<usize> = (row + 1..n).collect();
            let remaining_cols: Vec<usize> = (0..n).filter(|c| !used[*c]).collect();
            let m = remaining_rows.len();
            if m > 0 {
                let sub = |r: usize, c: usize| square(remaining_rows[r], remaining_cols[c]);
                let sol = solve_square(m, &sub);
                for (r, &row_idx) in remaining_rows.iter().enumerate() {
                    current[row_idx] = remaining_cols[sol[r]];
                }
            }
            current[row] = chosen;
        }
        fixed.push(current[row]);
    }

    (0..costs.rows)
        .map(|r| {
            let c = current[r];
            if c < costs.cols && costs.get(r, c).is_finite() {
                Some(c)
            } else {
                None
            }
        })
        .collect()
}

/// Exact square assignment solver (shortest augmenting paths with potentials).
/// Returns, per row, the assigned column. Deterministic.
fn solve_square(n: usize, cost: &dyn Fn(usize, usize) -> f64) -> Vec<usize> {
    // 1-based internal arrays; p[j] = row matched to column j.
    let mut u = vec![0.0f64; n + 1];
    let mut v = vec![0.0f64; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];

    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0usize;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
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
        if p[j] > 0 {
            assignment[p[j] - 1] = j - 1;
        }
    }
    assignment
}

#[cfg(test)]
mod tests {
    use super::*;

    fn total(costs: &CostMatrix, asgn: &[Option<usize>]) -> f64 {
        asgn.iter()
            .enumerate()
            .filter_map(|(r, c)| c.map(|c| costs.get(r, c)))
            .sum()
    }

    /// Exhaustive search over all partial one-to-one matchings, maximizing
    /// the number of matched (permitted) pairs first and minimizing total
    /// cost second — the solver's documented contract.
    fn brute_force(costs: &CostMatrix) -> f64 {
        fn rec(
            costs: &CostMatrix,
            row: usize,
            used: &mut Vec<bool>,
            count: usize,
            acc: f64,
            best: &mut (usize, f64),
        ) {
            if row == costs.rows() {
                if count > best.0 || (count == best.0 && acc < best.1) {
                    *best = (count, acc);
                }
                return;
            }
            for c in 0..costs.cols() {
                if !used[c] && costs.get(row, c).is_finite() {
                    used[c] = true;
                    rec(
                        costs,
                        row + 1,
                        used,
                        count + 1,
                        acc + costs.get(row, c),
                        best,
                    );
                    used[c] = false;
                }
            }
            rec(costs, row + 1, used, count, acc, best); // leave row unmatched
        }
        let mut best = (0usize, f64::INFINITY);
        rec(costs, 0, &mut vec![false; costs.cols()], 0, 0.0, &mut best);
        best.1
    }

    #[test]
    fn forced_identity() {
        let c = CostMatrix::from_rows(&[vec![0.0, 9.0], vec![9.0, 0.0]]);
        assert_eq!(hungarian(&c), vec![Some(0), Some(1)]);
        assert_eq!(total(&c, &hungarian(&c)), 0.0);
    }

    #[test]
    fn prefers_cheaper_permutation() {
        let c = CostMatrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 1.0]]);
        let a = hungarian(&c);
        assert_eq!(a, vec![Some(0), Some(1)]);
        assert_eq!(total(&c, &a), 2.0);
    }

    #[test]
    fn matches_brute_force_on_random_integer_matrices() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(13);
        for trial in 0..120 {
            let rows = rng.random_range(1..=6);
            let cols = rng.random_range(1..=6);
            let mut c = CostMatrix::zeros(rows, cols);
            for r in 0..rows {
                for j in 0..cols {
                    c.set(r, j, f64::from(rng.random_range(0..50)));
                }
            }
            let a = hungarian(&c);
            assert_eq!(
                total(&c, &a),
                brute_force(&c),
                "trial {trial}: suboptimal assignment {a:?}"
            );
            // One-to-one.
            let mut seen = std::collections::BTreeSet::new();
            for col in a.iter().flatten() {
                assert!(seen.insert(*col));
            }
        }
    }

    #[test]
    fn negative_costs_are_handled() {
        let c = CostMatrix::from_rows(&[vec![-5.0, -1.0], vec![-2.0, -4.0]]);
        let a = hungarian(&c);
        assert_eq!(total(&c, &a), -9.0);
    }

    #[test]
    fn rectangular_leaves_extra_rows_unassigned() {
        let c = CostMatrix::from_rows(&[vec![5.0, 1.0], vec![1.0, 5.0], vec![2.0, 2.0]]);
        let a = hungarian(&c);
        assert_eq!(a.iter().filter(|x| x.is_some()).count(), 2);
        assert_eq!(total(&c, &a), 2.0);
        assert_eq!(a, vec![Some(1), Some(0), None]);
    }

    #[test]
    fn rectangular_wide_assigns_all_rows() {
        let c = CostMatrix::from_rows(&[vec![4.0, 1.0, 2.0, 7.0]]);
        assert_eq!(hungarian(&c), vec![Some(1)]);
    }

    #[test]
    fn forbidden_pairs_never_assigned() {
        let c = CostMatrix::from_rows(&[vec![FORBIDDEN, 1.0], vec![FORBIDDEN, FORBIDDEN]]);
        let a = hungarian(&c);
        assert_eq!(a, vec![Some(1), None]);
    }

    #[test]
    fn fully_forbidden_matrix_assigns_nothing() {
        let c = CostMatrix::from_rows(&[vec![FORBIDDEN; 3], vec![FORBIDDEN; 3]]);
        assert_eq!(hungarian(&c), vec![None, None]);
    }

    #[test]
    fn forbidden_entries_do_not_distort_other_rows() {
        // Row 0 can only take column 2; rows 1..2 must settle around it.
        let c = CostMatrix::from_rows(&[
            vec![FORBIDDEN, FORBIDDEN, 3.0],
            vec![1.0, 2.0, 1.0],
            vec![2.0, 1.0, 1.0],
        ]);
        let a = hungarian(&c);
        assert_eq!(a, vec![Some(2), Some(0), Some(1)]);
        assert_eq!(total(&c, &a), 5.0);
    }

    #[test]
    fn ties_resolve_lexicographically() {
        // Every permutation has total 0: lexicographic rule picks identity.
        let c = CostMatrix::from_rows(&[vec![0.0, 0.0], vec![0.0, 0.0]]);
        assert_eq!(hungarian(&c), vec![Some(0), Some(1)]);

        let c = CostMatrix::from_rows(&[
            vec![1.0, 1.0, 1.0],
            vec![1.0, 1.0, 1.0],
            vec![1.0, 1.0, 1.0],
        ]);
        assert_eq!(hungarian(&c), vec![Some(0), Some(1), Some(2)]);

        // Two optimal totals (a-d and b-c both cost 5): pick row 0 → col 0.
        let c = CostMatrix::from_rows(&[vec![2.0, 3.0], vec![2.0, 3.0]]);
        assert_eq!(hungarian(&c), vec![Some(0), Some(1)]);
    }

    #[test]
    fn empty_dimensions() {
        assert_eq!(
            hungarian(&CostMatrix::zeros(0, 4)),
            Vec::<Option<usize>>::new()
        );
        assert_eq!(hungarian(&CostMatrix::zeros(3, 0)), vec![None, None, None]);
    }

    #[test]
    fn nan_treated_as_forbidden() {
        let c = CostMatrix::from_rows(&[vec![f64::NAN, 2.0]]);
        assert_eq!(hungarian(&c), vec![Some(1)]);
    }
}
