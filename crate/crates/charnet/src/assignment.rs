//! Optimal one-to-one assignment (Kuhn–Munkres) used by the CEAF metric
//! to align gold and predicted clusters.

/// Maximum total similarity over one-to-one (partial) assignments of rows
/// to columns. The matrix may be rectangular; entries must be finite and
/// ≥ 0, so padding to a square with zeros never beats a real match.
pub fn max_similarity_assignment(sim: &[Vec<f64>]) -> f64 {
    let rows = sim.len();
    let cols = sim.first().map_or(0, |r| r.len());
    if rows == 0 || cols == 0 {
        return 0.0;
    }
    let n = rows.max(cols);
    // Hungarian algorithm on the negated, zero-padded square matrix.
    let cost = |i: usize, j: usize| -> f64 {
        if i < rows && j < cols {
            -sim[i][j]
        } else {
            0.0
        }
    };

    // Potentials over rows (u) and columns (v); p[j] is the row matched to
    // column j, with index 0 as the sentinel column.
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

    let mut total = 0.0;
    for (j, &row) in p.iter().enumerate().skip(1) {
        if row != 0 {
            total -= cost(row - 1, j - 1);
        }
    }
    total
}
