//! Small dense helpers on top of nalgebra.

use crate::Matrix;

/// Largest absolute entry, zero for an empty matrix.
pub fn max_abs(m: &Matrix) -> f64 {
    m.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

/// Largest absolute entrywise difference.
pub fn max_abs_diff(a: &Matrix, b: &Matrix) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter().zip(b.iter()).fold(0.0, |acc, (x, y)| acc.max((x - y).abs()))
}

pub fn column_sums(m: &Matrix) -> Vec<f64> {
    m.column_iter().map(|c| c.sum()).collect()
}

pub fn row_sums(m: &Matrix) -> Vec<f64> {
    m.row_iter().map(|r| r.sum()).collect()
}

/// Numerical rank by Gaussian elimination with full pivoting.
///
/// A pivot counts only if its magnitude exceeds `rel_tol * max|m_ij|`.
pub fn rank(m: &Matrix, rel_tol: f64) -> usize {
    let scale = max_abs(m);
    if scale == 0.0 {
        return 0;
    }
    let threshold = rel_tol * scale;
    let mut a = m.clone();
    let (rows, cols) = a.shape();
    let mut rank = 0;
    for step in 0..rows.min(cols) {
        let mut best = (step, step, 0.0);
        for i in step..rows {
            for j in step..cols {
                let v = a[(i, j)].abs();
                if v > best.2 {
                    best = (i, j, v);
                }
            }
        }
        if best.2 <= threshold {
            break;
        }
        a.swap_rows(step, best.0);
        a.swap_columns(step, best.1);
        let pivot = a[(step, step)];
        for i in step + 1..rows {
            let factor = a[(i, step)] / pivot;
            if factor != 0.0 {
                for j in step..cols {
                    let v = a[(step, j)];
                    a[(i, j)] -= factor * v;
                }
            }
        }
        rank += 1;
    }
    rank
}
