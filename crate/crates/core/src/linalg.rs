//! Small dense linear solves used by the equilibrium solvers.

use nalgebra::{DMatrix, DVector};

/// Solves the square system `a z = b` (row-major `a`) by Gaussian elimination
/// with partial pivoting. Returns `None` when a pivot falls below
/// `1e-12 · max|a|`.
pub fn solve_square(mut a: Vec<f64>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    debug_assert_eq!(a.len(), n * n);
    let scale = a.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if scale == 0.0 {
        return None;
    }
    let tiny = 1e-12 * scale;
    for col in 0..n {
        let (piv, pmax) = (col..n)
            .map(|r| (r, a[r * n + col].abs()))
            .fold((col, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if pmax <= tiny {
            return None;
        }
        if piv != col {
            for j in 0..n {
                a.swap(piv * n + j, col * n + j);
            }
            b.swap(piv, col);
        }
        let p = a[col * n + col];
        for r in col + 1..n {
            let f = a[r * n + col] / p;
            if f == 0.0 {
                continue;
            }
            for j in col..n {
                a[r * n + j] -= f * a[col * n + j];
            }
            b[r] -= f * b[col];
        }
    }
    let mut z = vec![0.0; n];
    for r in (0..n).rev() {
        let mut s = b[r];
        for j in r + 1..n {
            s -= a[r * n + j] * z[j];
        }
        z[r] = s / a[r * n + r];
    }
    Some(z)
}

/// Minimum-norm least-squares solution of a (possibly non-square) system,
/// returned with the residual `‖a z − b‖∞`.
pub fn least_squares(a: &[f64], rows: usize, cols: usize, b: &[f64]) -> Option<(Vec<f64>, f64)> {
    let m = DMatrix::from_row_slice(rows, cols, a);
    let rhs = DVector::from_column_slice(b);
    let svd = m.clone().svd(true, true);
    let z = svd.solve(&rhs, 1e-12).ok()?;
    let resid = (&m * &z - &rhs).amax();
    Some((z.iter().copied().collect(), resid))
}
