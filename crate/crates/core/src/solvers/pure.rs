use crate::game::BimatrixGame;

/// Cells `(i, j)` where `A[i,j]` is a maximum of column `j` of `A` and
/// `B[i,j]` a maximum of row `i` of `B`. Ties count.
pub fn pure_equilibria(game: &BimatrixGame) -> Vec<(usize, usize)> {
    let (a, b) = (game.payoff_a(), game.payoff_b());
    let (n, m) = (game.rows(), game.cols());
    let col_max: Vec<f64> =
        (0..m).map(|j| (0..n).map(|i| a[(i, j)]).fold(f64::NEG_INFINITY, f64::max)).collect();
    let mut out = Vec::new();
    for i in 0..n {
        let row = b.row(i);
        let row_max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        for j in 0..m {
            if a[(i, j)] == col_max[j] && row[j] == row_max {
                out.push((i, j));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::Matrix;

    #[test]
    fn examples() {
        let pennies = BimatrixGame::zero_sum(
            Matrix::from_rows(&[[1.0, -1.0], [-1.0, 1.0]]).unwrap(),
        )
        .unwrap();
        assert!(pure_equilibria(&pennies).is_empty());

        let a = Matrix::from_rows(&[[3.0, 0.0], [5.0, 1.0]]).unwrap();
        let dominance = BimatrixGame::new(a.clone(), a.transpose()).unwrap();
        assert_eq!(pure_equilibria(&dominance), vec![(1, 1)]);

        let ones = BimatrixGame::new(Matrix::filled(3, 3, 1.0), Matrix::filled(3, 3, 1.0)).unwrap();
        assert_eq!(pure_equilibria(&ones).len(), 9);
    }
}
