//! Dense rational matrices and exact linear solves.
//!
//! `solve_or_nullspace` reduces `M x = rhs` to reduced row echelon form
//! with exact pivoting and reports either the unique solution, a
//! particular solution together with a nullspace basis, or infeasibility.
//! Sizes here are tiny (at most a dozen rows), so no pivoting strategy
//! beyond "first nonzero entry" is needed for exact arithmetic.

use crate::rat::Rat;
use num::{One, Zero};

/// Dense row-major rational matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mat {
    rows: usize,
    cols: usize,
    a: Vec<Rat>,
}

/// Outcome of an exact linear solve.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LinearSolution {
    /// The system has exactly one solution.
    Unique(Vec<Rat>),
    /// Solution set is `particular + span(nullspace)`, `nullspace` nonempty.
    Affine {
        particular: Vec<Rat>,
        nullspace: Vec<Vec<Rat>>,
    },
    /// No solution.
    Infeasible,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            a: vec![Rat::zero(); rows * cols],
        }
    }

    pub fn from_rows(rows: Vec<Vec<Rat>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Mat {
            rows: r,
            cols: c,
            a: rows.into_iter().flatten().collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Rat {
        &self.a[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Rat) {
        self.a[r * self.cols + c] = v;
    }

    /// Matrix-vector product.
    pub fn mul_vec(&self, x: &[Rat]) -> Vec<Rat> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|r| {
                (0..self.cols)
                    .map(|c| self.get(r, c) * &x[c])
                    .fold(Rat::zero(), |acc, t| acc + t)
            })
            .collect()
    }
}

/// Solves `m x = rhs` exactly.
pub fn solve_or_nullspace(m: &Mat, rhs: &[Rat]) -> LinearSolution {
    assert_eq!(rhs.len(), m.rows(), "rhs length mismatch");
    let rows = m.rows();
    let cols = m.cols();
    // Augmented working copy.
    let mut w: Vec<Vec<Rat>> = (0..rows)
        .map(|r| {
            let mut row: Vec<Rat> = (0..cols).map(|c| m.get(r, c).clone()).collect();
            row.push(rhs[r].clone());
            row
        })
        .collect();

    let mut pivot_col_of_row: Vec<usize> = Vec::new();
    let mut pivot_row = 0usize;
    for col in 0..cols {
        let Some(src) = (pivot_row..rows).find(|&r| !w[r][col].is_zero()) else {
            continue;
        };
        w.swap(pivot_row, src);
        let inv = {
            let p = &w[pivot_row][col];
            Rat::one() / p.clone()
        };
        for c in col..=cols {
            let v = &w[pivot_row][c] * &inv;
            w[pivot_row][c] = v;
        }
        for r in 0..rows {
            if r != pivot_row && !w[r][col].is_zero() {
                let factor = w[r][col].clone();
                for c in col..=cols {
                    let v = &w[r][c] - &(&w[pivot_row][c] * &factor);
                    w[r][c] = v;
                }
            }
        }
        pivot_col_of_row.push(col);
        pivot_row += 1;
        if pivot_row == rows {
            break;
        }
    }

    // Inconsistent row `0 = nonzero`?
    for r in pivot_row..rows {
        if !w[r][cols].is_zero() {
            return LinearSolution::Infeasible;
        }
    }

    let mut particular = vec![Rat::zero(); cols];
    for (r, &pc) in pivot_col_of_row.iter().enumerate() {
        particular[pc] = w[r][cols].clone();
    }

    let pivot_set: Vec<bool> = {
        let mut s = vec![false; cols];
        for &pc in &pivot_col_of_row {
            s[pc] = true;
        }
        s
    };
    let mut nullspace: Vec<Vec<Rat>> = Vec::new();
    for free in 0..cols {
        if pivot_set[free] {
            continue;
        }
        let mut v = vec![Rat::zero(); cols];
        v[free] = Rat::one();
        for (r, &pc) in pivot_col_of_row.iter().enumerate() {
            v[pc] = -w[r][free].clone();
        }
        nullspace.push(v);
    }

    if nullspace.is_empty() {
        LinearSolution::Unique(particular)
    } else {
        LinearSolution::Affine {
            particular,
            nullspace,
        }
    }
}

/// Rank of `m` (exact).
pub fn rank(m: &Mat) -> usize {
    match solve_or_nullspace(m, &vec![Rat::zero(); m.rows()]) {
        LinearSolution::Unique(_) => m.cols(),
        LinearSolution::Affine { nullspace, .. } => m.cols() - nullspace.len(),
        LinearSolution::Infeasible => unreachable!("homogeneous system"),
    }
}

/// Solves the 2x2 system `(col1 | col2) * (s, t) = rhs` by Cramer's rule;
/// `None` when the columns are dependent.
pub fn solve_2x2(col1: &crate::geom::Vec2, col2: &crate::geom::Vec2, rhs: &crate::geom::Vec2) -> Option<(Rat, Rat)> {
    let det = col1.cross(col2);
    if det.is_zero() {
        return None;
    }
    let s = rhs.cross(col2) / det.clone();
    let t = col1.cross(rhs) / det;
    Some((s, t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{rat, ratio};

    fn m(rows: &[&[i64]]) -> Mat {
        Mat::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| rat(v)).collect())
                .collect(),
        )
    }

    #[test]
    fn identity_unique() {
        let sol = solve_or_nullspace(&m(&[&[1, 0], &[0, 1]]), &[ratio(1, 2), ratio(1, 2)]);
        assert_eq!(sol, LinearSolution::Unique(vec![ratio(1, 2), ratio(1, 2)]));
    }

    #[test]
    fn wide_system_affine() {
        // x1 + x2 = 0 has nullspace spanned by (1, -1).
        match solve_or_nullspace(&m(&[&[1, 1]]), &[rat(0)]) {
            LinearSolution::Affine {
                particular,
                nullspace,
            } => {
                assert_eq!(particular, vec![rat(0), rat(0)]);
                assert_eq!(nullspace.len(), 1);
                let v = &nullspace[0];
                assert!(!v[0].is_zero() && v[0] == -v[1].clone());
            }
            other => panic!("expected affine, got {other:?}"),
        }
    }

    #[test]
    fn inconsistent_detected() {
        let sol = solve_or_nullspace(&m(&[&[1, 1], &[2, 2]]), &[rat(1), rat(3)]);
        assert_eq!(sol, LinearSolution::Infeasible);
    }

    #[test]
    fn tall_consistent() {
        let sol = solve_or_nullspace(&m(&[&[1, 0], &[0, 1], &[1, 1]]), &[rat(2), rat(3), rat(5)]);
        assert_eq!(sol, LinearSolution::Unique(vec![rat(2), rat(3)]));
    }

    #[test]
    fn nullspace_vectors_annihilate() {
        let mat = m(&[&[2, 4, -2, 0], &[1, 2, 0, 3]]);
        match solve_or_nullspace(&mat, &[rat(0), rat(0)]) {
            LinearSolution::Affine { nullspace, .. } => {
                assert_eq!(nullspace.len(), 2);
                for v in &nullspace {
                    assert!(mat.mul_vec(v).iter().all(|x| x.is_zero()));
                }
            }
            other => panic!("expected affine, got {other:?}"),
        }
    }

    #[test]
    fn cramer_2x2() {
        use crate::geom::Vec2;
        let (s, t) = solve_2x2(
            &Vec2::from_ints(1, 1),
            &Vec2::from_ints(1, -1),
            &Vec2::new(ratio(3, 2), ratio(1, 2)),
        )
        .unwrap();
        assert_eq!(s, rat(1));
        assert_eq!(t, ratio(1, 2));
        assert!(solve_2x2(
            &Vec2::from_ints(2, 1),
            &Vec2::from_ints(4, 2),
            &Vec2::from_ints(1, 1)
        )
        .is_none());
    }
}
