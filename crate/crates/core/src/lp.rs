//! Exact linear programming over the rationals.
//!
//! A dense two-phase simplex with Bland's rule: no tolerances, no scaling,
//! every pivot is exact. Problems here are tiny (a handful of rows, at most
//! a few hundred columns), so the tableau form is the right trade-off.
//! Infeasibility always comes with a Farkas certificate and convex-hull
//! membership queries return either explicit multipliers or a strictly
//! separating functional, so every answer can be re-checked independently.

use crate::error::Error;
use crate::rat::Rat;
use num::{One, Signed, Zero};

/// Result of `min c.x  s.t.  A x = b, x >= 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal { x: Vec<Rat>, value: Rat },
    /// `farkas` is `y` with `y.A <= 0` componentwise and `y.b > 0`.
    Infeasible { farkas: Vec<Rat> },
    Unbounded,
}

/// Result of a convex-hull membership query.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Membership {
    /// `point = sum_i lambda_i g_i (+ nonneg)`, `sum lambda = 1`, `lambda >= 0`.
    Inside { lambda: Vec<Rat> },
    /// Strict separation: `h.point < h0 <= h.g_i` for every generator; `h`
    /// is componentwise nonnegative when the query included the nonnegative
    /// recession cone.
    Outside { h: Vec<Rat>, h0: Rat },
}

struct Tableau {
    /// `m x (n + m + 1)`: structural columns, artificial columns, rhs.
    rows: Vec<Vec<Rat>>,
    /// Reduced-cost row, same width as `rows` entries.
    zrow: Vec<Rat>,
    /// Basic column per row.
    basis: Vec<usize>,
    /// Rows found to be redundant after phase one (always zero, ignored).
    dead: Vec<bool>,
    n: usize,
    m: usize,
}

impl Tableau {
    fn width(&self) -> usize {
        self.n + self.m + 1
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let inv = Rat::one() / self.rows[row][col].clone();
        for v in self.rows[row].iter_mut() {
            *v = &*v * &inv;
        }
        let w = self.width();
        for r in 0..self.m {
            if r != row && !self.rows[r][col].is_zero() {
                let f = self.rows[r][col].clone();
                for c in 0..w {
                    let v = &self.rows[r][c] - &(&self.rows[row][c] * &f);
                    self.rows[r][c] = v;
                }
            }
        }
        if !self.zrow[col].is_zero() {
            let f = self.zrow[col].clone();
            for c in 0..w {
                let v = &self.zrow[c] - &(&self.rows[row][c] * &f);
                self.zrow[c] = v;
            }
        }
        self.basis[row] = col;
    }

    /// Bland's rule on the column set `cols`; returns false when optimal.
    fn step(&mut self, cols: &[usize]) -> Option<bool> {
        let entering = cols
            .iter()
            .copied()
            .find(|&j| self.zrow[j].is_negative())?;
        let rhs = self.n + self.m;
        let mut leaving: Option<usize> = None;
        let mut best: Option<Rat> = None;
        for r in 0..self.m {
            if self.dead[r] || !self.rows[r][entering].is_positive() {
                continue;
            }
            let ratio = &self.rows[r][rhs] / &self.rows[r][entering];
            let better = match &best {
                None => true,
                Some(b) => {
                    ratio < *b || (ratio == *b && self.basis[r] < self.basis[leaving.unwrap()])
                }
            };
            if better {
                best = Some(ratio);
                leaving = Some(r);
            }
        }
        match leaving {
            Some(r) => {
                self.pivot(r, entering);
                Some(true)
            }
            None => Some(false), // entering column unbounded
        }
    }
}

/// Minimizes `c.x` subject to `A x = b`, `x >= 0`, exactly.
pub fn solve_min(c: &[Rat], a: &[Vec<Rat>], b: &[Rat]) -> LpOutcome {
    let m = a.len();
    let n = c.len();
    assert_eq!(b.len(), m, "rhs length mismatch");
    assert!(a.iter().all(|row| row.len() == n), "ragged constraint rows");

    // Orient rows so the rhs is nonnegative, remembering signs for the
    // Farkas certificate.
    let mut sign = vec![Rat::one(); m];
    let mut rows: Vec<Vec<Rat>> = Vec::with_capacity(m);
    for i in 0..m {
        let mut row: Vec<Rat> = Vec::with_capacity(n + m + 1);
        let neg = b[i].is_negative();
        if neg {
            sign[i] = -Rat::one();
        }
        for j in 0..n {
            row.push(if neg { -a[i][j].clone() } else { a[i][j].clone() });
        }
        for k in 0..m {
            row.push(if k == i { Rat::one() } else { Rat::zero() });
        }
        row.push(if neg { -b[i].clone() } else { b[i].clone() });
        rows.push(row);
    }

    // Phase-one objective: sum of artificials, canonicalized against the
    // artificial basis.
    let mut zrow = vec![Rat::zero(); n + m + 1];
    for j in 0..n + m + 1 {
        let mut v = if (n..n + m).contains(&j) {
            Rat::one()
        } else {
            Rat::zero()
        };
        for row in rows.iter() {
            v = v - &row[j];
        }
        zrow[j] = v;
    }

    let mut t = Tableau {
        rows,
        zrow,
        basis: (n..n + m).collect(),
        dead: vec![false; m],
        n,
        m,
    };

    let all_cols: Vec<usize> = (0..n + m).collect();
    loop {
        match t.step(&all_cols) {
            Some(true) => continue,
            Some(false) | None => break,
        }
    }

    let rhs = n + m;
    let phase1 = -t.zrow[rhs].clone();
    if phase1.is_positive() {
        // Duals: reduced cost of artificial i is 1 - y_i.
        let farkas: Vec<Rat> = (0..m)
            .map(|i| (Rat::one() - &t.zrow[n + i]) * &sign[i])
            .collect();
        debug_assert!({
            let yb: Rat = farkas.iter().zip(b).map(|(y, bi)| y * bi).sum();
            let cols_ok = (0..n).all(|j| {
                let yaj: Rat = farkas.iter().zip(a).map(|(y, row)| y * &row[j]).sum();
                !yaj.is_positive()
            });
            yb.is_positive() && cols_ok
        });
        return LpOutcome::Infeasible { farkas };
    }

    // Drive remaining artificials out of the basis; a row with no structural
    // entry is redundant and goes dead.
    for r in 0..m {
        if t.basis[r] < n || t.dead[r] {
            continue;
        }
        match (0..n).find(|&j| !t.rows[r][j].is_zero()) {
            Some(j) => t.pivot(r, j),
            None => t.dead[r] = true,
        }
    }

    // Phase-two objective.
    let mut zrow = vec![Rat::zero(); n + m + 1];
    for (j, z) in zrow.iter_mut().enumerate().take(n) {
        *z = c[j].clone();
    }
    for r in 0..m {
        if t.dead[r] {
            continue;
        }
        let j = t.basis[r];
        if !zrow[j].is_zero() {
            let f = zrow[j].clone();
            for cidx in 0..n + m + 1 {
                let v = &zrow[cidx] - &(&t.rows[r][cidx] * &f);
                zrow[cidx] = v;
            }
        }
    }
    t.zrow = zrow;

    let real_cols: Vec<usize> = (0..n).collect();
    loop {
        match t.step(&real_cols) {
            Some(true) => continue,
            Some(false) => return LpOutcome::Unbounded,
            None => break,
        }
    }

    let mut x = vec![Rat::zero(); n];
    for r in 0..m {
        if !t.dead[r] && t.basis[r] < n {
            x[t.basis[r]] = t.rows[r][rhs].clone();
        }
    }
    let value: Rat = c.iter().zip(&x).map(|(ci, xi)| ci * xi).sum();
    debug_assert!(a
        .iter()
        .zip(b)
        .all(|(row, bi)| row.iter().zip(&x).map(|(aij, xj)| aij * xj).sum::<Rat>() == *bi));
    LpOutcome::Optimal { x, value }
}

/// Decides `point in conv(generators) (+ R^d_{>=0} when `with_recession`)`.
///
/// `Inside` returns the convex multipliers; `Outside` returns a strictly
/// separating affine functional. The only rejected input is an empty
/// generator list without the recession flag.
pub fn lp_membership(
    point: &[Rat],
    generators: &[Vec<Rat>],
    with_recession: bool,
) -> Result<Membership, Error> {
    let d = point.len();
    if generators.is_empty() {
        if !with_recession {
            return Err(Error::EmptyGenerators);
        }
        // conv(empty) + cone is empty; anything separates.
        return Ok(Membership::Outside {
            h: vec![Rat::zero(); d],
            h0: Rat::one(),
        });
    }
    if let Some(g) = generators.iter().find(|g| g.len() != d) {
        return Err(Error::DimensionMismatch(format!(
            "generator has {} coordinates, point has {}",
            g.len(),
            d
        )));
    }

    let g = generators.len();
    let slack = if with_recession { d } else { 0 };
    let n = g + slack;
    // Coordinate rows, then the convexity row.
    let mut a: Vec<Vec<Rat>> = Vec::with_capacity(d + 1);
    for i in 0..d {
        let mut row: Vec<Rat> = Vec::with_capacity(n);
        for gen in generators {
            row.push(gen[i].clone());
        }
        for j in 0..slack {
            row.push(if j == i { Rat::one() } else { Rat::zero() });
        }
        a.push(row);
    }
    let mut conv_row = vec![Rat::one(); g];
    conv_row.extend(std::iter::repeat(Rat::zero()).take(slack));
    a.push(conv_row);

    let mut b: Vec<Rat> = point.to_vec();
    b.push(Rat::one());

    match solve_min(&vec![Rat::zero(); n], &a, &b) {
        LpOutcome::Optimal { x, .. } => Ok(Membership::Inside {
            lambda: x[..g].to_vec(),
        }),
        LpOutcome::Infeasible { farkas } => {
            // farkas: y.col <= 0 for all columns, y.b > 0. With
            // h = -y_coords: h.g_i >= y_last for all i, h.point < y_last,
            // and h >= 0 whenever slack columns were present.
            let h: Vec<Rat> = farkas[..d].iter().map(|y| -y.clone()).collect();
            let h0 = farkas[d].clone();
            debug_assert!({
                let hp: Rat = h.iter().zip(point).map(|(hi, pi)| hi * pi).sum();
                let sep_ok = generators.iter().all(|gen| {
                    let hg: Rat = h.iter().zip(gen).map(|(hi, gi)| hi * gi).sum();
                    hg >= h0
                });
                let sign_ok = !with_recession || h.iter().all(|v| !v.is_negative());
                hp < h0 && sep_ok && sign_ok
            });
            Ok(Membership::Outside { h, h0 })
        }
        LpOutcome::Unbounded => unreachable!("feasibility problem has zero objective"),
    }
}
