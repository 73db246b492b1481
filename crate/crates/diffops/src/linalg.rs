//! Exact sparse Gaussian elimination over the rationals.
//!
//! Rows are sorted sparse vectors.  The incremental `Eliminator` keeps a
//! row-echelon basis of everything fed to it, answers span-membership
//! queries, and (through caller-managed augmentation columns) recovers the
//! combination that witnesses a membership.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::rat::Rat;

/// Sparse row: strictly increasing column indices, no zero entries.
pub type SRow = Vec<(usize, Rat)>;

pub fn srow_from_dense(v: &[Rat]) -> SRow {
    v.iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(j, c)| (j, c.clone()))
        .collect()
}

/// `a + c * b`, merging sorted sparse rows.
pub fn srow_add_scaled(a: &SRow, b: &SRow, c: &Rat) -> SRow {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        if j >= b.len() || (i < a.len() && a[i].0 < b[j].0) {
            out.push(a[i].clone());
            i += 1;
        } else if i >= a.len() || b[j].0 < a[i].0 {
            let v = &b[j].1 * c;
            if !v.is_zero() {
                out.push((b[j].0, v));
            }
            j += 1;
        } else {
            let v = &a[i].1 + &b[j].1 * c;
            if !v.is_zero() {
                out.push((a[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

pub fn srow_scale(a: &SRow, c: &Rat) -> SRow {
    if c.is_zero() {
        return Vec::new();
    }
    a.iter().map(|(j, v)| (*j, v * c)).collect()
}

/// Incremental row-echelon eliminator.  Pivot columns are restricted to
/// `< real_cols`; any larger indices are caller-managed augmentation that
/// tags each vector with bookkeeping (combination tracking).
pub struct Eliminator {
    real_cols: usize,
    pivots: BTreeMap<usize, SRow>,
}

impl Eliminator {
    pub fn new(real_cols: usize) -> Eliminator {
        Eliminator {
            real_cols,
            pivots: BTreeMap::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    fn leading_real(&self, row: &SRow) -> Option<(usize, Rat)> {
        row.iter()
            .find(|(j, _)| *j < self.real_cols)
            .map(|(j, c)| (*j, c.clone()))
    }

    /// Fully reduces `row` against the stored pivots.  The returned residual
    /// has no leading entry at any pivot column.
    pub fn reduce(&self, row: SRow) -> SRow {
        let mut r = row;
        loop {
            match self.leading_real(&r) {
                None => return r,
                Some((col, coeff)) => match self.pivots.get(&col) {
                    None => return r,
                    Some(p) => {
                        r = srow_add_scaled(&r, p, &(-coeff));
                    }
                },
            }
        }
    }

    /// Feeds a row; returns the pivot column if the rank grew.
    pub fn add_row(&mut self, row: SRow) -> Option<usize> {
        let r = self.reduce(row);
        match self.leading_real(&r) {
            None => None,
            Some((col, coeff)) => {
                let inv = Rat::one() / coeff;
                self.pivots.insert(col, srow_scale(&r, &inv));
                Some(col)
            }
        }
    }

    /// True when the real part of `row` lies in the span of the added rows.
    /// The residual (carrying any augmentation columns) is also returned.
    pub fn contains(&self, row: SRow) -> (bool, SRow) {
        let r = self.reduce(row);
        let inside = r.iter().all(|(j, _)| *j >= self.real_cols);
        (inside, r)
    }

    /// The stored pivot rows in ascending pivot-column order.
    pub fn pivot_rows(&self) -> Vec<SRow> {
        self.pivots.values().cloned().collect()
    }
}

/// Rank of a set of sparse rows over `ncols` columns.
pub fn sparse_rank(rows: impl IntoIterator<Item = SRow>, ncols: usize) -> usize {
    let mut e = Eliminator::new(ncols);
    for r in rows {
        e.add_row(r);
    }
    e.rank()
}

/// Solves the linear system given as `(coefficients, rhs)` equations over
/// `ncols` unknowns.  Returns a particular solution with free unknowns set
/// to zero, or `None` when inconsistent.
pub fn solve_system(eqs: Vec<(SRow, Rat)>, ncols: usize) -> Option<Vec<Rat>> {
    // Augment the right-hand side as column `ncols`.
    let mut elim = Eliminator::new(ncols + 1);
    for (mut row, rhs) in eqs {
        if !rhs.is_zero() {
            row.push((ncols, rhs));
        }
        elim.add_row(row);
    }
    if elim.pivots.contains_key(&ncols) {
        return None;
    }
    let mut x = vec![Rat::zero(); ncols];
    // Back-substitute in decreasing pivot order.
    for (&col, row) in elim.pivots.iter().rev() {
        let mut v = Rat::zero();
        for (j, c) in row {
            if *j == col {
                continue;
            }
            if *j == ncols {
                v += c;
            } else {
                v -= c * &x[*j];
            }
        }
        x[col] = v;
    }
    Some(x)
}

// Dense helpers for the small square matrices of group elements.

pub type Mat = Vec<Vec<Rat>>;

pub fn mat_identity(n: usize) -> Mat {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { Rat::one() } else { Rat::zero() })
                .collect()
        })
        .collect()
}

pub fn mat_mul(a: &Mat, b: &Mat) -> Mat {
    let n = a.len();
    let m = b[0].len();
    let k = b.len();
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| {
                    let mut s = Rat::zero();
                    for t in 0..k {
                        s += &a[i][t] * &b[t][j];
                    }
                    s
                })
                .collect()
        })
        .collect()
}

pub fn mat_transpose(a: &Mat) -> Mat {
    let n = a.len();
    let m = a[0].len();
    (0..m)
        .map(|j| (0..n).map(|i| a[i][j].clone()).collect())
        .collect()
}

pub fn mat_vec(a: &Mat, v: &[Rat]) -> Vec<Rat> {
    a.iter()
        .map(|row| {
            let mut s = Rat::zero();
            for (c, x) in row.iter().zip(v) {
                s += c * x;
            }
            s
        })
        .collect()
}

/// Inverse via Gauss-Jordan; `None` when singular.
pub fn mat_inv(a: &Mat) -> Option<Mat> {
    let n = a.len();
    let mut aug: Vec<Vec<Rat>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Rat::one() } else { Rat::zero() }));
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !aug[r][col].is_zero())?;
        aug.swap(col, piv);
        let inv = Rat::one() / aug[col][col].clone();
        for v in aug[col].iter_mut() {
            *v = &*v * &inv;
        }
        for r in 0..n {
            if r != col && !aug[r][col].is_zero() {
                let f = aug[r][col].clone();
                for j in 0..2 * n {
                    let t = &aug[col][j] * &f;
                    aug[r][j] -= t;
                }
            }
        }
    }
    Some(aug.into_iter().map(|r| r[n..].to_vec()).collect())
}

pub fn mat_rank(a: &Mat) -> usize {
    if a.is_empty() {
        return 0;
    }
    sparse_rank(a.iter().map(|r| srow_from_dense(r)), a[0].len())
}

/// Basis of the right null space of the matrix (rows are equations).
pub fn kernel_dense(rows: &[Vec<Rat>], ncols: usize) -> Vec<Vec<Rat>> {
    let mut elim = Eliminator::new(ncols);
    for r in rows {
        elim.add_row(srow_from_dense(r));
    }
    // Reduced echelon form: eliminate pivot columns from the rows above.
    let pivot_cols: Vec<usize> = elim.pivots.keys().cloned().collect();
    let mut rref: BTreeMap<usize, SRow> = BTreeMap::new();
    for (&col, row) in elim.pivots.iter().rev() {
        let mut r = row.clone();
        let mut changed = true;
        while changed {
            changed = false;
            let snapshot: Vec<(usize, Rat)> = r
                .iter()
                .filter(|(j, _)| *j != col && rref.contains_key(j))
                .map(|(j, c)| (*j, c.clone()))
                .collect();
            for (j, c) in snapshot {
                r = srow_add_scaled(&r, &rref[&j], &(-c));
                changed = true;
            }
        }
        rref.insert(col, r);
    }
    let mut basis = Vec::new();
    for free in 0..ncols {
        if pivot_cols.binary_search(&free).is_ok() {
            continue;
        }
        let mut v = vec![Rat::zero(); ncols];
        v[free] = Rat::one();
        for (&col, row) in &rref {
            let mut coeff = Rat::zero();
            for (j, c) in row {
                if *j == free {
                    coeff = c.clone();
                }
            }
            v[col] = -coeff;
        }
        basis.push(v);
    }
    basis
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{rat, rat_i};

    #[test]
    fn eliminator_membership_and_rank() {
        let mut e = Eliminator::new(3);
        e.add_row(vec![(0, rat_i(1)), (1, rat_i(2))]);
        e.add_row(vec![(1, rat_i(1)), (2, rat_i(1))]);
        assert_eq!(e.rank(), 2);
        // (1, 0, -2) = row1 - 2 row2
        let (inside, _) = e.contains(vec![(0, rat_i(1)), (2, rat_i(-2))]);
        assert!(inside);
        let (inside, _) = e.contains(vec![(2, rat_i(1))]);
        assert!(!inside);
        // Adding a dependent row does not grow the rank.
        assert!(e
            .add_row(vec![(0, rat_i(2)), (1, rat_i(4))])
            .is_none());
    }

    #[test]
    fn combination_tracking_via_augmentation() {
        // Rows augmented with unit tags at columns 10+k.
        let rows: Vec<SRow> = vec![
            vec![(0, rat_i(1)), (1, rat_i(1)), (10, rat_i(1))],
            vec![(1, rat_i(1)), (11, rat_i(1))],
        ];
        let mut e = Eliminator::new(10);
        for r in rows.clone() {
            e.add_row(r);
        }
        // Target (1, 0): equals row0 - row1.
        let (inside, resid) = e.contains(vec![(0, rat_i(1))]);
        assert!(inside);
        let mut comb = vec![Rat::zero(); 2];
        for (j, c) in resid {
            comb[j - 10] = -c;
        }
        assert_eq!(comb, vec![rat_i(1), rat_i(-1)]);
    }

    #[test]
    fn solve_consistent_and_inconsistent() {
        // x + y = 3, x - y = 1  =>  x = 2, y = 1.
        let eqs = vec![
            (vec![(0, rat_i(1)), (1, rat_i(1))], rat_i(3)),
            (vec![(0, rat_i(1)), (1, rat_i(-1))], rat_i(1)),
        ];
        assert_eq!(solve_system(eqs, 2), Some(vec![rat_i(2), rat_i(1)]));
        let bad = vec![
            (vec![(0, rat_i(1))], rat_i(1)),
            (vec![(0, rat_i(2))], rat_i(3)),
        ];
        assert_eq!(solve_system(bad, 1), None);
        // Underdetermined: free variable pinned to zero.
        let under = vec![(vec![(0, rat_i(1)), (1, rat_i(1))], rat_i(5))];
        assert_eq!(solve_system(under, 2), Some(vec![rat_i(5), rat_i(0)]));
    }

    #[test]
    fn dense_inverse_and_kernel() {
        let m = vec![vec![rat_i(2), rat_i(1)], vec![rat_i(1), rat_i(1)]];
        let inv = mat_inv(&m).unwrap();
        assert_eq!(mat_mul(&m, &inv), mat_identity(2));
        assert!(mat_inv(&vec![vec![rat_i(1), rat_i(2)], vec![rat_i(2), rat_i(4)]]).is_none());
        // Kernel of (1 1 1) is 2-dimensional.
        let k = kernel_dense(&[vec![rat_i(1), rat_i(1), rat_i(1)]], 3);
        assert_eq!(k.len(), 2);
        for v in &k {
            let s = v.iter().fold(Rat::zero(), |acc, x| acc + x);
            assert_eq!(s, rat_i(0));
        }
        assert_eq!(mat_rank(&m), 2);
        let half = vec![vec![rat(1, 2), rat_i(0)], vec![rat_i(0), rat(1, 2)]];
        assert_eq!(mat_inv(&half).unwrap(), mat_mul(&mat_identity(2), &vec![vec![rat_i(2), rat_i(0)], vec![rat_i(0), rat_i(2)]]));
    }
}
