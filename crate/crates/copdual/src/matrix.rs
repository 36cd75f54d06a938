//! Dense rational matrices, fraction-free rank and exact linear solving.

use crate::rat::{dot, Rat};
use num::bigint::BigInt;
use num::traits::{One, Zero};

/// Dense row-major matrix over exact rationals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rat>,
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMatrix {
            rows,
            cols,
            data: vec![Rat::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            *m.at_mut(i, i) = Rat::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rat>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        RatMatrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, i: usize, j: usize) -> &Rat {
        &self.data[i * self.cols + j]
    }

    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut Rat {
        &mut self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[Rat] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<Rat>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn col_vec(&self, j: usize) -> Vec<Rat> {
        (0..self.rows).map(|i| self.at(i, j).clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                *t.at_mut(j, i) = self.at(i, j).clone();
            }
        }
        t
    }

    pub fn mul_vec(&self, v: &[Rat]) -> Vec<Rat> {
        assert_eq!(self.cols, v.len(), "mul_vec dimension mismatch");
        (0..self.rows).map(|i| dot(self.row(i), v)).collect()
    }

    pub fn mul_mat(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "mul_mat dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let add = a * other.at(k, j);
                    *out.at_mut(i, j) += add;
                }
            }
        }
        out
    }

    pub fn scale(&self, s: &Rat) -> Self {
        let mut out = self.clone();
        for v in &mut out.data {
            *v *= s;
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (v, w) in out.data.iter_mut().zip(&other.data) {
            *v += w;
        }
        out
    }

    /// Frobenius inner product `sum_ij A_ij B_ij`.
    pub fn frobenius(&self, other: &Self) -> Rat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a * b)
            .fold(Rat::zero(), |acc, t| acc + t)
    }

    /// `t' M t` for square `M`.
    pub fn quad_form(&self, t: &[Rat]) -> Rat {
        dot(&self.mul_vec(t), t)
    }

    /// First violating entry `(i, j)` with `i < j`, if any.
    pub fn symmetry_violation(&self) -> Option<(usize, usize)> {
        if self.rows != self.cols {
            return Some((0, 0));
        }
        for i in 0..self.rows {
            for j in i + 1..self.cols {
                if self.at(i, j) != self.at(j, i) {
                    return Some((i, j));
                }
            }
        }
        None
    }

    /// Columns of `other` appended to the right.
    pub fn augment(&self, other: &Self) -> Self {
        assert_eq!(self.rows, other.rows, "augment row mismatch");
        let mut rows = Vec::with_capacity(self.rows);
        for i in 0..self.rows {
            let mut r = self.row(i).to_vec();
            r.extend_from_slice(other.row(i));
            rows.push(r);
        }
        Self::from_rows(rows)
    }

    /// Exact rank by fraction-free (Bareiss) elimination. Each row is first
    /// scaled to integers; row scaling leaves the rank unchanged.
    pub fn rank(&self) -> usize {
        if self.rows == 0 || self.cols == 0 {
            return 0;
        }
        let mut m: Vec<Vec<BigInt>> = (0..self.rows)
            .map(|i| clear_denominators(self.row(i)))
            .collect();
        let (nr, nc) = (self.rows, self.cols);
        let mut rank = 0usize;
        let mut prev = BigInt::one();
        for c in 0..nc {
            if rank == nr {
                break;
            }
            let Some(pivot_row) = (rank..nr).find(|&r| !m[r][c].is_zero()) else {
                continue;
            };
            m.swap(rank, pivot_row);
            for i in rank + 1..nr {
                for j in c + 1..nc {
                    let num = &m[rank][c] * &m[i][j] - &m[i][c] * &m[rank][j];
                    m[i][j] = &num / &prev;
                }
                m[i][c] = BigInt::zero();
            }
            prev = m[rank][c].clone();
            rank += 1;
        }
        rank
    }
}

fn clear_denominators(row: &[Rat]) -> Vec<BigInt> {
    let mut lcm = BigInt::one();
    for v in row {
        lcm = num::integer::lcm(lcm, v.denom().clone());
    }
    row.iter()
        .map(|v| v.numer() * (&lcm / v.denom()))
        .collect()
}

/// Solution of `A x = b`: a particular point plus a nullspace basis, or
/// a proof of inconsistency.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LinearSolution {
    Inconsistent,
    Solution {
        particular: Vec<Rat>,
        nullspace: Vec<Vec<Rat>>,
    },
}

/// Gauss-Jordan with exact rationals; lowest-index pivoting for determinism.
pub fn solve_linear(a: &RatMatrix, b: &[Rat]) -> LinearSolution {
    assert_eq!(a.rows(), b.len(), "rhs length mismatch");
    let (nr, nc) = (a.rows(), a.cols());
    let mut m: Vec<Vec<Rat>> = (0..nr)
        .map(|i| {
            let mut r = a.row(i).to_vec();
            r.push(b[i].clone());
            r
        })
        .collect();
    let mut pivot_cols: Vec<usize> = Vec::new();
    let mut rank = 0usize;
    for c in 0..nc {
        let Some(pr) = (rank..nr).find(|&r| !m[r][c].is_zero()) else {
            continue;
        };
        m.swap(rank, pr);
        let inv = m[rank][c].clone();
        for v in &mut m[rank] {
            *v /= &inv;
        }
        for r in 0..nr {
            if r != rank && !m[r][c].is_zero() {
                let f = m[r][c].clone();
                for j in 0..=nc {
                    let sub = &f * &m[rank][j];
                    m[r][j] -= sub;
                }
            }
        }
        pivot_cols.push(c);
        rank += 1;
        if rank == nr {
            break;
        }
    }
    for r in rank..nr {
        if !m[r][nc].is_zero() {
            return LinearSolution::Inconsistent;
        }
    }
    let mut particular = vec![Rat::zero(); nc];
    for (i, &pc) in pivot_cols.iter().enumerate() {
        particular[pc] = m[i][nc].clone();
    }
    let is_pivot: Vec<bool> = {
        let mut f = vec![false; nc];
        for &pc in &pivot_cols {
            f[pc] = true;
        }
        f
    };
    let mut nullspace = Vec::new();
    for free in 0..nc {
        if is_pivot[free] {
            continue;
        }
        let mut v = vec![Rat::zero(); nc];
        v[free] = Rat::one();
        for (i, &pc) in pivot_cols.iter().enumerate() {
            v[pc] = -m[i][free].clone();
        }
        nullspace.push(v);
    }
    LinearSolution::Solution {
        particular,
        nullspace,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{rat, rint};

    fn m(rows: &[&[i64]]) -> RatMatrix {
        RatMatrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| rint(v)).collect())
                .collect(),
        )
    }

    #[test]
    fn rank_of_identity_and_zero() {
        assert_eq!(RatMatrix::identity(4).rank(), 4);
        assert_eq!(RatMatrix::zeros(3, 5).rank(), 0);
    }

    #[test]
    fn rank_of_rank_one_stack() {
        // Columns a(t*) = 0 and the nonzero lifted row vector at (2,1) from
        // the first bundled fixture, stacked as a 3x2 matrix.
        let cols = m(&[&[0, 0], &[0, 0], &[0, -1]]);
        assert_eq!(cols.rank(), 1);
    }

    #[test]
    fn rank_with_fractions() {
        let a = RatMatrix::from_rows(vec![
            vec![rat(1, 2), rat(1, 3)],
            vec![rat(3, 2), rat(1, 1)],
            vec![rat(2, 1), rat(1, 1)],
        ]);
        assert_eq!(a.rank(), 2);
        let b = RatMatrix::from_rows(vec![
            vec![rat(1, 2), rat(1, 3)],
            vec![rat(3, 2), rat(1, 1)],
        ]);
        // Second row is 3x the first: rank 1.
        assert_eq!(b.rank(), 1);
    }

    #[test]
    fn rank_equals_transpose_rank_fixed() {
        let a = m(&[&[1, 2, 3], &[2, 4, 6], &[0, 1, 1]]);
        assert_eq!(a.rank(), a.transpose().rank());
        assert_eq!(a.rank(), 2);
    }

    #[test]
    fn solve_unique() {
        let a = m(&[&[2, 1], &[1, 3]]);
        let b = vec![rint(5), rint(10)];
        match solve_linear(&a, &b) {
            LinearSolution::Solution {
                particular,
                nullspace,
            } => {
                assert_eq!(particular, vec![rint(1), rint(3)]);
                assert!(nullspace.is_empty());
            }
            _ => panic!("expected solution"),
        }
    }

    #[test]
    fn solve_underdetermined_reconstructs() {
        let a = m(&[&[1, 1, 1]]);
        let b = vec![rint(1)];
        match solve_linear(&a, &b) {
            LinearSolution::Solution {
                particular,
                nullspace,
            } => {
                assert_eq!(nullspace.len(), 2);
                assert_eq!(a.mul_vec(&particular), b);
                for v in &nullspace {
                    assert_eq!(a.mul_vec(v), vec![rint(0)]);
                }
            }
            _ => panic!("expected solution"),
        }
    }

    #[test]
    fn solve_inconsistent() {
        let a = m(&[&[1, 1], &[1, 1]]);
        let b = vec![rint(1), rint(2)];
        assert_eq!(solve_linear(&a, &b), LinearSolution::Inconsistent);
    }

    #[test]
    fn symmetry_violation_position() {
        let mut a = RatMatrix::identity(3);
        *a.at_mut(0, 2) = rint(5);
        assert_eq!(a.symmetry_violation(), Some((0, 2)));
        assert_eq!(RatMatrix::identity(3).symmetry_violation(), None);
    }

    #[test]
    fn quad_form_and_frobenius() {
        let a = m(&[&[1, 2], &[2, 3]]);
        let t = vec![rint(1), rint(1)];
        assert_eq!(a.quad_form(&t), rint(8));
        assert_eq!(a.frobenius(&a), rint(18));
    }
}
