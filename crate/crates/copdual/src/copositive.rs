//! Exact copositivity decisions by face enumeration.
//!
//! The minimum of `t' D t` over the standard simplex is attained at a point
//! whose support `S` satisfies the stationarity system `D_S u = mu e_S`,
//! `e' u = 1` on its face, and there `mu` equals the attained value (multiply
//! the first equation by `u'`). Enumerating all `2^p - 1` supports and
//! minimizing `mu` over each stationary set — a small exact linear program —
//! therefore finds the global minimum together with an exact witness point.
//! The same stationarity structure with `mu = 0` pinned describes the set of
//! zeros of a copositive form as a finite union of polytopes.

use crate::lp::{Direction, LpProblem, LpResult, Sense, VarBound};
use crate::matrix::{solve_linear, LinearSolution, RatMatrix};
use crate::rat::{Rat, rint};
use crate::CopError;
use num::traits::{Signed, Zero};

/// Face enumeration is exponential in the matrix order; orders above this
/// limit are rejected rather than silently slow.
pub const MAX_FACE_ORDER: usize = 8;

/// Exact minimum of a quadratic form over the standard simplex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimplexMin {
    pub value: Rat,
    /// A simplex point attaining the value.
    pub argmin: Vec<Rat>,
}

/// Copositivity verdict with the extremal certificate: the witness point
/// attains the minimum, so a negative value exhibits the violation and a
/// nonnegative one names a global minimizer.
#[derive(Debug, Clone)]
pub struct CopositivityCheck {
    pub copositive: bool,
    pub min: SimplexMin,
}

fn ensure_small(p: usize) -> Result<(), CopError> {
    if p > MAX_FACE_ORDER {
        Err(CopError::OrderTooLarge(p))
    } else {
        Ok(())
    }
}

fn mask_indices(mask: u32, p: usize) -> Vec<usize> {
    (0..p).filter(|i| mask & (1 << i) != 0).collect()
}

/// Minimum stationary value of `u' D u` over the closed face with support in
/// `s`: minimize `mu` subject to `D_S u = mu e_S`, `e' u = 1`, `u >= 0`.
fn face_stationary_min(d: &RatMatrix, s: &[usize]) -> Option<SimplexMin> {
    let k = s.len();
    // Variables: u_0 .. u_{k-1} (nonnegative), then mu (free).
    let mut bounds = vec![VarBound::nonneg(); k];
    bounds.push(VarBound::free());
    let mut objective = vec![Rat::zero(); k];
    objective.push(rint(1));
    let mut lp = LpProblem::new(Direction::Minimize, objective, bounds);
    for &i in s {
        let mut coeffs: Vec<Rat> = s.iter().map(|&j| d.at(i, j).clone()).collect();
        coeffs.push(rint(-1));
        lp.push_row(coeffs, Sense::Eq, Rat::zero());
    }
    let mut ones = vec![rint(1); k];
    ones.push(Rat::zero());
    lp.push_row(ones, Sense::Eq, rint(1));
    match lp.solve() {
        LpResult::Optimal { x, value, .. } => {
            let p = d.rows();
            let mut point = vec![Rat::zero(); p];
            for (pos, &j) in s.iter().enumerate() {
                point[j] = x[pos].clone();
            }
            // The stationary value really is the form value at the point.
            assert_eq!(d.quad_form(&point), value, "stationary value mismatch");
            Some(SimplexMin {
                value,
                argmin: point,
            })
        }
        LpResult::Infeasible { .. } => None,
        LpResult::Unbounded { .. } => {
            unreachable!("stationary value is bounded on a compact face")
        }
    }
}

/// Exact global minimum of `t' D t` over `{t >= 0, sum t = 1}`.
pub fn min_quadratic_over_simplex(d: &RatMatrix) -> Result<SimplexMin, CopError> {
    let p = d.rows();
    assert_eq!(p, d.cols(), "square matrix required");
    assert!(d.symmetry_violation().is_none(), "symmetric matrix required");
    if p == 0 {
        return Err(CopError::Dimension("empty matrix".into()));
    }
    ensure_small(p)?;
    let mut best: Option<SimplexMin> = None;
    for mask in 1u32..(1u32 << p) {
        let s = mask_indices(mask, p);
        if let Some(cand) = face_stationary_min(d, &s) {
            let better = match &best {
                None => true,
                Some(b) => cand.value < b.value,
            };
            if better {
                best = Some(cand);
            }
        }
    }
    // Singleton faces are always feasible, so a winner exists.
    let best = best.expect("vertex faces always produce candidates");
    debug_assert!(crate::model::is_simplex_point(&best.argmin));
    Ok(best)
}

/// Decides copositivity with an extremal witness.
pub fn is_copositive(d: &RatMatrix) -> Result<CopositivityCheck, CopError> {
    let min = min_quadratic_over_simplex(d)?;
    Ok(CopositivityCheck {
        copositive: !min.value.is_negative(),
        min,
    })
}

/// Membership of a point in the zero piece with support mask `mask`:
/// the point is supported inside the mask and the rows of `D t` indexed by
/// the mask vanish.
fn in_zero_piece(d: &RatMatrix, mask: u32, t: &[Rat]) -> bool {
    let p = d.rows();
    for j in 0..p {
        if mask & (1 << j) == 0 && !t[j].is_zero() {
            return false;
        }
    }
    let dt = d.mul_vec(t);
    (0..p).all(|i| mask & (1 << i) == 0 || dt[i].is_zero())
}

/// Vertices of `{u >= 0 on s, u = 0 off s, D rows(s) u = 0, sum u = 1}`,
/// found by enumerating support subsets and keeping the uniquely solvable,
/// nonnegative ones.
fn zero_piece_vertices(d: &RatMatrix, mask: u32) -> Vec<Vec<Rat>> {
    let p = d.rows();
    let s = mask_indices(mask, p);
    let mut verts = std::collections::BTreeSet::new();
    let mut sub = mask;
    loop {
        let t_idx = mask_indices(sub, p);
        let rows = s.len() + 1;
        let cols = t_idx.len();
        let mut a = RatMatrix::zeros(rows, cols);
        let mut rhs = vec![Rat::zero(); rows];
        for (r, &i) in s.iter().enumerate() {
            for (c, &j) in t_idx.iter().enumerate() {
                *a.at_mut(r, c) = d.at(i, j).clone();
            }
        }
        for c in 0..cols {
            *a.at_mut(rows - 1, c) = rint(1);
        }
        rhs[rows - 1] = rint(1);
        if let LinearSolution::Solution {
            particular,
            nullspace,
        } = solve_linear(&a, &rhs)
        {
            if nullspace.is_empty() && particular.iter().all(|v| !v.is_negative()) {
                let mut full = vec![Rat::zero(); p];
                for (pos, &j) in t_idx.iter().enumerate() {
                    full[j] = particular[pos].clone();
                }
                verts.insert(full);
            }
        }
        sub = (sub - 1) & mask;
        if sub == 0 {
            break;
        }
    }
    // Descending lexicographic order within the piece.
    verts.into_iter().rev().collect()
}

/// The set of simplex zeros of a copositive quadratic form, as a finite
/// union of polytopes given by vertex lists. Pieces are maximal under
/// inclusion; vertices within a piece and pieces themselves are ordered
/// descending-lexicographically. Empty when the form is strictly positive
/// on the simplex. Panics if the form is not copositive.
pub fn zero_set(d: &RatMatrix) -> Result<Vec<Vec<Vec<Rat>>>, CopError> {
    let min = min_quadratic_over_simplex(d)?;
    assert!(
        !min.value.is_negative(),
        "zero_set requires a copositive matrix"
    );
    if min.value.is_positive() {
        return Ok(Vec::new());
    }
    let p = d.rows();
    let mut pieces: Vec<(u32, Vec<Vec<Rat>>)> = Vec::new();
    for mask in 1u32..(1u32 << p) {
        let verts = zero_piece_vertices(d, mask);
        if !verts.is_empty() {
            pieces.push((mask, verts));
        }
    }
    // Keep pieces maximal under inclusion. Mask size says nothing about
    // polytope size (more vanishing rows can pin a smaller set), so first
    // dedupe by vertex list — equal vertex lists mean equal polytopes — and
    // then drop every piece whose vertices all lie in some other piece.
    let mut uniq: Vec<(u32, Vec<Vec<Rat>>)> = Vec::new();
    for (mask, verts) in pieces {
        if !uniq.iter().any(|(_, v)| *v == verts) {
            uniq.push((mask, verts));
        }
    }
    let mut out: Vec<Vec<Vec<Rat>>> = Vec::new();
    for (i, (_, verts)) in uniq.iter().enumerate() {
        let contained = uniq.iter().enumerate().any(|(j, (mj, _))| {
            j != i && verts.iter().all(|v| in_zero_piece(d, *mj, v))
        });
        if !contained {
            out.push(verts.clone());
        }
    }
    out.sort_by(|a, b| b.cmp(a));
    Ok(out)
}

/// Exact minimum of `t' D t` over the convex hull of the given points,
/// via the pulled-back form on barycentric weights.
pub fn min_quadratic_over_polytope(
    d: &RatMatrix,
    vertices: &[Vec<Rat>],
) -> Result<SimplexMin, CopError> {
    let r = vertices.len();
    if r == 0 {
        return Err(CopError::Dimension("empty vertex list".into()));
    }
    ensure_small(r)?;
    let mut gram = RatMatrix::zeros(r, r);
    let images: Vec<Vec<Rat>> = vertices.iter().map(|v| d.mul_vec(v)).collect();
    for i in 0..r {
        for j in 0..r {
            *gram.at_mut(i, j) = crate::rat::dot(&vertices[i], &images[j]);
        }
    }
    let inner = min_quadratic_over_simplex(&gram)?;
    let p = d.rows();
    let mut point = vec![Rat::zero(); p];
    for (w, v) in inner.argmin.iter().zip(vertices) {
        for (acc, c) in point.iter_mut().zip(v) {
            *acc += w * c;
        }
    }
    assert_eq!(d.quad_form(&point), inner.value, "pullback value mismatch");
    Ok(SimplexMin {
        value: inner.value,
        argmin: point,
    })
}
