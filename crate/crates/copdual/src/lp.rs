//! Exact two-phase simplex for small dense LPs, with certificates.
//!
//! Pivoting follows Bland's rule (lowest eligible index enters; ties in the
//! ratio test break toward the lowest basic index), which guarantees
//! termination and makes every solve deterministic. Free variables are split
//! into differences of two nonnegatives internally. Outcomes carry exact
//! certificates: optimal solutions come with row duals satisfying
//! complementary slackness, infeasible systems with a Farkas vector verified
//! by re-multiplication, unbounded ones with an improving recession ray.

use crate::rat::{dot, Rat};
use num::traits::{Signed, Zero};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Sense {
    Le,
    Eq,
    Ge,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Direction {
    Minimize,
    Maximize,
}

#[derive(Clone, Debug)]
pub struct LinRow {
    pub coeffs: Vec<Rat>,
    pub sense: Sense,
    pub rhs: Rat,
}

/// Per-variable bounds; `None` means unbounded on that side.
#[derive(Clone, Debug, Default)]
pub struct VarBound {
    pub lower: Option<Rat>,
    pub upper: Option<Rat>,
}

impl VarBound {
    pub fn nonneg() -> Self {
        VarBound {
            lower: Some(Rat::zero()),
            upper: None,
        }
    }

    pub fn free() -> Self {
        VarBound {
            lower: None,
            upper: None,
        }
    }

    pub fn range(lower: Rat, upper: Rat) -> Self {
        assert!(lower <= upper, "empty bound range");
        VarBound {
            lower: Some(lower),
            upper: Some(upper),
        }
    }
}

#[derive(Clone, Debug)]
pub struct LpProblem {
    pub direction: Direction,
    pub objective: Vec<Rat>,
    pub rows: Vec<LinRow>,
    pub bounds: Vec<VarBound>,
}

/// Infeasibility certificate. `row_multipliers` f satisfies, over the
/// original rows: f_i >= 0 on `Le` rows, f_i <= 0 on `Ge` rows, and the
/// aggregated row `sum_i f_i a_i` has an infimum over the variable bounds
/// strictly greater than `sum_i f_i b_i` (normalized so the violation is 1).
/// The standardized-system proof is kept alongside and re-verified exactly.
#[derive(Clone, Debug)]
pub struct Farkas {
    pub row_multipliers: Vec<Rat>,
    std_rows: Vec<Vec<Rat>>,
    std_rhs: Vec<Rat>,
    std_y: Vec<Rat>,
}

impl Farkas {
    /// Re-multiplies the standardized proof: y'A <= 0 on every column and
    /// y'b = 1. Both checks are exact.
    pub fn verify(&self) -> bool {
        let m = self.std_rows.len();
        if self.std_y.len() != m {
            return false;
        }
        let ncols = self.std_rows.first().map_or(0, Vec::len);
        for j in 0..ncols {
            let mut acc = Rat::zero();
            for i in 0..m {
                acc += &self.std_y[i] * &self.std_rows[i][j];
            }
            if acc.is_positive() {
                return false;
            }
        }
        let mut rhs = Rat::zero();
        for i in 0..m {
            rhs += &self.std_y[i] * &self.std_rhs[i];
        }
        rhs == Rat::from_integer(1.into())
    }

    /// Checks the combination form against the original problem: sign
    /// conditions per row sense, and the bound infimum of the aggregated
    /// row exceeding the aggregated right-hand side.
    pub fn verify_original(&self, lp: &LpProblem) -> bool {
        let f = &self.row_multipliers;
        if f.len() != lp.rows.len() {
            return false;
        }
        for (fi, row) in f.iter().zip(&lp.rows) {
            match row.sense {
                Sense::Le if fi.is_negative() => return false,
                Sense::Ge if fi.is_positive() => return false,
                _ => {}
            }
        }
        let nvars = lp.bounds.len();
        let mut v = vec![Rat::zero(); nvars];
        let mut fb = Rat::zero();
        for (fi, row) in f.iter().zip(&lp.rows) {
            for (vj, aj) in v.iter_mut().zip(&row.coeffs) {
                *vj += fi * aj;
            }
            fb += fi * &row.rhs;
        }
        let mut inf = Rat::zero();
        for (vj, bound) in v.iter().zip(&lp.bounds) {
            if vj.is_positive() {
                match &bound.lower {
                    Some(l) => inf += vj * l,
                    None => return false,
                }
            } else if vj.is_negative() {
                match &bound.upper {
                    Some(u) => inf += vj * u,
                    None => return false,
                }
            }
        }
        inf > fb
    }
}

#[derive(Clone, Debug)]
pub enum LpResult {
    Optimal {
        x: Vec<Rat>,
        value: Rat,
        /// Per original row. For `Minimize`: >= 0 on `Ge` rows, <= 0 on
        /// `Le` rows; mirrored for `Maximize`. Complementary slackness with
        /// the row slacks holds exactly.
        duals: Vec<Rat>,
    },
    Infeasible {
        farkas: Farkas,
    },
    Unbounded {
        /// Feasible point from which `ray` improves without bound.
        x: Vec<Rat>,
        ray: Vec<Rat>,
    },
}

impl LpResult {
    pub fn value(&self) -> Option<&Rat> {
        match self {
            LpResult::Optimal { value, .. } => Some(value),
            _ => None,
        }
    }
}

#[derive(Clone, Debug)]
enum VarKind {
    // x = shift + s
    Shifted { col: usize, shift: Rat },
    // x = shift - s
    Flipped { col: usize, shift: Rat },
    // x = s_pos - s_neg
    Split { pos: usize, neg: usize },
}

impl LpProblem {
    pub fn new(direction: Direction, objective: Vec<Rat>, bounds: Vec<VarBound>) -> Self {
        assert_eq!(objective.len(), bounds.len(), "objective/bounds mismatch");
        LpProblem {
            direction,
            objective,
            rows: Vec::new(),
            bounds,
        }
    }

    pub fn push_row(&mut self, coeffs: Vec<Rat>, sense: Sense, rhs: Rat) {
        assert_eq!(coeffs.len(), self.bounds.len(), "row width mismatch");
        self.rows.push(LinRow { coeffs, sense, rhs });
    }

    pub fn solve(&self) -> LpResult {
        Tableau::build(self).run()
    }
}

struct Tableau<'a> {
    lp: &'a LpProblem,
    kinds: Vec<VarKind>,
    // row r of the standardized equality system is sign[r] times the
    // transformed row; user rows come first, bound-cap rows after.
    sign: Vec<Rat>,
    n_user: usize,
    n_struct: usize,
    art_base: usize,
    ncols: usize,
    tab: Vec<Vec<Rat>>,
    rhs: Vec<Rat>,
    basis: Vec<usize>,
    allowed: Vec<bool>,
}

enum PivotEnd {
    Optimal,
    Unbounded { entering: usize },
}

impl<'a> Tableau<'a> {
    fn build(lp: &'a LpProblem) -> Self {
        let mut kinds = Vec::with_capacity(lp.bounds.len());
        let mut caps: Vec<(usize, Rat)> = Vec::new();
        let mut ncols = 0usize;
        for b in &lp.bounds {
            match (&b.lower, &b.upper) {
                (Some(l), u) => {
                    if let Some(u) = u {
                        caps.push((ncols, u - l));
                    }
                    kinds.push(VarKind::Shifted {
                        col: ncols,
                        shift: l.clone(),
                    });
                    ncols += 1;
                }
                (None, Some(u)) => {
                    kinds.push(VarKind::Flipped {
                        col: ncols,
                        shift: u.clone(),
                    });
                    ncols += 1;
                }
                (None, None) => {
                    kinds.push(VarKind::Split {
                        pos: ncols,
                        neg: ncols + 1,
                    });
                    ncols += 2;
                }
            }
        }
        let nvar_cols = ncols;
        let mut std_rows: Vec<(Vec<Rat>, Sense, Rat)> = Vec::new();
        for row in &lp.rows {
            let mut coeffs = vec![Rat::zero(); nvar_cols];
            let mut rhs = row.rhs.clone();
            for (c, kind) in row.coeffs.iter().zip(&kinds) {
                if c.is_zero() {
                    continue;
                }
                match kind {
                    VarKind::Shifted { col, shift } => {
                        coeffs[*col] += c;
                        rhs -= c * shift;
                    }
                    VarKind::Flipped { col, shift } => {
                        coeffs[*col] -= c;
                        rhs -= c * shift;
                    }
                    VarKind::Split { pos, neg } => {
                        coeffs[*pos] += c;
                        coeffs[*neg] -= c;
                    }
                }
            }
            std_rows.push((coeffs, row.sense, rhs));
        }
        let n_user = std_rows.len();
        for (col, cap) in caps {
            let mut coeffs = vec![Rat::zero(); nvar_cols];
            coeffs[col] = Rat::from_integer(1.into());
            std_rows.push((coeffs, Sense::Le, cap));
        }
        let m = std_rows.len();
        let n_slack = std_rows
            .iter()
            .filter(|(_, s, _)| *s != Sense::Eq)
            .count();
        let n_struct = nvar_cols + n_slack;
        let art_base = n_struct;
        let ncols_total = n_struct + m;
        let mut tab = vec![vec![Rat::zero(); ncols_total]; m];
        let mut rhs_col = vec![Rat::zero(); m];
        let mut sign = vec![Rat::from_integer(1.into()); m];
        let mut slack_at = nvar_cols;
        for (r, (coeffs, sense, rhs)) in std_rows.into_iter().enumerate() {
            tab[r][..nvar_cols].clone_from_slice(&coeffs);
            match sense {
                Sense::Le => {
                    tab[r][slack_at] = Rat::from_integer(1.into());
                    slack_at += 1;
                }
                Sense::Ge => {
                    tab[r][slack_at] = Rat::from_integer((-1).into());
                    slack_at += 1;
                }
                Sense::Eq => {}
            }
            rhs_col[r] = rhs;
            if rhs_col[r].is_negative() {
                sign[r] = Rat::from_integer((-1).into());
                for v in tab[r].iter_mut() {
                    *v = -v.clone();
                }
                rhs_col[r] = -rhs_col[r].clone();
            }
            tab[r][art_base + r] = Rat::from_integer(1.into());
        }
        let basis: Vec<usize> = (0..m).map(|r| art_base + r).collect();
        let allowed = vec![true; ncols_total];
        Tableau {
            lp,
            kinds,
            sign,
            n_user,
            n_struct,
            art_base,
            ncols: ncols_total,
            tab,
            rhs: rhs_col,
            basis,
            allowed,
        }
    }

    fn multipliers(&self, costs: &[Rat]) -> Vec<Rat> {
        let m = self.basis.len();
        (0..m)
            .map(|i| {
                let mut pi = Rat::zero();
                for (r, &b) in self.basis.iter().enumerate() {
                    if !costs[b].is_zero() {
                        pi += &costs[b] * &self.tab[r][self.art_base + i];
                    }
                }
                pi
            })
            .collect()
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let inv = self.tab[row][col].clone();
        for v in self.tab[row].iter_mut() {
            *v /= &inv;
        }
        self.rhs[row] /= &inv;
        for r in 0..self.tab.len() {
            if r == row || self.tab[r][col].is_zero() {
                continue;
            }
            let f = self.tab[r][col].clone();
            for j in 0..self.ncols {
                if !self.tab[row][j].is_zero() {
                    let sub = &f * &self.tab[row][j];
                    self.tab[r][j] -= sub;
                }
            }
            let sub = &f * &self.rhs[row];
            self.rhs[r] -= sub;
        }
        self.basis[row] = col;
    }

    /// Bland's rule primal simplex, minimizing `costs`.
    fn iterate(&mut self, costs: &[Rat]) -> PivotEnd {
        let m = self.basis.len();
        loop {
            // Reduced cost from the current tableau: tab column j holds
            // B^-1 a_j, so rc_j = c_j - c_B' (B^-1 a_j).
            let cb: Vec<Rat> = self.basis.iter().map(|&b| costs[b].clone()).collect();
            let mut is_basic = vec![false; self.ncols];
            for &b in &self.basis {
                is_basic[b] = true;
            }
            let mut entering = None;
            for j in 0..self.ncols {
                if !self.allowed[j] || is_basic[j] {
                    continue;
                }
                let mut rc = costs[j].clone();
                for i in 0..m {
                    if !cb[i].is_zero() && !self.tab[i][j].is_zero() {
                        rc -= &cb[i] * &self.tab[i][j];
                    }
                }
                if rc.is_negative() {
                    entering = Some(j);
                    break;
                }
            }
            let Some(e) = entering else {
                return PivotEnd::Optimal;
            };
            let mut leave: Option<(usize, Rat)> = None;
            for i in 0..m {
                if self.tab[i][e].is_positive() {
                    let ratio = &self.rhs[i] / &self.tab[i][e];
                    let better = match &leave {
                        None => true,
                        Some((li, best)) => {
                            ratio < *best || (ratio == *best && self.basis[i] < self.basis[*li])
                        }
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            match leave {
                Some((i, _)) => self.pivot(i, e),
                None => return PivotEnd::Unbounded { entering: e },
            }
        }
    }

    fn min_costs(&self) -> Vec<Rat> {
        let mut costs = vec![Rat::zero(); self.ncols];
        let negate = self.lp.direction == Direction::Maximize;
        for (c, kind) in self.lp.objective.iter().zip(&self.kinds) {
            let c = if negate { -c.clone() } else { c.clone() };
            match kind {
                VarKind::Shifted { col, .. } => costs[*col] = c,
                VarKind::Flipped { col, .. } => costs[*col] = -c,
                VarKind::Split { pos, neg } => {
                    costs[*pos] = c.clone();
                    costs[*neg] = -c;
                }
            }
        }
        costs
    }

    fn x_original(&self) -> Vec<Rat> {
        let mut x_std = vec![Rat::zero(); self.ncols];
        for (r, &b) in self.basis.iter().enumerate() {
            x_std[b] = self.rhs[r].clone();
        }
        self.kinds
            .iter()
            .map(|kind| match kind {
                VarKind::Shifted { col, shift } => shift + &x_std[*col],
                VarKind::Flipped { col, shift } => shift - &x_std[*col],
                VarKind::Split { pos, neg } => &x_std[*pos] - &x_std[*neg],
            })
            .collect()
    }

    fn run(mut self) -> LpResult {
        let m = self.basis.len();
        let mut phase1 = vec![Rat::zero(); self.ncols];
        for r in 0..m {
            phase1[self.art_base + r] = Rat::from_integer(1.into());
        }
        match self.iterate(&phase1) {
            PivotEnd::Optimal => {}
            PivotEnd::Unbounded { .. } => unreachable!("phase 1 is bounded below"),
        }
        let p1_value: Rat = (0..m)
            .map(|r| &phase1[self.basis[r]] * &self.rhs[r])
            .fold(Rat::zero(), |a, b| a + b);
        if p1_value.is_positive() {
            return self.infeasible(&phase1, &p1_value);
        }
        // Drive basic artificials out on zero rows; rows that cannot pivot
        // are redundant and stay as inert 0 = 0 identities.
        for r in 0..m {
            if self.basis[r] >= self.art_base {
                let col = (0..self.n_struct).find(|&j| !self.tab[r][j].is_zero());
                if let Some(j) = col {
                    self.pivot(r, j);
                }
            }
        }
        for j in self.art_base..self.ncols {
            self.allowed[j] = false;
        }
        let costs = self.min_costs();
        match self.iterate(&costs) {
            PivotEnd::Optimal => self.optimal(&costs),
            PivotEnd::Unbounded { entering } => self.unbounded(entering),
        }
    }

    fn infeasible(&self, phase1: &[Rat], p1_value: &Rat) -> LpResult {
        let pi = self.multipliers(phase1);
        // At the phase 1 optimum, pi'b equals the optimal value.
        let violation = p1_value.clone();
        assert!(violation.is_positive(), "phase 1 value must be positive");
        // Reconstruct the standardized equality system (without artificial
        // columns) for the certificate: undo the current tableau by storing
        // the original std rows instead. The tableau was mutated, so rebuild.
        let fresh = Tableau::build(self.lp);
        let std_rows: Vec<Vec<Rat>> = fresh
            .tab
            .iter()
            .map(|row| row[..fresh.n_struct].to_vec())
            .collect();
        let std_rhs = fresh.rhs.clone();
        let y: Vec<Rat> = pi.iter().map(|p| p / &violation).collect();
        let row_multipliers: Vec<Rat> = (0..self.n_user)
            .map(|r| -(&y[r] * &self.sign[r]))
            .collect();
        let farkas = Farkas {
            row_multipliers,
            std_rows,
            std_rhs,
            std_y: y,
        };
        assert!(farkas.verify(), "Farkas certificate failed re-multiplication");
        LpResult::Infeasible { farkas }
    }

    fn optimal(&self, costs: &[Rat]) -> LpResult {
        let x = self.x_original();
        for (xj, b) in x.iter().zip(&self.lp.bounds) {
            if let Some(l) = &b.lower {
                assert!(xj >= l, "bound violated at optimum");
            }
            if let Some(u) = &b.upper {
                assert!(xj <= u, "bound violated at optimum");
            }
        }
        let value = dot(&self.lp.objective, &x);
        let pi = self.multipliers(costs);
        let negate = self.lp.direction == Direction::Maximize;
        let mut duals = Vec::with_capacity(self.n_user);
        for r in 0..self.n_user {
            let mut y = &pi[r] * &self.sign[r];
            if negate {
                y = -y;
            }
            duals.push(y);
        }
        for (r, row) in self.lp.rows.iter().enumerate() {
            let slack = dot(&row.coeffs, &x) - &row.rhs;
            assert!(
                (&duals[r] * &slack).is_zero(),
                "complementary slackness violated"
            );
            assert!(slack_sign_ok(row.sense, &slack), "row violated at optimum");
        }
        LpResult::Optimal { x, value, duals }
    }

    fn unbounded(&self, entering: usize) -> LpResult {
        let m = self.basis.len();
        let mut d_std = vec![Rat::zero(); self.ncols];
        d_std[entering] = Rat::from_integer(1.into());
        for i in 0..m {
            d_std[self.basis[i]] = -self.tab[i][entering].clone();
        }
        let ray: Vec<Rat> = self
            .kinds
            .iter()
            .map(|kind| match kind {
                VarKind::Shifted { col, .. } => d_std[*col].clone(),
                VarKind::Flipped { col, .. } => -d_std[*col].clone(),
                VarKind::Split { pos, neg } => &d_std[*pos] - &d_std[*neg],
            })
            .collect();
        let improv = dot(&self.lp.objective, &ray);
        match self.lp.direction {
            Direction::Minimize => assert!(improv.is_negative(), "ray does not improve"),
            Direction::Maximize => assert!(improv.is_positive(), "ray does not improve"),
        }
        for row in &self.lp.rows {
            let a = dot(&row.coeffs, &ray);
            let ok = match row.sense {
                Sense::Le => !a.is_positive(),
                Sense::Eq => a.is_zero(),
                Sense::Ge => !a.is_negative(),
            };
            assert!(ok, "ray leaves the feasible cone");
        }
        for (dj, b) in ray.iter().zip(&self.lp.bounds) {
            if b.lower.is_some() {
                assert!(!dj.is_negative(), "ray violates lower bound recession");
            }
            if b.upper.is_some() {
                assert!(!dj.is_positive(), "ray violates upper bound recession");
            }
        }
        LpResult::Unbounded {
            x: self.x_original(),
            ray,
        }
    }
}

fn slack_sign_ok(sense: Sense, slack: &Rat) -> bool {
    match sense {
        Sense::Le => !slack.is_positive(),
        Sense::Eq => slack.is_zero(),
        Sense::Ge => !slack.is_negative(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{rat, rint};

    fn nonneg(n: usize) -> Vec<VarBound> {
        vec![VarBound::nonneg(); n]
    }

    #[test]
    fn simple_max_picks_first_vertex() {
        let mut lp = LpProblem::new(
            Direction::Maximize,
            vec![rint(1), rint(1)],
            nonneg(2),
        );
        lp.push_row(vec![rint(1), rint(1)], Sense::Le, rint(1));
        match lp.solve() {
            LpResult::Optimal { x, value, .. } => {
                assert_eq!(value, rint(1));
                assert_eq!(x, vec![rint(1), rint(0)]);
            }
            _ => panic!("expected optimum"),
        }
    }

    #[test]
    fn contradictory_equalities_farkas() {
        let mut lp = LpProblem::new(Direction::Minimize, vec![rint(0)], vec![VarBound::free()]);
        lp.push_row(vec![rint(1)], Sense::Eq, rint(1));
        lp.push_row(vec![rint(1)], Sense::Eq, rint(2));
        match lp.solve() {
            LpResult::Infeasible { farkas } => {
                assert!(farkas.verify());
                assert!(farkas.verify_original(&lp));
                assert_eq!(farkas.row_multipliers, vec![rint(1), rint(-1)]);
            }
            _ => panic!("expected infeasible"),
        }
    }

    #[test]
    fn unbounded_with_ray() {
        // Objective and row data match the index-set LP of the first bundled
        // fixture: maximize -x2 subject to -x2 >= 0 over free variables.
        let mut lp = LpProblem::new(
            Direction::Maximize,
            vec![rint(0), rint(-1)],
            vec![VarBound::free(), VarBound::free()],
        );
        lp.push_row(vec![rint(0), rint(0)], Sense::Ge, rint(0));
        lp.push_row(vec![rint(0), rint(-1)], Sense::Ge, rint(0));
        lp.push_row(vec![rint(0), rint(0)], Sense::Ge, rint(0));
        match lp.solve() {
            LpResult::Unbounded { ray, .. } => {
                assert_eq!(ray, vec![rint(0), rint(-1)]);
            }
            _ => panic!("expected unbounded"),
        }
    }

    #[test]
    fn equality_with_negative_rhs() {
        let mut lp = LpProblem::new(Direction::Minimize, vec![rint(1)], vec![VarBound::free()]);
        lp.push_row(vec![rint(2)], Sense::Eq, rint(-3));
        match lp.solve() {
            LpResult::Optimal { x, value, .. } => {
                assert_eq!(x, vec![rat(-3, 2)]);
                assert_eq!(value, rat(-3, 2));
            }
            _ => panic!("expected optimum"),
        }
    }

    #[test]
    fn upper_bounds_respected() {
        let mut lp = LpProblem::new(
            Direction::Maximize,
            vec![rint(1), rint(2)],
            vec![
                VarBound::range(rint(0), rint(3)),
                VarBound::range(rint(-1), rint(1)),
            ],
        );
        lp.push_row(vec![rint(1), rint(1)], Sense::Le, rint(3));
        match lp.solve() {
            LpResult::Optimal { x, value, .. } => {
                assert_eq!(x, vec![rint(2), rint(1)]);
                assert_eq!(value, rint(4));
            }
            _ => panic!("expected optimum"),
        }
    }

    #[test]
    fn degenerate_redundant_rows() {
        let mut lp = LpProblem::new(Direction::Minimize, vec![rint(1), rint(1)], nonneg(2));
        lp.push_row(vec![rint(1), rint(1)], Sense::Eq, rint(2));
        lp.push_row(vec![rint(2), rint(2)], Sense::Eq, rint(4));
        match lp.solve() {
            LpResult::Optimal { value, .. } => assert_eq!(value, rint(2)),
            _ => panic!("expected optimum"),
        }
    }

    #[test]
    fn duals_satisfy_strong_duality_on_standard_form() {
        // min x1 + 2 x2 s.t. x1 + x2 >= 2, x2 >= 1, x >= 0. Optimum at (1,1).
        let mut lp = LpProblem::new(Direction::Minimize, vec![rint(1), rint(2)], nonneg(2));
        lp.push_row(vec![rint(1), rint(1)], Sense::Ge, rint(2));
        lp.push_row(vec![rint(0), rint(1)], Sense::Ge, rint(1));
        match lp.solve() {
            LpResult::Optimal { x, value, duals } => {
                assert_eq!(x, vec![rint(1), rint(1)]);
                assert_eq!(value, rint(3));
                assert!(!duals[0].is_negative() && !duals[1].is_negative());
                // y'b = value for this bound-free-at-optimum instance.
                assert_eq!(&duals[0] * rint(2) + &duals[1] * rint(1), rint(3));
            }
            _ => panic!("expected optimum"),
        }
    }

    #[test]
    fn infeasible_from_bounds() {
        let mut lp = LpProblem::new(Direction::Minimize, vec![rint(0)], nonneg(1));
        lp.push_row(vec![rint(1)], Sense::Le, rint(-1));
        match lp.solve() {
            LpResult::Infeasible { farkas } => assert!(farkas.verify()),
            _ => panic!("expected infeasible"),
        }
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn small_rat() -> impl Strategy<Value = Rat> {
            (-4i64..5, 1i64..4).prop_map(|(n, d)| rat(n, d))
        }

        fn lp_instance() -> impl Strategy<Value = LpProblem> {
            let nvars = 3usize;
            let row = (
                proptest::collection::vec(small_rat(), nvars),
                prop_oneof![Just(Sense::Le), Just(Sense::Eq), Just(Sense::Ge)],
                small_rat(),
            );
            (
                proptest::collection::vec(small_rat(), nvars),
                proptest::collection::vec(row, 1..4),
                proptest::bool::ANY,
            )
                .prop_map(move |(obj, rows, maximize)| {
                    let direction = if maximize {
                        Direction::Maximize
                    } else {
                        Direction::Minimize
                    };
                    let mut bounds = vec![VarBound::nonneg(); nvars];
                    bounds[2] = VarBound::range(rint(0), rint(3));
                    let mut lp = LpProblem::new(direction, obj, bounds);
                    for (coeffs, sense, rhs) in rows {
                        lp.push_row(coeffs, sense, rhs);
                    }
                    lp
                })
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]
            #[test]
            fn outcomes_carry_exact_certificates(lp in lp_instance()) {
                match lp.solve() {
                    LpResult::Optimal { x, value, duals } => {
                        // Feasibility, objective value and complementary
                        // slackness re-checked exactly.
                        prop_assert_eq!(dot(&lp.objective, &x), value);
                        for (row, y) in lp.rows.iter().zip(&duals) {
                            let slack = dot(&row.coeffs, &x) - &row.rhs;
                            prop_assert!(slack_sign_ok(row.sense, &slack));
                            prop_assert!((y * &slack).is_zero());
                        }
                    }
                    LpResult::Infeasible { farkas } => {
                        prop_assert!(farkas.verify());
                    }
                    LpResult::Unbounded { x, ray } => {
                        for row in &lp.rows {
                            let slack = dot(&row.coeffs, &x) - &row.rhs;
                            prop_assert!(slack_sign_ok(row.sense, &slack));
                            let rec = dot(&row.coeffs, &ray);
                            let ok = match row.sense {
                                Sense::Le => !rec.is_positive(),
                                Sense::Eq => rec.is_zero(),
                                Sense::Ge => !rec.is_negative(),
                            };
                            prop_assert!(ok);
                        }
                        let improv = dot(&lp.objective, &ray);
                        match lp.direction {
                            Direction::Minimize => prop_assert!(improv.is_negative()),
                            Direction::Maximize => prop_assert!(improv.is_positive()),
                        }
                    }
                }
            }
        }
    }
}
