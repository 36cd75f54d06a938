//! Immobile-set machinery: the cutting-plane engine over the copositivity
//! constraint, immobility certificates for simplex points, discovery and
//! exact verification of the immobile set, index sets M/N*/N, minimally
//! active solutions, and restricted variants.
//!
//! The immobile set of a system is `T_im = {t in T : t' A(x) t = 0 for all
//! feasible x}`. The engine discovers a candidate as the zero set of `A(x)`
//! at a maximum-margin feasible point, then verifies it exactly:
//!
//! * a piece (polytope of zeros of one `A(x)`) lies inside `T_im` as soon as
//!   its vertices and barycenter are immobile — for fixed feasible `x` the
//!   pulled-back Gram matrix of the piece has nonnegative off-diagonal
//!   entries (midpoint values), zero diagonal (vertices), and zero total sum
//!   (barycenter), hence vanishes identically;
//! * conversely the zero set of any single feasible point contains `T_im`,
//!   so a minimally active solution whose zero set equals the candidate
//!   proves the reverse inclusion.
//!
//! Both directions are exact rational computations; when either fails within
//! budget the structure is honestly labeled a candidate.

use crate::copositive::{min_quadratic_over_simplex, zero_set};
use crate::lp::{Direction, LpProblem, LpResult, Sense, VarBound};
use crate::model::{is_simplex_point, CopSystem};
use crate::rat::{dot, rat, rint, Rat};
use crate::CopError;
use num::traits::{Signed, Zero};

/// Tuning knobs for the cutting-plane engine.
#[derive(Debug, Clone)]
pub struct EngineConfig {
    /// Denominator of the first discretization grid.
    pub grid_start: u64,
    /// Maximum refinement / box-doubling rounds.
    pub max_rounds: usize,
    /// Box half-width for decision variables in cutting-plane subproblems.
    pub box_bound: i64,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            grid_start: 8,
            max_rounds: 6,
            box_bound: 1_000_000,
        }
    }
}

/// Deterministic work counters, for reports.
#[derive(Debug, Clone, Default)]
pub struct Budget {
    pub lp_solves: u64,
    pub copositivity_checks: u64,
    pub cuts_added: u64,
}

impl Budget {
    fn absorb(&mut self, other: &Budget) {
        self.lp_solves += other.lp_solves;
        self.copositivity_checks += other.copositivity_checks;
        self.cuts_added += other.cuts_added;
    }
}

const CUT_ITERATION_LIMIT: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SipStatus {
    Optimal,
    Infeasible,
    /// The optimum kept landing on the variable box even after doubling it;
    /// the reported point is feasible and the value is a bound only.
    Unbounded,
    BudgetExhausted,
}

#[derive(Debug, Clone)]
pub struct SipOutcome {
    pub status: SipStatus,
    pub value: Option<Rat>,
    pub x: Option<Vec<Rat>>,
}

/// Linear side constraints on the decision variables, `coeffs · x <sense> rhs`.
pub type ExtraRow = (Vec<Rat>, Sense, Rat);

/// Verdict of an immobility probe for one simplex point.
#[derive(Debug, Clone)]
pub enum ImmobilityProbe {
    Immobile,
    /// A feasible point where the form is strictly positive at the probe.
    Mobile { x: Vec<Rat>, value: Rat },
    Undecided,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ImmobileStatus {
    /// Both inclusions proven exactly.
    VerifiedExact,
    /// Best candidate within budget; downstream verdicts carry the caveat.
    Candidate,
    /// Slater point certified: the immobile set is empty.
    Empty,
}

/// A minimally active feasible solution: zero exactly on the immobile rows,
/// strictly positive on everything else that was checked.
#[derive(Debug, Clone)]
pub struct MinActiveSolution {
    pub x: Vec<Rat>,
    /// Optimal margin of the separation program (strictly positive when the
    /// solution verifies).
    pub margin: Rat,
    /// Exact minimum of the form over the off-immobile sample points.
    pub omega_min: Option<Rat>,
    /// Exact row values `e_k' A(x) tau(j)` for every `k` outside `M(j)`.
    pub strict_rows: Vec<(usize, usize, Rat)>,
    /// The zero set of `A(x)` coincides with the candidate pieces — the
    /// reverse inclusion certificate.
    pub zero_set_matches: bool,
}

/// The immobile set as a finite union of polytopes with derived structure.
#[derive(Debug, Clone)]
pub struct ImmobileStructure {
    pub status: ImmobileStatus,
    /// Convex pieces, each a vertex list (descending-lexicographic order).
    pub pieces: Vec<Vec<Vec<Rat>>>,
    /// Deduplicated vertices across pieces, descending-lexicographic; the
    /// position is the vertex number used everywhere else.
    pub vertices: Vec<Vec<Rat>>,
    /// Vertex numbers of each connected group of pieces.
    pub groups: Vec<Vec<usize>>,
    /// Same-group vertex pairs `(l, q)`, `l <= q`, diagonal included.
    pub pairs: Vec<(usize, usize)>,
    /// Smallest positive vertex coordinate.
    pub sigma: Option<Rat>,
    /// An exactly feasible point found during discovery.
    pub feasible_point: Option<Vec<Rat>>,
    /// When status is Empty: a feasible x with the strictly positive
    /// simplex minimum of its matrix.
    pub slater_certificate: Option<(Vec<Rat>, Rat)>,
    pub min_active: Option<MinActiveSolution>,
    pub notes: Vec<String>,
    pub budget: Budget,
}

impl ImmobileStructure {
    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }
}

/// Index sets per vertex: rows forced to zero on the outer polyhedral
/// relaxation (`m`), rows that vanish somewhere on the feasible set
/// (`n_star`), and their difference (`n`).
#[derive(Debug, Clone)]
pub struct IndexSets {
    pub m: Vec<Vec<usize>>,
    pub n_star: Vec<Vec<usize>>,
    pub n: Vec<Vec<usize>>,
    /// Feasible witnesses attaining zero for rows in `n_star`, keyed (j, k).
    pub witnesses: Vec<(usize, usize, Vec<Rat>)>,
    /// Probes that exhausted their budget, keyed (j, k).
    pub undecided: Vec<(usize, usize)>,
}

// ---------------------------------------------------------------------------
// Small geometry helpers
// ---------------------------------------------------------------------------

/// All points of the simplex with denominator `denom`, first coordinate
/// descending.
pub fn simplex_grid(p: usize, denom: u64) -> Vec<Vec<Rat>> {
    fn rec(p: usize, denom: u64, coord: usize, left: u64, cur: &mut Vec<u64>, out: &mut Vec<Vec<Rat>>) {
        if coord + 1 == p {
            cur[coord] = left;
            out.push(
                cur.iter()
                    .map(|&k| rat(k as i64, denom as i64))
                    .collect(),
            );
            return;
        }
        for v in (0..=left).rev() {
            cur[coord] = v;
            rec(p, denom, coord + 1, left - v, cur, out);
        }
    }
    let mut out = Vec::new();
    let mut cur = vec![0u64; p];
    rec(p, denom, 0, denom, &mut cur, &mut out);
    out
}

/// Vertices, edge midpoints and the barycenter of the simplex.
fn probe_sample(p: usize) -> Vec<Vec<Rat>> {
    let mut out = Vec::new();
    for k in 0..p {
        out.push(crate::model::unit_vertex(p, k));
    }
    for i in 0..p {
        for j in (i + 1)..p {
            let mut v = vec![Rat::zero(); p];
            v[i] = rat(1, 2);
            v[j] = rat(1, 2);
            out.push(v);
        }
    }
    out.push(vec![rat(1, p as i64); p]);
    out
}

fn barycenter(verts: &[Vec<Rat>]) -> Vec<Rat> {
    let p = verts[0].len();
    let w = rat(1, verts.len() as i64);
    let mut out = vec![Rat::zero(); p];
    for v in verts {
        for (acc, c) in out.iter_mut().zip(v) {
            *acc += &w * c;
        }
    }
    out
}

/// Exact l1 distance from `t` to the convex hull of `verts`.
pub fn l1_distance_to_hull(t: &[Rat], verts: &[Vec<Rat>]) -> Rat {
    let p = t.len();
    let r = verts.len();
    // Variables: lambda_0..lambda_{r-1} >= 0, s_0..s_{p-1} >= 0.
    let nv = r + p;
    let mut lp = LpProblem::new(
        Direction::Minimize,
        (0..nv)
            .map(|i| if i < r { Rat::zero() } else { rint(1) })
            .collect(),
        vec![VarBound::nonneg(); nv],
    );
    let mut ones = vec![Rat::zero(); nv];
    for c in ones.iter_mut().take(r) {
        *c = rint(1);
    }
    lp.push_row(ones, Sense::Eq, rint(1));
    for i in 0..p {
        // sum_j lambda_j v_j[i] - s_i <= t_i  and  >= t_i - 2 s_i is split as
        // two rows around the absolute value.
        let mut row1 = vec![Rat::zero(); nv];
        let mut row2 = vec![Rat::zero(); nv];
        for (j, v) in verts.iter().enumerate() {
            row1[j] = v[i].clone();
            row2[j] = -v[i].clone();
        }
        row1[r + i] = rint(-1);
        row2[r + i] = rint(-1);
        lp.push_row(row1, Sense::Le, t[i].clone());
        lp.push_row(row2, Sense::Le, -t[i].clone());
    }
    match lp.solve() {
        LpResult::Optimal { value, .. } => value,
        _ => unreachable!("distance program is feasible and bounded"),
    }
}

fn canonical_pieces(mut pieces: Vec<Vec<Vec<Rat>>>) -> Vec<Vec<Vec<Rat>>> {
    for piece in pieces.iter_mut() {
        piece.sort_by(|a, b| b.cmp(a));
        piece.dedup();
    }
    pieces.sort_by(|a, b| b.cmp(a));
    pieces.dedup();
    pieces
}

// ---------------------------------------------------------------------------
// Cutting-plane engine
// ---------------------------------------------------------------------------

/// Shared state of one semi-infinite subproblem: accumulated cut points,
/// extra linear rows, and the adaptive variable box.
struct Sip<'a> {
    sys: &'a CopSystem,
    cfg: &'a EngineConfig,
    extras: Vec<ExtraRow>,
    cuts: Vec<Vec<Rat>>,
    /// Rows `A(x) t >= 0` for points `t` where the form vanishes identically
    /// in `x`. Such points are zeros of every feasible matrix, so these rows
    /// are exact valid cuts — and the only way a cutting-plane loop can pin
    /// constraints that plain point cuts approach only asymptotically.
    valid_rows: Vec<ExtraRow>,
    harvested: std::collections::BTreeSet<Vec<Rat>>,
    bound: Rat,
    budget: Budget,
}

impl<'a> Sip<'a> {
    fn new(sys: &'a CopSystem, cfg: &'a EngineConfig, extras: Vec<ExtraRow>) -> Self {
        let mut sip = Sip {
            sys,
            cfg,
            extras,
            cuts: Vec::new(),
            valid_rows: Vec::new(),
            harvested: std::collections::BTreeSet::new(),
            bound: rint(cfg.box_bound),
            budget: Budget::default(),
        };
        for k in 0..sys.p {
            sip.try_harvest(&crate::model::unit_vertex(sys.p, k));
        }
        sip
    }

    /// If the form vanishes identically in `x` at `t`, add the row cuts
    /// `A(x) t >= 0`. Returns whether anything new was added.
    fn try_harvest(&mut self, t: &[Rat]) -> bool {
        if !self.sys.lifted_quad(t).iter().all(|v| v.is_zero()) {
            return false;
        }
        if !self.harvested.insert(t.to_vec()) {
            return false;
        }
        for i in 0..self.sys.p {
            let lifted = self.sys.lifted_row(i, t);
            self.valid_rows
                .push((lifted[1..].to_vec(), Sense::Ge, -lifted[0].clone()));
        }
        true
    }

    /// Feasibility row of one cut point `t`: `t' A(x) t >= 0` as a linear
    /// row over `x` padded to `nv` variables.
    fn cut_row(&self, t: &[Rat], nv: usize) -> (Vec<Rat>, Rat) {
        let lifted = self.sys.lifted_quad(t);
        let mut coeffs = vec![Rat::zero(); nv];
        coeffs[..self.sys.n].clone_from_slice(&lifted[1..]);
        (coeffs, -lifted[0].clone())
    }

    fn push_feasibility_rows(&self, lp: &mut LpProblem, nv: usize) {
        for t in &self.cuts {
            let (coeffs, rhs) = self.cut_row(t, nv);
            lp.push_row(coeffs, Sense::Ge, rhs);
        }
        for (coeffs, sense, rhs) in self.extras.iter().chain(&self.valid_rows) {
            let mut padded = vec![Rat::zero(); nv];
            padded[..self.sys.n].clone_from_slice(coeffs);
            lp.push_row(padded, *sense, rhs.clone());
        }
    }

    fn x_bounds(&self) -> Vec<VarBound> {
        vec![VarBound::range(-self.bound.clone(), self.bound.clone()); self.sys.n]
    }

    fn on_boundary(&self, x: &[Rat]) -> bool {
        x.iter().any(|v| v.abs() == self.bound)
    }

    /// l1-smallest `x` among the optima of `direction/cost` over the current
    /// relaxation. Keeps iterates deterministic and off the box.
    fn tiebreak(&mut self, direction: Direction, cost: &[Rat], value: &Rat) -> Vec<Rat> {
        let n = self.sys.n;
        let nv = 2 * n;
        let mut objective = vec![Rat::zero(); nv];
        for c in objective.iter_mut().skip(n) {
            *c = rint(1);
        }
        let mut bounds = self.x_bounds();
        bounds.extend(vec![VarBound::nonneg(); n]);
        let mut lp = LpProblem::new(Direction::Minimize, objective, bounds);
        self.push_feasibility_rows(&mut lp, nv);
        let mut pin = vec![Rat::zero(); nv];
        pin[..n].clone_from_slice(cost);
        lp.push_row(pin, Sense::Eq, value.clone());
        for i in 0..n {
            let mut up = vec![Rat::zero(); nv];
            up[i] = rint(1);
            up[n + i] = rint(-1);
            lp.push_row(up, Sense::Le, Rat::zero());
            let mut dn = vec![Rat::zero(); nv];
            dn[i] = rint(-1);
            dn[n + i] = rint(-1);
            lp.push_row(dn, Sense::Le, Rat::zero());
        }
        self.budget.lp_solves += 1;
        match lp.solve() {
            LpResult::Optimal { x, .. } => {
                let xr = x[..n].to_vec();
                assert_eq!(&dot(cost, &xr), value, "tiebreak drifted off the optimum");
                let _ = direction;
                xr
            }
            _ => unreachable!("tiebreak program inherits a feasible point"),
        }
    }

    /// Cutting-plane optimization of `cost` over the copositivity-feasible
    /// set intersected with the extras and the box.
    fn optimize(&mut self, direction: Direction, cost: &[Rat]) -> Result<SipOutcome, CopError> {
        let n = self.sys.n;
        let mut doublings = 0usize;
        for _ in 0..CUT_ITERATION_LIMIT {
            let mut lp = LpProblem::new(direction, cost.to_vec(), self.x_bounds());
            self.push_feasibility_rows(&mut lp, n);
            self.budget.lp_solves += 1;
            match lp.solve() {
                LpResult::Infeasible { .. } => {
                    return Ok(SipOutcome {
                        status: SipStatus::Infeasible,
                        value: None,
                        x: None,
                    })
                }
                LpResult::Unbounded { .. } => {
                    unreachable!("box bounds keep every subproblem bounded")
                }
                LpResult::Optimal { value, .. } => {
                    let xt = self.tiebreak(direction, cost, &value);
                    self.budget.copositivity_checks += 1;
                    let chk = min_quadratic_over_simplex(&self.sys.eval(&xt))?;
                    if chk.value.is_negative() {
                        self.cuts.push(chk.argmin);
                        self.budget.cuts_added += 1;
                        continue;
                    }
                    if chk.value.is_zero() {
                        // Harvest identically vanishing zeros of this
                        // feasible iterate; new valid rows re-tighten the
                        // relaxation, so re-solve.
                        let mut tightened = false;
                        for piece in zero_set(&self.sys.eval(&xt))? {
                            for v in &piece {
                                tightened |= self.try_harvest(v);
                            }
                        }
                        if tightened {
                            continue;
                        }
                    }
                    if self.on_boundary(&xt) {
                        if doublings >= self.cfg.max_rounds {
                            return Ok(SipOutcome {
                                status: SipStatus::Unbounded,
                                value: Some(value),
                                x: Some(xt),
                            });
                        }
                        self.bound = &self.bound * rint(2);
                        doublings += 1;
                        continue;
                    }
                    return Ok(SipOutcome {
                        status: SipStatus::Optimal,
                        value: Some(value),
                        x: Some(xt),
                    });
                }
            }
        }
        Ok(SipOutcome {
            status: SipStatus::BudgetExhausted,
            value: None,
            x: None,
        })
    }
}

/// Optimize a linear cost over the copositivity-feasible set (optionally cut
/// by extra linear rows) with the cutting-plane engine.
pub fn sip_optimize(
    sys: &CopSystem,
    direction: Direction,
    cost: &[Rat],
    extras: Vec<ExtraRow>,
    cfg: &EngineConfig,
) -> Result<SipOutcome, CopError> {
    Sip::new(sys, cfg, extras).optimize(direction, cost)
}

// ---------------------------------------------------------------------------
// Immobility probes
// ---------------------------------------------------------------------------

fn is_immobile_point_with(
    sys: &CopSystem,
    extras: &[ExtraRow],
    t: &[Rat],
    cfg: &EngineConfig,
    budget: &mut Budget,
) -> Result<ImmobilityProbe, CopError> {
    assert!(is_simplex_point(t), "immobility probe needs a simplex point");
    let lifted = sys.lifted_quad(t);
    let constant = lifted[0].clone();
    let cost = lifted[1..].to_vec();
    let mut sip = Sip::new(sys, cfg, extras.to_vec());
    let out = sip.optimize(Direction::Maximize, &cost)?;
    budget.absorb(&sip.budget);
    Ok(match out.status {
        SipStatus::Optimal => {
            let total = &constant + out.value.as_ref().unwrap();
            if total.is_zero() {
                ImmobilityProbe::Immobile
            } else {
                assert!(total.is_positive(), "feasible supremum cannot be negative");
                ImmobilityProbe::Mobile {
                    x: out.x.unwrap(),
                    value: total,
                }
            }
        }
        SipStatus::Unbounded => {
            let total = &constant + out.value.as_ref().unwrap();
            if total.is_positive() {
                ImmobilityProbe::Mobile {
                    x: out.x.unwrap(),
                    value: total,
                }
            } else {
                ImmobilityProbe::Undecided
            }
        }
        SipStatus::Infeasible | SipStatus::BudgetExhausted => ImmobilityProbe::Undecided,
    })
}

/// Decides whether `sup_{x feasible} t' A(x) t = 0`, exactly. The maximum
/// over the boxed feasible set transfers to the whole feasible set because
/// the attaining point is interior to the box.
pub fn is_immobile_point(
    sys: &CopSystem,
    t: &[Rat],
    cfg: &EngineConfig,
) -> Result<ImmobilityProbe, CopError> {
    let mut budget = Budget::default();
    is_immobile_point_with(sys, &[], t, cfg, &mut budget)
}

// ---------------------------------------------------------------------------
// Slater probe / discovery
// ---------------------------------------------------------------------------

enum ProbeOutcome {
    Empty { x: Vec<Rat>, min_value: Rat },
    MaxMargin { x: Vec<Rat> },
    Infeasible,
    Budget,
}

/// Maximize the uniform margin `mu` with `t' A(x) t >= mu` over a growing
/// sample; certify the outcome with exact copositivity checks.
fn slater_probe(
    sys: &CopSystem,
    cfg: &EngineConfig,
    extras: &[ExtraRow],
    budget: &mut Budget,
) -> Result<ProbeOutcome, CopError> {
    let n = sys.n;
    let nv = n + 1; // x, then mu
    let mut sample = probe_sample(sys.p);
    let mut bound = rint(cfg.box_bound);
    for _ in 0..CUT_ITERATION_LIMIT {
        let mut objective = vec![Rat::zero(); nv];
        objective[n] = rint(1);
        let mut bounds = vec![VarBound::range(-bound.clone(), bound.clone()); n];
        bounds.push(VarBound::free());
        let mut lp = LpProblem::new(Direction::Maximize, objective, bounds);
        for t in &sample {
            let lifted = sys.lifted_quad(t);
            let mut coeffs = vec![Rat::zero(); nv];
            coeffs[..n].clone_from_slice(&lifted[1..]);
            coeffs[n] = rint(-1);
            lp.push_row(coeffs, Sense::Ge, -lifted[0].clone());
        }
        let mut cap = vec![Rat::zero(); nv];
        cap[n] = rint(1);
        lp.push_row(cap, Sense::Le, rint(1));
        for (coeffs, sense, rhs) in extras {
            let mut padded = vec![Rat::zero(); nv];
            padded[..n].clone_from_slice(coeffs);
            lp.push_row(padded, *sense, rhs.clone());
        }
        budget.lp_solves += 1;
        let (_xhat, mu) = match lp.solve() {
            LpResult::Infeasible { .. } => return Ok(ProbeOutcome::Infeasible),
            LpResult::Unbounded { .. } => unreachable!("margin capped at one"),
            LpResult::Optimal { x, value, .. } => (x[..n].to_vec(), value),
        };
        if mu.is_negative() {
            // Even the relaxed margin is negative for every boxed x, and the
            // true margin only gets worse: nothing in the box is feasible.
            return Ok(ProbeOutcome::Infeasible);
        }
        // l1-tiebreak x among margin-optimal points (margin substituted into
        // the right-hand sides), for determinism.
        let xhat = {
            let nv2 = 2 * n;
            let mut objective = vec![Rat::zero(); nv2];
            for c in objective.iter_mut().skip(n) {
                *c = rint(1);
            }
            let mut bounds = vec![VarBound::range(-bound.clone(), bound.clone()); n];
            bounds.extend(vec![VarBound::nonneg(); n]);
            let mut lp = LpProblem::new(Direction::Minimize, objective, bounds);
            for t in &sample {
                let lifted = sys.lifted_quad(t);
                let mut coeffs = vec![Rat::zero(); nv2];
                coeffs[..n].clone_from_slice(&lifted[1..]);
                lp.push_row(coeffs, Sense::Ge, &mu - &lifted[0]);
            }
            for (coeffs, sense, rhs) in extras {
                let mut padded = vec![Rat::zero(); nv2];
                padded[..n].clone_from_slice(coeffs);
                lp.push_row(padded, *sense, rhs.clone());
            }
            for i in 0..n {
                let mut up = vec![Rat::zero(); nv2];
                up[i] = rint(1);
                up[n + i] = rint(-1);
                lp.push_row(up, Sense::Le, Rat::zero());
                let mut dn = vec![Rat::zero(); nv2];
                dn[i] = rint(-1);
                dn[n + i] = rint(-1);
                lp.push_row(dn, Sense::Le, Rat::zero());
            }
            budget.lp_solves += 1;
            match lp.solve() {
                LpResult::Optimal { x, .. } => x[..n].to_vec(),
                _ => unreachable!("tiebreak inherits feasibility"),
            }
        };
        budget.copositivity_checks += 1;
        let chk = min_quadratic_over_simplex(&sys.eval(&xhat))?;
        if chk.value.is_negative() {
            sample.push(chk.argmin);
            budget.cuts_added += 1;
            continue;
        }
        if xhat.iter().any(|v| v.abs() == bound) {
            bound = &bound * rint(2);
            continue;
        }
        if mu.is_positive() {
            if chk.value.is_positive() {
                return Ok(ProbeOutcome::Empty {
                    x: xhat,
                    min_value: chk.value,
                });
            }
            // The sample promised a positive margin the point does not have;
            // its zero refutes the sample.
            sample.push(chk.argmin);
            budget.cuts_added += 1;
            continue;
        }
        assert!(chk.value.is_zero(), "relaxation bounds the true margin");
        return Ok(ProbeOutcome::MaxMargin { x: xhat });
    }
    Ok(ProbeOutcome::Budget)
}

// ---------------------------------------------------------------------------
// Index sets
// ---------------------------------------------------------------------------

/// Rows of the outer polyhedral relaxation `Z = {x : A(x) tau >= 0 for all
/// vertices tau}` plus any extra rows, as LP rows over `x`.
fn z_rows(sys: &CopSystem, vertices: &[Vec<Rat>], extras: &[ExtraRow]) -> Vec<ExtraRow> {
    let mut rows = Vec::new();
    for tau in vertices {
        for i in 0..sys.p {
            let lifted = sys.lifted_row(i, tau);
            rows.push((lifted[1..].to_vec(), Sense::Ge, -lifted[0].clone()));
        }
    }
    rows.extend(extras.to_vec());
    rows
}

fn compute_m_with(
    sys: &CopSystem,
    vertices: &[Vec<Rat>],
    extras: &[ExtraRow],
    budget: &mut Budget,
) -> Vec<Vec<usize>> {
    let rows = z_rows(sys, vertices, extras);
    let mut out = Vec::with_capacity(vertices.len());
    for (j, tau) in vertices.iter().enumerate() {
        let mut mj = Vec::new();
        for k in 0..sys.p {
            let lifted = sys.lifted_row(k, tau);
            let mut lp = LpProblem::new(
                Direction::Maximize,
                lifted[1..].to_vec(),
                vec![VarBound::free(); sys.n],
            );
            for (coeffs, sense, rhs) in &rows {
                lp.push_row(coeffs.clone(), *sense, rhs.clone());
            }
            budget.lp_solves += 1;
            match lp.solve() {
                LpResult::Optimal { value, .. } => {
                    let total = &lifted[0] + &value;
                    assert!(
                        !total.is_negative(),
                        "row maxima over the relaxation are nonnegative"
                    );
                    if total.is_zero() {
                        mj.push(k);
                    }
                }
                LpResult::Unbounded { .. } => {}
                LpResult::Infeasible { .. } => {
                    panic!("outer relaxation is empty: the vertices are not immobile points")
                }
            }
        }
        // Support coordinates always land in the zero-row set.
        for (k, c) in tau.iter().enumerate() {
            if c.is_positive() {
                assert!(mj.contains(&k), "support row escaped the forced-zero set");
            }
        }
        let _ = j;
        out.push(mj);
    }
    out
}

/// For each vertex `tau(j)`, the rows `k` whose value `e_k' A(x) tau(j)` is
/// forced to zero on the outer polyhedral relaxation. Decided by exact LPs.
pub fn compute_m(sys: &CopSystem, vertices: &[Vec<Rat>]) -> Vec<Vec<usize>> {
    let mut budget = Budget::default();
    compute_m_with(sys, vertices, &[], &mut budget)
}

/// For each vertex, the rows whose value vanishes somewhere on the feasible
/// set, with attaining witnesses. Rows already forced to zero are members by
/// definition.
pub fn compute_n_star(
    sys: &CopSystem,
    vertices: &[Vec<Rat>],
    msets: &[Vec<usize>],
    feasible: Option<&[Rat]>,
    cfg: &EngineConfig,
) -> Result<IndexSets, CopError> {
    let mut budget = Budget::default();
    let mut n_star = Vec::new();
    let mut witnesses = Vec::new();
    let mut undecided = Vec::new();
    for (j, tau) in vertices.iter().enumerate() {
        let mut nj = Vec::new();
        for k in 0..sys.p {
            if msets[j].contains(&k) {
                nj.push(k);
                if let Some(x) = feasible {
                    witnesses.push((j, k, x.to_vec()));
                }
                continue;
            }
            let lifted = sys.lifted_row(k, tau);
            let mut sip = Sip::new(sys, cfg, Vec::new());
            let out = sip.optimize(Direction::Minimize, &lifted[1..])?;
            budget.absorb(&sip.budget);
            match out.status {
                SipStatus::Optimal => {
                    let total = &lifted[0] + out.value.as_ref().unwrap();
                    assert!(
                        !total.is_negative(),
                        "row values are nonnegative on the feasible set"
                    );
                    if total.is_zero() {
                        nj.push(k);
                        witnesses.push((j, k, out.x.unwrap()));
                    }
                }
                SipStatus::Unbounded => {
                    let total = &lifted[0] + out.value.as_ref().unwrap();
                    if total.is_zero() {
                        nj.push(k);
                        witnesses.push((j, k, out.x.unwrap()));
                    } else {
                        undecided.push((j, k));
                    }
                }
                SipStatus::Infeasible | SipStatus::BudgetExhausted => undecided.push((j, k)),
            }
        }
        n_star.push(nj);
    }
    let n = msets
        .iter()
        .zip(&n_star)
        .map(|(m, ns)| ns.iter().copied().filter(|k| !m.contains(k)).collect())
        .collect();
    Ok(IndexSets {
        m: msets.to_vec(),
        n_star,
        n,
        witnesses,
        undecided,
    })
}

/// Full index-set table for a computed immobile structure.
pub fn index_sets(
    sys: &CopSystem,
    imm: &ImmobileStructure,
    cfg: &EngineConfig,
) -> Result<IndexSets, CopError> {
    let msets = compute_m(sys, &imm.vertices);
    compute_n_star(
        sys,
        &imm.vertices,
        &msets,
        imm.feasible_point.as_deref(),
        cfg,
    )
}

// ---------------------------------------------------------------------------
// Minimally active solutions
// ---------------------------------------------------------------------------

/// Off-immobile sample: grid points at l1 distance at least `sigma` from the
/// hull of the immobile vertices.
pub fn omega_sample(
    p: usize,
    vertices: &[Vec<Rat>],
    sigma: &Rat,
    denom: u64,
) -> Vec<Vec<Rat>> {
    simplex_grid(p, denom)
        .into_iter()
        .filter(|t| &l1_distance_to_hull(t, vertices) >= sigma)
        .collect()
}

fn pieces_contain(pieces: &[Vec<Vec<Rat>>], t: &[Rat]) -> bool {
    pieces
        .iter()
        .any(|piece| l1_distance_to_hull(t, piece).is_zero())
}

/// Maximize the smallest slack over the off-immobile sample and the
/// non-forced rows; verify the winner exactly. Returns `None` (with a note)
/// when no strictly positive margin exists within budget.
fn find_min_active(
    sys: &CopSystem,
    pieces: &[Vec<Vec<Rat>>],
    vertices: &[Vec<Rat>],
    sigma: &Rat,
    msets: &[Vec<usize>],
    extras: &[ExtraRow],
    cfg: &EngineConfig,
    budget: &mut Budget,
    notes: &mut Vec<String>,
) -> Result<Option<MinActiveSolution>, CopError> {
    let n = sys.n;
    let nv = n + 1; // x then mu
    let mut margin_pts = omega_sample(sys.p, vertices, sigma, cfg.grid_start);
    let mut strict_pairs: Vec<(usize, usize)> = Vec::new();
    for (j, m) in msets.iter().enumerate() {
        for k in 0..sys.p {
            if !m.contains(&k) {
                strict_pairs.push((j, k));
            }
        }
    }
    let mut cuts: Vec<Vec<Rat>> = Vec::new();
    let mut bound = rint(cfg.box_bound);
    for _round in 0..=cfg.max_rounds {
        // Inner loop: margin LP + copositivity cuts until the winner is
        // exactly feasible.
        let mut winner: Option<(Vec<Rat>, Rat)> = None;
        for _ in 0..CUT_ITERATION_LIMIT {
            let mut objective = vec![Rat::zero(); nv];
            objective[n] = rint(1);
            let mut bounds = vec![VarBound::range(-bound.clone(), bound.clone()); n];
            bounds.push(VarBound::free());
            let mut lp = LpProblem::new(Direction::Maximize, objective, bounds);
            for t in &margin_pts {
                let lifted = sys.lifted_quad(t);
                let mut coeffs = vec![Rat::zero(); nv];
                coeffs[..n].clone_from_slice(&lifted[1..]);
                coeffs[n] = rint(-1);
                lp.push_row(coeffs, Sense::Ge, -lifted[0].clone());
            }
            for &(j, k) in &strict_pairs {
                let lifted = sys.lifted_row(k, &vertices[j]);
                let mut coeffs = vec![Rat::zero(); nv];
                coeffs[..n].clone_from_slice(&lifted[1..]);
                coeffs[n] = rint(-1);
                lp.push_row(coeffs, Sense::Ge, -lifted[0].clone());
            }
            let mut cap = vec![Rat::zero(); nv];
            cap[n] = rint(1);
            lp.push_row(cap, Sense::Le, rint(1));
            for t in &cuts {
                let lifted = sys.lifted_quad(t);
                let mut coeffs = vec![Rat::zero(); nv];
                coeffs[..n].clone_from_slice(&lifted[1..]);
                lp.push_row(coeffs, Sense::Ge, -lifted[0].clone());
            }
            for (coeffs, sense, rhs) in extras {
                let mut padded = vec![Rat::zero(); nv];
                padded[..n].clone_from_slice(coeffs);
                lp.push_row(padded, *sense, rhs.clone());
            }
            budget.lp_solves += 1;
            let (_xhat, mu) = match lp.solve() {
                LpResult::Infeasible { .. } => {
                    notes.push("separation program infeasible".into());
                    return Ok(None);
                }
                LpResult::Unbounded { .. } => unreachable!("margin capped at one"),
                LpResult::Optimal { x, value, .. } => (x[..n].to_vec(), value),
            };
            if !mu.is_positive() {
                notes.push("no strictly positive separation margin".into());
                return Ok(None);
            }
            // l1-tiebreak with the margin pinned into the right-hand sides.
            let xhat = {
                let nv2 = 2 * n;
                let mut objective = vec![Rat::zero(); nv2];
                for c in objective.iter_mut().skip(n) {
                    *c = rint(1);
                }
                let mut bounds2 = vec![VarBound::range(-bound.clone(), bound.clone()); n];
                bounds2.extend(vec![VarBound::nonneg(); n]);
                let mut lp = LpProblem::new(Direction::Minimize, objective, bounds2);
                for t in &margin_pts {
                    let lifted = sys.lifted_quad(t);
                    let mut coeffs = vec![Rat::zero(); nv2];
                    coeffs[..n].clone_from_slice(&lifted[1..]);
                    lp.push_row(coeffs, Sense::Ge, &mu - &lifted[0]);
                }
                for &(j, k) in &strict_pairs {
                    let lifted = sys.lifted_row(k, &vertices[j]);
                    let mut coeffs = vec![Rat::zero(); nv2];
                    coeffs[..n].clone_from_slice(&lifted[1..]);
                    lp.push_row(coeffs, Sense::Ge, &mu - &lifted[0]);
                }
                for t in &cuts {
                    let lifted = sys.lifted_quad(t);
                    let mut coeffs = vec![Rat::zero(); nv2];
                    coeffs[..n].clone_from_slice(&lifted[1..]);
                    lp.push_row(coeffs, Sense::Ge, -lifted[0].clone());
                }
                for (coeffs, sense, rhs) in extras {
                    let mut padded = vec![Rat::zero(); nv2];
                    padded[..n].clone_from_slice(coeffs);
                    lp.push_row(padded, *sense, rhs.clone());
                }
                for i in 0..n {
                    let mut up = vec![Rat::zero(); nv2];
                    up[i] = rint(1);
                    up[n + i] = rint(-1);
                    lp.push_row(up, Sense::Le, Rat::zero());
                    let mut dn = vec![Rat::zero(); nv2];
                    dn[i] = rint(-1);
                    dn[n + i] = rint(-1);
                    lp.push_row(dn, Sense::Le, Rat::zero());
                }
                budget.lp_solves += 1;
                match lp.solve() {
                    LpResult::Optimal { x, .. } => x[..n].to_vec(),
                    _ => unreachable!("tiebreak inherits feasibility"),
                }
            };
            budget.copositivity_checks += 1;
            let chk = min_quadratic_over_simplex(&sys.eval(&xhat))?;
            if chk.value.is_negative() {
                cuts.push(chk.argmin);
                budget.cuts_added += 1;
                continue;
            }
            if xhat.iter().any(|v| v.abs() == bound) {
                bound = &bound * rint(2);
                continue;
            }
            winner = Some((xhat, mu));
            break;
        }
        let Some((xstar, mu)) = winner else {
            notes.push("separation budget exhausted".into());
            return Ok(None);
        };
        // Exact verification of the zero pattern.
        let mut strict_rows = Vec::new();
        for (j, m) in msets.iter().enumerate() {
            for k in 0..sys.p {
                let lifted = sys.lifted_row(k, &vertices[j]);
                let val = &lifted[0] + &dot(&lifted[1..], &xstar);
                if m.contains(&k) {
                    assert!(
                        val.is_zero(),
                        "forced-zero row took a nonzero value at a relaxation point"
                    );
                } else {
                    assert!(val >= mu, "margin row violated its own program");
                    strict_rows.push((j, k, val));
                }
            }
        }
        let omega_min = margin_pts
            .iter()
            .map(|t| sys.eval(&xstar).quad_form(t))
            .min();
        // Reverse inclusion: the zero set of the winner must equal the
        // candidate pieces.
        let zs = zero_set(&sys.eval(&xstar))?;
        if zs == pieces {
            return Ok(Some(MinActiveSolution {
                x: xstar,
                margin: mu,
                omega_min,
                strict_rows,
                zero_set_matches: true,
            }));
        }
        // Refine: demand positivity at the stray zeros that lie outside the
        // candidate set, then retry.
        let mut added = false;
        for piece in &zs {
            if pieces.contains(piece) {
                continue;
            }
            let mut pts: Vec<Vec<Rat>> = piece.clone();
            pts.push(barycenter(piece));
            for t in pts {
                if !pieces_contain(pieces, &t) && !margin_pts.contains(&t) {
                    margin_pts.push(t);
                    added = true;
                }
            }
        }
        if !added {
            notes.push("zero set disagrees with candidate pieces".into());
            return Ok(Some(MinActiveSolution {
                x: xstar,
                margin: mu,
                omega_min,
                strict_rows,
                zero_set_matches: false,
            }));
        }
    }
    notes.push("zero-set refinement budget exhausted".into());
    Ok(None)
}

// ---------------------------------------------------------------------------
// Immobile set discovery and verification
// ---------------------------------------------------------------------------

fn empty_structure(
    x: Vec<Rat>,
    min_value: Rat,
    notes: Vec<String>,
    budget: Budget,
) -> ImmobileStructure {
    ImmobileStructure {
        status: ImmobileStatus::Empty,
        pieces: Vec::new(),
        vertices: Vec::new(),
        groups: Vec::new(),
        pairs: Vec::new(),
        sigma: None,
        feasible_point: Some(x.clone()),
        slater_certificate: Some((x, min_value)),
        min_active: None,
        notes,
        budget,
    }
}

fn candidate_failure(notes: Vec<String>, budget: Budget) -> ImmobileStructure {
    ImmobileStructure {
        status: ImmobileStatus::Candidate,
        pieces: Vec::new(),
        vertices: Vec::new(),
        groups: Vec::new(),
        pairs: Vec::new(),
        sigma: None,
        feasible_point: None,
        slater_certificate: None,
        min_active: None,
        notes,
        budget,
    }
}

fn find_immobile_set_with(
    sys: &CopSystem,
    extras: &[ExtraRow],
    cfg: &EngineConfig,
    use_hint: bool,
) -> Result<ImmobileStructure, CopError> {
    let mut budget = Budget::default();
    let mut notes = Vec::new();

    let hint = if use_hint { sys.immobile_hint.as_ref() } else { None };
    let (mut pieces, mut xcur): (Vec<Vec<Vec<Rat>>>, Vec<Rat>);
    match hint {
        Some(h) => {
            pieces = canonical_pieces(h.clone());
            notes.push("candidate taken from user hint".into());
            // Still need a feasible anchor point.
            match slater_probe(sys, cfg, extras, &mut budget)? {
                ProbeOutcome::Empty { x, min_value } => {
                    notes.push("hint contradicted: strictly copositive point found".into());
                    return Ok(empty_structure(x, min_value, notes, budget));
                }
                ProbeOutcome::MaxMargin { x } => xcur = x,
                ProbeOutcome::Infeasible => {
                    notes.push("no feasible point within the box".into());
                    return Ok(candidate_failure(notes, budget));
                }
                ProbeOutcome::Budget => {
                    notes.push("feasibility probe budget exhausted".into());
                    return Ok(candidate_failure(notes, budget));
                }
            }
        }
        None => match slater_probe(sys, cfg, extras, &mut budget)? {
            ProbeOutcome::Empty { x, min_value } => {
                return Ok(empty_structure(x, min_value, notes, budget))
            }
            ProbeOutcome::MaxMargin { x } => {
                pieces = zero_set(&sys.eval(&x))?;
                xcur = x;
            }
            ProbeOutcome::Infeasible => {
                notes.push("no feasible point within the box".into());
                return Ok(candidate_failure(notes, budget));
            }
            ProbeOutcome::Budget => {
                notes.push("feasibility probe budget exhausted".into());
                return Ok(candidate_failure(notes, budget));
            }
        },
    }

    // Verification loop: every piece must have immobile vertices and
    // barycenter; a mobile point yields a feasible direction that shrinks
    // the candidate by averaging.
    let mut points_verified = false;
    let shrink_allowed = hint.is_none();
    'outer: for _ in 0..=(2 * cfg.max_rounds) {
        for piece in &pieces {
            let mut pts: Vec<Vec<Rat>> = piece.clone();
            if piece.len() > 1 {
                pts.push(barycenter(piece));
            }
            for t in pts {
                match is_immobile_point_with(sys, extras, &t, cfg, &mut budget)? {
                    ImmobilityProbe::Immobile => {}
                    ImmobilityProbe::Mobile { x, .. } => {
                        if !shrink_allowed {
                            notes.push("hint vertex or barycenter is not immobile".into());
                            break 'outer;
                        }
                        // Average the anchors: zeros of the mean are zeros of
                        // both, so the candidate strictly shrinks.
                        let half = rat(1, 2);
                        xcur = xcur
                            .iter()
                            .zip(&x)
                            .map(|(a, b)| (a + b) * &half)
                            .collect();
                        let chk = min_quadratic_over_simplex(&sys.eval(&xcur))?;
                        budget.copositivity_checks += 1;
                        assert!(!chk.value.is_negative(), "mean of feasible points is feasible");
                        if chk.value.is_positive() {
                            return Ok(empty_structure(xcur, chk.value, notes, budget));
                        }
                        pieces = zero_set(&sys.eval(&xcur))?;
                        continue 'outer;
                    }
                    ImmobilityProbe::Undecided => {
                        notes.push("immobility probe undecided within budget".into());
                        break 'outer;
                    }
                }
            }
        }
        points_verified = true;
        break;
    }

    if pieces.is_empty() {
        // All candidate zeros were refuted; the last anchor is strictly
        // copositive only in the averaged limit, so report what we have.
        let chk = min_quadratic_over_simplex(&sys.eval(&xcur))?;
        if chk.value.is_positive() {
            return Ok(empty_structure(xcur, chk.value, notes, budget));
        }
        notes.push("candidate emptied without a strict certificate".into());
        return Ok(candidate_failure(notes, budget));
    }

    // Structure assembly: vertex numbering, grouping, pairs, sigma.
    let mut vertex_set: std::collections::BTreeSet<Vec<Rat>> = std::collections::BTreeSet::new();
    for piece in &pieces {
        for v in piece {
            vertex_set.insert(v.clone());
        }
    }
    let vertices: Vec<Vec<Rat>> = vertex_set.into_iter().rev().collect();
    let vid = |v: &Vec<Rat>| vertices.iter().position(|w| w == v).unwrap();
    let piece_ids: Vec<Vec<usize>> = pieces
        .iter()
        .map(|piece| piece.iter().map(vid).collect())
        .collect();

    // Merge pieces sharing a vertex into groups (union-find over pieces).
    let mut parent: Vec<usize> = (0..pieces.len()).collect();
    fn root(parent: &mut Vec<usize>, i: usize) -> usize {
        let mut r = i;
        while parent[r] != r {
            r = parent[r];
        }
        let mut c = i;
        while parent[c] != c {
            let next = parent[c];
            parent[c] = r;
            c = next;
        }
        r
    }
    for a in 0..pieces.len() {
        for b in (a + 1)..pieces.len() {
            if piece_ids[a].iter().any(|i| piece_ids[b].contains(i)) {
                let (ra, rb) = (root(&mut parent, a), root(&mut parent, b));
                if ra != rb {
                    parent[rb.max(ra)] = rb.min(ra);
                }
            }
        }
    }
    let mut groups_map: std::collections::BTreeMap<usize, std::collections::BTreeSet<usize>> =
        std::collections::BTreeMap::new();
    for a in 0..pieces.len() {
        let r = root(&mut parent, a);
        groups_map.entry(r).or_default().extend(piece_ids[a].iter().copied());
    }
    let mut merge_ok = true;
    // Cross-piece pairs created by merging must have immobile midpoints.
    for (r, members) in &groups_map {
        let group_pieces: Vec<usize> = (0..pieces.len())
            .filter(|&a| root(&mut parent, a) == *r)
            .collect();
        if group_pieces.len() < 2 {
            continue;
        }
        let mut seen: std::collections::BTreeSet<(usize, usize)> = std::collections::BTreeSet::new();
        for &a in &group_pieces {
            for ia in &piece_ids[a] {
                for ib in members {
                    if piece_ids[a].contains(ib) {
                        continue;
                    }
                    let key = (*ia.min(ib), *ia.max(ib));
                    if !seen.insert(key) {
                        continue;
                    }
                    let mid = barycenter(&[vertices[key.0].clone(), vertices[key.1].clone()]);
                    match is_immobile_point_with(sys, extras, &mid, cfg, &mut budget)? {
                        ImmobilityProbe::Immobile => {}
                        _ => {
                            merge_ok = false;
                            notes.push("piece merge rejected: cross midpoint not immobile".into());
                        }
                    }
                }
            }
        }
    }
    let groups: Vec<Vec<usize>> = if merge_ok {
        groups_map
            .into_values()
            .map(|s| s.into_iter().collect())
            .collect()
    } else {
        // Fall back to per-piece groups.
        piece_ids
            .iter()
            .map(|ids| {
                let mut v: Vec<usize> = ids.clone();
                v.sort_unstable();
                v.dedup();
                v
            })
            .collect()
    };
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for g in &groups {
        for (ai, &l) in g.iter().enumerate() {
            for &q in g.iter().skip(ai) {
                pairs.push((l, q));
            }
        }
    }
    pairs.sort_unstable();
    pairs.dedup();
    let sigma = vertices
        .iter()
        .flat_map(|v| v.iter().filter(|c| c.is_positive()).cloned())
        .min();

    // Reverse inclusion through a minimally active solution — only sensible
    // once the candidate's points are confirmed immobile, since the outer
    // relaxation is built from these vertices.
    let min_active = if points_verified {
        let msets = compute_m_with(sys, &vertices, extras, &mut budget);
        find_min_active(
            sys,
            &pieces,
            &vertices,
            sigma.as_ref().expect("nonempty structure has a sigma"),
            &msets,
            extras,
            cfg,
            &mut budget,
            &mut notes,
        )?
    } else {
        None
    };

    let verified = points_verified
        && merge_ok
        && min_active
            .as_ref()
            .map_or(false, |ma| ma.zero_set_matches && ma.margin.is_positive());
    let feasible_point = min_active.as_ref().map(|ma| ma.x.clone()).or(Some(xcur));
    Ok(ImmobileStructure {
        status: if verified {
            ImmobileStatus::VerifiedExact
        } else {
            ImmobileStatus::Candidate
        },
        pieces,
        vertices,
        groups,
        pairs,
        sigma,
        feasible_point,
        slater_certificate: None,
        min_active,
        notes,
        budget,
    })
}

/// Compute (or verify, when the problem carries a hint) the immobile set.
pub fn find_immobile_set(sys: &CopSystem, cfg: &EngineConfig) -> Result<ImmobileStructure, CopError> {
    find_immobile_set_with(sys, &[], cfg, true)
}

/// The immobile set of the system restricted by `e_k' A(x) tau(j) = 0`
/// (zero-based `k` and vertex number `j` of `imm`). The restricted minimally
/// active solution is carried inside the returned structure.
pub fn restricted_immobile(
    sys: &CopSystem,
    imm: &ImmobileStructure,
    k: usize,
    j: usize,
    cfg: &EngineConfig,
) -> Result<ImmobileStructure, CopError> {
    let tau = &imm.vertices[j];
    let lifted = sys.lifted_row(k, tau);
    let extras = vec![(lifted[1..].to_vec(), Sense::Eq, -lifted[0].clone())];
    find_immobile_set_with(sys, &extras, cfg, false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::CopSystem;

    fn fixture(name: &str) -> CopSystem {
        let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
            .join("fixtures")
            .join(name);
        CopSystem::from_path(&path).unwrap()
    }

    fn cfg() -> EngineConfig {
        EngineConfig::default()
    }

    #[test]
    fn grid_counts_and_membership() {
        let g = simplex_grid(3, 8);
        assert_eq!(g.len(), 45);
        assert!(g.iter().all(|t| is_simplex_point(t)));
        // Deterministic: first point is the first vertex.
        assert_eq!(g[0], vec![rint(1), rint(0), rint(0)]);
    }

    #[test]
    fn l1_distance_examples() {
        let seg = vec![
            vec![rat(1, 2), rint(0), rat(1, 2)],
            vec![rint(0), rint(1), rint(0)],
        ];
        // A point on the segment.
        assert_eq!(
            l1_distance_to_hull(&[rat(1, 4), rat(1, 2), rat(1, 4)], &seg),
            Rat::zero()
        );
        // The first vertex of the simplex.
        assert_eq!(
            l1_distance_to_hull(&[rint(1), rint(0), rint(0)], &seg),
            rint(1)
        );
        let point = vec![vec![rint(0), rint(0), rint(1)]];
        assert_eq!(
            l1_distance_to_hull(&[rat(1, 4), rat(1, 4), rat(1, 2)], &point),
            rint(1)
        );
    }

    #[test]
    fn omega_sample_size_first_fixture() {
        // sigma = 1 and distance to the single vertex (0,0,1) is 2(1 - t3),
        // so the off-immobile sample keeps exactly the grid points with
        // t3 <= 1/2.
        let verts = vec![vec![rint(0), rint(0), rint(1)]];
        let omega = omega_sample(3, &verts, &rint(1), 8);
        assert_eq!(omega.len(), 35);
        assert!(omega.iter().all(|t| t[2] <= rat(1, 2)));
    }

    #[test]
    fn sip_on_fixtures() {
        // Fixture 1: maximizing x2 over the feasible set gives 0.
        let sys = fixture("ex1.json");
        let out = sip_optimize(
            &sys,
            Direction::Maximize,
            &[rint(0), rint(1)],
            Vec::new(),
            &cfg(),
        )
        .unwrap();
        assert_eq!(out.status, SipStatus::Optimal);
        assert_eq!(out.value, Some(rint(0)));

        // Fixture 3: minimizing x1 gives 0 at the origin.
        let sys = fixture("ex3.json");
        let out = sip_optimize(&sys, Direction::Minimize, &[rint(1)], Vec::new(), &cfg()).unwrap();
        assert_eq!(out.status, SipStatus::Optimal);
        assert_eq!(out.value, Some(rint(0)));
        assert_eq!(out.x, Some(vec![rint(0)]));

        // Fixture 2: the only feasible point is the origin.
        let sys = fixture("ex2.json");
        let out = sip_optimize(&sys, Direction::Minimize, &[rint(1)], Vec::new(), &cfg()).unwrap();
        assert_eq!(out.status, SipStatus::Optimal);
        assert_eq!(out.value, Some(rint(0)));
        assert_eq!(out.x, Some(vec![rint(0)]));
        let out = sip_optimize(&sys, Direction::Maximize, &[rint(1)], Vec::new(), &cfg()).unwrap();
        assert_eq!(out.status, SipStatus::Optimal);
        assert_eq!(out.value, Some(rint(0)));
    }

    #[test]
    fn immobility_probes() {
        let sys = fixture("ex1.json");
        let probe = is_immobile_point(&sys, &[rint(0), rint(0), rint(1)], &cfg()).unwrap();
        assert!(matches!(probe, ImmobilityProbe::Immobile));
        let probe = is_immobile_point(&sys, &[rat(1, 3), rat(1, 3), rat(1, 3)], &cfg()).unwrap();
        match probe {
            ImmobilityProbe::Mobile { x, value } => {
                assert!(value.is_positive());
                let q = sys.eval(&x).quad_form(&[rat(1, 3), rat(1, 3), rat(1, 3)]);
                assert_eq!(q, value);
            }
            other => panic!("expected mobile, got {:?}", other),
        }
        let sys = fixture("ex2.json");
        let probe = is_immobile_point(&sys, &[rat(1, 4), rat(1, 2), rat(1, 4)], &cfg()).unwrap();
        assert!(matches!(probe, ImmobilityProbe::Immobile));
    }

    #[test]
    fn immobile_set_first_fixture() {
        let sys = fixture("ex1.json");
        let imm = find_immobile_set(&sys, &cfg()).unwrap();
        assert_eq!(imm.status, ImmobileStatus::VerifiedExact);
        assert_eq!(imm.pieces, vec![vec![vec![rint(0), rint(0), rint(1)]]]);
        assert_eq!(imm.vertices, vec![vec![rint(0), rint(0), rint(1)]]);
        assert_eq!(imm.groups, vec![vec![0]]);
        assert_eq!(imm.pairs, vec![(0, 0)]);
        assert_eq!(imm.sigma, Some(rint(1)));
        let ma = imm.min_active.unwrap();
        assert!(ma.margin.is_positive());
        assert!(ma.zero_set_matches);
        // The strict rows are exactly k=2 (zero-based 1) at the only vertex.
        assert_eq!(ma.strict_rows.len(), 1);
        assert_eq!((ma.strict_rows[0].0, ma.strict_rows[0].1), (0, 1));
        assert!(ma.strict_rows[0].2.is_positive());
    }

    #[test]
    fn immobile_set_second_fixture() {
        let sys = fixture("ex2.json");
        let imm = find_immobile_set(&sys, &cfg()).unwrap();
        assert_eq!(imm.status, ImmobileStatus::VerifiedExact);
        assert_eq!(
            imm.pieces,
            vec![vec![
                vec![rat(1, 2), rint(0), rat(1, 2)],
                vec![rint(0), rint(1), rint(0)],
            ]]
        );
        assert_eq!(imm.vertices.len(), 2);
        assert_eq!(imm.vertices[0], vec![rat(1, 2), rint(0), rat(1, 2)]);
        assert_eq!(imm.vertices[1], vec![rint(0), rint(1), rint(0)]);
        assert_eq!(imm.groups, vec![vec![0, 1]]);
        assert_eq!(imm.pairs, vec![(0, 0), (0, 1), (1, 1)]);
        assert_eq!(imm.sigma, Some(rat(1, 2)));
        let ma = imm.min_active.unwrap();
        assert_eq!(ma.x, vec![rint(0)]);
        assert!(ma.margin.is_positive());
        assert!(ma.zero_set_matches);
        assert!(ma.strict_rows.is_empty());
    }

    #[test]
    fn immobile_set_third_fixture() {
        let sys = fixture("ex3.json");
        let imm = find_immobile_set(&sys, &cfg()).unwrap();
        assert_eq!(imm.status, ImmobileStatus::VerifiedExact);
        assert_eq!(
            imm.pieces,
            vec![
                vec![vec![rat(1, 2), rint(0), rat(1, 2)]],
                vec![vec![rint(0), rint(1), rint(0)]],
            ]
        );
        assert_eq!(imm.groups, vec![vec![0], vec![1]]);
        assert_eq!(imm.pairs, vec![(0, 0), (1, 1)]);
        assert_eq!(imm.sigma, Some(rat(1, 2)));
        let ma = imm.min_active.unwrap();
        assert!(ma.x[0].is_positive());
        assert!(ma.zero_set_matches);
    }

    #[test]
    fn index_sets_match_expectations() {
        let sys = fixture("ex1.json");
        let imm = find_immobile_set(&sys, &cfg()).unwrap();
        let idx = index_sets(&sys, &imm, &cfg()).unwrap();
        assert_eq!(idx.m, vec![vec![0, 2]]);
        assert_eq!(idx.n_star, vec![vec![0, 1, 2]]);
        assert_eq!(idx.n, vec![vec![1]]);
        assert!(idx.undecided.is_empty());

        let sys = fixture("ex2.json");
        let imm = find_immobile_set(&sys, &cfg()).unwrap();
        let idx = index_sets(&sys, &imm, &cfg()).unwrap();
        assert_eq!(idx.m, vec![vec![0, 1, 2], vec![0, 1, 2]]);
        assert_eq!(idx.n, vec![Vec::<usize>::new(), Vec::new()]);

        let sys = fixture("ex3.json");
        let imm = find_immobile_set(&sys, &cfg()).unwrap();
        let idx = index_sets(&sys, &imm, &cfg()).unwrap();
        assert_eq!(idx.m, vec![vec![0, 2], vec![1]]);
        assert_eq!(idx.n, vec![vec![1], vec![0, 2]]);
        assert!(idx.undecided.is_empty());
    }

    #[test]
    fn feasible_witnesses_satisfy_relaxation() {
        // Every stored witness lies in the outer polyhedral relaxation:
        // nonnegative matrix action at every vertex.
        for name in ["ex1.json", "ex3.json"] {
            let sys = fixture(name);
            let imm = find_immobile_set(&sys, &cfg()).unwrap();
            let idx = index_sets(&sys, &imm, &cfg()).unwrap();
            for (_, _, x) in &idx.witnesses {
                for tau in &imm.vertices {
                    for v in sys.row_action(x, tau) {
                        assert!(!v.is_negative());
                    }
                }
            }
        }
    }

    #[test]
    fn restricted_first_fixture() {
        let sys = fixture("ex1.json");
        let imm = find_immobile_set(&sys, &cfg()).unwrap();
        // Row 2 (zero-based 1) at the only vertex.
        let res = restricted_immobile(&sys, &imm, 1, 0, &cfg()).unwrap();
        assert_eq!(res.status, ImmobileStatus::VerifiedExact);
        assert_eq!(res.pieces, vec![vec![vec![rint(0), rint(0), rint(1)]]]);
    }

    #[test]
    fn restricted_third_fixture() {
        let sys = fixture("ex3.json");
        let imm = find_immobile_set(&sys, &cfg()).unwrap();
        // (k, j) = (2, 1) in row/vertex numbering: zero-based (1, 0).
        let res = restricted_immobile(&sys, &imm, 1, 0, &cfg()).unwrap();
        assert_eq!(res.status, ImmobileStatus::VerifiedExact);
        assert_eq!(
            res.pieces,
            vec![vec![
                vec![rat(1, 2), rint(0), rat(1, 2)],
                vec![rint(0), rint(1), rint(0)],
            ]]
        );
        let ma = res.min_active.unwrap();
        assert_eq!(ma.x, vec![rint(0)]);
        // (k, j) = (1, 2): zero-based (0, 1).
        let res = restricted_immobile(&sys, &imm, 0, 1, &cfg()).unwrap();
        assert_eq!(
            res.pieces,
            vec![vec![
                vec![rat(1, 2), rint(0), rat(1, 2)],
                vec![rint(0), rint(1), rint(0)],
            ]]
        );
        // Containment: every original vertex stays immobile under the
        // restriction.
        for v in &imm.vertices {
            let lifted = sys.lifted_row(0, &imm.vertices[1]);
            let extras = vec![(lifted[1..].to_vec(), Sense::Eq, -lifted[0].clone())];
            let mut b = Budget::default();
            let probe = is_immobile_point_with(&sys, &extras, v, &cfg(), &mut b).unwrap();
            assert!(matches!(probe, ImmobilityProbe::Immobile));
        }
    }

    #[test]
    fn hint_is_verified_not_searched() {
        let text = std::fs::read_to_string(
            std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
                .join("fixtures")
                .join("ex2.json"),
        )
        .unwrap();
        let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
        v.as_object_mut().unwrap().insert(
            "immobile_hint".into(),
            serde_json::json!([[["1/2", 0, "1/2"], [0, 1, 0]]]),
        );
        let sys = CopSystem::from_json(&v.to_string()).unwrap();
        let imm = find_immobile_set(&sys, &cfg()).unwrap();
        assert_eq!(imm.status, ImmobileStatus::VerifiedExact);
        assert!(imm.notes.iter().any(|n| n.contains("hint")));

        // A wrong hint (too large) is reported as candidate, not shrunk.
        let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
        v.as_object_mut().unwrap().insert(
            "immobile_hint".into(),
            serde_json::json!([[[1, 0, 0], [0, 1, 0]]]),
        );
        let sys = CopSystem::from_json(&v.to_string()).unwrap();
        let imm = find_immobile_set(&sys, &cfg()).unwrap();
        assert_eq!(imm.status, ImmobileStatus::Candidate);
    }
}
