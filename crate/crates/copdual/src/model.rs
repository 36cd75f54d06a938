//! Problem model: symmetric matrix pencils, simplex points, lifted vectors.
//!
//! A system holds `n + 1` symmetric `p x p` rational matrices `A0 .. An`
//! defining the pencil `A(x) = A0 + sum_m x_m A_m`. Two liftings into
//! `R^{n+1}` drive the whole analysis, both indexed with the constant matrix
//! first:
//!
//! * `a(t) = (t' A_m t)_m` linearizes the quadratic form at `t`, so that
//!   feasibility of `x` reads `(1, x')·a(t) >= 0` for all simplex points `t`;
//! * `b(k, t) = (e_k' A_m t)_m` linearizes row `k` of the matrix action,
//!   with `(1, x')·b(k, t) = e_k' A(x) t`.

use crate::matrix::RatMatrix;
use crate::rat::{dot, parse_rat, rat_to_string, Rat};
use crate::CopError;
use num::traits::Zero;
use serde_json::{Map, Value};

/// Externally certified dual value for one cost vector, carried as fixture
/// metadata so gap reports can state exactness beyond the discretization
/// lower bound.
#[derive(Debug, Clone)]
pub struct CertifiedDual {
    pub cost: Vec<Rat>,
    pub value: Rat,
    pub attained: bool,
}

/// A linear copositive constraint system.
#[derive(Debug, Clone)]
pub struct CopSystem {
    pub n: usize,
    pub p: usize,
    /// `n + 1` symmetric `p x p` matrices, constant matrix first.
    pub matrices: Vec<RatMatrix>,
    /// Optional user-supplied immobile set candidate: polytopes as vertex
    /// lists. Verified rather than searched when present.
    pub immobile_hint: Option<Vec<Vec<Vec<Rat>>>>,
    pub certified_dual: Vec<CertifiedDual>,
}

impl CopSystem {
    pub fn new(matrices: Vec<RatMatrix>) -> Result<Self, CopError> {
        if matrices.len() < 2 {
            return Err(CopError::Dimension(
                "need at least two matrices (constant plus one decision)".into(),
            ));
        }
        let p = matrices[0].rows();
        if p < 2 {
            return Err(CopError::Dimension(format!("order {} below minimum 2", p)));
        }
        for (idx, m) in matrices.iter().enumerate() {
            if m.rows() != p || m.cols() != p {
                return Err(CopError::Dimension(format!(
                    "matrix {} is {}x{}, expected {}x{}",
                    idx,
                    m.rows(),
                    m.cols(),
                    p,
                    p
                )));
            }
            if let Some((i, j)) = m.symmetry_violation() {
                return Err(CopError::NotSymmetric {
                    index: idx,
                    row: i + 1,
                    col: j + 1,
                    left: rat_to_string(m.at(i, j)),
                    right: rat_to_string(m.at(j, i)),
                });
            }
        }
        Ok(CopSystem {
            n: matrices.len() - 1,
            p,
            matrices,
            immobile_hint: None,
            certified_dual: Vec::new(),
        })
    }

    pub fn from_json(text: &str) -> Result<Self, CopError> {
        let v: Value = serde_json::from_str(text)
            .map_err(|e| CopError::Parse(format!("invalid JSON: {}", e)))?;
        let obj = v
            .as_object()
            .ok_or_else(|| CopError::Parse("top level must be an object".into()))?;
        let n = get_usize(obj, "n")?;
        let p = get_usize(obj, "p")?;
        let mats = obj
            .get("matrices")
            .and_then(Value::as_array)
            .ok_or_else(|| CopError::Parse("missing \"matrices\" array".into()))?;
        if mats.len() != n + 1 {
            return Err(CopError::Parse(format!(
                "expected {} matrices (n + 1), found {}",
                n + 1,
                mats.len()
            )));
        }
        let matrices = mats
            .iter()
            .enumerate()
            .map(|(idx, m)| parse_matrix(m, p, idx))
            .collect::<Result<Vec<_>, _>>()?;
        let mut sys = CopSystem::new(matrices)?;
        if sys.n != n || sys.p != p {
            return Err(CopError::Parse("n/p fields disagree with matrix data".into()));
        }
        if let Some(hint) = obj.get("immobile_hint") {
            sys.immobile_hint = Some(parse_hint(hint, p)?);
        }
        if let Some(cd) = obj.get("certified_dual") {
            sys.certified_dual = parse_certified(cd, n)?;
        }
        Ok(sys)
    }

    pub fn from_path(path: &std::path::Path) -> Result<Self, CopError> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    /// `A(x) = A0 + sum_m x_m A_m`; `x` has length `n`.
    pub fn eval(&self, x: &[Rat]) -> RatMatrix {
        assert_eq!(x.len(), self.n, "x length mismatch");
        let mut acc = self.matrices[0].clone();
        for (m, xm) in x.iter().enumerate() {
            if !xm.is_zero() {
                acc = acc.add(&self.matrices[m + 1].scale(xm));
            }
        }
        acc
    }

    /// `B(z) = sum_{m=0}^{n} z_m A_m`; `z` has length `n + 1`.
    pub fn eval_lifted(&self, z: &[Rat]) -> RatMatrix {
        assert_eq!(z.len(), self.n + 1, "z length mismatch");
        let mut acc = RatMatrix::zeros(self.p, self.p);
        for (m, zm) in z.iter().enumerate() {
            if !zm.is_zero() {
                acc = acc.add(&self.matrices[m].scale(zm));
            }
        }
        acc
    }

    /// `a(t) = (t' A_m t)_{m=0..n}`. Accepts any nonnegative vector; used on
    /// simplex points and on sums of them.
    pub fn lifted_quad(&self, t: &[Rat]) -> Vec<Rat> {
        self.matrices.iter().map(|a| a.quad_form(t)).collect()
    }

    /// `b(k, t) = (e_k' A_m t)_{m=0..n}` for zero-based row `k`.
    pub fn lifted_row(&self, k: usize, t: &[Rat]) -> Vec<Rat> {
        assert!(k < self.p, "row index out of range");
        self.matrices
            .iter()
            .map(|a| dot(a.row(k), t))
            .collect()
    }

    /// `A(x) t`.
    pub fn row_action(&self, x: &[Rat], t: &[Rat]) -> Vec<Rat> {
        self.eval(x).mul_vec(t)
    }

    /// Entry generators `g(k, l) = ((A_m)_{kl})_m` for `k <= l`; every `a(t)`
    /// is a combination `sum_{k<=l} (2 - [k=l]) t_k t_l g(k, l)`.
    pub fn monomial_generators(&self) -> Vec<Vec<Rat>> {
        let mut out = Vec::new();
        for k in 0..self.p {
            for l in k..self.p {
                out.push(
                    self.matrices
                        .iter()
                        .map(|a| a.at(k, l).clone())
                        .collect(),
                );
            }
        }
        out
    }

    /// Exact identity `a(t) = sum_{k in supp t} t_k b(k, t)`.
    pub fn lifted_identity_holds(&self, t: &[Rat]) -> bool {
        let a = self.lifted_quad(t);
        let mut acc = vec![Rat::zero(); self.n + 1];
        for (k, tk) in t.iter().enumerate() {
            if tk.is_zero() {
                continue;
            }
            for (m, b) in self.lifted_row(k, t).into_iter().enumerate() {
                acc[m] += tk * b;
            }
        }
        acc == a
    }

    /// Embeds the validated input back into a JSON value with canonical
    /// rational strings.
    pub fn to_json(&self) -> Value {
        let mut obj = Map::new();
        obj.insert("n".into(), Value::from(self.n));
        obj.insert("p".into(), Value::from(self.p));
        obj.insert(
            "matrices".into(),
            Value::Array(
                self.matrices
                    .iter()
                    .map(|m| {
                        Value::Array(
                            (0..m.rows())
                                .map(|i| {
                                    Value::Array(
                                        m.row(i)
                                            .iter()
                                            .map(|v| Value::String(rat_to_string(v)))
                                            .collect(),
                                    )
                                })
                                .collect(),
                        )
                    })
                    .collect(),
            ),
        );
        Value::Object(obj)
    }
}

fn get_usize(obj: &Map<String, Value>, key: &str) -> Result<usize, CopError> {
    obj.get(key)
        .and_then(Value::as_u64)
        .map(|v| v as usize)
        .ok_or_else(|| CopError::Parse(format!("missing or invalid \"{}\"", key)))
}

fn parse_entry(v: &Value, what: &str) -> Result<Rat, CopError> {
    match v {
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(Rat::from_integer(i.into()))
            } else {
                Err(CopError::Parse(format!(
                    "{}: non-integer numbers must be given as \"num/den\" strings",
                    what
                )))
            }
        }
        Value::String(s) => {
            parse_rat(s).map_err(|e| CopError::Parse(format!("{}: {}", what, e)))
        }
        _ => Err(CopError::Parse(format!(
            "{}: expected integer or \"num/den\" string",
            what
        ))),
    }
}

fn parse_matrix(v: &Value, p: usize, idx: usize) -> Result<RatMatrix, CopError> {
    let rows = v
        .as_array()
        .ok_or_else(|| CopError::Parse(format!("matrix {} must be an array", idx)))?;
    if rows.len() != p {
        return Err(CopError::Parse(format!(
            "matrix {} has {} rows, expected {}",
            idx,
            rows.len(),
            p
        )));
    }
    let mut data = Vec::with_capacity(p);
    for (i, r) in rows.iter().enumerate() {
        let row = r.as_array().ok_or_else(|| {
            CopError::Parse(format!("matrix {} row {} must be an array", idx, i + 1))
        })?;
        if row.len() != p {
            return Err(CopError::Parse(format!(
                "matrix {} row {} has {} entries, expected {}",
                idx,
                i + 1,
                row.len(),
                p
            )));
        }
        let row = row
            .iter()
            .enumerate()
            .map(|(j, e)| parse_entry(e, &format!("matrix {} entry ({},{})", idx, i + 1, j + 1)))
            .collect::<Result<Vec<_>, _>>()?;
        data.push(row);
    }
    Ok(RatMatrix::from_rows(data))
}

fn parse_point(v: &Value, p: usize, what: &str) -> Result<Vec<Rat>, CopError> {
    let arr = v
        .as_array()
        .ok_or_else(|| CopError::Parse(format!("{} must be an array", what)))?;
    if arr.len() != p {
        return Err(CopError::Parse(format!(
            "{} has {} coordinates, expected {}",
            what,
            arr.len(),
            p
        )));
    }
    arr.iter()
        .enumerate()
        .map(|(i, e)| parse_entry(e, &format!("{} coordinate {}", what, i + 1)))
        .collect()
}

fn parse_hint(v: &Value, p: usize) -> Result<Vec<Vec<Vec<Rat>>>, CopError> {
    let polys = v
        .as_array()
        .ok_or_else(|| CopError::Parse("immobile_hint must be an array of polytopes".into()))?;
    polys
        .iter()
        .enumerate()
        .map(|(s, poly)| {
            let verts = poly.as_array().ok_or_else(|| {
                CopError::Parse(format!("immobile_hint polytope {} must be a vertex array", s + 1))
            })?;
            verts
                .iter()
                .enumerate()
                .map(|(j, t)| {
                    let pt = parse_point(
                        t,
                        p,
                        &format!("immobile_hint polytope {} vertex {}", s + 1, j + 1),
                    )?;
                    if !is_simplex_point(&pt) {
                        return Err(CopError::Parse(format!(
                            "immobile_hint polytope {} vertex {} is not a simplex point",
                            s + 1,
                            j + 1
                        )));
                    }
                    Ok(pt)
                })
                .collect()
        })
        .collect()
}

fn parse_certified(v: &Value, n: usize) -> Result<Vec<CertifiedDual>, CopError> {
    let arr = v
        .as_array()
        .ok_or_else(|| CopError::Parse("certified_dual must be an array".into()))?;
    arr.iter()
        .enumerate()
        .map(|(i, e)| {
            let obj = e.as_object().ok_or_else(|| {
                CopError::Parse(format!("certified_dual entry {} must be an object", i + 1))
            })?;
            let cost_v = obj
                .get("cost")
                .and_then(Value::as_array)
                .ok_or_else(|| CopError::Parse("certified_dual entry missing \"cost\"".into()))?;
            if cost_v.len() != n {
                return Err(CopError::Parse(format!(
                    "certified_dual cost has {} entries, expected {}",
                    cost_v.len(),
                    n
                )));
            }
            let cost = cost_v
                .iter()
                .map(|c| parse_entry(c, "certified_dual cost"))
                .collect::<Result<Vec<_>, _>>()?;
            let value = parse_entry(
                obj.get("value")
                    .ok_or_else(|| CopError::Parse("certified_dual entry missing \"value\"".into()))?,
                "certified_dual value",
            )?;
            let attained = obj
                .get("attained")
                .and_then(Value::as_bool)
                .unwrap_or(true);
            Ok(CertifiedDual {
                cost,
                value,
                attained,
            })
        })
        .collect()
}

/// Nonnegative coordinates summing to one.
pub fn is_simplex_point(t: &[Rat]) -> bool {
    use num::traits::{One, Signed};
    !t.is_empty()
        && t.iter().all(|v| !v.is_negative())
        && t.iter().fold(Rat::zero(), |a, b| a + b).is_one()
}

/// The `k`-th simplex vertex (zero-based) in dimension `p`.
pub fn unit_vertex(p: usize, k: usize) -> Vec<Rat> {
    use num::traits::One;
    let mut v = vec![Rat::zero(); p];
    v[k] = Rat::one();
    v
}

/// A validated point of the standard simplex.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct SimplexPoint(Vec<Rat>);

impl SimplexPoint {
    pub fn new(coords: Vec<Rat>) -> Result<Self, CopError> {
        if !is_simplex_point(&coords) {
            return Err(CopError::Dimension(
                "coordinates must be nonnegative and sum to one".into(),
            ));
        }
        Ok(SimplexPoint(coords))
    }

    pub fn coords(&self) -> &[Rat] {
        &self.0
    }
}
