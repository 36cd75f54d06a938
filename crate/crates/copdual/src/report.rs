//! Report assembly: every pipeline result serializes to a JSON tree whose
//! rationals are exact "num/den" strings and whose indices are 1-based at
//! this boundary. Key order is sorted and iteration orders are fixed, so
//! identical inputs produce byte-identical output. Certificates are
//! embedded in full: a report can be re-verified without rerunning any
//! solver.

use crate::copositive::CopositivityCheck;
use crate::duality::{
    A1Report, AnalysisOutcome, B1Report, Cond2Entry, CondIIReport, CondIReport, ConeCertificate,
    DualityVerdict, DuffinFW,
};
use crate::gap::{CPWitness, DualLevelStatus, GapReport};
use crate::immobile::{ImmobileStatus, ImmobileStructure, IndexSets, SipStatus};
use crate::matrix::RatMatrix;
use crate::model::CopSystem;
use crate::rat::{rat_to_string, Rat};
use serde_json::{json, Value};

pub fn rational(r: &Rat) -> Value {
    Value::String(rat_to_string(r))
}

pub fn vector(v: &[Rat]) -> Value {
    Value::Array(v.iter().map(rational).collect())
}

pub fn matrix(m: &RatMatrix) -> Value {
    Value::Array(m.row_vecs().iter().map(|r| vector(r)).collect())
}

fn pieces(ps: &[Vec<Vec<Rat>>]) -> Value {
    Value::Array(
        ps.iter()
            .map(|piece| Value::Array(piece.iter().map(|v| vector(v)).collect()))
            .collect(),
    )
}

fn one_based(list: &[usize]) -> Value {
    Value::Array(list.iter().map(|i| json!(i + 1)).collect())
}

pub fn system_echo(sys: &CopSystem) -> Value {
    json!({
        "n": sys.n,
        "p": sys.p,
        "matrices": Value::Array(sys.matrices.iter().map(matrix).collect()),
    })
}

pub fn copositivity_report(sys: &CopSystem, x: &[Rat], check: &CopositivityCheck) -> Value {
    let a = sys.eval(x);
    let mut out = json!({
        "command": "check-copositive",
        "x": vector(x),
        "matrix": matrix(&a),
        "copositive": check.copositive,
        "minimum": rational(&check.min.value),
        "argmin": vector(&check.min.argmin),
    });
    if check.copositive {
        let zs = crate::copositive::zero_set(&a).expect("matrix order already validated");
        out["zero_set"] = pieces(&zs);
    } else {
        out["witness"] = json!({
            "t": vector(&check.min.argmin),
            "value": rational(&check.min.value),
        });
    }
    out
}

fn status_str(s: &ImmobileStatus) -> &'static str {
    match s {
        ImmobileStatus::VerifiedExact => "verified-exact",
        ImmobileStatus::Candidate => "candidate",
        ImmobileStatus::Empty => "empty",
    }
}

pub fn immobile_report(imm: &ImmobileStructure) -> Value {
    let mut out = json!({
        "status": status_str(&imm.status),
        "pieces": pieces(&imm.pieces),
        "vertices": Value::Array(imm.vertices.iter().map(|v| vector(v)).collect()),
        "groups": Value::Array(imm.groups.iter().map(|g| one_based(g)).collect()),
        "pairs": Value::Array(
            imm.pairs.iter().map(|(l, q)| json!([l + 1, q + 1])).collect()
        ),
        "notes": imm.notes,
        "budget": {
            "lp_solves": imm.budget.lp_solves,
            "copositivity_checks": imm.budget.copositivity_checks,
            "cuts_added": imm.budget.cuts_added,
        },
    });
    if let Some(s) = &imm.sigma {
        out["sigma"] = rational(s);
    }
    if let Some(fp) = &imm.feasible_point {
        out["feasible_point"] = vector(fp);
    }
    if let Some((x, margin)) = &imm.slater_certificate {
        out["interior_certificate"] = json!({
            "x": vector(x),
            "simplex_minimum": rational(margin),
        });
    }
    if let Some(ma) = &imm.min_active {
        out["min_active"] = json!({
            "x": vector(&ma.x),
            "margin": rational(&ma.margin),
            "strict_rows": Value::Array(ma.strict_rows.iter().map(|(j, k, v)| json!({
                "vertex": j + 1,
                "row": k + 1,
                "value": rational(v),
            })).collect()),
            "zero_set_matches": ma.zero_set_matches,
        });
        if let Some(om) = &ma.omega_min {
            out["min_active"]["off_immobile_minimum"] = rational(om);
        }
    }
    out
}

pub fn index_report(idx: &IndexSets) -> Value {
    let table: Vec<Value> = (0..idx.m.len())
        .map(|j| {
            json!({
                "vertex": j + 1,
                "M": one_based(&idx.m[j]),
                "N_star": one_based(&idx.n_star[j]),
                "N": one_based(&idx.n[j]),
            })
        })
        .collect();
    json!({
        "table": table,
        "witnesses": Value::Array(idx.witnesses.iter().map(|(j, k, x)| json!({
            "vertex": j + 1,
            "row": k + 1,
            "x": vector(x),
        })).collect()),
        "undecided": Value::Array(idx.undecided.iter().map(|(j, k)| json!({
            "vertex": j + 1,
            "row": k + 1,
        })).collect()),
    })
}

pub fn cone_certificate(c: &ConeCertificate) -> Value {
    match c {
        ConeCertificate::Member { combination } => json!({
            "member": true,
            "combination": Value::Array(combination.iter().map(|(t, w)| json!({
                "point": vector(t),
                "weight": rational(w),
            })).collect()),
        }),
        ConeCertificate::NotMember { separator } => json!({
            "member": false,
            "separator": vector(separator),
        }),
        ConeCertificate::Undecided { reason } => json!({
            "undecided": true,
            "reason": reason,
        }),
    }
}

fn b1_report(b: &B1Report) -> Value {
    json!({
        "rank_bilinear": b.rank_a,
        "rank_augmented": b.rank_ab,
        "holds": b.holds,
        "bilinear_columns": b.a_columns,
        "row_columns": b.b_columns,
    })
}

fn a1_report(a: &A1Report) -> Value {
    let mut out = json!({
        "target": vector(&a.target),
        "certificate": cone_certificate(&a.certificate),
        "holds": a.holds,
    });
    if let Some(u) = &a.u_star {
        out["annihilator"] = json!({
            "matrix": matrix(u),
            "atoms": Value::Array(a.u_star_atoms.iter().map(|(t, w)| json!({
                "point": vector(t),
                "weight": rational(w),
            })).collect()),
        });
    }
    out
}

fn cond_i_report(c: &CondIReport) -> Value {
    json!({
        "holds": c.holds,
        "annihilator_test": a1_report(&c.a1),
        "rank_test": b1_report(&c.b1),
        "direct": Value::Array(c.direct.iter().map(|(j, k, cert)| json!({
            "vertex": j + 1,
            "row": k + 1,
            "certificate": cone_certificate(cert),
        })).collect()),
    })
}

fn cond_ii_report(c: &CondIIReport) -> Value {
    json!({
        "holds": c.holds,
        "entries": Value::Array(c.entries.iter().map(|e| json!({
            "vertex": e.j + 1,
            "row": e.k + 1,
            "restricted_immobile": immobile_report(&e.restricted),
            "certificate": cone_certificate(&e.certificate),
        })).collect()),
    })
}

fn cond2_report(entries: &[Cond2Entry]) -> Value {
    Value::Array(
        entries
            .iter()
            .map(|e| {
                json!({
                    "vertex": e.j + 1,
                    "row": e.k + 1,
                    "direct": cone_certificate(&e.direct),
                    "effective": e.effective,
                    "via": e.via,
                })
            })
            .collect(),
    )
}

pub fn verdict_str(v: &DualityVerdict) -> &'static str {
    match v {
        DualityVerdict::UniformDuality => "uniform-duality",
        DualityVerdict::NoUniformDuality => "no-uniform-duality",
        DualityVerdict::Undecided => "undecided",
    }
}

pub fn analysis_report(sys: &CopSystem, out: &AnalysisOutcome) -> Value {
    let mut rep = json!({
        "command": "analyze",
        "input": system_echo(sys),
        "verdict": verdict_str(&out.verdict),
        "immobile": immobile_report(&out.imm),
        "cond2": cond2_report(&out.cond2),
        "notes": out.notes,
    });
    if let Some(idx) = &out.index {
        rep["index_sets"] = index_report(idx);
    }
    if let Some(ci) = &out.condition_i {
        rep["condition_i"] = cond_i_report(ci);
    }
    if let Some(cii) = &out.condition_ii {
        rep["condition_ii"] = cond_ii_report(cii);
    }
    rep
}

fn witness_report(w: &CPWitness) -> Value {
    json!({
        "atoms": Value::Array(w.atoms.iter().map(|(weight, t)| json!({
            "weight": rational(weight),
            "point": vector(t),
        })).collect()),
        "matrix": matrix(&w.matrix),
        "pairings": vector(&w.pairings),
        "objective": rational(&w.objective),
    })
}

fn sip_status_str(s: &SipStatus) -> &'static str {
    match s {
        SipStatus::Optimal => "optimal",
        SipStatus::Infeasible => "infeasible",
        SipStatus::Unbounded => "unbounded",
        SipStatus::BudgetExhausted => "budget-exhausted",
    }
}

pub fn gap_report(rep: &GapReport) -> Value {
    let mut out = json!({
        "command": "gap",
        "cost": vector(&rep.cost),
        "primal": {
            "status": sip_status_str(&rep.primal.status),
        },
        "levels": Value::Array(rep.levels.iter().map(|l| {
            let mut lv = json!({
                "level": l.level,
                "denominator": l.denominator,
                "atoms": l.atom_count,
                "status": match l.status {
                    DualLevelStatus::Feasible => "feasible",
                    DualLevelStatus::Infeasible => "infeasible",
                    DualLevelStatus::Unbounded => "unbounded",
                },
            });
            if let Some(v) = &l.value {
                lv["value"] = rational(v);
            }
            if let Some(w) = &l.witness {
                lv["witness"] = witness_report(w);
            }
            lv
        }).collect()),
        "exact": rep.exact,
        "notes": rep.notes,
    });
    if let Some(v) = &rep.primal.value {
        out["primal"]["value"] = rational(v);
    }
    if let Some(x) = &rep.primal.x {
        out["primal"]["x"] = vector(x);
    }
    if let Some(v) = &rep.dual_value {
        out["dual_value"] = rational(v);
    }
    if let Some(w) = &rep.dual_witness {
        out["dual_witness"] = witness_report(w);
    }
    if let Some((v, attained)) = &rep.recorded_dual {
        out["recorded_dual"] = json!({
            "value": rational(v),
            "attained": attained,
        });
    }
    if let Some(p) = &rep.attainment_probe {
        out["attainment_probe"] = json!(p);
    }
    if let Some(w) = &rep.attained_witness {
        out["attained_witness"] = witness_report(w);
    }
    if let Some(g) = &rep.gap {
        out["gap"] = rational(g);
    }
    if let Some(g) = &rep.gap_upper {
        out["gap_upper_bound"] = rational(g);
    }
    out
}

pub fn duffin_report(d: &DuffinFW) -> Value {
    let vecs = |vs: &[Vec<Rat>]| Value::Array(vs.iter().map(|v| vector(v)).collect());
    json!({
        "command": "duffin",
        "F": vecs(&d.f),
        "W_pre_projection": vecs(&d.w_tilde),
        "W": vecs(&d.w),
        "L_basis": vecs(&d.l_basis),
        "L_perp_basis": vecs(&d.lperp_basis),
        "orthogonality_ok": d.orthogonality_ok,
        "support_ok": d.support_ok,
        "cone_is_linear_ok": d.cone_is_linear_ok,
        "reference_point": vector(&d.xbar),
        "verdict_consistent": d.verdict_consistent,
        "notes": d.notes,
    })
}

/// Render a report tree: pretty JSON by default, or a flat indented text
/// outline. Both renderings are deterministic.
pub fn render(value: &Value, text: bool) -> String {
    if text {
        let mut out = String::new();
        render_text(value, 0, None, &mut out);
        out
    } else {
        let mut s = serde_json::to_string_pretty(value).expect("report trees always serialize");
        s.push('\n');
        s
    }
}

fn render_text(value: &Value, indent: usize, label: Option<&str>, out: &mut String) {
    let pad = "  ".repeat(indent);
    match value {
        Value::Object(map) => {
            if let Some(l) = label {
                out.push_str(&format!("{pad}{l}:\n"));
            }
            for (k, v) in map {
                render_text(v, indent + usize::from(label.is_some()), Some(k), out);
            }
        }
        Value::Array(items) => {
            let l = label.unwrap_or("items");
            if items.is_empty() {
                out.push_str(&format!("{pad}{l}: []\n"));
            } else if items.iter().all(|i| !i.is_object() && !i.is_array()) {
                let flat: Vec<String> = items.iter().map(scalar_text).collect();
                out.push_str(&format!("{pad}{l}: [{}]\n", flat.join(", ")));
            } else {
                out.push_str(&format!("{pad}{l}:\n"));
                for (i, item) in items.iter().enumerate() {
                    render_text(item, indent + 1, Some(&format!("[{i}]")), out);
                }
            }
        }
        other => {
            let l = label.unwrap_or("value");
            out.push_str(&format!("{pad}{l}: {}\n", scalar_text(other)));
        }
    }
}

fn scalar_text(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}
