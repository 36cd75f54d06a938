//! Python bindings: a thin JSON bridge over the analyzer.
//!
//! Reports cross the boundary as the same JSON documents the CLI prints,
//! so Python callers see exactly what a report consumer would see —
//! rationals as exact "num/den" strings, indices 1-based, certificates
//! embedded.

use copdual::immobile::EngineConfig;
use copdual::model::CopSystem;
use copdual::rat::{parse_rat, Rat};
use copdual::{duality, gap, immobile, report};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_vec(values: Vec<String>) -> PyResult<Vec<Rat>> {
    values
        .iter()
        .map(|s| parse_rat(s).map_err(err))
        .collect::<Result<Vec<_>, _>>()
}

/// Analyzer for one linear copositive constraint system.
#[pyclass]
struct Analyzer {
    sys: CopSystem,
    cfg: EngineConfig,
}

#[pymethods]
impl Analyzer {
    /// Build from a problem document (JSON text).
    #[new]
    fn new(json: &str) -> PyResult<Self> {
        Ok(Analyzer {
            sys: CopSystem::from_json(json).map_err(err)?,
            cfg: EngineConfig::default(),
        })
    }

    /// Build from a problem file path.
    #[staticmethod]
    fn from_file(path: &str) -> PyResult<Self> {
        Ok(Analyzer {
            sys: CopSystem::from_path(std::path::Path::new(path)).map_err(err)?,
            cfg: EngineConfig::default(),
        })
    }

    /// Number of decision variables.
    #[getter]
    fn n(&self) -> usize {
        self.sys.n
    }

    /// Matrix order.
    #[getter]
    fn p(&self) -> usize {
        self.sys.p
    }

    /// Adjust engine budgets. Unset arguments keep their current value.
    #[pyo3(signature = (max_rounds=None, grid_start=None, box_bound=None))]
    fn configure(
        &mut self,
        max_rounds: Option<usize>,
        grid_start: Option<u64>,
        box_bound: Option<i64>,
    ) {
        if let Some(r) = max_rounds {
            self.cfg.max_rounds = r;
        }
        if let Some(g) = grid_start {
            self.cfg.grid_start = g;
        }
        if let Some(b) = box_bound {
            self.cfg.box_bound = b;
        }
    }

    /// Copositivity report for A(x) (x defaults to 0), as JSON.
    #[pyo3(signature = (x=None))]
    fn check_copositive(&self, x: Option<Vec<String>>) -> PyResult<String> {
        let x = match x {
            Some(v) => parse_vec(v)?,
            None => vec![Rat::from_integer(0.into()); self.sys.n],
        };
        if x.len() != self.sys.n {
            return Err(err(format!(
                "x has {} entries, expected {}",
                x.len(),
                self.sys.n
            )));
        }
        let a = self.sys.eval(&x);
        let check = copdual::copositive::is_copositive(&a).map_err(err)?;
        let rep = report::copositivity_report(&self.sys, &x, &check);
        Ok(report::render(&rep, false))
    }

    /// Immobile-set report, as JSON.
    fn immobile(&self) -> PyResult<String> {
        let imm = immobile::find_immobile_set(&self.sys, &self.cfg).map_err(err)?;
        let mut rep = report::immobile_report(&imm);
        rep["command"] = serde_json::json!("immobile");
        Ok(report::render(&rep, false))
    }

    /// Full uniform-duality analysis report, as JSON.
    fn analyze(&self) -> PyResult<String> {
        let out = duality::analyze(&self.sys, &self.cfg).map_err(err)?;
        let rep = report::analysis_report(&self.sys, &out);
        Ok(report::render(&rep, false))
    }

    /// Duality-gap report for a cost vector (rational strings), as JSON.
    fn gap(&self, cost: Vec<String>) -> PyResult<String> {
        let cost = parse_vec(cost)?;
        if cost.len() != self.sys.n {
            return Err(err(format!(
                "cost has {} entries, expected {}",
                cost.len(),
                self.sys.n
            )));
        }
        let rep = gap::duality_gap(&self.sys, &cost, &self.cfg).map_err(err)?;
        Ok(report::render(&report::gap_report(&rep), false))
    }

    /// Explicit (F, W) construction report, as JSON. On instances whose
    /// verdict is not uniform-duality the document carries an "error" key.
    fn duffin(&self) -> PyResult<String> {
        let out = duality::analyze(&self.sys, &self.cfg).map_err(err)?;
        if out.verdict != duality::DualityVerdict::UniformDuality {
            let rep = serde_json::json!({
                "command": "duffin",
                "error": "construction requires the uniform-duality verdict",
                "verdict": report::verdict_str(&out.verdict),
            });
            return Ok(report::render(&rep, false));
        }
        let df = duality::duffin_fw(&self.sys, &out, &self.cfg).map_err(err)?;
        Ok(report::render(&report::duffin_report(&df), false))
    }
}

#[pymodule]
fn copdual_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Analyzer>()?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
