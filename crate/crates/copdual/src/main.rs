//! Command-line front end.
//!
//! Exit codes: 0 success (and `analyze` verdict uniform-duality), 1 negative
//! finding (non-copositive matrix, no-uniform-duality verdict, unlicensed
//! construction), 2 parse or validation error, 3 undecided verdict.

use clap::{Args, Parser, Subcommand};
use copdual::immobile::EngineConfig;
use copdual::model::CopSystem;
use copdual::rat::{parse_rat, Rat};
use copdual::report;
use copdual::{duality, gap, immobile};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "copdual",
    version,
    about = "Exact uniform-duality analyzer for linear copositive systems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonOpts {
    /// Problem file (JSON).
    file: PathBuf,
    /// Emit a plain-text outline instead of JSON.
    #[arg(long)]
    text: bool,
    /// Emit JSON (the default; kept as an explicit switch).
    #[arg(long, conflicts_with = "text")]
    json: bool,
    /// Refinement rounds for sampling and membership searches.
    #[arg(long)]
    max_rounds: Option<usize>,
    /// Initial grid denominator for simplex sampling.
    #[arg(long)]
    grid_start: Option<u64>,
    /// Initial variable box bound for the cutting-plane engine.
    #[arg(long)]
    box_bound: Option<i64>,
    /// JSON file with candidate immobile pieces to verify instead of
    /// searching (array of pieces, each an array of rational vectors).
    #[arg(long)]
    immobile_hint: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate A(x) and decide copositivity (x defaults to 0).
    CheckCopositive {
        #[command(flatten)]
        common: CommonOpts,
        /// Point x as comma-separated rationals, e.g. "1,-1/2".
        #[arg(long, allow_hyphen_values = true)]
        x: Option<String>,
    },
    /// Compute the immobile set of the constraints.
    Immobile {
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Run the full uniform-duality verdict pipeline.
    Analyze {
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Primal/dual values and duality gap for a cost vector.
    Gap {
        #[command(flatten)]
        common: CommonOpts,
        /// Cost vector as comma-separated rationals, e.g. "0,-1".
        #[arg(long, allow_hyphen_values = true)]
        cost: String,
    },
    /// Construct the explicit pair (F, W) behind the duality theorem.
    Duffin {
        #[command(flatten)]
        common: CommonOpts,
    },
}

fn parse_vector(text: &str) -> Result<Vec<Rat>, String> {
    text.split(',')
        .map(|s| parse_rat(s.trim()).map_err(|e| format!("bad rational '{}': {}", s.trim(), e)))
        .collect()
}

fn load_system(common: &CommonOpts) -> Result<CopSystem, String> {
    let mut sys = CopSystem::from_path(&common.file)
        .map_err(|e| format!("{}: {}", common.file.display(), e))?;
    if let Some(hint_path) = &common.immobile_hint {
        let text = std::fs::read_to_string(hint_path)
            .map_err(|e| format!("{}: {}", hint_path.display(), e))?;
        let v: serde_json::Value = serde_json::from_str(&text)
            .map_err(|e| format!("{}: invalid JSON: {}", hint_path.display(), e))?;
        let arr = v
            .as_array()
            .ok_or_else(|| format!("{}: hint must be an array of pieces", hint_path.display()))?;
        let mut pieces = Vec::new();
        for piece in arr {
            let verts = piece
                .as_array()
                .ok_or_else(|| "hint piece must be an array of vertices".to_string())?;
            let mut out = Vec::new();
            for vert in verts {
                let coords = vert
                    .as_array()
                    .ok_or_else(|| "hint vertex must be an array of rationals".to_string())?;
                let mut point = Vec::new();
                for c in coords {
                    let s = match c {
                        serde_json::Value::String(s) => s.clone(),
                        serde_json::Value::Number(n) => n.to_string(),
                        _ => return Err("hint coordinates must be rationals".into()),
                    };
                    point.push(parse_rat(&s).map_err(|e| format!("bad rational '{s}': {e}"))?);
                }
                out.push(point);
            }
            pieces.push(out);
        }
        sys.immobile_hint = Some(pieces);
    }
    Ok(sys)
}

fn engine_config(common: &CommonOpts) -> EngineConfig {
    let mut cfg = EngineConfig::default();
    if let Some(r) = common.max_rounds {
        cfg.max_rounds = r;
    }
    if let Some(g) = common.grid_start {
        cfg.grid_start = g;
    }
    if let Some(b) = common.box_bound {
        cfg.box_bound = b;
    }
    cfg
}

fn emit(common: &CommonOpts, value: &serde_json::Value) {
    print!("{}", report::render(value, common.text));
}

fn fail(msg: &str) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(2)
}

fn run() -> ExitCode {
    let cli = Cli::parse();
    let started = std::time::Instant::now();
    let code = match &cli.command {
        Command::CheckCopositive { common, x } => cmd_check_copositive(common, x.as_deref()),
        Command::Immobile { common } => cmd_immobile(common),
        Command::Analyze { common } => cmd_analyze(common),
        Command::Gap { common, cost } => cmd_gap(common, cost),
        Command::Duffin { common } => cmd_duffin(common),
    };
    eprintln!("elapsed: {:.3}s", started.elapsed().as_secs_f64());
    code
}

fn main() -> ExitCode {
    run()
}

fn cmd_check_copositive(common: &CommonOpts, x: Option<&str>) -> ExitCode {
    let sys = match load_system(common) {
        Ok(s) => s,
        Err(e) => return fail(&e),
    };
    let x = match x {
        Some(text) => match parse_vector(text) {
            Ok(v) => v,
            Err(e) => return fail(&e),
        },
        None => vec![Rat::from_integer(0.into()); sys.n],
    };
    if x.len() != sys.n {
        return fail(&format!("x has {} entries, expected {}", x.len(), sys.n));
    }
    let a = sys.eval(&x);
    let check = match copdual::copositive::is_copositive(&a) {
        Ok(c) => c,
        Err(e) => return fail(&e.to_string()),
    };
    let rep = report::copositivity_report(&sys, &x, &check);
    emit(common, &rep);
    if check.copositive {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn cmd_immobile(common: &CommonOpts) -> ExitCode {
    let sys = match load_system(common) {
        Ok(s) => s,
        Err(e) => return fail(&e),
    };
    let cfg = engine_config(common);
    let imm = match immobile::find_immobile_set(&sys, &cfg) {
        Ok(i) => i,
        Err(e) => return fail(&e.to_string()),
    };
    let mut rep = report::immobile_report(&imm);
    rep["command"] = serde_json::json!("immobile");
    emit(common, &rep);
    ExitCode::SUCCESS
}

fn cmd_analyze(common: &CommonOpts) -> ExitCode {
    let sys = match load_system(common) {
        Ok(s) => s,
        Err(e) => return fail(&e),
    };
    let cfg = engine_config(common);
    let out = match duality::analyze(&sys, &cfg) {
        Ok(o) => o,
        Err(e) => return fail(&e.to_string()),
    };
    let rep = report::analysis_report(&sys, &out);
    emit(common, &rep);
    match out.verdict {
        duality::DualityVerdict::UniformDuality => ExitCode::SUCCESS,
        duality::DualityVerdict::NoUniformDuality => ExitCode::from(1),
        duality::DualityVerdict::Undecided => ExitCode::from(3),
    }
}

fn cmd_gap(common: &CommonOpts, cost: &str) -> ExitCode {
    let sys = match load_system(common) {
        Ok(s) => s,
        Err(e) => return fail(&e),
    };
    let cost = match parse_vector(cost) {
        Ok(c) => c,
        Err(e) => return fail(&e),
    };
    if cost.len() != sys.n {
        return fail(&format!(
            "cost has {} entries, expected {}",
            cost.len(),
            sys.n
        ));
    }
    let cfg = engine_config(common);
    let rep = match gap::duality_gap(&sys, &cost, &cfg) {
        Ok(r) => r,
        Err(e) => return fail(&e.to_string()),
    };
    let val = report::gap_report(&rep);
    emit(common, &val);
    ExitCode::SUCCESS
}

fn cmd_duffin(common: &CommonOpts) -> ExitCode {
    let sys = match load_system(common) {
        Ok(s) => s,
        Err(e) => return fail(&e),
    };
    let cfg = engine_config(common);
    let out = match duality::analyze(&sys, &cfg) {
        Ok(o) => o,
        Err(e) => return fail(&e.to_string()),
    };
    if out.verdict != duality::DualityVerdict::UniformDuality {
        let rep = serde_json::json!({
            "command": "duffin",
            "error": "construction requires the uniform-duality verdict",
            "verdict": report::verdict_str(&out.verdict),
        });
        emit(common, &rep);
        return ExitCode::from(1);
    }
    let df = match duality::duffin_fw(&sys, &out, &cfg) {
        Ok(d) => d,
        Err(e) => return fail(&e.to_string()),
    };
    let rep = report::duffin_report(&df);
    emit(common, &rep);
    ExitCode::SUCCESS
}
