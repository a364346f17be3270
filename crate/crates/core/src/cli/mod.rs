//! Command-line front end. The `uricci` binary is a thin wrapper over
//! [`run`].

pub mod output;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::algebra::{classify, MetricState, StructureConstants};
use crate::curvature::curvature_profile;
use crate::dynamics::regions::limit_config;
use crate::dynamics::{
    classify_region, fit_asymptotics, rescaled_drc_growth, trace_separatrix, FixedPoint,
};
use crate::error::Error;
use crate::flow::{integrate, FlowFormulation, InitialState, IntegratorConfig, Method, Trajectory};
use crate::moduli::{canonicalize, isometry_equivalent, separating_check};
use output::{format_f64, sidecar_path, to_json, write_csv, OutputRecord};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_PARSE: i32 = 3;
pub const EXIT_INTEGRATION: i32 = 4;
pub const EXIT_CLASS: i32 = 5;

const EXIT_HELP: &str = "Exit codes: 0 ok, 2 invalid input, 3 parse failure, \
4 integration failure, 5 class mismatch.";

/// Tolerance band used when labelling regions.
const REGION_TOL: f64 = 1e-4;

#[derive(Debug, Parser)]
#[command(name = "uricci", version, about = "Ricci flow on 3D unimodular Lie groups", after_help = EXIT_HELP)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FormulationArg {
    Q,
    A,
    M,
    MScaled,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodArg {
    Rk4,
    Rkf45,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassArg {
    Sl2r,
    E2,
}

#[derive(Debug, Clone, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "lowercase")]
pub enum Command {
    /// Bianchi class, canonical moduli point and phase-plane region.
    #[command(allow_negative_numbers = true, after_help = EXIT_HELP)]
    Classify { a1: f64, a2: f64, a3: f64 },

    /// Full curvature profile in the Milnor frame.
    #[command(allow_negative_numbers = true, after_help = EXIT_HELP)]
    Curvature { a1: f64, a2: f64, a3: f64 },

    /// Integrate one formulation of the flow and write the trajectory as CSV.
    ///
    /// --initial takes l1,l2,l3,q1,q2,q3 for q, a1,a2,a3 for a, m2,m3 for m
    /// and m2,m3,a1_sq for m-scaled.
    #[command(allow_negative_numbers = true, after_help = EXIT_HELP)]
    Evolve {
        #[arg(long, value_enum)]
        formulation: FormulationArg,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        initial: Vec<f64>,
        #[arg(long, default_value_t = 10.0, allow_hyphen_values = true)]
        t_end: f64,
        #[arg(long, value_enum, default_value = "rkf45")]
        method: MethodArg,
        #[arg(long, default_value_t = 1e-3)]
        step: f64,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long)]
        out: PathBuf,
    },

    /// Seed an N x N grid and write forward and backward polylines.
    #[command(allow_negative_numbers = true, after_help = EXIT_HELP)]
    Portrait {
        #[arg(long)]
        grid: usize,
        #[arg(long, default_value_t = 5000.0)]
        t_span: f64,
        /// m2_min,m2_max,m3_min,m3_max
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "-0.2,1.2,-2.2,1.2")]
        window: Vec<f64>,
        #[arg(long)]
        out: PathBuf,
    },

    /// Test two triples for equivalence up to isometry and scaling.
    #[command(allow_negative_numbers = true, after_help = EXIT_HELP)]
    Equivalent {
        a1: f64,
        a2: f64,
        a3: f64,
        b1: f64,
        b2: f64,
        b3: f64,
        #[arg(long, default_value_t = crate::moduli::DEFAULT_EQUIV_TOL)]
        tol: f64,
    },

    /// Trace the separatrix from (0,-1) to (1,0) and write it as CSV.
    #[command(after_help = EXIT_HELP)]
    Separatrix {
        #[arg(long, default_value_t = 256)]
        samples: usize,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long)]
        out: PathBuf,
    },

    /// Fit the long-time laws of the metric flow.
    ///
    /// --initial takes l1,l2,l3,q1,q2,q3; defaults to (1,1,-1,1,1,1) for
    /// sl2r and (1,1,0,2,1,1) for e2.
    #[command(allow_negative_numbers = true, after_help = EXIT_HELP)]
    Asymptotics {
        #[arg(long, value_enum)]
        class: ClassArg,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        initial: Option<Vec<f64>>,
        #[arg(long)]
        t_end: Option<f64>,
    },

    /// Re-run the command recorded in a JSON output file.
    #[command(after_help = EXIT_HELP)]
    Replay { file: PathBuf },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Classify { .. } => "classify",
            Command::Curvature { .. } => "curvature",
            Command::Evolve { .. } => "evolve",
            Command::Portrait { .. } => "portrait",
            Command::Equivalent { .. } => "equivalent",
            Command::Separatrix { .. } => "separatrix",
            Command::Asymptotics { .. } => "asymptotics",
            Command::Replay { .. } => "replay",
        }
    }
}

/// Failure carrying its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::StepUnderflow { .. } | Error::TraceDiverged(_) => EXIT_INTEGRATION,
            Error::WrongClass { .. } => EXIT_CLASS,
            _ => EXIT_INPUT,
        };
        Failure { code, message: e.to_string() }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure { code: EXIT_IO, message: e.to_string() }
    }
}

fn input_error(msg: impl Into<String>) -> Failure {
    Failure { code: EXIT_INPUT, message: msg.into() }
}

fn triple(a1: f64, a2: f64, a3: f64) -> Result<StructureConstants, Failure> {
    Ok(StructureConstants::new(a1, a2, a3)?)
}

/// Parses `args` (including the program name), runs the command and writes
/// its JSON record to `out`. Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut impl Write, err: &mut impl Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PARSE } else { EXIT_OK };
            let _ = if e.use_stderr() {
                write!(err, "{}", e.render())
            } else {
                write!(out, "{}", e.render())
            };
            return code;
        }
    };
    match execute(&cli.command) {
        Ok(record) => {
            let _ = out.write_all(to_json(&record).as_bytes());
            EXIT_OK
        }
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

pub fn execute(cmd: &Command) -> Result<OutputRecord, Failure> {
    let payload = match cmd {
        Command::Classify { a1, a2, a3 } => cmd_classify(triple(*a1, *a2, *a3)?)?,
        Command::Curvature { a1, a2, a3 } => {
            serde_json::to_value(curvature_profile(&triple(*a1, *a2, *a3)?)).expect("serializable")
        }
        Command::Evolve { formulation, initial, t_end, method, step, tol, out } => {
            let cfg = IntegratorConfig {
                method: match method {
                    MethodArg::Rk4 => Method::Rk4Fixed,
                    MethodArg::Rkf45 => Method::Rkf45Adaptive,
                },
                step: *step,
                abs_tol: *tol,
                rel_tol: *tol,
                t_end: *t_end,
                ..IntegratorConfig::default()
            };
            cmd_evolve(*formulation, initial, &cfg, out, cmd)?
        }
        Command::Portrait { grid, t_span, window, out } => cmd_portrait(*grid, *t_span, window, out, cmd)?,
        Command::Equivalent { a1, a2, a3, b1, b2, b3, tol } => {
            cmd_equivalent(triple(*a1, *a2, *a3)?, triple(*b1, *b2, *b3)?, *tol)?
        }
        Command::Separatrix { samples, tol, out } => cmd_separatrix(*samples, *tol, out, cmd)?,
        Command::Asymptotics { class, initial, t_end } => cmd_asymptotics(*class, initial.as_deref(), *t_end)?,
        Command::Replay { file } => {
            let text = fs::read_to_string(file)?;
            let v: serde_json::Value =
                serde_json::from_str(&text).map_err(|e| input_error(e.to_string()))?;
            let inner: Command = serde_json::from_value(v["inputs"].clone())
                .map_err(|e| input_error(format!("no replayable inputs: {e}")))?;
            if matches!(inner, Command::Replay { .. }) {
                return Err(input_error("refusing to replay a replay"));
            }
            return execute(&inner);
        }
    };
    Ok(OutputRecord::new(cmd.name(), cmd, &payload))
}

fn cmd_classify(a: StructureConstants) -> Result<serde_json::Value, Failure> {
    let class = classify(&a);
    let canonical = canonicalize(&a);
    let sep = trace_separatrix(256, 1e-10)?;
    let (region, region_error) = match classify_region(&canonical, &sep, REGION_TOL) {
        Ok(r) => (Some(r), None),
        Err(e @ Error::AmbiguousNearBoundary { .. }) => (None, Some(e.to_string())),
        Err(e) => return Err(e.into()),
    };
    Ok(json!({
        "class": class.to_string(),
        "lie_algebra": class.lie_algebra(),
        "lie_group": class.lie_group(),
        "canonical": canonical,
        "region": region,
        "region_error": region_error,
    }))
}

fn initial_state(f: FormulationArg, v: &[f64]) -> Result<(FlowFormulation, InitialState), Failure> {
    let want = match f {
        FormulationArg::Q => 6,
        FormulationArg::A | FormulationArg::MScaled => 3,
        FormulationArg::M => 2,
    };
    if v.len() != want {
        return Err(input_error(format!("--initial needs {want} values, got {}", v.len())));
    }
    Ok(match f {
        FormulationArg::Q => (
            FlowFormulation::QFlow,
            InitialState::Metric(MetricState::new([v[0], v[1], v[2]], [v[3], v[4], v[5]])?),
        ),
        FormulationArg::A => {
            (FlowFormulation::AFlow, InitialState::Constants(triple(v[0], v[1], v[2])?))
        }
        FormulationArg::M => (FlowFormulation::MFlowAutonomous, InitialState::Moduli { m2: v[0], m3: v[1] }),
        FormulationArg::MScaled => (
            FlowFormulation::MFlowScaled,
            InitialState::ScaledModuli { m2: v[0], m3: v[1], a1_sq: v[2] },
        ),
    })
}

fn trajectory_rows(tr: &Trajectory) -> impl Iterator<Item = Vec<String>> + '_ {
    tr.samples.iter().map(|s| {
        std::iter::once(format_f64(s.t)).chain(s.state.iter().map(|x| format_f64(*x))).collect()
    })
}

fn write_sidecar(path: &Path, cmd: &Command, payload: &serde_json::Value) -> Result<(), Failure> {
    let record = OutputRecord::new(cmd.name(), cmd, payload);
    fs::write(sidecar_path(path), to_json(&record))?;
    Ok(())
}

fn cmd_evolve(
    f: FormulationArg,
    initial: &[f64],
    cfg: &IntegratorConfig,
    out: &Path,
    cmd: &Command,
) -> Result<serde_json::Value, Failure> {
    let (formulation, init) = initial_state(f, initial)?;
    let tr = integrate(formulation, &init, cfg)?;
    let mut header = vec!["t"];
    header.extend_from_slice(formulation.state_labels());
    write_csv(out, &header, trajectory_rows(&tr))?;
    let payload = json!({
        "csv": out,
        "formulation": formulation,
        "lambda": tr.lambda,
        "samples": tr.samples.len(),
        "termination": tr.termination,
        "final": tr.last(),
    });
    write_sidecar(out, cmd, &payload)?;
    Ok(payload)
}

#[derive(Debug, Clone, Serialize)]
struct BranchSummary {
    termination: Option<crate::flow::Termination>,
    error: Option<String>,
    end: Option<(f64, f64)>,
    /// Nearest fixed point of the canonical form of the end point.
    nearest: Option<FixedPoint>,
    distance: Option<f64>,
}

/// Nearest of `p1..p4` after mapping a chart point back into the
/// fundamental domain.
pub fn canonical_nearest(m2: f64, m3: f64) -> Option<(FixedPoint, f64)> {
    let a = StructureConstants::new(1.0, m2, m3).ok()?;
    let (c2, c3) = canonicalize(&a).coords().ok()?;
    Some(FixedPoint::nearest(c2, c3))
}

fn summarize(r: &Result<Trajectory, Error>) -> BranchSummary {
    match r {
        Ok(tr) => {
            let s = &tr.last().state;
            let near = canonical_nearest(s[0], s[1]);
            BranchSummary {
                termination: Some(tr.termination),
                error: None,
                end: Some((s[0], s[1])),
                nearest: near.map(|n| n.0),
                distance: near.map(|n| n.1),
            }
        }
        Err(e) => BranchSummary { termination: None, error: Some(e.to_string()), end: None, nearest: None, distance: None },
    }
}

fn cmd_portrait(
    grid: usize,
    t_span: f64,
    window: &[f64],
    out: &Path,
    cmd: &Command,
) -> Result<serde_json::Value, Failure> {
    if grid < 2 {
        return Err(input_error("--grid must be at least 2"));
    }
    if window.len() != 4 || !(window[0] < window[1] && window[2] < window[3]) {
        return Err(input_error("--window needs m2_min,m2_max,m3_min,m3_max with min < max"));
    }
    if !(t_span > 0.0 && t_span.is_finite()) {
        return Err(input_error("--t-span must be positive"));
    }
    let lerp = |lo: f64, hi: f64, i: usize| lo + (hi - lo) * i as f64 / (grid - 1) as f64;
    let seeds: Vec<(f64, f64)> = (0..grid * grid)
        .map(|k| (lerp(window[0], window[1], k % grid), lerp(window[2], window[3], k / grid)))
        .collect();
    let base = limit_config();
    let runs: Vec<_> = seeds
        .par_iter()
        .map(|&(m2, m3)| {
            let init = InitialState::Moduli { m2, m3 };
            let fwd = integrate(FlowFormulation::MFlowAutonomous, &init, &base.with_t_end(t_span));
            let bwd = integrate(FlowFormulation::MFlowAutonomous, &init, &base.with_t_end(-t_span));
            (fwd, bwd)
        })
        .collect();

    let mut rows = Vec::new();
    let mut summaries = Vec::new();
    let mut ok = 0;
    for (k, ((m2, m3), (fwd, bwd))) in seeds.iter().zip(&runs).enumerate() {
        for (dir, r) in [("forward", fwd), ("backward", bwd)] {
            if let Ok(tr) = r {
                ok += 1;
                for s in &tr.samples {
                    rows.push(vec![
                        k.to_string(),
                        dir.to_string(),
                        format_f64(s.t),
                        format_f64(s.state[0]),
                        format_f64(s.state[1]),
                    ]);
                }
            }
        }
        summaries.push(json!({
            "index": k,
            "seed": (m2, m3),
            "forward": summarize(fwd),
            "backward": summarize(bwd),
        }));
    }
    write_csv(out, &["seed", "direction", "t", "m2", "m3"], rows)?;
    let payload = json!({
        "csv": out,
        "grid": grid,
        "t_span": t_span,
        "window": window,
        "seeds": summaries,
    });
    write_sidecar(out, cmd, &payload)?;
    if ok == 0 {
        return Err(Failure { code: EXIT_INTEGRATION, message: "every seed failed".into() });
    }
    Ok(payload)
}

fn cmd_equivalent(a: StructureConstants, b: StructureConstants, tol: f64) -> Result<serde_json::Value, Failure> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(input_error("--tol must be positive"));
    }
    let verdict = isometry_equivalent(&a, &b, tol);
    let (oracle, note) = match separating_check(&a, &b) {
        Ok(v) => (Some(v), None),
        Err(e) => (None, Some(e.to_string())),
    };
    Ok(json!({
        "canonical_a": canonicalize(&a),
        "canonical_b": canonicalize(&b),
        "equivalent": verdict,
        "invariants_agree": oracle,
        "oracle_agrees": oracle.map(|o| o == verdict),
        "oracle_note": note,
    }))
}

fn cmd_separatrix(n: usize, tol: f64, out: &Path, cmd: &Command) -> Result<serde_json::Value, Failure> {
    let sep = trace_separatrix(n, tol)?;
    let rows = sep.samples.iter().map(|(a, b)| vec![format_f64(*a), format_f64(*b)]);
    write_csv(out, &["m2", "m3"], rows)?;
    let payload = json!({
        "csv": out,
        "samples": sep.samples.len(),
        "taylor_coeffs": sep.taylor_coeffs,
        "tol": sep.tol,
    });
    write_sidecar(out, cmd, &payload)?;
    Ok(payload)
}

fn cmd_asymptotics(class: ClassArg, initial: Option<&[f64]>, t_end: Option<f64>) -> Result<serde_json::Value, Failure> {
    let (default_init, default_t) = match class {
        ClassArg::Sl2r => ([1.0, 1.0, -1.0, 1.0, 1.0, 1.0], 1000.0),
        ClassArg::E2 => ([1.0, 1.0, 0.0, 2.0, 1.0, 1.0], 40.0),
    };
    let v = initial.unwrap_or(&default_init);
    if v.len() != 6 {
        return Err(input_error("--initial needs l1,l2,l3,q1,q2,q3"));
    }
    let s0 = MetricState::new([v[0], v[1], v[2]], [v[3], v[4], v[5]])?;
    let found = classify(&crate::algebra::structure_constants_from_metric(&s0));
    let expected = match class {
        ClassArg::Sl2r => crate::algebra::BianchiClass::SL2R,
        ClassArg::E2 => crate::algebra::BianchiClass::E2,
    };
    if found != expected {
        return Err(Error::WrongClass { expected: expected.to_string(), found: found.to_string() }.into());
    }
    let cfg = IntegratorConfig::rkf45(1e-10, t_end.unwrap_or(default_t));
    let fits = fit_asymptotics(&s0, &cfg)?;
    let growth = match class {
        ClassArg::E2 => match rescaled_drc_growth(&s0, &cfg) {
            Ok(g) => Some(g),
            Err(Error::DegenerateFlat) => None,
            Err(e) => return Err(e.into()),
        },
        ClassArg::Sl2r => None,
    };
    Ok(json!({ "fits": fits, "rescaled_drc_growth": growth }))
}
