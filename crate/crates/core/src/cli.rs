//! The `pshape` command line.
//!
//! Exit codes: 0 success, 1 usage or I/O, 2 geometric failure, 3 p-shape
//! mismatch. Failures print a JSON object with an `error` code on stderr.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::catalog::AnalyticCurve;
use crate::curve::{CurveSamples, Tolerances};
use crate::error::{Error, Result};
use crate::frenet::{frenet_apparatus, SabbanCase};
use crate::io;
use crate::minkowski::MinkowskiVec;
use crate::pshape::{pshape_from_frenet, pshape_of, PShapeProfile};
use crate::reconstruct::{reconstruct_curve, InitialFrame, PShapeSpec, ShapeFn};
use crate::registration::{estimate_similarity, verify_match};
use crate::split_quaternion::{PSimilarity, SplitQuaternion};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_GEOMETRIC: i32 = 2;
pub const EXIT_MISMATCH: i32 = 3;

const NORM_WARN: f64 = 1e-6;

#[derive(Parser, Debug)]
#[command(
    name = "pshape",
    version,
    about = "p-shape invariants of curves in Minkowski 3-space"
)]
struct Cli {
    #[command(flatten)]
    config: CliConfig,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct CliConfig {
    /// Integration step and default sampling step.
    #[arg(long, global = true, default_value_t = 1e-3)]
    pub step: f64,
    #[arg(long = "tol-lightlike", global = true, default_value_t = 1e-8)]
    pub lightlike_tol: f64,
    #[arg(long = "tol-curvature", global = true, default_value_t = 1e-10)]
    pub curvature_floor: f64,
    /// Largest p-shape distance accepted by `match`.
    #[arg(long = "tol-match", global = true, default_value_t = 1e-3)]
    pub match_threshold: f64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum CaseArg {
    #[value(name = "timelike-t")]
    T,
    #[value(name = "timelike-c")]
    C,
    #[value(name = "timelike-q")]
    Q,
}

impl From<CaseArg> for SabbanCase {
    fn from(c: CaseArg) -> Self {
        match c {
            CaseArg::T => SabbanCase::T,
            CaseArg::C => SabbanCase::C,
            CaseArg::Q => SabbanCase::Q,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Frenet apparatus and p-shape of a curve.
    Analyze {
        /// Curve JSON, curve CSV or example://name?a=..&b=..
        curve: String,
        /// Also write the Frenet data as CSV here.
        #[arg(long)]
        frenet: Option<PathBuf>,
    },
    /// Curve with a prescribed p-shape.
    Reconstruct {
        /// p-shape JSON as written by `analyze`.
        pshape: Option<PathBuf>,
        #[arg(long, value_enum)]
        case: Option<CaseArg>,
        /// Constant p-shape `kappa_tilde,tau_tilde` instead of a file.
        #[arg(long, allow_hyphen_values = true)]
        constant: Option<String>,
        #[arg(long = "sigma-range", allow_hyphen_values = true)]
        sigma_range: Option<String>,
        /// Initial frame JSON {"x0","e1","e2","e3"}.
        #[arg(long)]
        frame: Option<PathBuf>,
        /// Homothety constant in `ds/dσ = b·exp(∫κ̃)`.
        #[arg(long, default_value_t = 1.0)]
        b: f64,
        /// Re-analyze the result and print the sup-norm p-shape residual.
        #[arg(long)]
        verify: bool,
    },
    /// Registers two curves with equal p-shape.
    Match { a: String, b: String },
    /// Applies `r ↦ μ q r q⁻¹ + b` to a curve.
    Transform {
        curve: String,
        #[arg(long, allow_hyphen_values = true)]
        mu: Option<f64>,
        /// Split quaternion `w,x,y,z`, rescaled to N(q) = 1.
        #[arg(long, allow_hyphen_values = true)]
        q: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        b: Option<String>,
        /// Similarity JSON {"mu","q","b"}.
        #[arg(long, conflicts_with_all = ["mu", "q", "b", "random"])]
        similarity: Option<PathBuf>,
        /// Draw an orientation-preserving similarity from --seed.
        #[arg(long, conflicts_with_all = ["mu", "q", "b"])]
        random: bool,
        /// Write the applied similarity as JSON here.
        #[arg(long = "similarity-out")]
        similarity_out: Option<PathBuf>,
    },
    /// Samples a built-in curve.
    Example {
        #[arg(long)]
        name: String,
        /// Constants such as `a=1,b=0.5`.
        #[arg(long, allow_hyphen_values = true)]
        params: Option<String>,
        #[arg(long = "sigma-range", allow_hyphen_values = true)]
        sigma_range: Option<String>,
        #[arg(long)]
        n: Option<usize>,
    },
    /// Residual of a known similarity between two curves.
    Verify {
        a: String,
        b: String,
        #[arg(long)]
        similarity: PathBuf,
    },
}

impl CliConfig {
    fn tolerances(&self) -> Result<Tolerances> {
        let checks = [
            ("step", self.step),
            ("tol-lightlike", self.lightlike_tol),
            ("tol-curvature", self.curvature_floor),
            ("tol-match", self.match_threshold),
        ];
        for (name, v) in checks {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidInput(format!("--{name} must be positive")));
            }
        }
        Ok(Tolerances {
            lightlike: self.lightlike_tol,
            curvature_floor: self.curvature_floor,
            ..Tolerances::default()
        })
    }

    fn emit(&self, text: &str) -> Result<()> {
        match &self.out {
            Some(p) => io::write_atomic(p, text.as_bytes()),
            None => {
                use std::io::Write;
                match std::io::stdout().lock().write_all(text.as_bytes()) {
                    Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
                    _ => Ok(()),
                }
            }
        }
    }

    fn emit_curve(&self, c: &CurveSamples) -> Result<()> {
        match self.format {
            Format::Json => self.emit(&io::to_json_string(&io::curve_to_json(c))?),
            Format::Csv => {
                let mut buf = Vec::new();
                io::curve_to_csv(c, &mut buf)?;
                self.emit(&String::from_utf8_lossy(&buf))
            }
        }
    }
}

/// Entry point; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return EXIT_OK;
            }
            let msg = e.render().to_string();
            eprintln!("{}", json!({"error": "usage", "message": msg.trim_end()}));
            return EXIT_USAGE;
        }
    };
    match run(&cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("{}", error_json(&e));
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::PShapeMismatch { .. } => EXIT_MISMATCH,
        e if e.is_geometric() => EXIT_GEOMETRIC,
        _ => EXIT_USAGE,
    }
}

pub fn error_json(e: &Error) -> serde_json::Value {
    let mut v = json!({"error": e.code(), "message": e.to_string()});
    if let Error::PShapeMismatch {
        distance,
        threshold,
    } = e
    {
        v["pshape_distance"] = json!(distance);
        v["threshold"] = json!(threshold);
    }
    v
}

fn run(cli: &Cli) -> Result<()> {
    let cfg = &cli.config;
    let tol = cfg.tolerances()?;
    match &cli.command {
        Command::Analyze { curve, frenet } => {
            let c = io::read_curve(curve, cfg.step)?;
            let fd = frenet_apparatus(&c, &tol)?;
            let profile = pshape_from_frenet(&fd)?;
            let mut csv = Vec::new();
            fd.write_csv(&mut csv)?;
            if let Some(p) = frenet {
                io::write_atomic(p, &csv)?;
            }
            match cfg.format {
                Format::Json => cfg.emit(&io::to_json_string(&profile.to_json())?),
                Format::Csv => cfg.emit(&String::from_utf8_lossy(&csv)),
            }
        }
        Command::Reconstruct {
            pshape,
            case,
            constant,
            sigma_range,
            frame,
            b,
            verify,
        } => {
            let spec = reconstruct_spec(
                pshape.as_ref(),
                *case,
                constant.as_deref(),
                sigma_range.as_deref(),
            )?;
            let init = match frame {
                Some(p) => serde_json::from_value(io::read_json(p)?)?,
                None => InitialFrame::standard(spec.case),
            };
            let c = reconstruct_curve(&spec, &init, *b, cfg.step)?;
            if *verify {
                let r = shape_residual(&spec, &pshape_of(&c, &tol)?);
                eprintln!("{}", json!({ "verify_residual": r }));
            }
            cfg.emit_curve(&c)
        }
        Command::Match { a, b } => {
            let ca = io::read_curve(a, cfg.step)?;
            let cb = io::read_curve(b, cfg.step)?;
            let m = estimate_similarity(&ca, &cb, &tol, cfg.match_threshold)?;
            cfg.emit(&io::to_json_string(&m.to_json())?)
        }
        Command::Transform {
            curve,
            mu,
            q,
            b,
            similarity,
            random,
            similarity_out,
        } => {
            let f = if let Some(p) = similarity {
                serde_json::from_value(io::read_json(p)?)?
            } else if *random {
                let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
                PSimilarity::random_with(&mut rng, (0.5, 2.0))
            } else {
                explicit_similarity(mu.unwrap_or(1.0), q.as_deref(), b.as_deref())?
            };
            let f = PSimilarity::new(f.mu, unit_quaternion(f.q)?, f.b)?;
            let c = io::read_curve(curve, cfg.step)?.transformed(&f)?;
            if let Some(p) = similarity_out {
                io::write_atomic(p, io::to_json_string(&f)?.as_bytes())?;
            }
            cfg.emit_curve(&c)
        }
        Command::Example {
            name,
            params,
            sigma_range,
            n,
        } => {
            let constants = parse_constants(params.as_deref().unwrap_or(""))?;
            let curve = AnalyticCurve::builtin(name, &constants)?;
            let range = match sigma_range {
                Some(s) => parse_range(s)?,
                None => curve.example.default_range(),
            };
            let n = n.unwrap_or_else(|| io::nodes_for(range, cfg.step));
            cfg.emit_curve(&curve.sample(range, n)?)
        }
        Command::Verify { a, b, similarity } => {
            let f: PSimilarity = serde_json::from_value(io::read_json(similarity)?)?;
            let ca = io::read_curve(a, cfg.step)?;
            let cb = io::read_curve(b, cfg.step)?;
            let r = verify_match(&ca, &cb, &f, &tol)?;
            cfg.emit(&io::to_json_string(&json!({ "residual": r }))?)
        }
    }
}

fn reconstruct_spec(
    file: Option<&PathBuf>,
    case: Option<CaseArg>,
    constant: Option<&str>,
    sigma_range: Option<&str>,
) -> Result<PShapeSpec> {
    match (file, constant) {
        (Some(p), None) => {
            let profile = PShapeProfile::from_json(io::read_json(p)?)?;
            let mut spec = PShapeSpec::from_profile(&profile)?;
            if let Some(c) = case {
                spec.case = c.into();
            }
            if let Some(r) = sigma_range {
                spec =
                    PShapeSpec::new(spec.kappa_tilde, spec.tau_tilde, parse_range(r)?, spec.case)?;
            }
            Ok(spec)
        }
        (None, Some(k)) => {
            let v = parse_list(k, 2, "--constant")?;
            let case = case.ok_or_else(|| Error::InvalidInput("--constant needs --case".into()))?;
            let range = match sigma_range {
                Some(r) => parse_range(r)?,
                None => (0.0, 2.0),
            };
            PShapeSpec::constant(v[0], v[1], range, case.into())
        }
        _ => Err(Error::InvalidInput(
            "give either a p-shape file or --constant".into(),
        )),
    }
}

/// Sup-norm distance between a prescribed p-shape and a measured one.
fn shape_residual(spec: &PShapeSpec, measured: &PShapeProfile) -> f64 {
    let eval = |f: &ShapeFn, s: f64| f.eval(s);
    measured
        .sigma
        .iter()
        .zip(measured.kappa_tilde.iter().zip(&measured.tau_tilde))
        .map(|(&s, (&k, &t))| {
            (k - eval(&spec.kappa_tilde, s))
                .abs()
                .max((t - eval(&spec.tau_tilde, s)).abs())
        })
        .fold(0.0, f64::max)
}

fn explicit_similarity(mu: f64, q: Option<&str>, b: Option<&str>) -> Result<PSimilarity> {
    let q = match q {
        Some(s) => {
            let v = parse_list(s, 4, "--q")?;
            SplitQuaternion::new(v[0], v[1], v[2], v[3])
        }
        None => SplitQuaternion::ONE,
    };
    let b = match b {
        Some(s) => {
            let v = parse_list(s, 3, "--b")?;
            MinkowskiVec::new(v[0], v[1], v[2])
        }
        None => MinkowskiVec::ZERO,
    };
    if mu == 0.0 || !mu.is_finite() {
        return Err(Error::InvalidInput("--mu must be non-zero".into()));
    }
    Ok(PSimilarity { mu, q, b })
}

/// Rescales `q` to `N(q) = 1`, warning when it was far from unit.
fn unit_quaternion(q: SplitQuaternion) -> Result<SplitQuaternion> {
    let n = q.norm_form();
    let unit = q
        .to_unit_timelike()
        .map_err(|_| Error::InvalidInput(format!("q is not timelike: N(q) = {n}")))?;
    if (n - 1.0).abs() > NORM_WARN {
        eprintln!("{}", json!({"warning": "q_normalized", "norm": n}));
    }
    Ok(unit)
}

fn parse_list(s: &str, n: usize, flag: &str) -> Result<Vec<f64>> {
    let v = s
        .split(',')
        .map(|x| x.trim().parse::<f64>())
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|_| Error::InvalidInput(format!("{flag}: expected {n} numbers, got '{s}'")))?;
    if v.len() != n || v.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "{flag}: expected {n} finite numbers, got '{s}'"
        )));
    }
    Ok(v)
}

fn parse_range(s: &str) -> Result<(f64, f64)> {
    let v = parse_list(s, 2, "--sigma-range")?;
    if !(v[1] > v[0]) {
        return Err(Error::InvalidInput(format!("empty range '{s}'")));
    }
    Ok((v[0], v[1]))
}

fn parse_constants(s: &str) -> Result<BTreeMap<String, f64>> {
    let mut m = BTreeMap::new();
    for kv in s.split(',').map(str::trim).filter(|x| !x.is_empty()) {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| Error::InvalidInput(format!("--params: bad item '{kv}'")))?;
        let x = v
            .trim()
            .parse::<f64>()
            .map_err(|_| Error::InvalidInput(format!("--params: '{k}' is not a number")))?;
        m.insert(k.trim().to_string(), x);
    }
    Ok(m)
}
