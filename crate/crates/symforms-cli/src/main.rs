//! Command-line surface: expansions, brackets, correspondence maps,
//! liftings, numeric verification, and exact round trips.
//!
//! Exit codes: 0 on success, 1 when a verification or round trip fails,
//! 2 on usage errors (unknown names, malformed input).

mod cache;
mod config;
mod demo;
mod registry;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;

use symforms::error::{Error, Result};
use symforms::group::GroupElt;
use symforms::jlift::{ck_lift_scalar, ck_lift_vhat, JLCoeffs, JLSeries};
use symforms::json;
use symforms::maps;
use symforms::pi::rat_int;
use symforms::qseries::QSeries;
use symforms::quasi::{self, QuasiElement};
use symforms::symtensor::{self, RepKind, VVForm};

use config::JobConfig;
use registry::Expanded;

#[derive(Parser)]
#[command(
    name = "symforms",
    about = "Exact computer algebra for modular, quasimodular and weak Jacobi forms",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonOpts {
    /// q-expansion truncation order
    #[arg(long, global = true)]
    order: Option<i64>,
    /// X-series truncation (defaults to n + 5)
    #[arg(long, global = true)]
    x_order: Option<usize>,
    /// Numeric tolerance for verification
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Write JSON output to this path instead of stdout
    #[arg(long, global = true)]
    json: Option<PathBuf>,
    /// Expansion cache directory (falls back to $SYMFORMS_CACHE)
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Print the expansion of a named constant as JSON
    Expand {
        /// E2, E4, E6, delta, eta, phi-2,1, phi0,1, E4,1, E6,1, vhat(n), uhat(n)
        name: String,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Rankin-Cohen brackets
    Bracket {
        #[command(subcommand)]
        kind: BracketKind,
    },
    /// Correspondence maps between the form spaces
    Map {
        #[command(subcommand)]
        kind: MapKind,
    },
    /// Cohen-Kuznetsov liftings
    Lift {
        #[command(subcommand)]
        kind: LiftKind,
    },
    /// Operations on formal X-series
    Jl {
        #[command(subcommand)]
        kind: JlKind,
    },
    /// Numeric transformation-law checks (exit 0 iff all residuals <= tol)
    Verify {
        /// scalar, vv, quasi, jacobi, or jl
        kind: String,
        /// target name, e.g. E4, vhat(2), vdelta, phi0,1
        target: String,
        /// extra sample matrices "a,b,c,d" (defaults to T, S, ST)
        #[arg(long = "gamma")]
        gammas: Vec<String>,
        /// extra sample points "re,im" (defaults to i, 1/4+i, 2i)
        #[arg(long = "point")]
        points: Vec<String>,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Exact round trips over constructed bases (exit 0 iff all exact)
    Roundtrip {
        /// vu, lambdaxi, or q
        kind: String,
        #[arg(long, allow_negative_numbers = true)]
        k: Option<i64>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, allow_negative_numbers = true)]
        lam: Option<i64>,
        #[arg(long)]
        m: Option<usize>,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Walk the discriminant form through the full correspondence
    Demo {
        /// Inject a deliberate coefficient error (negative control)
        #[arg(long, hide = true)]
        perturb: bool,
        #[command(flatten)]
        common: CommonOpts,
    },
}

#[derive(Subcommand)]
enum BracketKind {
    /// Tensor bracket of two vector operands
    Tensor {
        #[arg(long)]
        w: u32,
        #[arg(long, allow_negative_numbers = true)]
        lam1: i64,
        #[arg(long, allow_negative_numbers = true)]
        lam2: i64,
        /// operand name (vhat(n), uhat(n), E4, ...) or @file.json
        #[arg(long)]
        lhs: String,
        #[arg(long)]
        rhs: String,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Scalar-against-vector bracket
    Sv {
        #[arg(long)]
        w: u32,
        #[arg(long, allow_negative_numbers = true)]
        lam1: i64,
        #[arg(long, allow_negative_numbers = true)]
        lam2: i64,
        /// scalar operand: E4, E6, delta, eta, or @file.json
        #[arg(long)]
        lhs: String,
        /// vector operand: vhat(n), uhat(n), or @file.json
        #[arg(long)]
        rhs: String,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Pairing bracket (result must be free of Z)
    Pair {
        #[arg(long)]
        w: u32,
        #[arg(long, allow_negative_numbers = true)]
        lam1: i64,
        #[arg(long, allow_negative_numbers = true)]
        lam2: i64,
        #[arg(long)]
        lhs: String,
        #[arg(long)]
        rhs: String,
        #[command(flatten)]
        common: CommonOpts,
    },
}

#[derive(Subcommand)]
enum MapKind {
    /// Modular form -> vector-valued form (slot ell)
    V {
        #[arg(long, allow_negative_numbers = true)]
        k: i64,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        ell: usize,
        /// E4, E6, delta, or @quasielement.json
        #[arg(long)]
        g: String,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Vector-valued form -> scalar projections
    W {
        #[arg(long, allow_negative_numbers = true)]
        k: i64,
        #[arg(long)]
        n: usize,
        /// @vvform.json or vdelta
        #[arg(long)]
        input: String,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Quasimodular polynomial -> vector-valued form
    U {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        input: String,
        /// allow weights at or below n (no injectivity claim)
        #[arg(long)]
        force: bool,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Vector-valued form -> quasimodular polynomial
    Uinv {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        input: String,
        #[arg(long)]
        force: bool,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Modular polynomial -> quasimodular polynomial
    Lambda {
        #[arg(long)]
        m: usize,
        #[arg(long, allow_negative_numbers = true)]
        lam: i64,
        #[arg(long)]
        input: String,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Quasimodular polynomial -> modular polynomial
    Xi {
        #[arg(long)]
        m: usize,
        #[arg(long, allow_negative_numbers = true)]
        lam: i64,
        #[arg(long)]
        input: String,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Quasimodular form -> quasimodular polynomial
    Q {
        #[arg(long)]
        m: usize,
        /// E2, E4, E6, delta, or @quasielement.json
        #[arg(long)]
        input: String,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Quasimodular polynomial -> its constant coefficient
    Qinv {
        #[arg(long)]
        input: String,
        #[command(flatten)]
        common: CommonOpts,
    },
}

#[derive(Subcommand)]
enum LiftKind {
    /// Lifting of a scalar modular form of weight >= 1
    Scalar {
        /// E4, E6, delta, or @quasielement.json
        #[arg(long)]
        g: String,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// The finite lifting of the standard vector
    Vhat {
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        common: CommonOpts,
    },
}

#[derive(Subcommand)]
enum JlKind {
    /// Extract one X-coefficient of a lifting
    Coeff {
        /// scalar or vhat
        #[arg(long)]
        kind: String,
        /// scalar operand (for kind = scalar)
        #[arg(long)]
        g: Option<String>,
        /// symmetric power (for kind = vhat)
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        j: usize,
        #[command(flatten)]
        common: CommonOpts,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::UnknownName(_) | Error::InvalidArgument(_) | Error::Json(_) => {
                    ExitCode::from(2)
                }
                _ => ExitCode::from(1),
            }
        }
    }
}

fn build_config(common: &CommonOpts) -> JobConfig {
    let mut cfg = JobConfig::default();
    if let Some(o) = common.order {
        cfg.q_order = o;
    }
    if let Some(t) = common.tol {
        cfg.tol = t;
    }
    if let Some(dir) = &common.cache_dir {
        cfg.cache_dir = Some(dir.clone());
    }
    cfg
}

fn emit(common: &CommonOpts, text: &str) -> Result<()> {
    match &common.json {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Error::InvalidArgument(format!("cannot write {}: {e}", path.display()))),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Expand { name, common } => {
            let cfg = build_config(&common);
            registry::expand_name(&name, 1)?; // validate before touching the cache
            let payload =
                cache::get_or_compute(cfg.cache_dir.as_deref(), &name, cfg.q_order, || {
                    expand_payload(&name, cfg.q_order).expect("name was validated")
                });
            emit(&common, &payload)?;
            Ok(true)
        }
        Command::Bracket { kind } => bracket(kind),
        Command::Map { kind } => map_cmd(kind),
        Command::Lift { kind } => lift_cmd(kind),
        Command::Jl { kind } => jl_cmd(kind),
        Command::Verify {
            kind,
            target,
            gammas,
            points,
            common,
        } => verify_cmd(&kind, &target, &gammas, &points, &common),
        Command::Roundtrip {
            kind,
            k,
            n,
            lam,
            m,
            common,
        } => roundtrip_cmd(&kind, k, n, lam, m, &common),
        Command::Demo { perturb, common } => {
            let cfg = build_config(&common);
            demo::run(cfg.q_order, perturb)
        }
    }
}

fn expand_payload(name: &str, order: i64) -> Result<String> {
    Ok(match registry::expand_name(name, order)? {
        Expanded::Scalar(s) => json::qseries_to_string(&s),
        Expanded::Jacobi(s) => json::jacseries_to_string(&s),
        Expanded::Vector(f) => {
            serde_json::to_string_pretty(&json::vvform_to_json(&f)).expect("serializes")
        }
    })
}

fn read_to_string(path: &str) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidArgument(format!("cannot read {path}: {e}")))
}

fn scalar_arg(spec: &str, order: i64) -> Result<QSeries> {
    if let Some(path) = spec.strip_prefix('@') {
        return json::qseries_from_str(&read_to_string(path)?);
    }
    registry::scalar_operand(spec, order)
}

fn vector_arg(spec: &str, order: i64) -> Result<VVForm> {
    if let Some(path) = spec.strip_prefix('@') {
        let j: json::VVFormJson =
            serde_json::from_str(&read_to_string(path)?).map_err(|e| Error::Json(e.to_string()))?;
        return json::vvform_from_json(&j);
    }
    if spec == "vdelta" {
        return Ok(registry::v_delta(order));
    }
    registry::vector_operand(spec, order).map(|(f, _)| f)
}

fn quasi_arg(spec: &str) -> Result<QuasiElement> {
    if let Some(path) = spec.strip_prefix('@') {
        let j: json::QuasiElementJson =
            serde_json::from_str(&read_to_string(path)?).map_err(|e| Error::Json(e.to_string()))?;
        return json::quasielement_from_json(&j);
    }
    registry::quasi_operand(spec)
}

fn quasi_poly_arg(spec: &str) -> Result<maps::QuasiPolynomial> {
    let path = spec
        .strip_prefix('@')
        .ok_or_else(|| Error::InvalidArgument("polynomial operands are @file.json".into()))?;
    let j: json::PolynomialJson =
        serde_json::from_str(&read_to_string(path)?).map_err(|e| Error::Json(e.to_string()))?;
    json::quasi_polynomial_from_json(&j)
}

fn mod_poly_arg(spec: &str) -> Result<maps::ModPolynomial> {
    let path = spec
        .strip_prefix('@')
        .ok_or_else(|| Error::InvalidArgument("polynomial operands are @file.json".into()))?;
    let j: json::PolynomialJson =
        serde_json::from_str(&read_to_string(path)?).map_err(|e| Error::Json(e.to_string()))?;
    json::mod_polynomial_from_json(&j)
}

fn emit_vvform(common: &CommonOpts, f: &VVForm) -> Result<()> {
    emit(
        common,
        &serde_json::to_string_pretty(&json::vvform_to_json(f)).expect("serializes"),
    )
}

fn bracket(kind: BracketKind) -> Result<bool> {
    match kind {
        BracketKind::Tensor {
            w,
            lam1,
            lam2,
            lhs,
            rhs,
            common,
        } => {
            let cfg = build_config(&common);
            let a = vector_arg(&lhs, cfg.q_order)?;
            let b = vector_arg(&rhs, cfg.q_order)?;
            let spec = symforms::brackets::BracketSpec { w, lam1, lam2 };
            let out = symforms::brackets::rc_tensor(&a, &b, &spec)?;
            emit_vvform(&common, &out)?;
            Ok(true)
        }
        BracketKind::Sv {
            w,
            lam1,
            lam2,
            lhs,
            rhs,
            common,
        } => {
            let cfg = build_config(&common);
            let f = scalar_arg(&lhs, cfg.q_order)?;
            let phi = vector_arg(&rhs, cfg.q_order)?;
            let out = symforms::brackets::rc_scalar_vector(&f, &phi, w, lam1, lam2)?;
            emit_vvform(&common, &out)?;
            Ok(true)
        }
        BracketKind::Pair {
            w,
            lam1,
            lam2,
            lhs,
            rhs,
            common,
        } => {
            let cfg = build_config(&common);
            let a = vector_arg(&lhs, cfg.q_order)?;
            let b = vector_arg(&rhs, cfg.q_order)?;
            let out = symforms::brackets::rc_pair(&a, &b, w, lam1, lam2)?;
            emit(&common, &json::qseries_to_string(&out))?;
            Ok(true)
        }
    }
}

fn map_cmd(kind: MapKind) -> Result<bool> {
    match kind {
        MapKind::V {
            k,
            n,
            ell,
            g,
            common,
        } => {
            let cfg = build_config(&common);
            let g = quasi_arg(&g)?;
            let out = maps::v_map(&g, k, n, ell, cfg.q_order)?;
            emit_vvform(&common, &out)?;
            Ok(true)
        }
        MapKind::W {
            k,
            n,
            input,
            common,
        } => {
            let cfg = build_config(&common);
            let f = vector_arg(&input, cfg.q_order)?;
            let entries = maps::w_map(&f, k, n)?;
            let payload: Vec<json::QSeriesJson> =
                entries.iter().map(json::qseries_to_json).collect();
            emit(
                &common,
                &serde_json::to_string_pretty(&payload).expect("serializes"),
            )?;
            Ok(true)
        }
        MapKind::U {
            n,
            input,
            force,
            common,
        } => {
            let cfg = build_config(&common);
            let f = quasi_poly_arg(&input)?;
            let out = maps::u_map(&f, n, cfg.q_order, force)?;
            emit_vvform(&common, &out)?;
            Ok(true)
        }
        MapKind::Uinv {
            n,
            input,
            force,
            common,
        } => {
            let f = vector_arg(&input, build_config(&common).q_order)?;
            let out = maps::u_inverse(&f, n, force)?;
            emit(
                &common,
                &serde_json::to_string_pretty(&json::quasi_polynomial_to_json(&out))
                    .expect("serializes"),
            )?;
            Ok(true)
        }
        MapKind::Lambda {
            m,
            lam,
            input,
            common,
        } => {
            let f = mod_poly_arg(&input)?;
            let out = maps::lambda_map(&f, m, lam)?;
            emit(
                &common,
                &serde_json::to_string_pretty(&json::quasi_polynomial_to_json(&out))
                    .expect("serializes"),
            )?;
            Ok(true)
        }
        MapKind::Xi {
            m,
            lam,
            input,
            common,
        } => {
            let f = quasi_poly_arg(&input)?;
            let out = maps::xi_map(&f, m, lam)?;
            emit(
                &common,
                &serde_json::to_string_pretty(&json::mod_polynomial_to_json(&out))
                    .expect("serializes"),
            )?;
            Ok(true)
        }
        MapKind::Q { m, input, common } => {
            let f = quasi_arg(&input)?;
            let out = maps::q_map(&f, m)?;
            emit(
                &common,
                &serde_json::to_string_pretty(&json::quasi_polynomial_to_json(&out))
                    .expect("serializes"),
            )?;
            Ok(true)
        }
        MapKind::Qinv { input, common } => {
            let f = quasi_poly_arg(&input)?;
            let out = maps::q_inverse(&f);
            emit(
                &common,
                &serde_json::to_string_pretty(&json::quasielement_to_json(&out))
                    .expect("serializes"),
            )?;
            Ok(true)
        }
    }
}

fn jl_json(series: &JLSeries) -> String {
    #[derive(serde::Serialize)]
    struct JlJson {
        weight: i64,
        x_order: usize,
        scalar_coeffs: Option<Vec<json::QSeriesJson>>,
        vector_coeffs: Option<Vec<json::VVFormJson>>,
    }
    let (s, v) = match &series.coeffs {
        JLCoeffs::Scalar(c) => (Some(c.iter().map(json::qseries_to_json).collect()), None),
        JLCoeffs::Vector(c) => (None, Some(c.iter().map(json::vvform_to_json).collect())),
    };
    serde_json::to_string_pretty(&JlJson {
        weight: series.weight,
        x_order: series.x_order,
        scalar_coeffs: s,
        vector_coeffs: v,
    })
    .expect("serializes")
}

fn lift_cmd(kind: LiftKind) -> Result<bool> {
    match kind {
        LiftKind::Scalar { g, common } => {
            let cfg = build_config(&common);
            let g = quasi_arg(&g)?;
            let x_order = common.x_order.unwrap_or(cfg.x_order(0));
            let out = ck_lift_scalar(&g, cfg.q_order, x_order)?;
            emit(&common, &jl_json(&out))?;
            Ok(true)
        }
        LiftKind::Vhat { n, common } => {
            let cfg = build_config(&common);
            let x_order = common.x_order.unwrap_or(cfg.x_order(n));
            let out = ck_lift_vhat(n, cfg.q_order, x_order);
            emit(&common, &jl_json(&out))?;
            Ok(true)
        }
    }
}

fn jl_cmd(kind: JlKind) -> Result<bool> {
    match kind {
        JlKind::Coeff {
            kind,
            g,
            n,
            j,
            common,
        } => {
            let cfg = build_config(&common);
            let series = match kind.as_str() {
                "scalar" => {
                    let g = g.ok_or_else(|| {
                        Error::InvalidArgument("--g is required for kind scalar".into())
                    })?;
                    let x_order = common.x_order.unwrap_or(cfg.x_order(0)).max(j + 1);
                    ck_lift_scalar(&quasi_arg(&g)?, cfg.q_order, x_order)?
                }
                "vhat" => {
                    let n = n.ok_or_else(|| {
                        Error::InvalidArgument("--n is required for kind vhat".into())
                    })?;
                    let x_order = common.x_order.unwrap_or(cfg.x_order(n)).max(j + 1);
                    ck_lift_vhat(n, cfg.q_order, x_order)
                }
                other => {
                    return Err(Error::InvalidArgument(format!(
                        "unknown lifting kind {other:?}"
                    )))
                }
            };
            let (coeff, weight) = series.coefficient(j)?;
            println!("X^{j} coefficient carries weight {weight}");
            match coeff {
                symforms::jlift::JLCoefficient::Scalar(s) => {
                    emit(&common, &json::qseries_to_string(&s))?
                }
                symforms::jlift::JLCoefficient::Vector(f) => emit_vvform(&common, &f)?,
            }
            Ok(true)
        }
    }
}

fn sample_sets(
    gammas: &[String],
    points: &[String],
    cfg: &JobConfig,
) -> Result<(Vec<GroupElt>, Vec<Complex64>)> {
    let gs = if gammas.is_empty() {
        cfg.sample_gammas.clone()
    } else {
        gammas
            .iter()
            .map(|s| GroupElt::parse(s))
            .collect::<Result<Vec<_>>>()?
    };
    let zs = if points.is_empty() {
        cfg.sample_points.clone()
    } else {
        points
            .iter()
            .map(|s| config::parse_point(s))
            .collect::<Result<Vec<_>>>()?
    };
    Ok((gs, zs))
}

fn verify_cmd(
    kind: &str,
    target: &str,
    gammas: &[String],
    points: &[String],
    common: &CommonOpts,
) -> Result<bool> {
    let cfg = build_config(common);
    cfg.require_verification_order()?;
    let (gs, zs) = sample_sets(gammas, points, &cfg)?;
    let order = cfg.q_order;
    let tol = cfg.tol;
    let mut all_pass = true;
    let mut rows: Vec<(String, f64)> = Vec::new();

    match kind {
        "scalar" => {
            let (series, weight) = match target {
                "E4" => (quasi::eisenstein(4, order)?, 4),
                "E6" => (quasi::eisenstein(6, order)?, 6),
                "delta" => (quasi::delta(order)?, 12),
                other => return Err(Error::UnknownName(other.to_string())),
            };
            for g in &gs {
                for &z in &zs {
                    let r = quasi::scalar_transform_residual(&series, weight, g, z)?;
                    rows.push((format!("γ={g} z={z}"), r));
                }
            }
        }
        "quasi" => {
            if target == "E2" {
                for g in &gs {
                    for &z in &zs {
                        let r = quasi::e2_transform_residual(g, z, order)?;
                        rows.push((format!("γ={g} z={z}"), r));
                    }
                }
            } else if target.starts_with('@') {
                // a quasimodular polynomial: check the substituted action law
                let f = quasi_poly_arg(target)?;
                let residuals = maps::quasi_polynomial_action_residuals(&f, &gs, &zs, order)?;
                let mut i = 0;
                for g in &gs {
                    for &z in &zs {
                        rows.push((format!("γ={g} z={z}"), residuals[i]));
                        i += 1;
                    }
                }
            } else {
                return Err(Error::UnknownName(target.to_string()));
            }
        }
        "vv" => {
            let (f, rep) = if let Some(n) = registry::parse_indexed(target, "uhat") {
                (symtensor::u_hat(n, order), RepKind::DualSymPower)
            } else {
                (vector_arg(target, order)?, RepKind::SymPower)
            };
            for g in &gs {
                for &z in &zs {
                    let rep_result = symtensor::verify_vv_transform(&f, g, z, tol, rep)?;
                    rows.push((format!("γ={g} z={z}"), rep_result.max_residual()));
                }
            }
        }
        "jacobi" => {
            let series = match registry::expand_name(target, order)? {
                Expanded::Jacobi(s) => s,
                _ => {
                    return Err(Error::InvalidArgument(format!(
                        "{target} is not a two-variable series"
                    )))
                }
            };
            let w = Complex64::new(0.23, 0.11);
            for g in &gs {
                for &z in &zs {
                    let rep = symforms::jacobi::verify_jacobi_transform(&series, g, z, w, tol)?;
                    rows.push((format!("γ={g} z={z}"), rep.max_residual()));
                }
            }
        }
        "jl" => {
            if let Some(n) = registry::parse_indexed(target, "vhat") {
                let lift = ck_lift_vhat(n, order, n + 1);
                for g in &gs {
                    for &z in &zs {
                        let r = symforms::jlift::verify_jl_transform(&lift, g, z, n + 1)?;
                        rows.push((format!("γ={g} z={z}"), r));
                    }
                }
            } else {
                let g_elt = quasi_arg(target)?;
                let lift = ck_lift_scalar(&g_elt, order, 6)?;
                for g in &gs {
                    for &z in &zs {
                        let r = symforms::jlift::verify_jl_scalar_transform(&lift, g, z, 6)?;
                        rows.push((format!("γ={g} z={z}"), r));
                    }
                }
            }
        }
        other => {
            return Err(Error::InvalidArgument(format!(
                "unknown verification kind {other:?} (scalar, vv, quasi, jacobi, jl)"
            )))
        }
    }

    println!("verify {kind} {target} (order {order}, tol {tol:.1e})");
    for (label, r) in &rows {
        let ok = *r <= tol;
        all_pass &= ok;
        println!(
            "  {label}: residual {r:.3e} {}",
            if ok { "ok" } else { "FAIL" }
        );
    }
    println!("result: {}", if all_pass { "PASS" } else { "FAIL" });
    Ok(all_pass)
}

fn roundtrip_cmd(
    kind: &str,
    k: Option<i64>,
    n: Option<usize>,
    lam: Option<i64>,
    m: Option<usize>,
    common: &CommonOpts,
) -> Result<bool> {
    let cfg = build_config(common);
    let order = cfg.q_order;
    let mut failures = 0usize;
    let mut cases = 0usize;

    match kind {
        "vu" => {
            let k = k.ok_or_else(|| Error::InvalidArgument("--k is required".into()))?;
            let n = n.ok_or_else(|| Error::InvalidArgument("--n is required".into()))?;
            if k <= n as i64 {
                return Err(Error::WeightHypothesisViolated { k, n: n as i64 });
            }
            for ell in 0..=n {
                let w = k - n as i64 + 2 * ell as i64;
                for g in quasi::basis_mk(w).elements() {
                    cases += 1;
                    let image = maps::v_map(&g, k, n, ell, order)?;
                    let poly = maps::u_inverse(&image, n, false)?;
                    let back = maps::u_map(&poly, n, order, false)?;
                    if !back.eq_below(&image, &rat_int(order)) {
                        failures += 1;
                    }
                    let parts = maps::decompose(&image, k, n)?;
                    if parts[ell] != g {
                        failures += 1;
                    }
                }
            }
        }
        "lambdaxi" => {
            let lam = lam.ok_or_else(|| Error::InvalidArgument("--lam is required".into()))?;
            let m = m.ok_or_else(|| Error::InvalidArgument("--m is required".into()))?;
            for qp in maps::quasi_polynomial_basis(m, lam)? {
                cases += 1;
                let mp = maps::xi_map(&qp, m, lam)?;
                let back = maps::lambda_map(&mp, m, lam)?;
                if back != qp {
                    failures += 1;
                }
            }
        }
        "q" => {
            let lam = lam.unwrap_or(16);
            let m = m.unwrap_or(2);
            // all ring monomials of the given weight within the depth bound
            for a in 0..=(m as i64) {
                let rem = lam - 2 * a;
                if rem < 0 {
                    continue;
                }
                for b in 0..=(rem / 4) {
                    let r2 = rem - 4 * b;
                    if r2 % 6 != 0 {
                        continue;
                    }
                    let f = QuasiElement::monomial(
                        (a as u32, b as u32, (r2 / 6) as u32),
                        symforms::PiPoly::one(),
                    );
                    cases += 1;
                    let qp = maps::q_map(&f, m)?;
                    if maps::q_inverse(&qp) != f {
                        failures += 1;
                    }
                }
            }
        }
        other => {
            return Err(Error::InvalidArgument(format!(
                "unknown roundtrip {other:?} (vu, lambdaxi, q)"
            )))
        }
    }

    let pass = failures == 0;
    if cases == 0 {
        println!("roundtrip {kind}: 0 cases (every space in range is zero)");
    } else {
        println!(
            "roundtrip {kind}: {cases} cases, {failures} failures, max residual {}",
            if pass { "0 (exact)" } else { "nonzero" }
        );
    }
    println!("result: {}", if pass { "PASS" } else { "FAIL" });
    Ok(pass)
}
