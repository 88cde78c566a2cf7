//! `qdtau` command-line driver: configuration parsing, JSON/CSV reports and
//! the acceptance suite.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64 as C64;
use serde_json::{json, Value};

use qdtau::bergman::build_bergman;
use qdtau::curve::{build_cover, MarkedPoint, QdConfig};
use qdtau::cycles::{build_cycles, CycleOptions};
use qdtau::exact::{format_rational, parse_rational, RationalMatrix};
use qdtau::homology::{is_symplectic, is_unimodular_integral};
use qdtau::periods::{homological_coordinates, normalized_basis};
use qdtau::picard::{solve_principal, closed_form_expansions, verify_mumford_chain, GeneratorBasis};
use qdtau::strata::{collision_exponents, kappa, CollisionKind, StratumSignature};
use qdtau::suite::{self, Tier};
use qdtau::tau::{basis_change_check, degeneration_exponent, dlog_tau_along, ConfigTangent, DegenerationFamily, Sign, TauContext};
use qdtau::Error;

const SCHEMA_VERSION: u32 = 1;

#[derive(Parser)]
#[command(name = "qdtau", version, about = "Tau functions on moduli of quadratic differentials with simple poles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact divisor-class relations.
    #[command(subcommand)]
    Picard(PicardCmd),
    /// Scaling weights of a stratum.
    Kappa {
        #[arg(long)]
        genus: usize,
        /// Comma-separated zero/pole orders, e.g. "1,-1,-1,-1,-1,-1".
        #[arg(long, allow_hyphen_values = true)]
        signature: String,
        #[command(flatten)]
        out: OutArg,
    },
    /// Period matrix and homological coordinates of the canonical cover.
    Periods {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        out: OutArg,
    },
    /// Bergman kernel and projective connections at two probe points.
    Bergman {
        #[arg(long)]
        config: PathBuf,
        /// Points `re,im` or `re,im,sheet` with sheet ±1.
        #[arg(long, num_args = 2, value_names = ["P", "Q"], allow_hyphen_values = true)]
        probe: Vec<String>,
        #[command(flatten)]
        out: OutArg,
    },
    /// Tau-function connection checks.
    #[command(subcommand)]
    Tau(TauCmd),
    /// Runs the acceptance checks.
    Suite {
        #[arg(long, conflicts_with = "full")]
        quick: bool,
        #[arg(long)]
        full: bool,
        #[command(flatten)]
        out: OutArg,
    },
}

#[derive(Subcommand)]
enum PicardCmd {
    /// Checks the Mumford chain and the closed-form expansions.
    Verify(GenusN),
    /// Solves the tau relations of the principal stratum.
    Solve(GenusN),
}

#[derive(Args)]
struct GenusN {
    #[arg(long)]
    genus: usize,
    #[arg(long)]
    n: usize,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Subcommand)]
enum TauCmd {
    /// Euler pairing and the pure-scaling path against `κ±`.
    Scaling {
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        out: OutArg,
    },
    /// Degeneration exponents along a collision family.
    Degenerate {
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long)]
        config: Option<PathBuf>,
        /// CSV file for the per-distance samples.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Largest pair distance.
        #[arg(long, default_value_t = 0.1)]
        d1: f64,
        /// Smallest distance as a fraction of `d1`.
        #[arg(long, default_value_t = 1e-3)]
        ratio: f64,
    },
    /// Change of `ξ₋` under a symplectic basis change of the anti-invariant homology.
    BasisChange {
        #[arg(long)]
        sigma: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        out: OutArg,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    ZeroPole,
    ZeroZero,
}

#[derive(Args)]
struct OutArg {
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Failure classes mapped to exit codes.
enum Failure {
    Input(String),
    Numeric(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidInput(_) | Error::Parse(_) | Error::DimensionMismatch { .. } | Error::BasisMismatch(_) | Error::Clearance(_) => {
                Failure::Input(e.to_string())
            }
            _ => Failure::Numeric(e.to_string()),
        }
    }
}

type Outcome = std::result::Result<bool, Failure>;

struct Check {
    name: String,
    passed: bool,
    value: Value,
    tolerance: Value,
}

fn check(name: &str, passed: bool, value: Value, tolerance: Value) -> Check {
    Check { name: name.into(), passed, value, tolerance }
}

fn cj(z: C64) -> Value {
    json!([z.re, z.im])
}

fn emit(out: Option<&Path>, command: &str, inputs: Value, results: Value, diagnostics: Value, checks: Vec<Check>) -> Outcome {
    let passed = checks.iter().all(|c| c.passed);
    let checks: Vec<Value> = checks
        .into_iter()
        .map(|c| json!({ "name": c.name, "passed": c.passed, "value": c.value, "tolerance": c.tolerance }))
        .collect();
    let report = json!({
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "inputs": inputs,
        "results": results,
        "diagnostics": diagnostics,
        "checks": checks,
        "passed": passed,
    });
    let text = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
    write_text(out, &text)?;
    Ok(passed)
}

fn write_text(out: Option<&Path>, text: &str) -> std::result::Result<(), Failure> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Input(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn read_json(path: &Path) -> std::result::Result<Value, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Input(format!("malformed JSON in {}: {e}", path.display())))
}

fn load_config(path: Option<&Path>) -> std::result::Result<QdConfig, Failure> {
    match path {
        Some(p) => Ok(QdConfig::from_json(&read_json(p)?)?),
        None => Ok(suite::reference_config()),
    }
}

fn config_input(path: Option<&Path>, cfg: &QdConfig) -> Value {
    json!({ "config_path": path.map(|p| p.display().to_string()), "config": cfg.to_json() })
}

fn picard(cmd: PicardCmd) -> Outcome {
    match cmd {
        PicardCmd::Verify(a) => {
            let basis = GeneratorBasis::new(a.genus, a.n)?;
            let report = verify_mumford_chain(&basis)?;
            let sol = solve_principal(a.genus, a.n)?;
            let (le, pe) = closed_form_expansions(a.genus, a.n);
            let checks = vec![
                check("mumford_chain_residuals_zero", report.all_zero(), json!(report.all_zero()), json!("exact")),
                check("lambda_expansion", sol.lambda_expansion == le, sol.lambda_expansion.to_json(), json!("exact")),
                check("prym_expansion", sol.prym_expansion == pe, sol.prym_expansion.to_json(), json!("exact")),
            ];
            emit(a.out.out.as_deref(), "picard verify", json!({ "genus": a.genus, "n": a.n }), report.to_json(), json!({ "generators": basis.labels() }), checks)
        }
        PicardCmd::Solve(a) => {
            let basis = GeneratorBasis::new(a.genus, a.n)?;
            let sol = solve_principal(a.genus, a.n)?;
            let (le, pe) = closed_form_expansions(a.genus, a.n);
            let results = json!({
                "lambda": sol.lambda.to_json(),
                "lambda_p": sol.prym.to_json(),
                "delta0": sol.delta0.to_json(),
                "delta_inf": sol.delta_inf.to_json(),
                "lambda_expansion": sol.lambda_expansion.to_json(),
                "lambda_p_expansion": sol.prym_expansion.to_json(),
            });
            let checks = vec![
                check("lambda_expansion", sol.lambda_expansion == le, le.to_json(), json!("exact")),
                check("prym_expansion", sol.prym_expansion == pe, pe.to_json(), json!("exact")),
            ];
            emit(a.out.out.as_deref(), "picard solve", json!({ "genus": a.genus, "n": a.n }), results, json!({ "generators": basis.labels() }), checks)
        }
    }
}

fn kappa_cmd(genus: usize, signature: &str, out: Option<&Path>) -> Outcome {
    let sig = StratumSignature::parse(genus, signature)?;
    let (kp, km) = kappa(&sig);
    let results = json!({ "kappa_plus": format_rational(&kp), "kappa_minus": format_rational(&km) });
    emit(out, "kappa", json!({ "genus": genus, "signature": sig.orders() }), results, json!({}), vec![])
}

fn periods_cmd(path: &Path, out: Option<&Path>) -> Outcome {
    let cfg = load_config(Some(path))?;
    let cover = build_cover(&cfg)?;
    let cycles = build_cycles(&cover.curve)?;
    let tol = cfg.tolerance * 1e-2;
    let nb = normalized_basis(&cover.curve, &cycles, tol)?;
    let coords = homological_coordinates(&cover, &cycles, tol)?;
    let omega: Vec<Vec<Value>> = nb.omega.row_iter().map(|r| r.iter().map(|z| cj(*z)).collect()).collect();
    let results = json!({ "omega_minus": omega, "homological_coords": coords.iter().map(|z| cj(*z)).collect::<Vec<_>>() });
    let (sym, eig) = (nb.symmetry_defect(), nb.im_min_eigenvalue());
    let diagnostics = json!({ "cover_genus": cover.genus(), "alpha_condition": nb.condition, "quadrature_tolerance": tol });
    let checks = vec![
        check("omega_symmetric", sym < 1e-8, json!(sym), json!(1e-8)),
        check("im_omega_positive", eig > 0.0, json!(eig), json!(0.0)),
    ];
    emit(out, "periods", config_input(Some(path), &cfg), results, diagnostics, checks)
}

fn parse_probe(text: &str) -> std::result::Result<(C64, f64), Failure> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    let num = |s: &str| s.parse::<f64>().map_err(|_| Failure::Input(format!("bad probe coordinate {s:?}")));
    match parts.as_slice() {
        [re, im] => Ok((C64::new(num(re)?, num(im)?), 1.0)),
        [re, im, sheet] => {
            let s = num(sheet)?;
            if s != 1.0 && s != -1.0 {
                return Err(Failure::Input(format!("sheet must be 1 or -1, got {sheet}")));
            }
            Ok((C64::new(num(re)?, num(im)?), s))
        }
        _ => Err(Failure::Input(format!("probe {text:?} is not re,im[,sheet]"))),
    }
}

fn bergman_cmd(path: &Path, probes: &[String], out: Option<&Path>) -> Outcome {
    let cfg = load_config(Some(path))?;
    let (px, ps) = parse_probe(&probes[0])?;
    let (qx, qs) = parse_probe(&probes[1])?;
    let cover = build_cover(&cfg)?;
    let cycles = build_cycles(&cover.curve)?;
    let tol = cfg.tolerance * 1e-2;
    let b = build_bergman(&cover.curve, &cycles, tol)?;
    let (p, q) = (cover.curve.point(px, ps), cover.curve.point(qx, qs));
    let value = b.evaluate(&p, &q)?;
    let (bp, bm) = b.split(&p, &q)?;
    let conn = b.projective_connections(&p)?;
    let exact = (p.x - q.x).powi(-2);
    let pull = (bp - exact).norm() / exact.norm();
    let sum = (conn.s_plus + conn.s_minus - conn.s_hat * 2.0).norm();
    let results = json!({
        "p": { "x": cj(p.x), "y": cj(p.y) },
        "q": { "x": cj(q.x), "y": cj(q.y) },
        "b_hat": cj(value),
        "b_plus": cj(bp),
        "b_minus": cj(bm),
        "s_hat": cj(conn.s_hat),
        "s_hat_closed_form": cj(conn.s_hat_analytic),
        "s_plus": cj(conn.s_plus),
        "s_minus": cj(conn.s_minus),
    });
    let checks = vec![
        check("b_plus_is_pullback", pull < 1e-6, json!(pull), json!(1e-6)),
        check("connection_sum", sum < 1e-8, json!(sum), json!(1e-8)),
    ];
    emit(out, "bergman", config_input(Some(path), &cfg), results, json!({ "quadrature_tolerance": tol, "correction_asymmetry": b.asymmetry }), checks)
}

fn expected_kappa(cfg: &QdConfig) -> std::result::Result<(f64, f64), Failure> {
    let sig = StratumSignature::new(0, cfg.zeros.iter().map(|_| 1).chain(cfg.poles.iter().map(|_| -1)).collect())?;
    let (kp, km) = kappa(&sig);
    Ok((qdtau::exact::to_f64(&kp), qdtau::exact::to_f64(&km)))
}

fn tau_scaling(path: Option<&Path>, out: Option<&Path>) -> Outcome {
    let cfg = load_config(path)?;
    let (kp, km) = expected_kappa(&cfg)?;
    let smp = TauContext::from_config(&cfg)?.sample(&[])?;
    let (ep, em) = (smp.euler(Sign::Plus), smp.euler(Sign::Minus));
    let base = cfg.clone();
    let scaled = move |s: f64| {
        let mut c = base.clone();
        c.scale = base.scale * s.exp();
        let t = ConfigTangent::scaling(&c);
        (c, t)
    };
    let params = [0.0, 0.5, 1.0];
    let path_samples = dlog_tau_along(scaled, &params, &CycleOptions::default())?;
    let rel = |z: C64, k: f64| (z - k).norm() / k.abs();
    let mut worst_path: f64 = 0.0;
    for s in &path_samples {
        worst_path = worst_path.max(rel(s.dlog_tau_plus, kp)).max(rel(s.dlog_tau_minus, km));
    }
    let path_json: Vec<Value> = path_samples
        .iter()
        .map(|s| json!({ "s": s.s, "dlog_tau_plus": cj(s.dlog_tau_plus), "dlog_tau_minus": cj(s.dlog_tau_minus) }))
        .collect();
    let results = json!({ "euler_plus": cj(ep), "euler_minus": cj(em), "kappa_plus": kp, "kappa_minus": km, "scaling_path": path_json });
    let checks = vec![
        check("euler_plus", rel(ep, kp) < 1e-4, json!(rel(ep, kp)), json!(1e-4)),
        check("euler_minus", rel(em, km) < 1e-4, json!(rel(em, km)), json!(1e-4)),
        check("scaling_path", worst_path < 1e-4, json!(worst_path), json!(1e-4)),
    ];
    emit(out, "tau scaling", config_input(path, &cfg), results, json!({ "quadrature_tolerance": cfg.tolerance * 1e-2 }), checks)
}

fn nearest(cfg: &QdConfig, from: MarkedPoint, candidates: impl Iterator<Item = MarkedPoint>) -> std::result::Result<MarkedPoint, Failure> {
    let x = cfg.position(from);
    candidates
        .filter(|m| *m != from)
        .min_by(|a, b| (cfg.position(*a) - x).norm().total_cmp(&(cfg.position(*b) - x).norm()))
        .ok_or_else(|| Failure::Input("configuration has no partner for the collision".into()))
}

fn tau_degenerate(kind: Kind, path: Option<&Path>, csv: Option<&Path>, d1: f64, ratio: f64) -> Outcome {
    if !(d1 > 0.0 && ratio > 0.0 && ratio < 1.0) {
        return Err(Failure::Input("need d1 > 0 and 0 < ratio < 1".into()));
    }
    let (kind, tol) = match kind {
        Kind::ZeroPole => (CollisionKind::ZeroPole, 0.05),
        Kind::ZeroZero => (CollisionKind::ZeroZero, 0.1),
    };
    let family = match path {
        None => match kind {
            CollisionKind::ZeroPole => suite::zero_pole_family(),
            CollisionKind::ZeroZero => suite::zero_zero_family(),
        },
        Some(p) => {
            let cfg = load_config(Some(p))?;
            if cfg.zeros.is_empty() {
                return Err(Failure::Input("configuration has no zeros".into()));
            }
            let moving = MarkedPoint::Zero(0);
            let anchor = match kind {
                CollisionKind::ZeroPole => nearest(&cfg, moving, (0..cfg.poles.len()).map(MarkedPoint::Pole))?,
                CollisionKind::ZeroZero => nearest(&cfg, moving, (0..cfg.zeros.len()).map(MarkedPoint::Zero))?,
            };
            let direction = cfg.position(moving) - cfg.position(anchor);
            DegenerationFamily { kind, base: cfg, moving, anchor, direction, schedule: vec![] }
        }
    };
    let family = DegenerationFamily { schedule: DegenerationFamily::geometric_schedule(d1, ratio), ..family };
    let res = degeneration_exponent(&family, &CycleOptions::default())?;
    if let Some(p) = csv {
        fs::write(p, res.csv()).map_err(|e| Failure::Input(format!("cannot write {}: {e}", p.display())))?;
    }
    let exp = collision_exponents(kind);
    let (ep, em) = (qdtau::exact::to_f64(&exp.gamma_plus), qdtau::exact::to_f64(&exp.gamma_minus));
    let (gp, gm) = (res.gamma(Sign::Plus), res.gamma(Sign::Minus));
    let results = json!({
        "gamma_plus": gp,
        "gamma_minus": gm,
        "expected_plus": format_rational(&exp.gamma_plus),
        "expected_minus": format_rational(&exp.gamma_minus),
        "samples": res.samples.len(),
    });
    let diagnostics = json!({ "fit_plus": res.fit_plus, "fit_minus": res.fit_minus, "schedule": family.schedule });
    let checks = vec![
        check("gamma_plus", (gp - ep).abs() <= tol, json!(gp - ep), json!(tol)),
        check("gamma_minus", (gm - em).abs() <= tol, json!(gm - em), json!(tol)),
    ];
    let inputs = json!({ "kind": kind, "config": family.base.to_json(), "moving": format!("{:?}", family.moving), "anchor": format!("{:?}", family.anchor) });
    // the CSV owns --out, so the report always goes to stdout
    emit(None, "tau degenerate", inputs, results, diagnostics, checks)
}

fn parse_sigma(v: &Value) -> std::result::Result<RationalMatrix, Failure> {
    let rows = v.get("sigma").unwrap_or(v).as_array().ok_or_else(|| Failure::Input("sigma must be a matrix (array of rows)".into()))?;
    let entries: Vec<Vec<_>> = rows
        .iter()
        .map(|r| {
            r.as_array()
                .ok_or_else(|| Failure::Input("sigma rows must be arrays".into()))?
                .iter()
                .map(|e| match e {
                    Value::Number(n) => n.as_i64().map(qdtau::exact::int).ok_or_else(|| Failure::Input(format!("non-integer entry {n}; use \"p/q\" strings"))),
                    Value::String(s) => Ok(parse_rational(s)?),
                    other => Err(Failure::Input(format!("bad sigma entry {other}"))),
                })
                .collect()
        })
        .collect::<std::result::Result<_, _>>()?;
    let n = entries.len();
    if n == 0 || entries.iter().any(|r| r.len() != n) {
        return Err(Failure::Input("sigma must be square".into()));
    }
    let m = RationalMatrix::from_fn(n, n, |i, j| entries[i][j].clone());
    if !is_symplectic(&m) {
        return Err(Failure::Input("sigma is not symplectic".into()));
    }
    Ok(m)
}

fn tau_basis_change(sigma_path: &Path, path: Option<&Path>, out: Option<&Path>) -> Outcome {
    let sigma = parse_sigma(&read_json(sigma_path)?)?;
    let cfg = load_config(path)?;
    let dir = ConfigTangent::moving(&cfg, MarkedPoint::Zero(0), C64::new(0.3, 0.2));
    let r = basis_change_check(&cfg, &sigma, &dir, &CycleOptions::default())?;
    let results = json!({
        "delta_xi_minus": cj(r.lhs_minus),
        "48_dlog_det": cj(r.rhs_minus),
        "delta_xi_plus": cj(r.plus_shift),
        "residual": r.residual,
    });
    let checks = vec![check("basis_change", r.residual < 1e-4, json!(r.residual), json!(1e-4))];
    let mut inputs = config_input(path, &cfg);
    inputs["sigma"] = json!(sigma.to_i64());
    inputs["sigma_integral"] = json!(is_unimodular_integral(&sigma));
    inputs["direction"] = json!({ "moving": "Zero(0)", "velocity": [0.3, 0.2] });
    emit(out, "tau basis-change", inputs, results, json!({}), checks)
}

fn suite_cmd(full: bool, out: Option<&Path>) -> Outcome {
    let tier = if full { Tier::Full } else { Tier::Quick };
    let results = suite::run(tier);
    for r in &results {
        eprintln!("{}  ({:.1}s)", r.line(), r.seconds);
    }
    // timings stay on stderr so the report is byte-stable
    let checks = results
        .iter()
        .map(|r| Check {
            name: format!("criterion_{}_{}", r.id, r.name),
            passed: r.passed,
            value: r.metrics.clone(),
            tolerance: json!({ "budget_seconds": r.budget_seconds }),
        })
        .collect();
    let summary: Vec<Value> = results.iter().map(|r| json!({ "id": r.id, "name": r.name, "passed": r.passed, "summary": r.summary })).collect();
    emit(out, "suite", json!({ "tier": if full { "full" } else { "quick" }, "seed": suite::SEED }), json!(summary), json!({}), checks)
}

fn configure_threads() -> std::result::Result<(), Failure> {
    if let Ok(v) = std::env::var("QDTAU_THREADS") {
        let n: usize = v.parse().map_err(|_| Failure::Input(format!("QDTAU_THREADS must be a positive integer, got {v:?}")))?;
        if n == 0 {
            return Err(Failure::Input("QDTAU_THREADS must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| Failure::Input(e.to_string()))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Outcome {
    configure_threads()?;
    match cli.command {
        Command::Picard(cmd) => picard(cmd),
        Command::Kappa { genus, signature, out } => kappa_cmd(genus, &signature, out.out.as_deref()),
        Command::Periods { config, out } => periods_cmd(&config, out.out.as_deref()),
        Command::Bergman { config, probe, out } => bergman_cmd(&config, &probe, out.out.as_deref()),
        Command::Tau(TauCmd::Scaling { config, out }) => tau_scaling(config.as_deref(), out.out.as_deref()),
        Command::Tau(TauCmd::Degenerate { kind, config, out, d1, ratio }) => tau_degenerate(kind, config.as_deref(), out.as_deref(), d1, ratio),
        Command::Tau(TauCmd::BasisChange { sigma, config, out }) => tau_basis_change(&sigma, config.as_deref(), out.out.as_deref()),
        Command::Suite { quick: _, full, out } => suite_cmd(full, out.out.as_deref()),
    }
}

fn main() -> ExitCode {
    // clap exits with status 2 on usage errors
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Numeric(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Input(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}
