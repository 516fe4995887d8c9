use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{Map, Value};

use hadamard_frac::criterion::{self, ProblemParams};
use hadamard_frac::initial::{self, ProfilePart, ProfileTag, RadialProfile};
use hadamard_frac::kernels::{
    conjugate_check, hadamard_caputo_derivative, hadamard_left_integral,
    hadamard_right_integral, integration_by_parts_residual, integration_by_parts_scale,
    log_power_left_image, rl_left_integral, rl_right_integral, FracParams, Integrand,
    LogGridFunction,
};
use hadamard_frac::probe::{self, ProbeConfig};
use hadamard_frac::quad::{default_points, QuadRule, QuadratureSpec};
use hadamard_frac::testfn::{self, mu_right_image, MuParams};
use hadamard_frac::Error;

const EXIT_VERIFY_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;
const EXIT_REGIME: u8 = 4;

#[derive(Parser)]
#[command(
    name = "hfrac",
    version,
    about = "Hadamard fractional operators, nonexistence criteria, and estimate probes"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate a fractional operator at given time points
    Op(OpArgs),
    /// Run the identity-verification suites
    Verify(VerifyArgs),
    /// Evaluate the nonexistence criterion for a parameter set
    Criterion(CriterionArgs),
    /// Initial-data integrals with closed-form cross-checks
    Integrals(IntegralsArgs),
    /// Sweep the scaled master inequality over a radius grid
    Probe(ProbeArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum OpKind {
    /// Left Hadamard integral J_a^sigma
    #[value(name = "Ja", alias = "ja")]
    Ja,
    /// Right Hadamard integral J_T^sigma
    #[value(name = "JT", alias = "jt")]
    Jt,
    /// Left Riemann-Liouville integral I_a^sigma
    #[value(name = "Ia", alias = "ia")]
    Ia,
    /// Right Riemann-Liouville integral I_T^sigma
    #[value(name = "IT", alias = "it")]
    It,
    /// Hadamard-Caputo derivative of order sigma
    #[value(name = "D", alias = "d")]
    D,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Args)]
struct OpArgs {
    #[arg(long, value_enum)]
    kind: OpKind,
    /// Integrand spec: const:C, logpow:BETA, or mu:kappa=K
    #[arg(long)]
    integrand: String,
    /// Order of the operator
    #[arg(long)]
    sigma: f64,
    #[arg(long, default_value_t = 1.0)]
    a: f64,
    #[arg(long = "T", default_value_t = std::f64::consts::E)]
    t_end: f64,
    /// Evaluation point; repeatable
    #[arg(long = "t", required = true)]
    points: Vec<f64>,
    #[arg(long, default_value_t = 1e-10)]
    rel_tol: f64,
    /// Quadrature node count override
    #[arg(long)]
    quad_points: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Run a single suite: conjugation, ibp, lemma3, boundary, or semigroup
    #[arg(long)]
    suite: Option<String>,
    #[arg(long, default_value_t = 1e-10)]
    rel_tol: f64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Flip a sign inside the closed-form comparisons (harness self-test)
    #[arg(long, hide = true)]
    inject_bug: bool,
}

#[derive(Args)]
struct CriterionArgs {
    #[arg(long)]
    alpha: f64,
    #[arg(long, allow_hyphen_values = true)]
    gamma: f64,
    #[arg(long)]
    dim: u32,
    #[arg(long)]
    p: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    lambda1: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    lambda2: f64,
    #[arg(long, default_value_t = 1.0)]
    a: f64,
    /// Precomputed integral of the real part of the data
    #[arg(long, conflicts_with = "profile_real", allow_hyphen_values = true)]
    f1: Option<f64>,
    /// Precomputed integral of the imaginary part of the data
    #[arg(long, conflicts_with = "profile_imag", allow_hyphen_values = true)]
    f2: Option<f64>,
    /// Named radial profile for the real part: inverse, gauss, or exp
    #[arg(long)]
    profile_real: Option<String>,
    /// Named radial profile for the imaginary part
    #[arg(long)]
    profile_imag: Option<String>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct IntegralsArgs {
    /// Profile tag: inverse, gauss, exp, or a CSV path via --csv
    #[arg(long, required_unless_present = "csv")]
    profile: Option<String>,
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long)]
    dim: u32,
    #[arg(long, default_value = "real")]
    part: String,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ProbeArgs {
    #[arg(long)]
    alpha: f64,
    #[arg(long, allow_hyphen_values = true)]
    gamma: f64,
    #[arg(long)]
    dim: u32,
    #[arg(long)]
    p: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    lambda1: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    lambda2: f64,
    #[arg(long, default_value_t = 1.0)]
    a: f64,
    /// Time-weight exponent; default ceil(alpha*p/(p-1)) + 2
    #[arg(long)]
    kappa: Option<f64>,
    /// Cutoff power; default ceil(2p/(p-1)) + 2
    #[arg(long)]
    ell: Option<u32>,
    /// Comma-separated radius grid
    #[arg(long, default_value = "10,20,40,80")]
    r_grid: String,
    /// Scaling exponent in T = exp(R^theta); default 2/alpha
    #[arg(long)]
    theta: Option<f64>,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    f1: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    f2: f64,
    /// Weight the left side by the cutoff using this real-part profile
    #[arg(long)]
    profile_real: Option<String>,
    #[arg(long)]
    profile_imag: Option<String>,
    #[arg(long, default_value_t = 1e-10)]
    rel_tol: f64,
    #[arg(long)]
    quad_points: Option<usize>,
    /// Base path for artifacts; writes <out>.csv and <out>.json
    #[arg(long, default_value = "probe")]
    out: PathBuf,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

fn from_error(e: Error) -> Failure {
    let code = match e {
        Error::QuadratureNonConvergence { .. } => EXIT_NUMERICAL,
        _ => EXIT_USAGE,
    };
    Failure {
        code,
        message: e.to_string(),
    }
}

fn from_probe_error(e: Error) -> Failure {
    let code = match e {
        Error::QuadratureNonConvergence { .. } => EXIT_NUMERICAL,
        Error::Config(_) => EXIT_REGIME,
        _ => EXIT_USAGE,
    };
    Failure {
        code,
        message: e.to_string(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.cmd {
        Cmd::Op(args) => cmd_op(args),
        Cmd::Verify(args) => cmd_verify(args),
        Cmd::Criterion(args) => cmd_criterion(args),
        Cmd::Integrals(args) => cmd_integrals(args),
        Cmd::Probe(args) => cmd_probe(args),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

// 17 significant digits; round-trips every f64.
fn fmt_float(x: f64) -> String {
    format!("{:.16e}", x)
}

fn json_float(x: f64) -> Value {
    if x.is_finite() {
        Value::Number(serde_json::Number::from_string_unchecked(fmt_float(x)))
    } else {
        Value::String(format!("{x}"))
    }
}

/// Rewrite every non-integer number in place with the fixed 17-digit format
/// so serialized reports are byte-identical across runs.
fn canonicalize(v: &mut Value) {
    match v {
        Value::Number(n) => {
            if !n.is_i64() && !n.is_u64() {
                if let Some(f) = n.as_f64() {
                    *v = json_float(f);
                }
            }
        }
        Value::Array(items) => items.iter_mut().for_each(canonicalize),
        Value::Object(map) => map.values_mut().for_each(canonicalize),
        _ => {}
    }
}

fn report_shell(command: &str) -> Map<String, Value> {
    let mut map = Map::new();
    map.insert("schema".into(), Value::String("hadamard-frac/1".into()));
    map.insert("command".into(), Value::String(command.into()));
    map
}

fn emit(text: String, out: Option<&PathBuf>) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Failure {
            code: EXIT_USAGE,
            message: format!("cannot write output file: {e}"),
        }),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn render_json(map: Map<String, Value>) -> String {
    let mut v = Value::Object(map);
    canonicalize(&mut v);
    serde_json::to_string_pretty(&v).expect("object serialization")
}

fn parse_integrand(spec: &str) -> Result<Integrand, Failure> {
    let bad = || {
        Failure::usage(format!(
            "integrand must be const:C, logpow:BETA, or mu:kappa=K, got `{spec}`"
        ))
    };
    let (tag, rest) = spec.split_once(':').ok_or_else(bad)?;
    match tag {
        "const" => Ok(Integrand::Constant(rest.parse().map_err(|_| bad())?)),
        "logpow" => Ok(Integrand::LogPower(rest.parse().map_err(|_| bad())?)),
        "mu" => {
            let value = rest.strip_prefix("kappa=").ok_or_else(bad)?;
            Ok(Integrand::MuFamily(value.parse().map_err(|_| bad())?))
        }
        _ => Err(bad()),
    }
}

fn parse_profile_tag(name: &str) -> Result<ProfileTag, Failure> {
    match name {
        "inverse" => Ok(ProfileTag::InverseWeight),
        "gauss" => Ok(ProfileTag::GaussWeight),
        "exp" => Ok(ProfileTag::ExpDecay),
        _ => Err(Failure::usage(format!(
            "unknown profile `{name}`; expected inverse, gauss, or exp"
        ))),
    }
}

fn quad_spec(rel_tol: f64, points: Option<usize>) -> Result<QuadratureSpec, Failure> {
    QuadratureSpec::new(
        QuadRule::GaussJacobi,
        points.unwrap_or_else(default_points),
        rel_tol,
    )
    .map_err(from_error)
}

fn cmd_op(args: OpArgs) -> Result<u8, Failure> {
    let integrand = parse_integrand(&args.integrand)?;
    integrand.validate().map_err(from_error)?;
    let params = FracParams::new(args.sigma, args.a, args.t_end).map_err(from_error)?;
    let q = quad_spec(args.rel_tol, args.quad_points)?;
    let q_fine =
        QuadratureSpec::new(QuadRule::GaussJacobi, q.points * 2, q.rel_tol).map_err(from_error)?;

    let eval = |q: &QuadratureSpec, t: f64| -> Result<f64, Failure> {
        let r = match args.kind {
            OpKind::Ja => hadamard_left_integral(&integrand, &params, t, q),
            OpKind::Jt => hadamard_right_integral(&integrand, &params, t, q),
            OpKind::Ia => rl_left_integral(&integrand, &params, t, q),
            OpKind::It => rl_right_integral(&integrand, &params, t, q),
            OpKind::D => hadamard_caputo_derivative(&integrand, args.sigma, &params, t, q),
        };
        r.map_err(from_error)
    };

    let mut rows = Vec::new();
    for &t in &args.points {
        let coarse = eval(&q, t)?;
        let value = eval(&q_fine, t)?;
        rows.push((t, value, (value - coarse).abs()));
    }

    let text = match args.format {
        Format::Json => {
            let mut map = report_shell("op");
            map.insert("kind".into(), Value::String(kind_name(args.kind).into()));
            map.insert("integrand".into(), Value::String(args.integrand.clone()));
            map.insert("sigma".into(), json_float(args.sigma));
            map.insert("a".into(), json_float(args.a));
            map.insert("t_end".into(), json_float(args.t_end));
            let results: Vec<Value> = rows
                .iter()
                .map(|&(t, value, err)| {
                    let mut row = Map::new();
                    row.insert("t".into(), json_float(t));
                    row.insert("value".into(), json_float(value));
                    row.insert("error_estimate".into(), json_float(err));
                    Value::Object(row)
                })
                .collect();
            map.insert("results".into(), Value::Array(results));
            render_json(map)
        }
        Format::Csv => {
            let mut s = String::from("t,value,error_estimate\r\n");
            for &(t, value, err) in &rows {
                s.push_str(&format!(
                    "{},{},{}\r\n",
                    fmt_float(t),
                    fmt_float(value),
                    fmt_float(err)
                ));
            }
            s
        }
        Format::Text => rows
            .iter()
            .map(|&(t, value, err)| {
                format!("t = {} value = {} err <= {}", fmt_float(t), fmt_float(value), fmt_float(err))
            })
            .collect::<Vec<_>>()
            .join("\n"),
    };
    emit(text, args.out.as_ref())?;
    Ok(0)
}

fn kind_name(kind: OpKind) -> &'static str {
    match kind {
        OpKind::Ja => "Ja",
        OpKind::Jt => "JT",
        OpKind::Ia => "Ia",
        OpKind::It => "IT",
        OpKind::D => "D",
    }
}

struct SuiteResult {
    name: &'static str,
    checks: usize,
    worst: f64,
    tolerance: f64,
    worst_case: String,
}

impl SuiteResult {
    fn pass(&self) -> bool {
        self.worst <= self.tolerance
    }
}

fn cmd_verify(args: VerifyArgs) -> Result<u8, Failure> {
    // The suites check identities pairwise; both sides share the achievable
    // quadrature accuracy, so the rules need not converge beyond 1e-9.
    let q = quad_spec(args.rel_tol.max(1e-9), None)?;
    let sign = if args.inject_bug { -1.0 } else { 1.0 };

    type Suite = fn(&QuadratureSpec, f64) -> Result<SuiteResult, Error>;
    let suites: [(&str, Suite); 5] = [
        ("conjugation", suite_conjugation),
        ("ibp", suite_ibp),
        ("lemma3", suite_closed_forms),
        ("boundary", suite_boundary),
        ("semigroup", suite_semigroup),
    ];

    if let Some(filter) = &args.suite {
        if !suites.iter().any(|(name, _)| name == filter) {
            return Err(Failure::usage(format!(
                "unknown suite `{filter}`; expected one of conjugation, ibp, lemma3, boundary, semigroup"
            )));
        }
    }

    let mut results = Vec::new();
    for (name, suite) in suites {
        if args.suite.as_deref().is_some_and(|f| f != name) {
            continue;
        }
        results.push(suite(&q, sign).map_err(from_error)?);
    }

    let all_pass = results.iter().all(SuiteResult::pass);
    let text = match args.format {
        Format::Json => {
            let mut map = report_shell("verify");
            map.insert("pass".into(), Value::Bool(all_pass));
            let suites_json: Vec<Value> = results
                .iter()
                .map(|r| {
                    let mut row = Map::new();
                    row.insert("suite".into(), Value::String(r.name.into()));
                    row.insert("pass".into(), Value::Bool(r.pass()));
                    row.insert("checks".into(), Value::Number(r.checks.into()));
                    row.insert("worst_rel_err".into(), json_float(r.worst));
                    row.insert("tolerance".into(), json_float(r.tolerance));
                    row.insert("worst_case".into(), Value::String(r.worst_case.clone()));
                    Value::Object(row)
                })
                .collect();
            map.insert("suites".into(), Value::Array(suites_json));
            render_json(map)
        }
        _ => results
            .iter()
            .map(|r| {
                format!(
                    "{}: {} (worst rel err {:.3e} over {} checks, tol {:.1e}; worst at {})",
                    r.name,
                    if r.pass() { "pass" } else { "FAIL" },
                    r.worst,
                    r.checks,
                    r.tolerance,
                    r.worst_case
                )
            })
            .collect::<Vec<_>>()
            .join("\n"),
    };
    emit(text, args.out.as_ref())?;
    Ok(if all_pass { 0 } else { EXIT_VERIFY_FAIL })
}

fn rel_err(got: f64, want: f64) -> f64 {
    (got - want).abs() / want.abs().max(1e-12)
}

fn track(worst: &mut SuiteResult, err: f64, case: String) {
    worst.checks += 1;
    if err > worst.worst {
        worst.worst = err;
        worst.worst_case = case;
    }
}

fn suite_conjugation(q: &QuadratureSpec, _sign: f64) -> Result<SuiteResult, Error> {
    let mut result = SuiteResult {
        name: "conjugation",
        checks: 0,
        worst: 0.0,
        tolerance: 1e-10,
        worst_case: String::new(),
    };
    let integrands = [
        Integrand::Constant(2.0),
        Integrand::LogPower(0.5),
        Integrand::LogPower(2.0),
        Integrand::MuFamily(2.0),
    ];
    for sigma in [0.3, 0.5, 0.8, 1.5] {
        let p = FracParams::new(sigma, 1.0, std::f64::consts::E)?;
        for f in &integrands {
            for t in [1.2, 1.8, 2.5] {
                let (lhs, rhs) = conjugate_check(f, &p, t, q)?;
                track(
                    &mut result,
                    rel_err(lhs, rhs),
                    format!("sigma={sigma} f={f:?} t={t}"),
                );
                if let Integrand::LogPower(beta @ 2.0) = f {
                    let oracle = log_power_left_image(*beta, sigma, 1.0, t);
                    track(
                        &mut result,
                        rel_err(lhs, oracle),
                        format!("oracle sigma={sigma} beta={beta} t={t}"),
                    );
                }
            }
        }
    }
    Ok(result)
}

fn suite_ibp(q: &QuadratureSpec, _sign: f64) -> Result<SuiteResult, Error> {
    let mut result = SuiteResult {
        name: "ibp",
        checks: 0,
        worst: 0.0,
        tolerance: 1e-8,
        worst_case: String::new(),
    };
    let pool = [
        Integrand::Constant(1.0),
        Integrand::LogPower(1.5),
        Integrand::MuFamily(2.0),
    ];
    for sigma in [0.4, 0.8] {
        let p = FracParams::new(sigma, 1.0, std::f64::consts::E)?;
        for f in &pool {
            for g in &pool {
                let residual = integration_by_parts_residual(f, g, &p, q)?;
                let scale = integration_by_parts_scale(f, g, &p, q)?.max(1e-12);
                track(
                    &mut result,
                    residual.abs() / scale,
                    format!("sigma={sigma} f={f:?} g={g:?}"),
                );
            }
        }
    }
    Ok(result)
}

fn suite_closed_forms(q: &QuadratureSpec, sign: f64) -> Result<SuiteResult, Error> {
    let mut result = SuiteResult {
        name: "lemma3",
        checks: 0,
        worst: 0.0,
        tolerance: 1e-9,
        worst_case: String::new(),
    };
    let (a, t_end) = (1.0, std::f64::consts::E);
    for kappa in [1.0, 2.0, 3.5] {
        let m = MuParams::new(a, t_end, kappa)?;
        for sigma in [0.4, 0.7, 1.2] {
            let p = FracParams::new(sigma, a, t_end)?;
            let f = Integrand::MuFamily(kappa);
            for k in 1..=10 {
                let t = a * (t_end / a).powf(k as f64 / 11.0);
                let closed = sign * mu_right_image(&m, sigma, t)?;
                let quadrature = hadamard_right_integral(&f, &p, t, q)?;
                track(
                    &mut result,
                    rel_err(quadrature, closed),
                    format!("kappa={kappa} sigma={sigma} t={t:.4}"),
                );
            }
        }
    }
    Ok(result)
}

fn suite_boundary(q: &QuadratureSpec, _sign: f64) -> Result<SuiteResult, Error> {
    let mut result = SuiteResult {
        name: "boundary",
        checks: 0,
        worst: 0.0,
        tolerance: 1e-10,
        worst_case: String::new(),
    };
    let (a, t_end) = (1.0, std::f64::consts::E);
    for kappa in [1.0, 2.5] {
        let m = MuParams::new(a, t_end, kappa)?;
        for sigma in [0.4, 0.9] {
            // exact vanishing of mu and its image at t = T
            track(
                &mut result,
                mu_right_image(&m, sigma, t_end)?.abs(),
                format!("closed form at T, kappa={kappa} sigma={sigma}"),
            );
            let p = FracParams::new(sigma, a, t_end)?;
            let f = Integrand::MuFamily(kappa);
            track(
                &mut result,
                hadamard_right_integral(&f, &p, t_end, q)?.abs(),
                format!("quadrature at T, kappa={kappa} sigma={sigma}"),
            );
            // the image decays with the predicted power toward T
            let eps = 1e-4;
            let near = mu_right_image(&m, sigma, t_end * (-eps * (t_end / a).ln()).exp())?;
            let predicted = hadamard_frac_power_check(kappa, sigma, eps, a, t_end);
            track(
                &mut result,
                rel_err(near, predicted),
                format!("decay rate, kappa={kappa} sigma={sigma}"),
            );
        }
    }
    Ok(result)
}

// (J_T^sigma mu)(t) at ln(T/t) = eps ln(T/a), from the closed form
// independently recomputed: Gamma ratio times eps^{sigma+kappa} (ln T/a)^sigma.
fn hadamard_frac_power_check(kappa: f64, sigma: f64, eps: f64, a: f64, t_end: f64) -> f64 {
    let ratio = hadamard_frac_gamma_ratio(kappa + 1.0, sigma + kappa + 1.0);
    ratio * eps.powf(sigma + kappa) * (t_end / a).ln().powf(sigma)
}

fn hadamard_frac_gamma_ratio(num: f64, den: f64) -> f64 {
    hadamard_frac::special::gamma_fn(num).unwrap() / hadamard_frac::special::gamma_fn(den).unwrap()
}

fn suite_semigroup(q: &QuadratureSpec, _sign: f64) -> Result<SuiteResult, Error> {
    let mut result = SuiteResult {
        name: "semigroup",
        checks: 0,
        worst: 0.0,
        tolerance: 1e-6,
        worst_case: String::new(),
    };
    let (a, t_end) = (1.0, std::f64::consts::E);
    for (beta, sigma1, sigma2) in [(1.0, 0.5, 0.5), (2.0, 0.4, 0.9), (1.5, 0.7, 0.6)] {
        let inner = FracParams::new(sigma2, a, t_end)?;
        let f = Integrand::LogPower(beta);
        let grid = LogGridFunction::sample(a, t_end, 513, |t| {
            hadamard_left_integral(&f, &inner, t, q).unwrap_or(f64::NAN)
        })?;
        let outer = FracParams::new(sigma1, a, t_end)?;
        let composed = Integrand::Sampled(grid);
        for t in [1.3, 1.9, 2.6] {
            let got = hadamard_left_integral(&composed, &outer, t, q)?;
            let want = log_power_left_image(beta, sigma1 + sigma2, a, t);
            track(
                &mut result,
                rel_err(got, want),
                format!("beta={beta} sigma1={sigma1} sigma2={sigma2} t={t}"),
            );
        }
    }
    Ok(result)
}

fn load_profile(name: Option<&String>, dim: u32, part: ProfilePart) -> Result<Option<RadialProfile>, Failure> {
    match name {
        None => Ok(None),
        Some(n) => {
            let tag = parse_profile_tag(n)?;
            RadialProfile::new(tag, dim, part).map(Some).map_err(from_error)
        }
    }
}

fn data_integrals(
    f1: Option<f64>,
    f2: Option<f64>,
    profile_real: Option<&String>,
    profile_imag: Option<&String>,
    dim: u32,
) -> Result<(f64, f64), Failure> {
    let f1_int = match (f1, profile_real) {
        (Some(v), _) => v,
        (None, Some(_)) => {
            let rp = load_profile(profile_real, dim, ProfilePart::Real)?.unwrap();
            initial::total_integral(&rp).map_err(from_error)?
        }
        (None, None) => 0.0,
    };
    let f2_int = match (f2, profile_imag) {
        (Some(v), _) => v,
        (None, Some(_)) => {
            let rp = load_profile(profile_imag, dim, ProfilePart::Imaginary)?.unwrap();
            initial::total_integral(&rp).map_err(from_error)?
        }
        (None, None) => 0.0,
    };
    Ok((f1_int, f2_int))
}

fn cmd_criterion(args: CriterionArgs) -> Result<u8, Failure> {
    let pp = ProblemParams::new(
        args.alpha,
        args.gamma,
        args.dim,
        args.p,
        (args.lambda1, args.lambda2),
        args.a,
    )
    .map_err(from_error)?;
    let (f1_int, f2_int) = data_integrals(
        args.f1,
        args.f2,
        args.profile_real.as_ref(),
        args.profile_imag.as_ref(),
        args.dim,
    )?;
    let sf = criterion::sign_functionals(&pp, f1_int, f2_int).map_err(from_error)?;
    let report = criterion::evaluate(&pp, &sf);

    let text = match args.format {
        Format::Text => {
            let mut lines = vec![
                format!("verdict: {:?}", report.verdict),
                format!("p = {}", fmt_float(args.p)),
            ];
            let shown_upper = report
                .p_upper_combined
                .or(report.p_upper_t1)
                .or(report.p_upper_t2);
            if let Some(hi) = shown_upper {
                lines.push(format!(
                    "interval: ({}, {})",
                    fmt_float(report.p_lower),
                    fmt_float(hi)
                ));
            }
            lines.push(format!("sign functionals: I1 = {}, I2 = {}", fmt_float(sf.i1), fmt_float(sf.i2)));
            for (name, ok) in &report.conditions {
                lines.push(format!("  [{}] {}", if *ok { "ok" } else { "violated" }, name));
            }
            lines.join("\n")
        }
        _ => {
            let mut map = report_shell("criterion");
            let body = serde_json::to_value(&report).expect("report serialization");
            map.insert("report".into(), body);
            render_json(map)
        }
    };
    emit(text, args.out.as_ref())?;
    Ok(0)
}

fn cmd_integrals(args: IntegralsArgs) -> Result<u8, Failure> {
    let part = match args.part.as_str() {
        "real" => ProfilePart::Real,
        "imag" => ProfilePart::Imaginary,
        other => return Err(Failure::usage(format!("part must be real or imag, got `{other}`"))),
    };
    let rp = match (&args.csv, &args.profile) {
        (Some(path), _) => RadialProfile::custom_from_csv(path, args.dim, part).map_err(from_error)?,
        (None, Some(name)) => {
            RadialProfile::new(parse_profile_tag(name)?, args.dim, part).map_err(from_error)?
        }
        (None, None) => unreachable!("clap enforces one of profile/csv"),
    };
    let total = initial::total_integral(&rp).map_err(from_error)?;
    let closed = rp
        .reduced_closed_form()
        .map(|reduced| Ok::<f64, Failure>(reduced * initial::sphere_area(args.dim).map_err(from_error)?))
        .transpose()?;

    let text = match args.format {
        Format::Json => {
            let mut map = report_shell("integrals");
            map.insert("dim".into(), Value::Number(args.dim.into()));
            map.insert("total_integral".into(), json_float(total));
            map.insert(
                "closed_form".into(),
                closed.map(json_float).unwrap_or(Value::Null),
            );
            map.insert(
                "rel_difference".into(),
                closed
                    .map(|c| json_float(rel_err(total, c)))
                    .unwrap_or(Value::Null),
            );
            render_json(map)
        }
        _ => match closed {
            Some(c) => format!(
                "total integral = {}\nclosed form    = {}\nrel difference = {}",
                fmt_float(total),
                fmt_float(c),
                fmt_float(rel_err(total, c))
            ),
            None => format!("total integral = {}", fmt_float(total)),
        },
    };
    emit(text, args.out.as_ref())?;
    Ok(0)
}

fn cmd_probe(args: ProbeArgs) -> Result<u8, Failure> {
    let pp = ProblemParams::new(
        args.alpha,
        args.gamma,
        args.dim,
        args.p,
        (args.lambda1, args.lambda2),
        args.a,
    )
    .map_err(from_error)?;
    let r_grid: Vec<f64> = args
        .r_grid
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| Failure::usage(format!("cannot parse R grid `{}`", args.r_grid)))?;
    let kappa = args.kappa.unwrap_or_else(|| testfn::default_kappa(args.alpha, args.p));
    let ell = args.ell.unwrap_or_else(|| testfn::default_ell(args.p));
    let theta = args.theta.unwrap_or(2.0 / args.alpha);
    let q = quad_spec(args.rel_tol, args.quad_points)?;

    let cfg = ProbeConfig::new(pp, kappa, ell, r_grid, theta, q)
        .map_err(from_probe_error)?
        .with_profiles(
            load_profile(args.profile_real.as_ref(), args.dim, ProfilePart::Real)?,
            load_profile(args.profile_imag.as_ref(), args.dim, ProfilePart::Imaginary)?,
        );
    let sf = criterion::sign_functionals(&pp, args.f1, args.f2).map_err(from_error)?;
    if !sf.triggered() {
        return Err(Failure {
            code: EXIT_REGIME,
            message: "probe needs a positive sign functional; adjust --f1/--f2/--lambda1/--lambda2".into(),
        });
    }
    let summary = probe::sweep(&cfg, &sf).map_err(from_probe_error)?;

    let csv_path = args.out.with_extension("csv");
    let json_path = args.out.with_extension("json");

    let mut csv = String::from(
        "r,ln_t_over_a,k11_quad,k11_bound,k12,k21_quad,k21_bound,k22,k1,k2,lhs,rhs_bound,decay_exponent\r\n",
    );
    for row in &summary.rows {
        let fields = [
            row.r,
            row.ln_t_over_a,
            row.k11_quad,
            row.k11_bound,
            row.k12,
            row.k21_quad,
            row.k21_bound,
            row.k22,
            row.k1,
            row.k2,
            row.lhs,
            row.rhs_bound,
            row.decay_exponent,
        ];
        let line: Vec<String> = fields.iter().map(|&x| fmt_float(x)).collect();
        csv.push_str(&line.join(","));
        csv.push_str("\r\n");
    }
    fs::write(&csv_path, &csv).map_err(|e| Failure {
        code: EXIT_USAGE,
        message: format!("cannot write {}: {e}", csv_path.display()),
    })?;

    let mut map = report_shell("probe");
    map.insert("kappa".into(), json_float(kappa));
    map.insert("ell".into(), Value::Number(ell.into()));
    map.insert("theta".into(), json_float(theta));
    map.insert(
        "theta_equalizes".into(),
        Value::Bool((summary.r_exponent_first - summary.r_exponent_second).abs() < 1e-12),
    );
    let body = serde_json::to_value(&summary).expect("summary serialization");
    map.insert("summary".into(), body);
    let json = render_json(map);
    fs::write(&json_path, &json).map_err(|e| Failure {
        code: EXIT_USAGE,
        message: format!("cannot write {}: {e}", json_path.display()),
    })?;

    println!(
        "fitted slope = {} decay exponent = {} contradiction regime = {}",
        fmt_float(summary.fitted_slope),
        fmt_float(summary.decay_exponent),
        summary.contradiction_regime
    );
    println!("wrote {} and {}", csv_path.display(), json_path.display());
    Ok(0)
}
