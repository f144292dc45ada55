mod parse;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use simplex_reach::generators::{
    b0_thermal, b0_zero_temperature, equidistant_gibbs, gibbs_vector, thermal_model, EnergySpec,
};
use simplex_reach::propagate::{default_sample_step, run_schedule, ControlSchedule, Trajectory};
use simplex_reach::steering::{plan_theorem1, plan_theorem2, theorem2_generator, verify_plan};
use simplex_reach::verify::{
    default_mu, qubit_reachable_bound, repro_example1, repro_example3, thm3_block_certificate,
    thm3_bound_sweep, thm3_tangential_check, SweepConfig,
};
use simplex_reach::{GeneratorMatrix, SimplexVector, SteeringPlan, Temperature, VERSION};

const OUT_DIR_ENV: &str = "SIMPLEX_REACH_OUT_DIR";

/// Reachability toolkit for permutation-controlled relaxation on the
/// probability simplex.
#[derive(Debug, Parser)]
#[command(name = "simplex-reach", version)]
struct Cli {
    /// Directory for output files; relative --out paths are resolved
    /// against it, and commands without --out write a default file there.
    #[arg(long, global = true, env = OUT_DIR_ENV)]
    out_dir: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Gibbs populations from energies and a temperature, or the
    /// constant-ratio vector for --alpha and --n.
    Gibbs(GibbsArgs),
    /// Steering plan from --x0 to --target for a zero-temperature chain.
    Synthesize(SynthesizeArgs),
    /// Run a schedule and emit the sampled trajectory.
    Simulate(SimulateArgs),
    /// Majorization-bound checks and example reproductions.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
struct GibbsArgs {
    /// Nondecreasing energy levels, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, conflicts_with = "alpha")]
    energies: Option<Vec<f64>>,
    /// Bath temperature: a positive number, `inf` or `0`.
    #[arg(long, value_parser = parse::temperature)]
    temperature: Option<Temperature>,
    /// Neighbour ratio in (0, 1) for the constant-ratio vector.
    #[arg(long, requires = "n")]
    alpha: Option<f64>,
    /// Dimension (with --alpha, or with a symbolic temperature).
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Generator selection shared by `simulate` and `verify`.
#[derive(Debug, Args, Clone, Default)]
struct ModelArgs {
    /// Dimension. Alone it selects the zero-temperature chain.
    #[arg(long)]
    n: Option<usize>,
    /// Thermal chain relaxing into the Gibbs vector of these energies.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, conflicts_with_all = ["alpha", "fixed_point"])]
    energies: Option<Vec<f64>>,
    #[arg(long, value_parser = parse::temperature)]
    temperature: Option<Temperature>,
    /// Thermal chain with constant neighbour ratio (needs --n).
    #[arg(long, conflicts_with = "fixed_point")]
    alpha: Option<f64>,
    /// Thermal chain relaxing into this vector.
    #[arg(long, value_parser = parse::simplex_vector)]
    fixed_point: Option<SimplexVector>,
    /// Local dimension of a block-lifted zero-temperature chain.
    #[arg(long, requires = "copies")]
    core_n: Option<usize>,
    /// Number of chain sites for --core-n.
    #[arg(long, requires = "core_n")]
    copies: Option<usize>,
}

#[derive(Debug, Args)]
struct SynthesizeArgs {
    #[arg(long, value_parser = parse::simplex_vector)]
    target: SimplexVector,
    /// Initial state; defaults to the ground state e1.
    #[arg(long, value_parser = parse::simplex_vector)]
    x0: Option<SimplexVector>,
    #[arg(long, default_value_t = 1e-6)]
    eps: f64,
    /// Dimension of the zero-temperature chain (defaults to the target's).
    #[arg(long, conflicts_with = "core_n")]
    n: Option<usize>,
    #[arg(long, requires = "copies")]
    core_n: Option<usize>,
    #[arg(long, requires = "core_n")]
    copies: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    /// Schedule document: a list of {duration, permutation} or a plan.
    #[arg(long)]
    schedule: PathBuf,
    /// Initial state; defaults to the ground state e1.
    #[arg(long, value_parser = parse::simplex_vector)]
    x0: Option<SimplexVector>,
    #[command(flatten)]
    model: ModelArgs,
    /// Sampling step; defaults to 1% of the longest segment.
    #[arg(long)]
    sample_step: Option<f64>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Events file for CSV output; defaults to <out>.events.csv.
    #[arg(long)]
    events: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Thm3,
    Examples,
    Qubit,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long, value_enum)]
    mode: Mode,
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long)]
    mu: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 6)]
    segments: usize,
    /// Start state; in thm3 mode this switches the sweep to exploratory data.
    #[arg(long, value_parser = parse::simplex_vector)]
    x0: Option<SimplexVector>,
    /// Single permutation to certify (cycle or one-line notation).
    #[arg(long)]
    perm: Option<String>,
    /// Qubit mode: fixed point d.
    #[arg(long, value_parser = parse::simplex_vector)]
    d: Option<SimplexVector>,
    /// Qubit mode: state to classify.
    #[arg(long, value_parser = parse::simplex_vector)]
    x: Option<SimplexVector>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Io(String),
}

impl From<simplex_reach::Error> for Failure {
    fn from(e: simplex_reach::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type Outcome = Result<bool, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let out = Output {
        dir: cli.out_dir.clone(),
    };
    let result = match cli.command {
        Command::Gibbs(a) => gibbs(&a, &out),
        Command::Synthesize(a) => synthesize(&a, &out),
        Command::Simulate(a) => simulate(&a, &out),
        Command::Verify(a) => verify(&a, &out),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(Failure::Usage(m)) | Err(Failure::Io(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
    }
}

struct Output {
    dir: Option<PathBuf>,
}

impl Output {
    /// Writes to `--out`, to `<out-dir>/<default_name>`, or to stdout.
    fn write(&self, out: Option<&Path>, default_name: &str, body: &str) -> Result<Option<PathBuf>, Failure> {
        let path = match (out, &self.dir) {
            (Some(p), Some(dir)) if p.is_relative() => Some(dir.join(p)),
            (Some(p), _) => Some(p.to_path_buf()),
            (None, Some(dir)) => Some(dir.join(default_name)),
            (None, None) => None,
        };
        match path {
            Some(p) => {
                if let Some(parent) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                    fs::create_dir_all(parent)?;
                }
                fs::write(&p, body)?;
                eprintln!("wrote {}", p.display());
                Ok(Some(p))
            }
            None => {
                let mut stdout = std::io::stdout().lock();
                stdout.write_all(body.as_bytes())?;
                Ok(None)
            }
        }
    }
}

fn to_json<T: Serialize>(v: &T) -> Result<String, Failure> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s)
}

/// Report wrapper carrying the tool version, seed and parameter echo.
#[derive(Serialize)]
struct Report<'a, T: Serialize> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    seed: Option<u64>,
    parameters: serde_json::Value,
    result: T,
}

fn report<T: Serialize>(command: &str, seed: Option<u64>, parameters: serde_json::Value, result: T) -> Report<'_, T> {
    Report {
        tool: "simplex-reach",
        version: VERSION,
        command,
        seed,
        parameters,
        result,
    }
}

fn gibbs(a: &GibbsArgs, out: &Output) -> Outcome {
    let d = match (&a.energies, a.alpha) {
        (Some(e), _) => {
            if a.n.is_some_and(|n| n != e.len()) {
                return Err(Failure::Usage("--n disagrees with the number of energies".into()));
            }
            let t = a.temperature.unwrap_or(Temperature::Finite(1.0));
            gibbs_vector(&EnergySpec::new(e.clone(), t)?)?
        }
        (None, Some(alpha)) => {
            if a.temperature.is_some() {
                return Err(Failure::Usage("--alpha fixes the spectrum; drop --temperature".into()));
            }
            equidistant_gibbs(alpha, a.n.expect("required by clap"))?
        }
        (None, None) => match (a.temperature, a.n) {
            (Some(Temperature::InfiniteLimit), Some(n)) => SimplexVector::uniform(n)?,
            (Some(Temperature::ZeroLimit), Some(n)) => SimplexVector::vertex(n, 0)?,
            _ => {
                return Err(Failure::Usage(
                    "give --energies [--temperature], --alpha with --n, or --temperature inf|0 with --n".into(),
                ))
            }
        },
    };
    out.write(a.out.as_deref(), "gibbs.json", &to_json(&d)?)?;
    Ok(true)
}

fn resolve_model(m: &ModelArgs, fallback_n: Option<usize>) -> Result<GeneratorMatrix, Failure> {
    if let (Some(core_n), Some(copies)) = (m.core_n, m.copies) {
        return Ok(theorem2_generator(core_n, copies)?);
    }
    let thermal = |d: &SimplexVector| -> Result<GeneratorMatrix, Failure> { Ok(b0_thermal(&thermal_model(d)?)?) };
    if let Some(e) = &m.energies {
        let t = m.temperature.unwrap_or(Temperature::Finite(1.0));
        return thermal(&gibbs_vector(&EnergySpec::new(e.clone(), t)?)?);
    }
    if let Some(d) = &m.fixed_point {
        return thermal(d);
    }
    let n = m.n.or(fallback_n).ok_or_else(|| Failure::Usage("no model given: use --n, --energies, --alpha, --fixed-point or --core-n/--copies".into()))?;
    if let Some(alpha) = m.alpha {
        return thermal(&equidistant_gibbs(alpha, n)?);
    }
    match m.temperature {
        None | Some(Temperature::ZeroLimit) => Ok(b0_zero_temperature(n)?),
        Some(Temperature::InfiniteLimit) => thermal(&SimplexVector::uniform(n)?),
        Some(Temperature::Finite(_)) => Err(Failure::Usage("a finite --temperature needs --energies".into())),
    }
}

fn synthesize(a: &SynthesizeArgs, out: &Output) -> Outcome {
    let target = &a.target;
    let n = target.dim();
    let x0 = match &a.x0 {
        Some(x) => x.clone(),
        None => SimplexVector::vertex(n, 0)?,
    };
    let (b, plan) = match (a.core_n, a.copies) {
        (Some(core_n), Some(copies)) => (
            theorem2_generator(core_n, copies)?,
            plan_theorem2(core_n, copies, &x0, target, a.eps)?,
        ),
        _ => {
            if a.n.is_some_and(|m| m != n) {
                return Err(Failure::Usage(format!("--n {} disagrees with the target dimension {n}", a.n.unwrap_or(0))));
            }
            let b = b0_zero_temperature(n)?;
            let plan = plan_theorem1(&b, &x0, target, a.eps)?;
            (b, plan)
        }
    };
    let distance = verify_plan(&b, &x0, &plan, target)?;
    eprintln!(
        "plan: {} segments, duration {:.6}, predicted error {:.3e}, simulated error {:.3e}",
        plan.schedule.len(),
        plan.total_duration(),
        plan.predicted_error,
        distance
    );
    out.write(a.out.as_deref(), "plan.json", &to_json(&plan)?)?;
    Ok(true)
}

fn read_schedule(path: &Path) -> Result<ControlSchedule, Failure> {
    let body = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    let value: serde_json::Value = serde_json::from_str(&body)?;
    if value.is_object() {
        let plan: SteeringPlan = serde_json::from_value(value)?;
        Ok(plan.schedule)
    } else {
        Ok(serde_json::from_value(value)?)
    }
}

fn simulate(a: &SimulateArgs, out: &Output) -> Outcome {
    let schedule = read_schedule(&a.schedule)?;
    let dim = a
        .x0
        .as_ref()
        .map(|x| x.dim())
        .or_else(|| schedule.segments.first().map(|s| s.permutation.dim()));
    let b = resolve_model(&a.model, dim)?;
    let x0 = match &a.x0 {
        Some(x) => x.clone(),
        None => SimplexVector::vertex(b.dim(), 0)?,
    };
    let step = a.sample_step.unwrap_or_else(|| default_sample_step(&schedule));
    let traj = run_schedule(&b, &x0, &schedule, step)?;
    match a.format {
        Format::Json => {
            out.write(a.out.as_deref(), "trajectory.json", &to_json(&traj)?)?;
        }
        Format::Csv => {
            let written = out.write(a.out.as_deref(), "trajectory.csv", &trajectory_csv(&traj))?;
            let events = a.events.clone().or_else(|| written.map(|p| p.with_extension("events.csv")));
            if let Some(p) = events {
                let p = match &out.dir {
                    Some(dir) if p.is_relative() && a.events.is_some() => dir.join(p),
                    _ => p,
                };
                fs::write(&p, events_csv(&traj))?;
                eprintln!("wrote {}", p.display());
            }
        }
    }
    Ok(true)
}

fn trajectory_csv(t: &Trajectory) -> String {
    let n = t.final_state.dim();
    let mut s = String::from("time");
    for i in 1..=n {
        s.push_str(&format!(",x{i}"));
    }
    s.push('\n');
    for (time, x) in &t.samples {
        s.push_str(&time.to_string());
        for v in x.as_slice() {
            s.push(',');
            s.push_str(&v.to_string());
        }
        s.push('\n');
    }
    s
}

fn events_csv(t: &Trajectory) -> String {
    let mut s = String::from("time,permutation\n");
    for (time, p) in &t.events {
        let image: Vec<String> = p.to_one_based().iter().map(|v| v.to_string()).collect();
        s.push_str(&format!("{time},{}\n", image.join(" ")));
    }
    s
}

fn verify(a: &VerifyArgs, out: &Output) -> Outcome {
    match a.mode {
        Mode::Examples => verify_examples(a, out),
        Mode::Qubit => verify_qubit(a, out),
        Mode::Thm3 => verify_thm3(a, out),
    }
}

fn verify_examples(a: &VerifyArgs, out: &Output) -> Outcome {
    let e1 = repro_example1()?;
    let e3 = repro_example3()?;
    let ok = e1.passed() && e3.passed();
    for e in [&e1, &e3] {
        eprintln!(
            "{}: max deviation from paper {:.2e} ({}), claims {}",
            e.name,
            e.max_deviation,
            if e.matches_paper { "match" } else { "MISMATCH" },
            if e.claims_hold() { "hold" } else { "FAIL" }
        );
    }
    let doc = report("verify", Some(a.seed), json!({"mode": "examples"}), json!({"example1": e1, "example3": e3, "all_passed": ok}));
    out.write(a.out.as_deref(), "verify-examples.json", &to_json(&doc)?)?;
    Ok(ok)
}

fn verify_qubit(a: &VerifyArgs, out: &Output) -> Outcome {
    let missing = |name: &str| Failure::Usage(format!("qubit mode needs --{name}"));
    let x0 = a.x0.as_ref().ok_or_else(|| missing("x0"))?;
    let d = a.d.as_ref().or(a.model.fixed_point.as_ref()).ok_or_else(|| missing("d"))?;
    let x = a.x.as_ref().ok_or_else(|| missing("x"))?;
    let inside = qubit_reachable_bound(x0, d, x)?;
    let doc = report(
        "verify",
        Some(a.seed),
        json!({"mode": "qubit", "x0": x0, "d": d, "x": x}),
        json!({"in_bound": inside}),
    );
    out.write(a.out.as_deref(), "verify-qubit.json", &to_json(&doc)?)?;
    Ok(true)
}

fn verify_thm3(a: &VerifyArgs, out: &Output) -> Outcome {
    let m = &a.model;
    let d = if let Some(e) = &m.energies {
        gibbs_vector(&EnergySpec::new(e.clone(), m.temperature.unwrap_or(Temperature::Finite(1.0)))?)?
    } else if let Some(d) = &m.fixed_point {
        d.clone()
    } else {
        equidistant_gibbs(m.alpha.unwrap_or(0.5), m.n.unwrap_or(3))?
    };
    let b = b0_thermal(&thermal_model(&d)?)?;
    let mu = a.mu.unwrap_or_else(|| default_mu(&b));
    let n = d.dim();

    if let Some(spec) = &a.perm {
        let pi = parse::permutation(spec, Some(n)).map_err(Failure::Usage)?;
        let tangential = thm3_tangential_check(&b, &d, &pi, mu);
        let mut certificates = Vec::new();
        let mut cert_ok = true;
        let mut cert_error = None;
        for k in 1..=n {
            match thm3_block_certificate(&b, &d, &pi, k) {
                Ok(c) => {
                    cert_ok &= c.iter().all(|c| c.consistent(1e-12) && c.nonnegative(1e-12));
                    certificates.push(json!({"k": k, "blocks": c}));
                }
                Err(e) => {
                    cert_error = Some(e.to_string());
                    break;
                }
            }
        }
        let ok = matches!(tangential, Ok(true)) && cert_ok;
        let doc = report(
            "verify",
            Some(a.seed),
            json!({"mode": "thm3", "d": d, "mu": mu, "perm": pi}),
            json!({
                "tangential": match &tangential { Ok(v) => json!(v), Err(e) => json!(e.to_string()) },
                "certificates": certificates,
                "certificate_error": cert_error,
                "passed": ok,
            }),
        );
        out.write(a.out.as_deref(), "verify-thm3.json", &to_json(&doc)?)?;
        return Ok(ok);
    }

    let mut cfg = SweepConfig::new(d, a.trials, a.seed);
    cfg.mu = Some(mu);
    cfg.segments_per_trial = a.segments;
    cfg.x0 = a.x0.clone();
    let r = thm3_bound_sweep(&cfg)?;
    let tangential_ok = r.tangential.as_ref().is_none_or(|t| t.all_pass());
    eprintln!(
        "{} trials, {} states checked, {} violations, tangential check {}",
        a.trials,
        r.states_checked,
        r.violation_count(),
        match &r.tangential {
            None => "skipped".to_string(),
            Some(t) if t.all_pass() => format!("passed for all {} permutations", t.checked),
            Some(t) => format!("failed for {} of {} permutations", t.failures.len() + t.exits.len(), t.checked),
        }
    );
    let ok = r.violation_count() == 0 && tangential_ok;
    let doc = report("verify", Some(a.seed), json!({"mode": "thm3", "config": &cfg}), &r);
    out.write(a.out.as_deref(), "verify-thm3.json", &to_json(&doc)?)?;
    Ok(ok)
}
