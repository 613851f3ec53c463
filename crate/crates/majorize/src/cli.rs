//! Command-line interface. Decision verbs report their verdict in the exit
//! code: 0 positive, 1 negative, 2 input error, 3 numerical failure.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use majorize_core::classical::{check_majorization, check_submajorization, synthesize_ds, synthesize_dss};
use majorize_core::itpfi::{
    chsh_seesaw, chsh_seesaw_pure, distill_target_scale, distillation_holds, powers_marginal_scale, powers_vector,
    trivialization_trend, PowersModel, SeesawConfig,
};
use majorize_core::linalg::overlap;
use majorize_core::locc::{
    locc_conversion_fidelity, locc_convertible, monotones, simulate_protocol, slocc_convertible, slocc_fidelity,
    synthesize_nielsen_protocol, BipartitePureState,
};
use majorize_core::quantum::{q_majorizes, q_submajorizes, synthesize_dss_channel, Density};
use majorize_core::stepfn::{StepFunction, WeightedVector};
use majorize_core::Error;
use serde_json::{json, Value};

use crate::json::{self, fmt_float, FieldError, Parsed};

#[derive(Debug, Parser)]
#[command(name = "majorize", version, about = "Majorization, LOCC conversion and Powers-state experiments")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Slack for majorization decisions (relative to the larger total).
    #[arg(long, global = true, allow_hyphen_values = true, default_value_t = majorize_core::DEFAULT_TOL)]
    tol: f64,
    /// Seed for randomized heuristics.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Output format; each command has its own default.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write the output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Lorenz curve of a vector, density or state.
    Lorenz { input: PathBuf },
    /// Decide whether the first input majorizes the second.
    Majorize {
        a: PathBuf,
        b: PathBuf,
        /// Decide submajorization (no equality of totals required).
        #[arg(long)]
        weak: bool,
    },
    /// Doubly stochastic map (or channel, for densities) taking source to target.
    SynthDs { source: PathBuf, target: PathBuf },
    /// Doubly substochastic map (or channel, for densities) taking source to target.
    SynthDss { source: PathBuf, target: PathBuf },
    /// Decide LOCC convertibility of two pure states.
    Convert {
        source: PathBuf,
        target: PathBuf,
        /// Also write a conversion protocol to this file.
        #[arg(long)]
        protocol: Option<PathBuf>,
    },
    /// Run a protocol on a state and list the branches.
    Simulate {
        state: PathBuf,
        protocol: PathBuf,
        /// Compare every branch with this state.
        #[arg(long)]
        target: Option<PathBuf>,
    },
    /// Rényi entropies, Schmidt rank and Lorenz curve of a pure state.
    Monotones {
        state: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "0,0.5,1,2")]
        alpha: Vec<f64>,
    },
    /// Decide SLOCC convertibility and report the SLOCC fidelity.
    Slocc { source: PathBuf, target: PathBuf },
    /// Conversion-fidelity trend with Powers-state catalysts.
    Powers {
        #[arg(long)]
        lambda: Option<f64>,
        /// Copies as a range `a..b` (inclusive) or a list `1,2,4`.
        #[arg(long)]
        n: Option<String>,
        /// Task name; `bell` is the conversion |11⟩ → Bell pair.
        #[arg(long)]
        target: Option<String>,
        /// Experiment config: {lambda, n_list, targets, seed, restarts}.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Instead of the trend, compress each unit-trace Powers scale by this factor.
        #[arg(long)]
        distill: Option<usize>,
    },
    /// Lower bound on the CHSH value by seesaw optimization.
    Bell {
        /// Pure state, or density with a `dims` field; defaults to Powers copies.
        input: Option<PathBuf>,
        #[arg(long, default_value_t = 1.0)]
        lambda: f64,
        #[arg(long, default_value_t = 1)]
        copies: usize,
        #[arg(long, default_value_t = 16)]
        restarts: usize,
        #[arg(long, default_value_t = 200)]
        iters: usize,
    },
}

#[derive(Debug)]
enum Failure {
    Input(String),
    Numerical(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Input(_) => 2,
            Failure::Numerical(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Input(m) | Failure::Numerical(m) => m,
        }
    }
}

/// What a command produced: renderings per format plus the exit code.
struct Report {
    default: Format,
    text: Option<String>,
    json: Option<Value>,
    csv: Option<(Vec<String>, Vec<Vec<String>>)>,
    code: i32,
}

impl Report {
    fn new(default: Format) -> Self {
        Self { default, text: None, json: None, csv: None, code: 0 }
    }

    fn text(mut self, s: String) -> Self {
        self.text = Some(s);
        self
    }

    fn json(mut self, v: Value) -> Self {
        self.json = Some(v);
        self
    }

    fn csv(mut self, header: &[&str], rows: Vec<Vec<String>>) -> Self {
        self.csv = Some((header.iter().map(|s| s.to_string()).collect(), rows));
        self
    }

    fn code(mut self, code: i32) -> Self {
        self.code = code;
        self
    }

    fn render(&self, format: Option<Format>) -> Result<String, Failure> {
        let format = format.unwrap_or(self.default);
        match format {
            Format::Text => self.text.clone().map(|mut s| {
                if !s.ends_with('\n') {
                    s.push('\n');
                }
                s
            }),
            Format::Json => self.json.as_ref().map(json::to_string),
            Format::Csv => self.csv.as_ref().map(|(h, rows)| write_csv(h, rows)),
        }
        .ok_or_else(|| Failure::Input(format!("format {format:?} is not available for this command")))
    }
}

fn write_csv(header: &[String], rows: &[Vec<String>]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("UTF-8 fields")
}

/// Parses `argv` (including the program name), runs the command and returns
/// the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message());
            f.code()
        }
    }
}

fn execute(cli: &Cli) -> Result<i32, Failure> {
    if !(cli.tol > 0.0 && cli.tol.is_finite()) {
        return Err(Failure::Input(format!("--tol must be positive, got {}", cli.tol)));
    }
    let report = dispatch(cli)?;
    let rendered = report.render(cli.format)?;
    match &cli.out {
        Some(path) => fs::write(path, rendered)
            .map_err(|e| Failure::Input(format!("cannot write {}: {e}", path.display())))?,
        None => {
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(rendered.as_bytes());
        }
    }
    Ok(report.code)
}

fn dispatch(cli: &Cli) -> Result<Report, Failure> {
    match &cli.command {
        Command::Lorenz { input } => lorenz(input),
        Command::Majorize { a, b, weak } => majorize(a, b, *weak, cli.tol),
        Command::SynthDs { source, target } => synth(source, target, false, cli.tol),
        Command::SynthDss { source, target } => synth(source, target, true, cli.tol),
        Command::Convert { source, target, protocol } => convert(source, target, protocol.as_deref(), cli.tol),
        Command::Simulate { state, protocol, target } => simulate(state, protocol, target.as_deref(), cli.tol),
        Command::Monotones { state, alpha } => monotone_table(state, alpha),
        Command::Slocc { source, target } => slocc(source, target),
        Command::Powers { lambda, n, target, config, distill } => {
            powers(*lambda, n.as_deref(), target.as_deref(), config.as_deref(), *distill, cli.seed)
        }
        Command::Bell { input, lambda, copies, restarts, iters } => {
            let cfg = SeesawConfig { restarts: *restarts, iters: *iters, seed: cli.seed, ..SeesawConfig::default() };
            bell(input.as_deref(), *lambda, *copies, &cfg)
        }
    }
}

fn core_failure(e: Error) -> Failure {
    match e {
        Error::GridTooFine { .. } | Error::BirkhoffResidual(_) | Error::Numerical(_) => Failure::Numerical(e.to_string()),
        _ => Failure::Input(e.to_string()),
    }
}

fn load(path: &Path) -> Result<Value, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Input(format!("{}: invalid JSON: {e}", path.display())))
}

fn parse<T>(path: &Path, parser: impl Fn(&Value, &str) -> Parsed<T>) -> Result<T, Failure> {
    let v = load(path)?;
    parser(&v, "").map_err(|e: FieldError| Failure::Input(format!("{}: {e}", path.display())))
}

fn name(path: &Path) -> String {
    path.file_stem().map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().into_owned())
}

/// Any input that has a decreasing rearrangement.
enum Spectral {
    Vector(WeightedVector),
    Density(Density),
    State(BipartitePureState),
}

impl Spectral {
    fn scale(&self) -> StepFunction {
        match self {
            Spectral::Vector(v) => v.rearrange(),
            Spectral::Density(d) => d.spectral_scale().clone(),
            Spectral::State(s) => s.schmidt_scale(),
        }
    }
}

fn spectral(v: &Value, path: &str) -> Parsed<Spectral> {
    if v.is_array() || v.get("values").is_some() {
        return json::weighted_vector(v, path).map(Spectral::Vector);
    }
    if v.get("schmidt").is_some() || v.get("vector").is_some() || v.get("factors").is_some() {
        return json::state(v, path).map(Spectral::State);
    }
    if v.get("matrix").is_some() || v.get("scale").is_some() {
        return json::density(v, path).map(Spectral::Density);
    }
    Err(FieldError {
        field: String::new(),
        message: "expected a vector, density (`matrix`/`scale`) or state (`schmidt`/`vector`)".into(),
    })
}

fn lorenz(input: &Path) -> Result<Report, Failure> {
    let curve = parse(input, spectral)?.scale().lorenz();
    let rows: Vec<Vec<String>> = curve.knots().iter().map(|&(t, l)| vec![fmt_float(t), fmt_float(l)]).collect();
    let text = rows.iter().map(|r| r.join(" ")).collect::<Vec<_>>().join("\n");
    Ok(Report::new(Format::Json).json(json::lorenz_json(&curve)).csv(&["t", "L"], rows).text(text))
}

fn majorize(a: &Path, b: &Path, weak: bool, tol: f64) -> Result<Report, Failure> {
    let (sa, sb) = (parse(a, spectral)?.scale(), parse(b, spectral)?.scale());
    let decide = |x: &StepFunction, y: &StepFunction| {
        let dominated = x.lorenz().dominates(&y.lorenz(), tol);
        let equal_totals = (x.total() - y.total()).abs() <= tol * x.total().max(y.total());
        dominated && (weak || equal_totals)
    };
    let (forward, reverse) = (decide(&sa, &sb), decide(&sb, &sa));
    let (na, nb) = (name(a), name(b));
    let sym = if weak { "≻_w" } else { "≻" };
    let relation = match (forward, reverse) {
        (true, true) => format!("{na} {sym} {nb} and {nb} {sym} {na}"),
        (true, false) => format!("{na} {sym} {nb}"),
        (false, true) => format!("{nb} {sym} {na}"),
        (false, false) => format!("{na} and {nb} are incomparable"),
    };
    let v = json!({
        "relation": relation,
        "weak": weak,
        "forward": forward,
        "reverse": reverse,
        "total_a": json::float(sa.total()),
        "total_b": json::float(sb.total()),
    });
    Ok(Report::new(Format::Text).text(relation).json(v).code(if forward { 0 } else { 1 }))
}

fn synth(source: &Path, target: &Path, sub: bool, tol: f64) -> Result<Report, Failure> {
    let (s, t) = (parse(source, spectral)?, parse(target, spectral)?);
    let negative = |msg: String| Ok(Report::new(Format::Text).text(msg.clone()).json(json!({"error": msg})).code(1));
    match (&s, &t) {
        (Spectral::Vector(f), Spectral::Vector(g)) => {
            let holds = if sub { check_submajorization(f, g, tol) } else { check_majorization(f, g, tol) };
            if !holds {
                return negative(format!("{} does not {} {}", name(source), if sub { "submajorize" } else { "majorize" }, name(target)));
            }
            let result = if sub { synthesize_dss(f, g) } else { synthesize_ds(f, g) };
            match result {
                Ok(map) => Ok(Report::new(Format::Json).json(json::stochastic_map_json(&map))),
                Err(e @ Error::NotExtendable(_)) => negative(e.to_string()),
                Err(e) => Err(core_failure(e)),
            }
        }
        (Spectral::Density(r), Spectral::Density(q)) if r.matrix().is_some() && q.matrix().is_some() => {
            let holds = if sub { q_submajorizes(r, q, tol) } else { q_majorizes(r, q, tol) };
            if !holds {
                return negative(format!("{} does not {} {}", name(source), if sub { "submajorize" } else { "majorize" }, name(target)));
            }
            let ch = synthesize_dss_channel(r, q).map_err(core_failure)?;
            Ok(Report::new(Format::Json).json(json::channel_json(&ch)))
        }
        _ => Err(Failure::Input("synthesis needs two weighted vectors or two matrix densities".into())),
    }
}

fn convert(source: &Path, target: &Path, protocol: Option<&Path>, tol: f64) -> Result<Report, Failure> {
    let (psi, phi) = (parse(source, json::state)?, parse(target, json::state)?);
    let convertible = locc_convertible(&psi, &phi, tol);
    let fidelity = locc_conversion_fidelity(&psi, &phi);
    let (ns, nt) = (name(source), name(target));
    let mut text = if convertible {
        format!("{ns} → {nt}: convertible")
    } else {
        format!("{ns} → {nt}: not convertible (best fidelity {})", fmt_float(fidelity))
    };
    let mut v = json!({"convertible": convertible, "fidelity": json::float(fidelity)});
    if let (true, Some(path)) = (convertible, protocol) {
        let p = synthesize_nielsen_protocol(&psi, &phi).map_err(core_failure)?;
        fs::write(path, json::to_string(&json::protocol_json(&p)))
            .map_err(|e| Failure::Input(format!("cannot write {}: {e}", path.display())))?;
        text.push_str(&format!("\nprotocol written to {}", path.display()));
        v["protocol"] = json!(path.display().to_string());
    }
    Ok(Report::new(Format::Text).text(text).json(v).code(if convertible { 0 } else { 1 }))
}

fn simulate(state: &Path, protocol: &Path, target: Option<&Path>, tol: f64) -> Result<Report, Failure> {
    let psi = parse(state, json::state)?;
    let p = parse(protocol, json::protocol)?;
    let target = target.map(|t| parse(t, json::state)).transpose()?;
    let target_vec = match &target {
        Some(t) => Some(t.vector().ok_or_else(|| Failure::Input("target must be a finite state".into()))?),
        None => None,
    };
    let sim = simulate_protocol(&psi, &p).map_err(core_failure)?;
    let mut rows = Vec::new();
    let mut branches = Vec::new();
    let mut worst: f64 = 1.0;
    for b in &sim.branches {
        let transcript = b.transcript.join("/");
        let mut row = vec![transcript, fmt_float(b.probability)];
        let mut entry = json!({
            "transcript": b.transcript,
            "probability": json::float(b.probability),
            "state": json::cvector_json(&b.state),
        });
        if let Some(t) = &target_vec {
            let f = overlap(&b.state, t);
            worst = worst.min(f);
            row.push(fmt_float(f));
            entry["fidelity"] = json::float(f);
        }
        rows.push(row);
        branches.push(entry);
    }
    let header: &[&str] = if target_vec.is_some() { &["transcript", "probability", "fidelity"] } else { &["transcript", "probability"] };
    let mut text = rows.iter().map(|r| r.join("  ")).collect::<Vec<_>>().join("\n");
    text.push_str(&format!("\ntotal probability {} (pruned {})", fmt_float(sim.total_probability()), fmt_float(sim.pruned_mass)));
    let v = json!({
        "branches": branches,
        "pruned_mass": json::float(sim.pruned_mass),
        "total_probability": json::float(sim.total_probability()),
    });
    let reached = target_vec.is_none() || worst >= 1.0 - tol;
    Ok(Report::new(Format::Text).text(text).json(v).csv(header, rows).code(if reached { 0 } else { 1 }))
}

fn monotone_table(state: &Path, alphas: &[f64]) -> Result<Report, Failure> {
    let psi = parse(state, json::state)?;
    let m = monotones(&psi, alphas).map_err(core_failure)?;
    if m.marginal_mismatch > 1e-10 {
        return Err(Failure::Numerical(format!("marginal spectra differ by {:e}", m.marginal_mismatch)));
    }
    let rows: Vec<Vec<String>> = m.renyi.iter().map(|&(a, s)| vec![fmt_float(a), fmt_float(s)]).collect();
    let mut text: Vec<String> = m.renyi.iter().map(|&(a, s)| format!("S_{a} = {}", fmt_float(s))).collect();
    text.push(format!("schmidt_rank = {}", fmt_float(m.schmidt_rank)));
    let v = json!({
        "renyi": m.renyi.iter().map(|&(a, s)| json!({"alpha": json::float(a), "entropy": json::float(s)})).collect::<Vec<_>>(),
        "schmidt_rank": json::float(m.schmidt_rank),
        "lorenz": json::lorenz_json(&m.lorenz),
    });
    Ok(Report::new(Format::Text).text(text.join("\n")).json(v).csv(&["alpha", "entropy"], rows))
}

fn slocc(source: &Path, target: &Path) -> Result<Report, Failure> {
    let (psi, phi) = (parse(source, json::state)?, parse(target, json::state)?);
    let ok = slocc_convertible(&psi, &phi);
    let f2 = slocc_fidelity(&psi, &phi);
    let verdict = if ok { "convertible" } else { "not convertible" };
    let text = format!("{} → {}: {verdict} by SLOCC (F² = {})", name(source), name(target), fmt_float(f2));
    let v = json!({
        "convertible": ok,
        "fidelity_squared": json::float(f2),
        "rank_source": json::float(psi.schmidt_rank()),
        "rank_target": json::float(phi.schmidt_rank()),
    });
    Ok(Report::new(Format::Text).text(text).json(v).code(if ok { 0 } else { 1 }))
}

/// `a..b` (inclusive) or `a,b,c`.
fn parse_n_list(s: &str) -> Result<Vec<usize>, Failure> {
    let bad = || Failure::Input(format!("--n: cannot parse {s:?} (expected a..b or a,b,c)"));
    let list: Vec<usize> = if let Some((a, b)) = s.split_once("..") {
        let (a, b): (usize, usize) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
        if a > b {
            return Err(bad());
        }
        (a..=b).collect()
    } else {
        s.split(',').map(|x| x.trim().parse().map_err(|_| bad())).collect::<Result<_, _>>()?
    };
    if list.is_empty() {
        return Err(bad());
    }
    Ok(list)
}

struct Task {
    name: String,
    source: StepFunction,
    target: StepFunction,
}

fn named_task(name: &str) -> Result<Task, Failure> {
    match name {
        "bell" => Ok(Task {
            name: "bell".into(),
            source: StepFunction::flat(1.0, 1.0).expect("valid piece"),
            target: StepFunction::flat(0.5, 2.0).expect("valid piece"),
        }),
        other => Err(Failure::Input(format!("unknown target {other:?} (known: bell)"))),
    }
}

struct Experiment {
    lambda: f64,
    n_list: Vec<usize>,
    tasks: Vec<Task>,
    seed: u64,
    restarts: usize,
}

fn experiment_config(v: &Value, seed: u64) -> Parsed<Experiment> {
    let obj = v.as_object().ok_or(FieldError { field: String::new(), message: "expected an object".into() })?;
    let lambda = match obj.get("lambda") {
        Some(l) => json::number(l, "lambda")?,
        None => 0.5,
    };
    let n_list = match obj.get("n_list") {
        Some(Value::Array(a)) => a.iter().enumerate().map(|(i, x)| json::count(x, &format!("n_list[{i}]"))).collect::<Parsed<_>>()?,
        Some(_) => return Err(FieldError { field: "n_list".into(), message: "expected an array".into() }),
        None => (1..=8).collect(),
    };
    let mut tasks = Vec::new();
    match obj.get("targets") {
        Some(Value::Array(a)) => {
            for (i, t) in a.iter().enumerate() {
                let path = format!("targets[{i}]");
                match t {
                    Value::String(s) => tasks.push(
                        named_task(s).map_err(|f| FieldError { field: path.clone(), message: f.message().to_string() })?,
                    ),
                    Value::Object(o) => {
                        let spectrum = |key: &str| -> Parsed<StepFunction> {
                            let p = format!("{path}.{key}");
                            let v = o.get(key).ok_or(FieldError { field: p.clone(), message: "missing".into() })?;
                            json::weighted_vector(v, &p).map(|w| w.rearrange())
                        };
                        let name = o.get("name").and_then(Value::as_str).unwrap_or("custom").to_string();
                        tasks.push(Task { name, source: spectrum("source")?, target: spectrum("target")? });
                    }
                    _ => return Err(FieldError { field: path, message: "expected a task name or {source, target}".into() }),
                }
            }
        }
        Some(_) => return Err(FieldError { field: "targets".into(), message: "expected an array".into() }),
        None => tasks.push(named_task("bell").expect("known task")),
    }
    if tasks.is_empty() {
        return Err(FieldError { field: "targets".into(), message: "no tasks".into() });
    }
    let seed = match obj.get("seed") {
        Some(s) => s.as_u64().ok_or(FieldError { field: "seed".into(), message: "expected a nonnegative integer".into() })?,
        None => seed,
    };
    let restarts = match obj.get("restarts") {
        Some(r) => json::count(r, "restarts")?,
        None => SeesawConfig::default().restarts,
    };
    Ok(Experiment { lambda, n_list, tasks, seed, restarts })
}

/// Copies up to which the CHSH value of `Ψ_λ^{⊗n}` is computed.
const MAX_BETA_COPIES: usize = 4;

fn powers(
    lambda: Option<f64>,
    n: Option<&str>,
    target: Option<&str>,
    config: Option<&Path>,
    distill: Option<usize>,
    seed: u64,
) -> Result<Report, Failure> {
    let mut exp = match config {
        Some(path) => parse(path, |v, p| {
            let _ = p;
            experiment_config(v, seed)
        })?,
        None => Experiment {
            lambda: 0.5,
            n_list: (1..=8).collect(),
            tasks: vec![named_task("bell")?],
            seed,
            restarts: SeesawConfig::default().restarts,
        },
    };
    if let Some(l) = lambda {
        exp.lambda = l;
    }
    if let Some(n) = n {
        exp.n_list = parse_n_list(n)?;
    }
    if let Some(t) = target {
        exp.tasks = vec![named_task(t)?];
    }
    let models = exp
        .n_list
        .iter()
        .map(|&n| PowersModel::new(exp.lambda, n))
        .collect::<Result<Vec<_>, _>>()
        .map_err(core_failure)?;

    if let Some(k) = distill {
        return powers_distill(&models, k);
    }

    let multi = exp.tasks.len() > 1;
    let mut header = vec!["n", "fidelity", "beta"];
    if multi {
        header.push("target");
    }
    let cfg = SeesawConfig { restarts: exp.restarts, seed: exp.seed, ..SeesawConfig::default() };
    let mut betas = Vec::with_capacity(models.len());
    for m in &models {
        betas.push(if m.copies() <= MAX_BETA_COPIES {
            let psi = powers_vector(m).map_err(core_failure)?;
            let d = 1usize << m.copies();
            Some(chsh_seesaw_pure(&psi, d, d, &cfg).map_err(core_failure)?)
        } else {
            None
        });
    }
    let mut rows = Vec::new();
    let mut records = Vec::new();
    for task in &exp.tasks {
        let trend = trivialization_trend(exp.lambda, &task.source, &task.target, &exp.n_list).map_err(core_failure)?;
        for ((n, f), beta) in trend.iter().zip(&betas) {
            let beta = *beta;
            let mut row = vec![n.to_string(), fmt_float(*f), beta.map(fmt_float).unwrap_or_default()];
            if multi {
                row.push(task.name.clone());
            }
            rows.push(row);
            records.push(json!({
                "target": task.name,
                "n": n,
                "fidelity": json::float(*f),
                "beta": beta.map(json::float).unwrap_or(Value::Null),
            }));
        }
    }
    let text = write_csv(&header.iter().map(|s| s.to_string()).collect::<Vec<_>>(), &rows);
    let v = json!({"lambda": json::float(exp.lambda), "seed": exp.seed, "results": records});
    Ok(Report::new(Format::Csv).csv(&header, rows).json(v).text(text))
}

/// Compresses the Powers scale of each model, normalized to a unit trace of
/// the identity, by `k` and reports the majorization check.
fn powers_distill(models: &[PowersModel], k: usize) -> Result<Report, Failure> {
    let mut rows = Vec::new();
    let mut records = Vec::new();
    for m in models {
        let scale = powers_marginal_scale(m);
        let normalized = scale.rescale(scale.support(), 1.0 / scale.support()).map_err(core_failure)?;
        let target = distill_target_scale(&normalized, k).map_err(core_failure)?;
        let ok = distillation_holds(&normalized, &target, k, majorize_core::DEFAULT_TOL);
        rows.push(vec![m.copies().to_string(), k.to_string(), ok.to_string(), fmt_float(target.max_value())]);
        records.push(json!({
            "n": m.copies(),
            "k": k,
            "check": ok,
            "source": json::step_function_json(&normalized),
            "target": json::step_function_json(&target),
        }));
    }
    let header = ["n", "k", "check", "max_value"];
    let text = write_csv(&header.iter().map(|s| s.to_string()).collect::<Vec<_>>(), &rows);
    Ok(Report::new(Format::Csv).csv(&header, rows).json(json!({"results": records})).text(text))
}

fn bell(input: Option<&Path>, lambda: f64, copies: usize, cfg: &SeesawConfig) -> Result<Report, Failure> {
    let beta = match input {
        Some(path) => {
            let v = load(path)?;
            if v.get("matrix").is_some() {
                let d = v.get("dims").ok_or_else(|| Failure::Input(format!("{}: field `dims`: missing", path.display())))?;
                let dims: Vec<usize> = d
                    .as_array()
                    .filter(|a| a.len() == 2)
                    .and_then(|a| a.iter().map(|x| x.as_u64().map(|n| n as usize)).collect())
                    .ok_or_else(|| Failure::Input(format!("{}: field `dims`: expected [d_A, d_B]", path.display())))?;
                let rho = json::cmatrix(&v["matrix"], "matrix").map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
                chsh_seesaw(&rho, dims[0], dims[1], cfg).map_err(core_failure)?
            } else {
                let psi = json::state(&v, "").map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
                let vec = psi.vector().ok_or_else(|| Failure::Input("CHSH needs a finite state".into()))?;
                let (da, db) = psi.dims().expect("finite state");
                chsh_seesaw_pure(&vec, da, db, cfg).map_err(core_failure)?
            }
        }
        None => {
            let m = PowersModel::new(lambda, copies).map_err(core_failure)?;
            let psi = powers_vector(&m).map_err(core_failure)?;
            let d = 1usize << copies;
            chsh_seesaw_pure(&psi, d, d, cfg).map_err(core_failure)?
        }
    };
    let v = json!({"beta": json::float(beta), "tsirelson_bound": json::float(2.0 * 2f64.sqrt())});
    Ok(Report::new(Format::Text).text(format!("beta = {}", fmt_float(beta))).json(v).csv(&["beta"], vec![vec![fmt_float(beta)]]))
}
