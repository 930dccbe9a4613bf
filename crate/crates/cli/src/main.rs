use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Duration;

use besynth::bench::{self, BenchSuite, MAX_LOCATIONS, MAX_OBJECTS};
use besynth::best_effort::{synthesize_with, ExportFormat, Mode, SynthError, SynthesisOptions};
use besynth::dfa::{compile_with, DfaError};
use besynth::domain::{Domain, DomainError, Scope, ValidationReport};
use besynth::runtime::{self, EnvPolicy, PlayOptions, RuntimeError};
use besynth::{parse, Budget, FluentSet, Formula};
use clap::{Parser, Subcommand, ValueEnum};

const EXIT_USAGE: u8 = 1;
const EXIT_VALIDATION: u8 = 2;
const EXIT_VIOLATIONS: u8 = 3;
const EXIT_BUDGET: u8 = 4;

#[derive(Parser)]
#[command(name = "besynth", version, about = "Best-effort LTLf synthesis for nondeterministic planning domains")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compile an LTLf formula to a minimal DFA.
    Compile {
        formula: String,
        /// Comma separated fluent names.
        #[arg(long, value_delimiter = ',', required = true)]
        fluents: Vec<String>,
        #[arg(long, value_enum, default_value_t = DfaFormat::Dot)]
        format: DfaFormat,
    },
    /// Load a domain file and check the well-formedness rules.
    CheckDomain {
        domain: PathBuf,
        #[arg(long, default_value = "reachable")]
        scope: Scope,
        /// Add a looping `nop` action on reachable states without actions.
        #[arg(long)]
        add_nop: bool,
        /// Write the (possibly augmented) domain here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Synthesize a best-effort strategy and print its classification.
    Synthesize {
        domain: PathBuf,
        formula: String,
        #[arg(long, value_enum, default_value_t = CliMode::BestEffort)]
        mode: CliMode,
        /// Export the strategy table (json).
        #[arg(long)]
        export: Option<ExportFormat>,
        /// File for the export instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        add_nop: bool,
    },
    /// Play the synthesized strategy against an environment policy and
    /// print the play record as JSON.
    Simulate {
        domain: PathBuf,
        formula: String,
        /// scripted:<file> | random:<seed> | adversarial | interactive
        #[arg(long)]
        env: String,
        #[arg(long)]
        max_steps: Option<usize>,
        /// Keep playing after the goal is satisfied.
        #[arg(long = "continue")]
        keep_going: bool,
        #[arg(long)]
        add_nop: bool,
    },
    /// Synthesize and check that the strategy attains every history value.
    Verify {
        domain: PathBuf,
        formula: String,
        #[arg(long)]
        add_nop: bool,
    },
    /// Time the objects-at-locations family and write a CSV.
    Bench {
        /// Object counts, `A..B` or `A`.
        #[arg(long, default_value = "1")]
        objects: String,
        /// Location counts, `C..D` or `C`.
        #[arg(long, default_value = "1..10")]
        locations: String,
        /// Per-instance timeout in seconds.
        #[arg(long, default_value_t = 60.0)]
        timeout: f64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, value_delimiter = ',')]
        modes: Option<Vec<CliMode>>,
        #[arg(long, default_value_t = 1)]
        reps: usize,
        #[arg(long, default_value_t = 1)]
        parallel: usize,
        /// Lift the default object and location caps.
        #[arg(long)]
        no_caps: bool,
    },
    /// Write an objects-at-locations domain and print its goal.
    GenArch {
        objects: usize,
        locations: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum DfaFormat {
    Dot,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum CliMode {
    BestEffort,
    AdversarialOnly,
    CooperativeOnly,
}

impl From<CliMode> for Mode {
    fn from(m: CliMode) -> Self {
        match m {
            CliMode::BestEffort => Mode::BestEffort,
            CliMode::AdversarialOnly => Mode::AdversarialOnly,
            CliMode::CooperativeOnly => Mode::CooperativeOnly,
        }
    }
}

/// An error with the exit code it maps to.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }

    fn usage(message: impl Into<String>) -> Self {
        Failure::new(EXIT_USAGE, message)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::usage(format!("I/O error: {e}"))
    }
}

impl From<DomainError> for Failure {
    fn from(e: DomainError) -> Self {
        match e {
            DomainError::Io(e) => Failure::usage(format!("cannot read domain: {e}")),
            other => Failure::new(EXIT_VALIDATION, other.to_string()),
        }
    }
}

impl From<SynthError> for Failure {
    fn from(e: SynthError) -> Self {
        let code = if e.resource().is_some() {
            EXIT_BUDGET
        } else if matches!(e, SynthError::InvalidDomain(_)) {
            EXIT_VALIDATION
        } else {
            EXIT_USAGE
        };
        Failure::new(code, e.to_string())
    }
}

impl From<RuntimeError> for Failure {
    fn from(e: RuntimeError) -> Self {
        Failure::usage(e.to_string())
    }
}

type CmdResult = Result<u8, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cmd: Command) -> CmdResult {
    match cmd {
        Command::Compile {
            formula,
            fluents,
            format,
        } => compile(&formula, &fluents, format),
        Command::CheckDomain {
            domain,
            scope,
            add_nop,
            out,
        } => check_domain(&domain, scope, add_nop, out.as_deref()),
        Command::Synthesize {
            domain,
            formula,
            mode,
            export,
            out,
            add_nop,
        } => synthesize(&domain, &formula, mode.into(), export, out.as_deref(), add_nop),
        Command::Simulate {
            domain,
            formula,
            env,
            max_steps,
            keep_going,
            add_nop,
        } => simulate(&domain, &formula, &env, max_steps, keep_going, add_nop),
        Command::Verify {
            domain,
            formula,
            add_nop,
        } => verify(&domain, &formula, add_nop),
        Command::Bench {
            objects,
            locations,
            timeout,
            out,
            modes,
            reps,
            parallel,
            no_caps,
        } => run_bench(BenchArgs {
            objects,
            locations,
            timeout,
            out,
            modes,
            reps,
            parallel,
            no_caps,
        }),
        Command::GenArch {
            objects,
            locations,
            out,
        } => gen_arch(objects, locations, out.as_deref()),
    }
}

/// Writes to stdout, treating a closed pipe as success.
fn emit(text: &str) -> io::Result<()> {
    let mut out = io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
        Err(e) if e.kind() == io::ErrorKind::BrokenPipe => Ok(()),
        other => other,
    }
}

fn parse_goal(text: &str, fluents: &FluentSet) -> Result<Formula, Failure> {
    parse(text, fluents).map_err(|e| Failure::usage(format!("bad formula: {e}")))
}

fn load_domain(path: &Path, add_nop: bool) -> Result<Arc<Domain>, Failure> {
    let d = Domain::load(path)?;
    Ok(Arc::new(if add_nop { d.with_nop() } else { d }))
}

fn print_report(d: &Domain, report: &ValidationReport) {
    for v in &report.violations {
        println!("violation: {}", v.describe(d));
    }
    if report.omitted > 0 {
        println!("... and {} more states without actions", report.omitted);
    }
}

fn compile(formula: &str, fluents: &[String], format: DfaFormat) -> CmdResult {
    let fl = FluentSet::new(fluents).map_err(|e| Failure::usage(e.to_string()))?;
    let f = parse_goal(formula, &fl)?;
    let dfa = compile_with(&f, &fl, &Budget::from_env()).map_err(|e| match e {
        DfaError::Resource(r) => Failure::new(EXIT_BUDGET, r.to_string()),
        other => Failure::usage(other.to_string()),
    })?;
    let text = match format {
        DfaFormat::Dot => dfa.to_dot(),
        DfaFormat::Json => serde_json::to_string_pretty(&dfa.to_json()).expect("dfa serializes") + "\n",
    };
    emit(&text)?;
    Ok(0)
}

fn check_domain(path: &Path, scope: Scope, add_nop: bool, out: Option<&Path>) -> CmdResult {
    let d = load_domain(path, add_nop)?;
    let report = d.validate(scope);
    print_report(&d, &report);
    if let Some(out) = out {
        fs::write(out, d.to_json_pretty())?;
    }
    if report.is_ok() {
        println!("ok: {} states checked", report.states_checked);
        Ok(0)
    } else {
        Ok(EXIT_VALIDATION)
    }
}

fn options(mode: Mode) -> SynthesisOptions {
    SynthesisOptions {
        mode,
        budget: Budget::from_env(),
        ..SynthesisOptions::default()
    }
}

fn solve(
    d: &Arc<Domain>,
    formula: &str,
    mode: Mode,
) -> Result<besynth::best_effort::BestEffortStrategy, Failure> {
    let goal = parse_goal(formula, d.fluents())?;
    synthesize_with(d, &goal, &options(mode)).map_err(|e| {
        if let SynthError::InvalidDomain(report) = &e {
            print_report(d, report);
        }
        Failure::from(e)
    })
}

fn synthesize(
    path: &Path,
    formula: &str,
    mode: Mode,
    export: Option<ExportFormat>,
    out: Option<&Path>,
    add_nop: bool,
) -> CmdResult {
    let d = load_domain(path, add_nop)?;
    let s = solve(&d, formula, mode)?;
    let a = s.arena();
    println!("classification: {}", s.classification());
    println!(
        "dfa states: {}, arena states: {}, |W_adv| = {}, |W_coop| = {}",
        a.dfa().num_states(),
        a.states().len(),
        s.w_adv().count_ones(..),
        s.w_coop().count_ones(..)
    );
    if let Some(format) = export {
        let text = s.export(format);
        match out {
            Some(p) => fs::write(p, text)?,
            None => emit(&(text + "\n"))?,
        }
    }
    Ok(0)
}

fn simulate(
    path: &Path,
    formula: &str,
    env: &str,
    max_steps: Option<usize>,
    keep_going: bool,
    add_nop: bool,
) -> CmdResult {
    let d = load_domain(path, add_nop)?;
    let s = solve(&d, formula, Mode::BestEffort)?;
    let opts = PlayOptions {
        max_steps: max_steps.unwrap_or_else(|| runtime::default_max_steps(&s)),
        keep_going,
    };
    let record = if env == "interactive" {
        let stdin = io::stdin();
        runtime::interactive_session(&s, stdin.lock(), io::stderr(), opts)?
    } else {
        let policy = if env == "adversarial" {
            EnvPolicy::Adversarial
        } else if let Some(seed) = env.strip_prefix("random:") {
            EnvPolicy::Random(
                seed.parse()
                    .map_err(|_| Failure::usage(format!("bad seed '{seed}'")))?,
            )
        } else if let Some(file) = env.strip_prefix("scripted:") {
            EnvPolicy::Scripted(runtime::parse_script(&fs::read_to_string(file)?)?)
        } else {
            return Err(Failure::usage(format!(
                "unknown environment '{env}' (expected scripted:<file>, random:<seed>, adversarial or interactive)"
            )));
        };
        runtime::play(&s, policy.environment(&s).as_mut(), opts)?
    };
    emit(&(serde_json::to_string_pretty(&record.to_json(&d)).expect("record serializes") + "\n"))?;
    Ok(0)
}

fn verify(path: &Path, formula: &str, add_nop: bool) -> CmdResult {
    let d = load_domain(path, add_nop)?;
    let s = solve(&d, formula, Mode::BestEffort)?;
    let report = s.verify_maximality();
    println!("classification: {}", s.classification());
    for v in &report.violations {
        println!("violation: {} {:?}: {}", v.state, v.kind, v.detail);
    }
    println!(
        "{} states checked, {} violations",
        report.checked,
        report.violations.len()
    );
    Ok(if report.is_ok() { 0 } else { EXIT_VIOLATIONS })
}

struct BenchArgs {
    objects: String,
    locations: String,
    timeout: f64,
    out: PathBuf,
    modes: Option<Vec<CliMode>>,
    reps: usize,
    parallel: usize,
    no_caps: bool,
}

fn parse_range(text: &str) -> Result<std::ops::RangeInclusive<usize>, Failure> {
    let bad = || Failure::usage(format!("bad range '{text}' (expected A..B or A)"));
    let (lo, hi) = match text.split_once("..") {
        Some((lo, hi)) => (lo, hi.strip_prefix('=').unwrap_or(hi)),
        None => (text, text),
    };
    let lo: usize = lo.trim().parse().map_err(|_| bad())?;
    let hi: usize = hi.trim().parse().map_err(|_| bad())?;
    if lo == 0 || lo > hi {
        return Err(bad());
    }
    Ok(lo..=hi)
}

fn run_bench(args: BenchArgs) -> CmdResult {
    let objects = parse_range(&args.objects)?;
    let locations = parse_range(&args.locations)?;
    if !args.no_caps && (*objects.end() > MAX_OBJECTS || *locations.end() > MAX_LOCATIONS) {
        return Err(Failure::usage(format!(
            "at most {MAX_OBJECTS} objects and {MAX_LOCATIONS} locations (use --no-caps to lift)"
        )));
    }
    if !(args.timeout > 0.0 && args.timeout.is_finite()) {
        return Err(Failure::usage("timeout must be positive"));
    }
    let suite = BenchSuite {
        objects,
        locations,
        modes: match args.modes {
            Some(m) => m.into_iter().map(Mode::from).collect(),
            None => Mode::ALL.to_vec(),
        },
        timeout: Duration::from_secs_f64(args.timeout),
        repetitions: args.reps.max(1),
        parallel: args.parallel.max(1),
        ..BenchSuite::default()
    };
    let file = fs::File::create(&args.out)?;
    let (rows, summary) = bench::run_bench(&suite, io::BufWriter::new(file))
        .map_err(|e| Failure::usage(e.to_string()))?;
    let stdout = io::stdout();
    let mut out = stdout.lock();
    writeln!(out, "wrote {} rows to {}", rows.len(), args.out.display())?;
    writeln!(out, "{summary}")?;
    Ok(0)
}

fn gen_arch(objects: usize, locations: usize, out: Option<&Path>) -> CmdResult {
    let (d, goal) =
        bench::gen_arch_benchmark(objects, locations).map_err(|e| Failure::usage(e.to_string()))?;
    match out {
        Some(p) => {
            fs::write(p, d.to_json_pretty())?;
            println!("{goal}");
        }
        None => emit(&(d.to_json_pretty() + "\n"))?,
    }
    Ok(0)
}
