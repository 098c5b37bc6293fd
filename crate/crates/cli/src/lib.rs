//! Command-line front end. [`run_command`] does all the work so the binary
//! and the tests share one code path.
//!
//! Exit codes: 0 success or PASS, 1 FAIL, 2 hypothesis-failed, 3 input error.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use qmfiber::barcode::oracle::{least_interleaving_eps, DEFAULT_CAP};
use qmfiber::barcode::{acyclicity_measure, interval_decomposition, min_interleaving_eps, Barcode};
use qmfiber::harness::format::{emit_instance, parse_instance, Instance};
use qmfiber::harness::generate::{generate, GenKind, GenParams, Generated};
use qmfiber::harness::render::render_diagram;
use qmfiber::harness::report::{Config, Report, Timing};
use qmfiber::homology::persistence_modules;
use qmfiber::persistence::{enumerate_persistence_points, persistence_fiber, PersistencePoset, PersistencePosetMap};
use qmfiber::poset::Side;
use qmfiber::reduction::{reduction_schedule, verify_main_bound, Verdict};
use qmfiber::{PersistenceModule, Prime};

pub const EXIT_INPUT: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "qmfiber", version, about = "Persistence posets, their homology, and fiber-wise reduction bounds")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Coefficient field F_p.
    #[arg(long, global = true, default_value_t = 2, value_parser = parse_prime)]
    prime: u64,
    #[arg(long, global = true, default_value_t = 2)]
    max_degree: usize,
    #[arg(long, global = true, value_enum, default_value_t = SideArg::Lower)]
    side: SideArg,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Check every removal step against 2·ε_v.
    #[arg(long, global = true)]
    verify_steps: bool,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum SideArg {
    Lower,
    Upper,
}

impl From<SideArg> for Side {
    fn from(s: SideArg) -> Side {
        match s {
            SideArg::Lower => Side::Lower,
            SideArg::Upper => Side::Upper,
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum KindArg {
    RandomFiltration,
    FiberedMap,
    ConeCollapse,
}

impl From<KindArg> for GenKind {
    fn from(k: KindArg) -> GenKind {
        match k {
            KindArg::RandomFiltration => GenKind::RandomFiltration,
            KindArg::FiberedMap => GenKind::FiberedMap,
            KindArg::ConeCollapse => GenKind::ConeCollapse,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse and validate an instance file.
    Check { file: PathBuf },
    /// Betti numbers of a diagram (or of both ends of a map) at every index.
    Homology { file: PathBuf },
    /// Barcodes of a module, or of a diagram's homology in each degree.
    Barcode { file: PathBuf },
    /// Interleaving distance between two modules, barcodes or diagrams.
    Distance { a: PathBuf, b: PathBuf },
    /// Fiber sizes and acyclicity over every point of a map's target.
    Fibers { file: PathBuf },
    /// Run the point-removal schedule on a map's cylinder.
    Reduce { file: PathBuf },
    /// Decide the main bound for a map; the exit code carries the verdict.
    Verify { file: PathBuf },
    /// Compare the barcode distance with the exhaustive interleaving search.
    Oracle {
        a: PathBuf,
        b: PathBuf,
        /// Largest total dimension the search accepts per module.
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: usize,
    },
    /// Write a seeded instance file.
    Gen {
        #[arg(value_enum)]
        kind: KindArg,
        #[arg(long, default_value_t = 5)]
        n: usize,
        #[arg(long = "T", default_value_t = 3)]
        t: usize,
        #[arg(long, default_value_t = 0)]
        delay: usize,
        #[arg(long, default_value_t = 0.4)]
        density: f64,
        /// Output path; the document goes to stdout when absent.
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Render a persistence diagram as SVG.
    Diagram {
        file: PathBuf,
        #[arg(long, default_value_t = 0)]
        degree: usize,
        /// Output path; the SVG goes to stdout when absent.
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
}

fn parse_prime(s: &str) -> Result<u64, String> {
    let p: u64 = s.parse().map_err(|e| format!("{e}"))?;
    Prime::new(p).map(|_| p).map_err(|e| e.to_string())
}

/// What a command printed and how it exited.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommandOutput {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl CommandOutput {
    fn input_error(msg: impl std::fmt::Display) -> Self {
        CommandOutput { code: EXIT_INPUT, stdout: String::new(), stderr: format!("error: {msg}\n") }
    }
}

enum Outcome {
    Report { results: Value, verdict: Option<Verdict> },
    Raw(String),
}

struct InputError(String);

impl<E: std::fmt::Display> From<E> for InputError {
    fn from(e: E) -> Self {
        InputError(e.to_string())
    }
}

/// Runs one invocation; `argv[0]` is the program name.
pub fn run_command<S: AsRef<str>>(argv: &[S]) -> CommandOutput {
    let args: Vec<&str> = argv.iter().map(AsRef::as_ref).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                CommandOutput { code: EXIT_INPUT, stdout: String::new(), stderr: text }
            } else {
                CommandOutput { code: 0, stdout: text, stderr: String::new() }
            };
        }
    };
    let started = Instant::now();
    let prime = Prime::new(cli.common.prime).expect("validated by the parser");
    let config = Config {
        prime,
        max_degree: cli.common.max_degree,
        side: cli.common.side.into(),
        seed: cli.common.seed,
        verify_steps: cli.common.verify_steps,
    };
    let outcome = match execute(&cli.command, &config) {
        Ok(o) => o,
        Err(InputError(msg)) => return CommandOutput::input_error(msg),
    };
    match outcome {
        Outcome::Raw(text) => CommandOutput { code: 0, stdout: text, stderr: String::new() },
        Outcome::Report { results, verdict } => {
            let report = Report {
                command: args.iter().skip(1).map(|s| s.to_string()).collect(),
                config,
                results,
                verdict: verdict.map(|v| v.as_str().to_string()),
                timing: Timing { elapsed_ms: started.elapsed().as_secs_f64() * 1000.0 },
            };
            let stdout = match cli.common.format {
                Format::Json => report.to_json(),
                Format::Text => report.to_text(),
            };
            CommandOutput { code: verdict.map_or(0, Verdict::exit_code), stdout, stderr: String::new() }
        }
    }
}

fn read(path: &Path) -> Result<Instance, InputError> {
    let text = fs::read_to_string(path).map_err(|e| InputError(format!("{}: {e}", path.display())))?;
    parse_instance(&text).map_err(|e| InputError(format!("{}: {e}", path.display())))
}

fn read_map(path: &Path) -> Result<PersistencePosetMap, InputError> {
    match read(path)? {
        Instance::Map(f) => Ok(f),
        other => Err(InputError(format!("{}: expected a map document, found {}", path.display(), kind_of(&other)))),
    }
}

fn kind_of(x: &Instance) -> &'static str {
    match x {
        Instance::Diagram(_) => "poset-diagram",
        Instance::Map(_) => "map",
        Instance::Module(_) => "module",
        Instance::Barcode(_) => "barcode",
    }
}

/// Homology modules of a diagram, or the module itself, in the requested degrees.
fn modules_of(x: &Instance, path: &Path, c: &Config) -> Result<Vec<PersistenceModule>, InputError> {
    match x {
        Instance::Diagram(d) => Ok(persistence_modules(d, c.prime, c.max_degree)?),
        Instance::Module(m) => {
            if m.prime() != c.prime {
                return Err(InputError(format!(
                    "{}: module is over F_{} but --prime is {}",
                    path.display(),
                    m.prime(),
                    c.prime
                )));
            }
            Ok(vec![m.clone()])
        }
        Instance::Barcode(b) => Ok(vec![b.to_module(c.prime)]),
        Instance::Map(_) => Err(InputError(format!("{}: expected a diagram, module or barcode", path.display()))),
    }
}

fn betti_table(x: &PersistencePoset, c: &Config) -> Result<Value, InputError> {
    let modules = persistence_modules(x, c.prime, c.max_degree)?;
    let by_index: Vec<Vec<usize>> = (0..=x.stabilization())
        .map(|i| modules.iter().map(|m| m.dim(i)).collect())
        .collect();
    Ok(json!({ "T": x.stabilization(), "betti": by_index }))
}

fn barcodes(modules: &[PersistenceModule]) -> Result<Vec<Barcode>, InputError> {
    modules.iter().map(|m| interval_decomposition(m).map_err(InputError::from)).collect()
}

fn execute(cmd: &Command, c: &Config) -> Result<Outcome, InputError> {
    let report = |results: Value| Outcome::Report { results, verdict: None };
    match cmd {
        Command::Check { file } => {
            let x = read(file)?;
            let details = match &x {
                Instance::Diagram(d) => json!({ "diagram": d.summary() }),
                Instance::Map(f) => json!({ "source": f.source().summary(), "target": f.target().summary() }),
                Instance::Module(m) => json!({ "prime": m.prime(), "dims": m.dims() }),
                Instance::Barcode(b) => json!({ "T": b.stabilization(), "intervals": b.len() }),
            };
            Ok(report(json!({ "kind": kind_of(&x), "valid": true, "details": details })))
        }
        Command::Homology { file } => match read(file)? {
            Instance::Diagram(d) => Ok(report(betti_table(&d, c)?)),
            Instance::Map(f) => Ok(report(json!({
                "source": betti_table(f.source(), c)?,
                "target": betti_table(f.target(), c)?,
            }))),
            other => Err(InputError(format!("{}: homology needs a diagram or map, found {}", file.display(), kind_of(&other)))),
        },
        Command::Barcode { file } => {
            let x = read(file)?;
            let bcs = barcodes(&modules_of(&x, file, c)?)?;
            Ok(report(json!({ "barcodes": bcs })))
        }
        Command::Distance { a, b } => {
            let (x, y) = (read(a)?, read(b)?);
            let (ma, mb) = (modules_of(&x, a, c)?, modules_of(&y, b, c)?);
            if ma.len() != mb.len() {
                return Err(InputError("cannot compare a diagram with a single module".into()));
            }
            let distances = ma
                .iter()
                .zip(&mb)
                .map(|(m, n)| min_interleaving_eps(m, n))
                .collect::<Result<Vec<_>, _>>()?;
            let max = distances.iter().copied().max();
            Ok(report(json!({ "distances": distances, "max": max })))
        }
        Command::Fibers { file } => {
            let f = read_map(file)?;
            let q = f.target();
            let top = q.poset(q.stabilization());
            let mut rows = Vec::new();
            for v in enumerate_persistence_points(q)? {
                let fiber = persistence_fiber(&f, &v, c.side)?;
                let acyc = acyclicity_measure(&fiber, c.prime, c.max_degree)?;
                rows.push(json!({
                    "point": top.name(v.top()),
                    "threshold": v.threshold(),
                    "fiber_sizes": fiber.sizes(),
                    "acyclicity": acyc,
                }));
            }
            Ok(report(json!({ "fibers": rows })))
        }
        Command::Reduce { file } => {
            let f = read_map(file)?;
            let ledger = reduction_schedule(&f, c.side, c.prime, c.max_degree, c.verify_steps)?;
            Ok(report(json!({ "ledger": ledger })))
        }
        Command::Verify { file } => {
            let f = read_map(file)?;
            let r = verify_main_bound(&f, c.side, c.prime, c.max_degree, c.verify_steps)?;
            let verdict = r.verdict;
            Ok(Outcome::Report { results: serde_json::to_value(&r)?, verdict: Some(verdict) })
        }
        Command::Oracle { a, b, cap } => {
            let (x, y) = (read(a)?, read(b)?);
            let (ma, mb) = (modules_of(&x, a, c)?, modules_of(&y, b, c)?);
            if ma.len() != 1 || mb.len() != 1 {
                return Err(InputError("oracle compares two modules or barcodes".into()));
            }
            let fast = min_interleaving_eps(&ma[0], &mb[0])?;
            let slow = least_interleaving_eps(&ma[0], &mb[0], *cap)?;
            let verdict = if fast == slow { Verdict::Pass } else { Verdict::Fail };
            Ok(Outcome::Report {
                results: json!({ "bottleneck": fast, "exhaustive": slow, "cap": cap }),
                verdict: Some(verdict),
            })
        }
        Command::Gen { kind, n, t, delay, density, output } => {
            let params = GenParams { n: *n, t: *t, delay: *delay, density: *density };
            let seed = c.seed.unwrap_or(0);
            let instance = match generate((*kind).into(), seed, params)? {
                Generated::Diagram(x) => Instance::Diagram(x),
                Generated::Map(f) => Instance::Map(f),
            };
            let text = emit_instance(&instance).to_json();
            match output {
                None => Ok(Outcome::Raw(text)),
                Some(path) => {
                    fs::write(path, &text).map_err(|e| InputError(format!("{}: {e}", path.display())))?;
                    Ok(report(json!({
                        "kind": kind_of(&instance),
                        "seed": seed,
                        "params": params,
                        "output": path.display().to_string(),
                    })))
                }
            }
        }
        Command::Diagram { file, degree, output } => {
            let x = read(file)?;
            let (barcode, title) = match &x {
                Instance::Barcode(b) => (b.clone(), "barcode".to_string()),
                Instance::Module(_) => (barcodes(&modules_of(&x, file, c)?)?.remove(0), "module".to_string()),
                Instance::Diagram(d) => {
                    let m = qmfiber::homology::persistence_module_of(d, c.prime, *degree)?;
                    (interval_decomposition(&m)?, format!("H{degree} over F{}", c.prime))
                }
                Instance::Map(_) => {
                    return Err(InputError(format!("{}: diagram needs a diagram, module or barcode", file.display())))
                }
            };
            let svg = render_diagram(&barcode, &title);
            match output {
                None => Ok(Outcome::Raw(svg)),
                Some(path) => {
                    fs::write(path, &svg).map_err(|e| InputError(format!("{}: {e}", path.display())))?;
                    Ok(report(json!({ "barcode": barcode, "output": path.display().to_string() })))
                }
            }
        }
    }
}
