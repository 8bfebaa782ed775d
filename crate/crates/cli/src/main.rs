use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bff_core::ast::Program;
use bff_core::interp::{OracleFn, DEFAULT_FUEL};
use bff_core::sct::{dot, flatten_avoiding, guard_vars, program_names, scg_of_assignment, unrolled_graphs};
use bff_core::tier::{Delta, RestrictedDelta};
use bff_core::{check_program, normalize, parse_program, pretty, run_program, CheckError, EvalMode, OracleSpec, Options, Registry, Word};
use clap::{Args, Parser, Subcommand};

mod corpus;

const EXIT_REJECTED: u8 = 1;
const EXIT_INVALID: u8 = 2;
const EXIT_RUNTIME: u8 = 3;

#[derive(Parser)]
#[command(name = "bff", version, about = "Checker and interpreter for .bff programs")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Decide tier safety and loop termination.
    Check(CheckArgs),
    /// Evaluate a program on oracle and word inputs.
    Run(RunArgs),
    /// Print the program with flattened assignments.
    Flatten { file: PathBuf },
    /// Export size-change graphs as DOT.
    Graphs {
        file: PathBuf,
        /// Output directory; prints to stdout when absent.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Check every entry of a corpus manifest.
    Corpus {
        #[arg(long, default_value = "corpus")]
        dir: PathBuf,
    },
}

#[derive(Args, Clone)]
pub struct AnalysisArgs {
    /// Largest tier the solver may use.
    #[arg(long, env = "BFF_MAX_TIER")]
    max_tier: Option<u32>,
    /// Extra operator definitions (TOML).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Restricted operator signature table (TOML).
    #[arg(long)]
    delta: Option<PathBuf>,
}

#[derive(Args)]
struct CheckArgs {
    file: PathBuf,
    #[arg(long)]
    json: bool,
    /// Only accept rank-0 programs.
    #[arg(long)]
    require_rank0: bool,
    #[command(flatten)]
    analysis: AnalysisArgs,
}

#[derive(Args)]
struct RunArgs {
    file: PathBuf,
    /// Word inputs, in box order.
    #[arg(long = "arg")]
    args: Vec<String>,
    /// Oracle inputs, in box order: id, const:W, prepend:W, reverse, dup, lenones, compose(A,B).
    #[arg(long = "oracle")]
    oracles: Vec<String>,
    #[arg(long, default_value_t = DEFAULT_FUEL)]
    fuel: u64,
    /// Extra operator definitions (TOML).
    #[arg(long)]
    config: Option<PathBuf>,
}

/// A failure carrying its exit code.
pub struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    pub fn new(code: u8, message: impl Into<String>) -> Failure {
        Failure { code, message: message.into() }
    }
}

impl From<CheckError> for Failure {
    fn from(e: CheckError) -> Failure {
        Failure::new(EXIT_INVALID, e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = std::thread::Builder::new()
        .stack_size(256 << 20)
        .spawn(move || dispatch(cli))
        .expect("spawn worker thread")
        .join()
        .unwrap_or_else(|_| Err(Failure::new(EXIT_RUNTIME, "internal error")));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            if !f.message.is_empty() {
                eprintln!("{}", f.message);
            }
            ExitCode::from(f.code)
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), Failure> {
    match cli.cmd {
        Cmd::Check(a) => cmd_check(a),
        Cmd::Run(a) => cmd_run(a),
        Cmd::Flatten { file } => cmd_flatten(&file),
        Cmd::Graphs { file, dot } => cmd_graphs(&file, dot.as_deref()),
        Cmd::Corpus { dir } => corpus::cmd_corpus(&dir),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::new(EXIT_INVALID, format!("{}: {e}", path.display())))
}

fn registry(config: Option<&Path>) -> Result<Registry, Failure> {
    let mut reg = Registry::builtin();
    if let Some(p) = config {
        reg.extend_from_toml(&read(p)?).map_err(|e| Failure::new(EXIT_INVALID, format!("{}: {e}", p.display())))?;
    }
    Ok(reg)
}

pub fn options(a: &AnalysisArgs, require_rank0: bool) -> Result<Options, Failure> {
    let registry = registry(a.config.as_deref())?;
    let delta = match &a.delta {
        None => Delta::Maximal,
        Some(p) => Delta::Restricted(
            RestrictedDelta::from_toml(&registry, &read(p)?)
                .map_err(|e| Failure::new(EXIT_INVALID, format!("{}: {e}", p.display())))?,
        ),
    };
    Ok(Options { max_tier: a.max_tier, require_rank0, delta, registry })
}

fn load(path: &Path) -> Result<Program, Failure> {
    let src = read(path)?;
    parse_program(&src).map_err(|errs| CheckError::Parse(errs).into()).map_err(|f: Failure| {
        Failure::new(f.code, format!("{}: {}", path.display(), f.message))
    })
}

fn cmd_check(a: CheckArgs) -> Result<(), Failure> {
    let opts = options(&a.analysis, a.require_rank0)?;
    let prg = load(&a.file)?;
    let report = check_program(&prg, &opts)
        .map_err(|e| Failure::new(EXIT_INVALID, format!("{}: {e}", a.file.display())))?
        .with_file(a.file.display().to_string());
    if a.json {
        println!("{}", report.to_json());
    } else {
        print!("{}", report.render());
    }
    if opts.accepts(report.verdict) {
        Ok(())
    } else {
        Err(Failure::new(EXIT_REJECTED, ""))
    }
}

pub fn parse_oracles(specs: &[String]) -> Result<Vec<OracleFn>, String> {
    specs.iter().map(|s| OracleSpec::parse(s).map(|o| o.to_fn()).map_err(|e| e.to_string())).collect()
}

fn cmd_run(a: RunArgs) -> Result<(), Failure> {
    let reg = registry(a.config.as_deref())?;
    let prg = load(&a.file)?;
    let diags = bff_core::check_well_formed(&prg, &reg);
    if !diags.is_empty() {
        return Err(CheckError::WellFormed(diags).into());
    }
    let oracles = parse_oracles(&a.oracles).map_err(|e| Failure::new(EXIT_RUNTIME, e))?;
    let words: Vec<Word> = a.args.iter().map(|s| Word::from(s.as_str())).collect();
    match run_program(&prg, &reg, &oracles, &words, a.fuel, EvalMode::ByName) {
        Ok(w) => {
            println!("{w}");
            Ok(())
        }
        Err(e) => Err(Failure::new(EXIT_RUNTIME, format!("runtime error ({}): {e}", e.kind()))),
    }
}

fn flattened(prg: &Program) -> Program {
    let avoid: BTreeSet<String> = program_names(prg);
    let mut out = prg.clone();
    for layer in &mut out.layers {
        if let bff_core::ast::Layer::Declare(procs) = layer {
            for p in procs.iter_mut() {
                *p = flatten_avoiding(p, &avoid);
            }
        }
    }
    out
}

fn cmd_flatten(file: &Path) -> Result<(), Failure> {
    let prg = load(file)?;
    print!("{}", pretty(&flattened(&prg)));
    Ok(())
}

fn cmd_graphs(file: &Path, out_dir: Option<&Path>) -> Result<(), Failure> {
    let reg = Registry::builtin();
    let prg = load(file)?;
    let diags = bff_core::check_well_formed(&prg, &reg);
    if !diags.is_empty() {
        return Err(CheckError::WellFormed(diags).into());
    }
    let prg = normalize(&prg).map_err(|e| Failure::from(CheckError::from(e)))?;
    let flat = flattened(&prg);
    let mut files: Vec<(String, String)> = Vec::new();
    for (orig, p) in prg.procedures().into_iter().zip(flat.procedures()) {
        let vars = guard_vars(orig);
        let name = &p.name.name;
        let mut n_asg = 0;
        let mut n_loop = 0;
        let mut err = None;
        p.body.visit(&mut |s| {
            use bff_core::ast::StmtKind;
            match &s.kind {
                StmtKind::Assign { target, value } => {
                    n_asg += 1;
                    match scg_of_assignment(target, value, &vars, &reg) {
                        Ok(g) => {
                            let title = format!("{} := {}", target.name, bff_core::syntax::pretty_expr(value));
                            files.push((format!("{name}_asg{n_asg}.dot"), dot::scg_to_dot(&g, &title)));
                        }
                        Err(e) => err = Some(e),
                    }
                }
                StmtKind::While { body, .. } => {
                    n_loop += 1;
                    match unrolled_graphs(body, &vars, &reg) {
                        Ok(gs) => {
                            let title = format!("{name} loop at {}", s.span);
                            files.push((format!("{name}_loop{n_loop}.dot"), dot::concatenation_to_dot(&gs, &title)));
                        }
                        Err(e) => err = Some(e),
                    }
                }
                _ => {}
            }
        });
        if let Some(e) = err {
            return Err(Failure::new(EXIT_INVALID, e.to_string()));
        }
    }
    match out_dir {
        None => {
            for (_, text) in &files {
                print!("{text}");
            }
        }
        Some(dir) => {
            fs::create_dir_all(dir).map_err(|e| Failure::new(EXIT_RUNTIME, format!("{}: {e}", dir.display())))?;
            for (name, text) in &files {
                let path = dir.join(name);
                fs::write(&path, text).map_err(|e| Failure::new(EXIT_RUNTIME, format!("{}: {e}", path.display())))?;
                println!("{}", path.display());
            }
        }
    }
    Ok(())
}
