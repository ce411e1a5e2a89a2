use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use flagram::algebra::objective_vector;
use flagram::certify::{certify, Certificate};
use flagram::enumerate::{enumerate_levels, flags_from_basis, types_from_levels, Limits};
use flagram::pipeline::{check_witness, parse_coloring, run_bound, RunOptions, StageError};
use flagram::rational::{format as fmt_q, to_f64};
use flagram::sdp::{assemble_with, export_sdpa, parse_solution, write_solution, Assembly};
use flagram::solver::{solve, SolverConfig};
use flagram::{Error, RamseyProblem};

#[derive(Parser)]
#[command(name = "flagram", version, about = "Certified Ramsey number upper bounds from flag algebra SDPs")]
struct Cli {
    /// Worker threads (defaults to all cores). Output does not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct SolverArgs {
    /// Relative duality gap at which the solver stops.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    max_iter: Option<usize>,
    /// Solution file from an external CSDP/SDPA-compatible solver, used
    /// instead of the internal solver.
    #[arg(long, value_name = "SOLUTION")]
    external: Option<PathBuf>,
}

impl SolverArgs {
    fn config(&self) -> Result<SolverConfig> {
        let mut cfg = SolverConfig::default();
        if let Some(t) = self.tol {
            cfg.duality_gap_tolerance = t;
            cfg.feasibility_tolerance = t;
        }
        if let Some(n) = self.max_iter {
            cfg.max_iterations = n;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Count admissible graphs, types and flags; optionally print their keys.
    Enumerate {
        problem: PathBuf,
        #[arg(long)]
        level: usize,
        /// Print the canonical keys (hex) of the basis and of every flag family.
        #[arg(long)]
        flags: bool,
    },
    /// Print the objective and product tables, one nonzero per line.
    Tables { problem: PathBuf },
    /// Write the semidefinite program in SDPA sparse format.
    Export {
        problem: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Solve the program and print the optimum.
    Solve {
        problem: PathBuf,
        #[command(flatten)]
        solver: SolverArgs,
        /// Write the internal solver's solution in CSDP format.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Read an external solver's solution and report its objective and slack.
    Import {
        problem: PathBuf,
        #[arg(long)]
        solution: PathBuf,
    },
    /// Solve, round and write an exact certificate.
    Certify {
        problem: PathBuf,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Re-check a certificate against a problem; exit 0 iff it holds.
    Verify { certificate: PathBuf, problem: PathBuf },
    /// Run every stage and report the certified bound.
    Bound {
        problem: PathBuf,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long)]
        certificate: Option<PathBuf>,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Validate a quotient coloring and print the density it allows.
    Witness { problem: PathBuf, coloring: PathBuf },
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn write_or_print(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("cannot write {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_problem(path: &Path) -> Result<RamseyProblem> {
    let text = read(path)?;
    text.parse::<RamseyProblem>()
        .with_context(|| format!("validate stage: {}", path.display()))
}

fn assemble(p: &RamseyProblem) -> Result<Assembly> {
    assemble_with(p, &Limits::from_env()).context("assemble stage")
}

fn obtain_solution(asm: &Assembly, args: &SolverArgs) -> Result<flagram::sdp::FloatSolution> {
    match &args.external {
        Some(path) => parse_solution(&read(path)?, &asm.sdp).context("import stage"),
        None => solve(&asm.sdp, &args.config()?).context("solve stage"),
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Enumerate { problem, level, flags } => {
            let p = load_problem(&problem)?;
            let limits = Limits::from_env();
            let levels = enumerate_levels(&p, level, &limits).context("enumerate stage")?;
            for b in &levels[1..] {
                println!("graphs on {} vertices: {}", b.level(), b.len());
            }
            if flags {
                println!("basis {level}");
                for key in levels[level].keys() {
                    println!("{}", key.to_hex());
                }
            }
            for s in (1..=level.saturating_sub(2)).filter(|s| (level - s) % 2 == 0) {
                let f = (level + s) / 2;
                let types = types_from_levels(&p, s, &levels);
                println!("types of size {s}: {}", types.len());
                for sigma in &types {
                    let fam = flags_from_basis(&p, sigma, &levels[f]).context("enumerate stage")?;
                    println!("type {} flags on {f} vertices: {}", sigma.key().to_hex(), fam.len());
                    if flags {
                        for flag in &fam {
                            println!("{}", flag.key().to_hex());
                        }
                    }
                }
            }
        }
        Command::Tables { problem } => {
            let p = load_problem(&problem)?;
            let asm = assemble(&p)?;
            let n = p.flag_order;
            let obj = objective_vector(&p, &asm.levels[p.ell], &asm.levels[n]).context("tables stage")?;
            for (h, q) in obj.iter().enumerate() {
                if !num_traits::Zero::is_zero(q) {
                    println!("objective {h} {}", fmt_q(q));
                }
            }
            for (t, table) in asm.tables.iter().enumerate() {
                for ((i, j), coeffs) in &table.coeffs {
                    for (h, q) in coeffs {
                        println!("{t} {i} {j} {h} {}", fmt_q(q));
                    }
                }
            }
        }
        Command::Export { problem, output } => {
            let p = load_problem(&problem)?;
            let asm = assemble(&p)?;
            write_or_print(output.as_deref(), &export_sdpa(&asm.sdp.standard_form()))?;
        }
        Command::Solve { problem, solver, output } => {
            let p = load_problem(&problem)?;
            let asm = assemble(&p)?;
            let sol = obtain_solution(&asm, &solver)?;
            println!("lambda = {:.12}", sol.lambda);
            println!("status: {}", sol.status);
            if let Some(path) = output {
                let raw = sol
                    .raw
                    .as_ref()
                    .context("only the internal solver's solution can be written")?;
                write_or_print(Some(&path), &write_solution(raw))?;
            }
        }
        Command::Import { problem, solution } => {
            let p = load_problem(&problem)?;
            let asm = assemble(&p)?;
            let sol = parse_solution(&read(&solution)?, &asm.sdp).context("import stage")?;
            let slack = asm.sdp.slack_f64(&sol.matrices)?;
            let min = slack.iter().cloned().fold(f64::INFINITY, f64::min);
            println!("lambda = {:.12}", sol.lambda);
            println!("blocks: {:?}", asm.sdp.block_dims());
            println!("smallest floating-point row value: {min:.12}");
        }
        Command::Certify { problem, solver, output } => {
            let p = load_problem(&problem)?;
            let asm = assemble(&p)?;
            let sol = obtain_solution(&asm, &solver)?;
            let cert = certify(&asm, &sol).context("certify stage")?;
            println!("delta = {} ~ {:.12}", fmt_q(&cert.delta), to_f64(&cert.delta));
            println!("bound: R <= {}", cert.bound);
            match output {
                Some(path) => write_or_print(Some(&path), &cert.to_text())?,
                None => print!("{}", cert.to_text()),
            }
        }
        Command::Verify { certificate, problem } => {
            let p = load_problem(&problem)?;
            let cert = Certificate::parse(&read(&certificate)?).context("verify stage")?;
            let asm = assemble(&p)?;
            cert.verify(&asm).context("verify stage")?;
            println!("certificate holds: delta = {}, R <= {}", fmt_q(&cert.delta), cert.bound);
        }
        Command::Bound { problem, solver, certificate, report } => {
            let p = load_problem(&problem)?;
            let opts = RunOptions {
                solver: solver.config()?,
                limits: None,
                external_solution: solver.external.as_deref().map(read).transpose()?,
            };
            let run = run_bound(&p, &opts)?;
            print!("{}", run.report.human());
            print!("{}", run.report.machine());
            if let Some(path) = report {
                let text = run.report.human() + &run.report.machine();
                write_or_print(Some(&path), &text)?;
            }
            match (&run.certificate, certificate) {
                (Some(cert), Some(path)) => write_or_print(Some(&path), &cert.to_text())?,
                (None, _) => return Ok(ExitCode::from(4)),
                _ => {}
            }
        }
        Command::Witness { problem, coloring } => {
            let p = load_problem(&problem)?;
            let g = parse_coloring(&read(&coloring)?).context("witness stage")?;
            let d = check_witness(&p, &g).context("witness stage")?;
            println!("admissible quotient on {} vertices", g.order());
            println!("independent-set density bound = {}", fmt_q(&d));
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn exit_code(err: &anyhow::Error) -> u8 {
    let core = err
        .chain()
        .find_map(|e| {
            e.downcast_ref::<Error>()
                .or_else(|| e.downcast_ref::<StageError>().map(|s| &s.error))
        });
    match core {
        Some(
            Error::Invalid(_)
            | Error::Parse { .. }
            | Error::Dimension(_)
            | Error::TypeMismatch(_)
            | Error::Asymmetric { .. }
            | Error::Inadmissible(_),
        ) => 2,
        Some(Error::ResourceLimit { .. }) => 3,
        Some(Error::Certification(_) | Error::NotPsd { .. }) => 4,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot configure {n} threads: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
