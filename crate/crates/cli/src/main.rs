mod commands;
mod error;
mod fixtures;
mod report;
mod suite;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qgca::format::Loader;
use qgca::measure::parse_rational;

use commands::{ca, eca, mu, qg, Ctx, Outcome};
use error::CliError;
use report::Report;

#[derive(Parser)]
#[command(name = "qgca", version, about = "Exact analysis of quasigroup cellular automata")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Word length for measure and invariance scans.
    #[arg(long, global = true)]
    depth: Option<usize>,
    /// Conditioning words lighter than this rational are skipped.
    #[arg(long = "mass-floor", global = true, default_value = "0")]
    mass_floor: String,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for randomized sweeps.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads for exhaustive scans.
    #[arg(long, global = true)]
    jobs: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Quasigroup tables.
    #[command(subcommand)]
    Qg(QgCmd),
    /// Cellular automaton rules.
    #[command(subcommand)]
    Ca(CaCmd),
    /// Cylinder measures.
    #[command(subcommand)]
    Mu(MuCmd),
    /// Endomorphic CA on elementary abelian groups.
    #[command(subcommand)]
    Eca(EcaCmd),
    /// Runs every acceptance check and prints a PASS/FAIL table.
    PaperSuite {
        /// Read fixtures from this directory instead of the built-in set.
        #[arg(long)]
        fixtures: Option<PathBuf>,
    },
    /// Writes the built-in fixtures to a directory.
    ExportFixtures { dir: PathBuf },
}

#[derive(Subcommand)]
enum QgCmd {
    Validate { table: String },
    Dual { table: String },
    Sub {
        table: String,
        /// Also list singletons and the whole set.
        #[arg(long)]
        all: bool,
    },
}

#[derive(Subcommand)]
enum CaCmd {
    Step {
        rule: String,
        word: Vec<String>,
        #[arg(long, default_value_t = 1)]
        steps: usize,
    },
    Orbit { rule: String, word: Vec<String> },
    Fiber { rule: String, word: Vec<String> },
    Xi {
        rule: String,
        word: Vec<String>,
        #[arg(long)]
        inverse: bool,
    },
    Dual { rule: String },
    Recode { rule: String, word: Vec<String> },
}

#[derive(Subcommand)]
enum MuCmd {
    Eval { measure: String, word: Vec<String> },
    Invariance {
        measure: String,
        /// Test invariance under this rule instead of the shift.
        #[arg(long)]
        ca: Option<String>,
    },
    Entropy { measure: String },
    Conditional { measure: String, word: Vec<String> },
    Cmeasure {
        measure: String,
        #[arg(long)]
        group: String,
        /// Subgroup members, e.g. "0,1 1,1".
        #[arg(long)]
        subgroup: String,
    },
    Fibers {
        measure: String,
        #[arg(long)]
        ca: String,
    },
    Support { measure: String },
    Example11 {
        #[arg(long, default_value = "@cyclic:2")]
        group: String,
    },
}

#[derive(Subcommand)]
enum EcaCmd {
    Decompose { group: String, rule: String },
    Kernel { group: String, rule: String },
    Orbits { group: String, rule: String },
    Invsubgroups { group: String, rule: String },
    Hmax { group: String },
    Charpoly { matrix: String },
    Rcf { matrix: String },
    Invsubspaces { matrix: String },
    Audit { group: String, rule: String },
}

fn dispatch(ctx: &mut Ctx, command: Command) -> Outcome {
    match command {
        Command::Qg(c) => match c {
            QgCmd::Validate { table } => qg::validate(ctx, &table),
            QgCmd::Dual { table } => qg::dual(ctx, &table),
            QgCmd::Sub { table, all } => qg::sub(ctx, &table, all),
        },
        Command::Ca(c) => match c {
            CaCmd::Step { rule, word, steps } => ca::step(ctx, &rule, &word, steps),
            CaCmd::Orbit { rule, word } => ca::orbit(ctx, &rule, &word),
            CaCmd::Fiber { rule, word } => ca::fiber(ctx, &rule, &word),
            CaCmd::Xi { rule, word, inverse } => ca::xi(ctx, &rule, &word, inverse),
            CaCmd::Dual { rule } => ca::dual(ctx, &rule),
            CaCmd::Recode { rule, word } => ca::recode(ctx, &rule, &word),
        },
        Command::Mu(c) => match c {
            MuCmd::Eval { measure, word } => mu::eval(ctx, &measure, &word),
            MuCmd::Invariance { measure, ca } => mu::invariance(ctx, &measure, ca.as_deref()),
            MuCmd::Entropy { measure } => mu::entropy(ctx, &measure),
            MuCmd::Conditional { measure, word } => mu::conditional(ctx, &measure, &word),
            MuCmd::Cmeasure { measure, group, subgroup } => {
                mu::cmeasure(ctx, &measure, &group, &[subgroup])
            }
            MuCmd::Fibers { measure, ca } => mu::fibers(ctx, &measure, &ca),
            MuCmd::Support { measure } => mu::support(ctx, &measure),
            MuCmd::Example11 { group } => mu::example11_report(ctx, &group),
        },
        Command::Eca(c) => match c {
            EcaCmd::Decompose { group, rule } => eca::decompose(ctx, &group, &rule),
            EcaCmd::Kernel { group, rule } => eca::kernel_table(ctx, &group, &rule),
            EcaCmd::Orbits { group, rule } => eca::orbits(ctx, &group, &rule),
            EcaCmd::Invsubgroups { group, rule } => eca::invsubgroups(ctx, &group, &rule),
            EcaCmd::Hmax { group } => eca::hmax(ctx, &group),
            EcaCmd::Charpoly { matrix } => eca::charpoly(ctx, &matrix),
            EcaCmd::Rcf { matrix } => eca::rcf(ctx, &matrix),
            EcaCmd::Invsubspaces { matrix } => eca::invsubspaces(ctx, &matrix),
            EcaCmd::Audit { group, rule } => eca::audit(ctx, &group, &rule),
        },
        Command::PaperSuite { fixtures: dir } => {
            let (loader, base) = match dir {
                Some(d) => (Loader::filesystem(), d),
                None => (Loader::in_memory(fixtures::fixture_map()), PathBuf::new()),
            };
            let cfg = suite::SuiteConfig {
                loader: &loader,
                base: &base,
                depth: ctx.depth,
                seed: ctx.seed,
                mass_floor: ctx.mass_floor.clone(),
            };
            let rows = suite::run(&cfg);
            suite::write(&rows, &mut ctx.report);
            Ok(rows.iter().all(|r| r.status != suite::Status::Fail))
        }
        Command::ExportFixtures { dir } => {
            let written = fixtures::export(&dir).map_err(|e| CliError::Input(format!("{}: {e}", dir.display())))?;
            for path in written {
                ctx.report.line(path.display().to_string());
            }
            Ok(true)
        }
    }
}

fn run(cli: Cli) -> Result<(bool, String, Option<PathBuf>), (CliError, String)> {
    let mass_floor = parse_rational(&cli.mass_floor)
        .ok_or_else(|| (CliError::Input(format!("bad --mass-floor `{}`", cli.mass_floor)), String::new()))?;
    if let Some(jobs) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| (CliError::Input(e.to_string()), String::new()))?;
    }
    let mut ctx = Ctx {
        loader: Loader::filesystem(),
        depth: cli.depth,
        mass_floor,
        seed: cli.seed,
        report: Report::default(),
    };
    let outcome = dispatch(&mut ctx, cli.command);
    let text = std::mem::take(&mut ctx.report).into_string();
    match outcome {
        Ok(pass) => Ok((pass, text, cli.out)),
        Err(e) => Err((e, text)),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok((pass, text, out)) => {
            let written = match out {
                Some(path) => std::fs::write(&path, &text).map_err(|e| format!("{}: {e}", path.display())),
                None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| e.to_string()),
            };
            if let Err(e) = written {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
            ExitCode::from(if pass { 0 } else { 1 })
        }
        Err((e, partial)) => {
            print!("{partial}");
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
