//! `optbasis` command-line front end.
//!
//! Exit codes: 0 on success, 2 for configuration errors, 3 when the
//! eigensolver fails to converge, 1 for anything else (I/O).

mod config;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use optbasis::lengths::{self, LengthRule, ScanObjective, ScanOptions};
use optbasis::precision::to_decimal;
use optbasis::reference::{self, ReferenceCache};
use optbasis::spectrum::convergence_series;
use optbasis::studies::{self, Figure};
use optbasis::trigbasis::{self, Parity};
use optbasis::{solve, Error, Exec, Method, Potential, Precision, Sector};

use config::{Format, RunArgs, RunConfig};

#[derive(Parser, Debug)]
#[command(
    name = "optbasis",
    version,
    about = "Eigenvalues of -d²/dx² + V(x) in optimized bases"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve one problem and print its spectrum.
    Solve(SolveArgs),
    /// Relative errors at fixed N under several length rules.
    Compare(CompareArgs),
    /// Search the box half-width that minimizes an objective.
    Scan(ScanArgs),
    /// Relative error of selected levels over a range of N.
    Convergence(ConvergenceArgs),
    /// Emit plot data for a figure.
    Figure(FigureArgs),
    /// Regenerate reference eigenvalues by high-precision self-runs.
    Reference(ReferenceArgs),
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Write the assembled matrices (trig basis only).
    #[arg(long = "dump-matrix", value_name = "PATH")]
    dump_matrix: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CompareArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Comma-separated length rules.
    #[arg(long, value_delimiter = ',', default_value = "schwartz,op,trace")]
    rules: Vec<LengthRule>,
    /// Comma-separated global levels.
    #[arg(long, value_delimiter = ',', default_value = "0,2,4,6")]
    levels: Vec<usize>,
}

#[derive(Args, Debug)]
struct ScanArgs {
    #[command(flatten)]
    run: RunArgs,
    #[arg(long, default_value = "ground")]
    objective: ScanObjective,
    /// Lower end of the bracket (default L_op/2).
    #[arg(long)]
    lo: Option<f64>,
    /// Upper end of the bracket (default 2 L_op).
    #[arg(long)]
    hi: Option<f64>,
    #[arg(long, default_value_t = 1e-8)]
    tolerance: f64,
}

#[derive(Args, Debug)]
struct ConvergenceArgs {
    #[command(flatten)]
    run: RunArgs,
    /// `a..b`, `a..=b` or a comma-separated list.
    #[arg(long = "n-list", default_value = "5..=35")]
    n_list: String,
    #[arg(long, default_value_t = 1)]
    step: usize,
    #[arg(long, value_delimiter = ',', default_value = "0")]
    levels: Vec<usize>,
}

#[derive(Args, Debug)]
struct FigureArgs {
    /// fig1, fig2, fig3, fig5, fig8, figk or figa.
    name: String,
    #[arg(long, default_value_t = 128)]
    precision: u32,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    sequential: bool,
}

#[derive(Args, Debug)]
struct ReferenceArgs {
    /// Potentials to compute (x^k or a JSON term list).
    #[arg(long = "potential", required = true)]
    potentials: Vec<String>,
    /// Number of levels, starting at the ground state.
    #[arg(long, default_value_t = 10)]
    count: usize,
    #[arg(long = "N", default_value_t = 100)]
    n: usize,
    #[arg(long, default_value_t = 512)]
    precision: u32,
    /// Cache file to merge into; printed to stdout when absent.
    #[arg(long)]
    merge: Option<PathBuf>,
}

#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::NoConvergence { .. } => 3,
            Error::Io(_) | Error::NonPositiveTrace(_) => 1,
            _ => 2,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure {
            code: 1,
            message: e.to_string(),
        }
    }
}

fn config_error(message: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        message: message.into(),
    }
}

type CliResult<T> = Result<T, Failure>;

fn emit(text: &str, output: Option<&Path>) -> CliResult<()> {
    match output {
        Some(path) => fs::write(path, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn cmd_solve(args: SolveArgs) -> CliResult<()> {
    let cfg = RunConfig::resolve(&args.run)?;
    let problem = cfg.problem()?;
    let report = solve(&problem)?;
    if let Some(path) = &args.dump_matrix {
        if problem.method != Method::Trig {
            return Err(config_error(
                "--dump-matrix is only available for the trig basis",
            ));
        }
        let length = cfg.precision.parse(&report.meta.parameter)?;
        let mut file = fs::File::create(path)?;
        for parity in sector_parities(problem.sector) {
            let h =
                trigbasis::assemble(&problem.potential, parity, problem.n, &length, problem.exec)?;
            h.write_dump(&mut file)?;
        }
    }
    let text = match cfg.format {
        Format::Json => report.to_json()? + "\n",
        Format::Csv => report.to_csv(),
        Format::Table => report.to_table(),
    };
    emit(&text, cfg.output.as_deref())
}

fn sector_parities(sector: Sector) -> Vec<Parity> {
    match sector {
        Sector::Even => vec![Parity::Even],
        Sector::Odd => vec![Parity::Odd],
        Sector::Both => vec![Parity::Even, Parity::Odd],
    }
}

fn cmd_compare(args: CompareArgs) -> CliResult<()> {
    let cfg = RunConfig::resolve(&args.run)?;
    if args.rules.len() < 2 {
        return Err(config_error("compare needs at least two rules"));
    }
    if cfg.method != Method::Trig {
        return Err(config_error(
            "compare works on length rules of the trig basis",
        ));
    }
    let cmp = studies::compare_rules(
        &cfg.potential,
        cfg.n,
        &args.rules,
        &args.levels,
        cfg.precision,
        Exec::Parallel,
    )?;
    let text = match cfg.format {
        Format::Json => {
            let rows: Vec<serde_json::Value> = cmp
                .rules
                .iter()
                .enumerate()
                .map(|(r, rule)| {
                    serde_json::json!({
                        "rule": rule.name(),
                        "length": to_decimal(&cmp.lengths[r]),
                        "levels": cmp.levels,
                        "relative_errors": cmp.errors[r].iter().map(to_decimal).collect::<Vec<_>>(),
                    })
                })
                .collect();
            serde_json::to_string_pretty(&rows).map_err(Error::from)? + "\n"
        }
        _ => cmp.to_csv(),
    };
    emit(&text, cfg.output.as_deref())
}

fn cmd_scan(args: ScanArgs) -> CliResult<()> {
    let cfg = RunConfig::resolve(&args.run)?;
    if cfg.method != Method::Trig {
        return Err(config_error("scan applies to the trig basis"));
    }
    let op = lengths::length_for_potential(LengthRule::Op, &cfg.potential, cfg.n, cfg.precision)?
        .length
        .to_f64();
    let opts = ScanOptions {
        objective: args.objective,
        bracket: (args.lo.unwrap_or(op / 2.0), args.hi.unwrap_or(op * 2.0)),
        tolerance: args.tolerance,
        exec: Exec::Parallel,
    };
    let result = lengths::length_scan(&cfg.potential, cfg.n, &opts, cfg.precision)?;
    let text = match cfg.format {
        Format::Json => {
            serde_json::to_string_pretty(&serde_json::json!({
                "potential": cfg.potential.to_string(),
                "N": cfg.n,
                "objective": format!("{:?}", args.objective),
                "length": to_decimal(&result.length),
                "alpha": to_decimal(&result.alpha),
                "L_op": op,
            }))
            .map_err(Error::from)?
                + "\n"
        }
        _ => format!(
            "N,L_scan,alpha,L_op\n{},{},{},{}\n",
            cfg.n,
            to_decimal(&result.length),
            to_decimal(&result.alpha),
            op
        ),
    };
    emit(&text, cfg.output.as_deref())
}

fn parse_n_list(s: &str, step: usize) -> CliResult<Vec<usize>> {
    let bad = || config_error(format!("bad N list `{s}`"));
    let step = step.max(1);
    let list: Vec<usize> = if let Some((a, b)) = s.split_once("..") {
        let (inclusive, b) = match b.strip_prefix('=') {
            Some(b) => (true, b),
            None => (false, b),
        };
        let a: usize = a.trim().parse().map_err(|_| bad())?;
        let b: usize = b.trim().parse().map_err(|_| bad())?;
        let end = if inclusive { b + 1 } else { b };
        (a..end).step_by(step).collect()
    } else {
        s.split(',')
            .map(|x| x.trim().parse().map_err(|_| bad()))
            .collect::<CliResult<_>>()?
    };
    if list.is_empty() {
        return Err(bad());
    }
    Ok(list)
}

fn cmd_convergence(args: ConvergenceArgs) -> CliResult<()> {
    let cfg = RunConfig::resolve(&args.run)?;
    let ns = parse_n_list(&args.n_list, args.step)?;
    let mut problem = cfg.problem()?;
    problem.with_reference = false;
    let reference = reference::reference_levels(&cfg.potential, &args.levels, cfg.precision)
        .ok_or_else(|| {
            config_error(format!(
                "no reference values for {} at levels {:?}",
                cfg.potential, args.levels
            ))
        })?;
    let series = convergence_series(&problem, &ns, &args.levels, &reference)?;
    emit(&series.to_csv(), cfg.output.as_deref())
}

fn cmd_figure(args: FigureArgs) -> CliResult<()> {
    let figure: Figure = args.name.parse()?;
    let prec = Precision::new(args.precision)?;
    let exec = if args.sequential {
        Exec::Sequential
    } else {
        Exec::Parallel
    };
    let csv = studies::figure(figure, prec, exec)?;
    let output = match &args.output {
        Some(p) if p.is_dir() => Some(p.join(format!("{figure}.csv"))),
        other => other.clone(),
    };
    emit(&csv, output.as_deref())
}

fn cmd_reference(args: ReferenceArgs) -> CliResult<()> {
    let prec = Precision::new(args.precision)?;
    let mut cache = match &args.merge {
        Some(path) if path.exists() => ReferenceCache::parse(&fs::read_to_string(path)?)?,
        _ => ReferenceCache {
            version: reference::CACHE_VERSION,
            entries: Vec::new(),
        },
    };
    for spec in &args.potentials {
        let pot = Potential::parse(spec)?;
        let entries = reference::generate(&pot, args.count, args.n, prec)?;
        for e in &entries {
            eprintln!("{} level {}: {} digits", e.potential, e.level, e.digits);
        }
        cache.merge(entries);
    }
    let text = cache.to_json()?;
    match &args.merge {
        Some(path) => fs::write(path, text)?,
        None => emit(&text, None)?,
    }
    Ok(())
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Solve(a) => cmd_solve(a),
        Command::Compare(a) => cmd_compare(a),
        Command::Scan(a) => cmd_scan(a),
        Command::Convergence(a) => cmd_convergence(a),
        Command::Figure(a) => cmd_figure(a),
        Command::Reference(a) => cmd_reference(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn n_list_forms() {
        assert_eq!(parse_n_list("3..6", 1).unwrap(), vec![3, 4, 5]);
        assert_eq!(parse_n_list("8..=32", 8).unwrap(), vec![8, 16, 24, 32]);
        assert_eq!(parse_n_list("5, 10,20", 1).unwrap(), vec![5, 10, 20]);
        assert!(parse_n_list("5..", 1).is_err());
        assert!(parse_n_list("4..4", 1).is_err());
    }

    #[test]
    fn error_codes() {
        let f: Failure = Error::NoConvergence {
            sweeps: 100,
            residual: "1".into(),
        }
        .into();
        assert_eq!(f.code, 3);
        let f: Failure = Error::InvalidArgument("x".into()).into();
        assert_eq!(f.code, 2);
    }
}
