mod args;
mod report;
mod suites;

use adelic_core::schanuel::{count_projective_points, schanuel_constant, ProjectiveCountConfig};
use adelic_core::Error;
use args::{Cli, Command, ConstantKind, CountKind, Format};
use clap::Parser;
use report::{Cell, Report};
use std::process::ExitCode;

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) | Error::Domain(_) | Error::Precondition(_) | Error::Degeneracy(_) => 3,
        Error::Resource(_) => 4,
        Error::Integrity(_) => 5,
    }
}

enum Outcome {
    Report(Report, Option<Format>),
    Scalar(String),
}

fn execute(cli: Cli) -> adelic_core::Result<(Outcome, Option<std::path::PathBuf>)> {
    match cli.command {
        Command::List { format } => {
            let mut r = Report::new("list", &["suite", "checks"]);
            for (name, what) in suites::list() {
                r.row(vec![name.into(), what.into()]);
            }
            Ok((Outcome::Report(r, Some(format.unwrap_or(Format::Csv))), None))
        }
        Command::Verify { suite, params } => {
            let r = suites::run(suite, &params)?;
            Ok((Outcome::Report(r, params.format), params.out.clone()))
        }
        Command::Count { what: CountKind::Projective, params } => {
            let f = suites::field(&params, "Q")?;
            let n = params.n.unwrap_or(2);
            let b = params.bound.ok_or_else(|| Error::Config("--B is required".into()))?;
            let count = count_projective_points(&ProjectiveCountConfig::new(f.clone(), n, b)?)?;
            match params.format {
                None => Ok((Outcome::Scalar(count.to_string()), params.out.clone())),
                Some(fmt) => {
                    let c = schanuel_constant(&f, n)?;
                    let mut r = Report::new("count", &["field", "n", "B", "count", "constant", "prediction"]);
                    r.row(vec![
                        f.label().into(),
                        n.into(),
                        b.into(),
                        count.into(),
                        c.into(),
                        Cell::Float(c * b.powi(n as i32)),
                    ]);
                    Ok((Outcome::Report(r, Some(fmt)), params.out.clone()))
                }
            }
        }
        Command::Constants { what: ConstantKind::Schanuel, params } => {
            let f = suites::field(&params, "Q")?;
            let n = params.n.unwrap_or(2);
            let c = schanuel_constant(&f, n)?;
            match params.format {
                None => Ok((Outcome::Scalar(report::fmt_float(c)), params.out.clone())),
                Some(fmt) => {
                    let mut r = Report::new("constants", &["field", "n", "constant"]);
                    r.row(vec![f.label().into(), n.into(), c.into()]);
                    Ok((Outcome::Report(r, Some(fmt)), params.out.clone()))
                }
            }
        }
    }
}

fn workers(cli: &Cli) -> Option<usize> {
    match &cli.command {
        Command::Verify { params, .. } | Command::Count { params, .. } | Command::Constants { params, .. } => {
            params.workers
        }
        Command::List { .. } => None,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(w) = workers(&cli) {
        if w == 0 {
            eprintln!("error: --workers must be positive");
            return ExitCode::from(3);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(w).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(4);
        }
    }
    let (outcome, out) = match execute(cli) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit_code(&e));
        }
    };
    match outcome {
        Outcome::Scalar(s) => {
            let res = match &out {
                Some(path) => std::fs::write(path, format!("{s}\n")),
                None => {
                    println!("{s}");
                    Ok(())
                }
            };
            if let Err(e) = res {
                eprintln!("error: {e}");
                return ExitCode::from(4);
            }
            ExitCode::SUCCESS
        }
        Outcome::Report(r, fmt) => {
            let fmt = fmt.unwrap_or(Format::Csv);
            if let Err(e) = r.write_to(out.as_deref(), fmt) {
                eprintln!("error: {e}");
                return ExitCode::from(4);
            }
            for note in &r.notes {
                eprintln!("note: {note}");
            }
            if r.passed() {
                ExitCode::SUCCESS
            } else {
                if fmt == Format::Csv {
                    eprintln!("{}", r.failure_summary());
                }
                ExitCode::from(1)
            }
        }
    }
}
