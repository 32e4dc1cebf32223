mod args;
mod commands;
mod table;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::process::ExitCode;

use clap::Parser;
use jacobi_scatter::coefficients::load_coefficients_with_tol;

use args::{Args, Command, Format};
use commands::{Failure, Outcome};
use table::Table;

fn sink(args: &Args) -> Outcome<Box<dyn Write>> {
    Ok(match &args.out {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| Failure::Validation(format!("cannot create {}: {e}", p.display())))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn emit(args: &Args, table: &Table) -> Outcome<()> {
    let mut out = sink(args)?;
    let written = match args.format {
        Format::Csv => table.write_csv(&mut out).map_err(|e| e.to_string()),
        Format::Json => table.write_json(&mut out).map_err(|e| e.to_string()),
    };
    written.and_then(|_| out.flush().map_err(|e| e.to_string())).map_err(Failure::Validation)
}

fn run(args: &Args) -> Outcome<()> {
    if args.command == Command::Gen {
        let c = commands::generate(args);
        let mut out = sink(args)?;
        writeln!(out, "{}", c.to_json()).and_then(|_| out.flush()).map_err(|e| Failure::Validation(e.to_string()))?;
        return Ok(());
    }
    let path = args.instance.as_ref().ok_or_else(|| Failure::Validation("--instance is required".into()))?;
    let c = load_coefficients_with_tol(path, args.inv_tol)?;
    let table = match args.command {
        Command::Validate => commands::validate(&c, args),
        Command::Jost => commands::jost(&c, args)?,
        Command::Wronskian => commands::wronskian(&c, args)?,
        Command::Scatter => commands::scatter(&c, args)?,
        Command::Spectrum => commands::spectrum(&c, args)?,
        Command::Bound => commands::bound(&c, args)?,
        Command::Report => commands::report(&c, args)?,
        Command::Gen => unreachable!(),
    };
    emit(args, &table)
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("jacobi-scatter {}: {f}", args.command.name());
            ExitCode::from(f.exit_code())
        }
    }
}
