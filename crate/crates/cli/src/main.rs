//! `planarlab`: one binary, one subcommand per library module.
//!
//! Every run produces a JSON result on stdout (or a table with `--pretty`,
//! or CSV with `--format csv`); with `--out DIR` the result, its tables and a
//! `manifest.json` are written there and nowhere else.

mod args;
mod commands;
mod manifest;
mod output;

use std::process::ExitCode;

use clap::Parser;
use planarlab_core::Error;

use args::{Cli, Format};
use manifest::{RunManifest, Session};
use output::Outcome;

fn main() -> ExitCode {
    let cli = Cli::parse();
    ExitCode::from(run(cli) as u8)
}

fn run(cli: Cli) -> i32 {
    if let Some(k) = cli.global.workers {
        if k == 0 {
            eprintln!("error: --workers must be at least 1");
            return 2;
        }
        // Only fails if a pool already exists, which cannot happen here.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(k).build_global();
    }
    let params = serde_json::json!({ "global": cli.global, "command": cli.command });
    let mut manifest = RunManifest::start(&cli.command.name(), params, cli.global.seed);
    let mut session = match Session::new(cli.global.out.clone()) {
        Ok(s) => s,
        Err(e) => return fail(&e),
    };
    if let Err(e) = session.write_manifest(&manifest) {
        return fail(&e);
    }

    let result = commands::dispatch(&cli.command, &cli.global, &mut session);
    let (summary, code, err) = match &result {
        Ok(o) => (Some(&o.summary), o.exit_code, o.failure.clone()),
        Err(e) => (None, e.exit_code(), Some(e.to_string())),
    };
    let mut code = code;
    if let Ok(o) = &result {
        if let Err(e) = emit(o, &cli, &mut session) {
            eprintln!("error: {e}");
            code = e.exit_code();
        }
    }
    manifest.inputs = session.inputs.clone();
    manifest.outputs = session.outputs.clone();
    manifest.finish(summary, code, err.clone());
    if let Err(e) = session.write_manifest(&manifest) {
        eprintln!("error: {e}");
        return e.exit_code();
    }
    if let Some(e) = err {
        eprintln!("error: {e}");
    }
    code
}

fn fail(e: &Error) -> i32 {
    eprintln!("error: {e}");
    e.exit_code()
}

fn emit(o: &Outcome, cli: &Cli, session: &mut Session) -> planarlab_core::Result<()> {
    let json = serde_json::to_string_pretty(&o.summary).expect("summary serialises") + "\n";
    session.write("result.json", &json)?;
    for t in &o.tables {
        session.write(&format!("{}.csv", t.name), &t.csv)?;
    }
    if cli.global.pretty {
        print!("{}", o.pretty());
    } else {
        match cli.global.format {
            Format::Json => print!("{json}"),
            Format::Csv => match o.tables.first() {
                Some(t) => print!("{}", t.csv),
                None => print!("{}", output::summary_csv(&o.summary)),
            },
        }
    }
    Ok(())
}
