use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use nmsse::config::{parse_config, CliArgs};
use nmsse::run::{reproduce_figures, run};
use nmsse::Error;

/// Runs the Fig. 1-3 scenarios and writes one CSV per curve.
#[derive(Debug, Parser)]
#[command(name = "nmsse reproduce-figures")]
struct FigureArgs {
    /// Output directory.
    #[arg(long = "out-dir", default_value = "figures")]
    out_dir: PathBuf,
    #[command(flatten)]
    scenario: CliArgs,
}

fn fail(e: &Error) -> ExitCode {
    let message = e.to_string().replace('\n', " ");
    match e {
        Error::Config { field, .. } => {
            eprintln!("error kind={} field={field} message={message:?}", e.kind())
        }
        _ => eprintln!("error kind={} message={message:?}", e.kind()),
    }
    ExitCode::FAILURE
}

fn clap_fail(e: clap::Error) -> ExitCode {
    use clap::error::ErrorKind;
    if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
        let _ = e.print();
        return ExitCode::SUCCESS;
    }
    let first = e.to_string();
    let first = first.lines().next().unwrap_or_default().trim_start_matches("error: ");
    eprintln!("error kind=config field=arguments message={first:?}");
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let mut argv: Vec<std::ffi::OsString> = std::env::args_os().collect();
    if argv.get(1).is_some_and(|a| a == "reproduce-figures") {
        argv.remove(1);
        let args = match FigureArgs::try_parse_from(&argv) {
            Ok(a) => a,
            Err(e) => return clap_fail(e),
        };
        let parsed = match parse_config(&args.scenario, None) {
            Ok(p) => p,
            Err(e) => return fail(&e),
        };
        return match reproduce_figures(&parsed.config, &args.out_dir) {
            Ok(files) => {
                for f in files {
                    eprintln!("wrote {}", f.display());
                }
                ExitCode::SUCCESS
            }
            Err(e) => fail(&e),
        };
    }

    let args = match CliArgs::try_parse_from(&argv) {
        Ok(a) => a,
        Err(e) => return clap_fail(e),
    };
    let parsed = match parse_config(&args, None) {
        Ok(p) => p,
        Err(e) => return fail(&e),
    };
    match run(&parsed) {
        Ok(outcome) => {
            if let Some(rep) = outcome.comparison {
                eprintln!(
                    "compare max_x={:e} max_y={:e} max_z={:e} inside_3se={:.4} tolerance={:e} passed={}",
                    rep.max_abs[0],
                    rep.max_abs[1],
                    rep.max_abs[2],
                    rep.inside_envelope,
                    rep.tolerance,
                    rep.passed
                );
            }
            ExitCode::SUCCESS
        }
        Err(e) => fail(&e),
    }
}
