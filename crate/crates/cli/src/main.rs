use std::process::ExitCode;

use clap::Parser;
use hwconn_cli::config::Cli;
use hwconn_cli::run;

fn main() -> ExitCode {
    let (cli, f) = match Cli::parse().merged() {
        Ok(x) => x,
        Err(e) => {
            eprintln!("hwconn: {e}");
            return ExitCode::from(2);
        }
    };
    let report = match run(&cli, f.as_ref()) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("hwconn: {e}");
            return ExitCode::from(2);
        }
    };
    if let Err(e) = report.write(&cli.out) {
        eprintln!("hwconn: cannot write reports to {}: {e}", cli.out.display());
        return ExitCode::from(2);
    }
    for c in &report.contracts {
        let tag = if c.pass { "PASS" } else { "FAIL" };
        println!("{tag} {}: {} ({})", c.name, c.value, c.bound);
    }
    if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
