//! Batch front end: every verification and experiment as a subcommand that
//! writes `report.json` (plus `table.csv` / `series.csv` where relevant).

pub mod config;
pub mod report;
pub mod suites;

use config::{Cli, Command, PolySpec};
use report::Report;
use suites::SuiteError;

/// Runs the parsed and merged command.
pub fn run(cli: &Cli, f: Option<&PolySpec>) -> Result<Report, SuiteError> {
    let seed = cli.seed;
    match &cli.command {
        Command::Coeffs(a) => suites::coeffs(a, seed),
        Command::VerifyAlgebra(a) => suites::verify_algebra(a, seed),
        Command::VerifyRecursion(a) => suites::verify_recursion_suite(a, seed),
        Command::VerifyTrivialisation(a) => suites::verify_trivialisation(a, seed),
        Command::VerifyForms(a) => suites::verify_forms(a, seed),
        Command::Landau(a) => suites::landau(a, f, seed),
    }
}
