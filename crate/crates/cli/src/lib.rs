//! Command-line front end: solve generated or saved problems, sweep the
//! momentum parameter, evaluate the convergence theory and regenerate the
//! line-search counterexample. Traces are written as CSV plus JSON summaries.

pub mod args;
pub mod cmd;
pub mod error;
pub mod output;
pub mod source;

pub use args::{Cli, Command};
pub use error::{CliError, CliResult};

pub fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Solve(a) => cmd::solve::run(a),
        Command::TauSweep(a) => cmd::sweep::run(a),
        Command::Analyze(a) => cmd::analyze::run(a),
        Command::Counterexample(a) => cmd::counterexample::run(a),
        Command::Gen(a) => cmd::gen::run(a),
    }
}
