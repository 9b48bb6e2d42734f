//! `vdl`: dataset generation, training, closed-loop evaluation and artifact
//! verification for learned vehicle inverse-dynamics controllers.

mod cmd;
mod manifest;
mod report;
mod resolve;
mod svg;

use std::process::ExitCode;

use clap::{ArgAction, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "vdl", version, about = "Learned inverse-dynamics path tracking laboratory")]
struct Cli {
    /// More log output (-v info, -vv debug).
    #[arg(short, long, action = ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a randomized rollout dataset.
    GenData(cmd::gen_data::Args),
    /// Train an MLP or CNN inverse model on a dataset.
    Train(cmd::train::Args),
    /// Rank hidden-layer widths by final test loss.
    GridSearch(cmd::grid::Args),
    /// Drive a track in closed loop with learned and baseline controllers.
    Eval(cmd::eval::Args),
    /// Drive a track with the pure-pursuit and Stanley baselines only.
    Baseline(cmd::eval::BaselineArgs),
    /// Kinematic bicycle speed limit per curve radius.
    SpeedLimit(cmd::speed_limit::Args),
    /// Re-check hashes and contents of emitted artifacts.
    Verify(cmd::verify::Args),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .init();
    let result = match cli.command {
        Command::GenData(a) => cmd::gen_data::run(a),
        Command::Train(a) => cmd::train::run(a),
        Command::GridSearch(a) => cmd::grid::run(a),
        Command::Eval(a) => cmd::eval::run(a),
        Command::Baseline(a) => cmd::eval::run_baseline(a),
        Command::SpeedLimit(a) => cmd::speed_limit::run(a),
        Command::Verify(a) => cmd::verify::run(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            let mut msg = String::new();
            for cause in e.chain() {
                let text = cause.to_string();
                if !msg.contains(&text) {
                    if !msg.is_empty() {
                        msg.push_str(": ");
                    }
                    msg.push_str(&text);
                }
            }
            eprintln!("error: {msg}");
            ExitCode::from(cmd::exit_code(&e))
        }
    }
}
