use clap::Parser;
use std::process::ExitCode;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = cavityj_cli::args::Cli::parse();
    ExitCode::from(cavityj_cli::execute(cli))
}
