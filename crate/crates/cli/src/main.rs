use std::process::ExitCode;

use clap::Parser;
use overlap_boost_cli::commands::{emit, execute, out_args, Cli, Command};
use overlap_boost_cli::server;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Command::Serve(args) = &cli.command {
        let runtime = match tokio::runtime::Runtime::new() {
            Ok(rt) => rt,
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::FAILURE;
            }
        };
        return match runtime.block_on(server::serve(&args.host, args.port)) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::FAILURE
            }
        };
    }
    let out = out_args(&cli.command).and_then(|o| o.out.clone());
    let result = execute(&cli.command).and_then(|artifacts| emit(&artifacts, out.as_deref(), &mut std::io::stdout()));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
