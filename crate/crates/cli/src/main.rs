use std::process::ExitCode;

use clap::Parser;

use circle_gather_cli::args::{Cli, Cmd};
use circle_gather_cli::{exit, gen, run, serve, verify};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { exit::INPUT_REJECTED } else { exit::OK });
        }
    };
    let result = match &cli.command {
        Cmd::Run(a) => run::cmd_run(a),
        Cmd::Verify(a) => verify::cmd_verify(a),
        Cmd::Gen(a) => gen::cmd_gen(a),
        Cmd::Serve(a) => serve::cmd_serve(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
