mod args;
mod commands;
mod fail;
mod historyexpr;
mod jsonfmt;
mod registry;
mod report;
mod request;
mod svgplot;
mod tableio;

use clap::Parser;

fn main() {
    std::process::exit(run());
}

fn run() -> i32 {
    let cli = match args::Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let result = match cli.cmd {
        args::Cmd::Design(a) => commands::cmd_design(a),
        args::Cmd::Spectrum(a) => commands::cmd_spectrum(a),
        args::Cmd::Simulate(a) => commands::cmd_simulate(a),
        args::Cmd::Compare(a) => commands::cmd_compare(a),
        args::Cmd::TauStar(a) => commands::cmd_tau_star(a),
        args::Cmd::Regions(a) => commands::cmd_regions(a),
        args::Cmd::EstimateK(a) => commands::cmd_estimate_k(a),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}
