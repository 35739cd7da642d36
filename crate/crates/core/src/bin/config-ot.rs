use clap::Parser;
use config_ot::cli::{run, Args, RunSpec};

fn main() {
    let spec = RunSpec::from(Args::parse());
    let outcome = run(&spec);
    if let Some(err) = &outcome.error {
        eprintln!("config-ot: {err}");
    }
    if spec.output.is_none() {
        print!("{}", outcome.report);
    }
    std::process::exit(outcome.exit_code);
}
