use std::io::Write;
use std::process::ExitCode;

use ditrail_cli::{run_args, BUDGET_ENV};

fn main() -> ExitCode {
    let env_budget = std::env::var(BUDGET_ENV).ok();
    let out = run_args(std::env::args_os(), env_budget.as_deref());
    print!("{}", out.stdout);
    eprint!("{}", out.stderr);
    let _ = std::io::stdout().flush();
    ExitCode::from(out.code as u8)
}
