//! Runs every acceptance criterion and prints one line per criterion.
//! Exits nonzero if any fails.

use outerspine::verify::{run_criterion, VerifyOptions, SUITES};
use outerspine::Limits;

fn main() {
    let opts = VerifyOptions {
        limits: Limits::from_env(),
        ..VerifyOptions::default()
    };
    let reports: Vec<_> = (1..=SUITES.len())
        .map(|id| {
            let r = run_criterion(id, &opts);
            println!("{r}");
            r
        })
        .collect();
    let failed = reports.iter().filter(|r| !r.passed).count();
    println!("{} of {} criteria passed", reports.len() - failed, reports.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
