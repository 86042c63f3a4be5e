//! Runs every acceptance criterion and prints one pass/fail line each.

use obslab::acceptance::run_all;

fn main() {
    let results = run_all();
    for r in &results {
        println!("{}", r.line());
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    println!("acceptance: {} passed, {} failed", results.len() - failed, failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
