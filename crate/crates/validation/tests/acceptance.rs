//! One PASS/FAIL line per criterion; exits non-zero if any criterion fails.
//! Pass criterion numbers as arguments to run a subset.

use std::time::Instant;

fn main() {
    let filter: Vec<u32> = std::env::args()
        .skip(1)
        .filter_map(|a| a.parse().ok())
        .collect();
    let mut failed = 0;
    for (id, run) in swarmlab_validation::ALL {
        if !filter.is_empty() && !filter.contains(&id) {
            continue;
        }
        let start = Instant::now();
        let v = run();
        println!(
            "criterion {id:>2}: {} ({:.1}s) {}",
            if v.pass { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64(),
            v.detail
        );
        failed += u32::from(!v.pass);
    }
    println!("acceptance: {failed} failing");
    if failed > 0 {
        std::process::exit(1);
    }
}
