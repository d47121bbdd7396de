//! One PASS/FAIL line per criterion; exit status 1 if any criterion fails.

use std::time::Instant;

use uptk_acceptance::CRITERIA;

fn main() {
    let mut failed = 0;
    for (i, (title, run)) in CRITERIA.iter().enumerate() {
        let t = Instant::now();
        let (pass, detail) = match run() {
            Ok(o) => (o.pass, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if !pass {
            failed += 1;
        }
        println!(
            "criterion {} {} {title}: {detail} [{:.1}s]",
            i + 1,
            if pass { "PASS" } else { "FAIL" },
            t.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {} passed, {failed} failed", CRITERIA.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
