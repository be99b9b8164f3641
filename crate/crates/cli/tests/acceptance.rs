//! Acceptance run: every criterion once, one PASS/FAIL line each, then the individual checks.
//! Set `SEGRE_ACCEPTANCE_ONLY=5,9` to run a subset.

use std::process::ExitCode;

use segre_cli::checks::criterion;

fn main() -> ExitCode {
    let ids: Vec<u32> = match std::env::var("SEGRE_ACCEPTANCE_ONLY") {
        Ok(s) => s.split(',').filter_map(|t| t.trim().parse().ok()).collect(),
        Err(_) => (1..=11).collect(),
    };
    let mut failed = 0;
    for id in ids {
        let c = criterion(id);
        let status = if c.passed { "PASS" } else { "FAIL" };
        let worst = c.checks.iter().filter(|k| !k.passed).count();
        println!("{status} criterion {:>2}: {} [{} checks, {} failed, {:.1}s of {:.0}s]", c.id, c.title, c.checks.len(), worst, c.seconds, c.time_limit);
        for k in &c.checks {
            let mark = if k.passed { "ok  " } else { "FAIL" };
            let bound = match k.relation {
                "below" => format!("< {}", k.tolerance),
                _ => format!("{} ± {}", k.target, k.tolerance),
            };
            let detail = if k.detail.is_empty() { String::new() } else { format!("  ({})", k.detail) };
            println!("      {mark} {}: {:.6} vs {bound}{detail}", k.name, k.measured);
        }
        if !c.passed {
            failed += 1;
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
