//! Acceptance run: one line per criterion, then the negative controls.
//! Exits nonzero when any criterion fails or a control misbehaves.

use std::process::ExitCode;

use gridtheta::report::{run_all, run_criterion, Outcome};
use gridtheta::RunConfig;

fn main() -> ExitCode {
    let config = RunConfig::default();
    let mut failed = 0;
    for result in run_all(&config) {
        println!("{result}");
        if !result.passed() {
            failed += 1;
        }
    }

    let tampered = RunConfig {
        tamper_differential: true,
        ..RunConfig::default()
    };
    let control = run_criterion(1, &tampered);
    let tamper_ok = matches!(control.outcome, Outcome::Fail(_));
    println!(
        "[control] tampered differential makes criterion 1 fail: {}",
        if tamper_ok { "PASS" } else { "FAIL" }
    );

    let mut low = RunConfig::default();
    low.limits = low.limits.capped_at(3);
    let skipped: Vec<usize> = (1..=10)
        .filter(|&id| run_criterion(id, &low).outcome == Outcome::Skipped("cap".into()))
        .collect();
    let cheap = run_criterion(9, &low).passed();
    let cap_ok = cheap && skipped.len() == 9;
    println!(
        "[control] cap lowered to 3 skips {:?} and keeps word facts: {}",
        skipped,
        if cap_ok { "PASS" } else { "FAIL" }
    );

    if failed == 0 && tamper_ok && cap_ok {
        println!("acceptance: all criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} criteria failed");
        ExitCode::FAILURE
    }
}
