//! Acceptance suite: one test per criterion, each printing its pass/fail
//! line (run with `--nocapture` to see them even on success).

use groundstate::verify;

fn run(criterion: fn() -> verify::CriterionResult) {
    let result = criterion();
    println!("{}", result.summary_line());
    for line in &result.details {
        println!("{line}");
    }
    assert!(result.passed, "{}", result.summary_line());
}

#[test]
fn criterion_1_functional_identities() {
    run(verify::criterion_1);
}

#[test]
fn criterion_2_fiber_map() {
    run(verify::criterion_2);
}

#[test]
fn criterion_3_dual_transform() {
    run(verify::criterion_3);
}

#[test]
fn criterion_4_shooting_correctness() {
    run(verify::criterion_4);
}

#[test]
fn criterion_5_branch_structure() {
    run(verify::criterion_5);
}

#[test]
fn criterion_6_small_mass_limits() {
    run(verify::criterion_6);
}

#[test]
fn criterion_7_large_mass_asymptotics() {
    run(verify::criterion_7);
}

#[test]
fn criterion_8_minmax_oracle() {
    run(verify::criterion_8);
}

#[test]
fn criterion_9_uniqueness_hypotheses() {
    run(verify::criterion_9);
}
