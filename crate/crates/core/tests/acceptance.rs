//! One line per acceptance criterion. Run with `--nocapture` to see them
//! alongside the harness summary.

mod common;

use std::time::Instant;

use common::props::SUITES;
use folia::cli::suite::{self, CriterionResult};

fn report(c: CriterionResult) {
    println!("{}", c.line());
    for d in &c.details {
        println!("    {d}");
    }
    assert!(c.pass, "{}", c.line());
}

#[test]
fn euler_identity_examples() {
    report(suite::euler_examples(None));
}

#[test]
fn corollary2_values() {
    report(suite::corollary2_values(None));
}

#[test]
fn bound_tables() {
    report(suite::bound_tables());
}

#[test]
fn mk_maximization() {
    report(suite::mk_maximization());
}

#[test]
fn three_line_example() {
    report(suite::three_line_example());
}

#[test]
fn logarithmic_certificates() {
    report(suite::logarithmic_certificates());
}

#[test]
fn eee_pipeline() {
    report(suite::eee_pipeline());
}

#[test]
fn property_suites() {
    let mut c = CriterionResult::new(8, "property suites, at least 200 cases each, zero failures");
    for (name, run) in SUITES {
        let t = Instant::now();
        match run() {
            Ok(n) => c.check(n >= 200, format!("{name}: {n} cases in {:.1}s", t.elapsed().as_secs_f64())),
            Err(e) => c.fail(format!("{name}: {e}")),
        }
    }
    report(c);
}
