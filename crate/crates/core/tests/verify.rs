use crosslab::algebra::{ActionKind, Group};
use crosslab::verify::{
    convergence_study, list_suites, run_suite, run_suites, scalar_sequence_check, LabReport, ScalarVariant, SuiteConfig,
    SUITE_NAMES,
};
use crosslab::LabError;

fn quick() -> SuiteConfig {
    SuiteConfig {
        trials: 3,
        ..SuiteConfig::default()
    }
}

#[test]
fn same_seed_gives_identical_reports() {
    let cfg = quick();
    let a = run_suites(&["fourier", "operator-T", "crossed-algebra"], &cfg).unwrap();
    let b = run_suites(&["crossed-algebra", "fourier", "operator-T"], &cfg).unwrap();
    assert_eq!(a.without_timings(), b.without_timings());
    let json = a.to_json().unwrap();
    assert_eq!(LabReport::from_json(&json).unwrap(), a);
}

#[test]
fn seed_changes_residuals() {
    let a = run_suite("operator-T", &quick()).unwrap();
    let b = run_suite("operator-T", &SuiteConfig { seed: 43, ..quick() }).unwrap();
    assert_ne!(a.checks, b.checks);
}

#[test]
fn reports_carry_statements_and_metadata() {
    let r = run_suite("fourier", &quick()).unwrap();
    assert!(r.passed);
    assert_eq!(r.metadata.trials, 3);
    assert_eq!(r.metadata.seed, 42);
    assert!(r.metadata.grid.starts_with("line"));
    for c in &r.checks {
        assert!(!c.reference.is_empty());
        assert!(c.residual.unwrap() >= 0.0);
        assert_eq!(c.passed, c.residual.unwrap() <= c.tolerance);
    }
    assert!(r.check("homomorphism").is_some());
}

#[test]
fn tolerance_overrides_apply() {
    let mut cfg = quick();
    cfg.tolerances.insert("all".into(), 1e-20);
    let r = run_suite("operator-T", &cfg).unwrap();
    assert!(!r.passed);
    assert!(r.checks.iter().all(|c| c.tolerance == 1e-20));
    cfg.tolerances.insert("round-trip".into(), 1.0);
    let r = run_suite("operator-T", &cfg).unwrap();
    assert!(r.check("round-trip").unwrap().passed);
    assert!(!r.check("derivative-forms").unwrap().passed);
}

#[test]
fn invalid_configs_are_rejected_before_running() {
    let bad_trials = SuiteConfig { trials: 0, ..quick() };
    assert!(matches!(run_suite("fourier", &bad_trials), Err(LabError::InvalidInput(_))));
    let mut wide = quick();
    wide.inputs.sigma = 5.0;
    assert!(run_suite("fourier", &wide).is_err());
    let mut mismatched = quick();
    mismatched.algebra.action.group = Some(Group::Circle);
    assert!(matches!(run_suite("action", &mismatched), Err(LabError::ActionMismatch(_))));
}

#[test]
fn suites_listing_is_sorted() {
    let names: Vec<_> = list_suites().into_iter().map(|(n, _)| n).collect();
    assert_eq!(names, SUITE_NAMES);
    assert!(list_suites()
        .iter()
        .any(|(n, s)| *n == "exact-sequence-line" && s.starts_with("Theorem: rows are short exact sequences")));
}

#[test]
fn scalar_variants_split_the_checks() {
    let cfg = SuiteConfig { trials: 1, ..quick() };
    let p = scalar_sequence_check(ScalarVariant::Pointwise, &cfg).unwrap();
    let c = scalar_sequence_check(ScalarVariant::Convolution, &cfg).unwrap();
    assert!(p.passed && c.passed);
    assert!(p.checks.iter().all(|r| r.id.starts_with("pointwise-")));
    assert!(c.checks.iter().any(|r| r.id == "fourier-exchange-j"));
    let pi_j = p.check("pointwise-pi-after-j").unwrap();
    assert!(pi_j.residual.unwrap() <= 1e-12);
}

#[test]
fn circle_sequence_holds_except_for_beta_after_iota() {
    let r = run_suite("exact-sequence-circle", &quick()).unwrap();
    for c in &r.checks {
        let literal = c.id == "beta-x-after-iota" || c.id == "beta-y-after-iota";
        assert_eq!(c.passed, !literal, "{} residual {:?}", c.id, c.residual);
    }
    assert!(!r.passed);
}

#[test]
fn nilpotent_actions_on_the_line_pass() {
    let mut cfg = SuiteConfig { trials: 2, ..quick() };
    cfg.algebra.action.kind = ActionKind::NilpotentConjugation;
    for name in ["action", "crossed-algebra", "operator-T"] {
        let r = run_suite(name, &cfg).unwrap();
        assert!(r.passed, "{name}: {:?}", r.failures().collect::<Vec<_>>());
        assert!(r.check("isometry").is_none());
    }
}

#[test]
fn nilpotent_actions_have_no_circle_version() {
    let mut cfg = SuiteConfig { trials: 1, ..quick() };
    cfg.algebra.action.kind = ActionKind::NilpotentConjugation;
    let r = run_suite("exact-sequence-circle", &cfg).unwrap();
    assert!(!r.passed);
    assert!(r.checks.iter().all(|c| c.note.is_some() && c.residual.is_none()));
}

#[test]
fn fixed_generator_is_used() {
    let mut cfg = SuiteConfig { trials: 2, ..quick() };
    cfg.algebra.action.generator = Some(vec![vec![[0.5, 0.0], [0.0, 0.2]], vec![[0.0, -0.2], [-0.5, 0.0]]]);
    assert!(run_suite("action", &cfg).unwrap().passed);
    cfg.algebra.action.generator = Some(vec![vec![[0.0, 1.0], [0.0, 0.0]], vec![[0.0, 0.0], [0.0, 0.0]]]);
    assert!(cfg.validate().is_err());
}

#[test]
fn trivial_action_convergence_sits_at_the_floor() {
    let mut cfg = SuiteConfig { trials: 2, ..quick() };
    cfg.algebra.action.kind = ActionKind::Trivial;
    let study = convergence_study("operator-T", &[128, 256, 512], &cfg).unwrap();
    assert!(study.converged, "{:?}", study.flags);
    assert!(study.rows.iter().all(|r| r.at_floor), "{:?}", study.rows);
}

#[test]
fn convergence_table_shape() {
    let cfg = SuiteConfig { trials: 1, ..quick() };
    let single = convergence_study("operator-T", &[256], &cfg).unwrap();
    assert_eq!(single.rows.len(), 1);
    assert!(single.rows[0].ratio.is_none());
    assert!(single.converged);
    let mut csv = Vec::new();
    single.write_csv(&mut csv).unwrap();
    let text = String::from_utf8(csv).unwrap();
    assert_eq!(text.lines().count(), 2);
    assert!(text.starts_with("points,worst_residual,ratio,at_floor"));
    assert!(convergence_study("operator-T", &[256, 128], &cfg).is_err());
    assert!(convergence_study("operator-T", &[100], &cfg).is_err());
    assert!(matches!(convergence_study("nope", &[128], &cfg), Err(LabError::UnknownSuite(_))));
}
