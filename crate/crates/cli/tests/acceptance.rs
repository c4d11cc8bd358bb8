//! Acceptance criteria 1-10, one pass/fail line each. Tolerances are pinned
//! here rather than read from suite defaults.

use std::path::Path;
use std::process::Command;
use std::time::Instant;

use crosslab::algebra::{ActionKind, Group};
use crosslab::crossed::{bimodule_act_bifunction_with, BiAction, CrossedElement, Quadrature};
use crosslab::schwartz::Grid;
use crosslab::verify::{
    config::SuiteConfig, convergence_study, random_bischwartz, random_schwartz, run_suite, LabReport,
    VerificationReport,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Criteria that cannot hold, with the reason. They still run and print FAIL.
const EXPECTED_FAILURES: &[(usize, &str)] = &[(
    2,
    "on the circle iota annihilates every F(x, y) = alpha_{-x}(c(x + y)), so beta o iota = Id - P \
     with P the projection onto that kernel; the line has no such kernel because these F do not decay",
)];

struct Verdict {
    passed: bool,
    detail: String,
}

fn pinned(report: &VerificationReport, pins: &[(&str, f64)]) -> Verdict {
    let mut passed = true;
    let mut parts = Vec::new();
    for (id, tol) in pins {
        let residual = report.check(id).and_then(|c| if c.note.is_some() { None } else { c.residual });
        let ok = residual.is_some_and(|r| r <= *tol);
        passed &= ok;
        let shown = residual.map_or("error".to_string(), |r| format!("{r:.2e}"));
        parts.push(format!("{id} {shown}{}{tol:.0e}", if ok { " <= " } else { " > " }));
    }
    Verdict {
        passed,
        detail: parts.join(", "),
    }
}

fn timed(v: Verdict, seconds: f64, limit: f64) -> Verdict {
    let ok = seconds <= limit;
    Verdict {
        passed: v.passed && ok,
        detail: format!("{}; runtime {seconds:.1} s{}{limit} s", v.detail, if ok { " <= " } else { " > " }),
    }
}

fn line_unitary() -> SuiteConfig {
    let mut cfg = SuiteConfig::default();
    cfg.grid.half_width = 10.0;
    cfg.grid.points = 512;
    cfg.algebra.dim = 2;
    cfg.algebra.action.kind = ActionKind::UnitaryConjugation;
    cfg.algebra.action.generator_norm = 1.0;
    cfg.trials = 20;
    cfg
}

fn criterion_1() -> Verdict {
    let start = Instant::now();
    let r = run_suite("exact-sequence-line", &line_unitary()).unwrap();
    let v = pinned(
        &r,
        &[
            ("m-after-j", 1e-8),
            ("pi-after-iota", 1e-8),
            ("pi-after-rho-x", 1e-7),
            ("pi-after-rho-y", 1e-7),
            ("beta-x-after-iota", 1e-6),
            ("beta-y-after-iota", 1e-6),
            ("splitting-x", 1e-6),
            ("splitting-y", 1e-6),
        ],
    );
    timed(v, start.elapsed().as_secs_f64(), 60.0)
}

fn criterion_2() -> Verdict {
    let mut cfg = line_unitary();
    cfg.grid.circle_points = 128;
    let start = Instant::now();
    let r = run_suite("exact-sequence-circle", &cfg).unwrap();
    let v = pinned(
        &r,
        &[
            ("m-after-j", 1e-9),
            ("pi-after-iota", 1e-9),
            ("pi-after-rho-x", 1e-9),
            ("pi-after-rho-y", 1e-9),
            ("beta-x-after-iota", 1e-9),
            ("beta-y-after-iota", 1e-9),
            ("splitting-x", 1e-9),
            ("splitting-y", 1e-9),
        ],
    );
    let corrected = pinned(&r, &[("beta-x-after-iota-corrected", 1e-9), ("beta-y-after-iota-corrected", 1e-9)]);
    let v = timed(v, start.elapsed().as_secs_f64(), 20.0);
    Verdict {
        passed: v.passed,
        detail: format!("{}; corrected: {}", v.detail, corrected.detail),
    }
}

fn criterion_3() -> Verdict {
    let cfg = line_unitary();
    let crossed = run_suite("crossed-algebra", &cfg).unwrap();
    let a = pinned(
        &crossed,
        &[
            ("trivial-twisted", 1e-12),
            ("trivial-alternative", 1e-12),
            ("trivial-derivative", 1e-12),
            ("trivial-twists", 1e-12),
            ("trivial-module", 1e-12),
        ],
    );
    let mut trivial = cfg.clone();
    trivial.algebra.action.kind = ActionKind::Trivial;
    let ops = run_suite("crossed-algebra", &trivial).unwrap();
    let b = pinned(&ops, &[("oracle-twisted", 1e-12), ("iso-round-trip", 1e-12)]);
    let scalar = run_suite("scalar-sequences", &cfg).unwrap();
    let c = pinned(
        &scalar,
        &[
            ("pointwise-pi-after-j", 1e-12),
            ("pointwise-pi-after-section", 1e-12),
            ("pointwise-exactness", 1e-7),
            ("convolution-j-matches-general", 1e-10),
            ("convolution-pi-matches-general", 1e-10),
            ("convolution-k-matches-general", 1e-10),
            ("convolution-pi-after-j", 1e-8),
            ("convolution-pi-after-k", 1e-8),
            ("fourier-exchange-j", 1e-8),
            ("fourier-exchange-pi", 1e-8),
        ],
    );
    Verdict {
        passed: a.passed && b.passed && c.passed,
        detail: format!("{}; {}; {}", a.detail, b.detail, c.detail),
    }
}

fn criterion_4() -> Verdict {
    let r = run_suite("operator-T", &line_unitary()).unwrap();
    pinned(&r, &[("round-trip", 1e-12), ("derivative-forms", 1e-8), ("intertwining", 1e-8)])
}

fn criterion_5() -> Verdict {
    let cfg = line_unitary();
    let bimodule = run_suite("bimodule", &cfg).unwrap();
    let ids: Vec<(&str, f64)> = bimodule.checks.iter().map(|c| (c.id.as_str(), 1e-7)).collect();
    let a = pinned(&bimodule, &ids);
    let tensor = run_suite("tensor", &cfg).unwrap();
    let b = pinned(
        &tensor,
        &[
            ("i1-balanced", 1e-8),
            ("m-balanced", 1e-8),
            ("m-crossed-balanced", 1e-8),
            ("j-balanced", 1e-8),
            ("diagram-iota", 1e-7),
            ("diagram-pi", 1e-7),
            ("j-left-module", 1e-7),
            ("j-right-module", 1e-7),
            ("m-bimodule", 1e-7),
        ],
    );
    Verdict {
        passed: a.passed && b.passed && ids.len() == 15,
        detail: format!("{}; {}", a.detail, b.detail),
    }
}

fn criterion_6() -> Verdict {
    let cfg = line_unitary();
    let f = pinned(&run_suite("fourier", &cfg).unwrap(), &[("homomorphism", 1e-8)]);
    let c = pinned(
        &run_suite("crossed-algebra", &cfg).unwrap(),
        &[("iso-homomorphism", 1e-8), ("associativity", 1e-8)],
    );
    Verdict {
        passed: f.passed && c.passed,
        detail: format!("{}; {}", f.detail, c.detail),
    }
}

fn criterion_7() -> Verdict {
    let r = run_suite("hadamard", &line_unitary()).unwrap();
    pinned(&r, &[("multiply-after-divide", 1e-7), ("antiderivative-after-derivative", 1e-8)])
}

fn criterion_8() -> Verdict {
    let cfg = line_unitary();
    let mut passed = true;
    let mut parts = Vec::new();
    for suite in ["exact-sequence-line", "operator-T"] {
        let study = convergence_study(suite, &[128, 256, 512], &cfg).unwrap();
        passed &= study.converged && study.rows.len() == 3;
        let rows: Vec<String> = study
            .rows
            .iter()
            .map(|r| {
                let w = r.worst.map_or("error".into(), |w| format!("{w:.2e}"));
                format!("N={} {w}{}", r.points, if r.at_floor { " (floor)" } else { "" })
            })
            .collect();
        parts.push(format!("{suite}: {}", rows.join(" -> ")));
    }
    Verdict {
        passed,
        detail: parts.join("; "),
    }
}

fn criterion_9() -> Verdict {
    let mut cfg = line_unitary();
    cfg.grid.points = 128;
    let r = run_suite("crossed-algebra", &cfg).unwrap();
    let a = pinned(&r, &[("oracle-twisted", 1e-12), ("oracle-alternative", 1e-12)]);

    let grid = Grid::line(10.0, 128).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let action = cfg.action_for(Group::Line, &mut rng).unwrap();
    let mut worst = 0.0f64;
    for seed in 0..5 {
        let f = random_bischwartz(&cfg.inputs.with_seed(seed), &grid, 2).unwrap();
        let h = CrossedElement::new(random_schwartz(&cfg.inputs.with_seed(100 + seed), &grid, 2).unwrap(), &action).unwrap();
        for actor in [BiAction::LeftCrossed(&h), BiAction::RightCrossed(&h)] {
            let fast = bimodule_act_bifunction_with(actor, &f, &action, Quadrature::Fast).unwrap();
            let direct = bimodule_act_bifunction_with(actor, &f, &action, Quadrature::Direct).unwrap();
            worst = worst.max(fast.distance(&direct).unwrap() / (f.sup_norm() * h.sup_norm()));
        }
    }
    let b = worst <= 1e-12;
    Verdict {
        passed: a.passed && b,
        detail: format!("{}; bi-function crossed actions {worst:.2e}{}1e-12", a.detail, if b { " <= " } else { " > " }),
    }
}

fn cli(args: &[&str], dir: &Path) -> Option<i32> {
    Command::new(env!("CARGO_BIN_EXE_crosslab"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
        .status
        .code()
}

fn criterion_10() -> Verdict {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path();
    std::fs::write(
        path.join("pass.toml"),
        "seed = 42\ntrials = 20\nsuites = [\"action\", \"crossed-algebra\", \"fourier\", \"hadamard\", \"operator-T\"]\n",
    )
    .unwrap();
    std::fs::write(path.join("fail.toml"), "trials = 2\nsuites = [\"operator-T\"]\n[tolerances]\nall = 1e-20\n").unwrap();
    std::fs::write(path.join("bad.toml"), "[grid]\npoints = 100\n").unwrap();

    let first = cli(&["run", "--config", "pass.toml", "--out", "a.json"], path);
    let second = cli(&["run", "--config", "pass.toml", "--out", "b.json"], path);
    let read = |n: &str| LabReport::from_json(&std::fs::read_to_string(path.join(n)).unwrap()).unwrap();
    let identical = read("a.json").without_timings() == read("b.json").without_timings();
    let fail = cli(&["run", "--config", "fail.toml", "--out", "c.json"], path);
    let bad = cli(&["run", "--config", "bad.toml", "--out", "d.json"], path);
    let missing = cli(&["run", "--config", "missing.toml"], path);
    let passed = first == Some(0)
        && second == Some(0)
        && identical
        && fail == Some(1)
        && bad == Some(2)
        && missing == Some(2);
    Verdict {
        passed,
        detail: format!(
            "identical reports {identical}; exits: all-pass {first:?}/{second:?}, forced-fail {fail:?}, bad config {bad:?}, missing config {missing:?}"
        ),
    }
}

fn main() {
    let criteria: [(&str, fn() -> Verdict); 10] = [
        ("exact sequence on the line", criterion_1),
        ("exact sequence on the circle", criterion_2),
        ("trivial-action degeneracy", criterion_3),
        ("operator T", criterion_4),
        ("bimodule identities", criterion_5),
        ("algebra isomorphisms", criterion_6),
        ("Hadamard division", criterion_7),
        ("grid convergence", criterion_8),
        ("oracle equivalence", criterion_9),
        ("determinism and exit codes", criterion_10),
    ];
    let mut unexpected = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let n = k + 1;
        let v = run();
        let expected = EXPECTED_FAILURES.iter().find(|(c, _)| *c == n);
        let status = match (v.passed, expected) {
            (true, None) => "PASS",
            (false, None) => {
                unexpected += 1;
                "FAIL"
            }
            (false, Some(_)) => "FAIL (expected)",
            (true, Some(_)) => {
                unexpected += 1;
                "PASS (unexpected; revisit the failure analysis)"
            }
        };
        println!("criterion {n:>2} {name}: {status}: {}", v.detail);
        if let (false, Some((_, why))) = (v.passed, expected) {
            println!("             reason: {why}");
        }
    }
    if unexpected > 0 {
        eprintln!("{unexpected} criteria did not meet expectations");
        std::process::exit(1);
    }
}
