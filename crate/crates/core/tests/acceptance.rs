//! Acceptance gate. Runs every criterion at its stated tolerance and time
//! limit, prints one PASS/FAIL line each, and exits non-zero on any failure.

use std::time::{Duration, Instant};

use polybloch::essential::{BoundReport, Verdict};
use polybloch::geometry::rho;
use polybloch::job::{run_analysis, JobConfig};
use polybloch::report::{rows_to_csv, to_json};
use polybloch::sampling::trial_rng;
use polybloch::symbols::generate;
use polybloch::verify::{
    chain_subjects, check_fm, check_jets, check_lemma1, check_lemma2, check_norm_chain, check_oracle,
    curated_family, DEFAULT_FM_MODULI, DEFAULT_R_LADDER,
};
use polybloch::Complex64;

const SEED: u64 = 20_240_601;

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        ok,
        detail: detail.into(),
    }
}

fn closed_form_vs_oracle() -> Outcome {
    let r = check_oracle(100, 100_000, 1e-4, SEED);
    outcome(
        r.violations == 0,
        format!(
            "100 pairs x 1e5 directions, violations {}, max gap {:.3e}, injected maximizer error {:.3e}",
            r.violations,
            r.diagnostics["max_relative_gap"].as_f64().unwrap_or(f64::NAN),
            r.diagnostics["max_injected_maximizer_error"].as_f64().unwrap_or(f64::NAN)
        ),
    )
}

fn jets_vs_finite_differences() -> Outcome {
    let r = check_jets(1000, 1e-6, SEED);
    outcome(
        r.violations == 0,
        format!("1000 pairs, violations {}, worst relative error {:.3e}", r.violations, r.worst_ratio * 1e-6),
    )
}

fn lemma1() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for n in 1..=3 {
        let family = curated_family(n);
        let r = check_lemma1(&family, 10_000, SEED + n as u64);
        ok &= r.violations == 0 && r.trials == 10_000 * family.len();
        parts.push(format!("n={n}: {} trials, {} violations, worst ratio {:.3}", r.trials, r.violations, r.worst_ratio));
    }
    outcome(ok, parts.join("; "))
}

fn lemma2() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for n in 1..=3 {
        let r = check_lemma2(&curated_family(n), 0.5, &DEFAULT_R_LADDER, 4000, SEED + n as u64).expect("valid ladder");
        ok &= r.violations == 0 && r.diagnostics["monotone"] == true;
        let sups: Vec<String> = r.diagnostics["ladder"]
            .as_array()
            .unwrap()
            .iter()
            .map(|row| format!("{:.2e}", row["sampled_sup"].as_f64().unwrap()))
            .collect();
        parts.push(format!("n={n}: violations {}, sups [{}]", r.violations, sups.join(", ")));
    }
    outcome(ok, parts.join("; "))
}

fn equivalence_chain() -> Outcome {
    let subjects = chain_subjects(10, SEED);
    let r = check_norm_chain(&subjects, 10_000, SEED);
    outcome(
        r.violations == 0,
        format!("{} functions x 1e4 points, violations {}, worst ratio {:.6}", subjects.len(), r.violations, r.worst_ratio),
    )
}

fn extremal_family() -> Outcome {
    let r = check_fm(&DEFAULT_FM_MODULI, 2, 20_000, 10_000, SEED).expect("valid moduli");
    let worst_norm = r.diagnostics["rows"]
        .as_array()
        .unwrap()
        .iter()
        .map(|row| row["norm_estimate"].as_f64().unwrap())
        .fold(0.0, f64::max);
    outcome(
        r.violations == 0,
        format!("violations {}, largest norm estimate {worst_norm:.6}", r.violations),
    )
}

fn analyze(phi: &str, psi: &str, budget: usize) -> BoundReport {
    let mut c = JobConfig::new(2, phi, psi);
    c.sample_budget = budget;
    c.seed = SEED;
    run_analysis(&c, false).expect("analysis runs").report
}

fn verdicts() -> Outcome {
    let same = analyze("z1; z2", "z1; z2", 200_000);
    let same_ok = same.verdict == Verdict::Compact && same.lower_bound == 0.0 && same.upper_bound == 0.0;

    let small = analyze("scale(0.5, z1); scale(0.5, z2)", "z1/3; z2/3", 200_000);
    let small_ok = small.verdict == Verdict::Compact && small.diagnostics.degenerate_compact;

    let square = analyze("z1; z2", "pow(z1, 2); z2", 200_000);
    // independent grid oracle for sup rho(x, x^2) near x = -1
    let grid = (1..=10_000)
        .map(|i| {
            let x = Complex64::new(-1.0 + i as f64 * 1e-5, 0.0);
            rho(x, x * x).unwrap()
        })
        .fold(0.0, f64::max);
    let square_ok = square.verdict == Verdict::NotCompact
        && square.lower_bound >= 0.24
        && square.s_limit >= 0.98
        && grid >= 0.98
        && square.s_limit <= 1.0;

    outcome(
        same_ok && small_ok && square_ok,
        format!(
            "identity {:?} [{}, {}]; contractions {:?} degenerate={}; square {:?} S_limit {:.6} (grid {:.6}) lower {:.6}",
            same.verdict,
            same.lower_bound,
            same.upper_bound,
            small.verdict,
            small.diagnostics.degenerate_compact,
            square.verdict,
            square.s_limit,
            grid,
            square.lower_bound
        ),
    )
}

fn structure_violations(rep: &BoundReport, swapped: &BoundReport) -> Vec<String> {
    let mut bad = Vec::new();
    for w in rep.rows.windows(2) {
        if w[1].s > w[0].s || w[1].k > w[0].k {
            bad.push(format!("row at delta {} is not monotone", w[1].delta));
        }
    }
    for row in &rep.rows {
        if row.s != row.b_l.iter().copied().fold(0.0, f64::max) {
            bad.push(format!("S != max b_l at delta {}", row.delta));
        }
    }
    if rep.lower_bound.is_nan() || rep.lower_bound > rep.upper_bound {
        bad.push("lower_bound > upper_bound".into());
    }
    for (a, b) in rep.rows.iter().zip(&swapped.rows) {
        let close = (a.s - b.s).abs() <= 1e-12
            && (a.k - b.k).abs() <= 1e-12
            && a.b_l.iter().zip(&b.b_l).all(|(x, y)| (x - y).abs() <= 1e-12)
            && a.samples_in_region == b.samples_in_region;
        if !close {
            bad.push(format!("swap changes the row at delta {}", a.delta));
        }
    }
    bad
}

fn structural_invariants() -> Outcome {
    let mut pairs: Vec<(String, String)> = [
        ("z1; z2", "z1; z2"),
        ("scale(0.5, z1); scale(0.5, z2)", "z1/3; z2/3"),
        ("z1; z2", "pow(z1, 2); z2"),
        ("mob(0.3, z1); z1*z2", "scale(0.9, z1); mob(0.2i, z2)"),
        ("pow(z2, 3); z1", "z2*z1; scale(0.5, z1 + z2)"),
    ]
    .iter()
    .map(|(a, b)| (a.to_string(), b.to_string()))
    .collect();
    for i in 0..5 {
        let mut rng = trial_rng(SEED, 1000 + i);
        pairs.push((
            generate::random_self_map(&mut rng, 2, 3).to_string(),
            generate::random_self_map(&mut rng, 2, 3).to_string(),
        ));
    }
    let mut bad = Vec::new();
    for (phi, psi) in &pairs {
        let rep = analyze(phi, psi, 20_000);
        let swapped = analyze(psi, phi, 20_000);
        bad.extend(structure_violations(&rep, &swapped).into_iter().map(|b| format!("({phi} | {psi}): {b}")));
    }
    outcome(
        bad.is_empty(),
        if bad.is_empty() {
            format!("{} pairs, all invariants hold", pairs.len())
        } else {
            bad.join("; ")
        },
    )
}

fn determinism() -> Outcome {
    let mut c = JobConfig::new(2, "mob(0.3, z1); z1*z2", "scale(0.9, z1); pow(z2, 2)");
    c.sample_budget = 50_000;
    c.seed = SEED;
    let render = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| {
            let doc = run_analysis(&c, false).unwrap();
            (to_json(&doc).unwrap(), rows_to_csv(&doc.report).unwrap())
        })
    };
    let many = std::thread::available_parallelism().map_or(4, |n| n.get()).max(4);
    let one = render(1);
    let again = render(1);
    let wide = render(many);
    let odd = render(3);
    outcome(
        one == again && one == wide && one == odd,
        format!("threads 1, 1, 3, {many}: {} JSON bytes, identical = {}", one.0.len(), one == wide && one == odd && one == again),
    )
}

fn main() {
    type Criterion = (&'static str, Duration, fn() -> Outcome);
    let criteria: [Criterion; 9] = [
        ("closed-form Q_f vs direction oracle", Duration::from_secs(30), closed_form_vs_oracle),
        ("jets vs finite differences", Duration::from_secs(10), jets_vs_finite_differences),
        ("Kobayashi Lipschitz bound", Duration::from_secs(20), lemma1),
        ("dilation bound", Duration::from_secs(10), lemma2),
        ("norm equivalence chain", Duration::from_secs(10), equivalence_chain),
        ("extremal family f_a", Duration::from_secs(10), extremal_family),
        ("verdicts on curated pairs", Duration::from_secs(120), verdicts),
        ("structural report invariants", Duration::from_secs(120), structural_invariants),
        ("determinism across thread counts", Duration::from_secs(120), determinism),
    ];
    let mut failed = 0;
    for (i, (name, limit, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = run();
        let elapsed = start.elapsed();
        let ok = out.ok && elapsed <= *limit;
        if !ok {
            failed += 1;
        }
        println!(
            "{} criterion {}: {name} ({:.2} s, limit {} s) {}",
            if ok { "PASS" } else { "FAIL" },
            i + 1,
            elapsed.as_secs_f64(),
            limit.as_secs(),
            out.detail
        );
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
