//! Acceptance suite: one test per criterion, each printing a pass line with
//! its elapsed time (run with `--nocapture` to see them). Tolerances and
//! time budgets are pinned in the constants below.

use std::time::Instant;

use barq::distance::bottleneck;
use barq::entropy::{
    barcode_entropy, positive_part_entropy, ScalingFamily, ThresholdRule,
};
use barq::geometry::{crofton_lines, tomograph_census, Curve, TrigPoly};
use barq::oracle::oracle_barcode;
use barq::profile::ConvexProfile;
use barq::spectrum::{
    complex_from_spectrum, exp_spectrum, torus_spectrum, SpectrumModel,
};
use barq::synth::{
    perturbed_complex, random_barcode, random_complex, random_filling_pair, rng_from_seed,
    short_bars_above, BarcodeParams, ComplexParams, ContaminationPool, FillingParams,
};
use barq::Barcode;
use rand::Rng;

fn pass(criterion: usize, started: Instant, budget_s: f64, detail: &str) {
    let elapsed = started.elapsed().as_secs_f64();
    println!("ACCEPTANCE {criterion} PASS ({elapsed:.2}s / budget {budget_s}s): {detail}");
    assert!(
        elapsed < budget_s,
        "criterion {criterion} exceeded its {budget_s}s budget: {elapsed:.2}s"
    );
}

/// Criterion 1: reduction equals the rank oracle on 1000 random complexes of at most
/// 12 generators, by exact multiset equality.
#[test]
fn acceptance_01_reduction_matches_oracle() {
    let started = Instant::now();
    let mut rng = rng_from_seed(101);
    for trial in 0..1000 {
        let n = rng.gen_range(0..=12);
        let complex = random_complex(&mut rng, n, ComplexParams::default());
        assert_eq!(
            complex.reduce().unwrap(),
            oracle_barcode(&complex).unwrap(),
            "trial {trial}"
        );
    }
    pass(1, started, 10.0, "reduce = oracle on 1000 random complexes");
}

/// Criterion 2: action perturbation by delta moves the barcode by at most delta in
/// bottleneck distance, over 500 perturbed pairs (1e-12 slack).
#[test]
fn acceptance_02_stability() {
    let started = Instant::now();
    let mut rng = rng_from_seed(202);
    let mut max_ratio = 0.0f64;
    for trial in 0..500 {
        let n = rng.gen_range(2..=12);
        let complex = random_complex(&mut rng, n, ComplexParams::default());
        let delta = rng.gen_range(0.01..0.25);
        let (perturbed, bound) = perturbed_complex(&mut rng, &complex, delta);
        let d = bottleneck(
            &complex.reduce().unwrap(),
            &perturbed.reduce().unwrap(),
        );
        assert!(
            d <= bound + 1e-12,
            "trial {trial}: bottleneck {d} exceeds perturbation {bound}"
        );
        if bound > 0.0 {
            max_ratio = max_ratio.max(d / bound);
        }
    }
    pass(
        2,
        started,
        30.0,
        &format!("500 perturbations, worst distance/delta = {max_ratio:.3}"),
    );
}

/// Criterion 3: both long exact triangle count inequalities hold for 500 random
/// splits on a 10-point eps grid, with zero violations.
#[test]
fn acceptance_03_exact_triangle_inequality() {
    let started = Instant::now();
    let mut rng = rng_from_seed(303);
    for trial in 0..500 {
        let n = rng.gen_range(1..=12);
        let complex = random_complex(&mut rng, n, ComplexParams::default());
        let lo = complex
            .generators()
            .iter()
            .map(|(_, a)| *a)
            .fold(f64::INFINITY, f64::min);
        let hi = complex.max_action().unwrap();
        let tau = loop {
            let candidate = rng.gen_range((lo - 0.5)..(hi + 0.5));
            if complex.generators().iter().all(|(_, a)| *a != candidate) {
                break candidate;
            }
        };
        let triangle = complex.split_at(tau).unwrap();
        let full = complex.reduce().unwrap();
        let low = triangle.low.reduce().unwrap();
        let quotient = triangle.quotient.reduce().unwrap();
        let span = (hi - lo).max(0.1);
        for k in 1..=10 {
            let eps = span * k as f64 / 10.0;
            let f2 = full.count_long_bars(2.0 * eps).unwrap();
            let q2 = quotient.count_long_bars(2.0 * eps).unwrap();
            let f1 = full.count_long_bars(eps).unwrap();
            let l1 = low.count_long_bars(eps).unwrap();
            let q1 = quotient.count_long_bars(eps).unwrap();
            assert!(
                f2 <= l1 + q1,
                "trial {trial} eps {eps}: b_2e(C) = {f2} > {l1} + {q1}"
            );
            assert!(
                q2 <= f1 + l1,
                "trial {trial} eps {eps}: b_2e(Q) = {q2} > {f1} + {l1}"
            );
        }
    }
    pass(3, started, 30.0, "500 splits x 10 eps, zero violations");
}

/// Criterion 4: truncation contracts the bottleneck distance, and the truncated
/// long-bar count is sandwiched by prefix counts, over 1000 random trials.
#[test]
fn acceptance_04_truncation_contraction_and_sandwich() {
    let started = Instant::now();
    let mut rng = rng_from_seed(404);
    for trial in 0..1000 {
        let a = random_barcode(&mut rng, BarcodeParams::default());
        let b = random_barcode(&mut rng, BarcodeParams::default());
        let level = rng.gen_range(-1.0..12.0);
        let before = bottleneck(&a, &b);
        let after = bottleneck(&a.truncate(level), &b.truncate(level));
        assert!(
            after <= before + 1e-12,
            "trial {trial}: truncation expanded {before} to {after}"
        );
        for barcode in [&a, &b] {
            let eps = rng.gen_range(0.05..2.0);
            let t = rng.gen_range(0.0..12.0);
            let truncated = barcode.truncate(t).count_long_bars(eps).unwrap();
            let lower = barcode.count_prefix_bars(eps, t - eps).unwrap();
            let upper = barcode.count_prefix_bars(eps, t).unwrap();
            assert!(
                lower <= truncated && truncated <= upper,
                "trial {trial}: sandwich {lower} <= {truncated} <= {upper} failed"
            );
        }
    }
    pass(4, started, 10.0, "1000 contraction + sandwich trials");
}

/// Criterion 5: the quadratic profile matches its closed form to 1e-9 on 1000 grid
/// points; bilipschitz bounds and scaling monotonicity hold.
#[test]
fn acceptance_05_reparametrization_calibration() {
    let started = Instant::now();
    let profile = ConvexProfile::quadratic(2.0);
    let grid: Vec<f64> = (0..1000).map(|i| 2.0 * i as f64 / 999.0).collect();
    for &t in &grid {
        let closed_form = t + t * t / 4.0;
        let a = profile.action_of_length(t).unwrap();
        assert!(
            (a - closed_form).abs() <= 1e-9,
            "A({t}) = {a} vs {closed_form}"
        );
    }
    profile.check_bilipschitz(&grid).unwrap();

    // scaling family: ordering, diagonal bound, and the 1/s envelope
    let window: Vec<f64> = (0..=100).map(|i| 2.0 * i as f64 / 100.0).collect();
    let max_gap = window
        .iter()
        .map(|&t| profile.action_of_length(t).unwrap() - t)
        .fold(0.0, f64::max);
    for &t in &window {
        let mut prev = f64::INFINITY;
        for s in [1.0, 2.0, 4.0, 8.0, 16.0] {
            let scaled = profile.scaled(s).unwrap();
            let a = scaled.action_of_length(t).unwrap();
            assert!(a >= t - 1e-12, "A_s below the diagonal at t = {t}");
            assert!(a <= prev + 1e-12, "A_s not decreasing in s at t = {t}");
            assert!(
                a - t <= max_gap / s + 1e-9,
                "gap {} above envelope {} at s = {s}, t = {t}",
                a - t,
                max_gap / s
            );
            prev = a;
        }
    }
    pass(5, started, 5.0, "closed form to 1e-9 on 1000 points");
}

/// Criterion 6, entropy calibration: the synthetic exponential spectrum at rate 0.5
/// is recovered within 0.05, the flat-torus spectrum reads at most 0.05,
/// and the positive-part entropy agrees with the full entropy within 0.02
/// on both systems.
#[test]
fn acceptance_06_entropy_calibration() {
    let started = Instant::now();
    let eps_grid = [1.0, 0.5, 0.25];

    // exponential spectrum, known rate 0.5
    let exp_complex = complex_from_spectrum(
        &exp_spectrum(0.5, 20.0).unwrap(),
        SpectrumModel::Trivial,
        3,
    )
    .unwrap();
    let exp_levels: Vec<f64> = (0..=20).map(|i| 10.0 + 0.5 * i as f64).collect();
    let exp_family =
        ScalingFamily::complex_truncation_family(exp_complex, &exp_levels).unwrap();
    let exp_report = barcode_entropy(&exp_family, &eps_grid).unwrap();
    assert!(
        (exp_report.headline - 0.5).abs() <= 0.05,
        "exp headline {} not within 0.05 of 0.5",
        exp_report.headline
    );

    // flat torus, zero entropy
    let torus_complex = complex_from_spectrum(
        &torus_spectrum([0.13, 0.41], [0.55, 0.79], 80.0).unwrap(),
        SpectrumModel::Trivial,
        3,
    )
    .unwrap();
    let torus_levels: Vec<f64> = (0..=20).map(|i| 40.0 + 2.0 * i as f64).collect();
    let torus_family =
        ScalingFamily::complex_truncation_family(torus_complex, &torus_levels).unwrap();
    let torus_report = barcode_entropy(&torus_family, &eps_grid).unwrap();
    assert!(
        torus_report.headline <= 0.05,
        "torus headline {} above 0.05",
        torus_report.headline
    );

    // per-eps rates on the clean calibration families are monotone up to
    // the estimator slack
    for report in [&exp_report, &torus_report] {
        assert!(
            report.max_rate_inversion <= barq::entropy::RATE_MONOTONICITY_SLACK,
            "rate inversion {} beyond slack",
            report.max_rate_inversion
        );
    }

    // positive part agrees with the full entropy on both systems
    for (family, full_headline) in [
        (&exp_family, exp_report.headline),
        (&torus_family, torus_report.headline),
    ] {
        let report = positive_part_entropy(
            family,
            ThresholdRule::MidSmallestPositive,
            &eps_grid,
            0.02,
        )
        .unwrap();
        assert!(
            (report.full.headline - report.positive.headline).abs() <= 0.02,
            "positive-part headline {} vs full {}",
            report.positive.headline,
            report.full.headline
        );
        assert!(
            (report.full.headline - full_headline).abs() <= 1e-12,
            "full report changed between runs"
        );
        assert!(report.chain.iter().all(|c| c.holds), "rate chain violated");
    }
    pass(
        6,
        started,
        60.0,
        &format!(
            "exp headline {:.3}, torus headline {:.3}",
            exp_report.headline, torus_report.headline
        ),
    );
}

/// Criterion 7: the same spectrum pushed through profiles with r_max = 2 and
/// r_max = 4 yields headline rates within 0.05 of each other.
#[test]
fn acceptance_07_profile_independence() {
    let started = Instant::now();
    let spectrum = exp_spectrum(0.5, 20.0).unwrap();
    let schedule: Vec<f64> = (0..=10).map(|i| 5.0 + 0.5 * i as f64).collect();
    let eps_grid = [1.0, 0.5, 0.25];
    let mut headlines = Vec::new();
    for r_max in [2.0, 4.0] {
        let profile = ConvexProfile::quadratic(r_max);
        assert_eq!(profile.slope(), 2.0 * (r_max - 1.0) * 1.0);
        // keep the slope fixed at 2 so both profiles see the same lengths
        let profile = ConvexProfile::from_knots(vec![(1.0, 0.0), (r_max, 2.0)]).unwrap();
        let family = ScalingFamily::profile_scaling_family(
            &spectrum,
            &profile,
            &schedule,
            SpectrumModel::Trivial,
            0,
        )
        .unwrap();
        let report = barcode_entropy(&family, &eps_grid).unwrap();
        headlines.push(report.headline);
    }
    let diff = (headlines[0] - headlines[1]).abs();
    assert!(
        diff <= 0.05,
        "headlines {headlines:?} differ by {diff} > 0.05"
    );
    pass(
        7,
        started,
        60.0,
        &format!("headlines {:.3} vs {:.3}", headlines[0], headlines[1]),
    );
}

/// Criterion 8: 200 synthetic filling pairs agree on the multiset of short bars born
/// above the floor, and their entropy headlines match to the machine
/// precision of the estimator.
#[test]
fn acceptance_08_low_action_independence() {
    let started = Instant::now();
    let mut rng = rng_from_seed(808);
    for trial in 0..200 {
        let pair = random_filling_pair(
            &mut rng,
            FillingParams {
                pool: ContaminationPool::DeepOnly,
                ..FillingParams::default()
            },
        );
        let a = pair.first.reduce().unwrap();
        let b = pair.second.reduce().unwrap();
        assert_eq!(
            short_bars_above(&a, pair.floor, pair.gap),
            short_bars_above(&b, pair.floor, pair.gap),
            "trial {trial}: short-bar multisets differ"
        );
        let top = pair.first.max_action().unwrap();
        let levels: Vec<f64> = (0..=6)
            .map(|i| 2.0 + (top - 2.0) * i as f64 / 6.0)
            .collect();
        let eps_grid = [0.2, 0.1];
        let rate = |barcode: &Barcode| {
            barcode_entropy(
                &ScalingFamily::truncation_family(barcode.clone(), &levels).unwrap(),
                &eps_grid,
            )
            .unwrap()
            .headline
        };
        let (ra, rb) = (rate(&a), rate(&b));
        assert_eq!(ra, rb, "trial {trial}: headlines {ra} vs {rb}");
    }
    pass(8, started, 30.0, "200 filling pairs, headlines bitwise equal");
}

/// Criterion 9: the kinematic line integral over the unit circle is 4 pi within 5%
/// (and 3 sigma) at 1e5 samples, reproducibly; the integral stays below
/// 2 (1 + 5%) times the length across a 10-curve family.
#[test]
fn acceptance_09_crofton() {
    let started = Instant::now();
    let samples = 100_000;
    let circle = Curve::circle(1.0, 2048);
    let est = crofton_lines(&circle, samples, 9).unwrap();
    let four_pi = 4.0 * std::f64::consts::PI;
    assert!(
        (est.integral - four_pi).abs() <= 0.05 * four_pi + 3.0 * est.std_error,
        "circle integral {} vs {four_pi} (stderr {})",
        est.integral,
        est.std_error
    );
    let replay = crofton_lines(&circle, samples, 9).unwrap();
    assert_eq!(est.integral, replay.integral, "seeded run not reproducible");

    let family: Vec<(&str, Curve)> = vec![
        ("circle", Curve::circle(1.0, 512)),
        ("small-circle", Curve::circle(0.35, 256)),
        ("ellipse", {
            let pts = (0..512)
                .map(|i| {
                    let a = 2.0 * std::f64::consts::PI * i as f64 / 512.0;
                    [2.0 * a.cos(), 0.8 * a.sin()]
                })
                .collect();
            Curve::new(pts, true).unwrap()
        }),
        (
            "segment",
            Curve::segment([-1.5, 0.3], [0.9, 1.1]).unwrap(),
        ),
        ("square", {
            Curve::new(
                vec![[1.0, 1.0], [-1.0, 1.0], [-1.0, -1.0], [1.0, -1.0]],
                true,
            )
            .unwrap()
        }),
        ("triangle", {
            Curve::new(vec![[0.0, 1.2], [-1.0, -0.6], [1.1, -0.4]], true).unwrap()
        }),
        ("star", {
            let pts = (0..10)
                .map(|i| {
                    let a = 2.0 * std::f64::consts::PI * i as f64 / 10.0;
                    let r = if i % 2 == 0 { 1.0 } else { 0.45 };
                    [r * a.cos(), r * a.sin()]
                })
                .collect();
            Curve::new(pts, true).unwrap()
        }),
        ("sine-arc", {
            let pts = (0..=512)
                .map(|i| {
                    let t = -2.0 + 4.0 * i as f64 / 512.0;
                    [t, 0.8 * (3.0 * t).sin()]
                })
                .collect();
            Curve::new(pts, false).unwrap()
        }),
        ("spiral", {
            let pts = (0..=1024)
                .map(|i| {
                    let theta = 6.0 * std::f64::consts::PI * i as f64 / 1024.0;
                    let r = 0.1 + 0.15 * theta;
                    [r * theta.cos(), r * theta.sin()]
                })
                .collect();
            Curve::new(pts, false).unwrap()
        }),
        ("figure-eight", {
            let pts = (0..512)
                .map(|i| {
                    let t = 2.0 * std::f64::consts::PI * i as f64 / 512.0;
                    [t.cos(), t.sin() * t.cos()]
                })
                .collect();
            Curve::new(pts, true).unwrap()
        }),
    ];
    let constant = 2.0 * 1.05;
    for (name, curve) in &family {
        let est = crofton_lines(curve, samples, 17).unwrap();
        assert!(
            est.integral <= constant * est.length,
            "{name}: integral {} above {constant} x length {}",
            est.integral,
            est.length
        );
    }
    pass(
        9,
        started,
        30.0,
        &format!(
            "circle ratio {:.4}, inequality held on {} curves",
            est.ratio,
            family.len()
        ),
    );
}

/// Criterion 10: the tomograph census over 1e5 samples flags degenerate zeros on
/// fewer than 1e-3 of the samples, and the mean crossing count for five
/// reference functions stays below the constant calibrated on the zero
/// function times the derivative-graph length.
#[test]
fn acceptance_10_tomograph() {
    let started = Instant::now();
    let (d, radius, samples) = (4, 0.5, 100_000);

    let calibration = tomograph_census(&TrigPoly::zero(), d, radius, samples, 23).unwrap();
    assert!(
        calibration.degenerate_fraction < 1e-3,
        "calibration degenerate fraction {}",
        calibration.degenerate_fraction
    );
    // calibrated constant with 5% headroom
    let constant = calibration.mean_crossings / calibration.graph_length * 1.05;

    let references = [
        TrigPoly { a0: 0.0, terms: vec![(1, 0.0, 0.8)] },
        TrigPoly { a0: 0.0, terms: vec![(1, 0.3, 0.0), (2, 0.0, 0.5)] },
        TrigPoly { a0: 0.0, terms: vec![(3, 1.2, 0.0)] },
        TrigPoly { a0: 0.0, terms: vec![(1, 0.0, 0.7), (2, 0.4, 0.0)] },
        TrigPoly { a0: 0.0, terms: vec![(2, 0.0, 1.5)] },
    ];
    let mut worst = 0.0f64;
    for (i, g) in references.iter().enumerate() {
        let census = tomograph_census(g, d, radius, samples, 29 + i as u64).unwrap();
        assert!(
            census.degenerate_fraction < 1e-3,
            "reference {i} degenerate fraction {}",
            census.degenerate_fraction
        );
        let bound = constant * census.graph_length;
        assert!(
            census.mean_crossings <= bound,
            "reference {i}: mean {} above bound {bound}",
            census.mean_crossings
        );
        worst = worst.max(census.mean_crossings / bound);
    }
    pass(
        10,
        started,
        60.0,
        &format!(
            "degenerate fraction {:.1e}, worst mean/bound {:.3}",
            calibration.degenerate_fraction, worst
        ),
    );
}
