//! Cross-module invariants on randomized inputs: the reduction kernel
//! against the rank oracle, endpoint bookkeeping, filling independence of
//! short bars, dual-route count consistency, and reference-system growth.

use barq::complex::planted_barcode_complex;
use barq::distance::bottleneck;
use barq::entropy::{barcode_entropy, growth_rate, limsup_rate, ScalingFamily};
use barq::geometry::intersection_bound_check;
use barq::oracle::oracle_barcode;
use barq::spectrum::{schottky_spectrum, standard_schottky_pair};
use barq::synth::{
    random_barcode, random_complex, random_filling_pair, rng_from_seed, short_bars_above,
    BarcodeParams, ComplexParams, ContaminationPool, FillingParams,
};
use barq::{Bar, Barcode};
use rand::Rng;

#[test]
fn reduce_matches_oracle_on_random_complexes() {
    let mut rng = rng_from_seed(0x5eed);
    for trial in 0..300 {
        let n = rng.gen_range(0..=12);
        let complex = random_complex(&mut rng, n, ComplexParams::default());
        let fast = complex.reduce().unwrap();
        let slow = oracle_barcode(&complex).unwrap();
        assert_eq!(fast, slow, "trial {trial}, complex {complex:?}");
    }
}

#[test]
fn planted_complexes_are_a_three_way_fixpoint() {
    let mut rng = rng_from_seed(77);
    for _ in 0..50 {
        // distinct endpoints with multiplicity 1, per the planting policy
        let mut endpoints: Vec<f64> = (0..10)
            .map(|_| rng.gen_range(0.0..20.0))
            .collect();
        endpoints.sort_by(f64::total_cmp);
        endpoints.dedup_by(|a, b| (*a - *b).abs() < 1e-6);
        let mut bars = Vec::new();
        let mut iter = endpoints.chunks_exact(2);
        for pair in &mut iter {
            bars.push(Bar::new(pair[0], pair[1], 1).unwrap());
        }
        let barcode = Barcode::new(bars);
        let complex = planted_barcode_complex(&barcode).unwrap();
        assert_eq!(complex.reduce().unwrap(), barcode);
        assert_eq!(oracle_barcode(&complex).unwrap(), barcode);
    }
}

#[test]
fn conservation_holds_on_random_complexes() {
    let mut rng = rng_from_seed(404);
    for _ in 0..500 {
        let n = rng.gen_range(0..=12);
        let complex = random_complex(&mut rng, n, ComplexParams::default());
        complex.endpoint_conservation_check().unwrap();
    }
}

#[test]
fn pairing_identity_holds_on_random_complexes() {
    let mut rng = rng_from_seed(405);
    for _ in 0..500 {
        let n = rng.gen_range(0..=14);
        let complex = random_complex(&mut rng, n, ComplexParams::default());
        intersection_bound_check(&complex, 0.25).unwrap();
    }
}

#[test]
fn shift_equivariance_on_random_complexes() {
    let mut rng = rng_from_seed(19);
    for _ in 0..100 {
        let complex = random_complex(&mut rng, 10, ComplexParams::default());
        let c: f64 = rng.gen_range(-3.0..3.0);
        // exact dyadic shift keeps float arithmetic reversible
        let c = (c * 64.0).round() / 64.0;
        assert_eq!(
            complex.shifted(-c).reduce().unwrap(),
            complex.reduce().unwrap().shift(c)
        );
    }
}

/// Two fillings agreeing above the floor share every short bar born there,
/// even when their differentials disagree below the gap.
#[test]
fn filling_independence_of_short_bars() {
    let mut rng = rng_from_seed(2024);
    for pool in [ContaminationPool::DeepOnly, ContaminationPool::AnyBelowGap] {
        for _ in 0..100 {
            let pair = random_filling_pair(
                &mut rng,
                FillingParams {
                    pool,
                    ..FillingParams::default()
                },
            );
            let a = pair.first.reduce().unwrap();
            let b = pair.second.reduce().unwrap();
            assert_eq!(
                short_bars_above(&a, pair.floor, pair.gap),
                short_bars_above(&b, pair.floor, pair.gap),
                "pool {pool:?}"
            );
        }
    }
}

/// Counting long bars of the truncated barcode equals the prefix count at
/// `t - eps`, so the two routes to the growth rate agree exactly.
#[test]
fn truncated_and_prefix_counts_give_identical_rates() {
    let mut rng = rng_from_seed(88);
    for _ in 0..50 {
        let barcode = random_barcode(
            &mut rng,
            BarcodeParams {
                max_bars: 40,
                ..BarcodeParams::default()
            },
        );
        let eps = rng.gen_range(0.05..1.0);
        let levels: Vec<f64> = (0..=10).map(|i| 2.0 + i as f64).collect();
        let via_truncation: Vec<(f64, u64)> = levels
            .iter()
            .map(|&t| (t, barcode.truncate(t).count_long_bars(eps).unwrap()))
            .collect();
        let via_prefix: Vec<(f64, u64)> = levels
            .iter()
            .map(|&t| (t, barcode.count_prefix_bars(eps, t - eps).unwrap()))
            .collect();
        assert_eq!(via_truncation, via_prefix);
        let window = (levels[0], levels[levels.len() - 1]);
        match (
            growth_rate(&via_truncation, window),
            growth_rate(&via_prefix, window),
        ) {
            (Ok(a), Ok(b)) => assert_eq!(a.rate, b.rate),
            (Err(_), Err(_)) => {}
            (a, b) => panic!("routes disagree: {a:?} vs {b:?}"),
        }
    }
}

#[test]
fn reparametrization_through_action_map() {
    // quadratic profile: A(t) = t + t^2/4, so [1.25, 3) pulls back to [1, 2)
    let profile = barq::ConvexProfile::quadratic(2.0);
    let barcode = Barcode::from_intervals([(1.25, 3.0)]).unwrap();
    let pulled = barcode.reparametrize(&profile.action_map()).unwrap();
    assert_eq!(pulled.bars().len(), 1);
    assert!((pulled.bars()[0].birth() - 1.0).abs() < 1e-9);
    assert!((pulled.bars()[0].death() - 2.0).abs() < 1e-9);
}

/// Orbit growth of a standard free hyperbolic pair lands in the expected
/// exponential window on the certified part of the spectrum.
#[test]
fn schottky_orbit_growth_is_exponential() {
    let gens = standard_schottky_pair();
    let result = schottky_spectrum(&gens, (0.0, 1.0), (0.0, 1.4), 9).unwrap();
    let radius = result.complete_radius;
    let hi = radius * 0.98;
    let lo = hi * 0.45;
    let counts: Vec<(f64, u64)> = (0..=24)
        .map(|i| {
            let t = lo + (hi - lo) * i as f64 / 24.0;
            (t, result.spectrum.count_up_to(t))
        })
        .collect();
    let fit = limsup_rate(&counts, None).unwrap();
    assert!(
        (0.5..=1.3).contains(&fit.rate),
        "rate {} outside the expected window",
        fit.rate
    );
}

/// Count sandwich between the length module and its image under a scaled
/// profile: with `A` the action map at scale `s`,
/// `b_{r_max eps}(tru(sH, sB)) <= b_eps(tru(M, sT)) <= b_eps(tru(sH, sB))`
/// follows from the bilipschitz bounds and must hold with zero violations.
#[test]
fn profile_truncation_count_sandwich() {
    let spectrum = barq::spectrum::exp_spectrum(0.5, 12.0).unwrap();
    let profile = barq::ConvexProfile::quadratic(2.0);
    let r_max = profile.r_max();
    let length_complex =
        barq::spectrum::complex_from_spectrum(&spectrum, barq::spectrum::SpectrumModel::Trivial, 0)
            .unwrap();
    let length_barcode = length_complex.reduce().unwrap();
    for s in [1.0, 1.5, 2.0, 3.0, 4.5, 6.0] {
        let scaled = profile.scaled(s).unwrap();
        let (actions, _) = scaled.spectrum_to_actions(&spectrum);
        let action_complex = barq::spectrum::complex_from_spectrum(
            &actions,
            barq::spectrum::SpectrumModel::Trivial,
            0,
        )
        .unwrap();
        let action_barcode = action_complex
            .reduce()
            .unwrap()
            .truncate(scaled.action_bound());
        let length_truncated = length_barcode.truncate(scaled.slope());
        for k in 1..=8 {
            let eps = 0.25 * k as f64;
            let left = action_barcode.count_long_bars(r_max * eps).unwrap();
            let mid = length_truncated.count_long_bars(eps).unwrap();
            let right = action_barcode.count_long_bars(eps).unwrap();
            assert!(
                left <= mid && mid <= right,
                "s = {s}, eps = {eps}: {left} <= {mid} <= {right} failed"
            );
        }
    }
}

/// Exhaustive-matching oracle for the bottleneck distance on small
/// barcodes: minimize over all partial matchings the maximum of pair costs
/// and deletion costs.
fn brute_force_bottleneck(a: &[(f64, f64)], b: &[(f64, f64)]) -> f64 {
    fn go(a: &[(f64, f64)], b: &[(f64, f64)], i: usize, used: u32) -> f64 {
        if i == a.len() {
            // delete every unmatched bar of b
            let mut worst = 0.0f64;
            for (j, bar) in b.iter().enumerate() {
                if used >> j & 1 == 0 {
                    worst = worst.max(0.5 * (bar.1 - bar.0));
                }
            }
            return worst;
        }
        // delete a[i]
        let mut best = go(a, b, i + 1, used).max(0.5 * (a[i].1 - a[i].0));
        // or match it to any unused bar of b
        for j in 0..b.len() {
            if used >> j & 1 == 0 {
                let cost = (a[i].0 - b[j].0).abs().max((a[i].1 - b[j].1).abs());
                let rest = go(a, b, i + 1, used | 1 << j);
                best = best.min(rest.max(cost));
            }
        }
        best
    }
    go(a, b, 0, 0)
}

#[test]
fn bottleneck_matches_exhaustive_matching() {
    let mut rng = rng_from_seed(31);
    for trial in 0..300 {
        let make = |rng: &mut rand_chacha::ChaCha8Rng| {
            let n = rng.gen_range(0..=5);
            let bars: Vec<(f64, f64)> = (0..n)
                .map(|_| {
                    let birth = rng.gen_range(0.0..5.0);
                    (birth, birth + rng.gen_range(0.05..3.0))
                })
                .collect();
            bars
        };
        let a = make(&mut rng);
        let b = make(&mut rng);
        let barcode = |bars: &[(f64, f64)]| {
            Barcode::new(
                bars.iter()
                    .map(|&(x, y)| Bar::new(x, y, 1).unwrap())
                    .collect::<Vec<_>>(),
            )
        };
        let fast = bottleneck(&barcode(&a), &barcode(&b));
        let slow = brute_force_bottleneck(&a, &b);
        assert!(
            (fast - slow).abs() <= 1e-12,
            "trial {trial}: {fast} vs exhaustive {slow}\n a = {a:?}\n b = {b:?}"
        );
    }
}

/// Entropy via an explicit barcode family equals entropy via the complex
/// family it came from.
#[test]
fn barcode_and_complex_families_agree() {
    let spectrum = barq::spectrum::exp_spectrum(0.4, 12.0).unwrap();
    let complex =
        barq::spectrum::complex_from_spectrum(&spectrum, barq::spectrum::SpectrumModel::Trivial, 2)
            .unwrap();
    let barcode = complex.reduce().unwrap();
    let levels: Vec<f64> = (0..=10).map(|i| 6.0 + 0.6 * i as f64).collect();
    let eps = [0.5, 0.25];
    let via_barcode = barcode_entropy(
        &ScalingFamily::truncation_family(barcode, &levels).unwrap(),
        &eps,
    )
    .unwrap();
    let via_complex = barcode_entropy(
        &ScalingFamily::complex_truncation_family(complex, &levels).unwrap(),
        &eps,
    )
    .unwrap();
    assert_eq!(via_barcode.headline, via_complex.headline);
    for (a, b) in via_barcode.rows.iter().zip(&via_complex.rows) {
        assert_eq!(a.counts, b.counts);
    }
}
