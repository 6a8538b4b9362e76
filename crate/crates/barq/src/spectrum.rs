//! Chord spectra of reference systems and builders turning spectra into
//! filtered complexes.
//!
//! A spectrum is a sorted multiset of positive chord lengths below a stated
//! cutoff. Three generators cover the calibration needs: geodesic chords
//! between cotangent fibers of the flat torus (quadratic counting function,
//! zero entropy), orbit distances of a free hyperbolic isometry group
//! (exponential counting, positive entropy), and a synthetic spectrum with
//! exactly known exponential growth for estimator calibration.
//!
//! Lengths are merged by exact equality after rounding to 12 decimals:
//! lattice coincidences are exact, hyperbolic ones effectively never
//! collide.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::complex::FilteredComplex;

#[derive(Debug, Error, PartialEq)]
pub enum SpectrumError {
    #[error("chord length {length} must be positive")]
    NonPositiveLength { length: f64 },
    #[error("entries must be sorted ascending, {prev} precedes {next}")]
    Unsorted { prev: f64, next: f64 },
    #[error("entry {length} exceeds the cutoff {cutoff}")]
    BeyondCutoff { length: f64, cutoff: f64 },
    #[error("cutoff must be positive, got {cutoff}")]
    BadCutoff { cutoff: f64 },
    #[error("rate must be positive, got {rate}")]
    NonPositiveRate { rate: f64 },
    #[error("size guard: rate * t_max = {product} exceeds 30")]
    SizeGuard { product: f64 },
    #[error("generator matrix must have determinant 1, got {det}")]
    NonUnitDeterminant { det: f64 },
    #[error("word length bound {bound} exceeds 14")]
    WordBoundTooLarge { bound: usize },
    #[error("base points must lie in the upper half-plane")]
    NotUpperHalfPlane,
    #[error("planted gap must be positive")]
    BadGap,
}

const MERGE_SCALE: f64 = 1e12;

fn round_length(x: f64) -> f64 {
    (x * MERGE_SCALE).round() / MERGE_SCALE
}

/// Sorted multiset of positive chord lengths with a cutoff.
#[derive(Debug, Clone, PartialEq)]
pub struct ChordSpectrum {
    entries: Vec<(f64, u64)>,
    cutoff: f64,
}

impl ChordSpectrum {
    /// Merges, sorts, and validates raw lengths. Each length is rounded to
    /// 12 decimals before merging.
    pub fn from_lengths(
        lengths: impl IntoIterator<Item = f64>,
        cutoff: f64,
    ) -> Result<Self, SpectrumError> {
        if !(cutoff > 0.0) {
            return Err(SpectrumError::BadCutoff { cutoff });
        }
        let mut rounded: Vec<f64> = lengths.into_iter().map(round_length).collect();
        rounded.sort_by(f64::total_cmp);
        let mut entries: Vec<(f64, u64)> = Vec::new();
        for length in rounded {
            match entries.last_mut() {
                Some((l, m)) if *l == length => *m += 1,
                _ => entries.push((length, 1)),
            }
        }
        ChordSpectrum::from_sorted(entries, cutoff)
    }

    /// Validates already sorted-and-merged entries.
    pub fn from_sorted(entries: Vec<(f64, u64)>, cutoff: f64) -> Result<Self, SpectrumError> {
        if !(cutoff > 0.0) {
            return Err(SpectrumError::BadCutoff { cutoff });
        }
        let mut prev = 0.0;
        for &(length, _) in &entries {
            if !(length > 0.0) {
                return Err(SpectrumError::NonPositiveLength { length });
            }
            if length < prev {
                return Err(SpectrumError::Unsorted { prev, next: length });
            }
            if length > cutoff {
                return Err(SpectrumError::BeyondCutoff { length, cutoff });
            }
            prev = length;
        }
        Ok(ChordSpectrum { entries, cutoff })
    }

    pub fn entries(&self) -> &[(f64, u64)] {
        &self.entries
    }

    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn total_multiplicity(&self) -> u64 {
        self.entries.iter().map(|(_, m)| m).sum()
    }

    /// Counting function `N(t)`: total multiplicity of entries with length
    /// at most `t`.
    pub fn count_up_to(&self, t: f64) -> u64 {
        self.entries
            .iter()
            .take_while(|(l, _)| *l <= t)
            .map(|(_, m)| m)
            .sum()
    }
}

/// Lengths of geodesic chords between the cotangent fibers over `p` and `q`
/// on the flat unit-square torus: `|q - p + m|` over integer vectors `m`,
/// up to `t_max`. Zero lengths (p = q, m = 0) are excluded.
pub fn torus_spectrum(
    p: [f64; 2],
    q: [f64; 2],
    t_max: f64,
) -> Result<ChordSpectrum, SpectrumError> {
    if !(t_max > 0.0) {
        return Err(SpectrumError::BadCutoff { cutoff: t_max });
    }
    let d = [q[0] - p[0], q[1] - p[1]];
    let radius = t_max + d[0].abs().max(d[1].abs()) + 1.0;
    let bound = radius.ceil() as i64;
    let mut lengths = Vec::new();
    for mx in -bound..=bound {
        for my in -bound..=bound {
            let x = d[0] + mx as f64;
            let y = d[1] + my as f64;
            let len = x.hypot(y);
            if len > 0.0 && len <= t_max {
                lengths.push(len);
            }
        }
    }
    ChordSpectrum::from_lengths(lengths, t_max)
}

/// 2x2 real matrix acting on the upper half-plane by Mobius transformations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2 {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Mat2 {
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Mat2 { a, b, c, d }
    }

    pub fn det(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    fn mul(&self, o: &Mat2) -> Mat2 {
        Mat2 {
            a: self.a * o.a + self.b * o.c,
            b: self.a * o.b + self.b * o.d,
            c: self.c * o.a + self.d * o.c,
            d: self.c * o.b + self.d * o.d,
        }
    }

    fn inverse(&self) -> Mat2 {
        // det = 1 for the generators we accept
        Mat2 {
            a: self.d,
            b: -self.b,
            c: -self.c,
            d: self.a,
        }
    }

    /// Mobius action on `z = x + iy`, `y > 0`.
    fn apply(&self, z: (f64, f64)) -> (f64, f64) {
        let (x, y) = z;
        let re_den = self.c * x + self.d;
        let im_den = self.c * y;
        let norm = re_den * re_den + im_den * im_den;
        let re_num = self.a * x + self.b;
        let im_num = self.a * y;
        (
            (re_num * re_den + im_num * im_den) / norm,
            (im_num * re_den - re_num * im_den) / norm,
        )
    }
}

/// Hyperbolic distance on the upper half-plane.
pub fn hyperbolic_distance(z: (f64, f64), w: (f64, f64)) -> f64 {
    let dx = z.0 - w.0;
    let dy = z.1 - w.1;
    let cosh = 1.0 + (dx * dx + dy * dy) / (2.0 * z.1 * w.1);
    cosh.acosh()
}

/// Orbit-distance spectrum of a free group of hyperbolic isometries.
#[derive(Debug, Clone)]
pub struct SchottkySpectrum {
    pub spectrum: ChordSpectrum,
    /// Distances below this radius are certifiably complete: it is the
    /// smallest distance realized in the last enumerated word shell, and
    /// shell-minimal distances only grow for the well-separated pairs this
    /// generator targets.
    pub complete_radius: f64,
    /// Entries at or beyond the completeness radius.
    pub flagged: u64,
    pub words_enumerated: u64,
}

/// Distances `d(p, gamma q)` over all reduced words `gamma` in the given
/// determinant-1 generators, up to `max_word_length` letters (at most 14).
/// The caller asserts that the matrices generate a free discrete group.
pub fn schottky_spectrum(
    generators: &[Mat2],
    p: (f64, f64),
    q: (f64, f64),
    max_word_length: usize,
) -> Result<SchottkySpectrum, SpectrumError> {
    if max_word_length > 14 {
        return Err(SpectrumError::WordBoundTooLarge {
            bound: max_word_length,
        });
    }
    if !(p.1 > 0.0 && q.1 > 0.0) {
        return Err(SpectrumError::NotUpperHalfPlane);
    }
    for g in generators {
        let det = g.det();
        if (det - 1.0).abs() > 1e-9 {
            return Err(SpectrumError::NonUnitDeterminant { det });
        }
    }
    // letters: generator i and its inverse at i + k
    let k = generators.len();
    let mut letters: Vec<Mat2> = generators.to_vec();
    letters.extend(generators.iter().map(Mat2::inverse));
    let inverse_of = |letter: usize| (letter + k) % (2 * k);

    let mut lengths: Vec<f64> = Vec::new();
    let mut words: u64 = 0;
    let mut last_shell_min = f64::INFINITY;
    let mut push = |m: &Mat2, is_last_shell: bool, lengths: &mut Vec<f64>| {
        let d = hyperbolic_distance(p, m.apply(q));
        if d > 1e-12 {
            lengths.push(d);
        }
        if is_last_shell {
            last_shell_min = last_shell_min.min(d);
        }
    };

    // empty word
    push(
        &Mat2::new(1.0, 0.0, 0.0, 1.0),
        max_word_length == 0,
        &mut lengths,
    );
    words += 1;

    // depth-first over reduced words: (product, last letter, length)
    let mut stack: Vec<(Mat2, usize, usize)> = Vec::new();
    if max_word_length > 0 {
        for (l, m) in letters.iter().enumerate() {
            stack.push((*m, l, 1));
        }
    }
    while let Some((m, last, len)) = stack.pop() {
        words += 1;
        push(&m, len == max_word_length, &mut lengths);
        if len < max_word_length {
            for (l, next) in letters.iter().enumerate() {
                if l != inverse_of(last) {
                    stack.push((m.mul(next), l, len + 1));
                }
            }
        }
    }

    // merging rounds to 12 decimals, so the cutoff must be the rounded max
    let t_max = round_length(lengths.iter().copied().fold(f64::NEG_INFINITY, f64::max));
    let spectrum = ChordSpectrum::from_lengths(lengths, t_max.max(1e-9))?;
    let complete_radius = if max_word_length == 0 {
        t_max
    } else {
        last_shell_min
    };
    let flagged = spectrum
        .entries()
        .iter()
        .filter(|(l, _)| *l >= complete_radius)
        .map(|(_, m)| m)
        .sum();
    Ok(SchottkySpectrum {
        spectrum,
        complete_radius,
        flagged,
        words_enumerated: words,
    })
}

/// A standard well-separated pair of hyperbolic generators: the dilation
/// `z -> 9z` and an equal-strength hyperbolic fixing -1 and 1. The
/// ping-pong sets (`|z| <= 1/3`, `|z| >= 3`, and the isometric discs over
/// `[0.5, 2]` and `[-2, -0.5]`) are pairwise disjoint, so the group is free
/// and discrete.
pub fn standard_schottky_pair() -> [Mat2; 2] {
    let lambda = 3.0;
    let a = Mat2::new(lambda, 0.0, 0.0, 1.0 / lambda);
    let cosh = 0.5 * (lambda + 1.0 / lambda);
    let sinh = 0.5 * (lambda - 1.0 / lambda);
    let b = Mat2::new(cosh, sinh, sinh, cosh);
    [a, b]
}

/// Synthetic spectrum with exact exponential counting: entries at
/// `log(k) / rate` for `k = 2, 3, ...` up to `t_max`, multiplicity 1, so
/// `N(t) = floor(exp(rate * t)) - 1` exactly. (The `k = 1` entry would have
/// length zero, which spectra exclude.)
pub fn exp_spectrum(rate: f64, t_max: f64) -> Result<ChordSpectrum, SpectrumError> {
    if !(rate > 0.0) {
        return Err(SpectrumError::NonPositiveRate { rate });
    }
    if !(t_max > 0.0) {
        return Err(SpectrumError::BadCutoff { cutoff: t_max });
    }
    let product = rate * t_max;
    if product > 30.0 {
        return Err(SpectrumError::SizeGuard { product });
    }
    let k_max = (rate * t_max).exp().floor() as u64;
    let entries: Vec<(f64, u64)> = (2..=k_max).map(|k| ((k as f64).ln() / rate, 1)).collect();
    ChordSpectrum::from_sorted(entries, t_max)
}

/// How a spectrum becomes a filtered complex.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpectrumModel {
    /// One generator per entry, zero differential: every bar is infinite
    /// and the long-bar count at level `t` is `N(t)` plus the zero-action
    /// generators.
    Trivial,
    /// Each entry is paired with a partner offset by a sampled gap,
    /// producing finite bars of known lengths.
    Planted { gap: GapModel, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GapModel {
    Constant(f64),
    Uniform { lo: f64, hi: f64 },
}

impl GapModel {
    fn sample(&self, rng: &mut impl Rng) -> f64 {
        match *self {
            GapModel::Constant(g) => g,
            GapModel::Uniform { lo, hi } => rng.gen_range(lo..hi),
        }
    }

    fn validate(&self) -> Result<(), SpectrumError> {
        let ok = match *self {
            GapModel::Constant(g) => g > 0.0,
            GapModel::Uniform { lo, hi } => lo > 0.0 && hi > lo,
        };
        if ok {
            Ok(())
        } else {
            Err(SpectrumError::BadGap)
        }
    }
}

/// Builds a filtered complex from a spectrum, with `zero_action_count`
/// extra generators at action 0 modeling intersection points.
pub fn complex_from_spectrum(
    spectrum: &ChordSpectrum,
    model: SpectrumModel,
    zero_action_count: usize,
) -> Result<FilteredComplex, SpectrumError> {
    let mut complex = FilteredComplex::new();
    for i in 0..zero_action_count {
        complex.add_generator(format!("o{i:04}"), 0.0);
    }
    match model {
        SpectrumModel::Trivial => {
            let mut idx = 0usize;
            for &(length, mult) in spectrum.entries() {
                for _ in 0..mult {
                    complex.add_generator(format!("x{idx:06}"), length);
                    idx += 1;
                }
            }
        }
        SpectrumModel::Planted { gap, seed } => {
            gap.validate()?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut idx = 0usize;
            for &(length, mult) in spectrum.entries() {
                for _ in 0..mult {
                    let x = format!("x{idx:06}");
                    let y = format!("y{idx:06}");
                    complex.add_generator(x.clone(), length);
                    complex.add_generator(y.clone(), length + gap.sample(&mut rng));
                    complex.set_boundary(y, [x]);
                    idx += 1;
                }
            }
        }
    }
    Ok(complex)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn torus_self_spectrum_starts_at_unit_vectors() {
        let s = torus_spectrum([0.3, 0.3], [0.3, 0.3], 2.5).unwrap();
        assert_eq!(s.entries()[0], (1.0, 4));
        // sqrt(2) diagonals
        assert_eq!(s.entries()[1].1, 4);
        assert!((s.entries()[1].0 - 2.0f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn torus_offset_example() {
        let s = torus_spectrum([0.0, 0.0], [0.5, 0.0], 1.2).unwrap();
        let expected_second = 1.25f64.sqrt();
        assert_eq!(s.entries().len(), 2);
        assert_eq!(s.entries()[0], (0.5, 2));
        assert_eq!(s.entries()[1].1, 4);
        assert!((s.entries()[1].0 - expected_second).abs() < 1e-9);
    }

    #[test]
    fn torus_counting_approaches_circle_area() {
        let t = 200.0;
        let s = torus_spectrum([0.1, 0.2], [0.4, 0.8], t).unwrap();
        let n = s.count_up_to(t) as f64;
        let pi = std::f64::consts::PI;
        assert!((n / (t * t) - pi).abs() < 0.05 * pi);
    }

    #[test]
    fn torus_count_matches_brute_force() {
        let (p, q, t) = ([0.12, 0.7], [0.9, 0.05], 50.0);
        let s = torus_spectrum(p, q, t).unwrap();
        // independent raw count without merging
        let mut count = 0u64;
        for mx in -60i64..=60 {
            for my in -60i64..=60 {
                let x = q[0] - p[0] + mx as f64;
                let y = q[1] - p[1] + my as f64;
                let len = x.hypot(y);
                if len > 0.0 && len <= t {
                    count += 1;
                }
            }
        }
        assert_eq!(s.count_up_to(t), count);
    }

    #[test]
    fn exp_spectrum_counts_exactly() {
        let s = exp_spectrum(0.5, 10.0).unwrap();
        // N(t) = floor(exp(t/2)) - 1
        for t in [2.0f64, 5.0, 7.5, 10.0] {
            let expected = (0.5 * t).exp().floor() as u64 - 1;
            assert_eq!(s.count_up_to(t), expected);
        }
        assert_eq!(s.total_multiplicity(), (5.0f64.exp().floor() as u64) - 1);
        assert!(exp_spectrum(0.5, 100.0).is_err());
        assert!(exp_spectrum(-1.0, 2.0).is_err());
    }

    #[test]
    fn schottky_identity_word_only() {
        let gens = standard_schottky_pair();
        let p = (0.2, 1.0);
        let q = (0.5, 2.0);
        let s = schottky_spectrum(&gens, p, q, 0).unwrap();
        assert_eq!(s.spectrum.total_multiplicity(), 1);
        assert!((s.spectrum.entries()[0].0 - hyperbolic_distance(p, q)).abs() < 1e-9);
    }

    #[test]
    fn schottky_word_counts_are_free() {
        let gens = standard_schottky_pair();
        let s = schottky_spectrum(&gens, (0.0, 1.0), (0.0, 1.4), 5).unwrap();
        // 1 + sum over shells of 4 * 3^(n-1)
        let expected: u64 = 1 + (1..=5u32).map(|n| 4 * 3u64.pow(n - 1)).sum::<u64>();
        assert_eq!(s.words_enumerated, expected);
    }

    #[test]
    fn schottky_rejects_bad_input() {
        let bad = [Mat2::new(2.0, 0.0, 0.0, 1.0)];
        assert!(matches!(
            schottky_spectrum(&bad, (0.0, 1.0), (0.0, 1.0), 2),
            Err(SpectrumError::NonUnitDeterminant { .. })
        ));
        let gens = standard_schottky_pair();
        assert!(schottky_spectrum(&gens, (0.0, 1.0), (0.0, 1.0), 15).is_err());
        assert!(schottky_spectrum(&gens, (0.0, -1.0), (0.0, 1.0), 2).is_err());
    }

    #[test]
    fn hyperbolic_distance_basics() {
        // points on the imaginary axis: d = |log(y1 / y2)|
        let d = hyperbolic_distance((0.0, 1.0), (0.0, std::f64::consts::E));
        assert!((d - 1.0).abs() < 1e-12);
        assert_eq!(hyperbolic_distance((0.3, 2.0), (0.3, 2.0)), 0.0);
    }

    #[test]
    fn trivial_model_bars() {
        let s = ChordSpectrum::from_lengths([1.0, 2.0], 2.0).unwrap();
        let c = complex_from_spectrum(&s, SpectrumModel::Trivial, 1).unwrap();
        let barcode = c.reduce().unwrap();
        assert_eq!(barcode.infinite_count(), 3);
        assert_eq!(barcode.bars()[0].birth(), 0.0);
        assert_eq!(barcode.bars()[1].birth(), 1.0);
        assert_eq!(barcode.bars()[2].birth(), 2.0);
    }

    #[test]
    fn planted_model_bars() {
        let s = ChordSpectrum::from_lengths([1.0, 2.0], 2.0).unwrap();
        let c = complex_from_spectrum(
            &s,
            SpectrumModel::Planted {
                gap: GapModel::Constant(0.1),
                seed: 9,
            },
            2,
        )
        .unwrap();
        let barcode = c.reduce().unwrap();
        assert_eq!(barcode.infinite_count(), 2);
        let finite: Vec<(f64, f64)> = barcode
            .bars()
            .iter()
            .filter(|b| !b.is_infinite())
            .map(|b| (b.birth(), b.death()))
            .collect();
        assert_eq!(finite, vec![(1.0, 1.1), (2.0, 2.1)]);
    }

    #[test]
    fn spectrum_invariants() {
        assert!(ChordSpectrum::from_lengths([0.0], 1.0).is_err());
        assert!(ChordSpectrum::from_lengths([2.0], 1.0).is_err());
        assert!(ChordSpectrum::from_sorted(vec![(2.0, 1), (1.0, 1)], 3.0).is_err());
        let s = ChordSpectrum::from_lengths([1.0, 1.0, 0.5], 2.0).unwrap();
        assert_eq!(s.entries(), &[(0.5, 1), (1.0, 2)]);
    }
}
