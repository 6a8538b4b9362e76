//! Desk-scale numerical checks of the line-integral (Crofton) bound and a
//! finite-dimensional tomograph census, plus the generator-count bound on
//! long bars.
//!
//! Lines in the plane are parameterized by `(p, theta)` with the kinematic
//! measure `dp dtheta`, `theta` uniform on `[0, pi)` and `p` uniform over a
//! bounding interval; for any rectifiable curve the expected intersection
//! count integrates to twice the length, so the estimate-to-length ratio
//! calibrates the constant in the inequality.
//!
//! The infinite-dimensional tomograph is modeled by its faithful
//! finite-dimensional shadow: graphs of differentials of trigonometric
//! polynomials on the circle, where intersections with `graph(dg)` are
//! critical points of `f_s - g`. Zeros are isolated by sign changes on a
//! fixed panel grid and refined by bisection; a zero with second derivative
//! below threshold flags the sample as degenerate.
//!
//! Sampling is embarrassingly parallel with per-block seeded streams and a
//! fixed summation order, so results are reproducible for a given seed at
//! any thread count.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::barcode::BarcodeError;
use crate::complex::{FilteredComplex, Violation};

const BLOCK: usize = 1024;
const PANELS: usize = 2048;
const ROOT_TOL: f64 = 1e-10;
const DEGENERACY_TOL: f64 = 1e-8;

#[derive(Debug, Error, PartialEq)]
pub enum GeometryError {
    #[error("curve needs at least 2 points")]
    TooFewPoints,
    #[error("curve has a non-finite coordinate at point {index}")]
    UnboundedCurve { index: usize },
    #[error("curve has a zero-length segment at point {index}")]
    DegenerateSegment { index: usize },
    #[error("curve segments {first} and {second} overlap")]
    SelfOverlap { first: usize, second: usize },
    #[error("need at least 10000 samples, got {n}")]
    TooFewSamples { n: usize },
    #[error("basis of size {d} cannot span the circle's cotangent directions (need >= 2)")]
    BasisTooSmall { d: usize },
    #[error("sample radius must be positive, got {r}")]
    BadRadius { r: f64 },
    #[error("complex invalid: {0}")]
    Invalid(#[from] Violation),
    #[error(transparent)]
    Barcode(#[from] BarcodeError),
    #[error(
        "intersection bound violated: {generators} generators, {bars} bars, \
         {long_bars} long bars"
    )]
    IntersectionBound {
        generators: u64,
        bars: u64,
        long_bars: u64,
    },
    #[error(
        "generator pairing identity violated: {generators} generators vs \
         2 * {finite} + {infinite}"
    )]
    PairingIdentity {
        generators: u64,
        finite: u64,
        infinite: u64,
    },
}

/// Piecewise-linear plane curve given by its vertex table.
#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    points: Vec<[f64; 2]>,
    closed: bool,
}

impl Curve {
    pub fn new(points: Vec<[f64; 2]>, closed: bool) -> Result<Self, GeometryError> {
        if points.len() < 2 {
            return Err(GeometryError::TooFewPoints);
        }
        for (i, p) in points.iter().enumerate() {
            if !(p[0].is_finite() && p[1].is_finite()) {
                return Err(GeometryError::UnboundedCurve { index: i });
            }
        }
        let curve = Curve { points, closed };
        for (i, (a, b)) in curve.segments().enumerate() {
            if a == b {
                return Err(GeometryError::DegenerateSegment { index: i });
            }
        }
        curve.check_overlap()?;
        Ok(curve)
    }

    /// Regular polygon approximation of the circle of radius `r`.
    pub fn circle(r: f64, segments: usize) -> Self {
        let points = (0..segments)
            .map(|i| {
                let a = 2.0 * std::f64::consts::PI * i as f64 / segments as f64;
                [r * a.cos(), r * a.sin()]
            })
            .collect();
        Curve::new(points, true).expect("regular polygon is valid")
    }

    pub fn segment(from: [f64; 2], to: [f64; 2]) -> Result<Self, GeometryError> {
        Curve::new(vec![from, to], false)
    }

    pub fn points(&self) -> &[[f64; 2]] {
        &self.points
    }

    pub fn scaled(&self, factor: f64) -> Curve {
        Curve {
            points: self
                .points
                .iter()
                .map(|p| [p[0] * factor, p[1] * factor])
                .collect(),
            closed: self.closed,
        }
    }

    fn segments(&self) -> impl Iterator<Item = ([f64; 2], [f64; 2])> + '_ {
        let n = self.points.len();
        let count = if self.closed { n } else { n - 1 };
        (0..count).map(move |i| (self.points[i], self.points[(i + 1) % n]))
    }

    pub fn length(&self) -> f64 {
        self.segments()
            .map(|(a, b)| (b[0] - a[0]).hypot(b[1] - a[1]))
            .sum()
    }

    fn bounding_radius(&self) -> f64 {
        self.points
            .iter()
            .map(|p| p[0].hypot(p[1]))
            .fold(0.0, f64::max)
    }

    /// Rejects exactly collinear overlapping segment pairs (doubled-back
    /// pieces would be counted twice in both length and crossings).
    fn check_overlap(&self) -> Result<(), GeometryError> {
        let segs: Vec<([f64; 2], [f64; 2])> = self.segments().collect();
        for i in 0..segs.len() {
            for j in (i + 1)..segs.len() {
                if segments_overlap(segs[i], segs[j]) {
                    return Err(GeometryError::SelfOverlap { first: i, second: j });
                }
            }
        }
        Ok(())
    }

    /// Crossings with the line `x cos(theta) + y sin(theta) = p`, counted
    /// by sign changes over the segments.
    fn crossings(&self, theta_cos: f64, theta_sin: f64, p: f64) -> u32 {
        let mut count = 0;
        let eval = |pt: [f64; 2]| pt[0] * theta_cos + pt[1] * theta_sin - p;
        let n = self.points.len();
        let seg_count = if self.closed { n } else { n - 1 };
        let mut prev = eval(self.points[0]);
        for i in 1..=seg_count {
            let next = eval(self.points[i % n]);
            // a vertex exactly on the line counts as positive side
            if (prev >= 0.0) != (next >= 0.0) {
                count += 1;
            }
            prev = next;
        }
        count
    }
}

fn segments_overlap(s1: ([f64; 2], [f64; 2]), s2: ([f64; 2], [f64; 2])) -> bool {
    let d1 = [s1.1[0] - s1.0[0], s1.1[1] - s1.0[1]];
    let d2 = [s2.1[0] - s2.0[0], s2.1[1] - s2.0[1]];
    let cross = d1[0] * d2[1] - d1[1] * d2[0];
    if cross != 0.0 {
        return false;
    }
    // parallel: overlap needs collinearity and interval intersection
    let offset = [s2.0[0] - s1.0[0], s2.0[1] - s1.0[1]];
    if d1[0] * offset[1] - d1[1] * offset[0] != 0.0 {
        return false;
    }
    let dot = d1[0] * d1[0] + d1[1] * d1[1];
    let t0 = (offset[0] * d1[0] + offset[1] * d1[1]) / dot;
    let t1 = t0 + (d2[0] * d1[0] + d2[1] * d1[1]) / dot;
    let (lo, hi) = if t0 <= t1 { (t0, t1) } else { (t1, t0) };
    hi > 0.0 && lo < 1.0 && (hi - lo) > 1e-12
}

/// Monte Carlo estimate of the kinematic line integral over a curve.
#[derive(Debug, Clone, Copy)]
pub struct CroftonEstimate {
    /// Estimate of the integral of the crossing count over `dp dtheta`.
    pub integral: f64,
    pub std_error: f64,
    /// Exact polyline length.
    pub length: f64,
    /// `integral / length`; 2 for the kinematic measure, up to sampling
    /// error.
    pub ratio: f64,
    pub n_samples: usize,
    pub seed: u64,
}

/// Samples `(p, theta)` uniformly over `[-P, P] x [0, pi)` with `P` the
/// curve's bounding radius, counts crossings by sign-change isolation, and
/// scales the mean by the measure volume. Requires at least 10^4 samples.
pub fn crofton_lines(
    curve: &Curve,
    n_samples: usize,
    seed: u64,
) -> Result<CroftonEstimate, GeometryError> {
    if n_samples < 10_000 {
        return Err(GeometryError::TooFewSamples { n: n_samples });
    }
    let radius = curve.bounding_radius();
    let measure = 2.0 * radius * std::f64::consts::PI;

    let blocks = n_samples.div_ceil(BLOCK);
    let stats: Vec<(f64, f64)> = (0..blocks)
        .into_par_iter()
        .map(|block| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(block as u64 + 1);
            let lo = block * BLOCK;
            let hi = ((block + 1) * BLOCK).min(n_samples);
            let mut sum = 0.0;
            let mut sum_sq = 0.0;
            for _ in lo..hi {
                let theta = rng.gen_range(0.0..std::f64::consts::PI);
                let p = rng.gen_range(-radius..radius);
                let n = curve.crossings(theta.cos(), theta.sin(), p) as f64;
                sum += n;
                sum_sq += n * n;
            }
            (sum, sum_sq)
        })
        .collect();

    let (sum, sum_sq) = stats
        .iter()
        .fold((0.0, 0.0), |acc, s| (acc.0 + s.0, acc.1 + s.1));
    let n = n_samples as f64;
    let mean = sum / n;
    let variance = (sum_sq / n - mean * mean).max(0.0);
    let length = curve.length();
    Ok(CroftonEstimate {
        integral: mean * measure,
        std_error: (variance / n).sqrt() * measure,
        length,
        ratio: mean * measure / length,
        n_samples,
        seed,
    })
}

/// Periodic trigonometric polynomial
/// `g(x) = a0 + sum_k (a_k cos(kx) + b_k sin(kx))`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrigPoly {
    pub a0: f64,
    /// `(order, cos coefficient, sin coefficient)` terms.
    pub terms: Vec<(usize, f64, f64)>,
}

impl TrigPoly {
    pub fn zero() -> Self {
        TrigPoly::default()
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.a0
            + self
                .terms
                .iter()
                .map(|&(k, a, b)| {
                    let kx = k as f64 * x;
                    a * kx.cos() + b * kx.sin()
                })
                .sum::<f64>()
    }

    pub fn deriv(&self, x: f64) -> f64 {
        self.terms
            .iter()
            .map(|&(k, a, b)| {
                let kf = k as f64;
                let kx = kf * x;
                -a * kf * kx.sin() + b * kf * kx.cos()
            })
            .sum()
    }

    pub fn second_deriv(&self, x: f64) -> f64 {
        self.terms
            .iter()
            .map(|&(k, a, b)| {
                let kf = k as f64;
                let kx = kf * x;
                -a * kf * kf * kx.cos() - b * kf * kf * kx.sin()
            })
            .sum()
    }

    /// Arc length of the graph of `g'` over one period, by composite
    /// Simpson quadrature.
    pub fn derivative_graph_length(&self) -> f64 {
        let n = 4096usize;
        let h = 2.0 * std::f64::consts::PI / n as f64;
        let f = |x: f64| (1.0 + self.second_deriv(x).powi(2)).sqrt();
        let mut sum = f(0.0) + f(2.0 * std::f64::consts::PI);
        for i in 1..n {
            let w = if i.is_multiple_of(2) { 2.0 } else { 4.0 };
            sum += w * f(i as f64 * h);
        }
        sum * h / 3.0
    }
}

/// Basis function `i` of the tomograph family: `sin x, cos x, sin 2x,
/// cos 2x, ...`; its derivative evaluated at `x`.
fn basis_deriv(i: usize, x: f64) -> f64 {
    let k = (i / 2 + 1) as f64;
    if i.is_multiple_of(2) {
        // d/dx sin(kx)
        k * (k * x).cos()
    } else {
        -k * (k * x).sin()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct TomographCensus {
    pub mean_crossings: f64,
    pub max_crossings: u32,
    /// Fraction of samples with at least one zero flagged degenerate.
    pub degenerate_fraction: f64,
    /// Arc length of the graph of `g'`, for the specialized line-integral
    /// bound `mean <= const * length`.
    pub graph_length: f64,
    pub n_samples: usize,
    pub seed: u64,
}

/// Samples perturbation coefficients `s` uniformly in the radius-`r` ball
/// and counts nondegenerate zeros of `(f_s - g)'` on the circle, where
/// `f_s = sum_i s_i eta_i` over the trigonometric basis of size `d`.
pub fn tomograph_census(
    g: &TrigPoly,
    d: usize,
    r: f64,
    n_samples: usize,
    seed: u64,
) -> Result<TomographCensus, GeometryError> {
    if d < 2 {
        return Err(GeometryError::BasisTooSmall { d });
    }
    if !(r > 0.0) {
        return Err(GeometryError::BadRadius { r });
    }
    if n_samples == 0 {
        return Err(GeometryError::TooFewSamples { n: 0 });
    }
    let two_pi = 2.0 * std::f64::consts::PI;
    // panel-edge tables: basis derivatives and g' at the grid
    let xs: Vec<f64> = (0..=PANELS).map(|i| two_pi * i as f64 / PANELS as f64).collect();
    let basis_table: Vec<Vec<f64>> = (0..d)
        .map(|i| xs.iter().map(|&x| basis_deriv(i, x)).collect())
        .collect();
    let g_table: Vec<f64> = xs.iter().map(|&x| g.deriv(x)).collect();

    let blocks = n_samples.div_ceil(BLOCK);
    let results: Vec<(f64, u32, u64)> = (0..blocks)
        .into_par_iter()
        .map(|block| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(block as u64 + 1);
            let lo = block * BLOCK;
            let hi = ((block + 1) * BLOCK).min(n_samples);
            let mut sum = 0.0f64;
            let mut max_n = 0u32;
            let mut degenerate = 0u64;
            let mut values = vec![0.0f64; PANELS + 1];
            for _ in lo..hi {
                let s = sample_ball(&mut rng, d, r);
                for (j, v) in values.iter_mut().enumerate() {
                    let mut acc = -g_table[j];
                    for (i, &si) in s.iter().enumerate() {
                        acc += si * basis_table[i][j];
                    }
                    *v = acc;
                }
                let h = |x: f64| -> f64 {
                    let mut acc = -g.deriv(x);
                    for (i, &si) in s.iter().enumerate() {
                        acc += si * basis_deriv(i, x);
                    }
                    acc
                };
                let h2 = |x: f64| -> f64 {
                    let mut acc = -g.second_deriv(x);
                    for (i, &si) in s.iter().enumerate() {
                        acc += si * basis_second_deriv(i, x);
                    }
                    acc
                };
                let mut n = 0u32;
                let mut sample_degenerate = false;
                for j in 0..PANELS {
                    let (va, vb) = (values[j], values[j + 1]);
                    if (va >= 0.0) == (vb >= 0.0) {
                        continue;
                    }
                    let root = bisect_root(&h, xs[j], xs[j + 1], va);
                    if h2(root).abs() < DEGENERACY_TOL {
                        sample_degenerate = true;
                    } else {
                        n += 1;
                    }
                }
                sum += n as f64;
                max_n = max_n.max(n);
                if sample_degenerate {
                    degenerate += 1;
                }
            }
            (sum, max_n, degenerate)
        })
        .collect();

    let mut sum = 0.0;
    let mut max_n = 0u32;
    let mut degenerate = 0u64;
    for (s, m, dg) in results {
        sum += s;
        max_n = max_n.max(m);
        degenerate += dg;
    }
    Ok(TomographCensus {
        mean_crossings: sum / n_samples as f64,
        max_crossings: max_n,
        degenerate_fraction: degenerate as f64 / n_samples as f64,
        graph_length: g.derivative_graph_length(),
        n_samples,
        seed,
    })
}

fn basis_second_deriv(i: usize, x: f64) -> f64 {
    let k = (i / 2 + 1) as f64;
    if i.is_multiple_of(2) {
        -k * k * (k * x).sin()
    } else {
        -k * k * (k * x).cos()
    }
}

/// Uniform sample from the radius-`r` ball in dimension `d` (gaussian
/// direction, radial inverse transform).
fn sample_ball(rng: &mut impl Rng, d: usize, r: f64) -> Vec<f64> {
    loop {
        let gauss: Vec<f64> = (0..d)
            .map(|_| {
                // Box-Muller
                let u: f64 = rng.gen_range(f64::EPSILON..1.0);
                let v: f64 = rng.gen_range(0.0..2.0 * std::f64::consts::PI);
                (-2.0 * u.ln()).sqrt() * v.cos()
            })
            .collect();
        let norm = gauss.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.0 {
            let u: f64 = rng.gen_range(0.0f64..1.0);
            let scale = r * u.powf(1.0 / d as f64) / norm;
            return gauss.iter().map(|x| x * scale).collect();
        }
    }
}

fn bisect_root(f: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, f_lo: f64) -> f64 {
    let lo_positive = f_lo >= 0.0;
    while hi - lo > ROOT_TOL {
        let mid = 0.5 * (lo + hi);
        if (f(mid) >= 0.0) == lo_positive {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Report of the generator-count bound check on a complex.
#[derive(Debug, Clone, Copy)]
pub struct IntersectionBound {
    pub generators: u64,
    pub total_bars: u64,
    pub long_bars: u64,
    pub finite_bars: u64,
    pub infinite_bars: u64,
}

/// Checks `#generators >= #bars >= b_eps` and the pairing identity
/// `#generators = 2 #finite bars + #infinite bars` on a valid complex.
pub fn intersection_bound_check(
    complex: &FilteredComplex,
    eps: f64,
) -> Result<IntersectionBound, GeometryError> {
    let barcode = complex.reduce()?;
    let generators = complex.len() as u64;
    let total_bars = barcode.total_count();
    let long_bars = barcode.count_long_bars(eps)?;
    let finite_bars = barcode.finite_count();
    let infinite_bars = barcode.infinite_count();
    if !(generators >= total_bars && total_bars >= long_bars) {
        return Err(GeometryError::IntersectionBound {
            generators,
            bars: total_bars,
            long_bars,
        });
    }
    if generators != 2 * finite_bars + infinite_bars {
        return Err(GeometryError::PairingIdentity {
            generators,
            finite: finite_bars,
            infinite: infinite_bars,
        });
    }
    Ok(IntersectionBound {
        generators,
        total_bars,
        long_bars,
        finite_bars,
        infinite_bars,
    })
}
