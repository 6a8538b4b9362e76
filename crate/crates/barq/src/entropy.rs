//! Growth-rate estimators for bar counts over scaling families.
//!
//! The quantity of interest is the exponential growth rate in `t` of the
//! number of bars of length at least `eps` in the truncated barcode, and
//! its limit as `eps` shrinks. On finite data the limsup is realized as the
//! maximum of sliding-window regression slopes of `log(count)` over the
//! last half of the schedule, with the window defaulting to that whole last
//! half; `log+` clamps rates at zero. The `eps -> 0` limit is reported as a
//! monotone table plus the smallest-eps value, never extrapolated.
//!
//! Two normalizations coexist and the report records which one produced
//! each number: truncation families regress against the truncation level
//! `t`, Hamiltonian scaling families against `s * T` (slope-normalized
//! scale). Family members reduce and count independently in parallel; the
//! report assembly is sequential and deterministic.

use std::sync::Arc;

use rayon::prelude::*;
use thiserror::Error;

use crate::barcode::{Barcode, BarcodeError};
use crate::complex::{FilteredComplex, SplitError, Violation};
use crate::profile::{ConvexProfile, ProfileError};
use crate::spectrum::{complex_from_spectrum, ChordSpectrum, SpectrumError, SpectrumModel};

/// Calibration families are expected to keep rate inversions under this
/// slack: pointwise count monotonicity in `eps` is exact, but fitted slopes
/// of nested count tables can cross by a finite-sample margin.
pub const RATE_MONOTONICITY_SLACK: f64 = 0.01;

#[derive(Debug, Error, PartialEq)]
pub enum EntropyError {
    #[error("growth window must contain at least 3 points with positive counts, found {found}")]
    TooFewPoints { found: usize },
    #[error("epsilon grid must be positive and strictly decreasing")]
    BadEpsGrid,
    #[error("schedule must be strictly increasing, offending value {value}")]
    BadSchedule { value: f64 },
    #[error("scaling family is empty")]
    EmptyFamily,
    #[error("family member `{label}`: {source}")]
    Member {
        label: String,
        source: Violation,
    },
    #[error("family member `{label}` split: {source}")]
    MemberSplit {
        label: String,
        source: SplitError,
    },
    #[error("positive-part analysis needs complexes, member `{label}` is a bare barcode")]
    NotAComplexMember { label: String },
    #[error(
        "threshold rule gave {tau} outside (0, {s_min}) for member `{label}`"
    )]
    ThresholdOutOfWindow { label: String, tau: f64, s_min: f64 },
    #[error("member `{label}` has no positive-action generator to place a threshold under")]
    NoPositiveAction { label: String },
    #[error("internal: count table not monotone in eps at member {index}")]
    NonMonotoneCounts { index: usize },
    #[error(
        "internal: count sandwich violated for member `{label}` at eps {eps}: \
         b_2eps = {double_count} vs {single_count} + {low_bars}"
    )]
    CountSandwichViolated {
        label: String,
        eps: f64,
        double_count: u64,
        single_count: u64,
        low_bars: u64,
    },
    #[error(transparent)]
    Barcode(#[from] BarcodeError),
    #[error(transparent)]
    Profile(#[from] ProfileError),
    #[error(transparent)]
    Spectrum(#[from] SpectrumError),
}

/// Least-squares fit of `log(count)` against the abscissa.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthFit {
    /// Slope clamped below at zero (the `log+` convention).
    pub rate: f64,
    /// Root-mean-square residual of the fit.
    pub residual: f64,
    pub window: (f64, f64),
    pub points_used: usize,
}

/// Regression slope of `log(n)` over the points with `n >= 1` falling in
/// `window`, clamped at zero. Needs at least three usable points.
pub fn growth_rate(counts: &[(f64, u64)], window: (f64, f64)) -> Result<GrowthFit, EntropyError> {
    let pts: Vec<(f64, f64)> = counts
        .iter()
        .filter(|(t, n)| *t >= window.0 && *t <= window.1 && *n >= 1)
        .map(|(t, n)| (*t, (*n as f64).ln()))
        .collect();
    if pts.len() < 3 {
        return Err(EntropyError::TooFewPoints { found: pts.len() });
    }
    let n = pts.len() as f64;
    let mean_t = pts.iter().map(|(t, _)| t).sum::<f64>() / n;
    let mean_y = pts.iter().map(|(_, y)| y).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|(t, _)| (t - mean_t) * (t - mean_t)).sum();
    let sxy: f64 = pts
        .iter()
        .map(|(t, y)| (t - mean_t) * (y - mean_y))
        .sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = mean_y - slope * mean_t;
    let ss: f64 = pts
        .iter()
        .map(|(t, y)| {
            let r = y - (slope * t + intercept);
            r * r
        })
        .sum();
    Ok(GrowthFit {
        rate: slope.max(0.0),
        residual: (ss / n).sqrt(),
        window: (pts[0].0, pts[pts.len() - 1].0),
        points_used: pts.len(),
    })
}

/// Finite-data limsup: maximum sliding-window slope over the last half of
/// the schedule. `window_len` is the number of points per window and
/// defaults to the whole last half.
pub fn limsup_rate(
    counts: &[(f64, u64)],
    window_len: Option<usize>,
) -> Result<GrowthFit, EntropyError> {
    let n = counts.len();
    let tail_start = n / 2;
    let tail = &counts[tail_start.min(n.saturating_sub(3))..];
    let w = window_len.unwrap_or(tail.len()).clamp(3, tail.len().max(3));
    if tail.len() < 3 {
        return Err(EntropyError::TooFewPoints { found: tail.len() });
    }
    let mut best: Option<GrowthFit> = None;
    for start in 0..=(tail.len() - w) {
        let slice = &tail[start..start + w];
        let window = (slice[0].0, slice[slice.len() - 1].0);
        match growth_rate(counts, window) {
            Ok(fit) => {
                if best.is_none_or(|b| fit.rate > b.rate) {
                    best = Some(fit);
                }
            }
            Err(EntropyError::TooFewPoints { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    best.ok_or(EntropyError::TooFewPoints { found: 0 })
}

/// Which abscissa the rates are measured against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Normalization {
    /// Exponential growth in the truncation level `t`.
    TruncationTime,
    /// Exponential growth in `s * slope(H)` over a Hamiltonian scaling
    /// schedule.
    SlopeTime,
}

impl Normalization {
    pub fn label(&self) -> &'static str {
        match self {
            Normalization::TruncationTime => "truncation-time",
            Normalization::SlopeTime => "slope-time",
        }
    }
}

#[derive(Debug, Clone)]
pub enum BarcodeSource {
    Ready(Barcode),
    Complex(Arc<FilteredComplex>),
}

#[derive(Debug, Clone)]
pub struct FamilyMember {
    pub label: String,
    /// Regression abscissa: `t` or `s * T` depending on the normalization.
    pub x: f64,
    /// Barcodes are truncated here before counting.
    pub truncation: f64,
    pub source: BarcodeSource,
}

impl FamilyMember {
    fn barcode(&self) -> Result<Barcode, EntropyError> {
        match &self.source {
            BarcodeSource::Ready(b) => Ok(b.clone()),
            BarcodeSource::Complex(c) => c.reduce().map_err(|source| EntropyError::Member {
                label: self.label.clone(),
                source,
            }),
        }
    }

    fn complex(&self) -> Result<&FilteredComplex, EntropyError> {
        match &self.source {
            BarcodeSource::Complex(c) => Ok(c),
            BarcodeSource::Ready(_) => Err(EntropyError::NotAComplexMember {
                label: self.label.clone(),
            }),
        }
    }
}

/// An increasing family of barcode sources with truncation levels.
#[derive(Debug, Clone)]
pub struct ScalingFamily {
    members: Vec<FamilyMember>,
    normalization: Normalization,
    /// Sliding-window length override for the limsup estimator.
    pub window_len: Option<usize>,
}

impl ScalingFamily {
    pub fn from_members(
        members: Vec<FamilyMember>,
        normalization: Normalization,
    ) -> Result<Self, EntropyError> {
        if members.is_empty() {
            return Err(EntropyError::EmptyFamily);
        }
        for w in members.windows(2) {
            if !(w[1].x > w[0].x) {
                return Err(EntropyError::BadSchedule { value: w[1].x });
            }
        }
        Ok(ScalingFamily {
            members,
            normalization,
            window_len: None,
        })
    }

    /// One shared barcode truncated at an increasing schedule of levels.
    pub fn truncation_family(
        barcode: Barcode,
        levels: &[f64],
    ) -> Result<Self, EntropyError> {
        let members = levels
            .iter()
            .map(|&t| FamilyMember {
                label: format!("t={t}"),
                x: t,
                truncation: t,
                source: BarcodeSource::Ready(barcode.clone()),
            })
            .collect();
        ScalingFamily::from_members(members, Normalization::TruncationTime)
    }

    /// One shared complex truncated at an increasing schedule of levels.
    pub fn complex_truncation_family(
        complex: FilteredComplex,
        levels: &[f64],
    ) -> Result<Self, EntropyError> {
        let shared = Arc::new(complex);
        let members = levels
            .iter()
            .map(|&t| FamilyMember {
                label: format!("t={t}"),
                x: t,
                truncation: t,
                source: BarcodeSource::Complex(Arc::clone(&shared)),
            })
            .collect();
        ScalingFamily::from_members(members, Normalization::TruncationTime)
    }

    /// A Hamiltonian scaling family: for each scale `s` the spectrum is
    /// pushed through the scaled profile (lengths up to `s T` become
    /// actions), built into a complex, and truncated at `s B`. The
    /// abscissa is `s T`.
    pub fn profile_scaling_family(
        spectrum: &ChordSpectrum,
        profile: &ConvexProfile,
        schedule: &[f64],
        model: SpectrumModel,
        zero_action_count: usize,
    ) -> Result<Self, EntropyError> {
        let mut members = Vec::with_capacity(schedule.len());
        for &s in schedule {
            let scaled = profile.scaled(s)?;
            let (actions, _dropped) = scaled.spectrum_to_actions(spectrum);
            let complex = complex_from_spectrum(&actions, model, zero_action_count)?;
            members.push(FamilyMember {
                label: format!("s={s}"),
                x: scaled.slope(),
                truncation: scaled.action_bound(),
                source: BarcodeSource::Complex(Arc::new(complex)),
            });
        }
        ScalingFamily::from_members(members, Normalization::SlopeTime)
    }

    pub fn members(&self) -> &[FamilyMember] {
        &self.members
    }

    pub fn normalization(&self) -> Normalization {
        self.normalization
    }
}

/// Per-eps row of an entropy report.
#[derive(Debug, Clone)]
pub struct EpsRow {
    pub eps: f64,
    pub rate: f64,
    pub window: (f64, f64),
    pub residual: f64,
    pub counts: Vec<u64>,
}

/// Growth-rate table over an eps grid, with the smallest-eps rate as the
/// headline. The table is reported as-is; the true eps -> 0 limit is never
/// extrapolated.
#[derive(Debug, Clone)]
pub struct EntropyReport {
    pub normalization: Normalization,
    pub xs: Vec<f64>,
    pub rows: Vec<EpsRow>,
    pub headline: f64,
    /// Largest decrease of the fitted rate as eps shrinks (0 when the
    /// per-eps rates are monotone as the module structure predicts); a
    /// finite-sample diagnostic, small on clean families.
    pub max_rate_inversion: f64,
}

impl EntropyReport {
    pub fn row_for(&self, eps: f64) -> Option<&EpsRow> {
        self.rows.iter().find(|r| r.eps == eps)
    }
}

/// Counts `b_eps(truncate(B_n, level_n))` for each member and eps, fits the
/// growth rate per eps, and assembles the report. The eps grid must be
/// positive and strictly decreasing; the headline is the smallest-eps rate.
pub fn barcode_entropy(
    family: &ScalingFamily,
    eps_grid: &[f64],
) -> Result<EntropyReport, EntropyError> {
    validate_eps_grid(eps_grid)?;
    let truncated: Vec<Barcode> = family
        .members
        .par_iter()
        .map(|m| m.barcode().map(|b| b.truncate(m.truncation)))
        .collect::<Result<_, _>>()?;
    report_from_truncated(family, eps_grid, &truncated)
}

fn report_from_truncated(
    family: &ScalingFamily,
    eps_grid: &[f64],
    truncated: &[Barcode],
) -> Result<EntropyReport, EntropyError> {
    let xs: Vec<f64> = family.members.iter().map(|m| m.x).collect();
    let mut rows: Vec<EpsRow> = Vec::with_capacity(eps_grid.len());
    for &eps in eps_grid {
        let counts: Vec<u64> = truncated
            .iter()
            .map(|b| b.count_long_bars(eps))
            .collect::<Result<_, _>>()?;
        let points: Vec<(f64, u64)> = xs.iter().copied().zip(counts.iter().copied()).collect();
        // too few positive counts is no evidence of exponential growth;
        // the log+ convention reads that as rate zero
        let fit = match limsup_rate(&points, family.window_len) {
            Ok(fit) => fit,
            Err(EntropyError::TooFewPoints { .. }) => GrowthFit {
                rate: 0.0,
                residual: 0.0,
                window: (xs[0], xs[xs.len() - 1]),
                points_used: 0,
            },
            Err(e) => return Err(e),
        };
        rows.push(EpsRow {
            eps,
            rate: fit.rate,
            window: fit.window,
            residual: fit.residual,
            counts,
        });
    }
    // count tables are nested in eps exactly; a violation is a kernel bug
    let mut max_rate_inversion = 0.0f64;
    for pair in rows.windows(2) {
        for (i, (larger, smaller)) in pair[0].counts.iter().zip(&pair[1].counts).enumerate() {
            if smaller < larger {
                return Err(EntropyError::NonMonotoneCounts { index: i });
            }
        }
        max_rate_inversion = max_rate_inversion.max(pair[0].rate - pair[1].rate);
    }
    let headline = rows.last().map(|r| r.rate).unwrap_or(0.0);
    Ok(EntropyReport {
        normalization: family.normalization,
        xs,
        rows,
        headline,
        max_rate_inversion,
    })
}

fn validate_eps_grid(eps_grid: &[f64]) -> Result<(), EntropyError> {
    if eps_grid.is_empty() || eps_grid.iter().any(|e| !(*e > 0.0)) {
        return Err(EntropyError::BadEpsGrid);
    }
    for w in eps_grid.windows(2) {
        if !(w[1] < w[0]) {
            return Err(EntropyError::BadEpsGrid);
        }
    }
    Ok(())
}

/// Rule choosing the split threshold strictly between 0 and the smallest
/// positive generator action of each member.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ThresholdRule {
    /// Midpoint of the admissible window.
    MidSmallestPositive,
    /// `fraction * s_min` with `0 < fraction < 1`.
    FractionOfSmallestPositive(f64),
    /// A fixed value, validated against each member's window.
    Fixed(f64),
}

impl ThresholdRule {
    fn threshold(&self, label: &str, s_min: f64) -> Result<f64, EntropyError> {
        let tau = match *self {
            ThresholdRule::MidSmallestPositive => 0.5 * s_min,
            ThresholdRule::FractionOfSmallestPositive(f) => f * s_min,
            ThresholdRule::Fixed(tau) => tau,
        };
        if tau > 0.0 && tau < s_min {
            Ok(tau)
        } else {
            Err(EntropyError::ThresholdOutOfWindow {
                label: label.to_string(),
                tau,
                s_min,
            })
        }
    }
}

/// Per-eps comparison between the full and positive-part rates.
#[derive(Debug, Clone, Copy)]
pub struct ChainCheck {
    pub eps: f64,
    pub full_rate: f64,
    pub positive_rate_at_double: f64,
    pub positive_rate_at_half: f64,
    /// `rate+(2 eps) <= rate(eps) <= rate+(eps / 2)` within tolerance.
    pub holds: bool,
}

#[derive(Debug, Clone)]
pub struct PositivePartReport {
    pub full: EntropyReport,
    pub positive: EntropyReport,
    pub chain: Vec<ChainCheck>,
    /// Largest violation of the chain inequalities, clamped at zero.
    pub max_chain_deviation: f64,
}

/// Splits every member just below its smallest positive action, computes
/// entropy for the full barcodes and for the quotient (positive-part)
/// barcodes, and checks the rate chain
/// `rate+(2 eps) <= rate(eps) <= rate+(eps / 2)` within `tol` on the grid.
/// Count-level exact inequalities (`b_{2eps} <= b+_eps + c` and
/// `b+_{2eps} <= b_eps + c`, with `c` the bar count of the low part) are
/// asserted per member along the way.
pub fn positive_part_entropy(
    family: &ScalingFamily,
    rule: ThresholdRule,
    eps_grid: &[f64],
    tol: f64,
) -> Result<PositivePartReport, EntropyError> {
    validate_eps_grid(eps_grid)?;
    struct MemberSplit {
        full: Barcode,
        positive: Barcode,
        low_bar_count: u64,
    }
    let splits: Vec<MemberSplit> = family
        .members
        .par_iter()
        .map(|m| -> Result<MemberSplit, EntropyError> {
            let complex = m.complex()?;
            let s_min =
                complex
                    .min_positive_action()
                    .ok_or_else(|| EntropyError::NoPositiveAction {
                        label: m.label.clone(),
                    })?;
            let tau = rule.threshold(&m.label, s_min)?;
            let triangle = complex.split_at(tau).map_err(|source| {
                EntropyError::MemberSplit {
                    label: m.label.clone(),
                    source,
                }
            })?;
            let full = complex.reduce().map_err(|source| EntropyError::Member {
                label: m.label.clone(),
                source,
            })?;
            let positive = triangle
                .quotient
                .reduce()
                .map_err(|source| EntropyError::Member {
                    label: m.label.clone(),
                    source,
                })?;
            let low = triangle
                .low
                .reduce()
                .map_err(|source| EntropyError::Member {
                    label: m.label.clone(),
                    source,
                })?;
            Ok(MemberSplit {
                full,
                positive,
                low_bar_count: low.total_count(),
            })
        })
        .collect::<Result<_, _>>()?;

    // exact count inequalities from the two exact triangles, per member
    for (m, s) in family.members.iter().zip(&splits) {
        let full_t = s.full.truncate(m.truncation);
        let pos_t = s.positive.truncate(m.truncation);
        let c = s.low_bar_count;
        for &eps in eps_grid {
            let f2 = full_t.count_long_bars(2.0 * eps)?;
            let p2 = pos_t.count_long_bars(2.0 * eps)?;
            let f1 = full_t.count_long_bars(eps)?;
            let p1 = pos_t.count_long_bars(eps)?;
            if f2 > p1 + c {
                return Err(EntropyError::CountSandwichViolated {
                    label: m.label.clone(),
                    eps,
                    double_count: f2,
                    single_count: p1,
                    low_bars: c,
                });
            }
            if p2 > f1 + c {
                return Err(EntropyError::CountSandwichViolated {
                    label: m.label.clone(),
                    eps,
                    double_count: p2,
                    single_count: f1,
                    low_bars: c,
                });
            }
        }
    }

    let full_truncated: Vec<Barcode> = family
        .members
        .iter()
        .zip(&splits)
        .map(|(m, s)| s.full.truncate(m.truncation))
        .collect();
    let positive_truncated: Vec<Barcode> = family
        .members
        .iter()
        .zip(&splits)
        .map(|(m, s)| s.positive.truncate(m.truncation))
        .collect();

    // the chain needs rates at 2 eps and eps / 2 as well
    let mut extended: Vec<f64> = Vec::new();
    for &e in eps_grid {
        extended.extend([2.0 * e, e, 0.5 * e]);
    }
    extended.sort_by(|a, b| b.total_cmp(a));
    extended.dedup();

    let full = report_from_truncated(family, &extended, &full_truncated)?;
    let positive = report_from_truncated(family, &extended, &positive_truncated)?;

    let mut chain = Vec::with_capacity(eps_grid.len());
    let mut max_dev = 0.0f64;
    for &eps in eps_grid {
        let full_rate = full.row_for(eps).expect("on extended grid").rate;
        let plus_2e = positive.row_for(2.0 * eps).expect("on extended grid").rate;
        let plus_half = positive.row_for(0.5 * eps).expect("on extended grid").rate;
        let holds = plus_2e <= full_rate + tol && full_rate <= plus_half + tol;
        max_dev = max_dev
            .max(plus_2e - full_rate)
            .max(full_rate - plus_half);
        chain.push(ChainCheck {
            eps,
            full_rate,
            positive_rate_at_double: plus_2e,
            positive_rate_at_half: plus_half,
            holds,
        });
    }

    // restrict the reports to the requested grid
    let restrict = |report: &EntropyReport| EntropyReport {
        normalization: report.normalization,
        xs: report.xs.clone(),
        rows: eps_grid
            .iter()
            .map(|&e| report.row_for(e).expect("on extended grid").clone())
            .collect(),
        headline: report
            .row_for(*eps_grid.last().expect("nonempty grid"))
            .expect("on extended grid")
            .rate,
        max_rate_inversion: report.max_rate_inversion,
    };

    Ok(PositivePartReport {
        full: restrict(&full),
        positive: restrict(&positive),
        chain,
        max_chain_deviation: max_dev.max(0.0),
    })
}
