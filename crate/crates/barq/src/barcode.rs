//! Bars and barcodes: finitely-supported interval multisets with the
//! module-level operations (truncation, reparametrization, shift) and the
//! bar-counting functions used by the entropy estimators.
//!
//! Every bar is the half-open interval `[birth, death)` with `death`
//! possibly infinite. A parameter value `t` is covered by a bar when
//! `birth <= t < death`, which makes the pointwise dimension agree with the
//! standard output of the persistence algorithm. Zero-length bars are
//! collapsed away at construction; `birth > death` is an error.

use std::fmt;

use thiserror::Error;

use crate::monotone::{MapError, MonotoneMap};

#[derive(Debug, Error, PartialEq)]
pub enum BarcodeError {
    #[error("bar has birth {birth} > death {death}")]
    InvertedBar { birth: f64, death: f64 },
    #[error("bar endpoint is not a number (birth {birth}, death {death})")]
    NanEndpoint { birth: f64, death: f64 },
    #[error("bar birth must be finite, got {birth}")]
    InfiniteBirth { birth: f64 },
    #[error("bar multiplicity must be at least 1")]
    ZeroMultiplicity,
    #[error("epsilon must be positive, got {eps}")]
    NonPositiveEpsilon { eps: f64 },
    #[error("rank_between requires s <= t, got s = {s}, t = {t}")]
    InvertedInterval { s: f64, t: f64 },
    #[error("census requires t > 0, got {t}")]
    NonPositiveCensusTime { t: f64 },
    #[error("reparametrization map: {0}")]
    Map(#[from] MapError),
}

/// A half-open interval `[birth, death)` with a positive multiplicity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bar {
    birth: f64,
    death: f64,
    multiplicity: u64,
}

impl Bar {
    /// A finite or infinite bar; `death = f64::INFINITY` encodes an
    /// infinite bar. Fails on `birth > death`, NaN endpoints, an infinite
    /// birth, or multiplicity zero.
    pub fn new(birth: f64, death: f64, multiplicity: u64) -> Result<Self, BarcodeError> {
        if birth.is_nan() || death.is_nan() {
            return Err(BarcodeError::NanEndpoint { birth, death });
        }
        if !birth.is_finite() {
            return Err(BarcodeError::InfiniteBirth { birth });
        }
        if birth > death {
            return Err(BarcodeError::InvertedBar { birth, death });
        }
        if multiplicity == 0 {
            return Err(BarcodeError::ZeroMultiplicity);
        }
        Ok(Bar {
            birth,
            death,
            multiplicity,
        })
    }

    pub fn birth(&self) -> f64 {
        self.birth
    }

    pub fn death(&self) -> f64 {
        self.death
    }

    pub fn multiplicity(&self) -> u64 {
        self.multiplicity
    }

    pub fn is_infinite(&self) -> bool {
        self.death == f64::INFINITY
    }

    /// `death - birth`; infinite for infinite bars.
    pub fn length(&self) -> f64 {
        self.death - self.birth
    }
}

impl fmt::Display for Bar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinite() {
            write!(f, "[{}, inf) x{}", self.birth, self.multiplicity)
        } else {
            write!(f, "[{}, {}) x{}", self.birth, self.death, self.multiplicity)
        }
    }
}

/// A finite multiset of bars, canonically sorted by `(birth, death)` with
/// equal intervals merged into one entry. Immutable after construction;
/// equality is exact multiset equality (callers needing tolerance use the
/// bottleneck distance instead).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Barcode {
    bars: Vec<Bar>,
}

impl Barcode {
    /// Builds the canonical form: zero-length bars are dropped, equal
    /// intervals merged, and the result sorted by `(birth, death)`.
    pub fn new(bars: impl IntoIterator<Item = Bar>) -> Self {
        let mut bars: Vec<Bar> = bars.into_iter().filter(|b| b.birth < b.death).collect();
        bars.sort_by(|a, b| {
            a.birth
                .total_cmp(&b.birth)
                .then(a.death.total_cmp(&b.death))
        });
        let mut merged: Vec<Bar> = Vec::with_capacity(bars.len());
        for bar in bars {
            match merged.last_mut() {
                Some(last) if last.birth == bar.birth && last.death == bar.death => {
                    last.multiplicity += bar.multiplicity;
                }
                _ => merged.push(bar),
            }
        }
        Barcode { bars: merged }
    }

    /// Convenience constructor from `(birth, death)` pairs, multiplicity 1 each.
    pub fn from_intervals(
        intervals: impl IntoIterator<Item = (f64, f64)>,
    ) -> Result<Self, BarcodeError> {
        let bars: Vec<Bar> = intervals
            .into_iter()
            .map(|(b, d)| Bar::new(b, d, 1))
            .collect::<Result<_, _>>()?;
        Ok(Barcode::new(bars))
    }

    pub fn empty() -> Self {
        Barcode::default()
    }

    pub fn bars(&self) -> &[Bar] {
        &self.bars
    }

    pub fn is_empty(&self) -> bool {
        self.bars.is_empty()
    }

    /// Total multiplicity over all bars.
    pub fn total_count(&self) -> u64 {
        self.bars.iter().map(|b| b.multiplicity).sum()
    }

    pub fn finite_count(&self) -> u64 {
        self.bars
            .iter()
            .filter(|b| !b.is_infinite())
            .map(|b| b.multiplicity)
            .sum()
    }

    pub fn infinite_count(&self) -> u64 {
        self.bars
            .iter()
            .filter(|b| b.is_infinite())
            .map(|b| b.multiplicity)
            .sum()
    }

    /// Dimension of the module at parameter `t`: total multiplicity of bars
    /// with `birth <= t < death`.
    pub fn dim_at(&self, t: f64) -> u64 {
        self.bars
            .iter()
            .filter(|b| b.birth <= t && t < b.death)
            .map(|b| b.multiplicity)
            .sum()
    }

    /// Rank of the structure map from parameter `s` to `t`: total
    /// multiplicity of bars containing `[s, t]`.
    pub fn rank_between(&self, s: f64, t: f64) -> Result<u64, BarcodeError> {
        if !(s <= t) {
            return Err(BarcodeError::InvertedInterval { s, t });
        }
        Ok(self
            .bars
            .iter()
            .filter(|b| b.birth <= s && b.death > t)
            .map(|b| b.multiplicity)
            .sum())
    }

    /// The barcode of the module truncated at `level`: each bar is clipped
    /// against `(-inf, level)` and collapsed bars are dropped.
    pub fn truncate(&self, level: f64) -> Barcode {
        Barcode::new(self.bars.iter().filter(|b| b.birth < level).map(|b| Bar {
            birth: b.birth,
            death: b.death.min(level),
            multiplicity: b.multiplicity,
        }))
    }

    /// The barcode of the module shifted by `c`: every bar `[a, d)` becomes
    /// `[a - c, d - c)`; infinite deaths stay infinite.
    pub fn shift(&self, c: f64) -> Barcode {
        Barcode::new(self.bars.iter().map(|b| Bar {
            birth: b.birth - c,
            death: if b.is_infinite() {
                f64::INFINITY
            } else {
                b.death - c
            },
            multiplicity: b.multiplicity,
        }))
    }

    /// The barcode of the action reparametrization by `map`: each bar is
    /// pulled back through the map, i.e. `[a, d)` becomes
    /// `[map^-1(a), map^-1(d))`. The map must be strictly increasing and its
    /// range must cover every bar endpoint; an infinite death survives only
    /// when the map is onto an unbounded-above range.
    pub fn reparametrize(&self, map: &MonotoneMap) -> Result<Barcode, BarcodeError> {
        map.check_increasing()?;
        let mut out = Vec::with_capacity(self.bars.len());
        for bar in &self.bars {
            let birth = map.invert(bar.birth)?;
            let death = if bar.is_infinite() {
                if map.range_unbounded_above() {
                    f64::INFINITY
                } else {
                    return Err(BarcodeError::Map(MapError::OutOfRange {
                        value: f64::INFINITY,
                    }));
                }
            } else {
                map.invert(bar.death)?
            };
            out.push(Bar {
                birth,
                death,
                multiplicity: bar.multiplicity,
            });
        }
        Ok(Barcode::new(out))
    }

    /// b_eps: total multiplicity of bars with length >= `eps` (infinite bars
    /// always count).
    pub fn count_long_bars(&self, eps: f64) -> Result<u64, BarcodeError> {
        if !(eps > 0.0) {
            return Err(BarcodeError::NonPositiveEpsilon { eps });
        }
        Ok(self
            .bars
            .iter()
            .filter(|b| b.length() >= eps)
            .map(|b| b.multiplicity)
            .sum())
    }

    /// Prefix variant of `count_long_bars`: bars with length >= `eps` and
    /// birth at most `t`.
    pub fn count_prefix_bars(&self, eps: f64, t: f64) -> Result<u64, BarcodeError> {
        if !(eps > 0.0) {
            return Err(BarcodeError::NonPositiveEpsilon { eps });
        }
        Ok(self
            .bars
            .iter()
            .filter(|b| b.length() >= eps && b.birth <= t)
            .map(|b| b.multiplicity)
            .sum())
    }

    /// Partitions the bars with birth in `(0, t]` by length against `eps`
    /// and death against `t`. See [`TypeCensus`].
    pub fn type_census(&self, eps: f64, t: f64) -> Result<TypeCensus, BarcodeError> {
        if !(eps > 0.0) {
            return Err(BarcodeError::NonPositiveEpsilon { eps });
        }
        if !(t > 0.0) {
            return Err(BarcodeError::NonPositiveCensusTime { t });
        }
        let mut census = TypeCensus::default();
        for b in &self.bars {
            if !(b.birth > 0.0 && b.birth <= t) {
                continue;
            }
            let long = b.length() >= eps;
            let crossing = b.death > t;
            let slot = match (long, crossing) {
                (true, true) => &mut census.long_crossing,
                (true, false) => &mut census.long_closed,
                (false, true) => &mut census.short_crossing,
                (false, false) => &mut census.short_closed,
            };
            *slot += b.multiplicity;
        }
        Ok(census)
    }

    /// All endpoint actions as a multiset: finite births and deaths, plus
    /// births of infinite bars. Sorted ascending.
    pub fn endpoint_actions(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for b in &self.bars {
            for _ in 0..b.multiplicity {
                out.push(b.birth);
                if !b.is_infinite() {
                    out.push(b.death);
                }
            }
        }
        out.sort_by(f64::total_cmp);
        out
    }
}

/// Counts of bars with birth in `(0, t]`, split by length against `eps` and
/// by whether the bar survives past `t`. The four counts partition the bars
/// born in the window, so their sum equals the number of such bars.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct TypeCensus {
    /// Length >= eps, death > t.
    pub long_crossing: u64,
    /// Length >= eps, death <= t.
    pub long_closed: u64,
    /// Length < eps, death > t.
    pub short_crossing: u64,
    /// Length < eps, death <= t.
    pub short_closed: u64,
}

impl TypeCensus {
    pub fn total(&self) -> u64 {
        self.long_crossing + self.long_closed + self.short_crossing + self.short_closed
    }

    pub fn as_tuple(&self) -> (u64, u64, u64, u64) {
        (
            self.long_crossing,
            self.long_closed,
            self.short_crossing,
            self.short_closed,
        )
    }
}
