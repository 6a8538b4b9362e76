//! Strictly increasing real maps used for action reparametrization.
//!
//! Maps arrive either as piecewise-linear tables (inverted exactly segment
//! by segment) or as bracketed monotone callables (inverted by bisection to
//! 1e-12 absolute tolerance), since reparametrization functions of convex
//! profiles are only available numerically.

use std::fmt;

use thiserror::Error;

/// Bisection tolerance for inverting callable maps.
pub const INVERT_TOL: f64 = 1e-12;

const MONOTONICITY_SAMPLES: usize = 257;

#[derive(Debug, Error, PartialEq)]
pub enum MapError {
    #[error("map is not strictly increasing near {at}")]
    NotIncreasing { at: f64 },
    #[error("piecewise-linear table needs at least two knots")]
    TooFewKnots,
    #[error("value {value} is outside the range of the map")]
    OutOfRange { value: f64 },
}

enum Repr {
    /// `t -> slope * t + offset` on the whole line, inverted exactly.
    Linear { slope: f64, offset: f64 },
    /// Knots `(t, f(t))`, strictly increasing in both coordinates.
    PiecewiseLinear(Vec<(f64, f64)>),
    /// A monotone callable together with its domain; either end may be
    /// infinite, in which case inversion brackets the target by expanding
    /// from the finite side.
    Callable {
        f: Box<dyn Fn(f64) -> f64 + Send + Sync>,
        domain: (f64, f64),
    },
}

/// A continuous strictly increasing map between real intervals.
pub struct MonotoneMap {
    repr: Repr,
}

impl fmt::Debug for MonotoneMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            Repr::Linear { slope, offset } => f
                .debug_struct("MonotoneMap")
                .field("slope", slope)
                .field("offset", offset)
                .finish(),
            Repr::PiecewiseLinear(knots) => {
                f.debug_struct("MonotoneMap").field("knots", knots).finish()
            }
            Repr::Callable { domain, .. } => f
                .debug_struct("MonotoneMap")
                .field("callable_on", domain)
                .finish(),
        }
    }
}

impl MonotoneMap {
    pub fn identity() -> Self {
        MonotoneMap::linear(1.0, 0.0)
    }

    /// `t -> slope * t + offset` with `slope > 0`, on the whole line.
    pub fn linear(slope: f64, offset: f64) -> Self {
        assert!(slope > 0.0, "linear map needs positive slope");
        MonotoneMap {
            repr: Repr::Linear { slope, offset },
        }
    }

    pub fn piecewise_linear(knots: Vec<(f64, f64)>) -> Result<Self, MapError> {
        if knots.len() < 2 {
            return Err(MapError::TooFewKnots);
        }
        for w in knots.windows(2) {
            if !(w[1].0 > w[0].0 && w[1].1 > w[0].1) {
                return Err(MapError::NotIncreasing { at: w[0].0 });
            }
        }
        Ok(MonotoneMap {
            repr: Repr::PiecewiseLinear(knots),
        })
    }

    pub fn from_fn(
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        domain: (f64, f64),
    ) -> Self {
        MonotoneMap {
            repr: Repr::Callable {
                f: Box::new(f),
                domain,
            },
        }
    }

    pub fn domain(&self) -> (f64, f64) {
        match &self.repr {
            Repr::Linear { .. } => (f64::NEG_INFINITY, f64::INFINITY),
            Repr::PiecewiseLinear(knots) => (knots[0].0, knots[knots.len() - 1].0),
            Repr::Callable { domain, .. } => *domain,
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        match &self.repr {
            Repr::Linear { slope, offset } => slope * t + offset,
            Repr::PiecewiseLinear(knots) => {
                let n = knots.len();
                // clamp outside the table; invert() checks range separately
                if t <= knots[0].0 {
                    return knots[0].1;
                }
                if t >= knots[n - 1].0 {
                    return knots[n - 1].1;
                }
                let idx = knots.partition_point(|k| k.0 <= t) - 1;
                let (t0, y0) = knots[idx];
                let (t1, y1) = knots[idx + 1];
                y0 + (y1 - y0) * (t - t0) / (t1 - t0)
            }
            Repr::Callable { f, .. } => f(t),
        }
    }

    /// True when values above any bound are attained, so that an infinite
    /// bar endpoint pulls back to infinity.
    pub fn range_unbounded_above(&self) -> bool {
        match &self.repr {
            Repr::Linear { .. } => true,
            Repr::PiecewiseLinear(_) => false,
            Repr::Callable { domain, .. } => domain.1 == f64::INFINITY,
        }
    }

    /// Sampled strict-monotonicity check over the domain (exact on
    /// piecewise-linear tables, grid-sampled on callables).
    pub fn check_increasing(&self) -> Result<(), MapError> {
        match &self.repr {
            Repr::Linear { .. } => Ok(()),
            Repr::PiecewiseLinear(knots) => {
                for w in knots.windows(2) {
                    if !(w[1].0 > w[0].0 && w[1].1 > w[0].1) {
                        return Err(MapError::NotIncreasing { at: w[0].0 });
                    }
                }
                Ok(())
            }
            Repr::Callable { f, domain } => {
                let lo = if domain.0.is_finite() { domain.0 } else { -1e6 };
                let hi = if domain.1.is_finite() { domain.1 } else { 1e6 };
                if !(hi > lo) {
                    return Err(MapError::NotIncreasing { at: lo });
                }
                let mut prev = f(lo);
                for i in 1..MONOTONICITY_SAMPLES {
                    let t = lo + (hi - lo) * i as f64 / (MONOTONICITY_SAMPLES - 1) as f64;
                    let y = f(t);
                    if !(y > prev) {
                        return Err(MapError::NotIncreasing { at: t });
                    }
                    prev = y;
                }
                Ok(())
            }
        }
    }

    /// Solves `f(t) = value` for `t`. Exact on piecewise-linear tables;
    /// bisection to [`INVERT_TOL`] on callables.
    pub fn invert(&self, value: f64) -> Result<f64, MapError> {
        match &self.repr {
            Repr::Linear { slope, offset } => {
                if !value.is_finite() {
                    return Err(MapError::OutOfRange { value });
                }
                Ok((value - offset) / slope)
            }
            Repr::PiecewiseLinear(knots) => {
                let n = knots.len();
                if value < knots[0].1 || value > knots[n - 1].1 {
                    return Err(MapError::OutOfRange { value });
                }
                let idx = knots
                    .partition_point(|k| k.1 <= value)
                    .clamp(1, n - 1)
                    - 1;
                let (t0, y0) = knots[idx];
                let (t1, y1) = knots[idx + 1];
                Ok(t0 + (t1 - t0) * (value - y0) / (y1 - y0))
            }
            Repr::Callable { f, domain } => {
                let (mut lo, mut hi) = bracket(f, *domain, value)?;
                // invariant: f(lo) <= value <= f(hi)
                while hi - lo > INVERT_TOL {
                    let mid = 0.5 * (lo + hi);
                    if f(mid) < value {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                Ok(0.5 * (lo + hi))
            }
        }
    }
}

/// Finds `[lo, hi]` within `domain` with `f(lo) <= value <= f(hi)`,
/// expanding exponentially over any infinite end.
fn bracket(
    f: &(impl Fn(f64) -> f64 + ?Sized),
    domain: (f64, f64),
    value: f64,
) -> Result<(f64, f64), MapError> {
    if !value.is_finite() {
        return Err(MapError::OutOfRange { value });
    }
    let mut lo = if domain.0.is_finite() { domain.0 } else { -1.0 };
    if domain.0 == f64::NEG_INFINITY {
        let mut step = 1.0;
        while f(lo) > value {
            lo -= step;
            step *= 2.0;
            if lo < -1e30 {
                return Err(MapError::OutOfRange { value });
            }
        }
    } else if f(lo) > value {
        return Err(MapError::OutOfRange { value });
    }
    let mut hi = if domain.1.is_finite() {
        domain.1
    } else {
        lo.max(0.0) + 1.0
    };
    if domain.1 == f64::INFINITY {
        let mut step = 1.0;
        while f(hi) < value {
            hi += step;
            step *= 2.0;
            if hi > 1e30 {
                return Err(MapError::OutOfRange { value });
            }
        }
    } else if f(hi) < value {
        return Err(MapError::OutOfRange { value });
    }
    Ok((lo, hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn piecewise_linear_exact_inverse() {
        let f = MonotoneMap::piecewise_linear(vec![(0.0, 0.0), (1.0, 2.0), (3.0, 10.0)]).unwrap();
        assert_eq!(f.invert(0.0).unwrap(), 0.0);
        assert_eq!(f.invert(2.0).unwrap(), 1.0);
        assert_eq!(f.invert(6.0).unwrap(), 2.0);
        assert_eq!(f.invert(10.0).unwrap(), 3.0);
        assert!(f.invert(10.5).is_err());
        assert!(f.invert(-0.1).is_err());
    }

    #[test]
    fn rejects_non_increasing_tables() {
        assert!(MonotoneMap::piecewise_linear(vec![(0.0, 0.0), (1.0, 0.0)]).is_err());
        assert!(MonotoneMap::piecewise_linear(vec![(0.0, 0.0)]).is_err());
    }

    #[test]
    fn callable_bisection_inverse() {
        // f(t) = t + t^2/4 on [0, 2]
        let f = MonotoneMap::from_fn(|t| t + t * t / 4.0, (0.0, 2.0));
        let t = f.invert(1.25).unwrap();
        assert!((t - 1.0).abs() < 1e-10);
        let t = f.invert(3.0).unwrap();
        assert!((t - 2.0).abs() < 1e-10);
    }

    #[test]
    fn detects_non_monotone_callable() {
        let f = MonotoneMap::from_fn(|t| (t * 3.0).sin(), (0.0, 4.0));
        assert!(f.check_increasing().is_err());
    }

    #[test]
    fn unbounded_bracketing() {
        let f = MonotoneMap::linear(3.0, -5.0);
        assert!((f.invert(1000.0).unwrap() - 335.0).abs() < 1e-9);
        assert!((f.invert(-1000.0).unwrap() - (-331.666_666_666_666_7)).abs() < 1e-8);
        assert!(f.range_unbounded_above());
    }
}
