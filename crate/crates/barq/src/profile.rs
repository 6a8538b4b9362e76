//! Radial profiles of convex Hamiltonians and the reparametrization that
//! turns chord lengths into actions.
//!
//! A profile stores the derivative `h'` as a strictly increasing continuous
//! piecewise-linear table on `[1, r_max]` with `h'(1) = 0` and
//! `h'(r_max) = T` (the slope at infinity); `h` itself is recovered by exact
//! piecewise integration from `h(1) = 0`. Specifying the derivative rather
//! than `h` makes strict monotonicity checkable exactly, and monotonicity of
//! `h'` is all the length-to-action lemma uses.
//!
//! The length-to-action map is `A(t) = r h'(r) - h(r)` at `h'(r) = t`, a
//! strictly increasing bijection from `[0, T]` onto `[0, B]` where
//! `B = r_max T - h(r_max)`. It satisfies the bilipschitz bounds
//! `t' - t <= A(t') - A(t) <= r_max (t' - t)`, lies above the diagonal
//! (`A(t) >= t` under the normalization above), and scaling the Hamiltonian
//! pushes it down towards the diagonal: `A_{s'h} <= A_{sh}` pointwise for
//! `s <= s'`, with `A_{sh}(t) -> t` as `s` grows.

use thiserror::Error;

use crate::monotone::MonotoneMap;
use crate::spectrum::ChordSpectrum;

#[derive(Debug, Error, PartialEq)]
pub enum ProfileError {
    #[error("profile needs at least two knots")]
    TooFewKnots,
    #[error("knot radii must strictly increase starting at 1, bad knot at r = {r}")]
    BadRadius { r: f64 },
    #[error("h' must strictly increase from 0, bad knot at r = {r}")]
    BadDerivative { r: f64 },
    #[error("first knot must be (1, 0), got ({r}, {hp})")]
    BadFirstKnot { r: f64, hp: f64 },
    #[error("length {t} outside [0, {slope}]")]
    LengthOutOfRange { t: f64, slope: f64 },
    #[error("scale factor must be at least 1, got {s}")]
    ScaleBelowOne { s: f64 },
    #[error("bilipschitz bound violated at lengths ({t0}, {t1}): ratio {ratio}")]
    BilipschitzViolation { t0: f64, t1: f64, ratio: f64 },
}

/// Piecewise-linear derivative profile of a convex Hamiltonian.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexProfile {
    /// `(r, h'(r))` knots; first is `(1, 0)`, last is `(r_max, T)`.
    knots: Vec<(f64, f64)>,
    /// `h(r)` at each knot, from exact integration of the table.
    h_at_knots: Vec<f64>,
}

impl ConvexProfile {
    pub fn from_knots(knots: Vec<(f64, f64)>) -> Result<Self, ProfileError> {
        if knots.len() < 2 {
            return Err(ProfileError::TooFewKnots);
        }
        let (r0, hp0) = knots[0];
        if r0 != 1.0 || hp0 != 0.0 {
            return Err(ProfileError::BadFirstKnot { r: r0, hp: hp0 });
        }
        for w in knots.windows(2) {
            if !(w[1].0 > w[0].0) || !w[1].0.is_finite() {
                return Err(ProfileError::BadRadius { r: w[1].0 });
            }
            if !(w[1].1 > w[0].1) || !w[1].1.is_finite() {
                return Err(ProfileError::BadDerivative { r: w[1].0 });
            }
        }
        // h by trapezoid rule, exact for piecewise-linear h'
        let mut h_at_knots = vec![0.0; knots.len()];
        for i in 1..knots.len() {
            let (r0, y0) = knots[i - 1];
            let (r1, y1) = knots[i];
            h_at_knots[i] = h_at_knots[i - 1] + 0.5 * (y0 + y1) * (r1 - r0);
        }
        Ok(ConvexProfile { knots, h_at_knots })
    }

    /// The quadratic model profile `h(r) = (r - 1)^2` on `[1, r_max]`,
    /// whose action map has the closed form `A(t) = t + t^2 / 4` when
    /// `r_max = 2`.
    pub fn quadratic(r_max: f64) -> Self {
        ConvexProfile::from_knots(vec![(1.0, 0.0), (r_max, 2.0 * (r_max - 1.0))])
            .expect("valid quadratic profile")
    }

    pub fn r_max(&self) -> f64 {
        self.knots[self.knots.len() - 1].0
    }

    /// Slope at infinity `T = h'(r_max)`.
    pub fn slope(&self) -> f64 {
        self.knots[self.knots.len() - 1].1
    }

    /// `B = r_max T - h(r_max)`, the action of the longest chord.
    pub fn action_bound(&self) -> f64 {
        self.r_max() * self.slope() - self.h_at_knots[self.h_at_knots.len() - 1]
    }

    pub fn knots(&self) -> &[(f64, f64)] {
        &self.knots
    }

    /// `A(t) = r h'(r) - h(r)` at `h'(r) = t`, exact on the piecewise
    /// quadratic segments of the table.
    pub fn action_of_length(&self, t: f64) -> Result<f64, ProfileError> {
        let slope = self.slope();
        if !(0.0..=slope).contains(&t) {
            return Err(ProfileError::LengthOutOfRange { t, slope });
        }
        // endpoints exactly: A(0) = 0 and A(T) = B
        if t == 0.0 {
            return Ok(0.0);
        }
        if t == slope {
            return Ok(self.action_bound());
        }
        let idx = self
            .knots
            .partition_point(|k| k.1 <= t)
            .clamp(1, self.knots.len() - 1)
            - 1;
        let (r0, y0) = self.knots[idx];
        let (r1, y1) = self.knots[idx + 1];
        let m = (y1 - y0) / (r1 - r0);
        let r = r0 + (t - y0) / m;
        let h = self.h_at_knots[idx] + 0.5 * (y0 + t) * (r - r0);
        Ok(r * t - h)
    }

    /// Inverse of the action map on `[0, B]`.
    pub fn length_of_action(&self, a: f64) -> Result<f64, ProfileError> {
        let bound = self.action_bound();
        if !(0.0..=bound).contains(&a) {
            return Err(ProfileError::LengthOutOfRange { t: a, slope: bound });
        }
        self.action_map()
            .invert(a)
            .map_err(|_| ProfileError::LengthOutOfRange { t: a, slope: bound })
    }

    /// The action map as a bracketed monotone callable on `[0, T]`, for
    /// barcode reparametrization.
    pub fn action_map(&self) -> MonotoneMap {
        let profile = self.clone();
        let slope = self.slope();
        MonotoneMap::from_fn(
            move |t| {
                profile
                    .action_of_length(t.clamp(0.0, profile.slope()))
                    .expect("clamped to domain")
            },
            (0.0, slope),
        )
    }

    /// Checks `t' - t <= A(t') - A(t) <= r_max (t' - t)` over all grid
    /// pairs, to tolerance 1e-9. Returns the first violating pair.
    pub fn check_bilipschitz(&self, grid: &[f64]) -> Result<(), ProfileError> {
        const TOL: f64 = 1e-9;
        let actions: Result<Vec<f64>, _> =
            grid.iter().map(|&t| self.action_of_length(t)).collect();
        let actions = actions?;
        let r_max = self.r_max();
        for i in 0..grid.len() {
            for j in (i + 1)..grid.len() {
                let dt = grid[j] - grid[i];
                let da = actions[j] - actions[i];
                if da < dt - TOL || da > r_max * dt + TOL {
                    return Err(ProfileError::BilipschitzViolation {
                        t0: grid[i],
                        t1: grid[j],
                        ratio: if dt > 0.0 { da / dt } else { f64::NAN },
                    });
                }
            }
        }
        Ok(())
    }

    /// The profile of the scaled Hamiltonian `s h`: same radii, derivative
    /// scaled by `s`, so the slope becomes `s T` and the action bound `s B`.
    pub fn scaled(&self, s: f64) -> Result<ConvexProfile, ProfileError> {
        if !(s >= 1.0) {
            return Err(ProfileError::ScaleBelowOne { s });
        }
        ConvexProfile::from_knots(self.knots.iter().map(|&(r, y)| (r, s * y)).collect())
    }

    /// Pushes a length spectrum through the action map: entries up to the
    /// slope map through `action_of_length`, longer ones are dropped.
    /// Returns the action-unit spectrum and the dropped count.
    pub fn spectrum_to_actions(&self, spectrum: &ChordSpectrum) -> (ChordSpectrum, u64) {
        let slope = self.slope();
        let mut entries = Vec::new();
        let mut dropped = 0u64;
        for &(length, mult) in spectrum.entries() {
            if length <= slope {
                let a = self.action_of_length(length).expect("within slope");
                entries.push((a, mult));
            } else {
                dropped += mult;
            }
        }
        let cutoff = self
            .action_of_length(spectrum.cutoff().min(slope))
            .expect("within slope");
        let out = ChordSpectrum::from_sorted(entries, cutoff).expect("monotone image");
        (out, dropped)
    }
}
