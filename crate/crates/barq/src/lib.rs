//! Barcodes of action-filtered chain complexes over the two-element field.
//!
//! The pipeline goes from a [`FilteredComplex`] (generators with real action
//! values and an F2 boundary operator) through matrix reduction to a
//! [`Barcode`], and from families of barcodes to exponential growth-rate
//! estimates of the not-too-short bar counts. Around that core sit the
//! bottleneck distance, convex Hamiltonian profiles that convert chord
//! lengths to actions, chord-spectrum generators for reference systems with
//! known orbit growth, and desk-scale Monte Carlo checks of the Crofton
//! line-integral bound and a finite-dimensional tomograph family.

// `!(x > 0.0)` rejects NaN along with the out-of-range values; the
// un-negated comparison would silently accept it.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod barcode;
pub mod complex;
pub mod distance;
pub mod entropy;
pub mod geometry;
pub mod io;
pub mod monotone;
pub mod oracle;
pub mod profile;
pub mod spectrum;
pub mod synth;

pub use barcode::{Bar, Barcode, BarcodeError, TypeCensus};
pub use complex::{FilteredComplex, TriangleDecomposition, Violation};
pub use distance::{bottleneck, interleaving};
pub use entropy::{EntropyReport, GrowthFit, ScalingFamily};
pub use monotone::MonotoneMap;
pub use profile::ConvexProfile;
pub use spectrum::ChordSpectrum;
