//! Action-filtered chain complexes over the two-element field and their
//! reduction to barcodes.
//!
//! A complex is a finite set of generators with real action values and an F2
//! boundary operator that strictly decreases action. Sublevel spans are
//! automatically subcomplexes, so the complex presents a persistence module
//! whose barcode [`FilteredComplex::reduce`] computes by column reduction of
//! the boundary matrix.
//!
//! The reduction kernel works on bit-packed columns. Rows belonging to
//! columns already known to be non-cycles can never serve as pivots, so they
//! are masked out of every later column before it is reduced; this keeps the
//! working columns sparse without changing the pairing. Column order,
//! masking, and packing width are internal — only the barcode is
//! contractual.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::barcode::{Bar, Barcode};

/// First violated invariant of a complex, with the offending generators.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Violation {
    #[error("generator `{id}` has a non-finite action")]
    NonFiniteAction { id: String },
    #[error("duplicate generator id `{id}`")]
    DuplicateId { id: String },
    #[error("boundary of `{id}` references unknown id `{entry}`")]
    UnknownId { id: String, entry: String },
    #[error(
        "strict action decrease violated: boundary of `{id}` (action {action}) \
         contains `{entry}` (action {entry_action})"
    )]
    ActionNotDecreasing {
        id: String,
        action: f64,
        entry: String,
        entry_action: f64,
    },
    #[error("boundary squared is nonzero starting from `{id}`")]
    BoundaryNotSquareZero { id: String },
}

#[derive(Debug, Error, PartialEq)]
pub enum SplitError {
    #[error("complex invalid: {0}")]
    Invalid(#[from] Violation),
    #[error("split threshold {tau} collides with the action of generator `{id}`")]
    ThresholdCollision { tau: f64, id: String },
}

#[derive(Debug, Error, PartialEq)]
pub enum PlantError {
    #[error("planted complex requires globally distinct endpoint values; {value} repeats")]
    DuplicateEndpoint { value: f64 },
}

#[derive(Debug, Error, PartialEq)]
pub enum ConservationError {
    #[error("complex invalid: {0}")]
    Invalid(#[from] Violation),
    #[error(
        "endpoint multiset mismatch: generator actions {actions:?} vs bar endpoints {endpoints:?}"
    )]
    EndpointMismatch {
        actions: Vec<f64>,
        endpoints: Vec<f64>,
    },
    #[error(
        "windowed endpoint count mismatch at t = {t}: {generators} generator actions in (0, t] \
         vs {endpoints} bar endpoints"
    )]
    WindowMismatch { t: f64, generators: u64, endpoints: u64 },
}

/// Generators with real actions and an F2 boundary map. Build with
/// [`add_generator`](Self::add_generator) and
/// [`set_boundary`](Self::set_boundary), then [`validate`](Self::validate).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FilteredComplex {
    gens: Vec<(String, f64)>,
    boundary: BTreeMap<String, BTreeSet<String>>,
}

impl FilteredComplex {
    pub fn new() -> Self {
        FilteredComplex::default()
    }

    pub fn add_generator(&mut self, id: impl Into<String>, action: f64) {
        self.gens.push((id.into(), action));
    }

    /// Sets the boundary of `id` to the F2 sum of `entries`; repeated ids
    /// cancel mod 2. An empty boundary is simply removed from the map.
    pub fn set_boundary<I, S>(&mut self, id: impl Into<String>, entries: I)
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut set = BTreeSet::new();
        for e in entries {
            let e = e.into();
            if !set.remove(&e) {
                set.insert(e);
            }
        }
        let id = id.into();
        if set.is_empty() {
            self.boundary.remove(&id);
        } else {
            self.boundary.insert(id, set);
        }
    }

    pub fn generators(&self) -> &[(String, f64)] {
        &self.gens
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn boundary_of(&self, id: &str) -> Option<&BTreeSet<String>> {
        self.boundary.get(id)
    }

    pub fn action_of(&self, id: &str) -> Option<f64> {
        self.gens
            .iter()
            .find(|(g, _)| g == id)
            .map(|(_, action)| *action)
    }

    /// Smallest strictly positive generator action, if any.
    pub fn min_positive_action(&self) -> Option<f64> {
        self.gens
            .iter()
            .map(|(_, a)| *a)
            .filter(|a| *a > 0.0)
            .min_by(f64::total_cmp)
    }

    pub fn max_action(&self) -> Option<f64> {
        self.gens.iter().map(|(_, a)| *a).max_by(f64::total_cmp)
    }

    /// The same complex with every action shifted by `delta`.
    pub fn shifted(&self, delta: f64) -> FilteredComplex {
        FilteredComplex {
            gens: self
                .gens
                .iter()
                .map(|(id, a)| (id.clone(), a + delta))
                .collect(),
            boundary: self.boundary.clone(),
        }
    }

    /// Checks the invariants in order: finite actions, unique ids, declared
    /// boundary entries, strict action decrease, and boundary squared zero.
    /// Reports the first violation found.
    pub fn validate(&self) -> Result<(), Violation> {
        let mut index_of: BTreeMap<&str, usize> = BTreeMap::new();
        for (i, (id, action)) in self.gens.iter().enumerate() {
            if !action.is_finite() {
                return Err(Violation::NonFiniteAction { id: id.clone() });
            }
            if index_of.insert(id, i).is_some() {
                return Err(Violation::DuplicateId { id: id.clone() });
            }
        }
        // resolve boundaries to indices once; later checks are index-based
        let mut resolved: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (id, entries) in &self.boundary {
            let Some(&gen) = index_of.get(id.as_str()) else {
                return Err(Violation::UnknownId {
                    id: id.clone(),
                    entry: id.clone(),
                });
            };
            let action = self.gens[gen].1;
            let mut indices = Vec::with_capacity(entries.len());
            for entry in entries {
                let Some(&e) = index_of.get(entry.as_str()) else {
                    return Err(Violation::UnknownId {
                        id: id.clone(),
                        entry: entry.clone(),
                    });
                };
                let entry_action = self.gens[e].1;
                if entry_action >= action {
                    return Err(Violation::ActionNotDecreasing {
                        id: id.clone(),
                        action,
                        entry: entry.clone(),
                        entry_action,
                    });
                }
                indices.push(e);
            }
            resolved.insert(gen, indices);
        }
        // boundary squared: XOR the boundary rows of the boundary entries
        let mut acc = BitColumn::empty();
        for (gen, entries) in &resolved {
            acc.words.clear();
            for e in entries {
                if let Some(inner) = resolved.get(e) {
                    for &row in inner {
                        acc.set_xor(row);
                    }
                }
            }
            if !acc.is_zero() {
                return Err(Violation::BoundaryNotSquareZero {
                    id: self.gens[*gen].0.clone(),
                });
            }
        }
        Ok(())
    }

    /// Generator indices sorted by ascending action, ties broken by id.
    /// Validation guarantees no boundary relation connects equal actions.
    fn sorted_order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.gens.len()).collect();
        order.sort_by(|&i, &j| {
            self.gens[i]
                .1
                .total_cmp(&self.gens[j].1)
                .then_with(|| self.gens[i].0.cmp(&self.gens[j].0))
        });
        order
    }

    /// The barcode of the persistence module presented by this complex,
    /// via column reduction of the boundary matrix.
    pub fn reduce(&self) -> Result<Barcode, Violation> {
        self.validate()?;
        Ok(self.reduce_unchecked())
    }

    pub(crate) fn reduce_unchecked(&self) -> Barcode {
        let order = self.sorted_order();
        let n = order.len();
        let mut position = vec![0usize; n];
        for (pos, &gen_idx) in order.iter().enumerate() {
            position[gen_idx] = pos;
        }
        let mut index_of: BTreeMap<&str, usize> = BTreeMap::new();
        for (i, (id, _)) in self.gens.iter().enumerate() {
            index_of.insert(id, position[i]);
        }

        // columns indexed by sorted position; empty boundary -> no storage
        let mut cols: Vec<BitColumn> = vec![BitColumn::empty(); n];
        for (id, entries) in &self.boundary {
            let col_pos = index_of[id.as_str()];
            let mut col = BitColumn::with_capacity(col_pos);
            for entry in entries {
                col.set(index_of[entry.as_str()]);
            }
            cols[col_pos] = col;
        }

        let mut pivot_of_row: Vec<Option<usize>> = vec![None; n];
        // rows of non-cycle columns can never be pivots; mask them out
        let mut dead_rows = BitColumn::with_capacity(n.saturating_sub(1));
        let mut pairs: Vec<(usize, usize)> = Vec::new();

        for j in 0..n {
            let mut col = std::mem::replace(&mut cols[j], BitColumn::empty());
            col.clear_rows(&dead_rows);
            while let Some(low) = col.low() {
                match pivot_of_row[low] {
                    Some(i) => col.xor_assign(&cols[i]),
                    None => break,
                }
            }
            match col.low() {
                Some(low) => {
                    pivot_of_row[low] = Some(j);
                    dead_rows.set(j);
                    pairs.push((low, j));
                    cols[j] = col;
                }
                None => {
                    cols[j] = col; // reduced to zero: j is a cycle
                }
            }
        }

        let action_at = |pos: usize| self.gens[order[pos]].1;
        let mut paired_birth = vec![false; n];
        let mut bars: Vec<Bar> = Vec::new();
        for &(birth, death) in &pairs {
            paired_birth[birth] = true;
            // strict action decrease makes zero-length pairs impossible,
            // but Barcode::new would collapse them anyway
            bars.push(
                Bar::new(action_at(birth), action_at(death), 1)
                    .expect("pairing respects action order"),
            );
        }
        for (pos, paired) in paired_birth.iter().enumerate() {
            if !paired && !dead_rows.get(pos) {
                bars.push(Bar::new(action_at(pos), f64::INFINITY, 1).expect("finite birth"));
            }
        }
        Barcode::new(bars)
    }

    /// Splits into the full subcomplex on actions below `tau` and the
    /// quotient complex on actions at or above `tau` (boundary entries
    /// landing in the low part deleted). `tau` must not equal any generator
    /// action.
    pub fn split_at(&self, tau: f64) -> Result<TriangleDecomposition, SplitError> {
        self.validate()?;
        if let Some((id, _)) = self.gens.iter().find(|(_, a)| *a == tau) {
            return Err(SplitError::ThresholdCollision {
                tau,
                id: id.clone(),
            });
        }
        let mut low = FilteredComplex::new();
        let mut quotient = FilteredComplex::new();
        for (id, action) in &self.gens {
            if *action < tau {
                low.add_generator(id.clone(), *action);
            } else {
                quotient.add_generator(id.clone(), *action);
            }
        }
        for (id, entries) in &self.boundary {
            let action = self.action_of(id).expect("validated");
            if action < tau {
                low.set_boundary(id.clone(), entries.iter().cloned());
            } else {
                let kept: Vec<String> = entries
                    .iter()
                    .filter(|e| self.action_of(e).expect("validated") >= tau)
                    .cloned()
                    .collect();
                quotient.set_boundary(id.clone(), kept);
            }
        }
        debug_assert!(low.validate().is_ok());
        debug_assert!(quotient.validate().is_ok());
        Ok(TriangleDecomposition {
            low,
            quotient,
            threshold: tau,
        })
    }

    /// Checks that the endpoint actions of the reduced barcode form exactly
    /// the multiset of generator actions, and that the count identity holds
    /// restricted to every window `(0, t]` with `t` running over the
    /// distinct endpoint values and their midpoints.
    pub fn endpoint_conservation_check(&self) -> Result<(), ConservationError> {
        let barcode = self.reduce()?;
        let endpoints = barcode.endpoint_actions();
        let mut actions: Vec<f64> = self.gens.iter().map(|(_, a)| *a).collect();
        actions.sort_by(f64::total_cmp);
        if actions != endpoints {
            return Err(ConservationError::EndpointMismatch { actions, endpoints });
        }
        // windowed form: #generator actions in (0, t] = sum over bars of
        // endpoints in (0, t]
        let mut probes: Vec<f64> = Vec::new();
        for w in actions.windows(2) {
            probes.push(0.5 * (w[0] + w[1]));
        }
        probes.extend(actions.iter().copied());
        for t in probes {
            if t <= 0.0 {
                continue;
            }
            let generators = actions.iter().filter(|a| **a > 0.0 && **a <= t).count() as u64;
            let endpoint_count =
                endpoints.iter().filter(|a| **a > 0.0 && **a <= t).count() as u64;
            if generators != endpoint_count {
                return Err(ConservationError::WindowMismatch {
                    t,
                    generators,
                    endpoints: endpoint_count,
                });
            }
        }
        Ok(())
    }
}

/// Inverse oracle for `reduce`: a complex whose barcode is exactly `bars`.
/// One generator per finite-bar endpoint (the death generator's boundary is
/// its birth generator) and one generator per infinite-bar birth. Requires
/// all endpoint values globally distinct, so bars with multiplicity above
/// one are rejected; callers pre-perturb by <= 1e-9 if needed.
pub fn planted_barcode_complex(bars: &Barcode) -> Result<FilteredComplex, PlantError> {
    let endpoints = bars.endpoint_actions();
    for w in endpoints.windows(2) {
        if w[0] == w[1] {
            return Err(PlantError::DuplicateEndpoint { value: w[0] });
        }
    }
    let mut complex = FilteredComplex::new();
    for (i, bar) in bars.bars().iter().enumerate() {
        let birth_id = format!("b{i}");
        complex.add_generator(birth_id.clone(), bar.birth());
        if !bar.is_infinite() {
            let death_id = format!("d{i}");
            complex.add_generator(death_id.clone(), bar.death());
            complex.set_boundary(death_id, [birth_id]);
        }
    }
    Ok(complex)
}

/// The two pieces of a short exact sequence of complexes split at a
/// threshold: the low part is a genuine subcomplex, the quotient carries the
/// induced differential.
#[derive(Debug, Clone, PartialEq)]
pub struct TriangleDecomposition {
    pub low: FilteredComplex,
    pub quotient: FilteredComplex,
    pub threshold: f64,
}

/// A bit-packed column over F2. Words are trimmed so empty columns hold no
/// storage at all.
#[derive(Debug, Clone, Default)]
struct BitColumn {
    words: Vec<u64>,
}

impl BitColumn {
    fn empty() -> Self {
        BitColumn::default()
    }

    fn with_capacity(max_row: usize) -> Self {
        BitColumn {
            words: Vec::with_capacity(max_row / 64 + 1),
        }
    }

    fn set(&mut self, row: usize) {
        let word = row / 64;
        if word >= self.words.len() {
            self.words.resize(word + 1, 0);
        }
        self.words[word] |= 1u64 << (row % 64);
    }

    fn set_xor(&mut self, row: usize) {
        let word = row / 64;
        if word >= self.words.len() {
            self.words.resize(word + 1, 0);
        }
        self.words[word] ^= 1u64 << (row % 64);
    }

    fn is_zero(&self) -> bool {
        self.words.iter().all(|w| *w == 0)
    }

    fn get(&self, row: usize) -> bool {
        let word = row / 64;
        word < self.words.len() && (self.words[word] >> (row % 64)) & 1 == 1
    }

    /// Highest set row, if any.
    fn low(&self) -> Option<usize> {
        for (w, &bits) in self.words.iter().enumerate().rev() {
            if bits != 0 {
                return Some(w * 64 + 63 - bits.leading_zeros() as usize);
            }
        }
        None
    }

    fn xor_assign(&mut self, other: &BitColumn) {
        if other.words.len() > self.words.len() {
            self.words.resize(other.words.len(), 0);
        }
        for (w, &bits) in other.words.iter().enumerate() {
            self.words[w] ^= bits;
        }
        self.trim();
    }

    fn clear_rows(&mut self, mask: &BitColumn) {
        let upto = self.words.len().min(mask.words.len());
        for w in 0..upto {
            self.words[w] &= !mask.words[w];
        }
        self.trim();
    }

    fn trim(&mut self) {
        while self.words.last() == Some(&0) {
            self.words.pop();
        }
    }
}
