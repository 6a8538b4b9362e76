//! Seeded generators for synthetic complexes and barcodes.
//!
//! Random complexes are valid by construction: generators arrive in
//! ascending action and each differential is drawn from the cycle space of
//! the prefix, so boundary squared vanishes and actions strictly decrease.
//! Cycle classes are tracked as chain bitmasks; besides plain births and
//! kills there is an "echo" move that reuses the boundary of an earlier
//! death, which puts death generators inside later differentials and forces
//! genuine xor cascades in the reduction kernel.
//!
//! Filling pairs model two complexes that agree above a floor action while
//! their differentials differ only in terms lying a gap below each
//! generator.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::barcode::{Bar, Barcode};
use crate::complex::FilteredComplex;

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Chain over F2 as a generator-index bitmask.
#[derive(Debug, Clone, Default, PartialEq)]
struct Chain {
    words: Vec<u64>,
}

impl Chain {
    fn singleton(i: usize) -> Chain {
        let mut c = Chain::default();
        c.toggle(i);
        c
    }

    fn toggle(&mut self, i: usize) {
        let w = i / 64;
        if w >= self.words.len() {
            self.words.resize(w + 1, 0);
        }
        self.words[w] ^= 1u64 << (i % 64);
    }

    fn xor_assign(&mut self, other: &Chain) {
        if other.words.len() > self.words.len() {
            self.words.resize(other.words.len(), 0);
        }
        for (w, bits) in other.words.iter().enumerate() {
            self.words[w] ^= bits;
        }
    }

    fn is_empty(&self) -> bool {
        self.words.iter().all(|w| *w == 0)
    }

    fn indices(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for (w, bits) in self.words.iter().enumerate() {
            let mut bits = *bits;
            while bits != 0 {
                let b = bits.trailing_zeros() as usize;
                out.push(w * 64 + b);
                bits &= bits - 1;
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ComplexParams {
    /// Minimum spacing between consecutive actions (keeps perturbation
    /// room for stability tests).
    pub min_gap: f64,
    pub max_gap: f64,
    /// Probability that a generator kills an existing homology class.
    pub death_probability: f64,
    /// Probability that a generator repeats the boundary of an earlier
    /// death instead, creating a new class that mixes death generators.
    pub echo_probability: f64,
    pub first_action: f64,
}

impl Default for ComplexParams {
    fn default() -> Self {
        ComplexParams {
            min_gap: 0.05,
            max_gap: 1.0,
            death_probability: 0.4,
            echo_probability: 0.15,
            first_action: 0.5,
        }
    }
}

/// A random valid complex with `n` generators.
pub fn random_complex(rng: &mut impl Rng, n: usize, params: ComplexParams) -> FilteredComplex {
    let id_of = |i: usize| format!("g{i:03}");
    let mut complex = FilteredComplex::new();
    let mut action = params.first_action;
    let mut live: Vec<Chain> = Vec::new();
    let mut deaths: Vec<(usize, Vec<usize>)> = Vec::new();
    for i in 0..n {
        complex.add_generator(id_of(i), action);
        action += rng.gen_range(params.min_gap..=params.max_gap);

        let roll: f64 = rng.gen();
        if !live.is_empty() && roll < params.death_probability {
            // kill a random combination of live classes
            let mut z = Chain::default();
            let mut picked = Vec::new();
            for (slot, class) in live.iter().enumerate() {
                if rng.gen_bool(0.5) {
                    z.xor_assign(class);
                    picked.push(slot);
                }
            }
            if picked.is_empty() || z.is_empty() {
                let slot = rng.gen_range(0..live.len());
                z = live[slot].clone();
                picked = vec![slot];
            }
            let entries: Vec<String> = z.indices().into_iter().map(id_of).collect();
            complex.set_boundary(id_of(i), entries);
            deaths.push((i, z.indices()));
            live.remove(*picked.last().expect("picked nonempty"));
        } else if !deaths.is_empty() && roll < params.death_probability + params.echo_probability {
            // repeat an earlier death's boundary: kills nothing, and the
            // difference of the two death chains becomes a new live class
            let (d, entries) = deaths[rng.gen_range(0..deaths.len())].clone();
            complex.set_boundary(id_of(i), entries.iter().map(|&e| id_of(e)).collect::<Vec<_>>());
            deaths.push((i, entries));
            let mut class = Chain::singleton(d);
            class.toggle(i);
            live.push(class);
        } else {
            live.push(Chain::singleton(i));
        }
    }
    debug_assert!(complex.validate().is_ok());
    complex
}

/// Perturbs every action by at most `delta`, preserving validity. `delta`
/// is clamped below half the smallest action gap across boundary relations;
/// the applied bound is returned with the complex.
pub fn perturbed_complex(
    rng: &mut impl Rng,
    complex: &FilteredComplex,
    delta: f64,
) -> (FilteredComplex, f64) {
    let mut min_relation_gap = f64::INFINITY;
    for (id, action) in complex.generators() {
        if let Some(entries) = complex.boundary_of(id) {
            for e in entries {
                let gap = action - complex.action_of(e).expect("valid complex");
                min_relation_gap = min_relation_gap.min(gap);
            }
        }
    }
    let bound = if min_relation_gap.is_finite() {
        delta.min(0.45 * min_relation_gap)
    } else {
        delta
    };
    let mut out = FilteredComplex::new();
    for (id, action) in complex.generators() {
        out.add_generator(id.clone(), action + rng.gen_range(-bound..=bound));
    }
    for (id, _) in complex.generators() {
        if let Some(entries) = complex.boundary_of(id) {
            out.set_boundary(id.clone(), entries.iter().cloned());
        }
    }
    debug_assert!(out.validate().is_ok());
    (out, bound)
}

#[derive(Debug, Clone, Copy)]
pub struct BarcodeParams {
    pub max_bars: usize,
    pub birth_range: (f64, f64),
    pub max_length: f64,
    pub infinite_probability: f64,
    pub max_multiplicity: u64,
}

impl Default for BarcodeParams {
    fn default() -> Self {
        BarcodeParams {
            max_bars: 12,
            birth_range: (0.0, 10.0),
            max_length: 5.0,
            infinite_probability: 0.2,
            max_multiplicity: 3,
        }
    }
}

pub fn random_barcode(rng: &mut impl Rng, params: BarcodeParams) -> Barcode {
    let n = rng.gen_range(0..=params.max_bars);
    let bars: Vec<Bar> = (0..n)
        .map(|_| {
            let birth = rng.gen_range(params.birth_range.0..params.birth_range.1);
            let death = if rng.gen_bool(params.infinite_probability) {
                f64::INFINITY
            } else {
                birth + rng.gen_range(0.01..params.max_length)
            };
            let mult = rng.gen_range(1..=params.max_multiplicity);
            Bar::new(birth, death, mult).expect("constructed valid")
        })
        .collect();
    Barcode::new(bars)
}

/// How far down the contamination terms of a filling pair may reach.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ContaminationPool {
    /// Only cycles in the deep band just above the floor, keeping every
    /// pairing above the floor identical between the two fillings. Bar
    /// counts then agree at every truncation level, so growth estimates
    /// match exactly.
    DeepOnly,
    /// Any cycle lying at least `gap` below the dying generator. Pairings
    /// of long bars may then differ between the fillings; only the
    /// short-bar multiset above the floor is preserved.
    AnyBelowGap,
}

#[derive(Debug, Clone, Copy)]
pub struct FillingParams {
    /// Actions at or below zero belong to the filling-specific part.
    pub floor: f64,
    /// Declared energy gap: differentials of the two complexes agree above
    /// it, bars shorter than it are compared.
    pub gap: f64,
    pub shared_pairs: usize,
    pub shared_cycles: usize,
    pub deep_cycles: usize,
    /// Filling-local infinite classes; equal count in both fillings.
    pub local_cycles: usize,
    pub local_pairs: usize,
    pub pool: ContaminationPool,
}

impl Default for FillingParams {
    fn default() -> Self {
        FillingParams {
            floor: 0.5,
            gap: 0.3,
            shared_pairs: 6,
            shared_cycles: 3,
            deep_cycles: 3,
            local_cycles: 3,
            local_pairs: 2,
            pool: ContaminationPool::DeepOnly,
        }
    }
}

#[derive(Debug, Clone)]
pub struct FillingPair {
    pub first: FilteredComplex,
    pub second: FilteredComplex,
    pub floor: f64,
    pub gap: f64,
}

/// Two complexes sharing all generators above `floor`, with differentials
/// agreeing on those generators up to terms at least `gap` below them.
pub fn random_filling_pair(rng: &mut impl Rng, params: FillingParams) -> FillingPair {
    let floor = params.floor;
    let gap = params.gap;
    let deep_band = 0.2;
    let margin = 0.1;
    // births start above every deep cycle plus the gap, so contamination
    // never overtakes a planted pivot in the DeepOnly pool
    let births_from = floor + deep_band + gap + margin;

    let mut shared = FilteredComplex::new();
    let mut deep_ids = Vec::new();
    for i in 0..params.deep_cycles {
        let id = format!("w_deep{i}");
        shared.add_generator(id.clone(), floor + rng.gen_range(0.01..deep_band));
        deep_ids.push(id);
    }
    for i in 0..params.shared_cycles {
        shared.add_generator(format!("w_cyc{i}"), births_from + rng.gen_range(0.0..4.0));
    }
    let mut pair_info = Vec::new();
    for i in 0..params.shared_pairs {
        let birth = births_from + rng.gen_range(0.0..4.0);
        let short = rng.gen_bool(0.5);
        let length = if short {
            rng.gen_range(0.25 * gap..0.95 * gap)
        } else {
            rng.gen_range(1.1 * gap..3.0 * gap)
        };
        let (y, z) = (format!("w_y{i}"), format!("w_z{i}"));
        shared.add_generator(y.clone(), birth);
        shared.add_generator(z.clone(), birth + length);
        pair_info.push((y, z, birth + length));
    }

    let mut build = |tag: &str| -> FilteredComplex {
        let mut c = shared.clone();
        let mut local_cycles = Vec::new();
        for i in 0..params.local_cycles {
            let id = format!("{tag}_cyc{i}");
            c.add_generator(id.clone(), rng.gen_range(-2.0..0.0));
            local_cycles.push(id);
        }
        for i in 0..params.local_pairs {
            let birth = rng.gen_range(-2.0..-0.05);
            let (y, z) = (format!("{tag}_y{i}"), format!("{tag}_z{i}"));
            c.add_generator(y.clone(), birth);
            c.add_generator(z.clone(), birth + rng.gen_range(0.001..0.01));
            c.set_boundary(z, [y]);
        }
        for (y, z, death) in &pair_info {
            let mut entries = vec![y.clone()];
            for d in &deep_ids {
                if rng.gen_bool(0.4) {
                    entries.push(d.clone());
                }
            }
            for l in &local_cycles {
                if rng.gen_bool(0.4) {
                    entries.push(l.clone());
                }
            }
            if params.pool == ContaminationPool::AnyBelowGap {
                // shared cycles and other births below the depth cutoff
                for (id, a) in shared.generators() {
                    let is_cycle = id.starts_with("w_cyc") || id.starts_with("w_y");
                    if is_cycle && id != y && *a < death - gap && rng.gen_bool(0.3) {
                        entries.push(id.clone());
                    }
                }
            }
            c.set_boundary(z.clone(), entries);
        }
        debug_assert!(c.validate().is_ok());
        c
    };

    let first = build("m");
    let second = build("n");
    FillingPair {
        first,
        second,
        floor,
        gap,
    }
}

/// Multiset of `(birth, death, multiplicity)` for bars with birth above
/// `floor` and length below `max_len`, sorted for comparison.
pub fn short_bars_above(barcode: &Barcode, floor: f64, max_len: f64) -> Vec<(f64, f64, u64)> {
    let mut out: Vec<(f64, f64, u64)> = barcode
        .bars()
        .iter()
        .filter(|b| b.birth() > floor && b.length() < max_len)
        .map(|b| (b.birth(), b.death(), b.multiplicity()))
        .collect();
    out.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    out
}
