//! Brute-force barcode oracle, independent of the reduction kernel.
//!
//! For every pair of sublevel complexes the oracle computes the rank of the
//! inclusion-induced map on homology by exact Gaussian elimination over F2,
//! then recovers bar multiplicities by inclusion-exclusion over the grid of
//! distinct action values. Cost grows like the fourth power of the
//! generator count, hence the size guard.

use thiserror::Error;

use crate::barcode::{Bar, Barcode};
use crate::complex::{FilteredComplex, Violation};

pub const MAX_ORACLE_GENERATORS: usize = 16;

#[derive(Debug, Error, PartialEq)]
pub enum OracleError {
    #[error("complex invalid: {0}")]
    Invalid(#[from] Violation),
    #[error("oracle limited to {MAX_ORACLE_GENERATORS} generators, got {n}")]
    TooLarge { n: usize },
}

/// Ground-truth barcode of a small valid complex.
pub fn oracle_barcode(complex: &FilteredComplex) -> Result<Barcode, OracleError> {
    complex.validate()?;
    let n = complex.len();
    if n > MAX_ORACLE_GENERATORS {
        return Err(OracleError::TooLarge { n });
    }
    if n == 0 {
        return Ok(Barcode::empty());
    }

    // generators in a fixed order; rows of the matrices are generator indices
    let ids: Vec<&str> = complex.generators().iter().map(|(id, _)| id.as_str()).collect();
    let actions: Vec<f64> = complex.generators().iter().map(|(_, a)| *a).collect();
    let row_of = |id: &str| ids.iter().position(|g| *g == id).expect("validated id");

    let boundary_col = |gen: usize| -> u32 {
        let mut col = 0u32;
        if let Some(entries) = complex.boundary_of(ids[gen]) {
            for e in entries {
                col |= 1 << row_of(e);
            }
        }
        col
    };

    let mut levels: Vec<f64> = actions.clone();
    levels.sort_by(f64::total_cmp);
    levels.dedup();
    let k = levels.len();

    // sub(i) = generators with action <= levels[i-1]; sub(0) is empty
    let members_at = |level_idx: usize| -> Vec<usize> {
        if level_idx == 0 {
            return Vec::new();
        }
        let cut = levels[level_idx - 1];
        (0..n).filter(|&g| actions[g] <= cut).collect()
    };

    // rank of the map H(sub(s)) -> H(sub(t)) for s <= t:
    //   rank [D_t | I_s] - rank D_s - rank D_t
    let rank_d: Vec<usize> = (0..=k)
        .map(|i| {
            let cols: Vec<u32> = members_at(i).iter().map(|&g| boundary_col(g)).collect();
            rank_f2(cols)
        })
        .collect();
    let rank_between = |s: usize, t: usize| -> i64 {
        let mut cols: Vec<u32> = members_at(t).iter().map(|&g| boundary_col(g)).collect();
        cols.extend(members_at(s).iter().map(|&g| 1u32 << g));
        rank_f2(cols) as i64 - rank_d[s] as i64 - rank_d[t] as i64
    };

    let mut ranks = vec![vec![0i64; k + 1]; k + 1];
    for (s, row) in ranks.iter_mut().enumerate() {
        for (t, slot) in row.iter_mut().enumerate().skip(s) {
            *slot = rank_between(s, t);
        }
    }

    let mut bars: Vec<Bar> = Vec::new();
    for i in 1..=k {
        for j in (i + 1)..=k {
            let mult =
                ranks[i][j - 1] - ranks[i][j] - ranks[i - 1][j - 1] + ranks[i - 1][j];
            assert!(mult >= 0, "negative bar multiplicity from rank table");
            if mult > 0 {
                bars.push(Bar::new(levels[i - 1], levels[j - 1], mult as u64).expect("valid bar"));
            }
        }
        let inf_mult = ranks[i][k] - ranks[i - 1][k];
        assert!(inf_mult >= 0, "negative infinite multiplicity");
        if inf_mult > 0 {
            bars.push(Bar::new(levels[i - 1], f64::INFINITY, inf_mult as u64).expect("valid bar"));
        }
    }
    Ok(Barcode::new(bars))
}

/// Rank of a set of F2 column vectors, each a bitmask over at most 32 rows.
fn rank_f2(mut cols: Vec<u32>) -> usize {
    let mut rank = 0;
    let mut pivots: Vec<u32> = Vec::new();
    for col in cols.iter_mut() {
        let mut v = *col;
        for &p in &pivots {
            let high = 31 - p.leading_zeros();
            if v >> high & 1 == 1 {
                v ^= p;
            }
        }
        if v != 0 {
            pivots.push(v);
            pivots.sort_by_key(|p| std::cmp::Reverse(31 - p.leading_zeros()));
            rank += 1;
        }
    }
    rank
}
