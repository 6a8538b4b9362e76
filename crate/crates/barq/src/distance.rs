//! Bottleneck distance between barcodes, exact at desk scale.
//!
//! A partial matching pairs bars across the two barcodes at cost
//! `max(|birth - birth'|, |death - death'|)` and deletes unmatched bars at
//! half their length; the distance is the least achievable maximum cost.
//! Infinite bars must pair with infinite bars (their birth offsets decide
//! the cost), otherwise the distance is infinite. The optimum is always one
//! of finitely many candidate values, so a binary search with a
//! bipartite-matching feasibility test at each candidate is exact.
//!
//! By the isometry theorem this equals the interleaving distance of the
//! associated interval-decomposable modules; [`interleaving`] is the same
//! function under that name.

use crate::barcode::Barcode;

/// Bottleneck distance; `f64::INFINITY` when the infinite-bar counts differ.
pub fn bottleneck(a: &Barcode, b: &Barcode) -> f64 {
    let mut inf_a: Vec<f64> = Vec::new();
    let mut inf_b: Vec<f64> = Vec::new();
    let mut fin_a: Vec<(f64, f64)> = Vec::new();
    let mut fin_b: Vec<(f64, f64)> = Vec::new();
    for bar in a.bars() {
        for _ in 0..bar.multiplicity() {
            if bar.is_infinite() {
                inf_a.push(bar.birth());
            } else {
                fin_a.push((bar.birth(), bar.death()));
            }
        }
    }
    for bar in b.bars() {
        for _ in 0..bar.multiplicity() {
            if bar.is_infinite() {
                inf_b.push(bar.birth());
            } else {
                fin_b.push((bar.birth(), bar.death()));
            }
        }
    }
    if inf_a.len() != inf_b.len() {
        return f64::INFINITY;
    }
    // min-max matching of births on the line is the sorted matching
    inf_a.sort_by(f64::total_cmp);
    inf_b.sort_by(f64::total_cmp);
    let infinite_cost = inf_a
        .iter()
        .zip(&inf_b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);

    infinite_cost.max(finite_bottleneck(&fin_a, &fin_b))
}

/// Interleaving distance of the interval-decomposable modules with these
/// barcodes; equal to the bottleneck distance by the isometry theorem.
pub fn interleaving(a: &Barcode, b: &Barcode) -> f64 {
    bottleneck(a, b)
}

fn pair_cost(x: (f64, f64), y: (f64, f64)) -> f64 {
    (x.0 - y.0).abs().max((x.1 - y.1).abs())
}

fn finite_bottleneck(a: &[(f64, f64)], b: &[(f64, f64)]) -> f64 {
    if a.is_empty() && b.is_empty() {
        return 0.0;
    }
    // deleting everything is always feasible, so its cost is an upper bound
    let delete_all = a
        .iter()
        .chain(b)
        .map(|(x, y)| 0.5 * (y - x))
        .fold(0.0, f64::max);

    let mut candidates: Vec<f64> = Vec::with_capacity(a.len() * b.len() + a.len() + b.len() + 1);
    candidates.push(0.0);
    for bar in a.iter().chain(b) {
        let c = 0.5 * (bar.1 - bar.0);
        if c <= delete_all {
            candidates.push(c);
        }
    }
    for &x in a {
        for &y in b {
            let c = pair_cost(x, y);
            if c <= delete_all {
                candidates.push(c);
            }
        }
    }
    candidates.sort_by(f64::total_cmp);
    candidates.dedup();

    // binary search for the smallest feasible candidate
    let mut lo = 0;
    let mut hi = candidates.len() - 1;
    debug_assert!(feasible(a, b, candidates[hi]));
    while lo < hi {
        let mid = (lo + hi) / 2;
        if feasible(a, b, candidates[mid]) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    candidates[lo]
}

/// Is there a partial matching with every pair cost and every deletion cost
/// at most `lambda`? A bar longer than `2 lambda` cannot be deleted, so it
/// must be matched. By the Mendelsohn-Dulmage theorem a matching covering
/// the forced bars of `a` and one covering the forced bars of `b` merge
/// into a matching covering both, so the two sides are checked with
/// independent augmenting-path runs.
fn feasible(a: &[(f64, f64)], b: &[(f64, f64)], lambda: f64) -> bool {
    saturates(a, b, lambda) && saturates(b, a, lambda)
}

/// Can every bar of `left` longer than `2 lambda` be matched into `right`
/// under the cost cap? Kuhn's augmenting paths.
fn saturates(left: &[(f64, f64)], right: &[(f64, f64)], lambda: f64) -> bool {
    let mut owner_of_right: Vec<Option<usize>> = vec![None; right.len()];
    for (i, bar) in left.iter().enumerate() {
        if 0.5 * (bar.1 - bar.0) <= lambda {
            continue;
        }
        let mut visited = vec![false; right.len()];
        if !augment(i, left, right, lambda, &mut owner_of_right, &mut visited) {
            return false;
        }
    }
    true
}

fn augment(
    i: usize,
    left: &[(f64, f64)],
    right: &[(f64, f64)],
    lambda: f64,
    owner_of_right: &mut Vec<Option<usize>>,
    visited: &mut Vec<bool>,
) -> bool {
    for j in 0..right.len() {
        if visited[j] || pair_cost(left[i], right[j]) > lambda {
            continue;
        }
        visited[j] = true;
        let free = match owner_of_right[j] {
            None => true,
            Some(owner) => augment(owner, left, right, lambda, owner_of_right, visited),
        };
        if free {
            owner_of_right[j] = Some(i);
            return true;
        }
    }
    false
}
