//! Exact configuration-to-configuration cost.
//!
//! For configurations of equal cardinality the cost `c(η, ω)` is the value of
//! a minimum-weight perfect matching under the ground cost `½‖x − y‖²`;
//! configurations of different sizes are infinitely far apart. The matching is
//! computed with the Hungarian method (shortest augmenting paths with
//! potentials, `O(n³)`), and a brute-force enumerator is kept as an oracle.

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::cost::ExtendedCost;
use crate::error::{Error, Result};
use crate::point::{half_sq_dist_unchecked, Configuration, Point};
use crate::stats::{pairwise_sum, stream_rng};

/// Largest cardinality accepted by [`brute_force_cost`].
pub const BRUTE_FORCE_CAP: usize = 8;

/// A bijection `i ↦ permutation[i]` from the atoms of `η` to those of `ω`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Matching {
    pub permutation: Vec<usize>,
    pub cost: ExtendedCost,
}

/// Optimal assignment for a square cost matrix together with dual potentials
/// `row[i] + col[j] ≤ cost[i][j]`, tight on the matched cells.
#[derive(Debug, Clone)]
pub struct Assignment {
    pub permutation: Vec<usize>,
    pub total: f64,
    pub row_potential: Vec<f64>,
    pub col_potential: Vec<f64>,
}

/// Solves the square assignment problem. Among optimal permutations the
/// lexicographically smallest one is returned.
pub fn solve_assignment(cost: &[Vec<f64>]) -> Assignment {
    let n = cost.len();
    if n == 0 {
        return Assignment { permutation: vec![], total: 0.0, row_potential: vec![], col_potential: vec![] };
    }
    let (perm, u, v) = hungarian(cost);
    let matched_total = |p: &[usize]| pairwise_sum(&p.iter().enumerate().map(|(i, &j)| cost[i][j]).collect::<Vec<_>>());
    let base_total = matched_total(&perm);

    let scale = 1.0 + cost.iter().flatten().fold(0.0f64, |m, c| m.max(c.abs()));
    let tol = 1e-13 * n as f64 * scale;
    let refined = lex_min_on_tight_edges(cost, &perm, &u, &v, tol);
    let refined_total = matched_total(&refined);
    let (permutation, total) = if refined_total <= base_total + 1e-12 * scale {
        (refined, refined_total)
    } else {
        (perm, base_total)
    };
    Assignment { permutation, total, row_potential: u, col_potential: v }
}

fn hungarian(a: &[Vec<f64>]) -> (Vec<usize>, Vec<f64>, Vec<f64>) {
    let n = a.len();
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    // p[j]: row (1-based) matched to column j; column 0 is a sentinel.
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=n {
                if !used[j] {
                    let cur = a[i0 - 1][j - 1] - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut perm = vec![0; n];
    for j in 1..=n {
        perm[p[j] - 1] = j - 1;
    }
    (perm, u[1..].to_vec(), v[1..].to_vec())
}

/// Greedily fixes row `i` to the smallest column that still admits a perfect
/// matching inside the subgraph of tight cells.
fn lex_min_on_tight_edges(cost: &[Vec<f64>], perm: &[usize], u: &[f64], v: &[f64], tol: f64) -> Vec<usize> {
    let n = cost.len();
    let mut adj: Vec<Vec<usize>> = (0..n)
        .map(|i| (0..n).filter(|&j| cost[i][j] - u[i] - v[j] <= tol || perm[i] == j).collect())
        .collect();
    for row in adj.iter_mut() {
        row.sort_unstable();
    }
    let mut row_to_col = perm.to_vec();
    let mut col_to_row = vec![0; n];
    for (i, &j) in perm.iter().enumerate() {
        col_to_row[j] = i;
    }
    let mut col_fixed = vec![false; n];
    for i in 0..n {
        for &j in &adj[i] {
            if col_fixed[j] {
                continue;
            }
            if row_to_col[i] == j {
                col_fixed[j] = true;
                break;
            }
            // Reroute: row i takes j; the displaced row must reach i's old column.
            let displaced = col_to_row[j];
            let target = row_to_col[i];
            let mut visited = vec![false; n];
            visited[j] = true;
            if let Some(path) = alternating_path(displaced, target, i, &adj, &col_fixed, &col_to_row, &mut visited) {
                // path: sequence of (row, new column)
                for (r, c) in path {
                    row_to_col[r] = c;
                    col_to_row[c] = r;
                }
                row_to_col[i] = j;
                col_to_row[j] = i;
                col_fixed[j] = true;
                break;
            }
        }
    }
    row_to_col
}

fn alternating_path(
    row: usize,
    target: usize,
    skip_row: usize,
    adj: &[Vec<usize>],
    col_fixed: &[bool],
    col_to_row: &[usize],
    visited: &mut [bool],
) -> Option<Vec<(usize, usize)>> {
    for &c in &adj[row] {
        if col_fixed[c] || visited[c] {
            continue;
        }
        visited[c] = true;
        if c == target {
            return Some(vec![(row, c)]);
        }
        let next = col_to_row[c];
        if next == skip_row {
            continue;
        }
        if let Some(mut path) = alternating_path(next, target, skip_row, adj, col_fixed, col_to_row, visited) {
            path.push((row, c));
            return Some(path);
        }
    }
    None
}

fn check_same_dim(eta: &Configuration, omega: &Configuration) -> Result<()> {
    if let (Some(a), Some(b)) = (eta.dim(), omega.dim()) {
        if a != b {
            return Err(Error::DimensionMismatch { expected: a, found: b });
        }
    }
    Ok(())
}

pub(crate) fn cost_matrix(xs: &[Point], ys: &[Point]) -> Vec<Vec<f64>> {
    xs.iter().map(|x| ys.iter().map(|y| half_sq_dist_unchecked(x, y)).collect()).collect()
}

/// `c(η, ω)`: the minimum of `Σ ½‖x_i − y_σ(i)‖²` over bijections when
/// `|η| = |ω|`, and `+∞` (with no matching) otherwise.
pub fn config_cost(eta: &Configuration, omega: &Configuration) -> Result<(ExtendedCost, Option<Matching>)> {
    check_same_dim(eta, omega)?;
    if eta.len() != omega.len() {
        return Ok((ExtendedCost::Infinite, None));
    }
    let a = solve_assignment(&cost_matrix(eta.points(), omega.points()));
    let cost = ExtendedCost::new(a.total.max(0.0));
    Ok((cost, Some(Matching { permutation: a.permutation, cost })))
}

/// Finite value of [`config_cost`], `+∞` as `f64::INFINITY`.
pub fn config_cost_value(eta: &Configuration, omega: &Configuration) -> Result<f64> {
    Ok(config_cost(eta, omega)?.0.to_f64())
}

/// Exact minimum by enumerating all `n!` permutations (oracle for
/// [`config_cost`]).
pub fn brute_force_cost(eta: &Configuration, omega: &Configuration) -> Result<ExtendedCost> {
    Ok(brute_force_matching(eta, omega)?.map_or(ExtendedCost::Infinite, |m| m.cost))
}

/// Like [`brute_force_cost`] but also returns the lexicographically smallest
/// optimal permutation.
pub fn brute_force_matching(eta: &Configuration, omega: &Configuration) -> Result<Option<Matching>> {
    check_same_dim(eta, omega)?;
    if eta.len() != omega.len() {
        return Ok(None);
    }
    let n = eta.len();
    if n > BRUTE_FORCE_CAP {
        return Err(Error::CardinalityCap { n, cap: BRUTE_FORCE_CAP });
    }
    let c = cost_matrix(eta.points(), omega.points());
    let mut perm: Vec<usize> = (0..n).collect();
    let eval = |p: &[usize]| pairwise_sum(&p.iter().enumerate().map(|(i, &j)| c[i][j]).collect::<Vec<_>>());
    let mut best = (eval(&perm), perm.clone());
    while next_permutation(&mut perm) {
        let v = eval(&perm);
        if v < best.0 {
            best = (v, perm.clone());
        }
    }
    Ok(Some(Matching { permutation: best.1, cost: ExtendedCost::new(best.0) }))
}

/// Advances to the next permutation in lexicographic order; false after the last.
pub(crate) fn next_permutation(p: &mut [usize]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// Symmetric cost on `n`-tuples: `min_σ ½‖x − σy‖²`, equal to the
/// configuration cost of the induced configurations.
pub fn symmetric_cost(x: &[Point], y: &[Point]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch { left: x.len(), right: y.len() });
    }
    let eta = Configuration::new(x.to_vec())?;
    let omega = Configuration::new(y.to_vec())?;
    config_cost_value(&eta, &omega)
}

/// Outcome of a cyclical-monotonicity check. On failure `witness` is a
/// permutation `σ` of the pair indices with
/// `Σ c(η_i, ω_σ(i)) < Σ c(η_i, ω_i)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotonicityCheck {
    pub monotone: bool,
    pub witness: Option<Vec<usize>>,
    pub permutations_checked: u64,
}

impl MonotonicityCheck {
    /// True when the witness swaps exactly two indices.
    pub fn witness_is_transposition(&self) -> bool {
        self.witness
            .as_ref()
            .is_some_and(|w| w.iter().enumerate().filter(|(i, &s)| *i != s).count() == 2)
    }
}

fn pair_cost_matrix(pairs: &[(Configuration, Configuration)]) -> Result<Vec<Vec<f64>>> {
    let m = pairs.len();
    let mut c = vec![vec![0.0; m]; m];
    for i in 0..m {
        for j in 0..m {
            c[i][j] = config_cost_value(&pairs[i].0, &pairs[j].1)?;
        }
        if !c[i][i].is_finite() {
            return Err(Error::InfinitePair { index: i });
        }
    }
    Ok(c)
}

fn violation_tolerance(c: &[Vec<f64>]) -> f64 {
    1e-9 * (1.0 + (0..c.len()).map(|i| c[i][i]).sum::<f64>())
}

/// Checks `Σ c(η_i, ω_i) ≤ Σ c(η_i, ω_σ(i))`. All transpositions are tried
/// first; then every permutation when `m! ≤ permutation_budget`, otherwise
/// `permutation_budget` random permutations from a fixed stream.
pub fn check_cyclical_monotonicity(
    pairs: &[(Configuration, Configuration)],
    permutation_budget: u64,
) -> Result<MonotonicityCheck> {
    let c = pair_cost_matrix(pairs)?;
    Ok(check_matrix_permutations(&c, permutation_budget))
}

/// Same check on a precomputed cost matrix `c[i][j] = c(η_i, ω_j)`.
pub fn check_matrix_permutations(c: &[Vec<f64>], permutation_budget: u64) -> MonotonicityCheck {
    let m = c.len();
    let tol = violation_tolerance(c);
    let base: f64 = (0..m).map(|i| c[i][i]).sum();
    let mut checked = 0u64;

    for i in 0..m {
        for j in i + 1..m {
            checked += 1;
            if c[i][j] + c[j][i] < c[i][i] + c[j][j] - tol {
                let mut w: Vec<usize> = (0..m).collect();
                w.swap(i, j);
                return MonotonicityCheck { monotone: false, witness: Some(w), permutations_checked: checked };
            }
        }
    }
    let total = |p: &[usize]| p.iter().enumerate().map(|(i, &j)| c[i][j]).sum::<f64>();
    let exhaustive = factorial_at_most(m, permutation_budget);
    let mut perm: Vec<usize> = (0..m).collect();
    if exhaustive {
        while next_permutation(&mut perm) {
            checked += 1;
            if total(&perm) < base - tol {
                return MonotonicityCheck { monotone: false, witness: Some(perm), permutations_checked: checked };
            }
        }
    } else {
        let mut rng = stream_rng(0, 0);
        for _ in 0..permutation_budget {
            perm.shuffle(&mut rng);
            checked += 1;
            if total(&perm) < base - tol {
                return MonotonicityCheck { monotone: false, witness: Some(perm), permutations_checked: checked };
            }
        }
    }
    MonotonicityCheck { monotone: true, witness: None, permutations_checked: checked }
}

fn factorial_at_most(m: usize, budget: u64) -> bool {
    let mut f: u64 = 1;
    for k in 2..=m as u64 {
        f = match f.checked_mul(k) {
            Some(v) if v <= budget => v,
            _ => return false,
        };
    }
    true
}

/// Exact check over every subset of at most `max_len` pairs and every
/// permutation of such a subset.
///
/// A permutation lowers the total cost iff one of its cycles does, so it
/// suffices to search for a negative cycle of length `≤ max_len` in the graph
/// with edge weights `c[a][b] − c[a][a]`; this runs in `O(max_len · m³)`.
/// Transpositions are reported in preference to longer cycles.
pub fn check_cyclical_monotonicity_cycles(
    pairs: &[(Configuration, Configuration)],
    max_len: usize,
) -> Result<MonotonicityCheck> {
    let c = pair_cost_matrix(pairs)?;
    Ok(check_matrix_cycles(&c, max_len))
}

/// Cycle-bounded check on a precomputed cost matrix.
pub fn check_matrix_cycles(c: &[Vec<f64>], max_len: usize) -> MonotonicityCheck {
    let m = c.len();
    let tol = violation_tolerance(c);
    let w = |a: usize, b: usize| c[a][b] - c[a][a];
    let max_len = max_len.min(m);
    if max_len < 2 {
        return MonotonicityCheck { monotone: true, witness: None, permutations_checked: 0 };
    }
    // dist[s][len][v], pred[s][len][v]
    let mut dist = vec![vec![vec![f64::INFINITY; m]; max_len + 1]; m];
    let mut pred = vec![vec![vec![usize::MAX; m]; max_len + 1]; m];
    for s in 0..m {
        for v in 0..m {
            if v != s {
                dist[s][1][v] = w(s, v);
                pred[s][1][v] = s;
            }
        }
        for len in 2..=max_len {
            for v in 0..m {
                let (mut best, mut arg) = (f64::INFINITY, usize::MAX);
                for u in 0..m {
                    if u == v {
                        continue;
                    }
                    let d = dist[s][len - 1][u] + w(u, v);
                    if d < best {
                        best = d;
                        arg = u;
                    }
                }
                dist[s][len][v] = best;
                pred[s][len][v] = arg;
            }
        }
    }
    let mut checked = 0u64;
    for len in 2..=max_len {
        for s in 0..m {
            checked += 1;
            if dist[s][len][s] < -tol {
                let mut walk = vec![s];
                let mut v = s;
                for l in (1..=len).rev() {
                    v = pred[s][l][v];
                    walk.push(v);
                }
                walk.reverse();
                let cycle = negative_simple_cycle(&walk, &w, tol);
                let mut sigma: Vec<usize> = (0..m).collect();
                for k in 0..cycle.len() {
                    sigma[cycle[k]] = cycle[(k + 1) % cycle.len()];
                }
                return MonotonicityCheck { monotone: false, witness: Some(sigma), permutations_checked: checked };
            }
        }
    }
    MonotonicityCheck { monotone: true, witness: None, permutations_checked: checked }
}

/// Splits a closed walk into simple cycles and returns one with negative weight.
fn negative_simple_cycle(walk: &[usize], w: &impl Fn(usize, usize) -> f64, tol: f64) -> Vec<usize> {
    let weight = |cyc: &[usize]| (0..cyc.len()).map(|k| w(cyc[k], cyc[(k + 1) % cyc.len()])).sum::<f64>();
    let mut stack: Vec<usize> = Vec::new();
    for &v in &walk[..walk.len() - 1] {
        if let Some(pos) = stack.iter().position(|&x| x == v) {
            let cyc = stack[pos..].to_vec();
            if weight(&cyc) < -tol {
                return cyc;
            }
            stack.truncate(pos);
        }
        stack.push(v);
    }
    stack
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(xs: &[f64]) -> Configuration {
        Configuration::from_scalars(xs).unwrap()
    }

    #[test]
    fn identical_configurations_cost_zero() {
        let (c, m) = config_cost(&cfg(&[0.0, 1.0]), &cfg(&[0.0, 1.0])).unwrap();
        assert_eq!(c, ExtendedCost::Finite(0.0));
        assert_eq!(m.unwrap().permutation, vec![0, 1]);
    }

    #[test]
    fn unequal_cardinalities_are_infinite() {
        let (c, m) = config_cost(&cfg(&[0.0]), &cfg(&[0.0, 1.0])).unwrap();
        assert_eq!(c, ExtendedCost::Infinite);
        assert!(m.is_none());
        assert_eq!(brute_force_cost(&cfg(&[0.0]), &cfg(&[0.0, 1.0])).unwrap(), ExtendedCost::Infinite);
    }

    #[test]
    fn two_point_example() {
        // permutations: ½(0.25 + 4) = 2.125 and ½(9 + 0.25) = 4.625
        let (c, m) = config_cost(&cfg(&[0.0, 1.0]), &cfg(&[0.5, 3.0])).unwrap();
        assert!((c.to_f64() - 2.125).abs() < 1e-15);
        assert_eq!(m.unwrap().permutation, vec![0, 1]);
        assert_eq!(brute_force_cost(&cfg(&[0.0, 1.0]), &cfg(&[0.5, 3.0])).unwrap(), ExtendedCost::Finite(2.125));
        let (c, m) = config_cost(&cfg(&[0.0, 1.0]), &cfg(&[3.0, 0.5])).unwrap();
        assert_eq!(c, ExtendedCost::Finite(2.125));
        assert_eq!(m.unwrap().permutation, vec![1, 0]);
    }

    #[test]
    fn empty_configurations() {
        let (c, m) = config_cost(&Configuration::empty(), &Configuration::empty()).unwrap();
        assert_eq!(c, ExtendedCost::Finite(0.0));
        assert!(m.unwrap().permutation.is_empty());
    }

    #[test]
    fn singleton_brute_force() {
        assert_eq!(brute_force_cost(&cfg(&[5.0]), &cfg(&[5.0])).unwrap(), ExtendedCost::Finite(0.0));
    }

    #[test]
    fn brute_force_cap() {
        let xs: Vec<f64> = (0..9).map(|i| i as f64).collect();
        assert_eq!(brute_force_cost(&cfg(&xs), &cfg(&xs)), Err(Error::CardinalityCap { n: 9, cap: 8 }));
    }

    #[test]
    fn dimension_mismatch() {
        let a = Configuration::new(vec![Point::new(vec![0.0, 0.0]).unwrap()]).unwrap();
        assert!(matches!(config_cost(&a, &cfg(&[0.0])), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn lexicographic_tie_breaking() {
        // all four points equidistant pairs: every permutation optimal
        let a = cfg(&[0.0, 0.0, 0.0]);
        let (_, m) = config_cost(&a, &a).unwrap();
        assert_eq!(m.unwrap().permutation, vec![0, 1, 2]);
        let p = |x: f64, y: f64| Point::new(vec![x, y]).unwrap();
        let eta = Configuration::new(vec![p(1.0, 0.0), p(-1.0, 0.0)]).unwrap();
        let omega = Configuration::new(vec![p(0.0, 1.0), p(0.0, -1.0)]).unwrap();
        let (c, m) = config_cost(&eta, &omega).unwrap();
        assert_eq!(c, ExtendedCost::Finite(2.0));
        assert_eq!(m.unwrap().permutation, vec![0, 1]);
    }

    #[test]
    fn symmetric_cost_examples() {
        let t = |xs: &[f64]| xs.iter().map(|&x| Point::scalar(x).unwrap()).collect::<Vec<_>>();
        assert_eq!(symmetric_cost(&t(&[1.0, 2.0]), &t(&[1.0, 2.0])).unwrap(), 0.0);
        assert_eq!(symmetric_cost(&t(&[0.0, 1.0]), &t(&[3.0, 0.5])).unwrap(), 2.125);
        assert_eq!(symmetric_cost(&t(&[0.0, 1.0]), &t(&[0.5, 3.0])).unwrap(), 2.125);
        assert!(matches!(symmetric_cost(&t(&[0.0]), &t(&[0.5, 3.0])), Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn single_pair_is_monotone() {
        let pairs = vec![(cfg(&[0.0]), cfg(&[1.0]))];
        let r = check_cyclical_monotonicity(&pairs, 1000).unwrap();
        assert!(r.monotone);
    }

    #[test]
    fn crossing_pairs_fail_with_transposition() {
        // x ↦ 2x, but the images of 0.1 and 0.4 are exchanged
        let pairs = vec![
            (cfg(&[0.1]), cfg(&[0.8])),
            (cfg(&[0.2]), cfg(&[0.4])),
            (cfg(&[0.4]), cfg(&[0.2])),
        ];
        let r = check_cyclical_monotonicity(&pairs, 1000).unwrap();
        assert!(!r.monotone);
        assert!(r.witness_is_transposition());
        let r = check_cyclical_monotonicity_cycles(&pairs, 5).unwrap();
        assert!(!r.monotone);
        assert!(r.witness_is_transposition());
    }

    #[test]
    fn three_cycle_detected_without_transposition_violation() {
        // every swap of two rows is harmless, but the cyclic shift lowers the total
        let c = vec![vec![1.0, 0.5, 2.0], vec![2.0, 1.0, 0.5], vec![0.5, 2.0, 1.0]];
        let r = check_matrix_permutations(&c, 100);
        assert!(!r.monotone);
        assert!(!r.witness_is_transposition());
        let r = check_matrix_cycles(&c, 3);
        assert!(!r.monotone);
        let w = r.witness.unwrap();
        let total: f64 = w.iter().enumerate().map(|(i, &j)| c[i][j]).sum();
        assert!(total < 3.0);
        assert!(check_matrix_cycles(&c, 2).monotone);
    }

    #[test]
    fn infinite_pair_rejected() {
        let pairs = vec![(cfg(&[0.0]), cfg(&[1.0, 2.0]))];
        assert_eq!(check_cyclical_monotonicity(&pairs, 10), Err(Error::InfinitePair { index: 0 }));
    }

    #[test]
    fn next_permutation_enumerates_all() {
        let mut p = vec![0, 1, 2, 3];
        let mut count = 1;
        while next_permutation(&mut p) {
            count += 1;
        }
        assert_eq!(count, 24);
    }
}
