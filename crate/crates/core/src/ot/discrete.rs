use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matching::{cost_matrix, solve_assignment};
use crate::measure::{DiscreteMeasure, MASS_TOLERANCE};
use crate::stats::pairwise_sum;

/// Kantorovich potentials `F` (source) and `G` (target) with
/// `F_i + G_j ≤ cost_ij`, and `Σ a_i F_i + Σ b_j G_j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualCertificate {
    pub source_potential: Vec<f64>,
    pub target_potential: Vec<f64>,
    pub dual_value: f64,
    /// `max_ij (F_i + G_j − cost_ij)`; nonpositive up to rounding.
    pub max_violation: f64,
}

/// Optimal coupling between two discrete measures, stored as its nonzero
/// entries `(source index, target index, mass)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransportPlan {
    pub entries: Vec<(usize, usize, f64)>,
    pub cost: f64,
    pub dual: DualCertificate,
}

impl TransportPlan {
    /// Primal minus dual value.
    pub fn duality_gap(&self) -> f64 {
        self.cost - self.dual.dual_value
    }

    /// Largest absolute deviation of row and column sums from `a` and `b`.
    pub fn marginal_error(&self, a: &[f64], b: &[f64]) -> f64 {
        let mut rows = vec![0.0; a.len()];
        let mut cols = vec![0.0; b.len()];
        for &(i, j, m) in &self.entries {
            rows[i] += m;
            cols[j] += m;
        }
        rows.iter()
            .zip(a)
            .chain(cols.iter().zip(b))
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
    }

    /// Recomputes `Σ mass · cost_ij`.
    pub fn recompute_cost(&self, cost: &[Vec<f64>]) -> f64 {
        pairwise_sum(&self.entries.iter().map(|&(i, j, m)| m * cost[i][j]).collect::<Vec<_>>())
    }

    /// Source/target index pairs carrying positive mass.
    pub fn support(&self) -> Vec<(usize, usize)> {
        self.entries.iter().map(|&(i, j, _)| (i, j)).collect()
    }

    /// True when every source sends all its mass to a single target and the
    /// targets are distinct.
    pub fn is_permutation(&self) -> bool {
        let mut seen_i = std::collections::BTreeSet::new();
        let mut seen_j = std::collections::BTreeSet::new();
        self.entries.iter().all(|&(i, j, _)| seen_i.insert(i) && seen_j.insert(j))
    }
}

/// Optimal plan for the ground cost `½‖x − y‖²`.
///
/// Two uniform measures with the same number of atoms reduce to an assignment
/// problem and yield a permutation plan; everything else goes through the
/// transportation simplex.
pub fn solve_discrete_ot(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Result<TransportPlan> {
    if mu.is_empty() || nu.is_empty() {
        return Err(Error::EmptySupport);
    }
    if let (Some(a), Some(b)) = (mu.dim(), nu.dim()) {
        if a != b {
            return Err(Error::DimensionMismatch { expected: a, found: b });
        }
    }
    let cost = cost_matrix(mu.atoms(), nu.atoms());
    solve_transport(mu.weights(), nu.weights(), &cost)
}

/// Exact transportation problem on an arbitrary `m × n` cost matrix.
pub fn solve_transport(a: &[f64], b: &[f64], cost: &[Vec<f64>]) -> Result<TransportPlan> {
    let (m, n) = (a.len(), b.len());
    if m == 0 || n == 0 {
        return Err(Error::EmptySupport);
    }
    if cost.len() != m {
        return Err(Error::LengthMismatch { left: cost.len(), right: m });
    }
    if let Some(row) = cost.iter().find(|r| r.len() != n) {
        return Err(Error::LengthMismatch { left: row.len(), right: n });
    }
    for (index, &value) in a.iter().chain(b).enumerate() {
        if !(value.is_finite() && value >= 0.0) {
            return Err(Error::InvalidWeight { index, value });
        }
    }
    let (sa, sb) = (pairwise_sum(a), pairwise_sum(b));
    if (sa - sb).abs() > MASS_TOLERANCE * sa.max(sb).max(1.0) {
        return Err(Error::MassMismatch { left: sa, right: sb });
    }
    if sa <= 0.0 {
        return Err(Error::EmptySupport);
    }

    let uniform = m == n && a.windows(2).all(|w| w[0] == w[1]) && b.windows(2).all(|w| w[0] == w[1]);
    let (entries, u, _v) = if uniform {
        let asg = solve_assignment(cost);
        let w = a[0];
        let entries = asg.permutation.iter().enumerate().map(|(i, &j)| (i, j, w)).collect();
        (entries, asg.row_potential, asg.col_potential)
    } else {
        let b_scaled: Vec<f64> = b.iter().map(|x| x * sa / sb).collect();
        Simplex::new(a, &b_scaled, cost).solve()?
    };

    // c-transform of the source potential: exact dual feasibility
    let g: Vec<f64> = (0..n)
        .map(|j| (0..m).map(|i| cost[i][j] - u[i]).fold(f64::INFINITY, f64::min))
        .collect();
    let max_violation = (0..m)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| u[i] + g[j] - cost[i][j])
        .fold(f64::NEG_INFINITY, f64::max);
    let dual_terms: Vec<f64> = a.iter().zip(&u).map(|(x, y)| x * y).chain(b.iter().zip(&g).map(|(x, y)| x * y)).collect();
    let dual_value = pairwise_sum(&dual_terms);

    let mut plan = TransportPlan {
        entries,
        cost: 0.0,
        dual: DualCertificate { source_potential: u, target_potential: g, dual_value, max_violation },
    };
    plan.cost = plan.recompute_cost(cost);
    Ok(plan)
}

/// Plan entries with the row and column potentials.
type SimplexSolution = (Vec<(usize, usize, f64)>, Vec<f64>, Vec<f64>);

/// Transportation simplex: a spanning-tree basis of `m + n − 1` cells,
/// potentials from `u_i + v_j = c_ij` on the basis, and pivots on the most
/// negative reduced cost (Bland's rule after a pivot budget, which rules out
/// cycling under degeneracy).
struct Simplex<'a> {
    m: usize,
    n: usize,
    cost: &'a [Vec<f64>],
    flow: Vec<Vec<f64>>,
    basic: Vec<(usize, usize)>,
    is_basic: Vec<Vec<bool>>,
}

impl<'a> Simplex<'a> {
    fn new(a: &[f64], b: &[f64], cost: &'a [Vec<f64>]) -> Self {
        let (m, n) = (a.len(), b.len());
        let mut flow = vec![vec![0.0; n]; m];
        let mut is_basic = vec![vec![false; n]; m];
        let mut basic = Vec::with_capacity(m + n - 1);
        // north-west corner
        let (mut ra, mut rb) = (a.to_vec(), b.to_vec());
        let (mut i, mut j) = (0, 0);
        loop {
            let x = ra[i].min(rb[j]);
            flow[i][j] = x;
            is_basic[i][j] = true;
            basic.push((i, j));
            ra[i] -= x;
            rb[j] -= x;
            if i == m - 1 && j == n - 1 {
                break;
            }
            if j == n - 1 || (i < m - 1 && ra[i] <= rb[j]) {
                i += 1;
            } else {
                j += 1;
            }
        }
        Simplex { m, n, cost, flow, basic, is_basic }
    }

    fn adjacency(&self) -> Vec<Vec<(usize, usize)>> {
        // nodes: rows 0..m, columns m..m+n; payload is the basis index
        let mut adj = vec![Vec::new(); self.m + self.n];
        for (k, &(i, j)) in self.basic.iter().enumerate() {
            adj[i].push((self.m + j, k));
            adj[self.m + j].push((i, k));
        }
        adj
    }

    fn potentials(&self, adj: &[Vec<(usize, usize)>]) -> (Vec<f64>, Vec<f64>) {
        let (m, n) = (self.m, self.n);
        let mut pot = vec![f64::NAN; m + n];
        let mut stack = vec![0usize];
        pot[0] = 0.0;
        while let Some(node) = stack.pop() {
            for &(next, k) in &adj[node] {
                if pot[next].is_nan() {
                    let (i, j) = self.basic[k];
                    pot[next] = self.cost[i][j] - pot[node];
                    stack.push(next);
                }
            }
        }
        (pot[..m].to_vec(), pot[m..].to_vec())
    }

    /// Basis indices on the tree path from row `i` to column `j`, ordered
    /// starting next to column `j`.
    fn tree_path(&self, adj: &[Vec<(usize, usize)>], i: usize, j: usize) -> Vec<usize> {
        let total = self.m + self.n;
        let mut parent: Vec<Option<(usize, usize)>> = vec![None; total];
        let mut seen = vec![false; total];
        let mut stack = vec![i];
        seen[i] = true;
        while let Some(node) = stack.pop() {
            if node == self.m + j {
                break;
            }
            for &(next, k) in &adj[node] {
                if !seen[next] {
                    seen[next] = true;
                    parent[next] = Some((node, k));
                    stack.push(next);
                }
            }
        }
        let mut path = Vec::new();
        let mut node = self.m + j;
        while let Some((prev, k)) = parent[node] {
            path.push(k);
            node = prev;
        }
        path
    }

    fn solve(mut self) -> Result<SimplexSolution> {
        let scale = 1.0 + self.cost.iter().flatten().fold(0.0f64, |s, c| s.max(c.abs()));
        let tol = 1e-12 * scale;
        let dantzig_budget = 50 * (self.m + self.n) * (self.m + self.n).max(10);
        let hard_cap = dantzig_budget * 20;
        let mut iter = 0usize;
        loop {
            let adj = self.adjacency();
            let (u, v) = self.potentials(&adj);
            let bland = iter >= dantzig_budget;
            let mut entering: Option<(usize, usize)> = None;
            let mut best = -tol;
            'scan: for i in 0..self.m {
                for j in 0..self.n {
                    if self.is_basic[i][j] {
                        continue;
                    }
                    let r = self.cost[i][j] - u[i] - v[j];
                    if r < best {
                        entering = Some((i, j));
                        if bland {
                            break 'scan;
                        }
                        best = r;
                    }
                }
            }
            let Some((ei, ej)) = entering else {
                let entries = self
                    .basic
                    .iter()
                    .filter_map(|&(i, j)| {
                        let x = self.flow[i][j];
                        (x > 0.0).then_some((i, j, x))
                    })
                    .collect::<Vec<_>>();
                let mut entries = entries;
                entries.sort_by_key(|e| (e.0, e.1));
                return Ok((entries, u, v));
            };
            iter += 1;
            if iter > hard_cap {
                return Err(Error::Solver(format!("transportation simplex exceeded {hard_cap} pivots")));
            }

            let path = self.tree_path(&adj, ei, ej);
            // odd positions along the path from column ej lose mass
            let mut leave: Option<(usize, f64)> = None;
            for (pos, &k) in path.iter().enumerate() {
                if pos % 2 == 0 {
                    let (i, j) = self.basic[k];
                    let x = self.flow[i][j];
                    let better = match leave {
                        None => true,
                        Some((lk, lx)) => x < lx || (x == lx && self.basic[k] < self.basic[lk]),
                    };
                    if better {
                        leave = Some((k, x));
                    }
                }
            }
            let (lk, theta) = leave.expect("cycle has a decreasing cell");
            for (pos, &k) in path.iter().enumerate() {
                let (i, j) = self.basic[k];
                if pos % 2 == 0 {
                    self.flow[i][j] = (self.flow[i][j] - theta).max(0.0);
                } else {
                    self.flow[i][j] += theta;
                }
            }
            let (li, lj) = self.basic[lk];
            self.flow[li][lj] = 0.0;
            self.is_basic[li][lj] = false;
            self.flow[ei][ej] = theta;
            self.is_basic[ei][ej] = true;
            self.basic[lk] = (ei, ej);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::point::Point;

    fn line(xs: &[f64]) -> Vec<Point> {
        xs.iter().map(|&x| Point::scalar(x).unwrap()).collect()
    }

    #[test]
    fn identical_measures_cost_zero() {
        let mu = DiscreteMeasure::new(line(&[0.0, 1.0, 3.0]), vec![0.2, 0.5, 0.3]).unwrap();
        let plan = solve_discrete_ot(&mu, &mu).unwrap();
        assert!(plan.cost.abs() < 1e-15);
        assert_eq!(plan.entries, vec![(0, 0, 0.2), (1, 1, 0.5), (2, 2, 0.3)]);
    }

    #[test]
    fn uniform_two_point_shift() {
        // ½(4 + 4)/2 = 2
        let mu = DiscreteMeasure::uniform(line(&[0.0, 1.0]), 1.0).unwrap();
        let nu = DiscreteMeasure::uniform(line(&[2.0, 3.0]), 1.0).unwrap();
        let plan = solve_discrete_ot(&mu, &nu).unwrap();
        assert!((plan.cost - 2.0).abs() < 1e-12);
        assert!(plan.is_permutation());
        assert_eq!(plan.support(), vec![(0, 0), (1, 1)]);
        assert!(plan.duality_gap().abs() < 1e-12);
    }

    #[test]
    fn splitting_mass() {
        // one source atom at 0 with mass 1 split to 1 and -1
        let mu = DiscreteMeasure::new(line(&[0.0]), vec![1.0]).unwrap();
        let nu = DiscreteMeasure::new(line(&[-1.0, 1.0]), vec![0.25, 0.75]).unwrap();
        let plan = solve_discrete_ot(&mu, &nu).unwrap();
        assert!((plan.cost - 0.5).abs() < 1e-15);
        assert!(plan.marginal_error(mu.weights(), nu.weights()) < 1e-15);
    }

    #[test]
    fn small_lp_matches_hand_solution() {
        // sources 0 (0.5), 1 (0.5); targets 0 (0.25), 2 (0.75)
        // monotone plan: 0→0 0.25, 0→2 0.25, 1→2 0.5; cost ½(0 + 0.25·4 + 0.5·1) = 0.75
        let mu = DiscreteMeasure::new(line(&[0.0, 1.0]), vec![0.5, 0.5]).unwrap();
        let nu = DiscreteMeasure::new(line(&[0.0, 2.0]), vec![0.25, 0.75]).unwrap();
        let plan = solve_discrete_ot(&mu, &nu).unwrap();
        assert!((plan.cost - 0.75).abs() < 1e-12);
        assert!(plan.duality_gap().abs() < 1e-12);
        assert!(plan.dual.max_violation <= 1e-15);
    }

    #[test]
    fn rejects_bad_inputs() {
        let mu = DiscreteMeasure::new(line(&[0.0]), vec![1.0]).unwrap();
        let nu = DiscreteMeasure::new(line(&[0.0]), vec![2.0]).unwrap();
        assert!(matches!(solve_discrete_ot(&mu, &nu), Err(Error::MassMismatch { .. })));
        let empty = DiscreteMeasure::new(vec![], vec![]).unwrap();
        assert_eq!(solve_discrete_ot(&empty, &mu), Err(Error::EmptySupport));
    }

    #[test]
    fn degenerate_zero_weights() {
        let mu = DiscreteMeasure::new(line(&[0.0, 1.0, 2.0]), vec![0.5, 0.0, 0.5]).unwrap();
        let nu = DiscreteMeasure::new(line(&[0.0, 2.0]), vec![0.5, 0.5]).unwrap();
        let plan = solve_discrete_ot(&mu, &nu).unwrap();
        assert!(plan.cost.abs() < 1e-15);
        assert!(plan.duality_gap().abs() < 1e-12);
    }
}
