//! Exact minimum-cost maximum-cardinality matching on the triangle dual
//! graph, via the blossom algorithm (Galil / van Rantwijk formulation).
//!
//! Costs are scaled to integers so the matching is exact and deterministic;
//! the interface penalty dominates any quality term by four orders of
//! magnitude, so well-shaped but penalized pairs are only matched when
//! cardinality forces them.

use crate::scalar::Real;

/// Largest representable pair cost: (1 - beta) + zeta <= 1 + 10000.
const COST_CEILING: f64 = 10002.0;
/// Quality resolution of the integer scaling (beta steps of ~1.2e-4).
const SCALE: f64 = 8192.0;

/// An undirected dual edge between two triangles with a merge cost.
#[derive(Debug, Clone, Copy)]
pub struct DualEdge<R> {
    pub a: usize,
    pub b: usize,
    pub cost: R,
}

pub(crate) fn cost_to_weight(cost: f64) -> i32 {
    ((COST_CEILING - cost.min(COST_CEILING).max(0.0)) * SCALE).round() as i32
}

/// Maximum-cardinality matching minimizing total cost among maximum
/// matchings. Returns the mate of each node (`None` if unmatched).
pub fn min_cost_max_cardinality<R: Real>(nodes: usize, edges: &[DualEdge<R>]) -> Vec<Option<usize>> {
    if nodes == 0 || edges.is_empty() {
        return vec![None; nodes];
    }
    let mut sorted: Vec<&DualEdge<R>> = edges.iter().collect();
    sorted.sort_by_key(|e| (e.a.min(e.b), e.a.max(e.b)));
    let input: mwmatching::Edges = sorted
        .iter()
        .map(|e| {
            (
                e.a,
                e.b,
                cost_to_weight(e.cost.to_f64().expect("finite cost")),
            )
        })
        .collect();
    let mates = mwmatching::Matching::new(input).max_cardinality().solve();
    (0..nodes)
        .map(|v| match mates.get(v) {
            Some(&m) if m != usize::MAX => Some(m),
            _ => None,
        })
        .collect()
}

/// Total integer weight and cardinality of a matching, for optimality checks.
pub fn matching_stats<R: Real>(edges: &[DualEdge<R>], mates: &[Option<usize>]) -> (usize, i64) {
    let mut cardinality = 0usize;
    let mut weight = 0i64;
    for e in edges {
        if mates.get(e.a).copied().flatten() == Some(e.b) {
            cardinality += 1;
            weight += cost_to_weight(e.cost.to_f64().expect("finite")) as i64;
        }
    }
    (cardinality, weight)
}

/// Exhaustive matching search: maximum cardinality, then maximum total
/// weight (= minimum cost). Only usable on small graphs; kept as the
/// optimality oracle for tests.
pub fn brute_force_best<R: Real>(nodes: usize, edges: &[DualEdge<R>]) -> (usize, i64) {
    fn recurse(
        v: usize,
        nodes: usize,
        adj: &[Vec<(usize, i64)>],
        used: &mut [bool],
        best: &mut (usize, i64),
        cur: (usize, i64),
    ) {
        if v == nodes {
            if cur.0 > best.0 || (cur.0 == best.0 && cur.1 > best.1) {
                *best = cur;
            }
            return;
        }
        if used[v] {
            recurse(v + 1, nodes, adj, used, best, cur);
            return;
        }
        // Leave v unmatched.
        used[v] = true;
        recurse(v + 1, nodes, adj, used, best, cur);
        used[v] = false;
        for &(w, wt) in &adj[v] {
            if w > v && !used[w] {
                used[v] = true;
                used[w] = true;
                recurse(v + 1, nodes, adj, used, best, (cur.0 + 1, cur.1 + wt));
                used[v] = false;
                used[w] = false;
            }
        }
    }
    let mut adj = vec![Vec::new(); nodes];
    for e in edges {
        let w = cost_to_weight(e.cost.to_f64().expect("finite")) as i64;
        adj[e.a].push((e.b, w));
        adj[e.b].push((e.a, w));
    }
    let mut used = vec![false; nodes];
    let mut best = (0usize, i64::MIN);
    recurse(0, nodes, &adj, &mut used, &mut best, (0, 0));
    if best.1 == i64::MIN {
        best.1 = 0;
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn e(a: usize, b: usize, cost: f64) -> DualEdge<f64> {
        DualEdge { a, b, cost }
    }

    #[test]
    fn two_triangles_merge() {
        let mates = min_cost_max_cardinality(2, &[e(0, 1, 0.2)]);
        assert_eq!(mates, vec![Some(1), Some(0)]);
    }

    #[test]
    fn odd_count_leaves_one_unmatched() {
        let edges = [e(0, 1, 0.1), e(1, 2, 0.1)];
        let mates = min_cost_max_cardinality(3, &edges);
        let unmatched = mates.iter().filter(|m| m.is_none()).count();
        assert_eq!(unmatched, 1);
    }

    #[test]
    fn penalty_steers_partner_choice() {
        // Four triangles in a path; the middle pairing is penalized, the
        // outer two pairings are mediocre but unpenalized.
        let edges = [
            e(0, 1, 0.9),
            e(1, 2, 10000.1), // zeta-penalized
            e(2, 3, 0.9),
        ];
        let mates = min_cost_max_cardinality(4, &edges);
        assert_eq!(mates, vec![Some(1), Some(0), Some(3), Some(2)]);
    }

    #[test]
    fn forced_penalty_still_matches_for_cardinality() {
        let edges = [e(0, 1, 10000.5)];
        let mates = min_cost_max_cardinality(2, &edges);
        assert_eq!(mates, vec![Some(1), Some(0)]);
    }

    #[test]
    fn matches_brute_force_on_random_sparse_graphs() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..60 {
            let n = rng.gen_range(2..11usize);
            let mut edges = Vec::new();
            for a in 0..n {
                for b in a + 1..n {
                    if rng.gen_bool(0.45) {
                        let cost = if rng.gen_bool(0.15) {
                            10000.0 + rng.gen_range(0.0..1.0)
                        } else {
                            rng.gen_range(0.0..1.0)
                        };
                        edges.push(e(a, b, cost));
                    }
                }
            }
            if edges.is_empty() {
                continue;
            }
            let mates = min_cost_max_cardinality(n, &edges);
            let (card, weight) = matching_stats(&edges, &mates);
            let (bc, bw) = brute_force_best(n, &edges);
            assert_eq!(card, bc, "cardinality differs on n={n} {edges:?}");
            assert_eq!(weight, bw, "weight differs on n={n}");
        }
    }

    #[test]
    fn deterministic_output() {
        let edges = [e(0, 1, 0.3), e(1, 2, 0.3), e(2, 3, 0.3), e(3, 0, 0.3)];
        let a = min_cost_max_cardinality(4, &edges);
        let b = min_cost_max_cardinality(4, &edges);
        assert_eq!(a, b);
    }
}
