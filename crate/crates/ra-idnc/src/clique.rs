//! Maximum-weight clique search over coding graphs.
//!
//! Edges require a common rate, so the graph splits into independent
//! rate-group subproblems; each is solved on its own and the best result
//! wins. Small subproblems are solved exactly by branch and bound over the
//! maximal cliques (pivoted expansion with a positive-weight upper bound);
//! larger ones fall back to a deterministic greedy construction and the
//! result is flagged as non-exact. The returned clique is always maximal:
//! a transmission is decoded by every user able to, so a clique that could
//! still be extended does not describe a real transmission.
//!
//! Ties are broken the same way everywhere: higher weight, then higher rate,
//! then more vertices, then lexicographically smallest vertex list.

use crate::bitset::BitSet;
use crate::graph::RaIdncGraph;

pub const DEFAULT_EXACT_THRESHOLD: usize = 64;

/// A clique with its summed weight. `exact` reports whether every subproblem
/// that produced it was solved exactly.
#[derive(Clone, PartialEq, Debug)]
pub struct CliqueSolution {
    /// Vertex ids, ascending.
    pub vertices: Vec<usize>,
    pub weight: f64,
    pub exact: bool,
}

impl CliqueSolution {
    pub fn empty() -> Self {
        CliqueSolution {
            vertices: Vec::new(),
            weight: 0.0,
            exact: true,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }
}

/// True when every pair in `ids` is adjacent (empty and single sets count).
pub fn is_clique(graph: &RaIdncGraph, ids: &[usize]) -> bool {
    for (k, &i) in ids.iter().enumerate() {
        for &j in &ids[k + 1..] {
            if i == j || !graph.adjacent(i, j) {
                return false;
            }
        }
    }
    true
}

/// An arbitrary vertex-weighted undirected graph, for running the solver
/// outside the coding-graph structure.
#[derive(Clone, Debug)]
pub struct WeightedGraph {
    adj: Vec<BitSet>,
    weights: Vec<f64>,
}

impl WeightedGraph {
    pub fn new(num_vertices: usize, weights: Vec<f64>) -> Self {
        assert_eq!(weights.len(), num_vertices);
        WeightedGraph {
            adj: vec![BitSet::new(num_vertices); num_vertices],
            weights,
        }
    }

    pub fn add_edge(&mut self, i: usize, j: usize) {
        assert_ne!(i, j, "no self-loops");
        self.adj[i].insert(j);
        self.adj[j].insert(i);
    }

    pub fn num_vertices(&self) -> usize {
        self.adj.len()
    }

    pub fn adjacent(&self, i: usize, j: usize) -> bool {
        self.adj[i].contains(j)
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

/// Maximum-weight maximal clique of an arbitrary weighted graph.
pub fn max_weight_clique_in(graph: &WeightedGraph, exact_threshold: usize) -> CliqueSolution {
    let n = graph.num_vertices();
    if n == 0 {
        return CliqueSolution::empty();
    }
    let (ids, weight, exact) = if n <= exact_threshold {
        let (ids, weight) = solve_exact(&graph.adj, &graph.weights);
        (ids, weight, true)
    } else {
        let (ids, weight) = solve_greedy(&graph.adj, &graph.weights);
        (ids, weight, false)
    };
    CliqueSolution {
        vertices: ids,
        weight,
        exact,
    }
}

/// Maximum-weight maximal clique of a coding graph, decomposed by rate group.
pub fn max_weight_clique(graph: &RaIdncGraph) -> CliqueSolution {
    max_weight_clique_with_threshold(graph, DEFAULT_EXACT_THRESHOLD)
}

pub fn max_weight_clique_with_threshold(
    graph: &RaIdncGraph,
    exact_threshold: usize,
) -> CliqueSolution {
    solve_groups(graph, exact_threshold, false)
}

/// Maximum-cardinality clique for graphs whose weights are all equal; the
/// reported weight is still the sum of the stored vertex weights.
pub fn max_clique_equal_weights(graph: &RaIdncGraph) -> CliqueSolution {
    max_clique_equal_weights_with_threshold(graph, DEFAULT_EXACT_THRESHOLD)
}

pub fn max_clique_equal_weights_with_threshold(
    graph: &RaIdncGraph,
    exact_threshold: usize,
) -> CliqueSolution {
    solve_groups(graph, exact_threshold, true)
}

fn solve_groups(graph: &RaIdncGraph, exact_threshold: usize, unit_weights: bool) -> CliqueSolution {
    if graph.is_empty() {
        return CliqueSolution::empty();
    }

    let mut best: Option<(Vec<usize>, f64, f64)> = None; // ids, weight, rate
    let mut all_exact = true;

    for (rate, range) in graph.rate_groups() {
        let m = range.len();
        let mut adj = vec![BitSet::new(m); m];
        for (local_i, i) in range.clone().enumerate() {
            for j in graph.neighbors(i).iter() {
                if range.contains(&j) {
                    adj[local_i].insert(j - range.start);
                }
            }
        }
        let weights: Vec<f64> = if unit_weights {
            vec![1.0; m]
        } else {
            range.clone().map(|i| graph.vertex(i).weight).collect()
        };

        let (local_ids, _) = if m <= exact_threshold {
            solve_exact(&adj, &weights)
        } else {
            all_exact = false;
            solve_greedy(&adj, &weights)
        };

        let ids: Vec<usize> = local_ids.iter().map(|&i| i + range.start).collect();
        // Rank by the real stored weights even when the search used unit
        // weights.
        let real_weight = canonical_weight_of(graph, &ids);
        let rank_weight = if unit_weights {
            ids.len() as f64
        } else {
            real_weight
        };

        let better = match &best {
            None => true,
            Some((b_ids, b_weight, b_rate)) => {
                let b_rank = if unit_weights {
                    b_ids.len() as f64
                } else {
                    *b_weight
                };
                match rank_weight.total_cmp(&b_rank) {
                    std::cmp::Ordering::Greater => true,
                    std::cmp::Ordering::Less => false,
                    std::cmp::Ordering::Equal => match rate.total_cmp(b_rate) {
                        std::cmp::Ordering::Greater => true,
                        std::cmp::Ordering::Less => false,
                        std::cmp::Ordering::Equal => match ids.len().cmp(&b_ids.len()) {
                            std::cmp::Ordering::Greater => true,
                            std::cmp::Ordering::Less => false,
                            std::cmp::Ordering::Equal => ids < *b_ids,
                        },
                    },
                }
            }
        };
        if better {
            best = Some((ids, real_weight, *rate));
        }
    }

    match best {
        Some((vertices, weight, _)) => CliqueSolution {
            vertices,
            weight,
            exact: all_exact,
        },
        None => CliqueSolution::empty(),
    }
}

/// Every maximal clique of the graph, as sorted vertex-id lists.
pub fn enumerate_maximal_cliques(graph: &RaIdncGraph) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for (_, range) in graph.rate_groups() {
        let m = range.len();
        let mut adj = vec![BitSet::new(m); m];
        for (local_i, i) in range.clone().enumerate() {
            for j in graph.neighbors(i).iter() {
                if range.contains(&j) {
                    adj[local_i].insert(j - range.start);
                }
            }
        }
        let mut collector = |clique: &[usize]| {
            let mut ids: Vec<usize> = clique.iter().map(|&i| i + range.start).collect();
            ids.sort_unstable();
            out.push(ids);
        };
        let mut r = Vec::new();
        let mut p = BitSet::full(m);
        let mut x = BitSet::new(m);
        enumerate_rec(&adj, &mut r, &mut p, &mut x, &mut collector);
    }
    out
}

fn enumerate_rec(
    adj: &[BitSet],
    r: &mut Vec<usize>,
    p: &mut BitSet,
    x: &mut BitSet,
    emit: &mut impl FnMut(&[usize]),
) {
    if p.is_empty() && x.is_empty() {
        if !r.is_empty() {
            emit(r);
        }
        return;
    }
    let pivot = choose_pivot(adj, p, x);
    let ext: Vec<usize> = p.iter().filter(|&v| !adj[pivot].contains(v)).collect();
    for v in ext {
        let mut p2 = p.clone();
        p2.intersect_with(&adj[v]);
        let mut x2 = x.clone();
        x2.intersect_with(&adj[v]);
        r.push(v);
        enumerate_rec(adj, r, &mut p2, &mut x2, emit);
        r.pop();
        p.remove(v);
        x.insert(v);
    }
}

fn choose_pivot(adj: &[BitSet], p: &BitSet, x: &BitSet) -> usize {
    let mut best = usize::MAX;
    let mut best_deg = 0usize;
    for v in p.iter().chain(x.iter()) {
        let deg = p.intersection_count(&adj[v]);
        if best == usize::MAX || deg > best_deg || (deg == best_deg && v < best) {
            best = v;
            best_deg = deg;
        }
    }
    best
}

fn canonical_weight(ids_sorted: &[usize], weights: &[f64]) -> f64 {
    ids_sorted.iter().map(|&i| weights[i]).sum()
}

fn canonical_weight_of(graph: &RaIdncGraph, ids_sorted: &[usize]) -> f64 {
    ids_sorted.iter().map(|&i| graph.vertex(i).weight).sum()
}

fn candidate_better(a_ids: &[usize], a_w: f64, b_ids: &[usize], b_w: f64) -> bool {
    match a_w.total_cmp(&b_w) {
        std::cmp::Ordering::Greater => true,
        std::cmp::Ordering::Less => false,
        std::cmp::Ordering::Equal => match a_ids.len().cmp(&b_ids.len()) {
            std::cmp::Ordering::Greater => true,
            std::cmp::Ordering::Less => false,
            std::cmp::Ordering::Equal => a_ids < b_ids,
        },
    }
}

/// Exact search: expansion over maximal cliques with an upper bound from the
/// positive candidate weights. The bound keeps a small slack so that exact
/// ties are never pruned away and the tie-break stays deterministic.
fn solve_exact(adj: &[BitSet], weights: &[f64]) -> (Vec<usize>, f64) {
    let n = adj.len();
    let mut best_ids: Vec<usize> = Vec::new();
    let mut best_w = f64::NEG_INFINITY;
    let mut have_best = false;

    struct Ctx<'a> {
        adj: &'a [BitSet],
        weights: &'a [f64],
    }

    fn expand(
        ctx: &Ctx,
        r: &mut Vec<usize>,
        p: &mut BitSet,
        x: &mut BitSet,
        best_ids: &mut Vec<usize>,
        best_w: &mut f64,
        have_best: &mut bool,
    ) {
        if p.is_empty() && x.is_empty() {
            if r.is_empty() {
                return;
            }
            let mut ids = r.clone();
            ids.sort_unstable();
            let w = canonical_weight(&ids, ctx.weights);
            if !*have_best || candidate_better(&ids, w, best_ids, *best_w) {
                *best_ids = ids;
                *best_w = w;
                *have_best = true;
            }
            return;
        }

        if *have_best {
            let mut bound: f64 = r.iter().map(|&i| ctx.weights[i]).sum();
            bound += p.iter().map(|v| ctx.weights[v].max(0.0)).sum::<f64>();
            let slack = 1e-12 * best_w.abs().max(1.0);
            if bound < *best_w - slack {
                return;
            }
        }

        let pivot = choose_pivot(ctx.adj, p, x);
        let ext: Vec<usize> = p.iter().filter(|&v| !ctx.adj[pivot].contains(v)).collect();
        for v in ext {
            let mut p2 = p.clone();
            p2.intersect_with(&ctx.adj[v]);
            let mut x2 = x.clone();
            x2.intersect_with(&ctx.adj[v]);
            r.push(v);
            expand(ctx, r, &mut p2, &mut x2, best_ids, best_w, have_best);
            r.pop();
            p.remove(v);
            x.insert(v);
        }
    }

    let ctx = Ctx { adj, weights };
    let mut r = Vec::new();
    let mut p = BitSet::full(n);
    let mut x = BitSet::new(n);
    expand(
        &ctx,
        &mut r,
        &mut p,
        &mut x,
        &mut best_ids,
        &mut best_w,
        &mut have_best,
    );

    if !have_best {
        return (Vec::new(), 0.0);
    }
    (best_ids, best_w)
}

/// Deterministic greedy: grow a maximal clique from every seed vertex,
/// preferring heavier then better-connected then lower-id vertices, and keep
/// the best candidate under the common tie-break.
fn solve_greedy(adj: &[BitSet], weights: &[f64]) -> (Vec<usize>, f64) {
    let n = adj.len();
    let degrees: Vec<usize> = adj.iter().map(|a| a.count()).collect();
    let mut best_ids: Vec<usize> = Vec::new();
    let mut best_w = f64::NEG_INFINITY;
    let mut have_best = false;

    let pick = |cand: &BitSet| -> Option<usize> {
        let mut chosen: Option<usize> = None;
        for v in cand.iter() {
            chosen = Some(match chosen {
                None => v,
                Some(c) => {
                    let better = match weights[v].total_cmp(&weights[c]) {
                        std::cmp::Ordering::Greater => true,
                        std::cmp::Ordering::Less => false,
                        std::cmp::Ordering::Equal => {
                            degrees[v] > degrees[c] || (degrees[v] == degrees[c] && v < c)
                        }
                    };
                    if better {
                        v
                    } else {
                        c
                    }
                }
            });
        }
        chosen
    };

    for seed in 0..n {
        let mut ids = vec![seed];
        let mut cand = adj[seed].clone();
        while let Some(v) = pick(&cand) {
            ids.push(v);
            cand.intersect_with(&adj[v]);
        }
        ids.sort_unstable();
        let w = canonical_weight(&ids, weights);
        if !have_best || candidate_better(&ids, w, &best_ids, best_w) {
            best_ids = ids;
            best_w = w;
            have_best = true;
        }
    }

    if !have_best {
        return (Vec::new(), 0.0);
    }
    (best_ids, best_w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::CapacitySnapshot;
    use crate::graph::RaIdncGraph;
    use crate::model::{MessageSet, SideInfo};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn msgs(f: usize, idx: &[usize]) -> MessageSet {
        MessageSet::from_indices(f, idx).unwrap()
    }

    fn fixture_graph() -> RaIdncGraph {
        let side =
            SideInfo::from_has(3, vec![msgs(3, &[2, 3]), msgs(3, &[1]), msgs(3, &[3])]).unwrap();
        let caps = CapacitySnapshot::new(vec![4.0, 2.0, 2.0]).unwrap();
        // All users decisive, unit message size, no erasures.
        RaIdncGraph::build(&side, &caps, |_, _, r| r.ln())
    }

    #[test]
    fn is_clique_cases() {
        let g = fixture_graph();
        assert!(is_clique(&g, &[]));
        assert!(is_clique(&g, &[0]));
        let t = [
            g.find_vertex(0, 1, 2.0).unwrap(),
            g.find_vertex(1, 3, 2.0).unwrap(),
            g.find_vertex(2, 1, 2.0).unwrap(),
        ];
        assert!(is_clique(&g, &t));
        let bad = [
            g.find_vertex(1, 2, 2.0).unwrap(),
            g.find_vertex(1, 3, 2.0).unwrap(),
        ];
        assert!(!is_clique(&g, &bad));
    }

    #[test]
    fn fixture_best_clique_beats_lone_fast_vertex() {
        let g = fixture_graph();
        let sol = max_weight_clique(&g);
        assert!(sol.exact);
        let expected = {
            let mut t = vec![
                g.find_vertex(0, 1, 2.0).unwrap(),
                g.find_vertex(1, 3, 2.0).unwrap(),
                g.find_vertex(2, 1, 2.0).unwrap(),
            ];
            t.sort_unstable();
            t
        };
        assert_eq!(sol.vertices, expected);
        assert!((sol.weight - 3.0 * 2.0f64.ln()).abs() < 1e-12);
        // Exhaustive check over every subset of the six vertices.
        let mut best = f64::NEG_INFINITY;
        for mask in 1u32..(1 << g.num_vertices()) {
            let ids: Vec<usize> = (0..g.num_vertices())
                .filter(|&i| mask & (1 << i) != 0)
                .collect();
            if is_clique(&g, &ids) && g.adjacent_to_all(&ids).is_empty() {
                let w: f64 = ids.iter().map(|&i| g.vertex(i).weight).sum();
                best = best.max(w);
            }
        }
        assert!((sol.weight - best).abs() < 1e-12);
    }

    #[test]
    fn single_vertex_graph() {
        let side = SideInfo::from_wants(1, vec![msgs(1, &[1])]).unwrap();
        let caps = CapacitySnapshot::new(vec![2.0]).unwrap();
        let g = RaIdncGraph::build(&side, &caps, |_, _, _| 0.5);
        let sol = max_weight_clique(&g);
        assert_eq!(sol.vertices, vec![0]);
        assert_eq!(sol.weight, 0.5);
    }

    #[test]
    fn empty_graph_gives_empty_clique() {
        let side = SideInfo::from_wants(1, vec![msgs(1, &[])]).unwrap();
        let caps = CapacitySnapshot::new(vec![2.0]).unwrap();
        let g = RaIdncGraph::build(&side, &caps, |_, _, _| 1.0);
        let sol = max_weight_clique(&g);
        assert!(sol.is_empty());
        assert_eq!(sol.weight, 0.0);
    }

    #[test]
    fn rate_aware_choice_beats_user_count() {
        // Users 1 and 3 reach rate 2; user 2 is the rate-1 bottleneck. With
        // unit message size the three-user clique at rate 1 weighs zero, so
        // the two-user rate-2 clique wins.
        let side =
            SideInfo::from_wants(2, vec![msgs(2, &[1]), msgs(2, &[2]), msgs(2, &[2])]).unwrap();
        let caps = CapacitySnapshot::new(vec![2.0, 1.0, 2.0]).unwrap();
        let g = RaIdncGraph::build(&side, &caps, |_, _, r| r.ln());
        let sol = max_weight_clique(&g);
        assert!((sol.weight - 2.0 * 2.0f64.ln()).abs() < 1e-12);
        let users: Vec<usize> = sol.vertices.iter().map(|&i| g.vertex(i).user).collect();
        assert_eq!(users, vec![0, 2]);
        assert_eq!(g.vertex(sol.vertices[0]).rate_bps, 2.0);
    }

    fn random_weighted_graph(rng: &mut ChaCha8Rng, n: usize) -> WeightedGraph {
        let weights: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * 3.0 - 1.0).collect();
        let mut g = WeightedGraph::new(n, weights);
        for i in 0..n {
            for j in i + 1..n {
                if rng.random::<f64>() < 0.5 {
                    g.add_edge(i, j);
                }
            }
        }
        g
    }

    fn exhaustive_best(g: &WeightedGraph) -> (Vec<usize>, f64) {
        let n = g.num_vertices();
        let mut best: Option<(Vec<usize>, f64)> = None;
        'mask: for mask in 1u32..(1 << n) {
            let ids: Vec<usize> = (0..n).filter(|&i| mask & (1 << i) != 0).collect();
            for (k, &i) in ids.iter().enumerate() {
                for &j in &ids[k + 1..] {
                    if !g.adjacent(i, j) {
                        continue 'mask;
                    }
                }
            }
            // Maximality.
            for v in 0..n {
                if !ids.contains(&v) && ids.iter().all(|&i| g.adjacent(i, v)) {
                    continue 'mask;
                }
            }
            let w: f64 = ids.iter().map(|&i| g.weights()[i]).sum();
            let better = match &best {
                None => true,
                Some((b_ids, b_w)) => candidate_better(&ids, w, b_ids, *b_w),
            };
            if better {
                best = Some((ids, w));
            }
        }
        best.unwrap()
    }

    #[test]
    fn exact_solver_matches_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..100 {
            let n = rng.random_range(1..=10usize);
            let g = random_weighted_graph(&mut rng, n);
            let sol = max_weight_clique_in(&g, DEFAULT_EXACT_THRESHOLD);
            let (ids, w) = exhaustive_best(&g);
            assert!((sol.weight - w).abs() < 1e-9, "weight mismatch");
            assert_eq!(sol.vertices, ids, "tie-break mismatch");
        }
    }

    #[test]
    fn greedy_result_is_a_maximal_clique() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..50 {
            let n = rng.random_range(2..=24usize);
            let g = random_weighted_graph(&mut rng, n);
            let sol = max_weight_clique_in(&g, 1); // force the greedy path
            assert!(!sol.exact || n <= 1);
            for (k, &i) in sol.vertices.iter().enumerate() {
                for &j in &sol.vertices[k + 1..] {
                    assert!(g.adjacent(i, j));
                }
            }
            for v in 0..n {
                if !sol.vertices.contains(&v) {
                    assert!(
                        !sol.vertices.iter().all(|&i| g.adjacent(i, v)),
                        "not maximal"
                    );
                }
            }
        }
    }

    #[test]
    fn determinism_across_repeat_solves() {
        let mut rng = ChaCha8Rng::seed_from_u64(47);
        let g = random_weighted_graph(&mut rng, 14);
        let a = max_weight_clique_in(&g, DEFAULT_EXACT_THRESHOLD);
        let b = max_weight_clique_in(&g, DEFAULT_EXACT_THRESHOLD);
        assert_eq!(a, b);
    }

    #[test]
    fn equal_weight_solver_on_path_and_complete_graphs() {
        // u0 wants both messages; vertices (0,1) (0,2) (1,1) (2,2).
        // (0,1)-(1,1) share message 1, (1,1)-(2,2) cross-decode, and
        // (0,1)-(2,2) fails C2, so the induced triple forms a path.
        let caps = CapacitySnapshot::new(vec![1.0, 1.0, 1.0]).unwrap();
        let side =
            SideInfo::from_wants(2, vec![msgs(2, &[1, 2]), msgs(2, &[1]), msgs(2, &[2])]).unwrap();
        let g = RaIdncGraph::build(&side, &caps, |_, _, _| 1.0);
        let ids = [
            g.find_vertex(0, 1, 1.0).unwrap(),
            g.find_vertex(1, 1, 1.0).unwrap(),
            g.find_vertex(2, 2, 1.0).unwrap(),
        ];
        let (sub, _) = g.induced(&ids);
        assert!(sub.adjacent(0, 1) && sub.adjacent(1, 2) && !sub.adjacent(0, 2));
        let sol = max_clique_equal_weights(&sub);
        assert_eq!(sol.vertices, vec![0, 1]);

        // Complete graph on four users wanting the same message.
        let side = SideInfo::from_wants(1, vec![msgs(1, &[1]); 4]).unwrap();
        let caps = CapacitySnapshot::new(vec![1.0; 4]).unwrap();
        let g = RaIdncGraph::build(&side, &caps, |_, _, _| 1.0);
        let sol = max_clique_equal_weights(&g);
        assert_eq!(sol.vertices.len(), 4);

        // No edges at all: two wanted messages of a single user never pair
        // up, so a single best vertex remains.
        let side = SideInfo::from_wants(2, vec![msgs(2, &[1, 2])]).unwrap();
        let caps = CapacitySnapshot::new(vec![1.0]).unwrap();
        let g = RaIdncGraph::build(&side, &caps, |_, _, _| 1.0);
        let sol = max_clique_equal_weights(&g);
        assert_eq!(sol.vertices, vec![0]);
    }
}
