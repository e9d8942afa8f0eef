//! The rate-aware coding graph.
//!
//! One vertex exists per feasible (user, wanted message, achievable rate)
//! triple. Two vertices are adjacent when they share the same rate (C1) and
//! their messages are mutually decodable (C2): either the same message, or
//! each message already held by the other user. Every maximal clique then
//! corresponds to one feasible transmission: XOR the distinct messages of its
//! vertices and send at the common rate; exactly the clique's users can
//! instantly decode it.

use std::ops::Range;

use crate::bitset::BitSet;
use crate::channel::{CapacitySnapshot, ErasureModel};
use crate::model::{MessageSet, SideInfo};

/// A (user, wanted message, achievable rate) association with its objective
/// weight on natural-log scale.
#[derive(Clone, PartialEq, Debug)]
pub struct Vertex {
    pub user: usize,
    pub message: usize,
    pub rate_bps: f64,
    pub weight: f64,
}

/// The candidate rate pool: the distinct user capacities of the snapshot,
/// sorted descending. Each user can employ exactly the pool rates not above
/// its own capacity.
pub fn candidate_rates(snapshot: &CapacitySnapshot) -> Vec<f64> {
    let mut rates: Vec<f64> = snapshot.rates().to_vec();
    rates.sort_by(|a, b| b.partial_cmp(a).expect("capacities are finite"));
    rates.dedup();
    rates
}

#[derive(Clone, PartialEq, Debug)]
pub struct RaIdncGraph {
    vertices: Vec<Vertex>,
    adj: Vec<BitSet>,
    groups: Vec<(f64, Range<usize>)>,
    rates: Vec<f64>,
}

impl RaIdncGraph {
    /// Builds the graph for the given side information and capacities.
    /// `weight_fn` receives (user, message, rate) for every vertex created.
    /// All-empty Wants sets produce the empty graph.
    pub fn build(
        side: &SideInfo,
        snapshot: &CapacitySnapshot,
        mut weight_fn: impl FnMut(usize, usize, f64) -> f64,
    ) -> Self {
        let rates = candidate_rates(snapshot);
        let mut vertices = Vec::new();
        let mut groups = Vec::new();

        for &r in &rates {
            let start = vertices.len();
            for u in 0..side.num_users() {
                if snapshot.rate_bps(u) < r {
                    continue;
                }
                for f in side.wants(u).iter() {
                    vertices.push(Vertex {
                        user: u,
                        message: f,
                        rate_bps: r,
                        weight: weight_fn(u, f, r),
                    });
                }
            }
            if vertices.len() > start {
                groups.push((r, start..vertices.len()));
            }
        }

        let n = vertices.len();
        let mut adj = vec![BitSet::new(n); n];
        for (_, range) in &groups {
            for i in range.clone() {
                for j in i + 1..range.end {
                    let (a, b) = (&vertices[i], &vertices[j]);
                    if a.user == b.user {
                        continue;
                    }
                    let coded_pair = a.message == b.message
                        || (side.has(b.user).contains(a.message)
                            && side.has(a.user).contains(b.message));
                    if coded_pair {
                        adj[i].insert(j);
                        adj[j].insert(i);
                    }
                }
            }
        }

        RaIdncGraph {
            vertices,
            adj,
            groups,
            rates,
        }
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertex(&self, id: usize) -> &Vertex {
        &self.vertices[id]
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn adjacent(&self, i: usize, j: usize) -> bool {
        self.adj[i].contains(j)
    }

    pub fn neighbors(&self, id: usize) -> &BitSet {
        &self.adj[id]
    }

    pub fn candidate_rate_pool(&self) -> &[f64] {
        &self.rates
    }

    /// Rate groups in descending rate order; vertex ids inside a group are
    /// contiguous.
    pub fn rate_groups(&self) -> &[(f64, Range<usize>)] {
        &self.groups
    }

    /// Vertex id of the (user, message, rate) triple, if present.
    pub fn find_vertex(&self, user: usize, message: usize, rate_bps: f64) -> Option<usize> {
        self.vertices
            .iter()
            .position(|v| v.user == user && v.message == message && v.rate_bps == rate_bps)
    }

    /// Ids of vertices outside `ids` that are adjacent to every member of
    /// `ids`.
    pub fn adjacent_to_all(&self, ids: &[usize]) -> Vec<usize> {
        if ids.is_empty() {
            return (0..self.num_vertices()).collect();
        }
        let mut common = self.adj[ids[0]].clone();
        for &i in &ids[1..] {
            common.intersect_with(&self.adj[i]);
        }
        for &i in ids {
            common.remove(i);
        }
        common.to_vec()
    }

    /// Subgraph induced by `keep` (ids into this graph, ascending order not
    /// required). Returns the subgraph and the map from new ids to old ids.
    pub fn induced(&self, keep: &[usize]) -> (RaIdncGraph, Vec<usize>) {
        let mut ids: Vec<usize> = keep.to_vec();
        ids.sort_unstable();
        ids.dedup();
        let n = ids.len();
        let mut vertices = Vec::with_capacity(n);
        let mut adj = vec![BitSet::new(n); n];
        for (new_i, &old_i) in ids.iter().enumerate() {
            vertices.push(self.vertices[old_i].clone());
            for (new_j, &old_j) in ids.iter().enumerate().skip(new_i + 1) {
                if self.adj[old_i].contains(old_j) {
                    adj[new_i].insert(new_j);
                    adj[new_j].insert(new_i);
                }
            }
        }
        let mut groups: Vec<(f64, Range<usize>)> = Vec::new();
        for (i, v) in vertices.iter().enumerate() {
            match groups.last_mut() {
                Some((r, range)) if *r == v.rate_bps => range.end = i + 1,
                _ => groups.push((v.rate_bps, i..i + 1)),
            }
        }
        let rates = groups.iter().map(|(r, _)| *r).collect();
        (
            RaIdncGraph {
                vertices,
                adj,
                groups,
                rates,
            },
            ids,
        )
    }

    /// The transmission encoded by a clique: XOR of the distinct messages of
    /// its vertices, at the common rate, aimed at the vertices' users.
    pub fn clique_transmission(
        &self,
        ids: &[usize],
        num_messages: usize,
    ) -> (MessageSet, f64, Vec<usize>) {
        let mut combo = MessageSet::empty(num_messages);
        let mut users = Vec::with_capacity(ids.len());
        let mut rate = 0.0;
        for &i in ids {
            let v = &self.vertices[i];
            combo.insert(v.message);
            users.push(v.user);
            rate = v.rate_bps;
        }
        users.sort_unstable();
        users.dedup();
        (combo, rate, users)
    }

    /// Line-based text dump: one `v <id> <user> <message> <rate> <weight>`
    /// line per vertex, then one `e <i> <j>` line per edge.
    pub fn debug_text(&self) -> String {
        let mut out = String::new();
        for (i, v) in self.vertices.iter().enumerate() {
            out.push_str(&format!(
                "v {} {} {} {} {}\n",
                i, v.user, v.message, v.rate_bps, v.weight
            ));
        }
        for i in 0..self.num_vertices() {
            for j in self.adj[i].iter() {
                if j > i {
                    out.push_str(&format!("e {i} {j}\n"));
                }
            }
        }
        out
    }
}

/// Objective weight of one vertex: `ln(rate / (eps * N))` for a decisive
/// user, with the erasure factor dropped when the model never erases
/// feasible-rate transmissions; zero for non-decisive users.
pub fn vertex_weight(
    rate_bps: f64,
    user_capacity_bps: f64,
    decisive: bool,
    erasure: &ErasureModel,
    msg_size_bits: u64,
) -> f64 {
    if !decisive {
        return 0.0;
    }
    let eps = erasure.erasure_probability(rate_bps, user_capacity_bps);
    let n = msg_size_bits as f64;
    if eps == 0.0 {
        (rate_bps / n).ln()
    } else {
        (rate_bps / (eps * n)).ln()
    }
}

/// Subgraph for one criticality layer: vertices whose user is in
/// `layer_users`, at the clique's rate, adjacent to every clique member.
/// Every vertex weight is reset to `ln(rate / N)`.
pub fn build_layer_graph(
    graph: &RaIdncGraph,
    clique: &[usize],
    layer_users: &[usize],
    msg_size_bits: u64,
) -> Result<(RaIdncGraph, Vec<usize>), GraphError> {
    if !crate::clique::is_clique(graph, clique) {
        return Err(GraphError::NotAClique);
    }
    if clique.is_empty() {
        return Err(GraphError::EmptyClique);
    }
    let rate = graph.vertex(clique[0]).rate_bps;
    let keep: Vec<usize> = graph
        .adjacent_to_all(clique)
        .into_iter()
        .filter(|&i| {
            let v = graph.vertex(i);
            v.rate_bps == rate && layer_users.contains(&v.user)
        })
        .collect();
    let (mut sub, ids) = graph.induced(&keep);
    let w = (rate / msg_size_bits as f64).ln();
    for v in sub.vertices.iter_mut() {
        v.weight = w;
    }
    Ok((sub, ids))
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum GraphError {
    NotAClique,
    EmptyClique,
}

impl std::fmt::Display for GraphError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GraphError::NotAClique => write!(f, "vertex set is not a clique"),
            GraphError::EmptyClique => write!(f, "clique must not be empty"),
        }
    }
}

impl std::error::Error for GraphError {}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::MessageSet;

    fn msgs(f: usize, idx: &[usize]) -> MessageSet {
        MessageSet::from_indices(f, idx).unwrap()
    }

    /// Three users, three messages: user 1 holds {2,3}, user 2 holds {1},
    /// user 3 holds {3}; capacities (4, 2, 2).
    pub(crate) fn fixture() -> (SideInfo, CapacitySnapshot) {
        let side =
            SideInfo::from_has(3, vec![msgs(3, &[2, 3]), msgs(3, &[1]), msgs(3, &[3])]).unwrap();
        let caps = CapacitySnapshot::new(vec![4.0, 2.0, 2.0]).unwrap();
        (side, caps)
    }

    #[test]
    fn candidate_rates_dedup_and_filter() {
        let caps = CapacitySnapshot::new(vec![4.0, 2.0, 2.0]).unwrap();
        assert_eq!(candidate_rates(&caps), vec![4.0, 2.0]);

        let caps = CapacitySnapshot::new(vec![3.0, 3.0, 3.0]).unwrap();
        assert_eq!(candidate_rates(&caps), vec![3.0]);

        let caps = CapacitySnapshot::new(vec![5.0, 3.0, 1.0]).unwrap();
        let pool = candidate_rates(&caps);
        let third: Vec<f64> = pool.iter().copied().filter(|&r| r <= 1.0).collect();
        assert_eq!(third, vec![1.0]);
    }

    #[test]
    fn fixture_vertices_and_edges_match_pairwise_rule() {
        let (side, caps) = fixture();
        let graph = RaIdncGraph::build(&side, &caps, |_, _, _| 0.0);

        let expected = [
            (0usize, 1usize, 4.0f64),
            (0, 1, 2.0),
            (1, 2, 2.0),
            (1, 3, 2.0),
            (2, 1, 2.0),
            (2, 2, 2.0),
        ];
        assert_eq!(graph.num_vertices(), expected.len());
        for &(u, f, r) in &expected {
            assert!(
                graph.find_vertex(u, f, r).is_some(),
                "missing vertex ({u},{f},{r})"
            );
        }

        // Every adjacency must agree with a direct evaluation of C1 and C2.
        for i in 0..graph.num_vertices() {
            for j in 0..graph.num_vertices() {
                if i == j {
                    continue;
                }
                let (a, b) = (graph.vertex(i), graph.vertex(j));
                let c1 = a.rate_bps == b.rate_bps;
                let c2 = a.message == b.message
                    || (side.has(b.user).contains(a.message)
                        && side.has(a.user).contains(b.message));
                let expected_edge = c1 && c2 && a.user != b.user;
                assert_eq!(graph.adjacent(i, j), expected_edge, "pair {i},{j}");
            }
        }

        // The coding triple {user1:msg1, user2:msg3, user3:msg1} at rate 2.
        let t = [
            graph.find_vertex(0, 1, 2.0).unwrap(),
            graph.find_vertex(1, 3, 2.0).unwrap(),
            graph.find_vertex(2, 1, 2.0).unwrap(),
        ];
        assert!(graph.adjacent(t[0], t[1]));
        assert!(graph.adjacent(t[0], t[2]));
        assert!(graph.adjacent(t[1], t[2]));
        // Maximal: nothing else is adjacent to all three.
        assert!(graph.adjacent_to_all(&t).is_empty());
    }

    #[test]
    fn single_user_graph_has_no_edges() {
        let side = SideInfo::from_wants(2, vec![msgs(2, &[1])]).unwrap();
        let caps = CapacitySnapshot::new(vec![2.0]).unwrap();
        let graph = RaIdncGraph::build(&side, &caps, |_, _, _| 1.0);
        assert_eq!(graph.num_vertices(), 1);
        assert!(graph.adjacent_to_all(&[0]).is_empty());
    }

    #[test]
    fn shared_single_want_connects_users() {
        let side = SideInfo::from_wants(2, vec![msgs(2, &[1]), msgs(2, &[1])]).unwrap();
        let caps = CapacitySnapshot::new(vec![2.0, 2.0]).unwrap();
        let graph = RaIdncGraph::build(&side, &caps, |_, _, _| 0.0);
        assert_eq!(graph.num_vertices(), 2);
        assert!(graph.adjacent(0, 1));
    }

    #[test]
    fn empty_wants_give_empty_graph() {
        let side = SideInfo::from_wants(2, vec![msgs(2, &[]), msgs(2, &[])]).unwrap();
        let caps = CapacitySnapshot::new(vec![1.0, 1.0]).unwrap();
        let graph = RaIdncGraph::build(&side, &caps, |_, _, _| 0.0);
        assert!(graph.is_empty());
    }

    #[test]
    fn weight_rule() {
        let perfect = ErasureModel::Perfect;
        assert_eq!(vertex_weight(2.0, 4.0, true, &perfect, 1), 2.0f64.ln());
        assert_eq!(vertex_weight(2.0, 4.0, false, &perfect, 1), 0.0);
        let offset = ErasureModel::Offset(0.1);
        assert!((vertex_weight(2.0, 4.0, true, &offset, 1) - 20.0f64.ln()).abs() < 1e-12);
        // Zero offset degenerates to the erasure-free form.
        let zero = ErasureModel::Offset(0.0);
        assert_eq!(vertex_weight(2.0, 4.0, true, &zero, 1), 2.0f64.ln());
    }

    #[test]
    fn layer_graph_of_saturated_clique_is_empty() {
        let (side, caps) = fixture();
        let graph = RaIdncGraph::build(&side, &caps, |_, _, _| 0.0);
        let t = [
            graph.find_vertex(0, 1, 2.0).unwrap(),
            graph.find_vertex(1, 3, 2.0).unwrap(),
            graph.find_vertex(2, 1, 2.0).unwrap(),
        ];
        let (sub, _) = build_layer_graph(&graph, &t, &[0, 1, 2], 1).unwrap();
        assert!(sub.is_empty());
    }

    #[test]
    fn layer_graph_empty_when_no_layer_users() {
        let (side, caps) = fixture();
        let graph = RaIdncGraph::build(&side, &caps, |_, _, _| 0.0);
        let a = graph.find_vertex(0, 1, 2.0).unwrap();
        let (sub, _) = build_layer_graph(&graph, &[a], &[], 1).unwrap();
        assert!(sub.is_empty());
    }

    #[test]
    fn layer_graph_at_top_rate_is_empty_for_fixture() {
        // Only user 1 reaches rate 4, so a clique at rate 4 has no extension.
        let (side, caps) = fixture();
        let graph = RaIdncGraph::build(&side, &caps, |_, _, _| 0.0);
        let a = graph.find_vertex(0, 1, 4.0).unwrap();
        let rate4: Vec<usize> = (0..graph.num_vertices())
            .filter(|&i| graph.vertex(i).rate_bps == 4.0)
            .collect();
        assert_eq!(rate4, vec![a]);
        let (sub, _) = build_layer_graph(&graph, &[a], &[1, 2], 1).unwrap();
        assert!(sub.is_empty());
    }

    #[test]
    fn layer_graph_rejects_non_clique() {
        let (side, caps) = fixture();
        let graph = RaIdncGraph::build(&side, &caps, |_, _, _| 0.0);
        // Two vertices of the same user are never adjacent.
        let a = graph.find_vertex(1, 2, 2.0).unwrap();
        let b = graph.find_vertex(1, 3, 2.0).unwrap();
        assert_eq!(
            build_layer_graph(&graph, &[a, b], &[0], 1),
            Err(GraphError::NotAClique)
        );
    }

    #[test]
    fn debug_text_round_trips_structure() {
        let (side, caps) = fixture();
        let graph = RaIdncGraph::build(&side, &caps, |_, _, _| 1.5);
        let text = graph.debug_text();
        let v_lines = text.lines().filter(|l| l.starts_with("v ")).count();
        let e_lines = text.lines().filter(|l| l.starts_with("e ")).count();
        assert_eq!(v_lines, graph.num_vertices());
        let mut edges = 0;
        for i in 0..graph.num_vertices() {
            edges += graph.neighbors(i).count();
        }
        assert_eq!(e_lines, edges / 2);
    }

    #[test]
    fn debug_text_fixture_frozen() {
        let (side, caps) = fixture();
        let graph = RaIdncGraph::build(&side, &caps, |_, _, _| 0.0);
        assert_eq!(
            graph.debug_text(),
            "v 0 0 1 4 0\n\
             v 1 0 1 2 0\n\
             v 2 1 2 2 0\n\
             v 3 1 3 2 0\n\
             v 4 2 1 2 0\n\
             v 5 2 2 2 0\n\
             e 1 2\n\
             e 1 3\n\
             e 1 4\n\
             e 2 5\n\
             e 3 4\n"
        );
    }
}
