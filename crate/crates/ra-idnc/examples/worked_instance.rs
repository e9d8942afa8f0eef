//! Walks through the coding graph on a small instance: three users, three
//! messages, capacities (4, 2, 2).
//!
//! User 0 holds {2,3} and wants {1}; user 1 holds {1} and wants {2,3};
//! user 2 holds {3} and wants {1,2}. Sending message 1 alone at rate 4
//! serves only user 0, while XOR'ing messages 1 and 3 at rate 2 is decodable
//! by all three users at once — and that is what the selector picks.

use ra_idnc::channel::CapacitySnapshot;
use ra_idnc::clique::{enumerate_maximal_cliques, max_weight_clique};
use ra_idnc::graph::{vertex_weight, RaIdncGraph};
use ra_idnc::model::{MessageSet, NetworkState, SideInfo};
use ra_idnc::sched::{brute_force_best, select_ra_idnc, SchedulerOpts};
use ra_idnc::ErasureModel;

fn main() {
    let side = SideInfo::from_has(
        3,
        vec![
            MessageSet::from_indices(3, &[2, 3]).unwrap(),
            MessageSet::from_indices(3, &[1]).unwrap(),
            MessageSet::from_indices(3, &[3]).unwrap(),
        ],
    )
    .unwrap();
    let caps = CapacitySnapshot::new(vec![4.0, 2.0, 2.0]).unwrap();

    println!("side information:");
    for u in 0..3 {
        println!(
            "  user {u}: has {}, wants {}, capacity {} bit/s",
            side.has(u),
            side.wants(u),
            caps.rate_bps(u)
        );
    }

    // Treat every user as decisive: weight ln(rate / msg_size) per vertex.
    let graph = RaIdncGraph::build(&side, &caps, |u, _f, r| {
        vertex_weight(r, caps.rate_bps(u), true, &ErasureModel::Perfect, 1)
    });
    println!("\ncoding graph ({} vertices):", graph.num_vertices());
    print!("{}", graph.debug_text());

    println!("\nmaximal cliques and the transmissions they encode:");
    for clique in enumerate_maximal_cliques(&graph) {
        let (combo, rate, users) = graph.clique_transmission(&clique, 3);
        let weight: f64 = clique.iter().map(|&i| graph.vertex(i).weight).sum();
        println!(
            "  {clique:?} -> combo {combo} at rate {rate}, users {users:?}, weight {weight:.4}"
        );
    }

    let best = max_weight_clique(&graph);
    let (combo, rate, users) = graph.clique_transmission(&best.vertices, 3);
    println!(
        "\nmaximum-weight clique: {:?} (weight {:.4}) -> send {combo} at rate {rate} for users {users:?}",
        best.vertices, best.weight
    );

    // The scheduler reaches the same answer from the network state, and the
    // brute-force enumeration over all (combination, rate) pairs agrees.
    let state = NetworkState::from_side_info(side, 1, 4);
    let opts = SchedulerOpts::default();
    let decision = select_ra_idnc(&state, &caps, &opts).unwrap();
    let oracle = brute_force_best(&state, &caps, &opts).unwrap();
    println!(
        "\nselector: {} at rate {} (objective {:.4})",
        decision.transmission.combo, decision.transmission.rate_bps, decision.diagnostics.objective
    );
    println!(
        "oracle:   {} at rate {} (objective {:.4})",
        oracle.transmission.combo, oracle.transmission.rate_bps, oracle.diagnostics.objective
    );
    assert_eq!(decision.transmission, oracle.transmission);
}
