//! Randomized cross-checks between the coding-graph route and direct
//! enumeration, run by the `verify` CLI command and the acceptance suite.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::channel::{CapacitySnapshot, ErasureModel};
use crate::clique::enumerate_maximal_cliques;
use crate::graph::{candidate_rates, RaIdncGraph};
use crate::model::{MessageSet, NetworkState, SideInfo};
use crate::sched::{brute_force_best, select_multilayer, select_ra_idnc, SchedulerOpts};

/// A random mid-session instance: partial side information, capacities from
/// a small value set (at most three distinct rates), and randomized per-user
/// statistics.
///
/// The message size is one bit so that every vertex weight `ln(rate / (eps *
/// N))` stays non-negative. That is the regime in which the maximum-weight
/// maximal clique coincides with the optimum over all combination/rate
/// pairs; once weights can go negative a deliberately smaller decoder set
/// (a non-maximal clique) may beat every maximal one, and the two routes are
/// not meant to agree.
pub fn random_instance(
    rng: &mut ChaCha8Rng,
    with_erasure_history: bool,
) -> (NetworkState, CapacitySnapshot) {
    const RATE_VALUES: [f64; 3] = [1.0, 2.0, 4.0];
    let users = rng.random_range(1..=4usize);
    let messages = rng.random_range(1..=4usize);
    let msg_size = 1u64;

    let mut wants = Vec::with_capacity(users);
    loop {
        wants.clear();
        for _ in 0..users {
            let mut w = MessageSet::empty(messages);
            for m in 1..=messages {
                if rng.random::<f64>() < 0.5 {
                    w.insert(m);
                }
            }
            wants.push(w);
        }
        if wants.iter().any(|w| !w.is_empty()) {
            break;
        }
    }
    let side = SideInfo::from_wants(messages, wants).expect("indices in range");
    let mut state = NetworkState::from_side_info(side, msg_size, messages as u64 + 1);

    for u in 0..users {
        for _ in 0..rng.random_range(0..=3usize) {
            let r = RATE_VALUES[rng.random_range(0..3)];
            state.stats_mut(u).update_harmonic(r).unwrap();
        }
        if rng.random::<f64>() < 0.7 {
            let delay = rng.random::<f64>() * 4.0 * msg_size as f64;
            state.stats_mut(u).add_delay(delay);
        }
        if with_erasure_history {
            state.stats_mut(u).update_erasure_avg(false);
            for _ in 0..rng.random_range(0..=4usize) {
                state
                    .stats_mut(u)
                    .update_erasure_avg(rng.random::<f64>() < 0.3);
            }
        }
    }

    let caps: Vec<f64> = (0..users)
        .map(|_| RATE_VALUES[rng.random_range(0..3)])
        .collect();
    (state, CapacitySnapshot::new(caps).unwrap())
}

#[derive(Clone, Copy, PartialEq, Debug)]
pub struct OracleReport {
    pub trials: usize,
    pub max_abs_diff: f64,
}

/// The objective value reached by the clique solver must equal the
/// brute-force optimum on every instance (the chosen pair may differ under
/// ties, the value may not).
pub fn check_oracle_equivalence(
    trials: usize,
    seed: u64,
    erasure: ErasureModel,
) -> Result<OracleReport, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let opts = SchedulerOpts {
        erasure,
        ..SchedulerOpts::default()
    };
    let with_history = !erasure.is_effectively_perfect();
    let mut max_abs_diff = 0.0f64;

    for trial in 0..trials {
        let (state, snapshot) = random_instance(&mut rng, with_history);
        let graph_route = select_ra_idnc(&state, &snapshot, &opts)
            .map_err(|e| format!("trial {trial}: selector failed: {e}"))?;
        let oracle = brute_force_best(&state, &snapshot, &opts)
            .map_err(|e| format!("trial {trial}: oracle failed: {e}"))?;

        if !graph_route.targets_can_decode(&state, &snapshot) {
            return Err(format!("trial {trial}: infeasible graph-route decision"));
        }
        if !graph_route.diagnostics.exact {
            return Err(format!("trial {trial}: solver fell back to the heuristic"));
        }
        let diff = (graph_route.diagnostics.objective - oracle.diagnostics.objective).abs();
        max_abs_diff = max_abs_diff.max(diff);
        if diff > 1e-9 {
            return Err(format!(
                "trial {trial}: objective {}, oracle {}",
                graph_route.diagnostics.objective, oracle.diagnostics.objective
            ));
        }
    }
    Ok(OracleReport {
        trials,
        max_abs_diff,
    })
}

#[derive(Clone, Copy, PartialEq, Debug)]
pub struct BijectionReport {
    pub instances: usize,
    pub cliques_checked: usize,
    pub pairs_checked: usize,
}

/// Decoder set of a (combination, rate) pair straight from the side
/// information, with no graph involved.
fn decoder_set(
    side: &SideInfo,
    snapshot: &CapacitySnapshot,
    combo: &MessageSet,
    rate: f64,
) -> Vec<usize> {
    (0..side.num_users())
        .filter(|&u| {
            rate <= snapshot.rate_bps(u)
                && combo.intersection_count(side.wants(u)) == 1
                && combo.minus(side.wants(u)).is_subset_of(side.has(u))
        })
        .collect()
}

/// Maximal cliques and the transmissions they encode are in one-to-one
/// correspondence:
///
/// - forward: every maximal clique's user set equals the independently
///   computed decoder set of its transmission, and no two distinct maximal
///   cliques encode the same (combination, rate) pair;
/// - reverse: every (combination, rate) pair with a non-empty decoder set
///   spans a clique of exactly its decoders' vertices, contained in some
///   maximal clique — and when the decoders' clique is itself maximal it
///   matches exactly one enumerated clique.
pub fn check_bijection(instances: usize, seed: u64) -> Result<BijectionReport, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cliques_checked = 0usize;
    let mut pairs_checked = 0usize;

    for instance in 0..instances {
        let (state, snapshot) = random_instance(&mut rng, false);
        let side = state.side();
        let messages = state.num_messages();
        let graph = RaIdncGraph::build(side, &snapshot, |_, _, _| 1.0);
        let cliques = enumerate_maximal_cliques(&graph);

        // Forward: users of each maximal clique = decoders of its
        // transmission, and the clique -> transmission map is injective.
        let mut induced: Vec<(Vec<usize>, f64)> = Vec::with_capacity(cliques.len());
        for clique in &cliques {
            let (combo, rate, users) = graph.clique_transmission(clique, messages);
            // One vertex per user, one rate per clique.
            if users.len() != clique.len() {
                return Err(format!("instance {instance}: clique repeats a user"));
            }
            if clique.iter().any(|&i| graph.vertex(i).rate_bps != rate) {
                return Err(format!("instance {instance}: clique mixes rates"));
            }
            let alpha = decoder_set(side, &snapshot, &combo, rate);
            if alpha != users {
                return Err(format!(
                    "instance {instance}: clique users {users:?} but decoders {alpha:?} for {combo} at rate {rate}"
                ));
            }
            let key = (combo.to_vec(), rate);
            if induced.contains(&key) {
                return Err(format!(
                    "instance {instance}: two maximal cliques encode {combo} at rate {rate}"
                ));
            }
            induced.push(key);
            cliques_checked += 1;
        }

        // Reverse: every feasible pair maps into the clique structure.
        let pool = candidate_rates(&snapshot);
        for mask in 1u64..(1u64 << messages) {
            let mut combo = MessageSet::empty(messages);
            for m in 1..=messages {
                if mask & (1 << (m - 1)) != 0 {
                    combo.insert(m);
                }
            }
            for &rate in &pool {
                let alpha = decoder_set(side, &snapshot, &combo, rate);
                if alpha.is_empty() {
                    continue;
                }
                let mut ids: Vec<usize> = alpha
                    .iter()
                    .map(|&u| {
                        let f = combo
                            .single_common(side.wants(u))
                            .expect("decoder has exactly one wanted message");
                        graph.find_vertex(u, f, rate).ok_or(u)
                    })
                    .collect::<Result<_, _>>()
                    .map_err(|u| {
                        format!("instance {instance}: missing vertex for decoder {u} of {combo}")
                    })?;
                ids.sort_unstable();
                for (k, &i) in ids.iter().enumerate() {
                    for &j in &ids[k + 1..] {
                        if !graph.adjacent(i, j) {
                            return Err(format!(
                                "instance {instance}: decoders of {combo} at rate {rate} are not a clique"
                            ));
                        }
                    }
                }
                let containing = cliques
                    .iter()
                    .filter(|c| ids.iter().all(|i| c.contains(i)))
                    .count();
                if containing == 0 {
                    return Err(format!(
                        "instance {instance}: decoder clique of {combo} at rate {rate} is in no maximal clique"
                    ));
                }
                if graph.adjacent_to_all(&ids).is_empty() && containing != 1 {
                    return Err(format!(
                        "instance {instance}: maximal decoder clique of {combo} at rate {rate} matched {containing} cliques"
                    ));
                }
                pairs_checked += 1;
            }
        }
    }
    Ok(BijectionReport {
        instances,
        cliques_checked,
        pairs_checked,
    })
}

#[derive(Clone, Copy, PartialEq, Debug)]
pub struct MultilayerReport {
    pub trials: usize,
    pub max_abs_diff: f64,
}

/// The multi-layer selection keeps the layer-one optimum (its objective
/// equals the single-shot selector's) and always targets a decodable set.
pub fn check_multilayer(trials: usize, seed: u64) -> Result<MultilayerReport, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let opts = SchedulerOpts::default();
    let mut max_abs_diff = 0.0f64;

    for trial in 0..trials {
        let (state, snapshot) = random_instance(&mut rng, false);
        let single =
            select_ra_idnc(&state, &snapshot, &opts).map_err(|e| format!("trial {trial}: {e}"))?;
        let multi = select_multilayer(&state, &snapshot, &opts)
            .map_err(|e| format!("trial {trial}: {e}"))?;
        if !multi.targets_can_decode(&state, &snapshot) {
            return Err(format!("trial {trial}: infeasible multi-layer decision"));
        }
        let diff = (single.diagnostics.objective - multi.diagnostics.objective).abs();
        max_abs_diff = max_abs_diff.max(diff);
        if diff > 1e-9 {
            return Err(format!(
                "trial {trial}: single-layer objective {} vs multi-layer {}",
                single.diagnostics.objective, multi.diagnostics.objective
            ));
        }
    }
    Ok(MultilayerReport {
        trials,
        max_abs_diff,
    })
}
