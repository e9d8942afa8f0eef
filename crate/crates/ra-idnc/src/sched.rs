//! Transmission selectors.
//!
//! Every scheme first sends each message once uncoded (rate chosen per
//! scheme), then hands over to its own per-transmission policy:
//!
//! - `ra_idnc` solves a maximum-weight clique on the rate-aware coding graph,
//!   jointly picking the XOR combination and the transmission rate.
//! - `ra_idnc_multilayer` restricts the first solve to layer-one decisive
//!   users and then grows the clique through deeper criticality layers.
//! - `classical_idnc` ignores the rate dimension when coding and transmits at
//!   the minimum capacity of the targeted users.
//! - `broadcast` sends the lowest still-wanted message uncoded at the
//!   minimum capacity of the users wanting it.
//! - `unicast` serves only the highest-capacity user still missing messages.
//! - `oracle` evaluates every combination/rate pair directly; it exists as an
//!   independent reference for the graph route.

use crate::channel::{CapacitySnapshot, ErasureModel};
use crate::clique::{
    max_clique_equal_weights_with_threshold, max_weight_clique_with_threshold,
    DEFAULT_EXACT_THRESHOLD,
};
use crate::graph::{build_layer_graph, candidate_rates, vertex_weight, RaIdncGraph};
use crate::metrics::{
    anticipated_completions, decisive_set_from_completions, shell_indices, DecisiveQuery,
    HarmonicBootstrap,
};
use crate::model::{is_instantly_decodable, MessageSet, NetworkState, Transmission};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SchedulerKind {
    RaIdnc,
    RaIdncMultilayer,
    ClassicalIdnc,
    Broadcast,
    Unicast,
    Oracle,
}

impl SchedulerKind {
    pub const ALL: [SchedulerKind; 6] = [
        SchedulerKind::RaIdnc,
        SchedulerKind::RaIdncMultilayer,
        SchedulerKind::ClassicalIdnc,
        SchedulerKind::Broadcast,
        SchedulerKind::Unicast,
        SchedulerKind::Oracle,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            SchedulerKind::RaIdnc => "ra_idnc",
            SchedulerKind::RaIdncMultilayer => "ra_idnc_multilayer",
            SchedulerKind::ClassicalIdnc => "classical_idnc",
            SchedulerKind::Broadcast => "broadcast",
            SchedulerKind::Unicast => "unicast",
            SchedulerKind::Oracle => "oracle",
        }
    }
}

impl std::str::FromStr for SchedulerKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        SchedulerKind::ALL
            .iter()
            .copied()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown scheduler '{s}'"))
    }
}

impl std::fmt::Display for SchedulerKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, PartialEq, Debug)]
pub struct SchedulerOpts {
    pub erasure: ErasureModel,
    pub bootstrap: HarmonicBootstrap,
    pub exact_threshold: usize,
}

impl Default for SchedulerOpts {
    fn default() -> Self {
        SchedulerOpts {
            erasure: ErasureModel::Perfect,
            bootstrap: HarmonicBootstrap::SnapshotCapacity,
            exact_threshold: DEFAULT_EXACT_THRESHOLD,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Debug)]
pub struct Diagnostics {
    /// Summed clique weight (the per-transmission objective value).
    pub objective: f64,
    /// Criticality layers merged into the decision (0 for uncoded picks).
    pub layers: u32,
    /// Whether every clique subproblem behind the decision was solved
    /// exactly.
    pub exact: bool,
}

/// One scheduling decision: the transmission to issue and the users meant to
/// decode it.
#[derive(Clone, PartialEq, Debug)]
pub struct Decision {
    pub transmission: Transmission,
    pub targets: Vec<usize>,
    pub diagnostics: Diagnostics,
}

impl Decision {
    /// Every targeted user must be able to instantly decode the transmission.
    pub fn targets_can_decode(&self, state: &NetworkState, snapshot: &CapacitySnapshot) -> bool {
        self.targets.iter().all(|&u| {
            is_instantly_decodable(
                state.side().user(u),
                &self.transmission.combo,
                self.transmission.rate_bps,
                snapshot.rate_bps(u),
            )
        })
    }
}

#[derive(Clone, PartialEq, Debug)]
pub enum ScheduleError {
    /// Every Wants set is empty; nothing remains to schedule.
    Complete,
    /// The brute-force enumerator refuses message counts above its guard.
    TooManyMessages { messages: usize, guard: usize },
}

impl std::fmt::Display for ScheduleError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ScheduleError::Complete => write!(f, "all users hold every message"),
            ScheduleError::TooManyMessages { messages, guard } => {
                write!(
                    f,
                    "{messages} messages exceed the enumeration guard of {guard}"
                )
            }
        }
    }
}

impl std::error::Error for ScheduleError {}

/// Full per-scheme decision entry point: runs the uncoded first round while
/// `next_transmission <= F`, then the scheme's own selector.
pub fn decide(
    kind: SchedulerKind,
    state: &NetworkState,
    snapshot: &CapacitySnapshot,
    opts: &SchedulerOpts,
) -> Result<Decision, ScheduleError> {
    if state.side().all_wants_empty() {
        return Err(ScheduleError::Complete);
    }
    if state.next_transmission() <= state.num_messages() as u64 {
        if let Some(d) = initial_round(kind, state, snapshot) {
            return Ok(d);
        }
    }
    match kind {
        SchedulerKind::RaIdnc => select_ra_idnc(state, snapshot, opts),
        SchedulerKind::RaIdncMultilayer => select_multilayer(state, snapshot, opts),
        SchedulerKind::ClassicalIdnc => select_classical_idnc(state, snapshot, opts),
        SchedulerKind::Broadcast => select_broadcast(state, snapshot),
        SchedulerKind::Unicast => select_unicast(state, snapshot),
        SchedulerKind::Oracle => brute_force_best(state, snapshot, opts),
    }
}

/// Uncoded round: transmission `t <= F` carries message `t`. Rates follow the
/// scheme: coded schemes maximize `rate * reachable users`, broadcast-style
/// schemes use the minimum capacity of the wanting users, unicast the
/// maximum.
fn initial_round(
    kind: SchedulerKind,
    state: &NetworkState,
    snapshot: &CapacitySnapshot,
) -> Option<Decision> {
    let message = state.next_transmission() as usize;
    let wanters: Vec<usize> = (0..state.num_users())
        .filter(|&u| state.side().wants(u).contains(message))
        .collect();
    if wanters.is_empty() {
        return None;
    }

    let rate = match kind {
        SchedulerKind::RaIdnc | SchedulerKind::RaIdncMultilayer | SchedulerKind::Oracle => {
            let pool = candidate_rates(snapshot);
            let mut best = pool[0];
            let mut best_score = f64::NEG_INFINITY;
            for &r in &pool {
                let reach = snapshot.rates().iter().filter(|&&c| c >= r).count();
                let score = r * reach as f64;
                if score > best_score {
                    best_score = score;
                    best = r;
                }
            }
            best
        }
        SchedulerKind::Broadcast | SchedulerKind::ClassicalIdnc => wanters
            .iter()
            .map(|&u| snapshot.rate_bps(u))
            .fold(f64::INFINITY, f64::min),
        SchedulerKind::Unicast => {
            let u = argmax_capacity(&wanters, snapshot);
            let rate = snapshot.rate_bps(u);
            let mut combo = MessageSet::empty(state.num_messages());
            combo.insert(message);
            return Some(Decision {
                transmission: Transmission::new(combo, rate).expect("valid uncoded transmission"),
                targets: vec![u],
                diagnostics: Diagnostics {
                    objective: 0.0,
                    layers: 0,
                    exact: true,
                },
            });
        }
    };

    let targets: Vec<usize> = wanters
        .into_iter()
        .filter(|&u| snapshot.rate_bps(u) >= rate)
        .collect();
    let mut combo = MessageSet::empty(state.num_messages());
    combo.insert(message);
    Some(Decision {
        transmission: Transmission::new(combo, rate).expect("valid uncoded transmission"),
        targets,
        diagnostics: Diagnostics {
            objective: 0.0,
            layers: 0,
            exact: true,
        },
    })
}

fn argmax_capacity(users: &[usize], snapshot: &CapacitySnapshot) -> usize {
    let mut best = users[0];
    for &u in &users[1..] {
        if snapshot.rate_bps(u) > snapshot.rate_bps(best) {
            best = u;
        }
    }
    best
}

/// Anticipated completion per user, with the configured bootstrap standing in
/// for the harmonic rate before a user's first decodable reception.
fn completions_for(
    state: &NetworkState,
    snapshot: &CapacitySnapshot,
    pool: &[f64],
    opts: &SchedulerOpts,
) -> Vec<Option<f64>> {
    let bootstrap: Vec<f64> = match opts.bootstrap {
        HarmonicBootstrap::SnapshotCapacity => snapshot.rates().to_vec(),
        HarmonicBootstrap::MeanCandidateRate => {
            let mean = pool.iter().sum::<f64>() / pool.len() as f64;
            vec![mean; state.num_users()]
        }
    };
    anticipated_completions(
        state.stats(),
        &bootstrap,
        &state.side().wants_nonempty_flags(),
        state.msg_size_bits(),
        state.num_messages(),
    )
}

/// Layer-one decisive users for each candidate rate, as per-user flags.
fn decisive_by_rate(
    completions: &[Option<f64>],
    pool: &[f64],
    msg_size_bits: u64,
) -> Vec<(f64, Vec<bool>)> {
    pool.iter()
        .map(|&r| {
            let query = DecisiveQuery::new(r, 1, msg_size_bits).expect("positive pool rate");
            let mut flags = vec![false; completions.len()];
            for u in decisive_set_from_completions(completions, &query) {
                flags[u] = true;
            }
            (r, flags)
        })
        .collect()
}

fn decision_from_clique(
    graph: &RaIdncGraph,
    ids: &[usize],
    state: &NetworkState,
    objective: f64,
    layers: u32,
    exact: bool,
) -> Decision {
    let (combo, rate, targets) = graph.clique_transmission(ids, state.num_messages());
    Decision {
        transmission: Transmission::new(combo, rate).expect("clique encodes a valid transmission"),
        targets,
        diagnostics: Diagnostics {
            objective,
            layers,
            exact,
        },
    }
}

/// Rate-aware selector: maximum-weight clique over the full coding graph.
pub fn select_ra_idnc(
    state: &NetworkState,
    snapshot: &CapacitySnapshot,
    opts: &SchedulerOpts,
) -> Result<Decision, ScheduleError> {
    if state.side().all_wants_empty() {
        return Err(ScheduleError::Complete);
    }
    let pool = candidate_rates(snapshot);
    let completions = completions_for(state, snapshot, &pool, opts);
    let decisive = decisive_by_rate(&completions, &pool, state.msg_size_bits());
    let n = state.msg_size_bits();

    let graph = RaIdncGraph::build(state.side(), snapshot, |u, _f, r| {
        let flags = &decisive
            .iter()
            .find(|(rr, _)| *rr == r)
            .expect("rate comes from the pool")
            .1;
        vertex_weight(r, snapshot.rate_bps(u), flags[u], &opts.erasure, n)
    });
    let sol = max_weight_clique_with_threshold(&graph, opts.exact_threshold);
    debug_assert!(!sol.is_empty());
    Ok(decision_from_clique(
        &graph,
        &sol.vertices,
        state,
        sol.weight,
        1,
        sol.exact,
    ))
}

/// Multi-layer selector: solve on layer-one users first, then extend the
/// clique through deeper criticality layers at the chosen rate until no
/// vertex of the full graph is adjacent to the whole clique.
pub fn select_multilayer(
    state: &NetworkState,
    snapshot: &CapacitySnapshot,
    opts: &SchedulerOpts,
) -> Result<Decision, ScheduleError> {
    if state.side().all_wants_empty() {
        return Err(ScheduleError::Complete);
    }
    let pool = candidate_rates(snapshot);
    let completions = completions_for(state, snapshot, &pool, opts);
    let decisive = decisive_by_rate(&completions, &pool, state.msg_size_bits());
    let n = state.msg_size_bits();

    let graph = RaIdncGraph::build(state.side(), snapshot, |u, _f, r| {
        let flags = &decisive
            .iter()
            .find(|(rr, _)| *rr == r)
            .expect("rate comes from the pool")
            .1;
        vertex_weight(r, snapshot.rate_bps(u), flags[u], &opts.erasure, n)
    });

    // Layer one: union of the decisive sets over every candidate rate.
    let mut layer_one = vec![false; state.num_users()];
    for (_, flags) in &decisive {
        for (u, &f) in flags.iter().enumerate() {
            layer_one[u] |= f;
        }
    }
    let g1_ids: Vec<usize> = (0..graph.num_vertices())
        .filter(|&i| layer_one[graph.vertex(i).user])
        .collect();
    let (g1, map1) = graph.induced(&g1_ids);
    let sol1 = max_weight_clique_with_threshold(&g1, opts.exact_threshold);
    debug_assert!(!sol1.is_empty());

    let mut clique: Vec<usize> = sol1.vertices.iter().map(|&i| map1[i]).collect();
    clique.sort_unstable();
    let rate = graph.vertex(clique[0]).rate_bps;
    let mut exact = sol1.exact;
    let mut layers = 1u32;

    let shells = shell_indices(&completions, n as f64 / rate);
    let mut k = 2u32;
    loop {
        let adjacent = graph.adjacent_to_all(&clique);
        if adjacent.is_empty() {
            break;
        }
        let max_shell = adjacent
            .iter()
            .filter_map(|&i| shells[graph.vertex(i).user])
            .max();
        match max_shell {
            Some(m) if k <= m => {}
            _ => break,
        }
        let layer_users: Vec<usize> = (0..state.num_users())
            .filter(|&u| shells[u] == Some(k))
            .collect();
        if !layer_users.is_empty() {
            let (sub, ids) =
                build_layer_graph(&graph, &clique, &layer_users, n).expect("clique stays a clique");
            if !sub.is_empty() {
                let sol_k = max_clique_equal_weights_with_threshold(&sub, opts.exact_threshold);
                if !sol_k.is_empty() {
                    clique.extend(sol_k.vertices.iter().map(|&i| ids[i]));
                    clique.sort_unstable();
                    exact &= sol_k.exact;
                    layers += 1;
                }
            }
        }
        k += 1;
    }

    // Restricted to layer-one users the merged clique keeps the layer-one
    // optimum: deeper-layer vertices carry zero objective weight.
    let objective: f64 = clique.iter().map(|&i| graph.vertex(i).weight).sum();
    Ok(decision_from_clique(
        &graph, &clique, state, objective, layers, exact,
    ))
}

/// Uncoded broadcast baseline: lowest still-wanted message at the minimum
/// capacity of the users wanting it.
pub fn select_broadcast(
    state: &NetworkState,
    snapshot: &CapacitySnapshot,
) -> Result<Decision, ScheduleError> {
    let message = (1..=state.num_messages())
        .find(|&m| (0..state.num_users()).any(|u| state.side().wants(u).contains(m)))
        .ok_or(ScheduleError::Complete)?;
    let wanters: Vec<usize> = (0..state.num_users())
        .filter(|&u| state.side().wants(u).contains(message))
        .collect();
    let rate = wanters
        .iter()
        .map(|&u| snapshot.rate_bps(u))
        .fold(f64::INFINITY, f64::min);
    let mut combo = MessageSet::empty(state.num_messages());
    combo.insert(message);
    Ok(Decision {
        transmission: Transmission::new(combo, rate).expect("valid uncoded transmission"),
        targets: wanters,
        diagnostics: Diagnostics {
            objective: 0.0,
            layers: 0,
            exact: true,
        },
    })
}

/// Uncoded unicast baseline: the highest-capacity user still missing
/// messages gets its lowest-indexed wanted message at its own capacity.
pub fn select_unicast(
    state: &NetworkState,
    snapshot: &CapacitySnapshot,
) -> Result<Decision, ScheduleError> {
    let active: Vec<usize> = (0..state.num_users())
        .filter(|&u| !state.side().wants(u).is_empty())
        .collect();
    if active.is_empty() {
        return Err(ScheduleError::Complete);
    }
    let user = argmax_capacity(&active, snapshot);
    let message = state.side().wants(user).first().expect("user is active");
    let mut combo = MessageSet::empty(state.num_messages());
    combo.insert(message);
    Ok(Decision {
        transmission: Transmission::new(combo, snapshot.rate_bps(user))
            .expect("valid uncoded transmission"),
        targets: vec![user],
        diagnostics: Diagnostics {
            objective: 0.0,
            layers: 0,
            exact: true,
        },
    })
}

/// Rate-blind coding baseline: maximum-weight clique on the rate-free coding
/// graph (unit weight on decisive users at a nominal slot rate), transmitted
/// at the minimum capacity of the targeted users.
pub fn select_classical_idnc(
    state: &NetworkState,
    snapshot: &CapacitySnapshot,
    opts: &SchedulerOpts,
) -> Result<Decision, ScheduleError> {
    let active: Vec<usize> = (0..state.num_users())
        .filter(|&u| !state.side().wants(u).is_empty())
        .collect();
    if active.is_empty() {
        return Err(ScheduleError::Complete);
    }
    let nominal = active
        .iter()
        .map(|&u| snapshot.rate_bps(u))
        .fold(f64::INFINITY, f64::min);

    let pool = candidate_rates(snapshot);
    let completions = completions_for(state, snapshot, &pool, opts);
    let query = DecisiveQuery::new(nominal, 1, state.msg_size_bits()).expect("positive nominal");
    let mut decisive = vec![false; state.num_users()];
    for u in decisive_set_from_completions(&completions, &query) {
        decisive[u] = true;
    }

    // A uniform snapshot at the nominal rate collapses the rate dimension:
    // the build then produces exactly one vertex per (user, wanted message).
    let uniform =
        CapacitySnapshot::new(vec![nominal; state.num_users()]).expect("positive nominal");
    let graph = RaIdncGraph::build(
        state.side(),
        &uniform,
        |u, _f, _r| {
            if decisive[u] {
                1.0
            } else {
                0.0
            }
        },
    );
    let sol = max_weight_clique_with_threshold(&graph, opts.exact_threshold);
    debug_assert!(!sol.is_empty());

    let (combo, _, targets) = graph.clique_transmission(&sol.vertices, state.num_messages());
    let rate = targets
        .iter()
        .map(|&u| snapshot.rate_bps(u))
        .fold(f64::INFINITY, f64::min);
    Ok(Decision {
        transmission: Transmission::new(combo, rate).expect("valid coded transmission"),
        targets,
        diagnostics: Diagnostics {
            objective: sol.weight,
            layers: 1,
            exact: sol.exact,
        },
    })
}

/// Enumeration guard for the brute-force selector.
pub const BRUTE_FORCE_MESSAGE_GUARD: usize = 12;

/// Direct evaluation of every combination/rate pair. The decoder set of each
/// pair is computed straight from the side information, without the coding
/// graph; this selector is the independent reference for `select_ra_idnc`.
pub fn brute_force_best(
    state: &NetworkState,
    snapshot: &CapacitySnapshot,
    opts: &SchedulerOpts,
) -> Result<Decision, ScheduleError> {
    if state.side().all_wants_empty() {
        return Err(ScheduleError::Complete);
    }
    let f = state.num_messages();
    if f > BRUTE_FORCE_MESSAGE_GUARD {
        return Err(ScheduleError::TooManyMessages {
            messages: f,
            guard: BRUTE_FORCE_MESSAGE_GUARD,
        });
    }
    let pool = candidate_rates(snapshot);
    let completions = completions_for(state, snapshot, &pool, opts);
    let decisive = decisive_by_rate(&completions, &pool, state.msg_size_bits());
    let n = state.msg_size_bits() as f64;

    struct Best {
        objective: f64,
        rate: f64,
        combo: MessageSet,
        targets: Vec<usize>,
        keyed: Vec<(usize, usize)>,
    }
    let mut best: Option<Best> = None;

    for mask in 1u64..(1u64 << f) {
        let mut combo = MessageSet::empty(f);
        for m in 1..=f {
            if mask & (1 << (m - 1)) != 0 {
                combo.insert(m);
            }
        }
        for &(rate, ref flags) in &decisive {
            let mut targets = Vec::new();
            let mut keyed = Vec::new();
            for u in 0..state.num_users() {
                let side = state.side().user(u);
                if rate > snapshot.rate_bps(u) {
                    continue;
                }
                if combo.intersection_count(side.wants) != 1 {
                    continue;
                }
                if !combo.minus(side.wants).is_subset_of(side.has) {
                    continue;
                }
                targets.push(u);
                keyed.push((u, combo.single_common(side.wants).expect("checked above")));
            }
            // A pair nobody decodes still counts, with an empty (zero) sum.
            let mut objective = 0.0;
            for &u in &targets {
                if !flags[u] {
                    continue;
                }
                let eps = opts.erasure.erasure_probability(rate, snapshot.rate_bps(u));
                objective += if eps == 0.0 {
                    (rate / n).ln()
                } else {
                    (rate / (eps * n)).ln()
                };
            }
            let better = match &best {
                None => true,
                Some(b) => match objective.total_cmp(&b.objective) {
                    std::cmp::Ordering::Greater => true,
                    std::cmp::Ordering::Less => false,
                    std::cmp::Ordering::Equal => match rate.total_cmp(&b.rate) {
                        std::cmp::Ordering::Greater => true,
                        std::cmp::Ordering::Less => false,
                        std::cmp::Ordering::Equal => match targets.len().cmp(&b.targets.len()) {
                            std::cmp::Ordering::Greater => true,
                            std::cmp::Ordering::Less => false,
                            std::cmp::Ordering::Equal => keyed < b.keyed,
                        },
                    },
                },
            };
            if better {
                best = Some(Best {
                    objective,
                    rate,
                    combo: combo.clone(),
                    targets,
                    keyed,
                });
            }
        }
    }

    let best = best.expect("some user wants some message");
    Ok(Decision {
        transmission: Transmission::new(best.combo, best.rate).expect("valid transmission"),
        targets: best.targets,
        diagnostics: Diagnostics {
            objective: best.objective,
            layers: 0,
            exact: true,
        },
    })
}
