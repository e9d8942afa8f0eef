//! Data model for a single broadcast cell: message sets, per-user side
//! information, and the state updates applied after each transmission.
//!
//! Messages are indexed `1..=F`. A coded transmission is described by the set
//! of messages mixed into it (binary XOR coding means the set fully determines
//! the combination) together with the physical-layer rate it is sent at. A
//! user can decode a combination only when exactly one of its messages is
//! still missing at that user and the rate does not exceed the user's current
//! capacity; anything else is discarded on reception.

use crate::bitset::BitSet;
use crate::channel::CapacitySnapshot;
use crate::metrics::UserStats;

/// A set of message indices in `1..=F`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MessageSet {
    bits: BitSet,
}

impl MessageSet {
    pub fn empty(num_messages: usize) -> Self {
        MessageSet {
            bits: BitSet::new(num_messages),
        }
    }

    pub fn all(num_messages: usize) -> Self {
        MessageSet {
            bits: BitSet::full(num_messages),
        }
    }

    /// Builds a set from 1-based message indices.
    pub fn from_indices(num_messages: usize, indices: &[usize]) -> Result<Self, ModelError> {
        let mut s = Self::empty(num_messages);
        for &i in indices {
            if i == 0 || i > num_messages {
                return Err(ModelError::MessageOutOfRange {
                    message: i,
                    num_messages,
                });
            }
            s.bits.insert(i - 1);
        }
        Ok(s)
    }

    pub fn num_messages(&self) -> usize {
        self.bits.capacity()
    }

    pub fn insert(&mut self, message: usize) {
        assert!(
            message >= 1 && message <= self.bits.capacity(),
            "message {message} out of range 1..={}",
            self.bits.capacity()
        );
        self.bits.insert(message - 1);
    }

    pub fn remove(&mut self, message: usize) {
        assert!(message >= 1 && message <= self.bits.capacity());
        self.bits.remove(message - 1);
    }

    pub fn contains(&self, message: usize) -> bool {
        message >= 1 && self.bits.contains(message - 1)
    }

    pub fn len(&self) -> usize {
        self.bits.count()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// Ascending iterator over the 1-based message indices in the set.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.iter().map(|i| i + 1)
    }

    pub fn first(&self) -> Option<usize> {
        self.bits.first().map(|i| i + 1)
    }

    pub fn intersection_count(&self, other: &MessageSet) -> usize {
        self.bits.intersection_count(&other.bits)
    }

    pub fn is_subset_of(&self, other: &MessageSet) -> bool {
        self.bits.is_subset_of(&other.bits)
    }

    pub fn is_disjoint(&self, other: &MessageSet) -> bool {
        self.bits.is_disjoint(&other.bits)
    }

    /// The unique common element with `other`, if exactly one exists.
    pub fn single_common(&self, other: &MessageSet) -> Option<usize> {
        if self.intersection_count(other) != 1 {
            return None;
        }
        let mut x = self.bits.clone();
        x.intersect_with(&other.bits);
        x.first().map(|i| i + 1)
    }

    /// `self` minus `other`.
    pub fn minus(&self, other: &MessageSet) -> MessageSet {
        let mut bits = self.bits.clone();
        bits.difference_with(&other.bits);
        MessageSet { bits }
    }

    pub fn union(&self, other: &MessageSet) -> MessageSet {
        let mut bits = self.bits.clone();
        bits.union_with(&other.bits);
        MessageSet { bits }
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }
}

impl std::fmt::Debug for MessageSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl std::fmt::Display for MessageSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{{")?;
        for (k, m) in self.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{m}")?;
        }
        write!(f, "}}")
    }
}

/// Per-user Has/Wants sets. For every user the two sets partition the full
/// message set: what is not yet held is still wanted.
#[derive(Clone, PartialEq, Debug)]
pub struct SideInfo {
    num_messages: usize,
    has: Vec<MessageSet>,
    wants: Vec<MessageSet>,
}

impl SideInfo {
    /// All users start with nothing: every Wants set is the full message set.
    pub fn fresh(num_users: usize, num_messages: usize) -> Self {
        SideInfo {
            num_messages,
            has: vec![MessageSet::empty(num_messages); num_users],
            wants: vec![MessageSet::all(num_messages); num_users],
        }
    }

    /// Builds side information from explicit Wants sets; each Has set is the
    /// complement within `1..=F`.
    pub fn from_wants(num_messages: usize, wants: Vec<MessageSet>) -> Result<Self, ModelError> {
        let mut has = Vec::with_capacity(wants.len());
        for w in &wants {
            if w.num_messages() != num_messages {
                return Err(ModelError::MessageOutOfRange {
                    message: w.num_messages(),
                    num_messages,
                });
            }
            has.push(MessageSet::all(num_messages).minus(w));
        }
        Ok(SideInfo {
            num_messages,
            has,
            wants,
        })
    }

    /// Builds side information from explicit Has sets (Wants = complement).
    pub fn from_has(num_messages: usize, has: Vec<MessageSet>) -> Result<Self, ModelError> {
        let wants = has
            .iter()
            .map(|h| MessageSet::all(num_messages).minus(h))
            .collect();
        let mut si = Self::from_wants(num_messages, wants)?;
        si.has = has;
        Ok(si)
    }

    pub fn num_users(&self) -> usize {
        self.wants.len()
    }

    pub fn num_messages(&self) -> usize {
        self.num_messages
    }

    pub fn has(&self, user: usize) -> &MessageSet {
        &self.has[user]
    }

    pub fn wants(&self, user: usize) -> &MessageSet {
        &self.wants[user]
    }

    pub fn user(&self, user: usize) -> UserSide<'_> {
        UserSide {
            has: &self.has[user],
            wants: &self.wants[user],
        }
    }

    /// Moves `message` from the user's Wants set into its Has set.
    pub fn deliver(&mut self, user: usize, message: usize) -> Result<(), ModelError> {
        if !self.wants[user].contains(message) {
            return Err(ModelError::NotWanted { user, message });
        }
        self.wants[user].remove(message);
        self.has[user].insert(message);
        Ok(())
    }

    pub fn all_wants_empty(&self) -> bool {
        self.wants.iter().all(|w| w.is_empty())
    }

    pub fn wants_nonempty_flags(&self) -> Vec<bool> {
        self.wants.iter().map(|w| !w.is_empty()).collect()
    }
}

/// A view of one user's Has/Wants pair.
#[derive(Clone, Copy)]
pub struct UserSide<'a> {
    pub has: &'a MessageSet,
    pub wants: &'a MessageSet,
}

/// True when the combination carries exactly one message the user still
/// wants and the rate does not exceed the user's capacity.
pub fn is_instantly_decodable(
    user: UserSide<'_>,
    combo: &MessageSet,
    rate_bps: f64,
    capacity_bps: f64,
) -> bool {
    rate_bps <= capacity_bps && combo.intersection_count(user.wants) == 1
}

/// The message the user extracts from `combo`, when the combination has
/// exactly one wanted message and every other member is already held.
pub fn decoded_message(user: UserSide<'_>, combo: &MessageSet) -> Option<usize> {
    let target = combo.single_common(user.wants)?;
    if combo.minus(user.wants).is_subset_of(user.has) {
        Some(target)
    } else {
        None
    }
}

/// One scheduled transmission: the XOR'd message set and the rate it is
/// broadcast at.
#[derive(Clone, PartialEq, Debug)]
pub struct Transmission {
    pub combo: MessageSet,
    pub rate_bps: f64,
}

impl Transmission {
    pub fn new(combo: MessageSet, rate_bps: f64) -> Result<Self, ModelError> {
        if combo.is_empty() {
            return Err(ModelError::EmptyCombination);
        }
        if rate_bps <= 0.0 || !rate_bps.is_finite() {
            return Err(ModelError::NonPositiveRate(rate_bps));
        }
        Ok(Transmission { combo, rate_bps })
    }

    /// Seconds needed to push one `msg_size_bits` payload at this rate.
    pub fn duration_s(&self, msg_size_bits: u64) -> f64 {
        msg_size_bits as f64 / self.rate_bps
    }
}

/// What one transmission did to one user.
#[derive(Clone, Copy, PartialEq, Debug)]
pub struct UserTxOutcome {
    /// Reception flag drawn by the simulator.
    pub received: bool,
    /// Rate did not exceed this user's capacity for the transmission.
    pub qualifying: bool,
    /// Message extracted, when the transmission was instantly decodable.
    pub decoded: Option<usize>,
    /// Time delay was charged (received but useless while still wanting).
    pub delayed: bool,
    /// This transmission emptied the user's Wants set.
    pub completed_now: bool,
}

/// Full per-episode network state: side information, per-user running
/// statistics, and the absolute clock.
#[derive(Clone, PartialEq, Debug)]
pub struct NetworkState {
    side: SideInfo,
    stats: Vec<UserStats>,
    clock_s: f64,
    msg_size_bits: u64,
    next_transmission: u64,
}

impl NetworkState {
    pub fn new(num_users: usize, num_messages: usize, msg_size_bits: u64) -> Self {
        assert!(num_users >= 1 && num_messages >= 1 && msg_size_bits >= 1);
        NetworkState {
            side: SideInfo::fresh(num_users, num_messages),
            stats: vec![UserStats::new(); num_users],
            clock_s: 0.0,
            msg_size_bits,
            next_transmission: 1,
        }
    }

    /// State at an arbitrary point of a session, for driving the schedulers
    /// from a given side-information instance.
    pub fn from_side_info(side: SideInfo, msg_size_bits: u64, next_transmission: u64) -> Self {
        assert!(msg_size_bits >= 1 && next_transmission >= 1);
        let users = side.num_users();
        NetworkState {
            side,
            stats: vec![UserStats::new(); users],
            clock_s: 0.0,
            msg_size_bits,
            next_transmission,
        }
    }

    pub fn side(&self) -> &SideInfo {
        &self.side
    }

    pub fn stats(&self) -> &[UserStats] {
        &self.stats
    }

    pub fn stats_mut(&mut self, user: usize) -> &mut UserStats {
        &mut self.stats[user]
    }

    pub fn num_users(&self) -> usize {
        self.side.num_users()
    }

    pub fn num_messages(&self) -> usize {
        self.side.num_messages()
    }

    pub fn msg_size_bits(&self) -> u64 {
        self.msg_size_bits
    }

    /// Absolute time elapsed so far; equals the summed duration of every
    /// transmission issued.
    pub fn clock_s(&self) -> f64 {
        self.clock_s
    }

    /// 1-based index of the next transmission to be issued.
    pub fn next_transmission(&self) -> u64 {
        self.next_transmission
    }

    /// Applies one transmission given the per-user reception flags drawn by
    /// the simulator and the capacities in force for this transmission.
    ///
    /// For each user that is still missing messages: a received decodable
    /// combination moves its message from Wants to Has and feeds the
    /// harmonic-rate tracker; a received useless one charges `N/R` seconds of
    /// delay; an erased transmission at a feasible rate feeds the running
    /// erasure average. Users whose Wants set is already empty are left
    /// untouched. The clock always advances by `N/R`.
    pub fn apply_transmission(
        &mut self,
        tx: &Transmission,
        capacities: &CapacitySnapshot,
        received: &[bool],
    ) -> Result<Vec<UserTxOutcome>, ModelError> {
        let users = self.num_users();
        if received.len() != users {
            return Err(ModelError::ReceptionLengthMismatch {
                expected: users,
                got: received.len(),
            });
        }
        if capacities.len() != users {
            return Err(ModelError::ReceptionLengthMismatch {
                expected: users,
                got: capacities.len(),
            });
        }
        if tx.combo.is_empty() {
            return Err(ModelError::EmptyCombination);
        }
        if tx.rate_bps <= 0.0 || tx.rate_bps.is_nan() {
            return Err(ModelError::NonPositiveRate(tx.rate_bps));
        }

        let duration = tx.duration_s(self.msg_size_bits);
        let mut outcomes = Vec::with_capacity(users);

        for (u, &was_received) in received.iter().enumerate() {
            let qualifying = tx.rate_bps <= capacities.rate_bps(u);
            let mut out = UserTxOutcome {
                received: was_received,
                qualifying,
                decoded: None,
                delayed: false,
                completed_now: false,
            };

            if self.side.wants(u).is_empty() {
                outcomes.push(out);
                continue;
            }

            if was_received {
                let decodable = qualifying
                    .then(|| decoded_message(self.side.user(u), &tx.combo))
                    .flatten();
                if let Some(f) = decodable {
                    self.side.deliver(u, f)?;
                    self.stats[u]
                        .update_harmonic(tx.rate_bps)
                        .expect("transmission rate already validated");
                    self.stats[u].update_erasure_avg(false);
                    out.decoded = Some(f);
                    out.completed_now = self.side.wants(u).is_empty();
                } else {
                    self.stats[u].add_delay(duration);
                    out.delayed = true;
                    if qualifying {
                        self.stats[u].update_erasure_avg(false);
                    }
                }
            } else if qualifying {
                self.stats[u].update_erasure_avg(true);
            }

            outcomes.push(out);
        }

        self.clock_s += duration;
        self.next_transmission += 1;
        Ok(outcomes)
    }
}

#[derive(Clone, PartialEq, Debug)]
pub enum ModelError {
    MessageOutOfRange { message: usize, num_messages: usize },
    NotWanted { user: usize, message: usize },
    EmptyCombination,
    NonPositiveRate(f64),
    ReceptionLengthMismatch { expected: usize, got: usize },
}

impl std::fmt::Display for ModelError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ModelError::MessageOutOfRange {
                message,
                num_messages,
            } => write!(f, "message {message} outside 1..={num_messages}"),
            ModelError::NotWanted { user, message } => {
                write!(f, "user {user} does not want message {message}")
            }
            ModelError::EmptyCombination => write!(f, "transmission combination is empty"),
            ModelError::NonPositiveRate(r) => write!(f, "transmission rate {r} must be positive"),
            ModelError::ReceptionLengthMismatch { expected, got } => {
                write!(f, "expected {expected} per-user entries, got {got}")
            }
        }
    }
}

impl std::error::Error for ModelError {}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::CapacitySnapshot;

    fn msgs(f: usize, idx: &[usize]) -> MessageSet {
        MessageSet::from_indices(f, idx).unwrap()
    }

    #[test]
    fn decodability_rules() {
        let f = 3;
        // wants {1}, has {2,3}: combination 2+3 brings nothing new.
        let si = SideInfo::from_wants(f, vec![msgs(f, &[1])]).unwrap();
        assert!(!is_instantly_decodable(
            si.user(0),
            &msgs(f, &[2, 3]),
            1.0,
            2.0
        ));

        // wants {2,3}: two unknowns in the combination.
        let si = SideInfo::from_wants(f, vec![msgs(f, &[2, 3])]).unwrap();
        assert!(!is_instantly_decodable(
            si.user(0),
            &msgs(f, &[2, 3]),
            1.0,
            2.0
        ));

        // wants {2}, has {1,3}: 2+3 XOR 3 recovers 2.
        let si = SideInfo::from_wants(f, vec![msgs(f, &[2])]).unwrap();
        assert!(is_instantly_decodable(
            si.user(0),
            &msgs(f, &[2, 3]),
            1.0,
            2.0
        ));

        // Rate above capacity blocks decoding regardless of the combination.
        let si = SideInfo::from_wants(f, vec![msgs(f, &[1])]).unwrap();
        assert!(!is_instantly_decodable(
            si.user(0),
            &msgs(f, &[1]),
            4.0,
            2.0
        ));
    }

    #[test]
    fn decoded_message_cases() {
        let f = 3;
        let si = SideInfo::from_wants(f, vec![msgs(f, &[2])]).unwrap();
        assert_eq!(decoded_message(si.user(0), &msgs(f, &[2, 3])), Some(2));

        let si = SideInfo::from_wants(f, vec![msgs(f, &[2, 3])]).unwrap();
        assert_eq!(decoded_message(si.user(0), &msgs(f, &[2, 3])), None);

        let si = SideInfo::from_wants(f, vec![msgs(f, &[1])]).unwrap();
        assert_eq!(decoded_message(si.user(0), &msgs(f, &[1])), Some(1));
    }

    /// Three users mid-session, reconstructed so that the worked schedule
    /// `{2+3, 1, 1+3, 2}` at rate 1 reproduces delays (N, 2N, 0) and overall
    /// completion 4N: user 1 wants {1}, user 2 wants {2,3}, user 3 wants {2}.
    fn worked_instance() -> SideInfo {
        SideInfo::from_wants(3, vec![msgs(3, &[1]), msgs(3, &[2, 3]), msgs(3, &[2])]).unwrap()
    }

    fn run_schedule(
        side: SideInfo,
        schedule: &[&[usize]],
        n: u64,
    ) -> (NetworkState, Vec<Option<f64>>) {
        let mut state = NetworkState::from_side_info(side, n, 1);
        let caps = CapacitySnapshot::new(vec![2.0, 2.0, 2.0]).unwrap();
        let mut completions = vec![None; 3];
        for combo in schedule {
            let tx = Transmission::new(msgs(3, combo), 1.0).unwrap();
            let outcomes = state
                .apply_transmission(&tx, &caps, &[true, true, true])
                .unwrap();
            for (u, o) in outcomes.iter().enumerate() {
                if o.completed_now {
                    completions[u] = Some(state.clock_s());
                }
            }
        }
        (state, completions)
    }

    #[test]
    fn worked_schedule_accumulates_delays() {
        let n = 7u64;
        let (state, completions) =
            run_schedule(worked_instance(), &[&[2, 3], &[1], &[1, 3], &[2]], n);
        let nf = n as f64;
        assert!(state.side().all_wants_empty());
        assert_eq!(state.clock_s(), 4.0 * nf);
        assert_eq!(state.stats()[0].delay_s(), nf);
        assert_eq!(state.stats()[1].delay_s(), 2.0 * nf);
        assert_eq!(state.stats()[2].delay_s(), 0.0);
        assert_eq!(completions[0], Some(2.0 * nf));
        assert_eq!(completions[1], Some(4.0 * nf));
        assert_eq!(completions[2], Some(nf));
    }

    #[test]
    fn worked_schedule_optimal_variant() {
        let n = 5u64;
        let (state, completions) = run_schedule(worked_instance(), &[&[1, 2], &[3]], n);
        let nf = n as f64;
        assert!(state.side().all_wants_empty());
        assert_eq!(state.clock_s(), 2.0 * nf);
        for u in 0..3 {
            assert_eq!(state.stats()[u].delay_s(), 0.0);
        }
        assert_eq!(completions[0], Some(nf));
        assert_eq!(completions[1], Some(2.0 * nf));
        assert_eq!(completions[2], Some(nf));
    }

    #[test]
    fn completed_user_sees_no_delay() {
        let f = 2;
        let side = SideInfo::from_wants(f, vec![msgs(f, &[]), msgs(f, &[1])]).unwrap();
        let mut state = NetworkState::from_side_info(side, 1, 1);
        let caps = CapacitySnapshot::new(vec![2.0, 2.0]).unwrap();
        let tx = Transmission::new(msgs(f, &[2]), 1.0).unwrap();
        let outcomes = state.apply_transmission(&tx, &caps, &[true, true]).unwrap();
        assert_eq!(state.stats()[0].delay_s(), 0.0);
        assert!(!outcomes[0].delayed);
        assert!(outcomes[1].delayed);
    }

    #[test]
    fn rejects_wrong_reception_length() {
        let mut state = NetworkState::new(3, 2, 1);
        let caps = CapacitySnapshot::new(vec![1.0, 1.0, 1.0]).unwrap();
        let tx = Transmission::new(msgs(2, &[1]), 1.0).unwrap();
        let err = state
            .apply_transmission(&tx, &caps, &[true, true])
            .unwrap_err();
        assert!(matches!(err, ModelError::ReceptionLengthMismatch { .. }));
    }

    #[test]
    fn random_runs_preserve_invariants() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(71);
        for _ in 0..200 {
            let users = rng.random_range(1..=4usize);
            let f = rng.random_range(1..=4usize);
            let n = rng.random_range(1..=8u64);
            let mut state = NetworkState::new(users, f, n);
            let caps = CapacitySnapshot::new(
                (0..users)
                    .map(|_| [1.0, 2.0, 4.0][rng.random_range(0..3)])
                    .collect(),
            )
            .unwrap();

            let mut expected_delay = vec![0.0f64; users];
            let mut expected_clock = 0.0f64;
            for _ in 0..rng.random_range(1..=20usize) {
                let mut combo = MessageSet::empty(f);
                for m in 1..=f {
                    if rng.random::<f64>() < 0.5 {
                        combo.insert(m);
                    }
                }
                if combo.is_empty() {
                    combo.insert(rng.random_range(1..=f));
                }
                let rate = [1.0, 2.0, 4.0][rng.random_range(0..3)];
                let tx = Transmission::new(combo, rate).unwrap();
                let received: Vec<bool> = (0..users).map(|_| rng.random::<f64>() < 0.8).collect();
                let wants_before: Vec<usize> =
                    (0..users).map(|u| state.side().wants(u).len()).collect();
                let outcomes = state.apply_transmission(&tx, &caps, &received).unwrap();
                expected_clock += n as f64 / rate;

                for (u, o) in outcomes.iter().enumerate() {
                    // At most one of decode / delay / erased-sample fires.
                    let events = [o.decoded.is_some(), o.delayed, !o.received && o.qualifying];
                    assert!(events.iter().filter(|&&e| e).count() <= 1);
                    // Wants shrinks by at most one.
                    let after = state.side().wants(u).len();
                    assert!(after == wants_before[u] || after + 1 == wants_before[u]);
                    if o.delayed {
                        expected_delay[u] += n as f64 / rate;
                    }
                }
            }
            for (u, expected) in expected_delay.iter().enumerate() {
                assert_eq!(state.stats()[u].delay_s(), *expected);
            }
            assert!((state.clock_s() - expected_clock).abs() <= 1e-9 * expected_clock.max(1.0));
        }
    }
}
