//! Per-user running statistics and the completion-time projections built on
//! them.
//!
//! Each user tracks the harmonic mean of the rates of its instantly decodable
//! receptions, the accumulated seconds of useless received transmissions, and
//! the running average of erasure indicators over transmissions sent at a
//! feasible rate. The anticipated completion time projects these forward
//! assuming no further delay, and the decisive sets identify which users can
//! still push the worst-case projection higher at a given transmission rate.

/// Running statistics for one user.
#[derive(Clone, PartialEq, Debug, Default)]
pub struct UserStats {
    n_decodable: u64,
    inv_rate_sum: f64,
    delay_s: f64,
    erased_samples: u64,
    erasure_samples: u64,
}

impl UserStats {
    pub fn new() -> Self {
        Self::default()
    }

    /// Folds one instantly decodable reception at `rate_bps` into the
    /// harmonic-mean tracker. The tracker stays exactly the harmonic mean of
    /// every rate fed so far.
    pub fn update_harmonic(&mut self, rate_bps: f64) -> Result<(), MetricsError> {
        if rate_bps <= 0.0 || !rate_bps.is_finite() {
            return Err(MetricsError::NonPositiveRate(rate_bps));
        }
        self.n_decodable += 1;
        self.inv_rate_sum += 1.0 / rate_bps;
        Ok(())
    }

    /// Folds one erasure indicator for a transmission whose rate did not
    /// exceed this user's capacity.
    pub fn update_erasure_avg(&mut self, erased: bool) {
        self.erasure_samples += 1;
        if erased {
            self.erased_samples += 1;
        }
    }

    pub fn add_delay(&mut self, seconds: f64) {
        debug_assert!(seconds >= 0.0);
        self.delay_s += seconds;
    }

    pub fn n_decodable(&self) -> u64 {
        self.n_decodable
    }

    /// Harmonic mean of the decodable-reception rates, once at least one has
    /// been recorded.
    pub fn harmonic_rate(&self) -> Option<f64> {
        if self.n_decodable == 0 {
            None
        } else {
            Some(self.n_decodable as f64 / self.inv_rate_sum)
        }
    }

    pub fn delay_s(&self) -> f64 {
        self.delay_s
    }

    /// Mean of the recorded erasure indicators; reads 0 with no samples.
    pub fn erasure_avg(&self) -> f64 {
        if self.erasure_samples == 0 {
            0.0
        } else {
            self.erased_samples as f64 / self.erasure_samples as f64
        }
    }

    pub fn erasure_samples(&self) -> u64 {
        self.erasure_samples
    }
}

/// Source of the harmonic-rate value used before a user has any instantly
/// decodable reception on record.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub enum HarmonicBootstrap {
    /// Use the user's capacity in the current snapshot.
    #[default]
    SnapshotCapacity,
    /// Use the mean of the candidate rate pool.
    MeanCandidateRate,
}

impl std::str::FromStr for HarmonicBootstrap {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "snapshot_capacity" => Ok(HarmonicBootstrap::SnapshotCapacity),
            "mean_candidate_rate" => Ok(HarmonicBootstrap::MeanCandidateRate),
            other => Err(format!("unknown harmonic bootstrap '{other}'")),
        }
    }
}

/// Parameters of a decisive-set query: transmission rate, criticality layer,
/// and message size.
#[derive(Clone, Copy, PartialEq, Debug)]
pub struct DecisiveQuery {
    pub rate_bps: f64,
    pub layer: u32,
    pub msg_size_bits: u64,
}

impl DecisiveQuery {
    pub fn new(rate_bps: f64, layer: u32, msg_size_bits: u64) -> Result<Self, MetricsError> {
        if rate_bps <= 0.0 || !rate_bps.is_finite() {
            return Err(MetricsError::NonPositiveRate(rate_bps));
        }
        if layer == 0 {
            return Err(MetricsError::ZeroLayer);
        }
        Ok(DecisiveQuery {
            rate_bps,
            layer,
            msg_size_bits,
        })
    }
}

/// Projects the user's completion time assuming no further delay increase:
/// `(N*F / harmonic_rate + delay) / (1 - erasure_avg)`.
///
/// `bootstrap_rate_bps` stands in for the harmonic rate while the user has no
/// decodable reception yet.
pub fn anticipated_completion(
    stats: &UserStats,
    bootstrap_rate_bps: f64,
    msg_size_bits: u64,
    num_messages: usize,
) -> Result<f64, MetricsError> {
    let rate = match stats.harmonic_rate() {
        Some(r) => r,
        None => {
            if bootstrap_rate_bps <= 0.0 || !bootstrap_rate_bps.is_finite() {
                return Err(MetricsError::NonPositiveRate(bootstrap_rate_bps));
            }
            bootstrap_rate_bps
        }
    };
    let eps = stats.erasure_avg();
    if eps >= 1.0 {
        return Err(MetricsError::ErasureDiverged);
    }
    let base = msg_size_bits as f64 * num_messages as f64 / rate + stats.delay_s();
    Ok(base / (1.0 - eps))
}

/// Anticipated completion per user, `None` for users with an empty Wants set.
/// A diverged erasure average projects to infinity.
pub fn anticipated_completions(
    stats: &[UserStats],
    bootstrap_rates_bps: &[f64],
    wants_nonempty: &[bool],
    msg_size_bits: u64,
    num_messages: usize,
) -> Vec<Option<f64>> {
    stats
        .iter()
        .zip(bootstrap_rates_bps)
        .zip(wants_nonempty)
        .map(|((s, &b), &active)| {
            if !active {
                return None;
            }
            Some(
                match anticipated_completion(s, b, msg_size_bits, num_messages) {
                    Ok(c) => c,
                    Err(MetricsError::ErasureDiverged) => f64::INFINITY,
                    Err(_) => f64::INFINITY,
                },
            )
        })
        .collect()
}

/// The k-th decisive shell at the queried rate, from precomputed anticipated
/// completions. Layer 1 holds the users whose projection can still reach the
/// current maximum after one missed transmission; layer k the users needing k
/// consecutive misses, excluding every earlier layer.
pub fn decisive_set_from_completions(
    completions: &[Option<f64>],
    query: &DecisiveQuery,
) -> Vec<usize> {
    let slot = query.msg_size_bits as f64 / query.rate_bps;
    let ceiling = match completions
        .iter()
        .flatten()
        .cloned()
        .fold(None, |acc: Option<f64>, c| {
            Some(match acc {
                Some(a) if a >= c => a,
                _ => c,
            })
        }) {
        Some(c) => c,
        None => return Vec::new(),
    };

    let mut assigned = vec![false; completions.len()];
    let mut shell = Vec::new();
    for k in 1..=query.layer {
        shell.clear();
        for (u, c) in completions.iter().enumerate() {
            let Some(c) = c else { continue };
            if assigned[u] {
                continue;
            }
            if c + k as f64 * slot >= ceiling {
                shell.push(u);
            }
        }
        if k < query.layer {
            for &u in &shell {
                assigned[u] = true;
            }
        }
    }
    shell
}

/// Decisive shell computed directly from user statistics.
pub fn decisive_set(
    stats: &[UserStats],
    bootstrap_rates_bps: &[f64],
    wants_nonempty: &[bool],
    query: &DecisiveQuery,
    num_messages: usize,
) -> Vec<usize> {
    let completions = anticipated_completions(
        stats,
        bootstrap_rates_bps,
        wants_nonempty,
        query.msg_size_bits,
        num_messages,
    );
    decisive_set_from_completions(&completions, query)
}

/// Smallest layer index at which each user becomes decisive at the given
/// slot duration, or `None` when it never does (infinite ceiling with a
/// finite projection). Boundary cases are settled with the same
/// `c + k * slot >= ceiling` comparison the shell recurrence uses, so the
/// two always agree.
pub fn shell_indices(completions: &[Option<f64>], slot_s: f64) -> Vec<Option<u32>> {
    let ceiling = completions
        .iter()
        .flatten()
        .cloned()
        .fold(f64::NEG_INFINITY, f64::max);
    completions
        .iter()
        .map(|c| {
            let c = (*c)?;
            if ceiling.is_infinite() {
                return if c.is_infinite() { Some(1) } else { None };
            }
            let mut k = ((ceiling - c) / slot_s).ceil().max(1.0);
            if k > u32::MAX as f64 {
                return None;
            }
            while k > 1.0 && c + (k - 1.0) * slot_s >= ceiling {
                k -= 1.0;
            }
            while c + k * slot_s < ceiling {
                k += 1.0;
                if k > u32::MAX as f64 {
                    return None;
                }
            }
            Some(k as u32)
        })
        .collect()
}

#[derive(Clone, Copy, PartialEq, Debug)]
pub enum MetricsError {
    NonPositiveRate(f64),
    ZeroLayer,
    ErasureDiverged,
}

impl std::fmt::Display for MetricsError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MetricsError::NonPositiveRate(r) => write!(f, "rate {r} must be positive"),
            MetricsError::ZeroLayer => write!(f, "decisive layer index starts at 1"),
            MetricsError::ErasureDiverged => {
                write!(
                    f,
                    "erasure average reached 1; completion projection diverges"
                )
            }
        }
    }
}

impl std::error::Error for MetricsError {}
