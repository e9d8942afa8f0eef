//! Cellular downlink channel: per-user achievable capacities from geometry
//! and fading, plus the erasure model used to decide receptions.
//!
//! The gain model is log-distance path loss with log-normal shadowing and
//! optional Rayleigh fast fading; one independent draw per user per
//! transmission (block fading). Power and noise densities are given per Hz,
//! so the SNR is their ratio scaled by the linear gain, and the capacity is
//! `bandwidth * log2(1 + snr / gap)`.

use rand::Rng;

/// Fast-fading model applied on top of path loss and shadowing.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub enum Fading {
    None,
    #[default]
    Rayleigh,
}

impl std::str::FromStr for Fading {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "none" => Ok(Fading::None),
            "rayleigh" => Ok(Fading::Rayleigh),
            other => Err(format!("unknown fading kind '{other}'")),
        }
    }
}

/// Cell geometry and radio parameters. Defaults: -42.60 dBm/Hz transmit
/// density, -168.60 dBm/Hz noise density, 0 dB SINR gap, 10 MHz bandwidth,
/// 500 m cell diameter, no shadowing, path-loss exponent 3.5 with a 30 dB
/// reference loss at 1 m, Rayleigh fading. The reference loss pins the
/// cell-edge SNR near 12 dB, which spreads the per-user capacities over
/// roughly a decade — the regime where rate choice matters.
#[derive(Clone, PartialEq, Debug)]
pub struct ChannelParams {
    pub tx_power_dbm_per_hz: f64,
    pub noise_dbm_per_hz: f64,
    pub sinr_gap_db: f64,
    pub bandwidth_hz: f64,
    pub cell_diameter_m: f64,
    pub shadowing_std_db: f64,
    pub pathloss_exponent: f64,
    /// Reference loss in dB at 1 m.
    pub pathloss_ref_db: f64,
    pub fading: Fading,
}

impl Default for ChannelParams {
    fn default() -> Self {
        ChannelParams {
            tx_power_dbm_per_hz: -42.60,
            noise_dbm_per_hz: -168.60,
            sinr_gap_db: 0.0,
            bandwidth_hz: 10.0e6,
            cell_diameter_m: 500.0,
            shadowing_std_db: 0.0,
            pathloss_exponent: 3.5,
            pathloss_ref_db: 30.0,
            fading: Fading::Rayleigh,
        }
    }
}

impl ChannelParams {
    pub fn validate(&self) -> Result<(), ChannelError> {
        if self.bandwidth_hz <= 0.0 || !self.bandwidth_hz.is_finite() {
            return Err(ChannelError::InvalidParam("bandwidth_hz must be positive"));
        }
        if self.cell_diameter_m <= 0.0 || !self.cell_diameter_m.is_finite() {
            return Err(ChannelError::InvalidParam(
                "cell_diameter_m must be positive",
            ));
        }
        if self.shadowing_std_db < 0.0 {
            return Err(ChannelError::InvalidParam("shadowing_std_db must be >= 0"));
        }
        Ok(())
    }
}

/// Per-user achievable rates for one transmission.
#[derive(Clone, PartialEq, Debug)]
pub struct CapacitySnapshot {
    rates_bps: Vec<f64>,
}

impl CapacitySnapshot {
    pub fn new(rates_bps: Vec<f64>) -> Result<Self, ChannelError> {
        if rates_bps.is_empty() {
            return Err(ChannelError::NoUsers);
        }
        for &r in &rates_bps {
            if r <= 0.0 || !r.is_finite() {
                return Err(ChannelError::InvalidCapacity(r));
            }
        }
        Ok(CapacitySnapshot { rates_bps })
    }

    pub fn len(&self) -> usize {
        self.rates_bps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rates_bps.is_empty()
    }

    pub fn rate_bps(&self, user: usize) -> f64 {
        self.rates_bps[user]
    }

    pub fn rates(&self) -> &[f64] {
        &self.rates_bps
    }
}

/// Erasure probability of a transmission at `rate` for a user with capacity
/// `capacity`. Perfect estimation erases nothing below capacity and
/// everything above; the offset variant erases feasible transmissions with a
/// fixed base probability.
#[derive(Clone, Copy, PartialEq, Debug, Default)]
pub enum ErasureModel {
    #[default]
    Perfect,
    Offset(f64),
}

impl ErasureModel {
    pub fn offset(base: f64) -> Result<Self, ChannelError> {
        if !(0.0..1.0).contains(&base) {
            return Err(ChannelError::InvalidParam(
                "offset erasure must lie in [0,1)",
            ));
        }
        Ok(ErasureModel::Offset(base))
    }

    pub fn erasure_probability(&self, rate_bps: f64, capacity_bps: f64) -> f64 {
        if rate_bps > capacity_bps {
            return 1.0;
        }
        match self {
            ErasureModel::Perfect => 0.0,
            ErasureModel::Offset(base) => *base,
        }
    }

    /// True when feasible-rate transmissions are never erased.
    pub fn is_effectively_perfect(&self) -> bool {
        matches!(self, ErasureModel::Perfect | ErasureModel::Offset(0.0))
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Shannon-style capacity `bandwidth * log2(1 + snr/gap)` in bits/second.
pub fn capacity_bps(
    snr_linear: f64,
    gap_linear: f64,
    bandwidth_hz: f64,
) -> Result<f64, ChannelError> {
    if snr_linear < 0.0 || !snr_linear.is_finite() {
        return Err(ChannelError::NegativeSnr(snr_linear));
    }
    if gap_linear <= 0.0 || !gap_linear.is_finite() {
        return Err(ChannelError::InvalidParam("SINR gap must be positive"));
    }
    Ok(bandwidth_hz * (1.0 + snr_linear / gap_linear).log2())
}

fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    // Box-Muller; two uniforms consumed per call so the draw count per user
    // stays fixed.
    let u1: f64 = 1.0 - rng.random::<f64>();
    let u2: f64 = rng.random::<f64>();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

fn exponential_unit<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let u: f64 = rng.random::<f64>();
    (-(1.0 - u).ln()).max(1e-300)
}

/// Draws one capacity per user from the configured gain model. Distances are
/// measured from the base station; a fresh draw is made on every call.
pub fn sample_snapshot<R: Rng + ?Sized>(
    params: &ChannelParams,
    distances_m: &[f64],
    rng: &mut R,
) -> Result<CapacitySnapshot, ChannelError> {
    params.validate()?;
    if distances_m.is_empty() {
        return Err(ChannelError::NoUsers);
    }
    let radius = params.cell_diameter_m / 2.0;
    for &d in distances_m {
        if !(0.0..=radius).contains(&d) {
            return Err(ChannelError::PositionOutsideCell {
                distance_m: d,
                radius_m: radius,
            });
        }
    }

    let snr_density_db = params.tx_power_dbm_per_hz - params.noise_dbm_per_hz;
    let gap = db_to_linear(params.sinr_gap_db);
    let mut rates = Vec::with_capacity(distances_m.len());
    for &d in distances_m {
        // Clamp to 1 m so the log-distance law stays finite near the mast.
        let pl_db = params.pathloss_ref_db + 10.0 * params.pathloss_exponent * d.max(1.0).log10();
        let shadow_db = params.shadowing_std_db * standard_normal(rng);
        let fade = match params.fading {
            Fading::None => 1.0,
            Fading::Rayleigh => exponential_unit(rng),
        };
        let snr = db_to_linear(snr_density_db - pl_db + shadow_db) * fade;
        rates.push(capacity_bps(snr, gap, params.bandwidth_hz)?);
    }
    CapacitySnapshot::new(rates)
}

#[derive(Clone, Copy, PartialEq, Debug)]
pub enum ChannelError {
    NegativeSnr(f64),
    NoUsers,
    InvalidCapacity(f64),
    InvalidParam(&'static str),
    PositionOutsideCell { distance_m: f64, radius_m: f64 },
}

impl std::fmt::Display for ChannelError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ChannelError::NegativeSnr(s) => write!(f, "SNR {s} must be non-negative and finite"),
            ChannelError::NoUsers => write!(f, "at least one user required"),
            ChannelError::InvalidCapacity(c) => {
                write!(f, "capacity {c} must be positive and finite")
            }
            ChannelError::InvalidParam(msg) => write!(f, "{msg}"),
            ChannelError::PositionOutsideCell {
                distance_m,
                radius_m,
            } => {
                write!(
                    f,
                    "user at {distance_m} m lies outside the {radius_m} m cell radius"
                )
            }
        }
    }
}

impl std::error::Error for ChannelError {}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn capacity_worked_values() {
        assert_eq!(capacity_bps(3.0, 1.0, 1.0).unwrap(), 2.0);
        assert_eq!(capacity_bps(0.0, 1.0, 1.0).unwrap(), 0.0);
        assert_eq!(capacity_bps(15.0, 1.0, 10.0).unwrap(), 40.0);
        assert!(capacity_bps(-0.5, 1.0, 1.0).is_err());
    }

    #[test]
    fn capacity_increases_with_snr() {
        let mut last = 0.0;
        for snr in [0.1, 1.0, 10.0, 100.0] {
            let c = capacity_bps(snr, 2.0, 5.0).unwrap();
            assert!(c > last);
            last = c;
        }
    }

    #[test]
    fn erasure_probability_cases() {
        let p = ErasureModel::Perfect;
        assert_eq!(p.erasure_probability(2.0, 3.0), 0.0);
        assert_eq!(p.erasure_probability(4.0, 3.0), 1.0);
        let o = ErasureModel::offset(0.1).unwrap();
        assert_eq!(o.erasure_probability(2.0, 3.0), 0.1);
        assert_eq!(o.erasure_probability(4.0, 3.0), 1.0);
        assert!(ErasureModel::offset(1.0).is_err());

        for model in [ErasureModel::Perfect, ErasureModel::Offset(0.4)] {
            for (r, c) in [(0.5, 1.0), (1.0, 1.0), (2.0, 1.0)] {
                let e = model.erasure_probability(r, c);
                assert!((0.0..=1.0).contains(&e));
            }
        }
    }

    fn flat_params() -> ChannelParams {
        ChannelParams {
            shadowing_std_db: 0.0,
            fading: Fading::None,
            ..ChannelParams::default()
        }
    }

    #[test]
    fn equal_distance_equal_capacity() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let snap = sample_snapshot(&flat_params(), &[120.0, 120.0], &mut rng).unwrap();
        assert_eq!(snap.rate_bps(0), snap.rate_bps(1));
    }

    #[test]
    fn closer_user_gets_more_capacity() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let snap = sample_snapshot(&flat_params(), &[50.0, 200.0], &mut rng).unwrap();
        assert!(snap.rate_bps(0) > snap.rate_bps(1));
    }

    #[test]
    fn deterministic_given_seed() {
        let params = ChannelParams {
            shadowing_std_db: 4.0,
            ..ChannelParams::default()
        };
        let d = [30.0, 90.0, 210.0];
        let mut a = ChaCha8Rng::seed_from_u64(99);
        let mut b = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..5 {
            let s1 = sample_snapshot(&params, &d, &mut a).unwrap();
            let s2 = sample_snapshot(&params, &d, &mut b).unwrap();
            assert_eq!(s1, s2);
        }
    }

    #[test]
    fn rng_irrelevant_without_randomness() {
        let d = [30.0, 90.0];
        let mut a = ChaCha8Rng::seed_from_u64(1);
        let mut b = ChaCha8Rng::seed_from_u64(2);
        let s1 = sample_snapshot(&flat_params(), &d, &mut a).unwrap();
        let s2 = sample_snapshot(&flat_params(), &d, &mut b).unwrap();
        assert_eq!(s1, s2);
    }

    #[test]
    fn rejects_bad_positions_and_empty_users() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(matches!(
            sample_snapshot(&flat_params(), &[], &mut rng),
            Err(ChannelError::NoUsers)
        ));
        assert!(matches!(
            sample_snapshot(&flat_params(), &[400.0], &mut rng),
            Err(ChannelError::PositionOutsideCell { .. })
        ));
    }
}
