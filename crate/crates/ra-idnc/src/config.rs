//! Flat key-value config files.
//!
//! One `key = value` pair per line; `#` starts a comment. Keys match the
//! episode and channel parameter names; dB/dBm quantities are written as-is
//! and converted internally.
//!
//! ```text
//! users = 20
//! messages = 30
//! msg_size_bits = 1000000
//! scheduler = ra_idnc
//! tx_power_dbm_per_hz = -42.60
//! noise_dbm_per_hz = -168.60
//! bandwidth_hz = 10e6
//! fading_kind = rayleigh
//! erasure_kind = perfect
//! ```

use crate::sim::{EpisodeConfig, SimError};

pub fn parse_kv(text: &str) -> Result<Vec<(String, String)>, SimError> {
    let mut pairs = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = match raw.find('#') {
            Some(i) => &raw[..i],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(SimError::InvalidConfig(format!(
                "line {}: expected 'key = value', got '{raw}'",
                lineno + 1
            )));
        };
        pairs.push((key.trim().to_string(), value.trim().to_string()));
    }
    Ok(pairs)
}

/// Applies config-file pairs onto an episode config. Unknown keys are
/// rejected so typos never silently fall back to defaults.
pub fn apply_kv(config: &mut EpisodeConfig, pairs: &[(String, String)]) -> Result<(), SimError> {
    for (key, value) in pairs {
        apply_one(config, key, value)
            .map_err(|detail| SimError::InvalidConfig(format!("key '{key}': {detail}")))?;
    }
    Ok(())
}

pub fn load_into(config: &mut EpisodeConfig, text: &str) -> Result<(), SimError> {
    let pairs = parse_kv(text)?;
    apply_kv(config, &pairs)
}

fn apply_one(config: &mut EpisodeConfig, key: &str, value: &str) -> Result<(), String> {
    fn num<T: std::str::FromStr>(value: &str) -> Result<T, String> {
        value
            .parse::<T>()
            .map_err(|_| format!("cannot parse '{value}'"))
    }
    match key {
        "users" => config.users = num(value)?,
        "messages" => config.messages = num(value)?,
        "msg_size_bits" => config.msg_size_bits = num(value)?,
        "scheduler" => config.scheduler = value.parse()?,
        "seed" => config.seed = num(value)?,
        "max_transmissions" => config.max_transmissions = Some(num(value)?),
        "position_seed" => config.position_seed = num(value)?,
        "harmonic_bootstrap" => config.bootstrap = value.parse()?,
        "exact_threshold" => config.exact_threshold = num(value)?,
        "erasure_kind" => match value {
            "perfect" => config.erasure = crate::channel::ErasureModel::Perfect,
            "offset" => {
                if let crate::channel::ErasureModel::Perfect = config.erasure {
                    config.erasure = crate::channel::ErasureModel::Offset(0.0);
                }
            }
            other => return Err(format!("unknown erasure kind '{other}'")),
        },
        "erasure_epsilon" => {
            let eps: f64 = num(value)?;
            config.erasure =
                crate::channel::ErasureModel::offset(eps).map_err(|e| e.to_string())?;
        }
        "tx_power_dbm_per_hz" => config.channel.tx_power_dbm_per_hz = num(value)?,
        "noise_dbm_per_hz" => config.channel.noise_dbm_per_hz = num(value)?,
        "sinr_gap_db" => config.channel.sinr_gap_db = num(value)?,
        "bandwidth_hz" => config.channel.bandwidth_hz = num(value)?,
        "cell_diameter_m" => config.channel.cell_diameter_m = num(value)?,
        "shadowing_std_db" => config.channel.shadowing_std_db = num(value)?,
        "pathloss_exponent" => config.channel.pathloss_exponent = num(value)?,
        "pathloss_ref_db" => config.channel.pathloss_ref_db = num(value)?,
        "fading_kind" => config.channel.fading = value.parse()?,
        other => return Err(format!("unknown key '{other}'")),
    }
    Ok(())
}
