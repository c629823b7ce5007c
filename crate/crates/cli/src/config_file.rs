//! Flat `key=value` scenario files. Blank lines and `#` comments are
//! ignored; unknown keys are an error so typos do not silently fall back to
//! defaults. Every key matches the corresponding [`ScenarioConfig`] field,
//! except the beamwidth, which is given in degrees as `beamwidth_deg`.

use std::f64::consts::PI;
use std::fs;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use orbitee_core::config::ScenarioConfig;

/// Read a scenario file and overlay it on the defaults.
pub fn load(path: &Path) -> Result<ScenarioConfig> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read config file {}", path.display()))?;
    let mut cfg = ScenarioConfig::default();
    apply(&mut cfg, &text)?;
    cfg.validate()
        .map_err(|e| anyhow!("invalid configuration in {}: {e}", path.display()))?;
    Ok(cfg)
}

/// Apply `key=value` lines to an existing configuration.
pub fn apply(cfg: &mut ScenarioConfig, text: &str) -> Result<()> {
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| anyhow!("line {}: expected `key = value`, got `{raw}`", lineno + 1))?;
        set_key(cfg, key.trim(), value.trim())
            .with_context(|| format!("line {}: `{raw}`", lineno + 1))?;
    }
    Ok(())
}

fn set_key(cfg: &mut ScenarioConfig, key: &str, value: &str) -> Result<()> {
    fn f(value: &str) -> Result<f64> {
        value
            .parse::<f64>()
            .map_err(|_| anyhow!("`{value}` is not a number"))
    }
    fn n(value: &str) -> Result<usize> {
        value
            .parse::<usize>()
            .map_err(|_| anyhow!("`{value}` is not a non-negative integer"))
    }
    fn b(value: &str) -> Result<bool> {
        match value {
            "true" | "1" => Ok(true),
            "false" | "0" => Ok(false),
            _ => Err(anyhow!("`{value}` is not a boolean (true/false)")),
        }
    }

    match key {
        "carrier_frequency_hz" => cfg.carrier_frequency_hz = f(value)?,
        "pathloss_exponent" => cfg.pathloss_exponent = f(value)?,
        "tx_power_w" => cfg.tx_power_w = f(value)?,
        "beamwidth_deg" => cfg.beamwidth_rad = f(value)? * PI / 180.0,
        "uav_mass_kg" => cfg.uav_mass_kg = f(value)?,
        "c1" => cfg.c1 = f(value)?,
        "c2" => cfg.c2 = f(value)?,
        "nearfield_db" => cfg.nearfield_db = f(value)?,
        "noise_power_w" => cfg.noise_power_w = f(value)?,
        "user_density_per_km2" => cfg.user_density_per_km2 = f(value)?,
        "uav_density_per_km2" => cfg.uav_density_per_km2 = f(value)?,
        "h_min_m" => cfg.h_min_m = f(value)?,
        "h_max_m" => cfg.h_max_m = f(value)?,
        "r_min_m" => cfg.r_min_m = f(value)?,
        "r_max_m" => cfg.r_max_m = f(value)?,
        "h_inc_m" => cfg.h_inc_m = f(value)?,
        "r_inc_m" => cfg.r_inc_m = f(value)?,
        "bandwidth_hz" => cfg.bandwidth_hz = f(value)?,
        "timestep_s" => cfg.timestep_s = f(value)?,
        "steps_per_episode" => cfg.steps_per_episode = n(value)?,
        "episodes" => cfg.episodes = n(value)?,
        "init_height_m" => cfg.init_height_m = f(value)?,
        "discount" => cfg.discount = f(value)?,
        "learning_rate" => cfg.learning_rate = f(value)?,
        "epsilon_init" => cfg.epsilon_init = f(value)?,
        "epsilon_decay" => cfg.epsilon_decay = f(value)?,
        "epsilon_min" => cfg.epsilon_min = f(value)?,
        "buffer_capacity" => cfg.buffer_capacity = n(value)?,
        "batch_size" => cfg.batch_size = n(value)?,
        "target_update_period" => cfg.target_update_period = n(value)?,
        "double_q" => cfg.double_q = b(value)?,
        "share_weights" => cfg.share_weights = b(value)?,
        "normalize_rewards" => cfg.normalize_rewards = b(value)?,
        "gravity_m_s2" => cfg.gravity_m_s2 = f(value)?,
        "air_density_kg_m3" => cfg.air_density_kg_m3 = f(value)?,
        "rotor_area_m2" => cfg.rotor_area_m2 = f(value)?,
        _ => bail!("unknown configuration key `{key}`"),
    }
    Ok(())
}

/// Render a configuration in the same `key=value` syntax `load` accepts, so
/// the manifest of a finished run can be fed straight back in.
pub fn render(cfg: &ScenarioConfig) -> String {
    let mut out = String::new();
    let mut push = |key: &str, value: String| {
        out.push_str(key);
        out.push('=');
        out.push_str(&value);
        out.push('\n');
    };
    push("carrier_frequency_hz", cfg.carrier_frequency_hz.to_string());
    push("pathloss_exponent", cfg.pathloss_exponent.to_string());
    push("tx_power_w", cfg.tx_power_w.to_string());
    push("beamwidth_deg", (cfg.beamwidth_rad * 180.0 / PI).to_string());
    push("uav_mass_kg", cfg.uav_mass_kg.to_string());
    push("c1", cfg.c1.to_string());
    push("c2", cfg.c2.to_string());
    push("nearfield_db", cfg.nearfield_db.to_string());
    push("noise_power_w", cfg.noise_power_w.to_string());
    push("user_density_per_km2", cfg.user_density_per_km2.to_string());
    push("uav_density_per_km2", cfg.uav_density_per_km2.to_string());
    push("h_min_m", cfg.h_min_m.to_string());
    push("h_max_m", cfg.h_max_m.to_string());
    push("r_min_m", cfg.r_min_m.to_string());
    push("r_max_m", cfg.r_max_m.to_string());
    push("h_inc_m", cfg.h_inc_m.to_string());
    push("r_inc_m", cfg.r_inc_m.to_string());
    push("bandwidth_hz", cfg.bandwidth_hz.to_string());
    push("timestep_s", cfg.timestep_s.to_string());
    push("steps_per_episode", cfg.steps_per_episode.to_string());
    push("episodes", cfg.episodes.to_string());
    push("init_height_m", cfg.init_height_m.to_string());
    push("discount", cfg.discount.to_string());
    push("learning_rate", cfg.learning_rate.to_string());
    push("epsilon_init", cfg.epsilon_init.to_string());
    push("epsilon_decay", cfg.epsilon_decay.to_string());
    push("epsilon_min", cfg.epsilon_min.to_string());
    push("buffer_capacity", cfg.buffer_capacity.to_string());
    push("batch_size", cfg.batch_size.to_string());
    push("target_update_period", cfg.target_update_period.to_string());
    push("double_q", cfg.double_q.to_string());
    push("share_weights", cfg.share_weights.to_string());
    push("normalize_rewards", cfg.normalize_rewards.to_string());
    push("gravity_m_s2", cfg.gravity_m_s2.to_string());
    push("air_density_kg_m3", cfg.air_density_kg_m3.to_string());
    push("rotor_area_m2", cfg.rotor_area_m2.to_string());
    out
}
