//! Scenario configuration: physical constants, environment dimensions and
//! learning hyperparameters, with the evaluation defaults built in.

use core::f64::consts::PI;
use core::fmt;

use crate::energy::EnergyParams;

/// All scenario constants. `Default` carries the evaluation parameter set.
#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioConfig {
    /// Carrier frequency (Hz). Not used by the link equations directly but
    /// kept as part of the scenario record.
    pub carrier_frequency_hz: f64,
    /// Pathloss exponent alpha.
    pub pathloss_exponent: f64,
    /// UAV transmit power p (W).
    pub tx_power_w: f64,
    /// Antenna half-power beamwidth eta (radians).
    pub beamwidth_rad: f64,
    /// UAV mass (kg).
    pub uav_mass_kg: f64,
    /// Aerodynamic parameter c1 (kg/m).
    pub c1: f64,
    /// Aerodynamic parameter c2 (kg m^3 / s^4).
    pub c2: f64,
    /// Near-field pathloss c (dB).
    pub nearfield_db: f64,
    /// Noise power sigma^2 (W).
    pub noise_power_w: f64,
    /// Ground user density (per km^2).
    pub user_density_per_km2: f64,
    /// UAV density (per km^2); fixes the simulation area for a fleet size.
    pub uav_density_per_km2: f64,
    /// Height bounds (m).
    pub h_min_m: f64,
    pub h_max_m: f64,
    /// Orbit radius bounds (m).
    pub r_min_m: f64,
    pub r_max_m: f64,
    /// Height action increment (m).
    pub h_inc_m: f64,
    /// Radius action increment (m).
    pub r_inc_m: f64,
    /// Per-user allocated bandwidth B (Hz).
    pub bandwidth_hz: f64,
    /// Timestep duration tau (s).
    pub timestep_s: f64,
    /// Timesteps per episode T.
    pub steps_per_episode: usize,
    /// Episodes per experiment.
    pub episodes: usize,
    /// Initial UAV height (m).
    pub init_height_m: f64,
    /// Q-value discount factor gamma.
    pub discount: f64,
    /// SGD learning rate.
    pub learning_rate: f64,
    /// Initial epsilon for epsilon-greedy exploration.
    pub epsilon_init: f64,
    /// Multiplicative epsilon decay per timestep.
    pub epsilon_decay: f64,
    /// Epsilon floor.
    pub epsilon_min: f64,
    /// Replay buffer capacity (entries).
    pub buffer_capacity: usize,
    /// Replay batch size.
    pub batch_size: usize,
    /// Hard target-network copy period in train steps. 0 copies every step,
    /// which is equivalent to running without a frozen target.
    pub target_update_period: usize,
    /// Use double-Q target selection (argmax by online net, value by target).
    pub double_q: bool,
    /// All UAVs share one network and replay buffer.
    pub share_weights: bool,
    /// Scale rewards by a per-agent running absolute maximum before storage.
    pub normalize_rewards: bool,
    /// Gravitational acceleration (m/s^2).
    pub gravity_m_s2: f64,
    /// Air density for the quadcopter hover model (kg/m^3).
    pub air_density_kg_m3: f64,
    /// Total rotor disk area for the hover model (m^2).
    pub rotor_area_m2: f64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            carrier_frequency_hz: 2e9,
            pathloss_exponent: 2.1,
            tx_power_w: 1.0,
            beamwidth_rad: 30.0 * PI / 180.0,
            uav_mass_kg: 10.0,
            c1: 9.26e-4,
            c2: 2250.0,
            nearfield_db: -38.4,
            noise_power_w: 8e-13,
            user_density_per_km2: 10.0,
            uav_density_per_km2: 0.2,
            h_min_m: 20.0,
            h_max_m: 300.0,
            r_min_m: 50.0,
            r_max_m: 1000.0,
            h_inc_m: 5.0,
            r_inc_m: 10.0,
            bandwidth_hz: 1e6,
            timestep_s: 2.0,
            steps_per_episode: 250,
            episodes: 500,
            init_height_m: 100.0,
            discount: 0.1,
            learning_rate: 5e-5,
            epsilon_init: 1.0,
            epsilon_decay: 0.99995,
            epsilon_min: 0.001,
            buffer_capacity: 5000,
            batch_size: 1000,
            target_update_period: 200,
            double_q: false,
            share_weights: false,
            normalize_rewards: true,
            gravity_m_s2: 9.81,
            air_density_kg_m3: 1.225,
            rotor_area_m2: 0.5,
        }
    }
}

/// Configuration validation failure.
#[derive(Clone, Debug, PartialEq)]
pub enum ConfigError {
    NonPositive(&'static str),
    BadRange(&'static str),
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::NonPositive(field) => {
                write!(f, "field `{field}` must be strictly positive")
            }
            ConfigError::BadRange(msg) => write!(f, "invalid range: {msg}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for ConfigError {}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let positive = [
            ("carrier_frequency_hz", self.carrier_frequency_hz),
            ("pathloss_exponent", self.pathloss_exponent),
            ("tx_power_w", self.tx_power_w),
            ("beamwidth_rad", self.beamwidth_rad),
            ("uav_mass_kg", self.uav_mass_kg),
            ("c1", self.c1),
            ("c2", self.c2),
            ("noise_power_w", self.noise_power_w),
            ("uav_density_per_km2", self.uav_density_per_km2),
            ("h_min_m", self.h_min_m),
            ("h_max_m", self.h_max_m),
            ("r_min_m", self.r_min_m),
            ("r_max_m", self.r_max_m),
            ("h_inc_m", self.h_inc_m),
            ("r_inc_m", self.r_inc_m),
            ("bandwidth_hz", self.bandwidth_hz),
            ("timestep_s", self.timestep_s),
            ("init_height_m", self.init_height_m),
            ("learning_rate", self.learning_rate),
            ("gravity_m_s2", self.gravity_m_s2),
            ("air_density_kg_m3", self.air_density_kg_m3),
            ("rotor_area_m2", self.rotor_area_m2),
        ];
        for (name, value) in positive {
            if !(value > 0.0) {
                return Err(ConfigError::NonPositive(name));
            }
        }
        if self.user_density_per_km2 < 0.0 {
            return Err(ConfigError::BadRange("user_density_per_km2 must be >= 0"));
        }
        if self.h_min_m >= self.h_max_m {
            return Err(ConfigError::BadRange("h_min_m must be < h_max_m"));
        }
        if self.r_min_m >= self.r_max_m {
            return Err(ConfigError::BadRange("r_min_m must be < r_max_m"));
        }
        if self.init_height_m < self.h_min_m || self.init_height_m > self.h_max_m {
            return Err(ConfigError::BadRange(
                "init_height_m must lie within [h_min_m, h_max_m]",
            ));
        }
        if !(0.0..=1.0).contains(&self.epsilon_init)
            || !(0.0..=1.0).contains(&self.epsilon_min)
            || !(0.0..=1.0).contains(&self.epsilon_decay)
        {
            return Err(ConfigError::BadRange("epsilon values must lie in [0, 1]"));
        }
        if !(0.0..=1.0).contains(&self.discount) {
            return Err(ConfigError::BadRange("discount must lie in [0, 1]"));
        }
        if self.batch_size == 0 || self.buffer_capacity == 0 {
            return Err(ConfigError::BadRange(
                "buffer_capacity and batch_size must be >= 1",
            ));
        }
        if self.batch_size > self.buffer_capacity {
            return Err(ConfigError::BadRange(
                "batch_size must not exceed buffer_capacity",
            ));
        }
        if self.steps_per_episode == 0 || self.episodes == 0 {
            return Err(ConfigError::BadRange(
                "steps_per_episode and episodes must be >= 1",
            ));
        }
        Ok(())
    }

    /// The subset of parameters the energy model needs.
    pub fn energy_params(&self) -> EnergyParams {
        EnergyParams {
            c1: self.c1,
            c2: self.c2,
            gravity_m_s2: self.gravity_m_s2,
            mass_kg: self.uav_mass_kg,
            air_density_kg_m3: self.air_density_kg_m3,
            rotor_area_m2: self.rotor_area_m2,
        }
    }
}
