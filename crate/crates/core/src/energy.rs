//! Propulsion energy models and energy-efficiency metrics.
//!
//! Fixed-wing flight energy for a banked circular orbit, the closed-form
//! energy-optimal velocity for a given turn radius, an ideal induced-power
//! hover model for the quadcopter comparison, and the per-UAV / network
//! energy-efficiency ratios.

use alloc::vec::Vec;
use core::fmt;

/// Parameters of the propulsion models.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnergyParams {
    /// Aerodynamic parameter c1 (kg/m).
    pub c1: f64,
    /// Aerodynamic parameter c2 (kg m^3 / s^4).
    pub c2: f64,
    pub gravity_m_s2: f64,
    pub mass_kg: f64,
    pub air_density_kg_m3: f64,
    pub rotor_area_m2: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EnergyError {
    /// The fixed-wing power model is singular at v = 0 or r = 0.
    SingularInput,
    /// An energy-efficiency ratio needs strictly positive energy.
    NonPositiveEnergy,
    /// Network EE over an empty series is undefined.
    EmptySeries,
    /// Mismatched per-step series lengths.
    LengthMismatch,
}

impl fmt::Display for EnergyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EnergyError::SingularInput => write!(f, "fixed-wing model requires r > 0 and v > 0"),
            EnergyError::NonPositiveEnergy => write!(f, "energy must be strictly positive"),
            EnergyError::EmptySeries => write!(f, "empty metric series"),
            EnergyError::LengthMismatch => write!(f, "throughput/energy series length mismatch"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for EnergyError {}

/// Instantaneous propulsion power (W) of a fixed-wing UAV flying a circular
/// orbit of radius `r` at velocity `v`.
pub fn fixed_wing_power(radius_m: f64, velocity_m_s: f64, p: &EnergyParams) -> Result<f64, EnergyError> {
    if !(radius_m > 0.0) || !(velocity_m_s > 0.0) {
        return Err(EnergyError::SingularInput);
    }
    let gr = p.gravity_m_s2 * radius_m;
    Ok((p.c1 + p.c2 / (gr * gr)) * velocity_m_s * velocity_m_s * velocity_m_s
        + p.c2 / velocity_m_s)
}

/// Propulsion energy (J) consumed over one timestep of duration `tau_s`.
pub fn fixed_wing_energy(
    radius_m: f64,
    velocity_m_s: f64,
    tau_s: f64,
    p: &EnergyParams,
) -> Result<f64, EnergyError> {
    if !(tau_s > 0.0) {
        return Err(EnergyError::SingularInput);
    }
    Ok(tau_s * fixed_wing_power(radius_m, velocity_m_s, p)?)
}

/// The velocity (m/s) minimising fixed-wing power for turn radius `r`:
/// `(c2 / (3 (c1 + c2/(g r)^2)))^(1/4)`.
pub fn optimal_velocity(radius_m: f64, p: &EnergyParams) -> f64 {
    let gr = p.gravity_m_s2 * radius_m;
    libm::pow(p.c2 / (3.0 * (p.c1 + p.c2 / (gr * gr))), 0.25)
}

/// Ideal induced hover power (W) for the quadcopter comparison:
/// `sqrt((m g)^3 / (2 rho A))`.
pub fn hover_power(p: &EnergyParams) -> f64 {
    let weight = p.mass_kg * p.gravity_m_s2;
    libm::sqrt(weight * weight * weight / (2.0 * p.air_density_kg_m3 * p.rotor_area_m2))
}

/// Hover energy (J) over one timestep.
pub fn hover_energy(tau_s: f64, p: &EnergyParams) -> f64 {
    tau_s * hover_power(p)
}

/// Per-UAV energy efficiency (bits/J) for one timestep.
pub fn uav_ee(throughput_bits: f64, energy_j: f64) -> Result<f64, EnergyError> {
    if !(energy_j > 0.0) {
        return Err(EnergyError::NonPositiveEnergy);
    }
    Ok(throughput_bits / energy_j)
}

/// Network energy efficiency (bits/J) over a whole episode: the ratio of the
/// summed throughput to the summed energy, not a mean of per-step ratios.
///
/// `per_step_throughputs[t][i]` and `per_step_energies[t][i]` hold the bits
/// delivered and Joules consumed by UAV `i` during timestep `t`.
pub fn network_ee(
    per_step_throughputs: &[Vec<f64>],
    per_step_energies: &[Vec<f64>],
) -> Result<f64, EnergyError> {
    if per_step_throughputs.is_empty() || per_step_energies.is_empty() {
        return Err(EnergyError::EmptySeries);
    }
    if per_step_throughputs.len() != per_step_energies.len() {
        return Err(EnergyError::LengthMismatch);
    }
    let mut bits = 0.0;
    let mut joules = 0.0;
    for (r_row, e_row) in per_step_throughputs.iter().zip(per_step_energies) {
        if r_row.len() != e_row.len() {
            return Err(EnergyError::LengthMismatch);
        }
        bits += r_row.iter().sum::<f64>();
        joules += e_row.iter().sum::<f64>();
    }
    if !(joules > 0.0) {
        return Err(EnergyError::NonPositiveEnergy);
    }
    Ok(bits / joules)
}
