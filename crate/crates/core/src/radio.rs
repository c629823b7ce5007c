//! Downlink radio model: downtilted cone antenna gain, strongest-signal
//! association, SINR with all non-serving UAVs as interferers, and Shannon
//! throughput over the per-user bandwidth allocation.

use alloc::vec::Vec;

use crate::config::ScenarioConfig;
use crate::environment::Point;

/// Geometry of one UAV-to-user link.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinkGeometry {
    /// Horizontal ground distance between user and UAV (m).
    pub horiz_dist_m: f64,
    /// UAV height above ground (m).
    pub height_m: f64,
}

/// A UAV as the radio layer sees it: horizontal position plus height.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UavPose {
    pub position: Point,
    pub height_m: f64,
}

impl UavPose {
    pub fn geometry_to(&self, user: &Point) -> LinkGeometry {
        LinkGeometry {
            horiz_dist_m: self.position.dist(user),
            height_m: self.height_m,
        }
    }
}

/// Downtilted cone antenna gain in dB: `-min(20, 12 (theta / eta)^2)` where
/// `theta = arctan(d / h)` is the off-axis angle.
pub fn antenna_gain_db(geom: &LinkGeometry, beamwidth_rad: f64) -> f64 {
    if geom.horiz_dist_m == 0.0 {
        return 0.0;
    }
    // h = 0 with d > 0 degenerates to theta = pi/2 and the -20 dB floor.
    let theta = libm::atan(geom.horiz_dist_m / geom.height_m);
    let ratio = theta / beamwidth_rad;
    -f64::min(20.0, 12.0 * ratio * ratio)
}

fn db_to_linear(db: f64) -> f64 {
    libm::pow(10.0, db / 10.0)
}

/// Received power (W) at a user from one UAV: transmit power, near-field
/// pathloss and antenna gain (both converted from dB), and distance pathloss
/// over the 3D link length.
pub fn received_power_w(geom: &LinkGeometry, cfg: &ScenarioConfig) -> f64 {
    let gain = db_to_linear(antenna_gain_db(geom, cfg.beamwidth_rad));
    let d_sq = geom.horiz_dist_m * geom.horiz_dist_m + geom.height_m * geom.height_m;
    cfg.tx_power_w
        * db_to_linear(cfg.nearfield_db)
        * gain
        * libm::pow(d_sq, -cfg.pathloss_exponent / 2.0)
}

/// Per-user serving UAV indices: argmax of received power, ties broken by
/// the lowest UAV index.
pub fn associate(users: &[Point], uavs: &[UavPose], cfg: &ScenarioConfig) -> Vec<usize> {
    assert!(!uavs.is_empty(), "association needs at least one UAV");
    users
        .iter()
        .map(|user| {
            let mut best = (0usize, f64::NEG_INFINITY);
            for (k, uav) in uavs.iter().enumerate() {
                let p = received_power_w(&uav.geometry_to(user), cfg);
                if p > best.1 {
                    best = (k, p);
                }
            }
            best.0
        })
        .collect()
}

/// SINR (linear ratio) of a user served by `serving`, with every other UAV
/// acting as an interferer.
pub fn sinr(user: &Point, serving: usize, uavs: &[UavPose], cfg: &ScenarioConfig) -> f64 {
    debug_assert!(serving < uavs.len());
    let signal = received_power_w(&uavs[serving].geometry_to(user), cfg);
    let mut interference = 0.0;
    for (k, uav) in uavs.iter().enumerate() {
        if k != serving {
            interference += received_power_w(&uav.geometry_to(user), cfg);
        }
    }
    signal / (interference + cfg.noise_power_w)
}

/// Bits delivered over one timestep at the Shannon bound.
pub fn throughput_bits(sinr: f64, tau_s: f64, bandwidth_hz: f64) -> f64 {
    debug_assert!(sinr >= 0.0);
    tau_s * bandwidth_hz * libm::log2(1.0 + sinr)
}
