//! The five-action trajectory action space and the four heuristic benchmark
//! policies the learning agents are compared against.

use alloc::vec::Vec;

use rand::Rng;

use crate::config::ScenarioConfig;
use crate::environment::{Point, UavState};

/// One trajectory adjustment per timestep. The index mapping is fixed:
/// 0 = RadiusUp, 1 = RadiusDown, 2 = HeightUp, 3 = HeightDown, 4 = NoOp.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Action {
    RadiusUp,
    RadiusDown,
    HeightUp,
    HeightDown,
    NoOp,
}

/// Number of actions.
pub const ACTION_COUNT: usize = 5;

impl Action {
    pub const ALL: [Action; ACTION_COUNT] = [
        Action::RadiusUp,
        Action::RadiusDown,
        Action::HeightUp,
        Action::HeightDown,
        Action::NoOp,
    ];

    pub fn index(self) -> usize {
        match self {
            Action::RadiusUp => 0,
            Action::RadiusDown => 1,
            Action::HeightUp => 2,
            Action::HeightDown => 3,
            Action::NoOp => 4,
        }
    }

    pub fn from_index(index: usize) -> Option<Action> {
        Action::ALL.get(index).copied()
    }
}

/// Which of the five actions keep `(r, h)` inside the configured bounds.
/// NoOp is always legal.
pub fn legal_mask(radius_m: f64, height_m: f64, cfg: &ScenarioConfig) -> [bool; ACTION_COUNT] {
    [
        radius_m + cfg.r_inc_m <= cfg.r_max_m + 1e-9,
        radius_m - cfg.r_inc_m >= cfg.r_min_m - 1e-9,
        height_m + cfg.h_inc_m <= cfg.h_max_m + 1e-9,
        height_m - cfg.h_inc_m >= cfg.h_min_m - 1e-9,
        true,
    ]
}

/// Minimum radius orbit: hold the initial radius and height for the whole
/// episode. The normalization baseline for all reported metrics.
pub fn min_radius_policy(_state: &UavState) -> Action {
    Action::NoOp
}

/// Quadcopter-style hover: never adjusts anything; the harness pins the UAV
/// over its center-point with zero velocity and charges hover energy.
pub fn hover_policy(_state: &UavState) -> Action {
    Action::NoOp
}

/// Bounded random walk: uniform over the actions that keep radius and height
/// in bounds. Out-of-bound actions are excluded before sampling.
pub fn random_walk_policy<R: Rng>(state: &UavState, cfg: &ScenarioConfig, rng: &mut R) -> Action {
    let mask = legal_mask(state.radius_m, state.height_m, cfg);
    let legal: Vec<Action> = Action::ALL
        .iter()
        .copied()
        .filter(|a| mask[a.index()])
        .collect();
    legal[rng.gen_range(0..legal.len())]
}

/// Energy-saving orbit: grow the radius to half the minimum distance between
/// two center-points (clamped to the radius bounds), then hold it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnergySavingPolicy {
    pub target_radius_m: f64,
}

impl EnergySavingPolicy {
    /// With a single center-point no pair distance exists; the target
    /// defaults to the maximum radius.
    pub fn new(centers: &[Point], cfg: &ScenarioConfig) -> Self {
        assert!(!centers.is_empty());
        let mut min_dist = f64::INFINITY;
        for i in 0..centers.len() {
            for k in (i + 1)..centers.len() {
                min_dist = min_dist.min(centers[i].dist(&centers[k]));
            }
        }
        let raw = if min_dist.is_finite() {
            0.5 * min_dist
        } else {
            cfg.r_max_m
        };
        EnergySavingPolicy {
            target_radius_m: raw.clamp(cfg.r_min_m, cfg.r_max_m),
        }
    }

    /// Step toward the target one radius increment at a time; heights are
    /// left alone.
    pub fn act(&self, state: &UavState, cfg: &ScenarioConfig) -> Action {
        let gap = self.target_radius_m - state.radius_m;
        if gap >= cfg.r_inc_m {
            Action::RadiusUp
        } else if gap <= -cfg.r_inc_m {
            Action::RadiusDown
        } else {
            Action::NoOp
        }
    }
}

/// The selectable trajectory strategies.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PolicyKind {
    MinRadius,
    Hover,
    RandomWalk,
    EnergySaving,
    Learning,
}

impl PolicyKind {
    pub fn name(self) -> &'static str {
        match self {
            PolicyKind::MinRadius => "min-radius",
            PolicyKind::Hover => "hover",
            PolicyKind::RandomWalk => "random-walk",
            PolicyKind::EnergySaving => "energy-saving",
            PolicyKind::Learning => "ddqn",
        }
    }
}
