//! Episode engine: world assembly, the sequential decide-and-broadcast
//! protocol with simultaneous action application, reward computation over
//! neighbor groups, per-episode metric accumulation and normalization
//! against the minimum-radius baseline run on the identical world.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::agent::{
    build_observation, DqnAgent, Observation, ObservationInputs, StateStack, Transition,
    STACK_LEN,
};
use crate::config::ScenarioConfig;
use crate::energy::{fixed_wing_energy, hover_energy, network_ee, optimal_velocity, uav_ee};
use crate::environment::{
    advance_orbit, area_side_for_fleet, generate_users, init_uavs, kmeans_centers,
    neighbor_sets, Point, UavState, UserSet,
};
use crate::policies::{
    legal_mask, random_walk_policy, Action, EnergySavingPolicy, PolicyKind,
};
use crate::radio::{associate, sinr, throughput_bits, UavPose};
use crate::rng;

/// A fully assembled simulation world for one episode.
#[derive(Clone, Debug)]
pub struct World {
    pub users: UserSet,
    pub centers: Vec<Point>,
    /// Per-UAV neighbor indices, closest center first.
    pub neighbors: Vec<Vec<usize>>,
    pub uavs: Vec<UavState>,
}

impl World {
    pub fn fleet_size(&self) -> usize {
        self.uavs.len()
    }

    pub fn area_diagonal_m(&self) -> f64 {
        self.users.area_side_m * core::f64::consts::SQRT_2
    }
}

/// Draw users, cluster them into service center-points, place the UAVs and
/// compute neighbor sets. The area side follows the fleet size so that the
/// UAV density stays constant.
pub fn generate_world<R: Rng>(cfg: &ScenarioConfig, fleet_size: usize, rng: &mut R) -> World {
    let side = area_side_for_fleet(fleet_size, cfg.uav_density_per_km2);
    let users = generate_users(side, cfg.user_density_per_km2, rng);
    let centers = if users.positions.is_empty() {
        // Degenerate user process: spread the fleet uniformly instead.
        (0..fleet_size)
            .map(|_| Point::new(rng.gen_range(0.0..side), rng.gen_range(0.0..side)))
            .collect()
    } else {
        kmeans_centers(&users.positions, fleet_size, rng)
    };
    let uavs = init_uavs(&centers, cfg, rng);
    let neighbors = neighbor_sets(&centers);
    World {
        users,
        centers,
        neighbors,
        uavs,
    }
}

/// Per-timestep performance snapshot.
#[derive(Clone, Debug, PartialEq)]
pub struct StepRecord {
    /// Bits delivered by each UAV during the step.
    pub throughput_bits: Vec<f64>,
    /// Joules consumed by each UAV during the step.
    pub energy_j: Vec<f64>,
    /// Per-UAV EE for the step.
    pub ee: Vec<f64>,
}

/// Compute association, SINR, throughput and energy for the current UAV
/// configuration over one timestep.
pub fn measure_step(world: &World, cfg: &ScenarioConfig, hover: bool) -> StepRecord {
    let params = cfg.energy_params();
    let poses: Vec<UavPose> = world
        .uavs
        .iter()
        .map(|u| UavPose {
            position: if hover { u.center } else { u.horizontal_position() },
            height_m: u.height_m,
        })
        .collect();
    let mut throughput = vec![0.0; world.fleet_size()];
    let serving = associate(&world.users.positions, &poses, cfg);
    for (user, &uav) in world.users.positions.iter().zip(&serving) {
        let s = sinr(user, uav, &poses, cfg);
        throughput[uav] += throughput_bits(s, cfg.timestep_s, cfg.bandwidth_hz);
    }
    let energy: Vec<f64> = world
        .uavs
        .iter()
        .map(|u| {
            if hover {
                hover_energy(cfg.timestep_s, &params)
            } else {
                fixed_wing_energy(u.radius_m, u.velocity_m_s, cfg.timestep_s, &params)
                    .expect("orbiting UAV has positive radius and velocity")
            }
        })
        .collect();
    let ee: Vec<f64> = throughput
        .iter()
        .zip(&energy)
        .map(|(&r, &e)| uav_ee(r, e).expect("step energy is strictly positive"))
        .collect();
    StepRecord {
        throughput_bits: throughput,
        energy_j: energy,
        ee,
    }
}

/// Group EE over a UAV and its neighbors: ratio of summed throughput to
/// summed energy within the group.
fn group_ee(uav: usize, neighbors: &[usize], record: &StepRecord) -> f64 {
    let mut bits = record.throughput_bits[uav];
    let mut joules = record.energy_j[uav];
    for &k in neighbors {
        bits += record.throughput_bits[k];
        joules += record.energy_j[k];
    }
    assert!(joules > 0.0, "group energy must be strictly positive");
    bits / joules
}

/// Reward for agent `uav`: the change in the group EE of itself and its
/// neighbors between consecutive snapshots.
pub fn compute_reward(
    uav: usize,
    neighbors: &[usize],
    prev: &StepRecord,
    next: &StepRecord,
) -> f64 {
    group_ee(uav, neighbors, next) - group_ee(uav, neighbors, prev)
}

/// The learning fleet: one brain per UAV, or a single shared brain.
pub struct FleetAgents {
    pub brains: Vec<DqnAgent>,
    pub shared: bool,
}

impl FleetAgents {
    pub fn new(cfg: &ScenarioConfig, fleet_size: usize, master_seed: u64) -> Self {
        let shared = cfg.share_weights;
        let count = if shared { 1 } else { fleet_size };
        let brains = (0..count)
            .map(|i| DqnAgent::new(cfg, rng::stream(master_seed, "agent", i as u64, 0)))
            .collect();
        FleetAgents { brains, shared }
    }

    pub fn brain_index(&self, uav: usize) -> usize {
        if self.shared {
            0
        } else {
            uav
        }
    }
}

/// What drives the UAV actions during an episode.
pub enum Controller<'a> {
    MinRadius,
    Hover,
    RandomWalk,
    EnergySaving(EnergySavingPolicy),
    Learning(&'a mut FleetAgents),
    /// Fixed per-round action lists (`scripted[round][uav]`), for tests and
    /// trajectory replay.
    Scripted(&'a [Vec<Action>]),
}

impl Controller<'_> {
    fn is_hover(&self) -> bool {
        matches!(self, Controller::Hover)
    }
}

/// Everything recorded over one episode.
#[derive(Clone, Debug)]
pub struct EpisodeMetrics {
    pub per_step_throughput: Vec<Vec<f64>>,
    pub per_step_energy: Vec<Vec<f64>>,
    pub total_throughput_bits: f64,
    pub total_energy_j: f64,
    pub ee_bits_per_j: f64,
    /// Ratios against the min-radius baseline on the identical world; 1.0
    /// until [`EpisodeMetrics::normalize_against`] runs.
    pub norm_ee: f64,
    pub norm_throughput: f64,
    pub norm_energy: f64,
    /// Observed (min, max) of radius and height across all UAVs and steps.
    pub radius_range: (f64, f64),
    pub height_range: (f64, f64),
}

impl EpisodeMetrics {
    fn from_records(records: Vec<StepRecord>, radius_range: (f64, f64), height_range: (f64, f64)) -> Self {
        let per_step_throughput: Vec<Vec<f64>> =
            records.iter().map(|r| r.throughput_bits.clone()).collect();
        let per_step_energy: Vec<Vec<f64>> = records.iter().map(|r| r.energy_j.clone()).collect();
        let total_throughput_bits = per_step_throughput.iter().flatten().sum();
        let total_energy_j = per_step_energy.iter().flatten().sum();
        let ee_bits_per_j = network_ee(&per_step_throughput, &per_step_energy)
            .expect("episode has steps and positive energy");
        EpisodeMetrics {
            per_step_throughput,
            per_step_energy,
            total_throughput_bits,
            total_energy_j,
            ee_bits_per_j,
            norm_ee: 1.0,
            norm_throughput: 1.0,
            norm_energy: 1.0,
            radius_range,
            height_range,
        }
    }

    pub fn normalize_against(&mut self, baseline: &EpisodeMetrics) {
        let ratio = |x: f64, b: f64| if b != 0.0 { x / b } else { 1.0 };
        self.norm_ee = ratio(self.ee_bits_per_j, baseline.ee_bits_per_j);
        self.norm_throughput = ratio(self.total_throughput_bits, baseline.total_throughput_bits);
        self.norm_energy = ratio(self.total_energy_j, baseline.total_energy_j);
    }
}

/// Per-UAV episode-scoped learning state.
struct AgentRuntime {
    stack: Option<StateStack>,
    prev_action: Action,
    pending: Option<([f64; STACK_LEN], usize)>,
    pending_reward: f64,
}

/// The neighbor actions visible to a deciding agent: only choices already
/// broadcast this timestep (agents with a lower decision index).
fn visible_neighbor_actions(chosen: &[Option<Action>], neighbors: &[usize]) -> Vec<Option<Action>> {
    neighbors.iter().map(|&k| chosen[k]).collect()
}

fn neighbor_center_distances(world: &World, uav: usize) -> Vec<f64> {
    world.neighbors[uav]
        .iter()
        .map(|&k| world.uavs[k].horizontal_position().dist(&world.centers[uav]))
        .collect()
}

fn apply_action(uav: &mut UavState, action: Action, cfg: &ScenarioConfig) {
    match action {
        Action::RadiusUp => uav.radius_m += cfg.r_inc_m,
        Action::RadiusDown => uav.radius_m -= cfg.r_inc_m,
        Action::HeightUp => uav.height_m += cfg.h_inc_m,
        Action::HeightDown => uav.height_m -= cfg.h_inc_m,
        Action::NoOp => {}
    }
    // Masking keeps these clamps inert; they are the backstop.
    uav.radius_m = uav.radius_m.clamp(cfg.r_min_m, cfg.r_max_m);
    uav.height_m = uav.height_m.clamp(cfg.h_min_m, cfg.h_max_m);
    uav.velocity_m_s = optimal_velocity(uav.radius_m, &cfg.energy_params());
    assert!(
        uav.radius_m >= cfg.r_min_m
            && uav.radius_m <= cfg.r_max_m
            && uav.height_m >= cfg.h_min_m
            && uav.height_m <= cfg.h_max_m,
        "constraint violation after clamp"
    );
}

fn build_agent_observation(
    world: &World,
    uav: usize,
    runtime: &AgentRuntime,
    brain: &mut DqnAgent,
    records: &[StepRecord],
    chosen: &[Option<Action>],
    cfg: &ScenarioConfig,
) -> Observation {
    let n = records.len();
    let ee_delta = if n >= 2 {
        records[n - 1].ee[uav] - records[n - 2].ee[uav]
    } else {
        0.0
    };
    let scale = brain.update_ee_delta_scale(ee_delta);
    let dists = neighbor_center_distances(world, uav);
    let actions = visible_neighbor_actions(chosen, &world.neighbors[uav]);
    build_observation(
        cfg,
        &ObservationInputs {
            radius_m: world.uavs[uav].radius_m,
            height_m: world.uavs[uav].height_m,
            ee_delta,
            prev_action: runtime.prev_action,
            neighbor_dists_m: &dists,
            neighbor_actions: &actions,
            area_diagonal_m: world.area_diagonal_m(),
            ee_delta_scale: scale,
        },
    )
}

fn train_fleet(fleet: &mut FleetAgents, fleet_size: usize, cfg: &ScenarioConfig) {
    if fleet.shared {
        // One train step per UAV, all on the shared brain.
        for _ in 0..fleet_size {
            fleet.brains[0].train_step(cfg);
        }
        fleet.brains[0].decay_epsilon(cfg);
        return;
    }
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        fleet.brains.par_iter_mut().for_each(|brain| {
            brain.train_step(cfg);
            brain.decay_epsilon(cfg);
        });
    }
    #[cfg(not(feature = "parallel"))]
    for brain in &mut fleet.brains {
        brain.train_step(cfg);
        brain.decay_epsilon(cfg);
    }
}

/// Run one episode on `world`. The first timestep flies the initial
/// configuration; every following timestep runs the sequential
/// decide-and-broadcast round, applies all actions simultaneously, advances
/// the orbits and measures performance. Learning controllers additionally
/// store transitions and train once per UAV per timestep.
pub fn run_episode(
    cfg: &ScenarioConfig,
    mut world: World,
    controller: &mut Controller<'_>,
    policy_rng: &mut ChaCha8Rng,
) -> EpisodeMetrics {
    let fleet_size = world.fleet_size();
    let hover = controller.is_hover();
    let mut records: Vec<StepRecord> = Vec::with_capacity(cfg.steps_per_episode);
    let mut runtimes: Vec<AgentRuntime> = (0..fleet_size)
        .map(|_| AgentRuntime {
            stack: None,
            prev_action: Action::NoOp,
            pending: None,
            pending_reward: 0.0,
        })
        .collect();
    let mut radius_range = (f64::INFINITY, f64::NEG_INFINITY);
    let mut height_range = (f64::INFINITY, f64::NEG_INFINITY);
    let mut track_ranges = |uavs: &[UavState]| {
        for u in uavs {
            radius_range = (radius_range.0.min(u.radius_m), radius_range.1.max(u.radius_m));
            height_range = (height_range.0.min(u.height_m), height_range.1.max(u.height_m));
        }
    };

    // Timestep 1: the fleet flies its initial configuration.
    if !hover {
        for uav in &mut world.uavs {
            *uav = advance_orbit(uav, cfg.timestep_s);
        }
    }
    track_ranges(&world.uavs);
    records.push(measure_step(&world, cfg, hover));

    for _ in 1..cfg.steps_per_episode {
        // Sequential decisions in ascending index order; each agent sees the
        // actions its neighbors have already broadcast this timestep.
        let mut chosen: Vec<Option<Action>> = vec![None; fleet_size];
        for i in 0..fleet_size {
            let action = match controller {
                Controller::MinRadius | Controller::Hover => Action::NoOp,
                Controller::RandomWalk => random_walk_policy(&world.uavs[i], cfg, policy_rng),
                Controller::EnergySaving(policy) => policy.act(&world.uavs[i], cfg),
                Controller::Scripted(script) => script[records.len() - 1][i],
                Controller::Learning(fleet) => {
                    let brain_idx = fleet.brain_index(i);
                    let brain = &mut fleet.brains[brain_idx];
                    let obs = build_agent_observation(
                        &world, i, &runtimes[i], brain, &records, &chosen, cfg,
                    );
                    let runtime = &mut runtimes[i];
                    let flat = match &mut runtime.stack {
                        Some(stack) => {
                            stack.push(&obs);
                            stack.flat()
                        }
                        None => {
                            let stack = StateStack::initial(&obs);
                            let flat = stack.flat();
                            runtime.stack = Some(stack);
                            flat
                        }
                    };
                    if let Some((state, action)) = runtime.pending.take() {
                        brain.buffer.push(Transition {
                            state,
                            action,
                            reward: runtime.pending_reward,
                            next_state: flat,
                        });
                    }
                    let q = brain.net.q_values(&flat);
                    let mask = legal_mask(world.uavs[i].radius_m, world.uavs[i].height_m, cfg);
                    let action =
                        crate::agent::select_action(&q, brain.epsilon, brain.rng(), &mask);
                    runtime.pending = Some((flat, action.index()));
                    action
                }
            };
            chosen[i] = Some(action);
        }

        // Simultaneous application, then everyone moves.
        if !hover {
            for (uav, action) in world.uavs.iter_mut().zip(&chosen) {
                apply_action(uav, action.unwrap(), cfg);
                *uav = advance_orbit(uav, cfg.timestep_s);
            }
        }
        track_ranges(&world.uavs);
        let record = measure_step(&world, cfg, hover);

        if let Controller::Learning(fleet) = controller {
            let prev = records.last().unwrap();
            for i in 0..fleet_size {
                let raw = compute_reward(i, &world.neighbors[i], prev, &record);
                let brain_idx = fleet.brain_index(i);
                let brain = &mut fleet.brains[brain_idx];
                runtimes[i].pending_reward = brain.scale_reward(raw, cfg);
                runtimes[i].prev_action = chosen[i].unwrap();
            }
            records.push(record);
            train_fleet(fleet, fleet_size, cfg);
        } else {
            records.push(record);
        }
    }

    // Close out the last pending transition with a terminal-free observation
    // (the task is continuing; no done flag).
    if let Controller::Learning(fleet) = controller {
        for i in 0..fleet_size {
            let none_chosen = vec![None; fleet_size];
            let brain_idx = fleet.brain_index(i);
            let brain = &mut fleet.brains[brain_idx];
            let obs =
                build_agent_observation(&world, i, &runtimes[i], brain, &records, &none_chosen, cfg);
            let runtime = &mut runtimes[i];
            if let Some(stack) = &mut runtime.stack {
                stack.push(&obs);
                if let Some((state, action)) = runtime.pending.take() {
                    brain.buffer.push(Transition {
                        state,
                        action,
                        reward: runtime.pending_reward,
                        next_state: stack.flat(),
                    });
                }
            }
        }
    }

    EpisodeMetrics::from_records(records, radius_range, height_range)
}

/// Run `controller` on `world` and normalize its metrics against a
/// min-radius baseline executed on an identical clone of the same world.
pub fn run_normalized_episode(
    cfg: &ScenarioConfig,
    world: &World,
    controller: &mut Controller<'_>,
    policy_rng: &mut ChaCha8Rng,
) -> EpisodeMetrics {
    let mut metrics = run_episode(cfg, world.clone(), controller, policy_rng);
    let mut baseline_rng = policy_rng.clone();
    let baseline = run_episode(
        cfg,
        world.clone(),
        &mut Controller::MinRadius,
        &mut baseline_rng,
    );
    metrics.normalize_against(&baseline);
    metrics
}

/// One CSV-ready result row.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentRow {
    pub fleet_size: usize,
    pub episode: usize,
    pub policy: &'static str,
    pub seed: u64,
    pub total_throughput_bits: f64,
    pub total_energy_j: f64,
    pub ee_bits_per_j: f64,
    pub norm_ee: f64,
    pub norm_throughput: f64,
    pub norm_energy: f64,
}

/// Everything an experiment produces: the per-episode rows plus, for the
/// learning policy, the trained fleets (one entry per fleet size).
pub struct ExperimentOutcome {
    pub rows: Vec<ExperimentRow>,
    pub fleets: Vec<(usize, FleetAgents)>,
}

/// Run the full episode sequence for each fleet size. Worlds are freshly
/// drawn per episode; learning agents persist across the episodes of one
/// fleet size and keep training throughout.
pub fn run_experiment(
    cfg: &ScenarioConfig,
    policy: PolicyKind,
    fleet_sizes: &[usize],
    master_seed: u64,
) -> ExperimentOutcome {
    let mut rows = Vec::with_capacity(fleet_sizes.len() * cfg.episodes);
    let mut fleets = Vec::new();
    for &fleet_size in fleet_sizes {
        let mut agents = match policy {
            PolicyKind::Learning => Some(FleetAgents::new(cfg, fleet_size, master_seed)),
            _ => None,
        };
        for episode in 0..cfg.episodes {
            let mut env_rng =
                rng::stream(master_seed, "environment", fleet_size as u64, episode as u64);
            let world = generate_world(cfg, fleet_size, &mut env_rng);
            let mut policy_rng =
                rng::stream(master_seed, "policy", fleet_size as u64, episode as u64);
            let mut controller = match policy {
                PolicyKind::MinRadius => Controller::MinRadius,
                PolicyKind::Hover => Controller::Hover,
                PolicyKind::RandomWalk => Controller::RandomWalk,
                PolicyKind::EnergySaving => {
                    Controller::EnergySaving(EnergySavingPolicy::new(&world.centers, cfg))
                }
                PolicyKind::Learning => Controller::Learning(agents.as_mut().unwrap()),
            };
            let metrics = run_normalized_episode(cfg, &world, &mut controller, &mut policy_rng);
            rows.push(ExperimentRow {
                fleet_size,
                episode,
                policy: policy.name(),
                seed: master_seed,
                total_throughput_bits: metrics.total_throughput_bits,
                total_energy_j: metrics.total_energy_j,
                ee_bits_per_j: metrics.ee_bits_per_j,
                norm_ee: metrics.norm_ee,
                norm_throughput: metrics.norm_throughput,
                norm_energy: metrics.norm_energy,
            });
        }
        if let Some(agents) = agents {
            fleets.push((fleet_size, agents));
        }
    }
    ExperimentOutcome { rows, fleets }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    fn small_cfg() -> ScenarioConfig {
        let mut cfg = ScenarioConfig::default();
        cfg.steps_per_episode = 10;
        cfg.episodes = 2;
        cfg
    }

    fn world_for(cfg: &ScenarioConfig, fleet: usize, seed: u64) -> World {
        generate_world(cfg, fleet, &mut stream(seed, "environment", fleet as u64, 0))
    }

    #[test]
    fn noop_round_only_advances_phase() {
        let cfg = small_cfg();
        let world = world_for(&cfg, 2, 1);
        let initial: Vec<UavState> = world.uavs.clone();
        let script = vec![vec![Action::NoOp; 2]; cfg.steps_per_episode];
        let mut controller = Controller::Scripted(&script);
        let mut rng = stream(1, "policy", 0, 0);
        let metrics = run_episode(&cfg, world, &mut controller, &mut rng);
        assert_eq!(metrics.radius_range, (initial[0].radius_m, initial[0].radius_m));
        assert_eq!(metrics.height_range, (initial[0].height_m, initial[0].height_m));
    }

    #[test]
    fn scripted_trajectory_matches_hand_simulation() {
        let cfg = small_cfg();
        let mut world = world_for(&cfg, 2, 2);
        // 5 decision rounds of scripted actions for 2 UAVs, then NoOps.
        let mut script = vec![
            vec![Action::RadiusUp, Action::HeightDown],
            vec![Action::RadiusUp, Action::HeightDown],
            vec![Action::NoOp, Action::RadiusUp],
            vec![Action::HeightUp, Action::RadiusDown],
            vec![Action::RadiusDown, Action::NoOp],
        ];
        script.resize(cfg.steps_per_episode, vec![Action::NoOp; 2]);
        // Hand-simulated (r, h) after the five rounds, from the default
        // increments and initial (50, 100):
        //   UAV 0: r 50+10+10-10 = 60, h 100+5 = 105
        //   UAV 1: r 50+10-10 = 50, h 100-5-5 = 90
        let mut controller = Controller::Scripted(&script);
        let mut rng = stream(2, "policy", 0, 0);
        let metrics = run_episode(&cfg, world.clone(), &mut controller, &mut rng);
        assert_eq!(metrics.radius_range.1, 70.0); // peak radius of UAV 0
        assert_eq!(metrics.height_range, (90.0, 105.0));

        // Replay by hand on the raw state.
        for round in script.iter().take(5) {
            for (uav, &action) in world.uavs.iter_mut().zip(round) {
                apply_action(uav, action, &cfg);
            }
        }
        assert_eq!(world.uavs[0].radius_m, 60.0);
        assert_eq!(world.uavs[0].height_m, 105.0);
        assert_eq!(world.uavs[1].radius_m, 50.0);
        assert_eq!(world.uavs[1].height_m, 90.0);
    }

    #[test]
    fn visible_actions_respect_decision_order() {
        let chosen = [Some(Action::RadiusUp), Some(Action::NoOp), None, None];
        // Agent 2's neighbors are 0, 1 and 3: only the first two are visible.
        assert_eq!(
            visible_neighbor_actions(&chosen, &[0, 1, 3]),
            vec![Some(Action::RadiusUp), Some(Action::NoOp), None]
        );
    }

    #[test]
    fn reward_identities() {
        let rec_a = StepRecord {
            throughput_bits: vec![1e6, 2e6, 3e6],
            energy_j: vec![300.0, 350.0, 400.0],
            ee: vec![0.0; 3],
        };
        assert_eq!(compute_reward(0, &[1, 2], &rec_a, &rec_a), 0.0);
        // Single UAV, no neighbors: plain delta of its own EE.
        let rec_b = StepRecord {
            throughput_bits: vec![2e6, 2e6, 3e6],
            energy_j: vec![250.0, 350.0, 400.0],
            ee: vec![0.0; 3],
        };
        let own = compute_reward(0, &[], &rec_a, &rec_b);
        assert!((own - (2e6 / 250.0 - 1e6 / 300.0)).abs() < 1e-9);
        // Three-UAV group: hand-evaluated ratio of sums.
        let grouped = compute_reward(0, &[1, 2], &rec_a, &rec_b);
        let expected = (2e6 + 2e6 + 3e6) / (250.0 + 350.0 + 400.0)
            - (1e6 + 2e6 + 3e6) / (300.0 + 350.0 + 400.0);
        assert!((grouped - expected).abs() < 1e-9);
    }

    #[test]
    fn baseline_episode_is_deterministic() {
        let cfg = small_cfg();
        let run = || {
            let world = world_for(&cfg, 3, 3);
            let mut rng = stream(3, "policy", 0, 0);
            run_episode(&cfg, world, &mut Controller::MinRadius, &mut rng)
        };
        let a = run();
        let b = run();
        assert_eq!(a.per_step_throughput, b.per_step_throughput);
        assert_eq!(a.per_step_energy, b.per_step_energy);
        assert_eq!(a.ee_bits_per_j, b.ee_bits_per_j);
    }

    #[test]
    fn energy_entry_count_is_steps_times_fleet() {
        let mut cfg = small_cfg();
        cfg.steps_per_episode = 25;
        let world = world_for(&cfg, 4, 4);
        let mut rng = stream(4, "policy", 0, 0);
        let metrics = run_episode(&cfg, world, &mut Controller::MinRadius, &mut rng);
        let entries: usize = metrics.per_step_energy.iter().map(|row| row.len()).sum();
        assert_eq!(entries, 25 * 4);
    }

    #[test]
    fn totals_equal_sums_of_parts() {
        let cfg = small_cfg();
        let world = world_for(&cfg, 3, 5);
        let params = cfg.energy_params();
        let mut rng = stream(5, "policy", 0, 0);
        let metrics = run_episode(&cfg, world, &mut Controller::MinRadius, &mut rng);
        let energy_sum: f64 = metrics.per_step_energy.iter().flatten().sum();
        assert!((metrics.total_energy_j - energy_sum).abs() <= 1e-9 * energy_sum);
        // Every min-radius energy entry is the same Eq-style value.
        let expected = fixed_wing_energy(
            cfg.r_min_m,
            optimal_velocity(cfg.r_min_m, &params),
            cfg.timestep_s,
            &params,
        )
        .unwrap();
        for row in &metrics.per_step_energy {
            for &e in row {
                assert!((e - expected).abs() < 1e-9);
            }
        }
        let ee = network_ee(&metrics.per_step_throughput, &metrics.per_step_energy).unwrap();
        assert_eq!(ee, metrics.ee_bits_per_j);
    }

    #[test]
    fn hover_consumes_more_energy_than_min_radius() {
        let cfg = small_cfg();
        let world = world_for(&cfg, 3, 6);
        let mut rng = stream(6, "policy", 0, 0);
        let fixed = run_episode(&cfg, world.clone(), &mut Controller::MinRadius, &mut rng.clone());
        let hover = run_episode(&cfg, world, &mut Controller::Hover, &mut rng);
        assert!(hover.total_energy_j > 3.0 * fixed.total_energy_j);
    }

    #[test]
    fn baseline_normalizes_to_exactly_one() {
        let cfg = small_cfg();
        let world = world_for(&cfg, 3, 7);
        let mut rng = stream(7, "policy", 0, 0);
        let metrics = run_normalized_episode(&cfg, &world, &mut Controller::MinRadius, &mut rng);
        assert_eq!(metrics.norm_ee, 1.0);
        assert_eq!(metrics.norm_throughput, 1.0);
        assert_eq!(metrics.norm_energy, 1.0);
    }

    #[test]
    fn random_walk_stays_in_bounds() {
        let mut cfg = small_cfg();
        cfg.steps_per_episode = 60;
        let world = world_for(&cfg, 3, 8);
        let mut rng = stream(8, "policy", 0, 0);
        let metrics = run_episode(&cfg, world, &mut Controller::RandomWalk, &mut rng);
        assert!(metrics.radius_range.0 >= cfg.r_min_m);
        assert!(metrics.radius_range.1 <= cfg.r_max_m);
        assert!(metrics.height_range.0 >= cfg.h_min_m);
        assert!(metrics.height_range.1 <= cfg.h_max_m);
    }

    #[test]
    fn energy_saving_grows_to_target() {
        let mut cfg = small_cfg();
        cfg.steps_per_episode = 120;
        let world = world_for(&cfg, 3, 9);
        let policy = EnergySavingPolicy::new(&world.centers, &cfg);
        let mut controller = Controller::EnergySaving(policy);
        let mut rng = stream(9, "policy", 0, 0);
        let metrics = run_episode(&cfg, world, &mut controller, &mut rng);
        assert!((metrics.radius_range.1 - policy.target_radius_m).abs() < cfg.r_inc_m);
    }

    #[test]
    fn learning_episode_fills_buffers_and_trains() {
        let mut cfg = small_cfg();
        cfg.steps_per_episode = 30;
        cfg.batch_size = 20;
        cfg.buffer_capacity = 200;
        let mut fleet = FleetAgents::new(&cfg, 2, 42);
        let world = world_for(&cfg, 2, 10);
        let mut rng = stream(10, "policy", 0, 0);
        let before_eps = fleet.brains[0].epsilon;
        {
            let mut controller = Controller::Learning(&mut fleet);
            run_episode(&cfg, world, &mut controller, &mut rng);
        }
        // One transition per decision round.
        assert_eq!(fleet.brains[0].buffer.len(), cfg.steps_per_episode - 1);
        assert!(fleet.brains[0].epsilon < before_eps);
        assert!(fleet.brains[0].train_step_count() > 0);
    }

    #[test]
    fn experiment_rows_have_declared_shape() {
        let mut cfg = small_cfg();
        cfg.episodes = 2;
        let outcome = run_experiment(&cfg, PolicyKind::MinRadius, &[2, 3], 11);
        assert!(outcome.fleets.is_empty());
        let rows = outcome.rows;
        assert_eq!(rows.len(), 4);
        for row in &rows {
            assert_eq!(row.policy, "min-radius");
            assert_eq!(row.norm_ee, 1.0);
            assert_eq!(row.norm_throughput, 1.0);
            assert_eq!(row.norm_energy, 1.0);
        }
        assert_eq!(rows[0].fleet_size, 2);
        assert_eq!(rows[3].fleet_size, 3);
    }
}
