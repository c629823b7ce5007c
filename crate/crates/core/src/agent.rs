//! Per-UAV learning agent: observation vector construction and normalization,
//! the 4-deep state stack, epsilon-greedy action selection, the FIFO replay
//! buffer and the TD training step against a periodically copied target
//! network.

use alloc::vec::Vec;

use ndarray::Array2;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::config::ScenarioConfig;
use crate::environment::MAX_NEIGHBORS;
use crate::nn::DuelingNet;
use crate::policies::{Action, ACTION_COUNT};

/// Observation vector length: radius, height, EE delta, previous action,
/// six neighbor distances, six neighbor action codes.
pub const OBS_LEN: usize = 4 + 2 * MAX_NEIGHBORS;
/// Number of stacked observations fed to the network.
pub const STACK_DEPTH: usize = 4;
/// Network input length.
pub const STACK_LEN: usize = OBS_LEN * STACK_DEPTH;

/// Feature code for an action index, spread over [0, 1].
fn action_code(action: Action) -> f64 {
    action.index() as f64 / (ACTION_COUNT - 1) as f64
}

/// Sentinel for "no value": a neighbor that has not chosen an action yet,
/// or a padded neighbor slot.
pub const SENTINEL: f64 = -1.0;

/// Raw inputs for one observation; normalization happens inside
/// [`build_observation`].
pub struct ObservationInputs<'a> {
    pub radius_m: f64,
    pub height_m: f64,
    /// Latest per-UAV EE change (bits/J); 0 at the first decision.
    pub ee_delta: f64,
    /// Action taken in the previous timestep; NoOp at the first decision.
    pub prev_action: Action,
    /// Horizontal distances of neighbor UAVs to this UAV's center-point,
    /// in neighbor-set order.
    pub neighbor_dists_m: &'a [f64],
    /// Actions already chosen this timestep by those neighbors; `None` for
    /// neighbors that have not decided yet.
    pub neighbor_actions: &'a [Option<Action>],
    /// Diagonal of the simulation area, the distance normalizer.
    pub area_diagonal_m: f64,
    /// Running absolute maximum of observed EE deltas (the EE normalizer).
    pub ee_delta_scale: f64,
}

/// A normalized observation of length [`OBS_LEN`]. Radius and height are
/// scaled by their upper bounds, distances by the area diagonal, the EE
/// delta by a running absolute maximum; action slots carry codes in [0, 1]
/// with -1 as the "not available" sentinel.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Observation(pub [f64; OBS_LEN]);

pub fn build_observation(cfg: &ScenarioConfig, inp: &ObservationInputs<'_>) -> Observation {
    assert_eq!(inp.neighbor_dists_m.len(), inp.neighbor_actions.len());
    assert!(inp.neighbor_dists_m.len() <= MAX_NEIGHBORS);
    let mut v = [SENTINEL; OBS_LEN];
    v[0] = inp.radius_m / cfg.r_max_m;
    v[1] = inp.height_m / cfg.h_max_m;
    v[2] = if inp.ee_delta_scale > 0.0 {
        inp.ee_delta / inp.ee_delta_scale
    } else {
        0.0
    };
    v[3] = action_code(inp.prev_action);
    for (k, &d) in inp.neighbor_dists_m.iter().enumerate() {
        v[4 + k] = d / inp.area_diagonal_m;
    }
    for (k, action) in inp.neighbor_actions.iter().enumerate() {
        v[4 + MAX_NEIGHBORS + k] = match action {
            Some(a) => action_code(*a),
            None => SENTINEL,
        };
    }
    Observation(v)
}

/// The four most recent observations, newest last.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StateStack {
    frames: [[f64; OBS_LEN]; STACK_DEPTH],
}

impl StateStack {
    /// Episode start: the initial observation replicated across all frames.
    pub fn initial(obs: &Observation) -> Self {
        StateStack {
            frames: [obs.0; STACK_DEPTH],
        }
    }

    pub fn push(&mut self, obs: &Observation) {
        self.frames.rotate_left(1);
        self.frames[STACK_DEPTH - 1] = obs.0;
    }

    pub fn flat(&self) -> [f64; STACK_LEN] {
        let mut out = [0.0; STACK_LEN];
        for (k, frame) in self.frames.iter().enumerate() {
            out[k * OBS_LEN..(k + 1) * OBS_LEN].copy_from_slice(frame);
        }
        out
    }
}

/// One replay entry.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Transition {
    pub state: [f64; STACK_LEN],
    pub action: usize,
    pub reward: f64,
    pub next_state: [f64; STACK_LEN],
}

/// Fixed-capacity ring buffer with FIFO eviction.
#[derive(Clone, Debug)]
pub struct ReplayBuffer {
    entries: Vec<Transition>,
    capacity: usize,
    head: usize,
}

impl ReplayBuffer {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity > 0);
        ReplayBuffer {
            entries: Vec::with_capacity(capacity),
            capacity,
            head: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn push(&mut self, transition: Transition) {
        if self.entries.len() < self.capacity {
            self.entries.push(transition);
        } else {
            self.entries[self.head] = transition;
            self.head = (self.head + 1) % self.capacity;
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = &Transition> {
        self.entries.iter()
    }

    /// Uniform sample of `n` distinct entries (partial Fisher-Yates over the
    /// index range).
    pub fn sample_indices<R: Rng>(&self, n: usize, rng: &mut R) -> Vec<usize> {
        assert!(n <= self.entries.len());
        let mut indices: Vec<usize> = (0..self.entries.len()).collect();
        for k in 0..n {
            let j = rng.gen_range(k..indices.len());
            indices.swap(k, j);
        }
        indices.truncate(n);
        indices
    }

    pub fn get(&self, index: usize) -> &Transition {
        &self.entries[index]
    }
}

/// Epsilon-greedy over the legal actions: uniform exploration with
/// probability `epsilon`, otherwise the argmax of `q` (ties to the lowest
/// index).
pub fn select_action<R: Rng>(
    q: &[f64],
    epsilon: f64,
    rng: &mut R,
    legal: &[bool; ACTION_COUNT],
) -> Action {
    debug_assert_eq!(q.len(), ACTION_COUNT);
    debug_assert!((0.0..=1.0).contains(&epsilon));
    let legal_actions: Vec<Action> = Action::ALL
        .iter()
        .copied()
        .filter(|a| legal[a.index()])
        .collect();
    if rng.gen_range(0.0..1.0) < epsilon {
        return legal_actions[rng.gen_range(0..legal_actions.len())];
    }
    let mut best = legal_actions[0];
    for &a in &legal_actions[1..] {
        if q[a.index()] > q[best.index()] {
            best = a;
        }
    }
    best
}

/// One UAV's learning state: online and target networks, replay buffer,
/// exploration schedule and its private rng stream.
pub struct DqnAgent {
    pub net: DuelingNet,
    pub target: DuelingNet,
    pub buffer: ReplayBuffer,
    pub epsilon: f64,
    train_steps: u64,
    /// Running absolute maximum of raw rewards, used when reward
    /// normalization is enabled.
    reward_scale: f64,
    /// Running absolute maximum of per-UAV EE deltas, the observation
    /// normalizer for the EE feature.
    ee_delta_scale: f64,
    rng: ChaCha8Rng,
}

impl DqnAgent {
    pub fn new(cfg: &ScenarioConfig, mut rng: ChaCha8Rng) -> Self {
        let net = DuelingNet::standard(STACK_LEN, ACTION_COUNT, &mut rng);
        let target = net.clone();
        DqnAgent {
            net,
            target,
            buffer: ReplayBuffer::new(cfg.buffer_capacity),
            epsilon: cfg.epsilon_init,
            train_steps: 0,
            reward_scale: 0.0,
            ee_delta_scale: 0.0,
            rng,
        }
    }

    /// Feed a raw EE delta into the running tracker and return the updated
    /// scale for observation normalization.
    pub fn update_ee_delta_scale(&mut self, raw_delta: f64) -> f64 {
        let mag = raw_delta.abs();
        if mag > self.ee_delta_scale {
            self.ee_delta_scale = mag;
        }
        self.ee_delta_scale
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    pub fn train_step_count(&self) -> u64 {
        self.train_steps
    }

    /// `epsilon <- max(epsilon_min, epsilon * decay)`, applied once per
    /// environment timestep.
    pub fn decay_epsilon(&mut self, cfg: &ScenarioConfig) {
        self.epsilon = (self.epsilon * cfg.epsilon_decay).max(cfg.epsilon_min);
    }

    /// Normalize a raw reward by the running absolute maximum (when enabled)
    /// and update the tracker.
    pub fn scale_reward(&mut self, raw: f64, cfg: &ScenarioConfig) -> f64 {
        if !cfg.normalize_rewards {
            return raw;
        }
        let mag = raw.abs();
        if mag > self.reward_scale {
            self.reward_scale = mag;
        }
        if self.reward_scale > 0.0 {
            raw / self.reward_scale
        } else {
            0.0
        }
    }

    /// One gradient step on a uniform replay batch. Returns `None` (and
    /// leaves all weights untouched) until the buffer holds a full batch.
    pub fn train_step(&mut self, cfg: &ScenarioConfig) -> Option<f64> {
        if self.buffer.len() < cfg.batch_size {
            return None;
        }
        let n = cfg.batch_size;
        let indices = self.buffer.sample_indices(n, &mut self.rng);
        let mut states = Array2::<f64>::zeros((n, STACK_LEN));
        let mut next_states = Array2::<f64>::zeros((n, STACK_LEN));
        let mut actions = Vec::with_capacity(n);
        let mut rewards = Vec::with_capacity(n);
        for (row, &idx) in indices.iter().enumerate() {
            let tr = self.buffer.get(idx);
            for (col, &v) in tr.state.iter().enumerate() {
                states[(row, col)] = v;
            }
            for (col, &v) in tr.next_state.iter().enumerate() {
                next_states[(row, col)] = v;
            }
            actions.push(tr.action);
            rewards.push(tr.reward);
        }

        let q_next_target = self.target.forward_batch(&next_states);
        let targets: Vec<f64> = if cfg.double_q {
            // Action chosen by the online net, valued by the target net.
            let q_next_online = self.net.forward_batch(&next_states);
            (0..n)
                .map(|i| {
                    let mut best = 0usize;
                    for a in 1..ACTION_COUNT {
                        if q_next_online[(i, a)] > q_next_online[(i, best)] {
                            best = a;
                        }
                    }
                    rewards[i] + cfg.discount * q_next_target[(i, best)]
                })
                .collect()
        } else {
            (0..n)
                .map(|i| {
                    let mut best = f64::NEG_INFINITY;
                    for a in 0..ACTION_COUNT {
                        best = best.max(q_next_target[(i, a)]);
                    }
                    rewards[i] + cfg.discount * best
                })
                .collect()
        };

        let loss = self
            .net
            .train_batch(&states, &actions, &targets, cfg.learning_rate);
        self.train_steps += 1;
        if cfg.target_update_period == 0
            || self.train_steps % cfg.target_update_period as u64 == 0
        {
            self.update_target();
        }
        Some(loss)
    }

    /// Hard copy of the online weights into the target network.
    pub fn update_target(&mut self) {
        self.target = self.net.clone();
    }
}
