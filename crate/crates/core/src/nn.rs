//! Dueling Q-network: a dense trunk splitting into a scalar state-value
//! stream and a per-action advantage stream, recombined with mean-subtracted
//! advantages. Forward, analytic backprop and plain SGD, all in f64.

use alloc::vec;
use alloc::vec::Vec;

use ndarray::{Array1, Array2, Axis};
use rand::Rng;

/// One dense layer; weights are `(in, out)` so a batch forward is `x . w + b`.
#[derive(Clone, Debug, PartialEq)]
pub struct Linear {
    pub weights: Array2<f64>,
    pub bias: Array1<f64>,
}

impl Linear {
    /// Xavier-uniform initialization.
    pub fn new<R: Rng>(in_dim: usize, out_dim: usize, rng: &mut R) -> Self {
        let limit = libm::sqrt(6.0 / (in_dim + out_dim) as f64);
        let weights =
            Array2::from_shape_fn((in_dim, out_dim), |_| rng.gen_range(-limit..limit));
        Linear {
            weights,
            bias: Array1::zeros(out_dim),
        }
    }

    fn forward(&self, x: &Array2<f64>) -> Array2<f64> {
        x.dot(&self.weights) + &self.bias
    }
}

fn relu(x: &Array2<f64>) -> Array2<f64> {
    x.mapv(|v| if v > 0.0 { v } else { 0.0 })
}

/// Elementwise `grad * relu'(pre)`.
fn relu_backward(grad: &Array2<f64>, pre: &Array2<f64>) -> Array2<f64> {
    let mut out = grad.clone();
    out.zip_mut_with(pre, |g, &p| {
        if p <= 0.0 {
            *g = 0.0;
        }
    });
    out
}

/// The dueling network. Hidden layers (trunk and stream hidden layers) are
/// ReLU; the two stream output heads are linear so that the mean-subtracted
/// aggregation `Q = V + A - mean(A)` is exact.
#[derive(Clone, Debug, PartialEq)]
pub struct DuelingNet {
    pub trunk: Vec<Linear>,
    pub value: Vec<Linear>,
    pub advantage: Vec<Linear>,
    input_dim: usize,
    n_actions: usize,
}

/// Per-layer weight/bias gradients, ordered trunk, value stream, advantage
/// stream.
pub struct Gradients {
    pub layers: Vec<(Array2<f64>, Array1<f64>)>,
}

struct ForwardCache {
    /// Activations entering each trunk layer; `trunk_in[0]` is the input.
    trunk_in: Vec<Array2<f64>>,
    trunk_pre: Vec<Array2<f64>>,
    value_in: Vec<Array2<f64>>,
    value_pre: Vec<Array2<f64>>,
    adv_in: Vec<Array2<f64>>,
    adv_pre: Vec<Array2<f64>>,
    q: Array2<f64>,
}

impl DuelingNet {
    /// The standard shape: 4 trunk layers of 64 units, and two streams of
    /// 3 layers each (64, 64, output).
    pub fn standard<R: Rng>(input_dim: usize, n_actions: usize, rng: &mut R) -> Self {
        Self::with_shape(input_dim, &[64, 64, 64, 64], &[64, 64], n_actions, rng)
    }

    /// Arbitrary shape, mainly for small gradient-check networks.
    pub fn with_shape<R: Rng>(
        input_dim: usize,
        trunk_widths: &[usize],
        stream_hidden: &[usize],
        n_actions: usize,
        rng: &mut R,
    ) -> Self {
        assert!(!trunk_widths.is_empty());
        assert!(n_actions >= 1);
        let mut trunk = Vec::new();
        let mut width = input_dim;
        for &w in trunk_widths {
            trunk.push(Linear::new(width, w, rng));
            width = w;
        }
        let build_stream = |out_dim: usize, rng: &mut R| {
            let mut layers = Vec::new();
            let mut w_in = width;
            for &w in stream_hidden {
                layers.push(Linear::new(w_in, w, rng));
                w_in = w;
            }
            layers.push(Linear::new(w_in, out_dim, rng));
            layers
        };
        let value = build_stream(1, rng);
        let advantage = build_stream(n_actions, rng);
        DuelingNet {
            trunk,
            value,
            advantage,
            input_dim,
            n_actions,
        }
    }

    /// Rebuild a network from previously trained layers, e.g. a checkpoint.
    /// The layer chains must be dimensionally consistent and the value head
    /// must be scalar.
    pub fn from_layers(trunk: Vec<Linear>, value: Vec<Linear>, advantage: Vec<Linear>) -> Self {
        assert!(!trunk.is_empty() && !value.is_empty() && !advantage.is_empty());
        let check_chain = |prev: &mut usize, layers: &[Linear]| {
            for layer in layers {
                assert_eq!(layer.weights.nrows(), *prev, "layer shapes do not chain");
                assert_eq!(layer.weights.ncols(), layer.bias.len());
                *prev = layer.weights.ncols();
            }
        };
        let input_dim = trunk[0].weights.nrows();
        let mut width = input_dim;
        check_chain(&mut width, &trunk);
        let trunk_out = width;
        let mut v_width = trunk_out;
        check_chain(&mut v_width, &value);
        assert_eq!(v_width, 1, "value stream must end in a scalar");
        let mut a_width = trunk_out;
        check_chain(&mut a_width, &advantage);
        DuelingNet {
            trunk,
            value,
            advantage,
            input_dim,
            n_actions: a_width,
        }
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn n_actions(&self) -> usize {
        self.n_actions
    }

    fn forward_cached(&self, x: &Array2<f64>) -> ForwardCache {
        let mut trunk_in = Vec::with_capacity(self.trunk.len());
        let mut trunk_pre = Vec::with_capacity(self.trunk.len());
        let mut h = x.clone();
        for layer in &self.trunk {
            trunk_in.push(h.clone());
            let pre = layer.forward(&h);
            h = relu(&pre);
            trunk_pre.push(pre);
        }
        let trunk_out = h;

        let run_stream = |layers: &[Linear]| {
            let mut ins = Vec::with_capacity(layers.len());
            let mut pres = Vec::with_capacity(layers.len());
            let mut s = trunk_out.clone();
            for (k, layer) in layers.iter().enumerate() {
                ins.push(s.clone());
                let pre = layer.forward(&s);
                s = if k + 1 < layers.len() { relu(&pre) } else { pre.clone() };
                pres.push(pre);
            }
            (ins, pres, s)
        };
        let (value_in, value_pre, v) = run_stream(&self.value);
        let (adv_in, adv_pre, a) = run_stream(&self.advantage);

        let a_mean = a
            .mean_axis(Axis(1))
            .expect("advantage stream has at least one action")
            .insert_axis(Axis(1));
        let q = &a - &a_mean + &v.broadcast((a.nrows(), self.n_actions)).unwrap();

        ForwardCache {
            trunk_in,
            trunk_pre,
            value_in,
            value_pre,
            adv_in,
            adv_pre,
            q,
        }
    }

    /// Batch forward pass: rows of `x` are state stacks, columns of the
    /// result are Q-values per action.
    pub fn forward_batch(&self, x: &Array2<f64>) -> Array2<f64> {
        self.forward_cached(x).q
    }

    /// Q-values for a single state stack.
    pub fn q_values(&self, input: &[f64]) -> Vec<f64> {
        assert_eq!(input.len(), self.input_dim, "state stack length mismatch");
        let x = Array2::from_shape_vec((1, input.len()), input.to_vec()).unwrap();
        let q = self.forward_batch(&x);
        let out: Vec<f64> = q.row(0).to_vec();
        assert!(
            out.iter().all(|v| v.is_finite()),
            "non-finite Q-values: {out:?}"
        );
        out
    }

    /// Mean squared TD error over the batch and its analytic gradients.
    /// `targets[i]` is the TD target for `actions[i]` taken in row `i` of
    /// `states`.
    pub fn loss_and_gradients(
        &self,
        states: &Array2<f64>,
        actions: &[usize],
        targets: &[f64],
    ) -> (f64, Gradients) {
        let n = states.nrows();
        assert_eq!(actions.len(), n);
        assert_eq!(targets.len(), n);
        let cache = self.forward_cached(states);

        let mut loss = 0.0;
        let mut dq = Array2::<f64>::zeros((n, self.n_actions));
        for i in 0..n {
            let err = cache.q[(i, actions[i])] - targets[i];
            loss += err * err;
            dq[(i, actions[i])] = 2.0 * err / n as f64;
        }
        loss /= n as f64;

        // Through Q = V + A - mean(A).
        let dq_sum = dq.sum_axis(Axis(1)).insert_axis(Axis(1));
        let dv = dq_sum.clone();
        let da = &dq - &(dq_sum / self.n_actions as f64);

        let backprop_stream = |layers: &[Linear],
                               ins: &[Array2<f64>],
                               pres: &[Array2<f64>],
                               d_out: Array2<f64>|
         -> (Vec<(Array2<f64>, Array1<f64>)>, Array2<f64>) {
            let mut grads = vec![None; layers.len()];
            let mut grad = d_out;
            for k in (0..layers.len()).rev() {
                // Stream heads are linear, hidden layers ReLU.
                let dz = if k + 1 < layers.len() {
                    relu_backward(&grad, &pres[k])
                } else {
                    grad
                };
                let dw = ins[k].t().dot(&dz);
                let db = dz.sum_axis(Axis(0));
                grad = dz.dot(&layers[k].weights.t());
                grads[k] = Some((dw, db));
            }
            (grads.into_iter().map(|g| g.unwrap()).collect(), grad)
        };

        let (value_grads, d_trunk_v) =
            backprop_stream(&self.value, &cache.value_in, &cache.value_pre, dv);
        let (adv_grads, d_trunk_a) =
            backprop_stream(&self.advantage, &cache.adv_in, &cache.adv_pre, da);

        let mut grad = d_trunk_v + d_trunk_a;
        let mut trunk_grads = vec![None; self.trunk.len()];
        for k in (0..self.trunk.len()).rev() {
            let dz = relu_backward(&grad, &cache.trunk_pre[k]);
            let dw = cache.trunk_in[k].t().dot(&dz);
            let db = dz.sum_axis(Axis(0));
            grad = dz.dot(&self.trunk[k].weights.t());
            trunk_grads[k] = Some((dw, db));
        }

        let mut layers: Vec<(Array2<f64>, Array1<f64>)> =
            trunk_grads.into_iter().map(|g| g.unwrap()).collect();
        layers.extend(value_grads);
        layers.extend(adv_grads);
        assert!(loss.is_finite(), "non-finite training loss");
        (loss, Gradients { layers })
    }

    /// One SGD step: `w -= lr * dw`.
    pub fn apply_gradients(&mut self, grads: &Gradients, learning_rate: f64) {
        for (layer, (dw, db)) in self.layers_mut().zip(&grads.layers) {
            layer.weights.scaled_add(-learning_rate, dw);
            layer.bias.scaled_add(-learning_rate, db);
        }
    }

    /// Convenience: gradients plus the SGD step; returns the batch loss.
    pub fn train_batch(
        &mut self,
        states: &Array2<f64>,
        actions: &[usize],
        targets: &[f64],
        learning_rate: f64,
    ) -> f64 {
        let (loss, grads) = self.loss_and_gradients(states, actions, targets);
        self.apply_gradients(&grads, learning_rate);
        loss
    }

    pub fn layers(&self) -> impl Iterator<Item = &Linear> {
        self.trunk
            .iter()
            .chain(self.value.iter())
            .chain(self.advantage.iter())
    }

    pub fn layers_mut(&mut self) -> impl Iterator<Item = &mut Linear> {
        self.trunk
            .iter_mut()
            .chain(self.value.iter_mut())
            .chain(self.advantage.iter_mut())
    }

    /// All parameters as one flat vector (weights row-major, then bias, per
    /// layer). Used by checkpointing and the finite-difference oracle.
    pub fn flat_params(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for layer in self.layers() {
            out.extend(layer.weights.iter());
            out.extend(layer.bias.iter());
        }
        out
    }

    pub fn set_flat_params(&mut self, params: &[f64]) {
        let mut offset = 0;
        for layer in self.layers_mut() {
            for w in layer.weights.iter_mut() {
                *w = params[offset];
                offset += 1;
            }
            for b in layer.bias.iter_mut() {
                *b = params[offset];
                offset += 1;
            }
        }
        assert_eq!(offset, params.len(), "flat parameter length mismatch");
    }
}

impl Gradients {
    /// Flattened in the same order as [`DuelingNet::flat_params`].
    pub fn flat(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for (dw, db) in &self.layers {
            out.extend(dw.iter());
            out.extend(db.iter());
        }
        out
    }
}
