use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::dataset::Dataset;
use crate::domain::Rng;

#[derive(Debug, Clone, Copy)]
pub(crate) struct MlpParams {
    pub hidden: usize,
    pub learning_rate: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub l2: f64,
}

/// One-hidden-layer perceptron with rectified-linear units, trained by Adam.
/// The output is linear for regression and logistic for classification.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mlp {
    n_in: usize,
    hidden: usize,
    logistic: bool,
    /// Row-major `n_in x hidden`.
    w1: Vec<f64>,
    b1: Vec<f64>,
    w2: Vec<f64>,
    b2: f64,
}

struct Adam {
    m: Vec<f64>,
    v: Vec<f64>,
    t: i32,
}

impl Adam {
    fn new(n: usize) -> Self {
        Adam {
            m: vec![0.0; n],
            v: vec![0.0; n],
            t: 0,
        }
    }

    fn step(&mut self, params: &mut [&mut f64], grads: &[f64], lr: f64) {
        const B1: f64 = 0.9;
        const B2: f64 = 0.999;
        const EPS: f64 = 1e-8;
        self.t += 1;
        let lr_t = lr * (1.0 - B2.powi(self.t)).sqrt() / (1.0 - B1.powi(self.t));
        for (k, p) in params.iter_mut().enumerate() {
            let g = grads[k];
            self.m[k] = B1 * self.m[k] + (1.0 - B1) * g;
            self.v[k] = B2 * self.v[k] + (1.0 - B2) * g * g;
            **p -= lr_t * self.m[k] / (self.v[k].sqrt() + EPS);
        }
    }
}

fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

impl Mlp {
    fn init(n_in: usize, hidden: usize, logistic: bool, rng: &mut Rng) -> Self {
        let factor = if logistic { 2.0 } else { 6.0 };
        let b_in = (factor / (n_in + hidden) as f64).sqrt();
        let b_out = (factor / (hidden + 1) as f64).sqrt();
        let mut u = |b: f64| rng.gen_range(-b..b);
        let w1 = (0..n_in * hidden).map(|_| u(b_in)).collect();
        let b1 = (0..hidden).map(|_| u(b_in)).collect();
        let w2 = (0..hidden).map(|_| u(b_out)).collect();
        let b2 = u(b_out);
        Mlp {
            n_in,
            hidden,
            logistic,
            w1,
            b1,
            w2,
            b2,
        }
    }

    fn forward(&self, x: &[f64], h: &mut [f64]) -> f64 {
        h.copy_from_slice(&self.b1);
        for (i, xi) in x.iter().enumerate() {
            if *xi == 0.0 {
                continue;
            }
            let row = &self.w1[i * self.hidden..(i + 1) * self.hidden];
            for (hj, w) in h.iter_mut().zip(row) {
                *hj += xi * w;
            }
        }
        let mut out = self.b2;
        for (hj, w) in h.iter_mut().zip(&self.w2) {
            *hj = hj.max(0.0);
            out += *hj * w;
        }
        out
    }

    /// Regression value, or probability of class 1.
    pub fn predict(&self, x: &[f64]) -> f64 {
        let mut h = vec![0.0; self.hidden];
        let z = self.forward(x, &mut h);
        if self.logistic {
            sigmoid(z)
        } else {
            z
        }
    }

    /// Mean data loss over `data`: half squared error or log-loss.
    pub fn loss(&self, data: &Dataset) -> f64 {
        let mut h = vec![0.0; self.hidden];
        let total: f64 = data
            .rows()
            .zip(data.targets())
            .map(|(x, y)| {
                let z = self.forward(x, &mut h);
                if self.logistic {
                    let p = sigmoid(z).clamp(1e-12, 1.0 - 1e-12);
                    -(y * p.ln() + (1.0 - y) * (1.0 - p).ln())
                } else {
                    0.5 * (z - y).powi(2)
                }
            })
            .sum();
        total / data.len() as f64
    }

    /// Trains a fresh network. Returns the model and the full-data loss
    /// before training followed by the loss after every epoch.
    pub(crate) fn fit(data: &Dataset, logistic: bool, params: &MlpParams, rng: &mut Rng) -> (Self, Vec<f64>) {
        let n_in = data.n_features();
        let hidden = params.hidden.max(1);
        let mut net = Mlp::init(n_in, hidden, logistic, rng);
        let n_params = n_in * hidden + 2 * hidden + 1;
        let mut adam = Adam::new(n_params);
        let mut history = vec![net.loss(data)];
        let batch = params.batch_size.clamp(1, data.len());
        let mut order: Vec<usize> = (0..data.len()).collect();

        let mut g_w1 = vec![0.0; n_in * hidden];
        let mut g_b1 = vec![0.0; hidden];
        let mut g_w2 = vec![0.0; hidden];
        let mut h = vec![0.0; hidden];
        let mut grads = vec![0.0; n_params];
        for _ in 0..params.epochs {
            order.shuffle(rng);
            for chunk in order.chunks(batch) {
                g_w1.iter_mut().for_each(|g| *g = 0.0);
                g_b1.iter_mut().for_each(|g| *g = 0.0);
                g_w2.iter_mut().for_each(|g| *g = 0.0);
                let mut g_b2 = 0.0;
                for &r in chunk {
                    let x = data.row(r);
                    let z = net.forward(x, &mut h);
                    let y = data.targets()[r];
                    // both losses give d loss / d z = prediction - target
                    let delta = if logistic { sigmoid(z) - y } else { z - y };
                    g_b2 += delta;
                    for j in 0..hidden {
                        g_w2[j] += delta * h[j];
                    }
                    for j in 0..hidden {
                        if h[j] > 0.0 {
                            let dh = delta * net.w2[j];
                            g_b1[j] += dh;
                            for (i, xi) in x.iter().enumerate() {
                                g_w1[i * hidden + j] += dh * xi;
                            }
                        }
                    }
                }
                let nb = chunk.len() as f64;
                let mut k = 0;
                for (g, w) in g_w1.iter().zip(&net.w1) {
                    grads[k] = (g + params.l2 * w) / nb;
                    k += 1;
                }
                for g in &g_b1 {
                    grads[k] = g / nb;
                    k += 1;
                }
                for (g, w) in g_w2.iter().zip(&net.w2) {
                    grads[k] = (g + params.l2 * w) / nb;
                    k += 1;
                }
                grads[k] = g_b2 / nb;

                let Mlp { w1, b1, w2, b2, .. } = &mut net;
                let mut refs: Vec<&mut f64> = w1
                    .iter_mut()
                    .chain(b1.iter_mut())
                    .chain(w2.iter_mut())
                    .chain(std::iter::once(b2))
                    .collect();
                adam.step(&mut refs, &grads, params.learning_rate);
            }
            history.push(net.loss(data));
        }
        (net, history)
    }
}
