//! Surrogate federated training: softmax regression on synthetic non-IID data, full-batch
//! local epochs and data-size-weighted averaging.

mod data;
pub mod io;

use std::cell::Cell;

use crate::error::{Error, Result};

pub use data::{class_means, label_mix, synthesize_datasets, UeDataset};

thread_local! {
    static GLOBAL_LOSS_CALLS: Cell<u64> = const { Cell::new(0) };
}

/// Number of [`global_loss`] evaluations made on the current thread.
pub fn global_loss_evaluations() -> u64 {
    GLOBAL_LOSS_CALLS.with(Cell::get)
}

/// Softmax-regression parameters, one row of `features + 1` weights (bias last) per class.
#[derive(Debug, Clone, PartialEq)]
pub struct GlobalModel {
    pub weights: Vec<f64>,
    pub classes: usize,
    pub features: usize,
    pub round: usize,
}

impl GlobalModel {
    pub fn zeros(classes: usize, features: usize) -> Self {
        Self { weights: vec![0.0; classes * (features + 1)], classes, features, round: 0 }
    }

    pub fn with_weights(&self, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != self.weights.len() {
            return Err(Error::Contract(format!("expected {} weights, got {}", self.weights.len(), weights.len())));
        }
        Ok(Self { weights, ..self.clone() })
    }

    fn check(&self, data: &UeDataset) -> Result<()> {
        if data.dim != self.features {
            return Err(Error::Contract(format!("dataset has {} features, model expects {}", data.dim, self.features)));
        }
        if let Some(&y) = data.labels.iter().find(|&&y| y as usize >= self.classes) {
            return Err(Error::Contract(format!("label {y} outside {} classes", self.classes)));
        }
        Ok(())
    }
}

/// Mean cross-entropy and its gradient with respect to `weights`.
pub fn loss_and_gradient(weights: &[f64], classes: usize, data: &UeDataset) -> (f64, Vec<f64>) {
    let stride = data.dim + 1;
    let mut grad = vec![0.0; weights.len()];
    let mut probs = vec![0.0; classes];
    let mut total = 0.0;
    for (x, &y) in data.samples() {
        let lse = softmax_into(weights, x, &mut probs);
        total += lse - logit(weights, x, y as usize);
        for (c, p) in probs.iter().enumerate() {
            let err = p - f64::from(u8::from(c == y as usize));
            let row = &mut grad[c * stride..(c + 1) * stride];
            for (g, xi) in row.iter_mut().zip(x) {
                *g += err * xi;
            }
            row[data.dim] += err;
        }
    }
    let n = data.len() as f64;
    grad.iter_mut().for_each(|g| *g /= n);
    (total / n, grad)
}

fn logit(weights: &[f64], x: &[f64], c: usize) -> f64 {
    let stride = x.len() + 1;
    let row = &weights[c * stride..(c + 1) * stride];
    row[..x.len()].iter().zip(x).map(|(w, xi)| w * xi).sum::<f64>() + row[x.len()]
}

/// Writes class probabilities into `probs` and returns log-sum-exp of the logits.
fn softmax_into(weights: &[f64], x: &[f64], probs: &mut [f64]) -> f64 {
    for (c, p) in probs.iter_mut().enumerate() {
        *p = logit(weights, x, c);
    }
    let max = probs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for p in probs.iter_mut() {
        *p = (*p - max).exp();
        sum += *p;
    }
    probs.iter_mut().for_each(|p| *p /= sum);
    max + sum.ln()
}

/// Mean cross-entropy of `model` on one UE's samples.
pub fn local_loss(model: &GlobalModel, data: &UeDataset) -> Result<f64> {
    model.check(data)?;
    let mut probs = vec![0.0; model.classes];
    let total: f64 = data
        .samples()
        .map(|(x, &y)| softmax_into(&model.weights, x, &mut probs) - logit(&model.weights, x, y as usize))
        .sum();
    Ok(total / data.len() as f64)
}

/// `kappa` full-batch gradient steps from the global model. Returns the local weights and the
/// local loss after training, which is what the UE reports to the access point.
pub fn local_train(model: &GlobalModel, data: &UeDataset, eta: f64, kappa: usize) -> Result<(Vec<f64>, f64)> {
    model.check(data)?;
    if kappa == 0 {
        return Err(Error::Contract("kappa must be at least 1".into()));
    }
    let mut weights = model.weights.clone();
    for _ in 0..kappa {
        let (_, grad) = loss_and_gradient(&weights, model.classes, data);
        for (w, g) in weights.iter_mut().zip(&grad) {
            *w -= eta * g;
        }
    }
    let loss = local_loss(&model.with_weights(weights.clone())?, data)?;
    Ok((weights, loss))
}

/// Weighted average of the participants' weights with coefficients `D_k / sum(D_sel)`.
pub fn aggregate(base: &GlobalModel, updates: &[(usize, Vec<f64>)], weights_by: &[f64]) -> Result<GlobalModel> {
    if updates.is_empty() {
        return Err(Error::Contract("aggregation needs at least one update".into()));
    }
    let mut total = 0.0;
    for (k, w) in updates {
        let d = *weights_by.get(*k).ok_or_else(|| Error::Contract(format!("no data size for UE {k}")))?;
        if !(d.is_finite() && d > 0.0) {
            return Err(Error::Contract(format!("UE {k} has data size {d}")));
        }
        if w.len() != base.weights.len() {
            return Err(Error::Contract(format!("UE {k} sent {} weights", w.len())));
        }
        total += d;
    }
    let mut weights = vec![0.0; base.weights.len()];
    for (k, w) in updates {
        let coef = weights_by[*k] / total;
        for (acc, wi) in weights.iter_mut().zip(w) {
            *acc += coef * wi;
        }
    }
    Ok(GlobalModel { weights, round: base.round + 1, ..base.clone() })
}

/// Data-size-weighted loss over every UE. For reporting only: the schedulers never call it.
pub fn global_loss(model: &GlobalModel, datasets: &[UeDataset]) -> Result<f64> {
    GLOBAL_LOSS_CALLS.with(|c| c.set(c.get() + 1));
    let total: usize = datasets.iter().map(UeDataset::len).sum();
    let mut acc = 0.0;
    for data in datasets {
        acc += data.len() as f64 / total as f64 * local_loss(model, data)?;
    }
    Ok(acc)
}
