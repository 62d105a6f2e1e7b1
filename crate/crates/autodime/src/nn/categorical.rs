//! Categorical distribution helpers over raw logits.
//!
//! Softmax heads everywhere in this crate go through these functions so the
//! max-shift stabilization and mask semantics stay in one place. Masked cells
//! carry probability exactly 0.0, not a tiny epsilon.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Stable softmax. Requires finite logits.
pub fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|l| (l - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.iter().map(|e| e / sum).collect()
}

/// Stable log-softmax.
pub fn log_softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let log_sum = logits
        .iter()
        .map(|l| (l - max).exp())
        .sum::<f64>()
        .ln()
        + max;
    logits.iter().map(|l| l - log_sum).collect()
}

/// Softmax restricted to `allowed` cells; everything else gets exactly 0.
pub fn masked_softmax(logits: &[f64], allowed: &[bool], what: &'static str) -> Result<Vec<f64>> {
    debug_assert_eq!(logits.len(), allowed.len());
    let max = logits
        .iter()
        .zip(allowed)
        .filter(|(_, &a)| a)
        .map(|(l, _)| *l)
        .fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return Err(Error::AllMasked(what));
    }
    let mut probs = vec![0.0; logits.len()];
    let mut sum = 0.0;
    for (i, (l, &a)) in logits.iter().zip(allowed).enumerate() {
        if a {
            let e = (l - max).exp();
            probs[i] = e;
            sum += e;
        }
    }
    for p in &mut probs {
        *p /= sum;
    }
    Ok(probs)
}

/// Samples an index from explicit probabilities.
pub fn sample_index(probs: &[f64], rng: &mut ChaCha8Rng) -> usize {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    for (i, p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    // Rounding pushed the cumulative sum below 1; take the last positive cell.
    probs
        .iter()
        .rposition(|&p| p > 0.0)
        .expect("probabilities sum to 1")
}

/// Shannon entropy of the softmax distribution, in nats.
pub fn entropy(logits: &[f64]) -> f64 {
    let logp = log_softmax(logits);
    -logp.iter().map(|lp| lp.exp() * lp).sum::<f64>()
}

/// Entropy over a masked distribution (zero-probability cells contribute 0).
pub fn masked_entropy(probs: &[f64]) -> f64 {
    -probs
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| p * p.ln())
        .sum::<f64>()
}

/// d(entropy)/d(logits) for an unmasked softmax head.
pub fn entropy_grad(logits: &[f64]) -> Vec<f64> {
    let logp = log_softmax(logits);
    let h = -logp.iter().map(|lp| lp.exp() * lp).sum::<f64>();
    logp.iter().map(|lp| -lp.exp() * (lp + h)).collect()
}

/// d(entropy)/d(logits) given masked probabilities; masked cells get 0.
pub fn masked_entropy_grad(probs: &[f64]) -> Vec<f64> {
    let h = masked_entropy(probs);
    probs
        .iter()
        .map(|&p| if p > 0.0 { -p * (p.ln() + h) } else { 0.0 })
        .collect()
}

/// KL(p || q) between two categorical distributions given their logits.
/// `q` is floored at 1e-12 inside the log as a guard; softmax heads cannot
/// actually produce zeros.
pub fn kl_from_logits(p_logits: &[f64], q_logits: &[f64]) -> f64 {
    let lp = log_softmax(p_logits);
    let lq = log_softmax(q_logits);
    lp.iter()
        .zip(&lq)
        .map(|(lpi, lqi)| {
            let p = lpi.exp();
            if p > 0.0 {
                p * (lpi - lqi.max(1e-12f64.ln()))
            } else {
                0.0
            }
        })
        .sum()
}

/// d KL(p || q) / d q_logits with p fixed: q_probs - p_probs.
pub fn kl_grad_wrt_q_logits(p_logits: &[f64], q_logits: &[f64]) -> Vec<f64> {
    let p = softmax(p_logits);
    let q = softmax(q_logits);
    q.iter().zip(&p).map(|(qi, pi)| qi - pi).collect()
}
