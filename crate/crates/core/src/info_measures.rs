//! Entropy of a discrete system state and the information carried by a
//! transition between states.

use thiserror::Error;

/// Largest accepted deviation of a distribution's total from one.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum InfoError {
    #[error("distribution has no events")]
    Empty,
    #[error("probability {index} is {value}, must be a finite value >= 0")]
    InvalidProbability { index: usize, value: f64 },
    #[error("probabilities sum to {0}, expected 1")]
    NotNormalized(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LogBase {
    #[default]
    Bits,
    Nats,
}

impl LogBase {
    fn log(self, x: f64) -> f64 {
        match self {
            LogBase::Bits => x.log2(),
            LogBase::Nats => x.ln(),
        }
    }
}

/// Probability distribution over finitely many elementary events.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteState {
    probs: Vec<f64>,
}

impl DiscreteState {
    pub fn new(probs: Vec<f64>) -> Result<Self, InfoError> {
        if probs.is_empty() {
            return Err(InfoError::Empty);
        }
        if let Some((index, &value)) = probs
            .iter()
            .enumerate()
            .find(|(_, p)| !(p.is_finite() && **p >= 0.0))
        {
            return Err(InfoError::InvalidProbability {
                index: index + 1,
                value,
            });
        }
        let sum = compensated_sum(probs.iter().copied());
        if (sum - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return Err(InfoError::NotNormalized(sum));
        }
        Ok(Self { probs })
    }

    pub fn uniform(n: usize) -> Result<Self, InfoError> {
        Self::new(vec![1.0 / n as f64; n])
    }

    /// All mass on event `index` (0-based) out of `n`.
    pub fn degenerate(n: usize, index: usize) -> Result<Self, InfoError> {
        let mut probs = vec![0.0; n];
        *probs.get_mut(index).ok_or(InfoError::Empty)? = 1.0;
        Self::new(probs)
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }
}

// Neumaier summation; keeps the uniform case exact to ~1 ulp for large n.
fn compensated_sum(values: impl Iterator<Item = f64>) -> f64 {
    let (mut sum, mut carry) = (0.0f64, 0.0f64);
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            carry += (sum - t) + v;
        } else {
            carry += (v - t) + sum;
        }
        sum = t;
    }
    sum + carry
}

/// Shannon entropy in bits. Zero-probability events contribute nothing.
pub fn entropy(state: &DiscreteState) -> f64 {
    entropy_in(state, LogBase::Bits)
}

pub fn entropy_in(state: &DiscreteState, base: LogBase) -> f64 {
    let h = -compensated_sum(
        state
            .probs()
            .iter()
            .filter(|p| **p > 0.0)
            .map(|&p| p * base.log(p)),
    );
    // a single certain event gives -0.0
    h.max(0.0)
}

/// Entropy of the uniform distribution on `n` events.
pub fn max_entropy(n: usize) -> f64 {
    max_entropy_in(n, LogBase::Bits)
}

pub fn max_entropy_in(n: usize, base: LogBase) -> f64 {
    base.log(n as f64)
}

/// Entropy decrease from `before` to `after`; negative when the transition
/// adds uncertainty.
pub fn information_gain(before: &DiscreteState, after: &DiscreteState) -> f64 {
    entropy(before) - entropy(after)
}
