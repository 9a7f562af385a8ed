//! Probability measures on finite spaces, integration, and pushforward.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::One;

use crate::error::{Error, Result};
use crate::num::{ExtReal, Mode};
use crate::score::ScoreFn;
use crate::space::FiniteSpace;

/// Absolute slack allowed on `Σ weights = 1` when any weight is binary64.
pub const WEIGHT_SUM_TOLERANCE: f64 = 1e-12;

/// A probability measure: nonnegative weights summing to one.
///
/// Weights sum to 1 exactly when all of them are exact rationals, and within
/// [`WEIGHT_SUM_TOLERANCE`] otherwise.
#[derive(Clone, Debug, PartialEq)]
pub struct Measure {
    space: FiniteSpace,
    weights: Vec<ExtReal>,
}

impl Measure {
    /// Validates and builds a measure from weights keyed exactly by the
    /// space's labels.
    pub fn new(space: FiniteSpace, weights: &BTreeMap<String, ExtReal>) -> Result<Self> {
        if weights.len() != space.len() {
            return Err(Error::LabelMismatch {
                expected: space.len(),
                found: weights.len(),
            });
        }
        let mut ordered = Vec::with_capacity(space.len());
        for label in space.labels() {
            let w = weights
                .get(label)
                .ok_or_else(|| Error::UnknownLabel(label.clone()))?;
            ordered.push(w.clone());
        }
        Self::from_weights(space, ordered)
    }

    /// Builds a measure from weights already in label order.
    pub fn from_weights(space: FiniteSpace, weights: Vec<ExtReal>) -> Result<Self> {
        assert_eq!(space.len(), weights.len(), "weight vector length");
        for (i, w) in weights.iter().enumerate() {
            if w.is_infinite() {
                return Err(Error::InfiniteWeight(space.label(i).to_string()));
            }
        }
        let exact = weights.iter().all(|w| w.is_exact());
        if exact {
            let sum: BigRational = weights
                .iter()
                .map(|w| w.to_rational().expect("finite exact"))
                .sum();
            if !sum.is_one() {
                return Err(Error::WeightsDoNotSumToOne {
                    sum: ExtReal::Exact(sum).to_string(),
                });
            }
        } else {
            let sum: f64 = weights.iter().map(ExtReal::to_f64).sum();
            if (sum - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
                return Err(Error::WeightsDoNotSumToOne {
                    sum: sum.to_string(),
                });
            }
        }
        Ok(Measure { space, weights })
    }

    /// The uniform measure.
    pub fn uniform(space: FiniteSpace) -> Self {
        let n = space.len() as u64;
        let w = (0..n).map(|_| ExtReal::from_ratio(1, n)).collect();
        Measure { space, weights: w }
    }

    /// The point mass at `label`.
    pub fn point_mass(space: FiniteSpace, label: &str) -> Result<Self> {
        let at = space
            .position(label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))?;
        let weights = (0..space.len())
            .map(|i| {
                if i == at {
                    ExtReal::one()
                } else {
                    ExtReal::zero()
                }
            })
            .collect();
        Ok(Measure { space, weights })
    }

    pub fn space(&self) -> &FiniteSpace {
        &self.space
    }

    pub fn weights(&self) -> &[ExtReal] {
        &self.weights
    }

    pub fn weight(&self, i: usize) -> &ExtReal {
        &self.weights[i]
    }

    pub fn mode(&self) -> Mode {
        self.weights
            .iter()
            .fold(Mode::ExactRational, |m, w| m.combine(w.mode()))
    }

    /// Probability of the event given by outcome indices.
    pub fn event_mass<I: IntoIterator<Item = usize>>(&self, indices: I) -> ExtReal {
        indices
            .into_iter()
            .fold(ExtReal::zero(), |acc, i| acc.add(&self.weights[i]))
    }
}

/// Validated construction from a label-keyed weight map. Negative weights
/// are unrepresentable in [`ExtReal`] and get rejected upstream at value
/// construction or parse time.
pub fn make_measure(space: &FiniteSpace, weights: &BTreeMap<String, ExtReal>) -> Result<Measure> {
    for label in weights.keys() {
        if space.position(label).is_none() {
            return Err(Error::UnknownLabel(label.clone()));
        }
    }
    Measure::new(space.clone(), weights)
}

/// `∫ f dμ = Σ_ω f(ω)·μ(ω)` with the convention `∞ · 0 = 0`.
pub fn integrate(f: &ScoreFn, mu: &Measure) -> Result<ExtReal> {
    if f.space() != mu.space() {
        return Err(Error::SpaceMismatch);
    }
    Ok(f.values()
        .iter()
        .zip(mu.weights())
        .fold(ExtReal::zero(), |acc, (v, w)| acc.add(&v.mul(w))))
}

/// Image measure under an outcome map: the weight of `y` is the total mass
/// of its preimage.
pub fn pushforward<F>(mu: &Measure, target: &FiniteSpace, map: F) -> Result<Measure>
where
    F: Fn(&str) -> String,
{
    let mut weights = vec![ExtReal::zero(); target.len()];
    for (i, label) in mu.space().labels().iter().enumerate() {
        let image = map(label);
        let j = target
            .position(&image)
            .ok_or_else(|| Error::UnknownLabel(image.clone()))?;
        weights[j] = weights[j].add(mu.weight(i));
    }
    Measure::from_weights(target.clone(), weights)
}
