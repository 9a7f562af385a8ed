//! Score functions: candidate e- and p-functions.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::num::{ExtReal, Mode};
use crate::space::FiniteSpace;

/// A map from outcomes to `[0, ∞]`. Nonnegativity is structural (`ExtReal`
/// cannot be negative); the extra `≤ 1` constraint on p-function candidates
/// is checked where membership is tested.
#[derive(Clone, Debug, PartialEq)]
pub struct ScoreFn {
    space: FiniteSpace,
    values: Vec<ExtReal>,
}

impl ScoreFn {
    pub fn from_values(space: FiniteSpace, values: Vec<ExtReal>) -> Result<Self> {
        if space.len() != values.len() {
            return Err(Error::LabelMismatch {
                expected: space.len(),
                found: values.len(),
            });
        }
        Ok(ScoreFn { space, values })
    }

    pub fn from_map(space: FiniteSpace, values: &BTreeMap<String, ExtReal>) -> Result<Self> {
        if values.len() != space.len() {
            return Err(Error::LabelMismatch {
                expected: space.len(),
                found: values.len(),
            });
        }
        let mut ordered = Vec::with_capacity(space.len());
        for label in space.labels() {
            let v = values
                .get(label)
                .ok_or_else(|| Error::UnknownLabel(label.clone()))?;
            ordered.push(v.clone());
        }
        Ok(ScoreFn {
            space,
            values: ordered,
        })
    }

    pub fn constant(space: FiniteSpace, value: ExtReal) -> Self {
        let values = vec![value; space.len()];
        ScoreFn { space, values }
    }

    /// Indicator of the outcomes selected by `pred`.
    pub fn indicator<F: Fn(&str) -> bool>(space: FiniteSpace, pred: F) -> Self {
        let values = space
            .labels()
            .iter()
            .map(|l| {
                if pred(l) {
                    ExtReal::one()
                } else {
                    ExtReal::zero()
                }
            })
            .collect();
        ScoreFn { space, values }
    }

    pub fn space(&self) -> &FiniteSpace {
        &self.space
    }

    pub fn values(&self) -> &[ExtReal] {
        &self.values
    }

    pub fn value(&self, i: usize) -> &ExtReal {
        &self.values[i]
    }

    pub fn mode(&self) -> Mode {
        self.values
            .iter()
            .fold(Mode::ExactRational, |m, v| m.combine(v.mode()))
    }

    pub fn map<F: Fn(&ExtReal) -> ExtReal>(&self, f: F) -> ScoreFn {
        ScoreFn {
            space: self.space.clone(),
            values: self.values.iter().map(f).collect(),
        }
    }

    /// Pointwise product; spaces must match.
    pub fn pointwise_mul(&self, other: &ScoreFn) -> Result<ScoreFn> {
        if self.space != other.space {
            return Err(Error::SpaceMismatch);
        }
        Ok(ScoreFn {
            space: self.space.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a.mul(b))
                .collect(),
        })
    }

    /// Scales every value by `1/c`.
    pub fn scale_down(&self, c: &ExtReal) -> ScoreFn {
        self.map(|v| v.div(c))
    }

    /// The distinct values, sorted ascending (exact comparison).
    pub fn distinct_values(&self) -> Vec<ExtReal> {
        let mut vs: Vec<ExtReal> = self.values.to_vec();
        vs.sort();
        vs.dedup();
        vs
    }
}

/// A family `f(·;θ)` of score functions, one per parameter label.
///
/// Stored per parameter: `values[θ][ω]`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConditionalScoreFn {
    outcome_space: FiniteSpace,
    parameter_space: FiniteSpace,
    values: Vec<Vec<ExtReal>>,
}

impl ConditionalScoreFn {
    pub fn from_slices(
        outcome_space: FiniteSpace,
        parameter_space: FiniteSpace,
        values: Vec<Vec<ExtReal>>,
    ) -> Result<Self> {
        if values.len() != parameter_space.len() {
            return Err(Error::LabelMismatch {
                expected: parameter_space.len(),
                found: values.len(),
            });
        }
        for row in &values {
            if row.len() != outcome_space.len() {
                return Err(Error::LabelMismatch {
                    expected: outcome_space.len(),
                    found: row.len(),
                });
            }
        }
        Ok(ConditionalScoreFn {
            outcome_space,
            parameter_space,
            values,
        })
    }

    pub fn constant(
        outcome_space: FiniteSpace,
        parameter_space: FiniteSpace,
        value: ExtReal,
    ) -> Self {
        let values = vec![vec![value; outcome_space.len()]; parameter_space.len()];
        ConditionalScoreFn {
            outcome_space,
            parameter_space,
            values,
        }
    }

    pub fn outcome_space(&self) -> &FiniteSpace {
        &self.outcome_space
    }

    pub fn parameter_space(&self) -> &FiniteSpace {
        &self.parameter_space
    }

    pub fn value(&self, outcome: usize, parameter: usize) -> &ExtReal {
        &self.values[parameter][outcome]
    }

    /// The slice `f(·;θ)` as a plain score function on the outcome space.
    pub fn slice(&self, parameter: usize) -> ScoreFn {
        ScoreFn {
            space: self.outcome_space.clone(),
            values: self.values[parameter].clone(),
        }
    }

    pub fn map<F: Fn(&ExtReal) -> ExtReal>(&self, f: F) -> ConditionalScoreFn {
        ConditionalScoreFn {
            outcome_space: self.outcome_space.clone(),
            parameter_space: self.parameter_space.clone(),
            values: self
                .values
                .iter()
                .map(|row| row.iter().map(&f).collect())
                .collect(),
        }
    }

    /// Flattens to a score function on the product space `Ω × Θ`.
    pub fn to_joint(&self) -> Result<ScoreFn> {
        let product = FiniteSpace::product(&self.outcome_space, &self.parameter_space)?;
        let mut values = Vec::with_capacity(product.len());
        for i in 0..self.outcome_space.len() {
            for j in 0..self.parameter_space.len() {
                values.push(self.values[j][i].clone());
            }
        }
        ScoreFn::from_values(product, values)
    }

    /// Rebuilds the per-parameter view of a score function on `Ω × Θ`.
    pub fn from_joint(f: &ScoreFn) -> Result<Self> {
        let (omega, theta) = f.space().factors()?;
        let mut values = vec![vec![ExtReal::zero(); omega.len()]; theta.len()];
        for (j, row) in values.iter_mut().enumerate() {
            for (i, slot) in row.iter_mut().enumerate() {
                *slot = f.value(f.space().pair_index(i, j)?).clone();
            }
        }
        ConditionalScoreFn::from_slices(omega.clone(), theta.clone(), values)
    }
}
