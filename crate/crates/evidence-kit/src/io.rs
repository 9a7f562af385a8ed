//! JSON file formats for the CLI surfaces.
//!
//! Numbers are either binary64 JSON numbers or strings: `"p/q"` for exact
//! rationals, `"inf"` for infinity; the deserializer accepts both forms
//! everywhere a value appears.
//!
//! - function file: `{"space": ["a","b"], "values": {"a": 1, "b": "1/2"}}`,
//!   or for symmetric functions over `{0,1}^N` (and for count-space
//!   functions) `{"n": 4, "by_count": [v0, …, vN]}`;
//! - finite-family model: `{"space": [...], "members": {"P1": {...}, ...}}`;
//! - para-Bayesian model: `{"omega": [...], "theta": [...],
//!   "kernel": {"A": {...}}, "priors": {"pi": {...}}}` (or a single
//!   `"prior"`);
//! - joint function on `Ω × Θ`: `{"omega": [...], "theta": [...],
//!   "values": {"A": {"0": ...}}}` keyed parameter-first.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::bayes::ParaBayesModel;
use crate::bernoulli::count_ones;
use crate::error::{Error, Result};
use crate::measure::Measure;
use crate::num::ExtReal;
use crate::score::{ConditionalScoreFn, ScoreFn};
use crate::space::FiniteSpace;
use crate::testing::StatModel;

/// A score function or measure on a flat space.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FunctionFile {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub schema: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub space: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub values: Option<BTreeMap<String, ExtReal>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub by_count: Option<Vec<ExtReal>>,
}

/// What outcome space the surrounding command expects.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FunctionDomain {
    /// `{0,1}^N`: `by_count` entries expand symmetrically per level.
    BinaryStrings(usize),
    /// `{0,…,N}`: `by_count` entries are the values themselves.
    Counts(usize),
    /// Whatever the explicit `space` field says.
    Explicit,
}

impl FunctionFile {
    pub fn from_score_fn(f: &ScoreFn) -> Self {
        FunctionFile {
            schema: None,
            space: Some(f.space().labels().to_vec()),
            values: Some(
                f.space()
                    .labels()
                    .iter()
                    .cloned()
                    .zip(f.values().iter().cloned())
                    .collect(),
            ),
            n: None,
            by_count: None,
        }
    }

    pub fn into_score_fn(self, domain: FunctionDomain) -> Result<ScoreFn> {
        if let Some(by_count) = self.by_count {
            let n = match (domain, self.n) {
                (FunctionDomain::BinaryStrings(n), file_n)
                | (FunctionDomain::Counts(n), file_n) => {
                    if let Some(fnn) = file_n {
                        if fnn != n {
                            return Err(Error::InvalidParameter(format!(
                                "file says n = {fnn}, the model says n = {n}"
                            )));
                        }
                    }
                    n
                }
                (FunctionDomain::Explicit, Some(n)) => n,
                (FunctionDomain::Explicit, None) => {
                    return Err(Error::InvalidParameter(
                        "by_count needs an \"n\" field or a parametric model".into(),
                    ))
                }
            };
            if by_count.len() != n + 1 {
                return Err(Error::LabelMismatch {
                    expected: n + 1,
                    found: by_count.len(),
                });
            }
            return match domain {
                FunctionDomain::BinaryStrings(_) => {
                    let space = FiniteSpace::binary_strings(n)?;
                    let values = space
                        .labels()
                        .iter()
                        .map(|w| Ok(by_count[count_ones(w)?].clone()))
                        .collect::<Result<Vec<_>>>()?;
                    ScoreFn::from_values(space, values)
                }
                _ => ScoreFn::from_values(FiniteSpace::counts(n), by_count),
            };
        }
        let space = FiniteSpace::new(
            self.space
                .ok_or_else(|| Error::InvalidParameter("missing \"space\"".into()))?,
        )?;
        let values = self
            .values
            .ok_or_else(|| Error::InvalidParameter("missing \"values\"".into()))?;
        ScoreFn::from_map(space, &values)
    }
}

/// A finite family of measures.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FamilyFile {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub schema: Option<String>,
    pub space: Vec<String>,
    pub members: BTreeMap<String, BTreeMap<String, ExtReal>>,
}

impl FamilyFile {
    pub fn into_model(self) -> Result<StatModel> {
        let space = FiniteSpace::new(self.space)?;
        let members = self
            .members
            .into_iter()
            .map(|(label, weights)| Measure::new(space.clone(), &weights).map(|m| (label, m)))
            .collect::<Result<Vec<_>>>()?;
        StatModel::finite_family(members)
    }
}

/// A para-Bayesian (or Bayesian) model.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ParaBayesFile {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub schema: Option<String>,
    pub omega: Vec<String>,
    pub theta: Vec<String>,
    /// `θ → (ω → weight)`.
    pub kernel: BTreeMap<String, BTreeMap<String, ExtReal>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub priors: Option<BTreeMap<String, BTreeMap<String, ExtReal>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub prior: Option<BTreeMap<String, ExtReal>>,
}

impl ParaBayesFile {
    pub fn into_model(self) -> Result<ParaBayesModel> {
        let omega = FiniteSpace::new(self.omega)?;
        let theta = FiniteSpace::new(self.theta.clone())?;
        let mut kernel = Vec::with_capacity(self.theta.len());
        for label in &self.theta {
            let weights = self.kernel.get(label).ok_or_else(|| {
                Error::InvalidParameter(format!("kernel misses row for theta = {label}"))
            })?;
            kernel.push((label.clone(), Measure::new(omega.clone(), weights)?));
        }
        let mut priors = Vec::new();
        if let Some(named) = self.priors {
            for (label, weights) in named {
                priors.push((label, Measure::new(theta.clone(), &weights)?));
            }
        }
        if let Some(weights) = self.prior {
            priors.push(("Q".to_string(), Measure::new(theta.clone(), &weights)?));
        }
        if priors.is_empty() {
            return Err(Error::InvalidParameter(
                "model needs \"priors\" or \"prior\"".into(),
            ));
        }
        ParaBayesModel::new(kernel, priors)
    }
}

/// A function on `Ω × Θ`, keyed parameter-first.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct JointFunctionFile {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub schema: Option<String>,
    pub omega: Vec<String>,
    pub theta: Vec<String>,
    /// `θ → (ω → value)`.
    pub values: BTreeMap<String, BTreeMap<String, ExtReal>>,
}

impl JointFunctionFile {
    pub fn into_conditional(self) -> Result<ConditionalScoreFn> {
        let omega = FiniteSpace::new(self.omega)?;
        let theta = FiniteSpace::new(self.theta)?;
        let mut rows = Vec::with_capacity(theta.len());
        for t in theta.labels() {
            let row_map = self
                .values
                .get(t)
                .ok_or_else(|| Error::InvalidParameter(format!("values miss theta = {t}")))?;
            if row_map.len() != omega.len() {
                return Err(Error::LabelMismatch {
                    expected: omega.len(),
                    found: row_map.len(),
                });
            }
            let mut row = Vec::with_capacity(omega.len());
            for o in omega.labels() {
                let v = row_map
                    .get(o)
                    .ok_or_else(|| Error::UnknownLabel(o.clone()))?;
                row.push(v.clone());
            }
            rows.push(row);
        }
        ConditionalScoreFn::from_slices(omega, theta, rows)
    }

    pub fn from_conditional(f: &ConditionalScoreFn) -> Self {
        let mut values = BTreeMap::new();
        for (j, t) in f.parameter_space().labels().iter().enumerate() {
            let row: BTreeMap<String, ExtReal> = f
                .outcome_space()
                .labels()
                .iter()
                .enumerate()
                .map(|(i, o)| (o.clone(), f.value(i, j).clone()))
                .collect();
            values.insert(t.clone(), row);
        }
        JointFunctionFile {
            schema: None,
            omega: f.outcome_space().labels().to_vec(),
            theta: f.parameter_space().labels().to_vec(),
            values,
        }
    }
}
