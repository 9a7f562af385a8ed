//! Membership tests for e- and p-functions under simple and composite
//! hypotheses.
//!
//! A function is an e-function w.r.t. a model `(P_θ)` when its upper envelope
//! `P*(f) = sup_θ ∫ f dP_θ` is at most 1, and a p-function when
//! `P*(1_{f≤ε}) ≤ ε` for every `ε > 0`. Checking the p-condition at the
//! finitely many values of `f` suffices: `ε ↦ P*{f ≤ ε}` is a nondecreasing
//! step function, constant on `[v_i, v_{i+1})`, so each constraint is
//! tightest at the left endpoint `v_i`.
//!
//! Finite families and partition-uniform models are decided exactly. For the
//! Bernoulli/binomial families the envelope `p ↦ ∫ f dB_p` is the polynomial
//! `Σ_k S_k p^k (1−p)^{N−k}` (`S_k` the level sums of `f`), maximized in
//! Bernstein form with certified brackets.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::bernoulli::CellPartition;
use crate::bernstein::{self, ExactMaxDecision};
use crate::error::{Error, Result};
use crate::measure::{integrate, Measure};
use crate::num::{ExtReal, Mode};
use crate::score::{ConditionalScoreFn, ScoreFn};
use crate::space::FiniteSpace;
use crate::verdict::{NumericsPolicy, Verdict, Witness};

/// A composite statistical hypothesis.
#[derive(Clone, Debug)]
pub enum StatModel {
    /// A finite family of measures sharing one space.
    FiniteFamily {
        space: FiniteSpace,
        members: Vec<(String, Measure)>,
    },
    /// The Bernoulli family `(B_p | p ∈ [0,1])` on `{0,1}^N`.
    Bernoulli { n: usize, space: FiniteSpace },
    /// The binomial family `(bin_p | p ∈ [0,1])` on `{0,…,N}`.
    Binomial { n: usize, space: FiniteSpace },
    /// The uniform measures on the cells of a partition of `{0,…,N}`.
    PartitionUniform {
        partition: CellPartition,
        space: FiniteSpace,
    },
}

impl StatModel {
    pub fn finite_family(members: Vec<(String, Measure)>) -> Result<Self> {
        let first = members.first().ok_or(Error::EmptySpace)?.1.space().clone();
        for (_, m) in &members {
            if m.space() != &first {
                return Err(Error::SpaceMismatch);
            }
        }
        Ok(StatModel::FiniteFamily {
            space: first,
            members,
        })
    }

    /// A single simple hypothesis.
    pub fn simple(measure: Measure) -> Self {
        let space = measure.space().clone();
        StatModel::FiniteFamily {
            space,
            members: vec![("P".to_string(), measure)],
        }
    }

    pub fn bernoulli(n: usize) -> Result<Self> {
        Ok(StatModel::Bernoulli {
            n,
            space: FiniteSpace::binary_strings(n)?,
        })
    }

    pub fn binomial(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter(
                "binomial family needs N >= 1".into(),
            ));
        }
        if n as u128 >= crate::space::ENUMERATION_BUDGET {
            return Err(Error::BudgetExceeded(n as u128));
        }
        Ok(StatModel::Binomial {
            n,
            space: FiniteSpace::counts(n),
        })
    }

    pub fn partition_uniform(partition: CellPartition) -> Self {
        let space = FiniteSpace::counts(partition.n());
        StatModel::PartitionUniform { partition, space }
    }

    pub fn space(&self) -> &FiniteSpace {
        match self {
            StatModel::FiniteFamily { space, .. }
            | StatModel::Bernoulli { space, .. }
            | StatModel::Binomial { space, .. }
            | StatModel::PartitionUniform { space, .. } => space,
        }
    }
}

/// Where an envelope supremum was (approximately) attained.
#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ArgmaxHint {
    /// A finite-family member label.
    Member(String),
    /// A parameter value of the Bernoulli/binomial family.
    Param(f64),
    /// A cell index of a partition-uniform model.
    Cell(usize),
}

impl ArgmaxHint {
    pub fn describe(&self) -> String {
        match self {
            ArgmaxHint::Member(l) => l.clone(),
            ArgmaxHint::Param(p) => format!("p={p}"),
            ArgmaxHint::Cell(i) => format!("cell {i}"),
        }
    }
}

/// Certified bracket for the upper envelope `P*(f)`.
#[derive(Clone, Debug)]
pub struct EnvelopeResult {
    pub lower: ExtReal,
    pub upper: ExtReal,
    pub argmax: ArgmaxHint,
    /// True when the bracket width reached the requested tolerance (always
    /// for the exactly-decided model kinds).
    pub certified: bool,
    pub mode: Mode,
    pub subdivisions: usize,
}

/// Bernstein coefficients of `p ↦ ∫ f dB_p` (resp. `∫ f dbin_p`), rounded
/// and, when the input is exact, also exact.
struct Coefficients {
    float: Vec<f64>,
    exact: Option<Vec<BigRational>>,
}

/// Exact binomial coefficient in u128; sound only through n = 128
/// (C(128, 64) still fits). Larger spaces go through [`binom_big`] or
/// [`binom_f64`].
pub(crate) fn binom_u128(n: usize, k: usize) -> u128 {
    debug_assert!(n <= 128);
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

pub(crate) fn binom_big(n: usize, k: usize) -> BigInt {
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Binomial coefficient in binary64 via the multiplicative form: exact while
/// below 2^53, ~1e-15-relative beyond.
pub(crate) fn binom_f64(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    let mut acc = 1.0f64;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

fn level_of(label: &str) -> usize {
    label.bytes().filter(|&b| b == b'1').count()
}

fn coefficients(f: &ScoreFn, model: &StatModel, want_exact: bool) -> Result<Coefficients> {
    let (n, per_level) = match model {
        StatModel::Bernoulli { n, .. } => (*n, true),
        StatModel::Binomial { n, .. } => (*n, false),
        _ => unreachable!("coefficients only exist for the parametric families"),
    };
    for (i, v) in f.values().iter().enumerate() {
        if v.is_infinite() {
            // Every outcome has positive mass under B_p for 0 < p < 1, so an
            // infinite value forces an infinite envelope.
            return Err(Error::InfiniteValueWithPositiveMass {
                outcome: f.space().label(i).to_string(),
                parameter: "every p in (0,1)".to_string(),
            });
        }
    }
    // Finite binary64 values are rationals, so the exact path is available
    // whenever requested or the input is already rational.
    let exact_path = want_exact || f.values().iter().all(ExtReal::is_exact);
    if per_level {
        // S_k = Σ_{+ω=k} f(ω); coefficient c_k = S_k / C(n,k).
        if exact_path {
            let mut sums = vec![BigRational::zero(); n + 1];
            for (i, v) in f.values().iter().enumerate() {
                sums[level_of(f.space().label(i))] += v.to_rational().expect("finite");
            }
            let exact: Vec<BigRational> = sums
                .into_iter()
                .enumerate()
                .map(|(k, s)| s / BigRational::from_integer(binom_big(n, k)))
                .collect();
            let float = exact
                .iter()
                .map(|r| ExtReal::Exact(r.clone()).to_f64())
                .collect();
            Ok(Coefficients {
                float,
                exact: Some(exact),
            })
        } else {
            let mut sums = vec![0.0f64; n + 1];
            for (i, v) in f.values().iter().enumerate() {
                sums[level_of(f.space().label(i))] += v.to_f64();
            }
            let float = sums
                .into_iter()
                .enumerate()
                .map(|(k, s)| s / binom_f64(n, k))
                .collect();
            Ok(Coefficients { float, exact: None })
        }
    } else {
        // On counts, ∫ f dbin_p = Σ_k f(k) C(n,k) p^k (1−p)^{n−k}: the
        // values are the Bernstein coefficients themselves.
        let float = f.values().iter().map(ExtReal::to_f64).collect();
        let exact = if exact_path {
            Some(
                f.values()
                    .iter()
                    .map(|v| v.to_rational().expect("finite"))
                    .collect(),
            )
        } else {
            None
        };
        Ok(Coefficients { float, exact })
    }
}

fn exact_member_envelope<'a, I>(f: &ScoreFn, members: I) -> Result<(ExtReal, ArgmaxHint, Mode)>
where
    I: IntoIterator<Item = (ArgmaxHint, &'a Measure)>,
{
    let mut best: Option<(ExtReal, ArgmaxHint)> = None;
    let mut mode = f.mode();
    for (hint, measure) in members {
        mode = mode.combine(measure.mode());
        let value = integrate(f, measure)?;
        match &best {
            Some((v, _)) if *v >= value => {}
            _ => best = Some((value, hint)),
        }
    }
    let (value, hint) = best.ok_or(Error::EmptySpace)?;
    Ok((value, hint, mode))
}

/// The upper envelope `P*(f) = sup_θ ∫ f dP_θ` as a certified bracket.
///
/// Finite families and partition-uniform models are computed exactly (the
/// bracket collapses to a point); the Bernoulli/binomial families get a
/// Bernstein-form branch-and-bound bracket of width ≤ `tol`. An infinite
/// supremum is reported as [`Error::InfiniteValueWithPositiveMass`].
pub fn upper_envelope(f: &ScoreFn, model: &StatModel, tol: f64) -> Result<EnvelopeResult> {
    if f.space() != model.space() {
        return Err(Error::SpaceMismatch);
    }
    if tol <= 0.0 {
        return Err(Error::InvalidParameter("tol must be positive".into()));
    }
    match model {
        StatModel::FiniteFamily { members, .. } => {
            let (value, hint, mode) = exact_member_envelope(
                f,
                members
                    .iter()
                    .map(|(label, m)| (ArgmaxHint::Member(label.clone()), m)),
            )?;
            if value.is_infinite() {
                let (label, measure) = members
                    .iter()
                    .find(|(_, m)| integrate(f, m).map(|v| v.is_infinite()).unwrap_or(false))
                    .expect("some member integrates to infinity");
                let outcome = f
                    .values()
                    .iter()
                    .zip(measure.weights())
                    .position(|(v, w)| v.is_infinite() && !w.is_zero())
                    .map(|i| f.space().label(i).to_string())
                    .unwrap_or_default();
                return Err(Error::InfiniteValueWithPositiveMass {
                    outcome,
                    parameter: label.clone(),
                });
            }
            Ok(EnvelopeResult {
                lower: value.clone(),
                upper: value,
                argmax: hint,
                certified: true,
                mode,
                subdivisions: 0,
            })
        }
        StatModel::PartitionUniform { partition, .. } => {
            let members: Vec<(ArgmaxHint, Measure)> = partition
                .cell_measures()
                .into_iter()
                .enumerate()
                .map(|(i, m)| (ArgmaxHint::Cell(i), m))
                .collect();
            let (value, hint, mode) =
                exact_member_envelope(f, members.iter().map(|(h, m)| (h.clone(), m)))?;
            if value.is_infinite() {
                let i = f
                    .values()
                    .iter()
                    .position(ExtReal::is_infinite)
                    .expect("infinite value present");
                return Err(Error::InfiniteValueWithPositiveMass {
                    outcome: f.space().label(i).to_string(),
                    parameter: format!("cell {}", partition.cell_of(i)),
                });
            }
            Ok(EnvelopeResult {
                lower: value.clone(),
                upper: value,
                argmax: hint,
                certified: true,
                mode,
                subdivisions: 0,
            })
        }
        StatModel::Bernoulli { .. } | StatModel::Binomial { .. } => {
            let coeffs = coefficients(f, model, false)?;
            let bracket = bernstein::max_on_unit_interval(&coeffs.float, tol);
            Ok(EnvelopeResult {
                lower: ExtReal::from_f64(bracket.lower)?,
                upper: ExtReal::from_f64(bracket.upper)?,
                argmax: ArgmaxHint::Param(bracket.argmax),
                certified: bracket.certified,
                mode: Mode::Binary64,
                subdivisions: bracket.subdivisions,
            })
        }
    }
}

fn verdict_from_exact_bound(
    value: &ExtReal,
    bound: &ExtReal,
    hint: &ArgmaxHint,
    epsilon: Option<ExtReal>,
    mode: Mode,
) -> Verdict {
    if value <= bound {
        Verdict::accepted(bound.to_f64() - value.to_f64(), mode)
    } else {
        Verdict::rejected(
            Witness {
                parameter: Some(hint.describe()),
                outcome: None,
                epsilon,
                attained: value.clone(),
                bound: bound.clone(),
            },
            mode,
        )
    }
}

/// Decides a Bernstein-envelope constraint `sup ≤ bound` under the policy.
fn parametric_bound_verdict(
    coeffs: &Coefficients,
    bound: &ExtReal,
    epsilon: Option<ExtReal>,
    policy: &NumericsPolicy,
) -> Verdict {
    if policy.mode == Mode::ExactRational {
        if let (Some(exact), Some(bound_rat)) = (&coeffs.exact, bound.to_rational()) {
            let min_width = BigRational::new(BigInt::one(), BigInt::from(1u128 << 100));
            return match bernstein::exact_max_decision(exact, &bound_rat, &min_width) {
                ExactMaxDecision::AtMost { lower, upper } => {
                    let b = bound.to_f64();
                    let v = ExtReal::Exact(upper).to_f64();
                    Verdict::accepted(b - v, Mode::ExactRational)
                        .with_bracket((ExtReal::Exact(lower).to_f64(), v))
                }
                ExactMaxDecision::Exceeds { at, attained } => Verdict::rejected(
                    Witness {
                        parameter: Some(format!("p={}", ExtReal::Exact(at).to_f64())),
                        outcome: None,
                        epsilon,
                        attained: ExtReal::Exact(attained),
                        bound: bound.clone(),
                    },
                    Mode::ExactRational,
                ),
                ExactMaxDecision::Straddles { lower, upper } => Verdict::inconclusive(
                    (
                        ExtReal::Exact(lower).to_f64(),
                        ExtReal::Exact(upper).to_f64(),
                    ),
                    bound.to_f64(),
                    Mode::ExactRational,
                ),
            };
        }
    }
    let tol = if policy.tolerance > 0.0 {
        policy.tolerance
    } else {
        NumericsPolicy::default().tolerance
    };
    let bracket = bernstein::max_on_unit_interval(&coeffs.float, tol);
    let bound_f = bound.to_f64();
    let upper = ExtReal::from_f64(bracket.upper).unwrap_or(ExtReal::Inf);
    let lower = ExtReal::from_f64(bracket.lower).unwrap_or(ExtReal::Inf);
    if upper <= *bound {
        Verdict::accepted(bound_f - bracket.upper, Mode::Binary64)
            .with_bracket((bracket.lower, bracket.upper))
    } else if lower > *bound {
        Verdict::rejected(
            Witness {
                parameter: Some(format!("p={}", bracket.argmax)),
                outcome: None,
                epsilon,
                attained: lower,
                bound: bound.clone(),
            },
            Mode::Binary64,
        )
        .with_bracket((bracket.lower, bracket.upper))
    } else {
        Verdict::inconclusive((bracket.lower, bracket.upper), bound_f, Mode::Binary64)
    }
}

/// Is `f` an e-function w.r.t. the model? Accepted iff the certified envelope
/// upper bound is ≤ 1 (exactly for the exactly-decided models); rejected with
/// a witness parameter when the lower bound exceeds 1; inconclusive only when
/// 1 lies strictly inside the final bracket.
pub fn is_e_function(f: &ScoreFn, model: &StatModel, policy: &NumericsPolicy) -> Result<Verdict> {
    if f.space() != model.space() {
        return Err(Error::SpaceMismatch);
    }
    match model {
        StatModel::FiniteFamily { .. } | StatModel::PartitionUniform { .. } => {
            match upper_envelope(f, model, 1.0) {
                Ok(env) => Ok(verdict_from_exact_bound(
                    &env.upper,
                    &ExtReal::one(),
                    &env.argmax,
                    None,
                    env.mode,
                )),
                Err(Error::InfiniteValueWithPositiveMass { outcome, parameter }) => {
                    Ok(Verdict::rejected(
                        Witness {
                            parameter: Some(parameter),
                            outcome: Some(outcome),
                            epsilon: None,
                            attained: ExtReal::Inf,
                            bound: ExtReal::one(),
                        },
                        f.mode(),
                    ))
                }
                Err(e) => Err(e),
            }
        }
        StatModel::Bernoulli { .. } | StatModel::Binomial { .. } => {
            match coefficients(f, model, policy.mode == Mode::ExactRational) {
                Ok(coeffs) => Ok(parametric_bound_verdict(
                    &coeffs,
                    &ExtReal::one(),
                    None,
                    policy,
                )),
                Err(Error::InfiniteValueWithPositiveMass { outcome, parameter }) => {
                    Ok(Verdict::rejected(
                        Witness {
                            parameter: Some(parameter),
                            outcome: Some(outcome),
                            epsilon: None,
                            attained: ExtReal::Inf,
                            bound: ExtReal::one(),
                        },
                        f.mode(),
                    ))
                }
                Err(e) => Err(e),
            }
        }
    }
}

/// Is `f` a p-function w.r.t. the model? All values must lie in `[0,1]`;
/// the tail constraint `P*(1_{f≤v}) ≤ v` is checked at every distinct value
/// `v` of `f`.
pub fn is_p_function(f: &ScoreFn, model: &StatModel, policy: &NumericsPolicy) -> Result<Verdict> {
    if f.space() != model.space() {
        return Err(Error::SpaceMismatch);
    }
    let one = ExtReal::one();
    for (i, v) in f.values().iter().enumerate() {
        if *v > one {
            return Err(Error::ValueOutOfRange {
                outcome: f.space().label(i).to_string(),
                value: v.to_string(),
            });
        }
    }
    let mut verdict = Verdict::accepted(f64::INFINITY, f.mode());
    for v in f.distinct_values() {
        let event = ScoreFn::from_values(
            f.space().clone(),
            f.values()
                .iter()
                .map(|x| {
                    if *x <= v {
                        ExtReal::one()
                    } else {
                        ExtReal::zero()
                    }
                })
                .collect(),
        )?;
        let constraint = match model {
            StatModel::FiniteFamily { .. } | StatModel::PartitionUniform { .. } => {
                let env = upper_envelope(&event, model, 1.0)?;
                verdict_from_exact_bound(&env.upper, &v, &env.argmax, Some(v.clone()), env.mode)
            }
            StatModel::Bernoulli { .. } | StatModel::Binomial { .. } => {
                let coeffs = coefficients(&event, model, policy.mode == Mode::ExactRational)?;
                parametric_bound_verdict(&coeffs, &v, Some(v.clone()), policy)
            }
        };
        verdict = verdict.combine(constraint);
        if verdict.is_rejected() {
            break;
        }
    }
    Ok(verdict)
}

fn require_family<'m>(
    f_params: &FiniteSpace,
    model: &'m StatModel,
) -> Result<&'m [(String, Measure)]> {
    match model {
        StatModel::FiniteFamily { members, .. } => {
            if members.len() != f_params.len()
                || members
                    .iter()
                    .zip(f_params.labels())
                    .any(|((label, _), expect)| label != expect)
            {
                return Err(Error::SpaceMismatch);
            }
            Ok(members)
        }
        _ => Err(Error::InvalidParameter(
            "conditional checks need a finite family".into(),
        )),
    }
}

/// Is `f(·;θ)` an e-function under `P_θ` for every `θ`?
pub fn is_conditional_e(f: &ConditionalScoreFn, model: &StatModel) -> Result<Verdict> {
    let members = require_family(f.parameter_space(), model)?;
    let mut verdict = Verdict::accepted(f64::INFINITY, Mode::ExactRational);
    for (idx, (label, measure)) in members.iter().enumerate() {
        let slice = f.slice(idx);
        if slice.space() != measure.space() {
            return Err(Error::SpaceMismatch);
        }
        let value = integrate(&slice, measure)?;
        let v = verdict_from_exact_bound(
            &value,
            &ExtReal::one(),
            &ArgmaxHint::Member(label.clone()),
            None,
            slice.mode().combine(measure.mode()),
        );
        verdict = verdict.combine(v);
        if verdict.is_rejected() {
            break;
        }
    }
    Ok(verdict)
}

/// Is `f(·;θ)` a p-function under `P_θ` for every `θ`? The witness carries
/// the violating `(θ, ε)` pair.
pub fn is_conditional_p(f: &ConditionalScoreFn, model: &StatModel) -> Result<Verdict> {
    let members = require_family(f.parameter_space(), model)?;
    let policy = NumericsPolicy::exact();
    let mut verdict = Verdict::accepted(f64::INFINITY, Mode::ExactRational);
    for (idx, (label, measure)) in members.iter().enumerate() {
        let slice = f.slice(idx);
        let simple = StatModel::simple(measure.clone());
        let mut v = is_p_function(&slice, &simple, &policy)?;
        if let Some(w) = &mut v.witness {
            w.parameter = Some(label.clone());
        }
        verdict = verdict.combine(v);
        if verdict.is_rejected() {
            break;
        }
    }
    Ok(verdict)
}

/// Builds the exact p-function `ω ↦ μ{ω′ : T(ω′) ≥ T(ω)}` of a test
/// statistic; always passes [`is_p_function`] w.r.t. `μ`.
pub fn p_from_statistic(statistic: &ScoreFn, mu: &Measure) -> Result<ScoreFn> {
    if statistic.space() != mu.space() {
        return Err(Error::SpaceMismatch);
    }
    let values = statistic
        .values()
        .iter()
        .map(|t| {
            statistic
                .values()
                .iter()
                .zip(mu.weights())
                .filter(|(u, _)| *u >= t)
                .fold(ExtReal::zero(), |acc, (_, w)| acc.add(w))
        })
        .collect();
    ScoreFn::from_values(statistic.space().clone(), values)
}
