//! Bayesian and para-Bayesian models: joints, marginals, the constructive
//! product decomposition of joint e-functions, and inf/sup projections.
//!
//! A para-Bayesian model couples a kernel `(P_θ | θ ∈ Θ)` on `Ω` with a
//! family of priors `(Q_π | π ∈ Π)` on `Θ`; the joint measures are
//! `T_π(ω,θ) = P_θ(ω) Q_π(θ)`. A joint e-function `f ∈ E_T` factors as
//! `f(ω,θ) = g(ω;θ) h(θ)` with `h(θ) = ∫ f(·,θ) dP_θ` and `g = f/h`
//! (`0/0 = 0`), where `h` is an e-function for the prior family and `g` a
//! conditional e-function for the kernel; conversely any such product is in
//! `E_T`. [`decompose_e`] and [`product_e`] implement the two directions
//! with certificates.

use crate::error::{Error, Result};
use crate::measure::{integrate, Measure};
use crate::num::{ExtReal, Mode};
use crate::score::{ConditionalScoreFn, ScoreFn};
use crate::space::FiniteSpace;
use crate::testing::{is_conditional_e, is_e_function, StatModel};
use crate::verdict::{NumericsPolicy, Verdict, Witness};

/// A kernel with a single prior.
#[derive(Clone, Debug)]
pub struct BayesModel {
    pub kernel: Vec<(String, Measure)>,
    pub prior: Measure,
}

impl BayesModel {
    pub fn new(kernel: Vec<(String, Measure)>, prior: Measure) -> Result<Self> {
        let para = ParaBayesModel::new(kernel.clone(), vec![("Q".to_string(), prior.clone())])?;
        let _ = para;
        Ok(BayesModel { kernel, prior })
    }

    /// The same model as a para-Bayesian model with a singleton prior family;
    /// one code path serves both.
    pub fn to_para(&self) -> ParaBayesModel {
        ParaBayesModel::new(
            self.kernel.clone(),
            vec![("Q".to_string(), self.prior.clone())],
        )
        .expect("validated at construction")
    }
}

/// A kernel `θ → P_θ` with a finite family of priors on `Θ`.
#[derive(Clone, Debug)]
pub struct ParaBayesModel {
    kernel: Vec<(String, Measure)>,
    priors: Vec<(String, Measure)>,
    omega: FiniteSpace,
    theta: FiniteSpace,
}

impl ParaBayesModel {
    pub fn new(kernel: Vec<(String, Measure)>, priors: Vec<(String, Measure)>) -> Result<Self> {
        let omega = kernel.first().ok_or(Error::EmptySpace)?.1.space().clone();
        for (_, p) in &kernel {
            if p.space() != &omega {
                return Err(Error::SpaceMismatch);
            }
        }
        let theta = FiniteSpace::new(kernel.iter().map(|(l, _)| l.clone()))?;
        if priors.is_empty() {
            return Err(Error::InvalidParameter(
                "at least one prior required".into(),
            ));
        }
        for (_, q) in &priors {
            if q.space() != &theta {
                return Err(Error::SpaceMismatch);
            }
        }
        Ok(ParaBayesModel {
            kernel,
            priors,
            omega,
            theta,
        })
    }

    pub fn omega(&self) -> &FiniteSpace {
        &self.omega
    }

    pub fn theta(&self) -> &FiniteSpace {
        &self.theta
    }

    pub fn kernel(&self) -> &[(String, Measure)] {
        &self.kernel
    }

    pub fn priors(&self) -> &[(String, Measure)] {
        &self.priors
    }

    /// The kernel as a finite-family hypothesis on `Ω`.
    pub fn kernel_family(&self) -> StatModel {
        StatModel::finite_family(self.kernel.clone()).expect("validated kernel")
    }

    /// The prior family as a finite-family hypothesis on `Θ`.
    pub fn prior_family(&self) -> StatModel {
        StatModel::finite_family(self.priors.clone()).expect("validated priors")
    }

    pub fn product_space(&self) -> Result<FiniteSpace> {
        FiniteSpace::product(&self.omega, &self.theta)
    }
}

/// The joint measure `T(ω,θ) = P_θ(ω) Q(θ)` on `Ω × Θ` (pairs ordered
/// ω-major).
pub fn joint_measure(kernel: &[(String, Measure)], prior: &Measure) -> Result<Measure> {
    let omega = kernel.first().ok_or(Error::EmptySpace)?.1.space().clone();
    let theta = FiniteSpace::new(kernel.iter().map(|(l, _)| l.clone()))?;
    if prior.space() != &theta {
        return Err(Error::SpaceMismatch);
    }
    let product = FiniteSpace::product(&omega, &theta)?;
    let mut weights = Vec::with_capacity(product.len());
    for i in 0..omega.len() {
        for (j, (_, p_theta)) in kernel.iter().enumerate() {
            weights.push(p_theta.weight(i).mul(prior.weight(j)));
        }
    }
    Measure::from_weights(product, weights)
}

/// The joint statistical model `(T_π | π ∈ Π)`.
pub fn joint(model: &ParaBayesModel) -> Result<Vec<(String, Measure)>> {
    model
        .priors
        .iter()
        .map(|(label, q)| joint_measure(&model.kernel, q).map(|t| (label.clone(), t)))
        .collect()
}

/// The marginal on the first factor: `Y(A) = T(A × Θ)`, i.e. the pushforward
/// of `T` under the first projection.
pub fn marginal(t: &Measure) -> Result<Measure> {
    let (omega, theta) = t.space().factors()?;
    let mut weights = vec![ExtReal::zero(); omega.len()];
    for (i, slot) in weights.iter_mut().enumerate() {
        for j in 0..theta.len() {
            let idx = t.space().pair_index(i, j)?;
            *slot = slot.add(t.weight(idx));
        }
    }
    Measure::from_weights(omega.clone(), weights)
}

/// The constructive factorization of a joint e-function candidate.
#[derive(Clone, Debug)]
pub struct Decomposition {
    /// `g(ω;θ) = f(ω,θ)/h(θ)` with `0/0 = 0`.
    pub g: ConditionalScoreFn,
    /// `h(θ) = ∫ f(ω,θ) P_θ(dω)`.
    pub h: ScoreFn,
    /// Certifies `g` against the kernel (conditional e-membership).
    pub g_verdict: Verdict,
    /// Certifies `h` against the prior family.
    pub h_verdict: Verdict,
    /// Pairs `(ω,θ)` where `h(θ) = 0` made the division conventions fire;
    /// the factorization carries no information there.
    pub off_support: Vec<String>,
    /// Whether `g·h = f` held exactly at every pair charged by some `T_π`.
    pub product_exact_on_support: bool,
    pub mode: Mode,
}

/// Splits `f` on `Ω × Θ` into `g(ω;θ)·h(θ)` and certifies both parts.
/// Runs regardless of whether `f` is actually in `E_T`; the verdicts report
/// the outcome.
pub fn decompose_e(
    f: &ScoreFn,
    model: &ParaBayesModel,
    policy: &NumericsPolicy,
) -> Result<Decomposition> {
    let product = model.product_space()?;
    if f.space() != &product {
        return Err(Error::SpaceMismatch);
    }
    let joint_f = ConditionalScoreFn::from_joint(f)?;
    let h_values: Vec<ExtReal> = model
        .kernel
        .iter()
        .enumerate()
        .map(|(j, (_, p_theta))| integrate(&joint_f.slice(j), p_theta))
        .collect::<Result<_>>()?;
    let h = ScoreFn::from_values(model.theta.clone(), h_values)?;

    let mut off_support = Vec::new();
    let mut g_rows = Vec::with_capacity(model.theta.len());
    for j in 0..model.theta.len() {
        let h_j = h.value(j);
        let mut row = Vec::with_capacity(model.omega.len());
        for i in 0..model.omega.len() {
            let v = joint_f.value(i, j);
            if h_j.is_zero() {
                off_support.push(crate::space::pair_label(
                    model.omega.label(i),
                    model.theta.label(j),
                ));
            }
            row.push(v.div(h_j));
        }
        g_rows.push(row);
    }
    let g = ConditionalScoreFn::from_slices(model.omega.clone(), model.theta.clone(), g_rows)?;

    let g_verdict = is_conditional_e(&g, &model.kernel_family())?;
    let h_verdict = is_e_function(&h, &model.prior_family(), policy)?;

    // Verify the product identity wherever some T_π puts positive mass.
    let joints = joint(model)?;
    let mut product_exact = true;
    'pairs: for i in 0..model.omega.len() {
        for j in 0..model.theta.len() {
            let idx = product.pair_index(i, j)?;
            let charged = joints.iter().any(|(_, t)| !t.weight(idx).is_zero());
            if charged {
                let recomposed = g.value(i, j).mul(h.value(j));
                if recomposed != *joint_f.value(i, j) {
                    product_exact = false;
                    break 'pairs;
                }
            }
        }
    }

    let mode = f.mode().combine(h.mode());
    Ok(Decomposition {
        g,
        h,
        g_verdict,
        h_verdict,
        off_support,
        product_exact_on_support: product_exact,
        mode,
    })
}

/// Multiplies a conditional score function by a prior-side score function
/// and re-verifies e-membership w.r.t. every joint `T_π` directly.
pub fn product_e(
    g: &ConditionalScoreFn,
    h: &ScoreFn,
    model: &ParaBayesModel,
) -> Result<(ScoreFn, Verdict)> {
    if g.outcome_space() != model.omega()
        || g.parameter_space() != model.theta()
        || h.space() != model.theta()
    {
        return Err(Error::SpaceMismatch);
    }
    let product = model.product_space()?;
    let mut values = Vec::with_capacity(product.len());
    for i in 0..model.omega.len() {
        for j in 0..model.theta.len() {
            values.push(g.value(i, j).mul(h.value(j)));
        }
    }
    let f = ScoreFn::from_values(product, values)?;
    let mut verdict = Verdict::accepted(f64::INFINITY, f.mode());
    for (label, t) in joint(model)? {
        let total = integrate(&f, &t)?;
        let v = if total <= ExtReal::one() {
            Verdict::accepted(1.0 - total.to_f64(), f.mode().combine(t.mode()))
        } else {
            Verdict::rejected(
                Witness {
                    parameter: Some(label),
                    outcome: None,
                    epsilon: None,
                    attained: total,
                    bound: ExtReal::one(),
                },
                f.mode().combine(t.mode()),
            )
        };
        verdict = verdict.combine(v);
        if verdict.is_rejected() {
            break;
        }
    }
    Ok((f, verdict))
}

fn project<F>(f: &ScoreFn, pick: F) -> Result<ScoreFn>
where
    F: Fn(ExtReal, ExtReal) -> ExtReal,
{
    let (omega, theta) = f.space().factors()?;
    let mut values = Vec::with_capacity(omega.len());
    for i in 0..omega.len() {
        let mut acc: Option<ExtReal> = None;
        for j in 0..theta.len() {
            let v = f.value(f.space().pair_index(i, j)?).clone();
            acc = Some(match acc {
                None => v,
                Some(a) => pick(a, v),
            });
        }
        values.push(acc.expect("nonempty theta"));
    }
    ScoreFn::from_values(omega.clone(), values)
}

/// `(inf-proj f)(ω) = min_θ f(ω,θ)`: maps joint e-functions to marginal
/// e-functions.
pub fn inf_project(f: &ScoreFn) -> Result<ScoreFn> {
    project(f, |a, b| if b < a { b } else { a })
}

/// `(sup-proj f)(ω) = max_θ f(ω,θ)`.
pub fn sup_project(f: &ScoreFn) -> Result<ScoreFn> {
    project(f, |a, b| if b > a { b } else { a })
}

/// Lifts a marginal function to the product space, constant in `θ`.
pub fn lift_to_joint(g: &ScoreFn, theta: &FiniteSpace) -> Result<ScoreFn> {
    let product = FiniteSpace::product(g.space(), theta)?;
    let mut values = Vec::with_capacity(product.len());
    for i in 0..g.space().len() {
        for _ in 0..theta.len() {
            values.push(g.value(i).clone());
        }
    }
    ScoreFn::from_values(product, values)
}
