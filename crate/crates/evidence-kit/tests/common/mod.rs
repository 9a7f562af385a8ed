#![allow(dead_code)] // each suite uses a different subset of these helpers

//! Shared generators for the randomized suites: exact-rational measures,
//! e-functions normalized by their certified envelopes, and p-functions
//! built from tail statistics.

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::rngs::SmallRng;
use rand::Rng;

use evidence_kit::bayes::ParaBayesModel;
use evidence_kit::measure::{integrate, Measure};
use evidence_kit::num::ExtReal;
use evidence_kit::score::ScoreFn;
use evidence_kit::space::FiniteSpace;
use evidence_kit::testing::{p_from_statistic, upper_envelope, StatModel};

pub const DENOM: u64 = 1 << 20;

pub fn ratio(num: u64, den: u64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// A strictly positive random exact value.
pub fn random_positive(rng: &mut SmallRng, max_num: u64) -> ExtReal {
    ExtReal::Exact(ratio(rng.random_range(1..=max_num), DENOM))
}

/// A random exact measure with strictly positive weights.
pub fn random_measure(rng: &mut SmallRng, space: &FiniteSpace) -> Measure {
    let nums: Vec<u64> = (0..space.len())
        .map(|_| rng.random_range(1..=DENOM))
        .collect();
    let total: u64 = nums.iter().sum();
    let weights = nums
        .iter()
        .map(|&n| ExtReal::Exact(ratio(n, 1) / ratio(total, 1)))
        .collect();
    Measure::from_weights(space.clone(), weights).expect("normalized weights")
}

/// A random exact measure that may put zero mass on some outcomes.
pub fn random_sparse_measure(rng: &mut SmallRng, space: &FiniteSpace) -> Measure {
    let mut nums: Vec<u64> = (0..space.len())
        .map(|_| {
            if rng.random_range(0..4) == 0 {
                0
            } else {
                rng.random_range(1..=DENOM)
            }
        })
        .collect();
    if nums.iter().all(|&n| n == 0) {
        nums[rng.random_range(0..space.len())] = 1;
    }
    let total: u64 = nums.iter().sum();
    let weights = nums
        .iter()
        .map(|&n| ExtReal::Exact(ratio(n, 1) / ratio(total, 1)))
        .collect();
    Measure::from_weights(space.clone(), weights).expect("normalized weights")
}

/// A strictly positive random function on the space.
pub fn random_positive_fn(rng: &mut SmallRng, space: &FiniteSpace) -> ScoreFn {
    let values = (0..space.len())
        .map(|_| random_positive(rng, DENOM))
        .collect();
    ScoreFn::from_values(space.clone(), values).expect("sized values")
}

/// Normalizes `f` into an exact e-function for the finite family: divides by
/// the exact maximum of the member integrals.
pub fn normalize_to_family_e(f: &ScoreFn, members: &[(String, Measure)]) -> ScoreFn {
    let max = members
        .iter()
        .map(|(_, m)| integrate(f, m).expect("shared space"))
        .max()
        .expect("nonempty family");
    assert!(!max.is_zero(), "normalizing a zero function");
    f.scale_down(&max)
}

/// Normalizes `f` into an exact member of the Bernoulli/binomial class with
/// a 2^-30 safety margin: divides by the certified envelope upper bound
/// (rationalized) times (1 + 2^-30).
pub fn normalize_to_parametric_e(f: &ScoreFn, model: &StatModel) -> ScoreFn {
    let env = upper_envelope(f, model, 1e-9).expect("finite envelope");
    let upper = env.upper.to_rational().expect("finite upper bound");
    assert!(upper > BigRational::new(0.into(), 1.into()));
    let margin = BigRational::new(1.into(), BigInt::from(1u64 << 30));
    let scale = upper * (BigRational::new(1.into(), 1.into()) + margin);
    f.scale_down(&ExtReal::Exact(scale))
}

/// An exact p-function w.r.t. a single measure, from a random statistic.
pub fn random_p_function(rng: &mut SmallRng, mu: &Measure) -> ScoreFn {
    let statistic = random_positive_fn(rng, mu.space());
    p_from_statistic(&statistic, mu).expect("shared space")
}

/// An exact p-function w.r.t. a finite family: the pointwise maximum of the
/// per-member tail p-functions (each member check only gets easier).
pub fn random_family_p_function(rng: &mut SmallRng, members: &[(String, Measure)]) -> ScoreFn {
    let statistic = random_positive_fn(rng, members[0].1.space());
    let mut values: Vec<ExtReal> = vec![ExtReal::zero(); statistic.space().len()];
    for (_, mu) in members {
        let p = p_from_statistic(&statistic, mu).expect("shared space");
        for (slot, v) in values.iter_mut().zip(p.values()) {
            if v > slot {
                *slot = v.clone();
            }
        }
    }
    ScoreFn::from_values(statistic.space().clone(), values).expect("sized values")
}

/// A random para-Bayesian model with exact measures.
pub fn random_para_bayes(
    rng: &mut SmallRng,
    omega_size: usize,
    theta_size: usize,
    pi_size: usize,
) -> ParaBayesModel {
    let omega = FiniteSpace::new((0..omega_size).map(|i| format!("w{i}"))).expect("labels");
    let kernel: Vec<(String, Measure)> = (0..theta_size)
        .map(|j| (format!("t{j}"), random_sparse_measure(rng, &omega)))
        .collect();
    let theta = FiniteSpace::new(kernel.iter().map(|(l, _)| l.clone())).expect("labels");
    let priors: Vec<(String, Measure)> = (0..pi_size)
        .map(|k| (format!("pi{k}"), random_sparse_measure(rng, &theta)))
        .collect();
    ParaBayesModel::new(kernel, priors).expect("validated model")
}

/// The `N`-fold product `π^N` as a measure on a sequence space whose labels
/// concatenate single-char alphabet labels.
pub fn iid_power_measure(pi: &Measure, sequences: &FiniteSpace) -> Measure {
    let alphabet = pi.space();
    let weights = sequences
        .labels()
        .iter()
        .map(|label| {
            label.chars().fold(ExtReal::one(), |acc, c| {
                let idx = alphabet
                    .position(&c.to_string())
                    .expect("sequence letter in alphabet");
                acc.mul(pi.weight(idx))
            })
        })
        .collect();
    Measure::from_weights(sequences.clone(), weights).expect("product weights")
}
