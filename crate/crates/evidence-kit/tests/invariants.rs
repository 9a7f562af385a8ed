//! Module invariants: oracle equality of the membership checks against
//! exhaustive evaluation, envelope certification against sampled values,
//! bracket ordering across N, and the class-consistency of the per-N
//! constants.

mod common;

use num_rational::BigRational;
use num_traits::Zero;
use proptest::prelude::*;
use rand::rngs::SmallRng;
use rand::{Rng, SeedableRng};

use common::*;
use evidence_kit::bernoulli::{binomial_measure, constant_search, sin_partition, Direction};
use evidence_kit::measure::{integrate, pushforward, Measure};
use evidence_kit::num::ExtReal;
use evidence_kit::score::ScoreFn;
use evidence_kit::space::FiniteSpace;
use evidence_kit::testing::{is_e_function, is_p_function, upper_envelope, StatModel};
use evidence_kit::verdict::NumericsPolicy;

/// Direct exhaustive e-membership: every member integral at most 1.
fn oracle_is_e(f: &ScoreFn, members: &[(String, Measure)]) -> bool {
    members.iter().all(|(_, m)| {
        let mut total = BigRational::zero();
        for (i, v) in f.values().iter().enumerate() {
            let w = m.weight(i).to_rational().expect("finite weight");
            if w.is_zero() {
                continue;
            }
            total += v.to_rational().expect("finite value") * w;
        }
        total <= BigRational::new(1.into(), 1.into())
    })
}

/// Direct exhaustive p-membership: every tail constraint at every value.
fn oracle_is_p(f: &ScoreFn, members: &[(String, Measure)]) -> bool {
    for v in f.distinct_values() {
        let v_rat = v.to_rational().expect("p-values are finite");
        for (_, m) in members {
            let mut mass = BigRational::zero();
            for (i, x) in f.values().iter().enumerate() {
                if *x <= v {
                    mass += m.weight(i).to_rational().expect("finite weight");
                }
            }
            if mass > v_rat {
                return false;
            }
        }
    }
    true
}

#[test]
fn membership_checks_agree_with_exhaustive_oracle() {
    let mut rng = SmallRng::seed_from_u64(0x1111);
    let exact = NumericsPolicy::exact();
    for trial in 0..100 {
        let size = rng.random_range(2..=10usize);
        let count = rng.random_range(1..=5usize);
        let space = FiniteSpace::new((0..size).map(|i| format!("o{i}"))).unwrap();
        let members: Vec<(String, Measure)> = (0..count)
            .map(|j| (format!("P{j}"), random_sparse_measure(&mut rng, &space)))
            .collect();
        let model = StatModel::finite_family(members.clone()).unwrap();

        // Members, scaled members (borderline), and clear non-members.
        let base = normalize_to_family_e(&random_positive_fn(&mut rng, &space), &members);
        let scaled_up = base.map(|v| v.mul(&ExtReal::from_ratio(21, 20)));
        for f in [&base, &scaled_up] {
            let verdict = is_e_function(f, &model, &exact).unwrap();
            assert_eq!(
                verdict.is_accepted(),
                oracle_is_e(f, &members),
                "trial {trial}: e-membership disagrees with the oracle"
            );
        }

        let p_ok = random_family_p_function(&mut rng, &members);
        // Shrinking a p-function can break it; either way the check must
        // match the oracle.
        let p_shrunk = p_ok.map(|v| v.mul(&ExtReal::from_ratio(4, 5)));
        for f in [&p_ok, &p_shrunk] {
            let verdict = is_p_function(f, &model, &exact).unwrap();
            assert_eq!(
                verdict.is_accepted(),
                oracle_is_p(f, &members),
                "trial {trial}: p-membership disagrees with the oracle"
            );
        }
    }
}

#[test]
fn constant_brackets_ordered_for_all_n() {
    for n in 2..=64usize {
        for direction in [Direction::SinIntoBin, Direction::BinIntoSin] {
            let b = constant_search(n, direction, 0.05, 2).unwrap();
            assert!(
                1.0 - 1e-12 <= b.lower && b.lower <= b.upper + 1e-12,
                "n={n} {direction:?}: [{}, {}]",
                b.lower,
                b.upper
            );
        }
    }
}

#[test]
fn per_n_constants_bound_the_classes() {
    let mut rng = SmallRng::seed_from_u64(0x2222);
    for n in [4usize, 8, 16] {
        let partition = sin_partition(n).unwrap();
        let c_sin_to_bin = constant_search(n, Direction::SinIntoBin, 1e-6, 1)
            .unwrap()
            .upper;
        let c_bin_to_sin = constant_search(n, Direction::BinIntoSin, 1e-6, 1)
            .unwrap()
            .upper;
        let counts = FiniteSpace::counts(n);
        let bin_model = StatModel::binomial(n).unwrap();
        for _ in 0..50 {
            // h ∈ E_sin by per-cell normalization: its binomial envelope is
            // bounded by the sin-into-bin constant.
            let raw = random_positive_fn(&mut rng, &counts);
            let h_sin = ScoreFn::from_values(
                counts.clone(),
                raw.values()
                    .iter()
                    .enumerate()
                    .map(|(k, v)| {
                        let avg = partition.cell_average(&raw, partition.cell_of(k));
                        v.div(&avg)
                    })
                    .collect(),
            )
            .unwrap();
            let env = upper_envelope(&h_sin, &bin_model, 1e-9).unwrap();
            assert!(
                env.upper.to_f64() <= c_sin_to_bin + 1e-6,
                "n={n}: sin member has binomial envelope {} > {}",
                env.upper.to_f64(),
                c_sin_to_bin
            );

            // h ∈ E_bin by envelope normalization: its maximal cell average
            // is bounded by the bin-into-sin constant.
            let h_bin =
                normalize_to_parametric_e(&random_positive_fn(&mut rng, &counts), &bin_model);
            let (avg, _) = partition.max_cell_average(&h_bin);
            assert!(
                avg.to_f64() <= c_bin_to_sin + 1e-6,
                "n={n}: binomial member has cell average {} > {}",
                avg.to_f64(),
                c_bin_to_sin
            );
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn integrate_is_linear_and_monotone(
        nums_f in prop::collection::vec(0u64..1000, 4),
        nums_g in prop::collection::vec(0u64..1000, 4),
        nums_w in prop::collection::vec(1u64..1000, 4),
        scale in 1u64..20,
    ) {
        let space = FiniteSpace::new(["a", "b", "c", "d"]).unwrap();
        let total: u64 = nums_w.iter().sum();
        let mu = Measure::from_weights(
            space.clone(),
            nums_w.iter().map(|&n| ExtReal::Exact(ratio(n, 1) / ratio(total, 1))).collect(),
        ).unwrap();
        let f = ScoreFn::from_values(
            space.clone(),
            nums_f.iter().map(|&n| ExtReal::Exact(ratio(n, DENOM))).collect(),
        ).unwrap();
        let g = ScoreFn::from_values(
            space.clone(),
            nums_g.iter().map(|&n| ExtReal::Exact(ratio(n, DENOM))).collect(),
        ).unwrap();

        // Linearity: ∫(s·f + g) = s·∫f + ∫g, exactly.
        let s = ExtReal::from_int(scale);
        let combo = ScoreFn::from_values(
            space.clone(),
            f.values().iter().zip(g.values()).map(|(a, b)| a.mul(&s).add(b)).collect(),
        ).unwrap();
        let lhs = integrate(&combo, &mu).unwrap();
        let rhs = integrate(&f, &mu).unwrap().mul(&s).add(&integrate(&g, &mu).unwrap());
        prop_assert_eq!(lhs, rhs);

        // Monotonicity: f ≤ f + g pointwise, so the integrals are ordered.
        let sum_fg = ScoreFn::from_values(
            space,
            f.values().iter().zip(g.values()).map(|(a, b)| a.add(b)).collect(),
        ).unwrap();
        prop_assert!(integrate(&f, &mu).unwrap() <= integrate(&sum_fg, &mu).unwrap());
    }

    #[test]
    fn pushforward_preserves_mass(
        nums_w in prop::collection::vec(1u64..1000, 6),
        targets in prop::collection::vec(0usize..3, 6),
    ) {
        let space = FiniteSpace::new((0..6).map(|i| format!("s{i}"))).unwrap();
        let total: u64 = nums_w.iter().sum();
        let mu = Measure::from_weights(
            space.clone(),
            nums_w.iter().map(|&n| ExtReal::Exact(ratio(n, 1) / ratio(total, 1))).collect(),
        ).unwrap();
        let image = FiniteSpace::new(["x", "y", "z"]).unwrap();
        let labels = ["x", "y", "z"];
        let pushed = pushforward(&mu, &image, |l| {
            let idx = space.position(l).unwrap();
            labels[targets[idx]].to_string()
        }).unwrap();
        let mass = ExtReal::sum(pushed.weights().iter());
        prop_assert_eq!(mass, ExtReal::one());
    }

    #[test]
    fn envelope_bracket_contains_sampled_polynomial_values(
        n in 2usize..8,
        seed in 0u64..1000,
    ) {
        let mut rng = SmallRng::seed_from_u64(seed);
        let counts = FiniteSpace::counts(n);
        let values: Vec<ExtReal> = (0..=n)
            .map(|_| ExtReal::Float(rng.random_range(0.0..5.0f64)))
            .collect();
        let h = ScoreFn::from_values(counts, values).unwrap();
        let model = StatModel::binomial(n).unwrap();
        let env = upper_envelope(&h, &model, 1e-10).unwrap();
        for grid in 0..=2000usize {
            let p = ExtReal::Float(grid as f64 / 2000.0);
            let p = p.to_f64();
            let mu = binomial_measure(n, &ExtReal::Float(p)).unwrap();
            let value = integrate(&h, &mu).unwrap().to_f64();
            prop_assert!(value <= env.upper.to_f64() + 1e-9);
        }
    }
}
