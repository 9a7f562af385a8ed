//! Bernoulli sequences: IID vs exchangeability on `{0,1}^N`.
//!
//! The e-function classes in play:
//!
//! - `E_Bern` — w.r.t. the Bernoulli family `(B_p)` on `{0,1}^N`;
//! - `E_exch` — w.r.t. all exchangeable measures; equivalently, every
//!   per-level average `C(N,k)^{-1} Σ_{+ω=k} f(ω)` is at most 1;
//! - `E_bin` — w.r.t. the binomial family on `{0,…,N}`;
//! - `E_sin` — w.r.t. the uniform measures on the cells of the sin²-net
//!   partition of `{0,…,N}`.
//!
//! `E_Bern` factors exactly as `E_exch · E_bin` through the count of ones;
//! [`decompose_iid_e`] constructs the factorization and certifies both
//! parts. [`constant_search`] brackets, for a fixed `N`, the smallest `c`
//! with `E_sin ⊆ c·E_bin` (one-dimensional certified maximization) or
//! `E_bin ⊆ c·E_sin` (a semi-infinite LP solved by cutting planes).

use std::collections::HashMap;
use std::f64::consts::PI;

use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::{integrate, Measure};
use crate::num::{ExtReal, Mode};
use crate::score::ScoreFn;
use crate::simplex::{self, LinearProgram};
use crate::space::FiniteSpace;
use crate::testing::{self, ArgmaxHint, StatModel};
use crate::verdict::{NumericsPolicy, Verdict, Witness};

/// `+ω`: the number of 1s in a binary string.
pub fn count_ones(word: &str) -> Result<usize> {
    let mut count = 0;
    for c in word.chars() {
        match c {
            '1' => count += 1,
            '0' => {}
            _ => return Err(Error::InvalidAlphabet(word.to_string())),
        }
    }
    Ok(count)
}

fn check_parameter(p: &ExtReal) -> Result<()> {
    if p.is_infinite() || *p > ExtReal::one() {
        return Err(Error::InvalidParameter(format!("p = {p} outside [0,1]")));
    }
    Ok(())
}

/// The Bernoulli measure `B_p` on `{0,1}^N`: weight `p^{+ω}(1−p)^{N−+ω}`.
pub fn bernoulli_measure(n: usize, p: &ExtReal) -> Result<Measure> {
    check_parameter(p)?;
    let space = FiniteSpace::binary_strings(n)?;
    let weights = match p.to_rational() {
        Some(r) if p.is_exact() => {
            let q = BigRational::one() - &r;
            let pow_p = powers(&r, n);
            let pow_q = powers(&q, n);
            space
                .labels()
                .iter()
                .map(|w| {
                    let k = count_ones(w).expect("binary space");
                    ExtReal::Exact(&pow_p[k] * &pow_q[n - k])
                })
                .collect()
        }
        _ => {
            let pf = p.to_f64();
            space
                .labels()
                .iter()
                .map(|w| {
                    let k = count_ones(w).expect("binary space") as i32;
                    ExtReal::Float(pf.powi(k) * (1.0 - pf).powi(n as i32 - k))
                })
                .collect()
        }
    };
    Measure::from_weights(space, weights)
}

/// The binomial measure `bin_p` on `{0,…,N}`: weight `C(N,k) p^k (1−p)^{N−k}`.
pub fn binomial_measure(n: usize, p: &ExtReal) -> Result<Measure> {
    if n == 0 {
        return Err(Error::InvalidParameter(
            "binomial measure needs N >= 1".into(),
        ));
    }
    if n as u128 >= crate::space::ENUMERATION_BUDGET {
        return Err(Error::BudgetExceeded(n as u128));
    }
    check_parameter(p)?;
    let space = FiniteSpace::counts(n);
    let weights = match p.to_rational() {
        Some(r) if p.is_exact() => {
            let q = BigRational::one() - &r;
            let pow_p = powers(&r, n);
            let pow_q = powers(&q, n);
            (0..=n)
                .map(|k| {
                    let c = BigRational::from_integer(testing::binom_big(n, k));
                    ExtReal::Exact(c * &pow_p[k] * &pow_q[n - k])
                })
                .collect()
        }
        _ => {
            let pf = p.to_f64();
            (0..=n)
                .map(|k| ExtReal::Float(binom_pmf(n, k, pf)))
                .collect()
        }
    };
    Measure::from_weights(space, weights)
}

fn powers(x: &BigRational, n: usize) -> Vec<BigRational> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(BigRational::one());
    for _ in 0..n {
        out.push(out.last().expect("nonempty") * x);
    }
    out
}

pub(crate) fn binom_pmf(n: usize, k: usize, p: f64) -> f64 {
    testing::binom_f64(n, k) * p.powi(k as i32) * (1.0 - p).powi((n - k) as i32)
}

/// Per-level sums and sizes of a function on `{0,1}^N`.
fn level_data(f: &ScoreFn, n: usize) -> Result<Vec<(ExtReal, u128)>> {
    let space = FiniteSpace::binary_strings(n)?;
    if f.space() != &space {
        return Err(Error::SpaceMismatch);
    }
    let mut sums = vec![ExtReal::zero(); n + 1];
    for (i, v) in f.values().iter().enumerate() {
        let k = count_ones(f.space().label(i))?;
        sums[k] = sums[k].add(v);
    }
    Ok(sums
        .into_iter()
        .enumerate()
        .map(|(k, s)| (s, testing::binom_u128(n, k)))
        .collect())
}

/// Is `f` an e-function w.r.t. every exchangeable measure on `{0,1}^N`?
/// Equivalent to every per-level average being at most 1; the witness names
/// the violating count.
pub fn is_exch_e(f: &ScoreFn) -> Result<Verdict> {
    let n = f
        .space()
        .labels()
        .first()
        .map(|l| l.len())
        .ok_or(Error::EmptySpace)?;
    let levels = level_data(f, n)?;
    let mut verdict = Verdict::accepted(f64::INFINITY, f.mode());
    for (k, (sum, size)) in levels.into_iter().enumerate() {
        let avg = sum.div(&ExtReal::from_int(size as u64));
        let v = if avg <= ExtReal::one() {
            Verdict::accepted(1.0 - avg.to_f64(), f.mode())
        } else {
            Verdict::rejected(
                Witness {
                    parameter: Some(format!("k={k}")),
                    outcome: None,
                    epsilon: None,
                    attained: avg,
                    bound: ExtReal::one(),
                },
                f.mode(),
            )
        };
        verdict = verdict.combine(v);
        if verdict.is_rejected() {
            break;
        }
    }
    Ok(verdict)
}

// ---------------------------------------------------------------------------
// sin² net and the count partition
// ---------------------------------------------------------------------------

/// Comparisons closer than this to a tie set the guard flag.
pub const TIE_GUARD: f64 = 1e-13;

/// The parameter net `p(a) = sin²(a N^{−1/2})`, `a = 1,…,N*−1`,
/// `N* = ⌊(π/2)√N⌋`.
#[derive(Clone, Debug)]
pub struct SinNet {
    pub n: usize,
    pub n_star: usize,
    pub points: Vec<f64>,
}

pub fn sin_net(n: usize) -> Result<SinNet> {
    if n < 2 {
        return Err(Error::NTooSmall(n));
    }
    if n as u128 >= crate::space::ENUMERATION_BUDGET {
        return Err(Error::BudgetExceeded(n as u128));
    }
    let sqrt_n = (n as f64).sqrt();
    let n_star = ((PI / 2.0) * sqrt_n).floor() as usize;
    let points: Vec<f64> = (1..n_star)
        .map(|a| (a as f64 / sqrt_n).sin().powi(2))
        .collect();
    debug_assert!(points.windows(2).all(|w| w[0] < w[1]));
    Ok(SinNet { n, n_star, points })
}

impl SinNet {
    /// Index into `points` of the estimate for count `k`: the largest net
    /// point ≤ k/N, falling back to the first point when none is. Also
    /// reports whether any comparison came within [`TIE_GUARD`] of a tie.
    pub fn estimate_index(&self, k: usize) -> Result<(usize, bool)> {
        if k > self.n {
            return Err(Error::OutOfRange { k, n: self.n });
        }
        let target = k as f64 / self.n as f64;
        let mut near_tie = false;
        let mut best = None;
        for (i, p) in self.points.iter().enumerate() {
            if (p - target).abs() <= TIE_GUARD {
                near_tie = true;
            }
            if *p <= target {
                best = Some(i);
            } else {
                break;
            }
        }
        Ok((best.unwrap_or(0), near_tie))
    }
}

/// The estimator value for count `k`: the chosen net point.
pub fn sin_estimator(n: usize, k: usize) -> Result<f64> {
    let net = sin_net(n)?;
    let (idx, _) = net.estimate_index(k)?;
    Ok(net.points[idx])
}

/// A partition of `{0,…,N}` into contiguous cells.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CellPartition {
    n: usize,
    /// Inclusive count ranges.
    cells: Vec<(usize, usize)>,
    cell_of: Vec<usize>,
    /// Set when building the partition involved a near-tie comparison.
    pub tie_guard: bool,
}

impl CellPartition {
    pub fn new(n: usize, cells: Vec<(usize, usize)>) -> Result<Self> {
        if cells.is_empty() {
            return Err(Error::EmptySpace);
        }
        let mut cell_of = Vec::with_capacity(n + 1);
        let mut expect = 0usize;
        for (i, (lo, hi)) in cells.iter().enumerate() {
            if *lo != expect || hi < lo {
                return Err(Error::InvalidParameter(format!(
                    "cells must be contiguous, disjoint, exhaustive; bad cell {lo}..={hi}"
                )));
            }
            for _ in *lo..=*hi {
                cell_of.push(i);
            }
            expect = hi + 1;
        }
        if expect != n + 1 {
            return Err(Error::InvalidParameter(format!(
                "cells cover 0..={} but the space is 0..={n}",
                expect - 1
            )));
        }
        Ok(CellPartition {
            n,
            cells,
            cell_of,
            tie_guard: false,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn cells(&self) -> &[(usize, usize)] {
        &self.cells
    }

    pub fn cell_of(&self, k: usize) -> usize {
        self.cell_of[k]
    }

    pub fn cell_size(&self, idx: usize) -> usize {
        let (lo, hi) = self.cells[idx];
        hi - lo + 1
    }

    /// The uniform measures `U` on each cell, as measures on `{0,…,N}`.
    pub fn cell_measures(&self) -> Vec<Measure> {
        let space = FiniteSpace::counts(self.n);
        self.cells
            .iter()
            .map(|(lo, hi)| {
                let size = (hi - lo + 1) as u64;
                let weights = (0..=self.n)
                    .map(|k| {
                        if k >= *lo && k <= *hi {
                            ExtReal::from_ratio(1, size)
                        } else {
                            ExtReal::zero()
                        }
                    })
                    .collect();
                Measure::from_weights(space.clone(), weights).expect("uniform cell weights")
            })
            .collect()
    }

    /// Average of `h` over cell `idx` (exact when `h` is exact).
    pub fn cell_average(&self, h: &ScoreFn, idx: usize) -> ExtReal {
        let (lo, hi) = self.cells[idx];
        let sum = ExtReal::sum(h.values()[lo..=hi].iter());
        sum.div(&ExtReal::from_int((hi - lo + 1) as u64))
    }

    pub fn max_cell_average(&self, h: &ScoreFn) -> (ExtReal, usize) {
        let mut best = (ExtReal::zero(), 0usize);
        for idx in 0..self.cells.len() {
            let avg = self.cell_average(h, idx);
            if idx == 0 || avg > best.0 {
                best = (avg, idx);
            }
        }
        best
    }
}

/// The partition of `{0,…,N}` into preimages of the sin²-net estimator;
/// cells are contiguous because the estimator is monotone in `k`.
pub fn sin_partition(n: usize) -> Result<CellPartition> {
    let net = sin_net(n)?;
    let mut cells: Vec<(usize, usize)> = Vec::new();
    let mut tie = false;
    let mut current: Option<(usize, usize, usize)> = None; // (net idx, lo, hi)
    for k in 0..=n {
        let (idx, near) = net.estimate_index(k)?;
        tie |= near;
        match current {
            Some((i, lo, _)) if i == idx => current = Some((i, lo, k)),
            Some((_, lo, hi)) => {
                cells.push((lo, hi));
                current = Some((idx, k, k));
            }
            None => current = Some((idx, k, k)),
        }
    }
    if let Some((_, lo, hi)) = current {
        cells.push((lo, hi));
    }
    let mut partition = CellPartition::new(n, cells)?;
    partition.tie_guard = tie;
    Ok(partition)
}

/// Is `h` an e-function w.r.t. the uniform measures on the sin²-partition
/// cells? Per-cell averages at most 1 (all `U_k` constraints for `k` in one
/// cell coincide).
pub fn is_sin_e(h: &ScoreFn) -> Result<Verdict> {
    let n = h.space().len().checked_sub(1).ok_or(Error::EmptySpace)?;
    let partition = sin_partition(n)?;
    if h.space() != &FiniteSpace::counts(n) {
        return Err(Error::SpaceMismatch);
    }
    let mut verdict = Verdict::accepted(f64::INFINITY, h.mode());
    for idx in 0..partition.cells().len() {
        let avg = partition.cell_average(h, idx);
        let v = if avg <= ExtReal::one() {
            Verdict::accepted(1.0 - avg.to_f64(), h.mode())
        } else {
            let (lo, hi) = partition.cells()[idx];
            Verdict::rejected(
                Witness {
                    parameter: Some(format!("cell {idx} = {lo}..={hi}")),
                    outcome: None,
                    epsilon: None,
                    attained: avg,
                    bound: ExtReal::one(),
                },
                h.mode(),
            )
        };
        verdict = verdict.combine(v);
        if verdict.is_rejected() {
            break;
        }
    }
    Ok(verdict)
}

// ---------------------------------------------------------------------------
// Configurations (multisets) and the IID decomposition
// ---------------------------------------------------------------------------

/// Para-Bayesian pieces of the configuration construction: `Θ` is the set of
/// multisets of size `N` over the alphabet, `P_θ` is uniform on the orderings
/// of `θ`, and each supplied IID parameter `π` yields the prior
/// `Q_π = conf_*(π^N)`.
#[derive(Clone, Debug)]
pub struct ConfigurationModel {
    pub alphabet: FiniteSpace,
    pub n: usize,
    /// `Ω = alphabet^N`.
    pub sequences: FiniteSpace,
    /// `Θ`: one label per multiset (counts `0..=N` for the binary alphabet).
    pub configurations: FiniteSpace,
    /// Outcome index → configuration index.
    pub conf_of: Vec<usize>,
    /// `P_θ`, indexed like `configurations`.
    pub kernel: Vec<Measure>,
    /// `(π label, Q_π)`.
    pub priors: Vec<(String, Measure)>,
    /// Whether the alphabet is exactly `{0,1}` (then `Θ ≅ {0,…,N}` and
    /// `Q_π = bin_p`).
    pub binary: bool,
}

/// Builds the configuration model. `iid_params` are measures on the alphabet;
/// each becomes a prior on configurations by pushing its `N`-fold product
/// forward along the configuration map.
pub fn configuration_model(
    alphabet: &FiniteSpace,
    n: usize,
    iid_params: &[(String, Measure)],
) -> Result<ConfigurationModel> {
    if alphabet.len() < 2 {
        return Err(Error::InvalidParameter(
            "alphabet needs at least 2 letters".into(),
        ));
    }
    for (_, pi) in iid_params {
        if pi.space() != alphabet {
            return Err(Error::SpaceMismatch);
        }
    }
    let binary = alphabet.labels() == ["0", "1"];
    let sequences = FiniteSpace::sequences(alphabet, n)?;

    // Index vector of each sequence, then its sorted multiset.
    let seq_indices: Vec<Vec<usize>> = sequences
        .labels()
        .iter()
        .map(|label| decode_sequence(label, alphabet, n))
        .collect::<Result<_>>()?;
    let mut config_index: HashMap<Vec<usize>, usize> = HashMap::new();
    let mut config_labels: Vec<String> = Vec::new();
    let mut class_members: Vec<Vec<usize>> = Vec::new();
    let mut conf_of = Vec::with_capacity(sequences.len());
    let multichar = alphabet.labels().iter().any(|l| l.chars().count() > 1);
    for (i, idx) in seq_indices.iter().enumerate() {
        let mut sorted = idx.clone();
        sorted.sort_unstable();
        let next = config_index.len();
        let slot = *config_index.entry(sorted.clone()).or_insert(next);
        if slot == config_labels.len() {
            let label = if binary {
                sorted.iter().sum::<usize>().to_string()
            } else {
                let parts: Vec<&str> = sorted.iter().map(|&j| alphabet.label(j)).collect();
                if multichar {
                    parts.join(",")
                } else {
                    parts.join("")
                }
            };
            config_labels.push(label);
            class_members.push(Vec::new());
        }
        class_members[slot].push(i);
        conf_of.push(slot);
    }
    // For the binary alphabet, order configurations by count.
    let configurations = if binary {
        FiniteSpace::counts(n)
    } else {
        FiniteSpace::new(config_labels.clone())?
    };
    let (conf_of, class_members) = if binary {
        let mut remap = vec![0usize; config_labels.len()];
        for (slot, label) in config_labels.iter().enumerate() {
            remap[slot] = label.parse::<usize>().expect("count label");
        }
        let mut members = vec![Vec::new(); n + 1];
        let mut new_conf = vec![0usize; conf_of.len()];
        for (i, slot) in conf_of.iter().enumerate() {
            new_conf[i] = remap[*slot];
            members[remap[*slot]].push(i);
        }
        (new_conf, members)
    } else {
        (conf_of, class_members)
    };

    let kernel: Vec<Measure> = class_members
        .iter()
        .map(|members| {
            let size = members.len() as u64;
            let mut weights = vec![ExtReal::zero(); sequences.len()];
            for &i in members {
                weights[i] = ExtReal::from_ratio(1, size);
            }
            Measure::from_weights(sequences.clone(), weights).expect("uniform class weights")
        })
        .collect();

    let priors: Vec<(String, Measure)> = iid_params
        .iter()
        .map(|(label, pi)| {
            let mut weights = vec![ExtReal::zero(); configurations.len()];
            for (i, idx) in seq_indices.iter().enumerate() {
                let prob = idx
                    .iter()
                    .fold(ExtReal::one(), |acc, &j| acc.mul(pi.weight(j)));
                weights[conf_of[i]] = weights[conf_of[i]].add(&prob);
            }
            Measure::from_weights(configurations.clone(), weights).map(|q| (label.clone(), q))
        })
        .collect::<Result<_>>()?;

    Ok(ConfigurationModel {
        alphabet: alphabet.clone(),
        n,
        sequences,
        configurations,
        conf_of,
        kernel,
        priors,
        binary,
    })
}

fn decode_sequence(label: &str, alphabet: &FiniteSpace, n: usize) -> Result<Vec<usize>> {
    // Sequence labels are the concatenation of letter labels; for
    // single-char alphabets decode per char, otherwise greedy longest match.
    let singles = alphabet.labels().iter().all(|l| l.chars().count() == 1);
    if singles {
        let out: Option<Vec<usize>> = label
            .chars()
            .map(|c| alphabet.position(&c.to_string()))
            .collect();
        let out = out.ok_or_else(|| Error::InvalidAlphabet(label.to_string()))?;
        if out.len() != n {
            return Err(Error::InvalidAlphabet(label.to_string()));
        }
        Ok(out)
    } else {
        let mut rest = label;
        let mut out = Vec::with_capacity(n);
        'outer: while !rest.is_empty() {
            let mut candidates: Vec<usize> = (0..alphabet.len()).collect();
            candidates.sort_by_key(|&i| std::cmp::Reverse(alphabet.label(i).len()));
            for i in candidates {
                if let Some(tail) = rest.strip_prefix(alphabet.label(i)) {
                    out.push(i);
                    rest = tail;
                    continue 'outer;
                }
            }
            return Err(Error::InvalidAlphabet(label.to_string()));
        }
        Ok(out)
    }
}

/// The factorization of an IID e-function candidate: `f = g · (h ∘ conf)`
/// with `g` exchangeable-certified and `h` certified against the
/// configuration priors (the full binomial family in the binary case).
#[derive(Clone, Debug)]
pub struct IidDecomposition {
    /// The exchangeable part, on the sequence space.
    pub g: ScoreFn,
    /// The configuration part, on `Θ`.
    pub h: ScoreFn,
    pub g_verdict: Verdict,
    pub h_verdict: Verdict,
    /// Whether `g(ω)·h(conf ω) = f(ω)` held exactly at every outcome.
    pub product_exact: bool,
    pub mode: Mode,
}

/// Decomposes `f` on `alphabet^N` as `g · (h ∘ conf)`: `h(θ) = ∫ f dP_θ`
/// (the class average), `g = f / (h ∘ conf)` with `0/0 = 0`.
pub fn decompose_iid_e(
    f: &ScoreFn,
    model: &ConfigurationModel,
    policy: &NumericsPolicy,
) -> Result<IidDecomposition> {
    if f.space() != &model.sequences {
        return Err(Error::SpaceMismatch);
    }
    let h_values: Vec<ExtReal> = model
        .kernel
        .iter()
        .map(|p_theta| integrate(f, p_theta))
        .collect::<Result<_>>()?;
    let h = ScoreFn::from_values(model.configurations.clone(), h_values)?;
    let g_values: Vec<ExtReal> = f
        .values()
        .iter()
        .enumerate()
        .map(|(i, v)| v.div(h.value(model.conf_of[i])))
        .collect();
    let g = ScoreFn::from_values(model.sequences.clone(), g_values)?;

    // g must average to at most 1 on every configuration class.
    let mut g_verdict = Verdict::accepted(f64::INFINITY, g.mode());
    for (theta, p_theta) in model.kernel.iter().enumerate() {
        let avg = integrate(&g, p_theta)?;
        let v = if avg <= ExtReal::one() {
            Verdict::accepted(1.0 - avg.to_f64(), g.mode())
        } else {
            Verdict::rejected(
                Witness {
                    parameter: Some(model.configurations.label(theta).to_string()),
                    outcome: None,
                    epsilon: None,
                    attained: avg,
                    bound: ExtReal::one(),
                },
                g.mode(),
            )
        };
        g_verdict = g_verdict.combine(v);
        if g_verdict.is_rejected() {
            break;
        }
    }

    let h_verdict = if model.binary {
        testing::is_e_function(&h, &StatModel::binomial(model.n)?, policy)?
    } else {
        if model.priors.is_empty() {
            return Err(Error::InvalidParameter(
                "certifying h over a non-binary alphabet needs configuration priors".into(),
            ));
        }
        let family = StatModel::finite_family(model.priors.clone())?;
        testing::is_e_function(&h, &family, policy)?
    };

    let product_exact = f
        .values()
        .iter()
        .enumerate()
        .all(|(i, v)| g.value(i).mul(h.value(model.conf_of[i])) == *v);

    let mode = f.mode().combine(h.mode()).combine(g.mode());
    Ok(IidDecomposition {
        g,
        h,
        g_verdict,
        h_verdict,
        product_exact,
        mode,
    })
}

/// Binary fast path: decomposes `f` on `{0,1}^N` through the count of ones
/// without materializing the configuration kernel.
pub fn decompose_bernoulli_e(
    f: &ScoreFn,
    n: usize,
    policy: &NumericsPolicy,
) -> Result<IidDecomposition> {
    let levels = level_data(f, n)?;
    let h_values: Vec<ExtReal> = levels
        .iter()
        .map(|(sum, size)| sum.div(&ExtReal::from_int(*size as u64)))
        .collect();
    let h = ScoreFn::from_values(FiniteSpace::counts(n), h_values)?;
    let g_values: Vec<ExtReal> = f
        .values()
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let k = count_ones(f.space().label(i)).expect("binary space");
            v.div(h.value(k))
        })
        .collect();
    let g = ScoreFn::from_values(f.space().clone(), g_values)?;
    let g_verdict = is_exch_e(&g)?;
    let h_verdict = testing::is_e_function(&h, &StatModel::binomial(n)?, policy)?;
    let product_exact = f.values().iter().enumerate().all(|(i, v)| {
        let k = count_ones(f.space().label(i)).expect("binary space");
        g.value(i).mul(h.value(k)) == *v
    });
    let mode = f.mode().combine(h.mode()).combine(g.mode());
    Ok(IidDecomposition {
        g,
        h,
        g_verdict,
        h_verdict,
        product_exact,
        mode,
    })
}

// ---------------------------------------------------------------------------
// Per-N constant search
// ---------------------------------------------------------------------------

/// Which inclusion the constant certifies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    /// Smallest `c` with `E_sin ⊆ c·E_bin`.
    SinIntoBin,
    /// Smallest `c` with `E_bin ⊆ c·E_sin`.
    BinIntoSin,
}

/// A certified interval `[lower, upper]` for the smallest constant in one
/// direction at fixed `N`, with a feasible witness attaining `lower`.
#[derive(Clone, Debug)]
pub struct ConstantBracket {
    pub n: usize,
    pub direction: Direction,
    pub lower: f64,
    pub upper: f64,
    /// A member of the source class whose target-class envelope (sin-into-
    /// bin) or maximal cell average (bin-into-sin) attains `lower`.
    pub witness: ScoreFn,
}

const SEARCH_NODE_CAP: usize = 500_000;
const CUTTING_PLANE_ROUNDS: usize = 200;

/// Brackets the smallest `c` for the requested direction at fixed `N`.
///
/// sin-into-bin reduces to the one-dimensional certified maximization of
/// `φ(p) = Σ_cells |A| · max_{j∈A} bin_p(j)` (a cell's budget goes to its
/// best count); `tol` is the absolute bracket width. bin-into-sin maximizes
/// each cell average over `E_bin` as a semi-infinite LP solved by cutting
/// planes: the grid-relaxed LP value upper-bounds the supremum and the final
/// certified-feasible optimizer is the lower-bound witness; iteration stops
/// once the optimizer's certified binomial envelope is ≤ `1 + tol`.
pub fn constant_search(
    n: usize,
    direction: Direction,
    tol: f64,
    threads: usize,
) -> Result<ConstantBracket> {
    if tol <= 0.0 {
        return Err(Error::InvalidParameter("tol must be positive".into()));
    }
    let partition = sin_partition(n)?;
    match direction {
        Direction::SinIntoBin => sin_into_bin(n, &partition, tol),
        Direction::BinIntoSin => bin_into_sin(n, &partition, tol, threads.max(1)),
    }
}

fn cell_objective(n: usize, cells: &[(usize, usize)], p: f64) -> f64 {
    cells
        .iter()
        .map(|&(lo, hi)| {
            let best = (lo..=hi).map(|j| binom_pmf(n, j, p)).fold(0.0f64, f64::max);
            (hi - lo + 1) as f64 * best
        })
        .sum()
}

/// Upper bound of the objective on `[lo, hi]`: each `bin_p(j)` is unimodal
/// with mode `j/N`, so its maximum over the interval sits at the clamped
/// mode.
fn cell_objective_upper(n: usize, cells: &[(usize, usize)], lo: f64, hi: f64) -> f64 {
    cells
        .iter()
        .map(|&(a, b)| {
            let best = (a..=b)
                .map(|j| binom_pmf(n, j, (j as f64 / n as f64).clamp(lo, hi)))
                .fold(0.0f64, f64::max);
            (b - a + 1) as f64 * best
        })
        .sum()
}

fn sin_into_bin(n: usize, partition: &CellPartition, tol: f64) -> Result<ConstantBracket> {
    use std::cmp::Ordering;
    use std::collections::BinaryHeap;

    struct Node {
        upper: f64,
        lo: f64,
        hi: f64,
    }
    impl PartialEq for Node {
        fn eq(&self, other: &Self) -> bool {
            self.upper == other.upper
        }
    }
    impl Eq for Node {}
    impl PartialOrd for Node {
        fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
            Some(self.cmp(other))
        }
    }
    impl Ord for Node {
        fn cmp(&self, other: &Self) -> Ordering {
            self.upper.partial_cmp(&other.upper).expect("finite")
        }
    }

    let cells = partition.cells();
    let mut best_lower = cell_objective(n, cells, 0.0);
    let mut best_arg = 0.0f64;
    for p in [1.0, 0.5] {
        let v = cell_objective(n, cells, p);
        if v > best_lower {
            best_lower = v;
            best_arg = p;
        }
    }
    let mut heap = BinaryHeap::new();
    heap.push(Node {
        upper: cell_objective_upper(n, cells, 0.0, 1.0),
        lo: 0.0,
        hi: 1.0,
    });
    let mut expansions = 0usize;
    let upper = loop {
        let Some(top) = heap.pop() else {
            break best_lower;
        };
        if top.upper - best_lower <= tol {
            break top.upper.max(best_lower);
        }
        if expansions >= SEARCH_NODE_CAP {
            return Err(Error::DidNotConverge(expansions));
        }
        expansions += 1;
        let mid = 0.5 * (top.lo + top.hi);
        let v = cell_objective(n, cells, mid);
        if v > best_lower {
            best_lower = v;
            best_arg = mid;
        }
        for (lo, hi) in [(top.lo, mid), (mid, top.hi)] {
            let u = cell_objective_upper(n, cells, lo, hi);
            if u > best_lower {
                heap.push(Node { upper: u, lo, hi });
            }
        }
    };
    // Witness: at the best p, each cell's full budget on its best count.
    let mut values = vec![ExtReal::zero(); n + 1];
    for &(lo, hi) in cells {
        let j_star = (lo..=hi)
            .max_by(|&a, &b| {
                binom_pmf(n, a, best_arg)
                    .partial_cmp(&binom_pmf(n, b, best_arg))
                    .expect("finite")
            })
            .expect("nonempty cell");
        values[j_star] = ExtReal::from_int((hi - lo + 1) as u64);
    }
    let witness = ScoreFn::from_values(FiniteSpace::counts(n), values)?;
    Ok(ConstantBracket {
        n,
        direction: Direction::SinIntoBin,
        lower: best_lower,
        upper,
        witness,
    })
}

struct CellOutcome {
    /// Grid-relaxed LP value: an upper bound for this cell's supremum.
    upper: f64,
    /// Max cell average of the certified-feasible witness.
    lower: f64,
    witness: Vec<f64>,
}

fn bin_into_sin(
    n: usize,
    partition: &CellPartition,
    tol: f64,
    threads: usize,
) -> Result<ConstantBracket> {
    let cells = partition.cells().to_vec();
    let outcomes: Vec<Result<CellOutcome>> = if threads <= 1 || cells.len() <= 1 {
        cells
            .iter()
            .map(|cell| best_cell_average(n, partition, *cell, tol))
            .collect()
    } else {
        // Cells are independent; spread them over at most `threads` workers.
        let chunk = cells.len().div_ceil(threads);
        std::thread::scope(|scope| {
            let handles: Vec<_> = cells
                .chunks(chunk)
                .map(|chunk| {
                    let partition = &*partition;
                    scope.spawn(move || {
                        chunk
                            .iter()
                            .map(|cell| best_cell_average(n, partition, *cell, tol))
                            .collect::<Vec<_>>()
                    })
                })
                .collect();
            handles
                .into_iter()
                .flat_map(|h| h.join().expect("no panic"))
                .collect()
        })
    };

    let space = FiniteSpace::counts(n);
    // h ≡ 1 is always feasible with max cell average exactly 1.
    let mut best_lower = 1.0f64;
    let mut best_witness = ScoreFn::constant(space.clone(), ExtReal::one());
    let mut upper = 1.0f64;
    for outcome in outcomes {
        let cell = outcome?;
        upper = upper.max(cell.upper);
        if cell.lower > best_lower {
            best_lower = cell.lower;
            let values = cell
                .witness
                .iter()
                .map(|&x| ExtReal::from_f64(x.max(0.0)))
                .collect::<Result<Vec<_>>>()?;
            best_witness = ScoreFn::from_values(space.clone(), values)?;
        }
    }
    Ok(ConstantBracket {
        n,
        direction: Direction::BinIntoSin,
        lower: best_lower,
        upper,
        witness: best_witness,
    })
}

/// Cutting-plane maximization of one cell's average over `E_bin`.
fn best_cell_average(
    n: usize,
    partition: &CellPartition,
    cell: (usize, usize),
    tol: f64,
) -> Result<CellOutcome> {
    let (lo, hi) = cell;
    let size = (hi - lo + 1) as f64;
    let mut objective = vec![0.0f64; n + 1];
    objective[lo..=hi].fill(1.0 / size);
    // Start with the endpoints, the center, and each in-cell mode: keeps the
    // first LP iterate bounded by moderate constraints.
    let mut grid: Vec<f64> = vec![0.0, 0.5, 1.0];
    for j in lo..=hi {
        grid.push(j as f64 / n as f64);
    }
    grid.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    grid.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
    let env_tol = (0.25 * tol).clamp(1e-12, 1e-4);
    let policy_space = FiniteSpace::counts(n);
    let model = StatModel::binomial(n)?;

    for _round in 0..CUTTING_PLANE_ROUNDS {
        let constraints: Vec<(Vec<f64>, f64)> = grid
            .iter()
            .map(|&p| ((0..=n).map(|k| binom_pmf(n, k, p)).collect(), 1.0))
            .collect();
        let lp = LinearProgram {
            objective: objective.clone(),
            constraints,
        };
        let sol = simplex::maximize(&lp)?;
        let h_star = ScoreFn::from_values(
            policy_space.clone(),
            sol.x
                .iter()
                .map(|&x| ExtReal::from_f64(x.max(0.0)))
                .collect::<Result<Vec<_>>>()?,
        )?;
        let env = testing::upper_envelope(&h_star, &model, env_tol)?;
        let env_upper = env.upper.to_f64();
        if env_upper <= 1.0 + tol {
            // Scale to certified feasibility, then report the best cell
            // average the scaled witness attains.
            let scale = env_upper.max(1.0);
            let witness: Vec<f64> = sol.x.iter().map(|&x| x.max(0.0) / scale).collect();
            let scaled = ScoreFn::from_values(
                policy_space.clone(),
                witness
                    .iter()
                    .map(|&x| ExtReal::from_f64(x))
                    .collect::<Result<Vec<_>>>()?,
            )?;
            let (max_avg, _) = partition.max_cell_average(&scaled);
            return Ok(CellOutcome {
                upper: sol.value,
                lower: max_avg.to_f64(),
                witness,
            });
        }
        let ArgmaxHint::Param(p_new) = env.argmax else {
            return Err(Error::InvalidParameter(
                "expected a parametric argmax".into(),
            ));
        };
        if grid.iter().any(|&g| (g - p_new).abs() < 1e-12) {
            // The violated point coincides with an enforced constraint: the
            // LP slack and the envelope disagree below tolerance.
            return Err(Error::DidNotConverge(_round + 1));
        }
        grid.push(p_new);
    }
    Err(Error::DidNotConverge(CUTTING_PLANE_ROUNDS))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::pushforward;

    #[test]
    fn count_ones_examples() {
        assert_eq!(count_ones("0110").unwrap(), 2);
        assert_eq!(count_ones("0000").unwrap(), 0);
        assert_eq!(count_ones("1111").unwrap(), 4);
        assert!(matches!(count_ones("01a"), Err(Error::InvalidAlphabet(_))));
    }

    #[test]
    fn bernoulli_measure_examples() {
        let half = bernoulli_measure(2, &ExtReal::from_ratio(1, 2)).unwrap();
        assert!(half
            .weights()
            .iter()
            .all(|w| *w == ExtReal::from_ratio(1, 4)));

        let degenerate = bernoulli_measure(2, &ExtReal::zero()).unwrap();
        assert_eq!(
            degenerate,
            Measure::point_mass(FiniteSpace::binary_strings(2).unwrap(), "00").unwrap()
        );

        let third = bernoulli_measure(2, &ExtReal::from_ratio(1, 3)).unwrap();
        assert_eq!(
            third.weights(),
            &[
                ExtReal::from_ratio(4, 9),
                ExtReal::from_ratio(2, 9),
                ExtReal::from_ratio(2, 9),
                ExtReal::from_ratio(1, 9)
            ]
        );
    }

    #[test]
    fn binomial_measure_examples() {
        let half = binomial_measure(2, &ExtReal::from_ratio(1, 2)).unwrap();
        assert_eq!(
            half.weights(),
            &[
                ExtReal::from_ratio(1, 4),
                ExtReal::from_ratio(1, 2),
                ExtReal::from_ratio(1, 4)
            ]
        );
        let degenerate = binomial_measure(4, &ExtReal::zero()).unwrap();
        assert_eq!(
            degenerate,
            Measure::point_mass(FiniteSpace::counts(4), "0").unwrap()
        );
        let third = binomial_measure(3, &ExtReal::from_ratio(1, 3)).unwrap();
        assert_eq!(
            third.weights(),
            &[
                ExtReal::from_ratio(8, 27),
                ExtReal::from_ratio(12, 27),
                ExtReal::from_ratio(6, 27),
                ExtReal::from_ratio(1, 27)
            ]
        );
    }

    #[test]
    fn binomial_is_pushforward_of_bernoulli() {
        for n in 1..=12 {
            for (num, den) in [(0u64, 1u64), (1, 3), (1, 2), (7, 9), (1, 1)] {
                let p = ExtReal::from_ratio(num, den);
                let bern = bernoulli_measure(n, &p).unwrap();
                let counts = FiniteSpace::counts(n);
                let pushed =
                    pushforward(&bern, &counts, |w| count_ones(w).unwrap().to_string()).unwrap();
                assert_eq!(
                    pushed,
                    binomial_measure(n, &p).unwrap(),
                    "n={n} p={num}/{den}"
                );
            }
        }
    }

    #[test]
    fn exchangeable_check_examples() {
        let space = FiniteSpace::binary_strings(2).unwrap();
        let ones = ScoreFn::constant(space.clone(), ExtReal::one());
        assert!(is_exch_e(&ones).unwrap().is_accepted());

        let ok = ScoreFn::from_values(
            space.clone(),
            vec![
                ExtReal::one(),
                ExtReal::from_int(2),
                ExtReal::zero(),
                ExtReal::one(),
            ],
        )
        .unwrap();
        assert!(is_exch_e(&ok).unwrap().is_accepted());

        let bad = ScoreFn::from_values(
            space,
            vec![
                ExtReal::one(),
                ExtReal::from_int(2),
                ExtReal::one(),
                ExtReal::one(),
            ],
        )
        .unwrap();
        let v = is_exch_e(&bad).unwrap();
        assert!(v.is_rejected());
        let w = v.witness.unwrap();
        assert_eq!(w.parameter.as_deref(), Some("k=1"));
        assert_eq!(w.attained, ExtReal::from_ratio(3, 2));
    }

    #[test]
    fn sin_net_values() {
        let net = sin_net(100).unwrap();
        assert_eq!(net.n_star, 15);
        assert_eq!(net.points.len(), 14);

        let net4 = sin_net(4).unwrap();
        assert_eq!(net4.n_star, 3);
        assert!((net4.points[0] - 0.22984884706593015).abs() < 1e-15);
        assert!((net4.points[1] - 0.7080734182735712).abs() < 1e-15);

        let net2 = sin_net(2).unwrap();
        assert_eq!(net2.n_star, 2);
        assert_eq!(net2.points.len(), 1);
        assert!((net2.points[0] - 0.4220281526173127).abs() < 1e-15);

        assert!(matches!(sin_net(1), Err(Error::NTooSmall(1))));
    }

    #[test]
    fn sin_estimator_values() {
        // k=0 has no net point below 0: the fallback returns p(1).
        assert!((sin_estimator(4, 0).unwrap() - 0.22984884706593015).abs() < 1e-15);
        assert!((sin_estimator(4, 2).unwrap() - 0.22984884706593015).abs() < 1e-15);
        assert!((sin_estimator(4, 3).unwrap() - 0.7080734182735712).abs() < 1e-15);
        assert!(matches!(
            sin_estimator(4, 5),
            Err(Error::OutOfRange { k: 5, n: 4 })
        ));
    }

    #[test]
    fn sin_partition_cells() {
        let part = sin_partition(4).unwrap();
        assert_eq!(part.cells(), &[(0, 2), (3, 4)]);

        // At N=2 every count maps to the single net point, giving one cell.
        let part2 = sin_partition(2).unwrap();
        assert_eq!(part2.cells(), &[(0, 2)]);

        for n in 2..=40 {
            let p = sin_partition(n).unwrap();
            let total: usize = p.cells().iter().map(|(lo, hi)| hi - lo + 1).sum();
            assert_eq!(total, n + 1, "exhaustive at n={n}");
        }
    }

    #[test]
    fn sin_membership_examples() {
        let space = FiniteSpace::counts(4);
        let ones = ScoreFn::constant(space.clone(), ExtReal::one());
        assert!(is_sin_e(&ones).unwrap().is_accepted());

        let ok = ScoreFn::from_values(
            space.clone(),
            vec![
                ExtReal::from_int(3),
                ExtReal::zero(),
                ExtReal::zero(),
                ExtReal::from_int(2),
                ExtReal::zero(),
            ],
        )
        .unwrap();
        assert!(is_sin_e(&ok).unwrap().is_accepted());

        let bad = ScoreFn::from_values(
            space,
            vec![
                ExtReal::from_int(4),
                ExtReal::zero(),
                ExtReal::zero(),
                ExtReal::zero(),
                ExtReal::zero(),
            ],
        )
        .unwrap();
        let v = is_sin_e(&bad).unwrap();
        assert!(v.is_rejected());
        assert_eq!(v.witness.unwrap().attained, ExtReal::from_ratio(4, 3));
    }

    #[test]
    fn configuration_model_binary() {
        let alphabet = FiniteSpace::new(["0", "1"]).unwrap();
        let model = configuration_model(&alphabet, 2, &[]).unwrap();
        assert!(model.binary);
        assert_eq!(model.configurations.labels(), ["0", "1", "2"]);
        // P_1 is uniform on {01, 10}.
        let p1 = &model.kernel[1];
        assert_eq!(p1.weight(1), &ExtReal::from_ratio(1, 2));
        assert_eq!(p1.weight(2), &ExtReal::from_ratio(1, 2));
        assert!(p1.weight(0).is_zero() && p1.weight(3).is_zero());
    }

    #[test]
    fn configuration_model_ternary() {
        let alphabet = FiniteSpace::new(["a", "b", "c"]).unwrap();
        let model = configuration_model(&alphabet, 2, &[]).unwrap();
        assert_eq!(model.configurations.len(), 6);
        let ab = model.configurations.position("ab").unwrap();
        let p_ab = &model.kernel[ab];
        let seq = &model.sequences;
        assert_eq!(
            p_ab.weight(seq.position("ab").unwrap()),
            &ExtReal::from_ratio(1, 2)
        );
        assert_eq!(
            p_ab.weight(seq.position("ba").unwrap()),
            &ExtReal::from_ratio(1, 2)
        );
    }

    #[test]
    fn configuration_prior_is_binomial() {
        let alphabet = FiniteSpace::new(["0", "1"]).unwrap();
        let pi = Measure::uniform(alphabet.clone());
        let model = configuration_model(&alphabet, 3, &[("pi".into(), pi)]).unwrap();
        let q = &model.priors[0].1;
        assert_eq!(
            q.weights(),
            binomial_measure(3, &ExtReal::from_ratio(1, 2))
                .unwrap()
                .weights()
        );
    }

    fn fn_on_strings(n: usize, entries: &[(&str, ExtReal)]) -> ScoreFn {
        let space = FiniteSpace::binary_strings(n).unwrap();
        let mut values = vec![ExtReal::zero(); space.len()];
        for (label, v) in entries {
            values[space.position(label).unwrap()] = v.clone();
        }
        ScoreFn::from_values(space, values).unwrap()
    }

    #[test]
    fn decompose_constant_one() {
        let space = FiniteSpace::binary_strings(2).unwrap();
        let f = ScoreFn::constant(space, ExtReal::one());
        let d = decompose_bernoulli_e(&f, 2, &NumericsPolicy::default()).unwrap();
        assert!(d.g_verdict.is_accepted());
        assert!(d.h_verdict.is_accepted());
        assert!(d.product_exact);
        assert!(d.g.values().iter().all(|v| *v == ExtReal::one()));
        assert!(d.h.values().iter().all(|v| *v == ExtReal::one()));
    }

    #[test]
    fn decompose_accepted_indicator() {
        // f = 2·1{01}: h = (0, 1, 0) with envelope 1/2; g = {01: 2} exchangeable.
        let f = fn_on_strings(2, &[("01", ExtReal::from_int(2))]);
        let d = decompose_bernoulli_e(&f, 2, &NumericsPolicy::default()).unwrap();
        assert_eq!(
            d.h.values(),
            &[ExtReal::zero(), ExtReal::one(), ExtReal::zero()]
        );
        assert!(d.h_verdict.is_accepted());
        assert!(d.g_verdict.is_accepted());
        assert!(d.product_exact);
        assert_eq!(d.g.value(1), &ExtReal::from_int(2));
        assert!(d.g.value(2).is_zero());
    }

    #[test]
    fn decompose_rejected_h() {
        // f = {00:2, 01:1, 10:1, 11:0}: h = (2, 1, 0) has envelope 2 at p=0;
        // g ≡ 1 on the support stays exchangeable.
        let f = fn_on_strings(
            2,
            &[
                ("00", ExtReal::from_int(2)),
                ("01", ExtReal::one()),
                ("10", ExtReal::one()),
            ],
        );
        let d = decompose_bernoulli_e(&f, 2, &NumericsPolicy::default()).unwrap();
        assert_eq!(
            d.h.values(),
            &[ExtReal::from_int(2), ExtReal::one(), ExtReal::zero()]
        );
        assert!(d.h_verdict.is_rejected());
        assert_eq!(
            d.h_verdict.clone().witness.unwrap().parameter.as_deref(),
            Some("p=0")
        );
        assert!(d.g_verdict.is_accepted());
        assert!(d.product_exact);
    }

    #[test]
    fn decompose_via_configuration_model_matches_fast_path() {
        let alphabet = FiniteSpace::new(["0", "1"]).unwrap();
        let model = configuration_model(&alphabet, 2, &[]).unwrap();
        let f = fn_on_strings(2, &[("01", ExtReal::from_int(2))]);
        let a = decompose_iid_e(&f, &model, &NumericsPolicy::default()).unwrap();
        let b = decompose_bernoulli_e(&f, 2, &NumericsPolicy::default()).unwrap();
        assert_eq!(a.h.values(), b.h.values());
        assert_eq!(a.g.values(), b.g.values());
        assert_eq!(a.h_verdict.decision, b.h_verdict.decision);
    }

    #[test]
    fn constant_search_sin_into_bin_n4() {
        let bracket = constant_search(4, Direction::SinIntoBin, 1e-6, 1).unwrap();
        assert!(bracket.lower <= 3.0 + 1e-12 && 3.0 <= bracket.upper + 1e-12);
        assert!(bracket.upper - bracket.lower <= 1e-6);
        // Witness attains the lower bound: its binomial envelope is at least
        // the objective value at the argmax.
        let env = testing::upper_envelope(&bracket.witness, &StatModel::binomial(4).unwrap(), 1e-9)
            .unwrap();
        assert!(env.upper.to_f64() >= bracket.lower - 1e-9);
    }

    #[test]
    fn constant_search_bin_into_sin_n4() {
        let bracket = constant_search(4, Direction::BinIntoSin, 1e-6, 1).unwrap();
        assert!(
            bracket.lower >= 32.0 / 27.0 - 1e-9,
            "lower = {}",
            bracket.lower
        );
        assert!(bracket.lower <= bracket.upper + 1e-12);
        // The witness is certified feasible and attains the lower bound.
        let env = testing::upper_envelope(&bracket.witness, &StatModel::binomial(4).unwrap(), 1e-9)
            .unwrap();
        assert!(env.upper.to_f64() <= 1.0 + 1e-6);
        let part = sin_partition(4).unwrap();
        let (avg, _) = part.max_cell_average(&bracket.witness);
        assert!((avg.to_f64() - bracket.lower).abs() <= 1e-9);
    }

    #[test]
    fn stated_single_point_witness_n4() {
        // h supported on k=3 with h(3) = 64/27: binomial envelope
        // sup_p 4p³(1−p)·64/27 = 1 (max of p³(1−p) is 27/256 at p = 3/4),
        // and its cell {3,4} average is 32/27.
        let space = FiniteSpace::counts(4);
        let mut values = vec![ExtReal::zero(); 5];
        values[3] = ExtReal::from_ratio(64, 27);
        let h = ScoreFn::from_values(space, values).unwrap();
        let env = testing::upper_envelope(&h, &StatModel::binomial(4).unwrap(), 1e-12).unwrap();
        assert!((env.upper.to_f64() - 1.0).abs() <= 1e-9);
        let part = sin_partition(4).unwrap();
        let (avg, idx) = part.max_cell_average(&h);
        assert_eq!(idx, 1);
        assert_eq!(avg, ExtReal::from_ratio(32, 27));
    }

    #[test]
    fn constant_brackets_at_least_one() {
        for n in [2usize, 3, 5, 8] {
            for dir in [Direction::SinIntoBin, Direction::BinIntoSin] {
                let b = constant_search(n, dir, 1e-3, 1).unwrap();
                assert!(b.lower >= 1.0 - 1e-12, "n={n} {dir:?}: lower {}", b.lower);
                assert!(b.lower <= b.upper + 1e-12, "n={n} {dir:?}");
            }
        }
    }

    #[test]
    fn threads_agree_with_sequential() {
        let a = constant_search(8, Direction::BinIntoSin, 1e-4, 1).unwrap();
        let b = constant_search(8, Direction::BinIntoSin, 1e-4, 4).unwrap();
        assert_eq!(a.lower, b.lower);
        assert_eq!(a.upper, b.upper);
    }
}
