//! Certified global maximization of polynomials in Bernstein form on `[0,1]`.
//!
//! A polynomial `q(p) = Σ_k c_k B_{k,n}(p)` with Bernstein coefficients `c_k`
//! satisfies `min_k c_k ≤ q(p) ≤ max_k c_k` on the interval, and de Casteljau
//! subdivision at the midpoint produces the coefficients of both halves. The
//! maximizer runs branch-and-bound: a priority queue ordered by per-interval
//! coefficient maxima, global lower bound from point evaluations, terminating
//! when `upper − lower ≤ tol`. Subdivision is capped at
//! [`SUBDIVISION_CAP`]; hitting the cap yields an uncertified (but still
//! valid) bracket.
//!
//! Two scalar backends: binary64 for speed, exact `BigRational` for
//! exact-mode membership decisions (midpoint subdivision only divides by 2,
//! so denominators stay `2^depth` times the input denominators).

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_rational::BigRational;
use num_traits::{One, Zero};

/// Hard cap on subdivisions before a bracket is reported uncertified.
pub const SUBDIVISION_CAP: usize = 100_000;

/// Certified bracket for `sup_{p∈[0,1]} q(p)`.
#[derive(Clone, Debug)]
pub struct MaxBracket {
    pub lower: f64,
    pub upper: f64,
    /// A point where the lower bound is attained.
    pub argmax: f64,
    /// Whether `upper − lower ≤ tol` was reached within the cap.
    pub certified: bool,
    pub subdivisions: usize,
}

struct Node {
    upper: f64,
    lo: f64,
    hi: f64,
    coeffs: Vec<f64>,
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
        self.upper.partial_cmp(&other.upper).expect("finite bounds")
    }
}

fn max_coeff(coeffs: &[f64]) -> f64 {
    coeffs.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

/// Splits Bernstein coefficients at the midpoint; returns (left, right,
/// value at the split point).
fn decasteljau_split(coeffs: &[f64]) -> (Vec<f64>, Vec<f64>, f64) {
    let n = coeffs.len();
    let mut work = coeffs.to_vec();
    let mut left = Vec::with_capacity(n);
    let mut right = vec![0.0; n];
    for level in 0..n {
        left.push(work[0]);
        right[n - 1 - level] = work[n - 1 - level];
        for i in 0..n - 1 - level {
            work[i] = 0.5 * (work[i] + work[i + 1]);
        }
    }
    let mid_value = left[n - 1];
    (left, right, mid_value)
}

/// Certified maximum of the polynomial with Bernstein coefficients `coeffs`
/// over `[0,1]`, to absolute tolerance `tol`.
pub fn max_on_unit_interval(coeffs: &[f64], tol: f64) -> MaxBracket {
    assert!(!coeffs.is_empty());
    assert!(tol > 0.0, "tolerance must be positive");
    let n = coeffs.len();
    // Endpoints are exact: q(0) = c_0, q(1) = c_{n-1}.
    let mut lower = coeffs[0];
    let mut argmax = 0.0;
    if coeffs[n - 1] > lower {
        lower = coeffs[n - 1];
        argmax = 1.0;
    }
    let mut heap = BinaryHeap::new();
    heap.push(Node {
        upper: max_coeff(coeffs),
        lo: 0.0,
        hi: 1.0,
        coeffs: coeffs.to_vec(),
    });
    let mut subdivisions = 0;
    while let Some(node) = heap.pop() {
        if node.upper - lower <= tol {
            // Every remaining interval is within tol of the incumbent.
            return MaxBracket {
                lower,
                upper: node.upper.max(lower),
                argmax,
                certified: true,
                subdivisions,
            };
        }
        if subdivisions >= SUBDIVISION_CAP {
            return MaxBracket {
                lower,
                upper: node.upper.max(lower),
                argmax,
                certified: false,
                subdivisions,
            };
        }
        subdivisions += 1;
        let mid = 0.5 * (node.lo + node.hi);
        let (left, right, mid_value) = decasteljau_split(&node.coeffs);
        if mid_value > lower {
            lower = mid_value;
            argmax = mid;
        }
        for (half, lo, hi) in [(left, node.lo, mid), (right, mid, node.hi)] {
            let upper = max_coeff(&half);
            // Intervals whose bound cannot beat the incumbent are settled:
            // their supremum is at most `lower`, already in the bracket.
            if upper > lower {
                heap.push(Node {
                    upper,
                    lo,
                    hi,
                    coeffs: half,
                });
            }
        }
    }
    MaxBracket {
        lower,
        upper: lower,
        argmax,
        certified: true,
        subdivisions,
    }
}

/// Evaluates the polynomial at `p` by de Casteljau.
pub fn evaluate(coeffs: &[f64], p: f64) -> f64 {
    let mut work = coeffs.to_vec();
    let n = work.len();
    for level in 1..n {
        for i in 0..n - level {
            work[i] = (1.0 - p) * work[i] + p * work[i + 1];
        }
    }
    work[0]
}

/// Exact-arithmetic bracket of the maximum: compares against a rational
/// `bound` and decides `sup ≤ bound`, `sup > bound`, or narrows until the
/// width underflows `min_width`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExactMaxDecision {
    /// `sup ≤ bound`, with the certified supremum bracket.
    AtMost {
        lower: BigRational,
        upper: BigRational,
    },
    /// `sup > bound`: a point `p` with `q(p) = attained > bound`.
    Exceeds {
        at: BigRational,
        attained: BigRational,
    },
    /// Bracket narrower than `min_width` still straddles the bound.
    Straddles {
        lower: BigRational,
        upper: BigRational,
    },
}

struct ExactNode {
    upper: BigRational,
    lo: BigRational,
    hi: BigRational,
    coeffs: Vec<BigRational>,
}

fn exact_split(coeffs: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>, BigRational) {
    let n = coeffs.len();
    let mut work = coeffs.to_vec();
    let mut left = Vec::with_capacity(n);
    let mut right = vec![BigRational::zero(); n];
    let half = BigRational::new(1.into(), 2.into());
    for level in 0..n {
        left.push(work[0].clone());
        right[n - 1 - level] = work[n - 1 - level].clone();
        for i in 0..n - 1 - level {
            work[i] = (&work[i] + &work[i + 1]) * &half;
        }
    }
    let mid_value = left[n - 1].clone();
    (left, right, mid_value)
}

/// Decides `sup_{p∈[0,1]} q(p) ≤ bound` in exact rational arithmetic.
pub fn exact_max_decision(
    coeffs: &[BigRational],
    bound: &BigRational,
    min_width: &BigRational,
) -> ExactMaxDecision {
    assert!(!coeffs.is_empty());
    let n = coeffs.len();
    let mut lower = coeffs[0].clone();
    let mut arg = BigRational::zero();
    if coeffs[n - 1] > lower {
        lower = coeffs[n - 1].clone();
        arg = BigRational::one();
    }
    let upper0 = coeffs.iter().max().expect("nonempty").clone();
    let mut stack = vec![ExactNode {
        upper: upper0,
        lo: BigRational::zero(),
        hi: BigRational::one(),
        coeffs: coeffs.to_vec(),
    }];
    let mut global_upper: Option<BigRational> = None;
    let half = BigRational::new(1.into(), 2.into());
    let mut steps = 0usize;
    while let Some(node) = stack.pop() {
        if lower > *bound {
            return ExactMaxDecision::Exceeds {
                at: arg,
                attained: lower,
            };
        }
        if node.upper <= *bound || node.upper <= lower {
            global_upper = Some(match global_upper {
                Some(u) if u >= node.upper => u,
                _ => node.upper,
            });
            continue;
        }
        if (&node.hi - &node.lo) < *min_width || steps > SUBDIVISION_CAP {
            // Too narrow to keep splitting while still above the bound.
            let upper = node.upper.clone();
            let lower_out = lower.clone();
            // Drain remaining bounds into the global upper.
            let rest = stack
                .iter()
                .map(|nd| nd.upper.clone())
                .chain(global_upper.clone())
                .chain(std::iter::once(upper))
                .max()
                .expect("nonempty");
            return ExactMaxDecision::Straddles {
                lower: lower_out,
                upper: rest,
            };
        }
        steps += 1;
        let mid = (&node.lo + &node.hi) * &half;
        let (left, right, mid_value) = exact_split(&node.coeffs);
        if mid_value > lower {
            lower = mid_value;
            arg = mid.clone();
        }
        for (coeffs, lo, hi) in [
            (left, node.lo.clone(), mid.clone()),
            (right, mid, node.hi.clone()),
        ] {
            let upper = coeffs.iter().max().expect("nonempty").clone();
            stack.push(ExactNode {
                upper,
                lo,
                hi,
                coeffs,
            });
        }
        // Keep the most promising node on top.
        stack.sort_by(|a, b| a.upper.cmp(&b.upper));
    }
    if lower > *bound {
        return ExactMaxDecision::Exceeds {
            at: arg,
            attained: lower,
        };
    }
    let upper = match global_upper {
        Some(u) if u >= lower => u,
        _ => lower.clone(),
    };
    ExactMaxDecision::AtMost { lower, upper }
}
