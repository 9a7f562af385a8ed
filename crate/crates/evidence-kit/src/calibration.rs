//! Calibrators between the p-value and e-value scales.
//!
//! Three families:
//!
//! - power: `p ↦ κ p^{κ−1}` for `κ ∈ (0,1)`, admissible because
//!   `∫₀¹ κ p^{κ−1} dp = 1`;
//! - log: `p ↦ H_κ(p)` for `κ ∈ (0,∞)`, where `H_κ` is `∞` at 0,
//!   `κ(1+κ)^κ p^{−1}(−ln p)^{−1−κ}` on `(0, e^{−1−κ}]`, and 0 above;
//! - inverse: `e ↦ min(1, 1/e)` in the opposite direction.
//!
//! [`admissibility_check`] certifies `∫₀¹ cal(p) dp ≤ 1 + tol` numerically:
//! the integrable singularity at 0 is integrated in closed form through the
//! substitution that removes it (`u = p^κ` for power, `u = −ln p` for log),
//! and the smooth remainder is bracketed by adaptive midpoint/trapezoid
//! quadrature. Both families are nonincreasing and convex on their support,
//! which is what makes the midpoint rule a lower and the trapezoid rule an
//! upper bound per interval.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::num::{rational_pow_bracket, ExtReal, Mode};
use crate::verdict::{Verdict, Witness};

/// A p→e or e→p calibrator.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Calibrator {
    /// `κ p^{κ−1}`, `κ ∈ (0,1)`.
    Power { kappa: f64 },
    /// `H_κ`, `κ ∈ (0,∞)`.
    Log { kappa: f64 },
    /// `e ↦ min(1, 1/e)`.
    Inverse,
}

impl Calibrator {
    pub fn power(kappa: f64) -> Result<Self> {
        if !(kappa > 0.0 && kappa < 1.0) {
            return Err(Error::InvalidKappa {
                kind: "power",
                kappa,
            });
        }
        Ok(Calibrator::Power { kappa })
    }

    pub fn log(kappa: f64) -> Result<Self> {
        if !(kappa > 0.0 && kappa.is_finite()) {
            return Err(Error::InvalidKappa { kind: "log", kappa });
        }
        Ok(Calibrator::Log { kappa })
    }
}

/// Applies a p→e calibrator to a p-value in `[0,1]`.
pub fn calibrate_p_to_e(cal: &Calibrator, p: f64) -> Result<ExtReal> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!("p = {p} outside [0,1]")));
    }
    match *cal {
        Calibrator::Power { kappa } => {
            if p == 0.0 {
                return Ok(ExtReal::Inf);
            }
            ExtReal::from_f64(kappa * p.powf(kappa - 1.0))
        }
        Calibrator::Log { kappa } => {
            if p == 0.0 {
                return Ok(ExtReal::Inf);
            }
            let threshold = (-1.0 - kappa).exp();
            if p > threshold {
                return Ok(ExtReal::zero());
            }
            let coeff = kappa * (1.0 + kappa).powf(kappa);
            ExtReal::from_f64(coeff / p * (-p.ln()).powf(-1.0 - kappa))
        }
        Calibrator::Inverse => Err(Error::InvalidParameter(
            "inverse calibrates e-values; use calibrate_e_to_p".into(),
        )),
    }
}

/// `e ↦ min(1, 1/e)` with `1/∞ = 0` and the cap handling `e < 1`.
pub fn calibrate_e_to_p(e: &ExtReal) -> ExtReal {
    e.reciprocal_capped()
}

/// Certified enclosure of `κ p^{κ−1}` for exact rational `κ ∈ (0,1)` and
/// `p ∈ (0,1]`; the exact-mode path of the power calibrator.
pub fn power_e_bracket(
    kappa: &BigRational,
    p: &BigRational,
    bits: u32,
) -> Result<(BigRational, BigRational)> {
    use num_traits::Signed;
    if !kappa.is_positive() || *kappa >= BigRational::from_integer(1.into()) {
        return Err(Error::InvalidKappa {
            kind: "power",
            kappa: ExtReal::Exact(kappa.clone()).to_f64(),
        });
    }
    // exponent κ−1 = (a−b)/b for κ = a/b
    let a = kappa.numer().clone();
    let b = kappa.denom().clone();
    let num: i64 = (&a - &b)
        .try_into()
        .map_err(|_| Error::InvalidParameter("kappa numerator too large".into()))?;
    let den: u64 = b
        .try_into()
        .map_err(|_| Error::InvalidParameter("kappa denominator too large".into()))?;
    let (lo, hi) = rational_pow_bracket(p, num, den, bits)?;
    Ok((kappa * lo, kappa * hi))
}

const MIN_SUBDIVISIONS: usize = 16;

/// Certifies `∫₀¹ cal(p) dp ≤ 1 + tolerance` by quadrature with a certified
/// error bound; the verdict carries the bracket as `[lower, upper]` and the
/// slack against `1 + tolerance` as its margin.
pub fn admissibility_check(
    cal: &Calibrator,
    subdivisions: usize,
    tolerance: f64,
) -> Result<Verdict> {
    if subdivisions < MIN_SUBDIVISIONS {
        return Err(Error::InvalidParameter(format!(
            "subdivisions = {subdivisions} < {MIN_SUBDIVISIONS}"
        )));
    }
    if tolerance <= 0.0 {
        return Err(Error::InvalidParameter("tolerance must be positive".into()));
    }
    let (head, smooth_lo, smooth_hi) = match *cal {
        Calibrator::Power { kappa } => {
            // ∫₀^s κ p^{κ−1} dp = s^κ  (u = p^κ).
            let split = 0.875f64;
            (split.powf(kappa), split, 1.0)
        }
        Calibrator::Log { kappa } => {
            // ∫₀^s H_κ dp = (1+κ)^κ (−ln s)^{−κ}  (u = −ln p); H_κ vanishes
            // above e^{−1−κ}.
            let threshold = (-1.0 - kappa).exp();
            if threshold < f64::MIN_POSITIVE {
                return Err(Error::InvalidParameter(format!(
                    "kappa = {kappa} pushes the support below binary64 range"
                )));
            }
            let split = 0.5 * threshold;
            let head = (1.0 + kappa).powf(kappa) * (-split.ln()).powf(-kappa);
            (head, split, threshold)
        }
        Calibrator::Inverse => {
            return Err(Error::InvalidParameter(
                "admissibility applies to p-to-e calibrators".into(),
            ))
        }
    };
    let eval = |p: f64| -> f64 {
        calibrate_p_to_e(cal, p)
            .map(|v| v.to_f64())
            .unwrap_or(f64::INFINITY)
    };
    let (tail_lo, tail_hi, used) =
        convex_bracket_quadrature(&eval, smooth_lo, smooth_hi, tolerance, subdivisions);
    let lower = head + tail_lo;
    let upper = head + tail_hi;
    let width = upper - lower;
    if width > tolerance {
        return Err(Error::QuadratureDidNotConverge {
            width,
            tolerance,
            subdivisions: used,
        });
    }
    let verdict = if upper <= 1.0 + tolerance {
        Verdict::accepted(1.0 + tolerance - upper, Mode::Binary64).with_bracket((lower, upper))
    } else {
        Verdict::rejected(
            Witness {
                parameter: None,
                outcome: None,
                epsilon: None,
                attained: ExtReal::from_f64(lower).unwrap_or(ExtReal::Inf),
                bound: ExtReal::one(),
            },
            Mode::Binary64,
        )
        .with_bracket((lower, upper))
    };
    Ok(verdict)
}

struct Interval {
    gap: f64,
    lo: f64,
    hi: f64,
    f_lo: f64,
    f_hi: f64,
}

impl PartialEq for Interval {
    fn eq(&self, other: &Self) -> bool {
        self.gap == other.gap
    }
}
impl Eq for Interval {}
impl PartialOrd for Interval {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Interval {
    fn cmp(&self, other: &Self) -> Ordering {
        self.gap.partial_cmp(&other.gap).expect("finite gaps")
    }
}

/// Two-sided quadrature bracket for a nonincreasing convex integrand on
/// `[lo, hi]`: per interval the midpoint rule is a lower bound (tangent
/// below a convex function) and the trapezoid rule an upper bound (chord
/// above). Adaptive bisection on the largest per-interval gap.
fn convex_bracket_quadrature(
    f: &dyn Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    tolerance: f64,
    budget: usize,
) -> (f64, f64, usize) {
    let bounds = |a: f64, b: f64, fa: f64, fb: f64| -> (f64, f64) {
        let w = b - a;
        let fm = f(0.5 * (a + b));
        (fm * w, 0.5 * (fa + fb) * w)
    };
    let mut heap = BinaryHeap::new();
    let (f_lo, f_hi) = (f(lo), f(hi));
    let (l0, u0) = bounds(lo, hi, f_lo, f_hi);
    let mut total_lo = l0;
    let mut total_hi = u0;
    heap.push(Interval {
        gap: u0 - l0,
        lo,
        hi,
        f_lo,
        f_hi,
    });
    let mut used = 1usize;
    while total_hi - total_lo > 0.25 * tolerance && used < budget {
        let worst = heap.pop().expect("nonempty");
        let mid = 0.5 * (worst.lo + worst.hi);
        let f_mid = f(mid);
        let (l_old, u_old) = bounds(worst.lo, worst.hi, worst.f_lo, worst.f_hi);
        let (l1, u1) = bounds(worst.lo, mid, worst.f_lo, f_mid);
        let (l2, u2) = bounds(mid, worst.hi, f_mid, worst.f_hi);
        total_lo += l1 + l2 - l_old;
        total_hi += u1 + u2 - u_old;
        heap.push(Interval {
            gap: u1 - l1,
            lo: worst.lo,
            hi: mid,
            f_lo: worst.f_lo,
            f_hi: f_mid,
        });
        heap.push(Interval {
            gap: u2 - l2,
            lo: mid,
            hi: worst.hi,
            f_lo: f_mid,
            f_hi: worst.f_hi,
        });
        used += 1;
    }
    (total_lo, total_hi, used)
}
