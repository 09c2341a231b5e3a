//! Growth bounds for the sharpness recursion.
//!
//! The exact recursion in [`crate::strategy`] answers "which γ next";
//! this module answers "how fast must they grow". It implements three
//! layers of bounds, each simpler and looser than the last:
//!
//! 1. **Trigonometric envelopes** ([`envelopes`], [`dominating_seq`]):
//!    replace the exact numerator by polynomial under- and
//!    over-estimates of the sines and cosines, giving a lower sequence
//!    `p↓` and an upper sequence `p↑` that sandwich the exact `γ`
//!    wherever all three recursions are on their hypotheses.
//! 2. **Coefficient sequences** ([`coeff_sequences`]): drop the angle
//!    entirely; `c↓_k` and `c↑_k` bound the leading Taylor coefficient
//!    of `γ_k(θ)` at `θ = 0` through the running sum of squares.
//! 3. **`d`-sequences** ([`d_sequences`], [`d_closed_forms`]): replace
//!    the sum of squares by its largest term, giving pure
//!    squaring recursions with closed forms. These prove the
//!    double-exponential law: `log₂ d` grows like `5·2^k`.
//!
//! Everything in layers 2 and 3 overflows `f64` within a couple dozen
//! steps, so those sequences live in a base-2 log domain
//! ([`Log2Scalar`]) and sums like `1 + Σ c_j²` are taken by
//! exponent-shifted summation. Layer 1 is evaluated like the exact
//! recursion: logarithmic product bookkeeping while every factor stays
//! positive, direct arithmetic once an envelope has left `(0, 1)` and
//! cancellation is no longer possible.

use crate::strategy::Sharpness;
use crate::{Error, Result};

use std::f64::consts::FRAC_PI_4;

/// A positive quantity stored as its base-2 logarithm, for sequences
/// whose values overflow `f64` long before their growth law becomes
/// visible. Comparison operators order by exponent, i.e. by value.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Log2Scalar {
    log2: f64,
}

impl Log2Scalar {
    /// Wraps an exponent: the value `2^log2`.
    pub fn from_log2(log2: f64) -> Self {
        Log2Scalar { log2 }
    }

    /// Takes the logarithm of a positive value.
    pub fn from_value(value: f64) -> Result<Self> {
        if !(value > 0.0 && value.is_finite()) {
            return Err(Error::Domain(format!(
                "Log2Scalar needs a positive finite value, got {value}"
            )));
        }
        Ok(Log2Scalar { log2: value.log2() })
    }

    /// The stored exponent.
    pub fn log2(&self) -> f64 {
        self.log2
    }

    /// The represented value `2^log2`; overflows to `+inf` when the
    /// exponent exceeds 1024.
    pub fn value(&self) -> f64 {
        self.log2.exp2()
    }
}

fn validate_theta_eps(theta: f64, epsilon: f64) -> Result<()> {
    if !(theta > 0.0 && theta <= FRAC_PI_4) {
        return Err(Error::Domain(format!("theta = {theta} outside (0, π/4]")));
    }
    if !(epsilon >= 0.0 && epsilon.is_finite()) {
        return Err(Error::Domain(format!("epsilon = {epsilon} must be finite and ≥ 0")));
    }
    Ok(())
}

/// Product state for envelope recursions: logarithmic while every
/// factor is positive (cancellation-safe near 1), direct once a factor
/// goes non-positive and the sequence has visibly exploded.
struct FactorProduct {
    log_sum: f64,
    direct: f64,
    log_ok: bool,
}

impl FactorProduct {
    fn new() -> Self {
        FactorProduct { log_sum: 0.0, direct: 1.0, log_ok: true }
    }

    /// `1 - (1-h)·Π factors`, evaluated without cancellation while the
    /// logarithmic path is alive.
    fn one_minus_scaled(&self, h: f64) -> f64 {
        if self.log_ok {
            let q = self.log_sum.exp();
            let one_minus_q = -self.log_sum.exp_m1();
            one_minus_q + q * h
        } else {
            1.0 - (1.0 - h) * self.direct
        }
    }

    /// Multiplies in the factor `1 - x`.
    fn push_one_minus(&mut self, x: f64) {
        self.direct *= 1.0 - x;
        if self.log_ok {
            if x < 1.0 {
                self.log_sum += (-x).ln_1p();
            } else {
                self.log_ok = false;
            }
        }
    }
}

/// Raw candidate for position `prefix.len() + 1` of the closed upper
/// sequence `p_k = (1+ε) 2^k [1 - (1-θ²/2) Π_{j<k}(1-p_j²/2)] / (√λ₁ θ)`,
/// which dominates the exact sharpness `γ_k` position by position on
/// the shared validity region. Previous entries must lie in `(0, 1)`.
pub fn dominating_next(theta: f64, epsilon: f64, lambda1: f64, prefix: &[f64]) -> Result<f64> {
    validate_theta_eps(theta, epsilon)?;
    if !(lambda1 > 0.0 && lambda1 <= 1.0) {
        return Err(Error::Domain(format!("lambda1 = {lambda1} outside (0, 1]")));
    }
    let mut product = FactorProduct::new();
    for &p in prefix {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::Domain(format!("predecessor {p} outside (0, 1)")));
        }
        product.push_one_minus(p * p / 2.0);
    }
    let k = prefix.len() as i32 + 1;
    let bracket = product.one_minus_scaled(theta * theta / 2.0);
    Ok((1.0 + epsilon) * 2f64.powi(k) * bracket / (lambda1.sqrt() * theta))
}

/// Runs the dominating recursion of [`dominating_next`] for `n` positions
/// with the same tagging discipline as the exact sequence: the first
/// value outside `(0, 1)` and everything after it is
/// [`Sharpness::Unreachable`].
pub fn dominating_seq(theta: f64, epsilon: f64, lambda1: f64, n: usize) -> Result<Vec<Sharpness>> {
    if n == 0 {
        return Err(Error::Domain("sequence length n must be at least 1".into()));
    }
    let mut prefix: Vec<f64> = Vec::new();
    let mut out = Vec::with_capacity(n);
    let mut dead = false;
    for _ in 0..n {
        if dead {
            out.push(Sharpness::Unreachable);
            continue;
        }
        let raw = dominating_next(theta, epsilon, lambda1, &prefix)?;
        if raw > 0.0 && raw < 1.0 {
            prefix.push(raw);
            out.push(Sharpness::Finite(raw));
        } else {
            dead = true;
            out.push(Sharpness::Unreachable);
        }
    }
    Ok(out)
}

/// The polynomial envelope pair around the exact sharpness sequence at
/// `λ₁ = 1`: `lower[k-1] = p↓_k` and `upper[k-1] = p↑_k`. Values are
/// raw (no tagging, no propagation); beyond the validity region they
/// explode double-exponentially, which is exactly what the growth
/// argument uses.
#[derive(Debug, Clone, PartialEq)]
pub struct EnvelopePair {
    /// Angle the envelopes were evaluated at.
    pub theta: f64,
    /// Overshoot `ε`.
    pub epsilon: f64,
    /// Under-estimating sequence `p↓`.
    pub lower: Vec<f64>,
    /// Over-estimating sequence `p↑`.
    pub upper: Vec<f64>,
}

/// Evaluates both envelope recursions for `n` positions:
///
/// ```text
/// p↑_k = (1+ε) 2^k     [1 - (1-θ²/2) Π_{j<k}(1-p↑_j²/2)] / θ
/// p↓_k = (1+ε) 2^(k-1) [1 - (1-θ²/4) Π_{j<k}(1-p↓_j²/4)] / θ
/// ```
///
/// On the validity region (all predecessors of all three sequences in
/// `(0, 1)`) they sandwich the exact recursion: `p↓_k ≤ γ_k ≤ p↑_k`.
pub fn envelopes(theta: f64, epsilon: f64, n: usize) -> Result<EnvelopePair> {
    validate_theta_eps(theta, epsilon)?;
    if n == 0 {
        return Err(Error::Domain("sequence length n must be at least 1".into()));
    }
    let run = |pow_offset: i32, denom: f64| -> Vec<f64> {
        let mut product = FactorProduct::new();
        let mut values = Vec::with_capacity(n);
        for k in 1..=n {
            let bracket = product.one_minus_scaled(theta * theta / denom);
            let p = (1.0 + epsilon) * 2f64.powi(k as i32 + pow_offset) * bracket / theta;
            product.push_one_minus(p * p / denom);
            values.push(p);
        }
        values
    };
    Ok(EnvelopePair { theta, epsilon, lower: run(-1, 4.0), upper: run(0, 2.0) })
}

/// Base-2 log of `1 + Σ 2^t` over the given exponents, by shifting
/// everything under the largest exponent before summing.
fn log2_one_plus_sum(exponents: &[f64]) -> f64 {
    let lead = exponents.iter().copied().fold(0.0f64, f64::max);
    let mut acc = (-lead).exp2();
    for &t in exponents {
        acc += (t - lead).exp2();
    }
    lead + acc.log2()
}

/// The angle-free coefficient recursions
///
/// ```text
/// c↓_k = (1+ε) 2^(k-3) (1 + Σ_{j<k} c↓_j²)
/// c↑_k = (1+ε) 2^(k-1) (1 + Σ_{j<k} c↑_j²)
/// ```
///
/// returned as `(lower, upper)` in the log domain, `k = 1..=n`. They
/// bound the leading small-angle coefficient of `γ_k(θ)` from below
/// and above.
pub fn coeff_sequences(epsilon: f64, n: usize) -> Result<(Vec<Log2Scalar>, Vec<Log2Scalar>)> {
    if !(epsilon >= 0.0 && epsilon.is_finite()) {
        return Err(Error::Domain(format!("epsilon = {epsilon} must be finite and ≥ 0")));
    }
    if n == 0 {
        return Err(Error::Domain("sequence length n must be at least 1".into()));
    }
    let log_1e = epsilon.ln_1p() / std::f64::consts::LN_2;
    let run = |pow_offset: f64| -> Vec<Log2Scalar> {
        let mut squares: Vec<f64> = Vec::with_capacity(n);
        let mut values = Vec::with_capacity(n);
        for k in 1..=n {
            let log_c = log_1e + (k as f64 - 1.0 + pow_offset) + log2_one_plus_sum(&squares);
            squares.push(2.0 * log_c);
            values.push(Log2Scalar::from_log2(log_c));
        }
        values
    };
    Ok((run(-2.0), run(0.0)))
}

/// The pure squaring recursions obtained by keeping only the largest
/// square in each coefficient sum:
///
/// ```text
/// d↓_k = (1+ε) 2^(k-3)  (d↓_{k-1})²,  d↓_4 = 4      (defined for k ≥ 4)
/// d↑_k = (1+ε) 2^(2k-1) (d↑_{k-1})²,  d↑_1 = 1+ε
/// ```
///
/// Returned as `(lower, upper)`: `lower[i]` is `d↓_{i+4}` (empty when
/// `n < 4`), `upper[i]` is `d↑_{i+1}`. They straddle the coefficient
/// sequences (`d↓_k ≤ c↓_k`, `c↑_k ≤ d↑_k`) and admit the closed forms
/// of [`d_closed_forms`].
pub fn d_sequences(epsilon: f64, n: usize) -> Result<(Vec<Log2Scalar>, Vec<Log2Scalar>)> {
    if !(epsilon >= 0.0 && epsilon.is_finite()) {
        return Err(Error::Domain(format!("epsilon = {epsilon} must be finite and ≥ 0")));
    }
    if n == 0 {
        return Err(Error::Domain("sequence length n must be at least 1".into()));
    }
    let log_1e = epsilon.ln_1p() / std::f64::consts::LN_2;
    let mut lower = Vec::new();
    if n >= 4 {
        let mut log_d = 2.0;
        lower.push(Log2Scalar::from_log2(log_d));
        for k in 5..=n {
            log_d = log_1e + (k as f64 - 3.0) + 2.0 * log_d;
            lower.push(Log2Scalar::from_log2(log_d));
        }
    }
    let mut upper = Vec::with_capacity(n);
    let mut log_d = log_1e;
    upper.push(Log2Scalar::from_log2(log_d));
    for k in 2..=n {
        log_d = log_1e + (2.0 * k as f64 - 1.0) + 2.0 * log_d;
        upper.push(Log2Scalar::from_log2(log_d));
    }
    Ok((lower, upper))
}

/// Closed forms of the squaring recursions, as
/// `(d↓_k when k ≥ 4, d↑_k)`:
///
/// ```text
/// log₂ d↓_k = (2^(k-4) - 1) log₂(1+ε) + 5·2^(k-4) - k + 1
/// log₂ d↑_k = (2^k - 1)     log₂(1+ε) + 5·2^(k-1) - 2k - 3
/// ```
///
/// The `5·2^k` terms are the double-exponential growth law in the
/// plainest possible dress. Requires `k ≥ 1`; the lower form is `None`
/// below its base index 4.
pub fn d_closed_forms(epsilon: f64, k: usize) -> Result<(Option<Log2Scalar>, Log2Scalar)> {
    if !(epsilon >= 0.0 && epsilon.is_finite()) {
        return Err(Error::Domain(format!("epsilon = {epsilon} must be finite and ≥ 0")));
    }
    if k == 0 {
        return Err(Error::Domain("index k must be at least 1".into()));
    }
    let log_1e = epsilon.ln_1p() / std::f64::consts::LN_2;
    let lower = if k >= 4 {
        let pow = 2f64.powi(k as i32 - 4);
        Some(Log2Scalar::from_log2((pow - 1.0) * log_1e + 5.0 * pow - k as f64 + 1.0))
    } else {
        None
    };
    let pow = 2f64.powi(k as i32);
    let upper =
        Log2Scalar::from_log2((pow - 1.0) * log_1e + 5.0 * pow / 2.0 - 2.0 * k as f64 - 3.0);
    Ok((lower, upper))
}

/// Closed form of the affine doubling recursion
/// `b_k = 2 b_{k-1} + k·t + c` started at position `k₀`:
///
/// ```text
/// b_k = 2^(k-k₀) (b_{k₀} + (2+k₀)t + c) - (k+2)t - c
/// ```
///
/// Requires `k ≥ k₀ ≥ 1`. This identity drives the coefficient-to-`d`
/// comparison; exposed because its off-by-one traps deserve a
/// regression test of their own.
pub fn bk_closed_form(k: usize, k0: usize, b_k0: f64, t: f64, c: f64) -> Result<f64> {
    if k0 == 0 || k < k0 {
        return Err(Error::Domain(format!("need k ≥ k0 ≥ 1, got k = {k}, k0 = {k0}")));
    }
    Ok(2f64.powi((k - k0) as i32) * (b_k0 + (2.0 + k0 as f64) * t + c) - (k as f64 + 2.0) * t - c)
}
