//! Two-qubit states, unsharp measurements, and CHSH evaluation.
//!
//! This module is the exact density-matrix side of the crate: everything
//! the analytic planner in [`crate::strategy`] predicts is re-derivable
//! here from Born's rule and the averaged (unselective) Lüders update,
//! with no strategy-specific shortcuts. The two layers are developed
//! independently so that agreement between them is evidence, not
//! circularity.
//!
//! ## Objects
//!
//! - [`TwoQubitState`]: a validated 4×4 density matrix, Alice's qubit
//!   first.
//! - [`Effect`]: a binary unsharp effect `(I + sign·γ·r·σ)/2` with
//!   sharpness `γ` and Bloch axis `r`, plus its closed-form square root.
//! - [`Instrument`]: a Kraus set, either a full channel or one outcome
//!   branch implementing an effect.
//! - [`CorrelationSpectrum`]: the eigensystem of `T Tᵀ` for the Pauli
//!   correlation table `T`, which picks the measurement axes used by the
//!   planner.
//!
//! ## Conventions
//!
//! Measurement settings are indexed before outcomes: a pair-of-pairs
//! `[[Effect; 2]; 2]` is `pairs[setting][outcome]`, and joint
//! probabilities are `p(a, b | x, y)`. Pauli indices 0, 1, 2 mean x, y, z.

use num_complex::Complex64;

use crate::linalg::{
    cr, dot3, eig_sym3, kron, norm3, normalize3, pinv_sqrt2, support_proj2, CMat2, CMat4, Mat3,
    CANONICAL_AXES,
};
use crate::{Error, Result};

/// Validated two-qubit density matrix. Alice holds the first tensor
/// factor, the sequential Bobs the second.
///
/// Construction enforces hermiticity and unit trace within `1e-12` and
/// eigenvalues above `-1e-10`; every owner of a value of this type may
/// rely on those bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoQubitState {
    rho: CMat4,
}

impl TwoQubitState {
    /// Validates and wraps a density matrix.
    pub fn new(rho: CMat4) -> Result<Self> {
        let herm = rho.hermiticity_defect();
        if herm > 1e-12 {
            return Err(Error::Domain(format!("density matrix not Hermitian (defect {herm:e})")));
        }
        let tr = rho.trace();
        if (tr.re - 1.0).abs() > 1e-12 || tr.im.abs() > 1e-12 {
            return Err(Error::Domain(format!("density matrix trace is {tr}, expected 1")));
        }
        let min_eig = crate::linalg::min_eig_herm4(&rho)?;
        if min_eig < -1e-10 {
            return Err(Error::NotPsd(min_eig));
        }
        Ok(TwoQubitState { rho })
    }

    /// The underlying matrix.
    pub fn rho(&self) -> &CMat4 {
        &self.rho
    }

    /// The maximally mixed state `I/4` (no correlations at all).
    pub fn maximally_mixed() -> Self {
        TwoQubitState { rho: CMat4::identity().scale(0.25) }
    }
}

/// The Bell state `|Φ⁺⟩ = (|00⟩ + |11⟩)/√2` as a density matrix.
pub fn make_bell_state() -> TwoQubitState {
    let mut rho = CMat4::zero();
    rho.e[0][0] = cr(0.5);
    rho.e[0][3] = cr(0.5);
    rho.e[3][0] = cr(0.5);
    rho.e[3][3] = cr(0.5);
    TwoQubitState { rho }
}

/// The pure state `cos(φ)|00⟩ + sin(φ)|11⟩` in Schmidt form.
///
/// `φ` must lie in `(0, π/4]`; `φ = π/4` is the Bell state, `φ → 0`
/// approaches a product state, which the planner cannot use.
pub fn make_schmidt_state(phi: f64) -> Result<TwoQubitState> {
    if !(phi > 0.0 && phi <= std::f64::consts::FRAC_PI_4) {
        return Err(Error::Domain(format!("Schmidt angle {phi} outside (0, π/4]")));
    }
    let amp = [phi.cos(), phi.sin()];
    let mut rho = CMat4::zero();
    let idx = [0usize, 3];
    for i in 0..2 {
        for j in 0..2 {
            rho.e[idx[i]][idx[j]] = cr(amp[i] * amp[j]);
        }
    }
    Ok(TwoQubitState { rho })
}

/// Member of the two-parameter state family supported on `{|00⟩, |11⟩}`:
/// `α` and `1-α` on the diagonal corners, `β` and `β*` off them.
///
/// Positivity requires `|β|² ≤ α(1-α)`; a `1e-12` slack on the squared
/// form is allowed before the input is rejected.
pub fn make_family_state(alpha: f64, beta: Complex64) -> Result<TwoQubitState> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::Domain(format!("family weight alpha = {alpha} outside [0, 1]")));
    }
    if beta.norm_sqr() > alpha * (1.0 - alpha) + 1e-12 {
        return Err(Error::Domain(format!(
            "family coherence |beta|^2 = {:e} exceeds alpha(1-alpha) = {:e}",
            beta.norm_sqr(),
            alpha * (1.0 - alpha)
        )));
    }
    let mut rho = CMat4::zero();
    rho.e[0][0] = cr(alpha);
    rho.e[3][3] = cr(1.0 - alpha);
    rho.e[0][3] = beta;
    rho.e[3][0] = beta.conj();
    Ok(TwoQubitState { rho })
}

/// One outcome of a binary unsharp measurement: the effect
/// `E = (I + sign·γ·r·σ)/2` with sharpness `γ ∈ [0, 1]` and unit Bloch
/// axis `r`. `γ = 1` is a sharp (projective) outcome, `γ = 0` is pure
/// noise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Effect {
    gamma: f64,
    axis: [f64; 3],
    sign: f64,
    matrix: CMat2,
}

/// Builds an [`Effect`] from sharpness, Bloch axis, and outcome sign.
///
/// The axis must be unit length within `1e-10` (it is renormalized
/// exactly after the check) and `sign` must be exactly `+1.0` or `-1.0`.
pub fn effect(gamma: f64, axis: [f64; 3], sign: f64) -> Result<Effect> {
    if !(0.0..=1.0).contains(&gamma) {
        return Err(Error::Domain(format!("sharpness gamma = {gamma} outside [0, 1]")));
    }
    if (norm3(axis) - 1.0).abs() > 1e-10 {
        return Err(Error::Domain(format!(
            "effect axis {axis:?} is not unit length (norm {})",
            norm3(axis)
        )));
    }
    if sign != 1.0 && sign != -1.0 {
        return Err(Error::Domain(format!("outcome sign must be ±1, got {sign}")));
    }
    let axis = normalize3(axis)?;
    let matrix =
        (CMat2::identity() + crate::linalg::sigma_axis(axis).scale(sign * gamma)).scale(0.5);
    Ok(Effect { gamma, axis, sign, matrix })
}

/// Both outcomes of the binary measurement with the given sharpness and
/// axis, `[plus, minus]`.
pub fn measurement_pair(gamma: f64, axis: [f64; 3]) -> Result<[Effect; 2]> {
    Ok([effect(gamma, axis, 1.0)?, effect(gamma, axis, -1.0)?])
}

impl Effect {
    /// Sharpness `γ`.
    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Bloch axis `r`.
    pub fn axis(&self) -> [f64; 3] {
        self.axis
    }

    /// Outcome sign, `+1.0` or `-1.0`.
    pub fn sign(&self) -> f64 {
        self.sign
    }

    /// The 2×2 effect matrix.
    pub fn matrix(&self) -> &CMat2 {
        &self.matrix
    }

    /// The complementary outcome (sign flipped); the pair sums to `I`.
    pub fn complement(&self) -> Effect {
        effect(self.gamma, self.axis, -self.sign).expect("complement of a valid effect is valid")
    }

    /// Principal square root `√E = a·I + sign·b·r·σ` by closed form, with
    /// `a = (√(1+γ) + √(1-γ))/(2√2)` and
    /// `b = γ / (√2 (√(1+γ) + √(1-γ)))`.
    ///
    /// This is exact for every `γ` including the singular sharp case
    /// `γ = 1`, where matrix factorization routines pick up square-rooted
    /// rounding noise of order `1e-9` from the vanishing determinant; the
    /// closed form keeps the update channel accurate to `1e-15`.
    pub fn sqrt_matrix(&self) -> CMat2 {
        let sum = (1.0 + self.gamma).sqrt() + (1.0 - self.gamma).sqrt();
        let a = sum / (2.0 * std::f64::consts::SQRT_2);
        let b = self.gamma / (std::f64::consts::SQRT_2 * sum);
        let mut m = crate::linalg::sigma_axis(self.axis).scale(self.sign * b);
        m.e[0][0] += cr(a);
        m.e[1][1] += cr(a);
        m
    }
}

/// Largest deviation of `pair[0] + pair[1]` from the identity.
fn pair_completeness_defect(pair: &[Effect; 2]) -> f64 {
    (*pair[0].matrix() + *pair[1].matrix()).max_abs_diff(&CMat2::identity())
}

/// Rejects setting pairs that do not sum to the identity within `1e-10`.
fn validate_pairs(pairs: &[[Effect; 2]; 2], who: &str) -> Result<()> {
    for (y, pair) in pairs.iter().enumerate() {
        let defect = pair_completeness_defect(pair);
        if defect > 1e-10 {
            return Err(Error::InvalidInstrument(format!(
                "{who} setting {y}: outcome effects sum away from identity by {defect:e}"
            )));
        }
    }
    Ok(())
}

/// A single-qubit instrument as a set of Kraus operators.
///
/// Two completeness conventions are supported: a full channel
/// (`Σ KᵢᴴKᵢ = I`) and the branch of an instrument implementing one
/// effect (`Σ KᵢᴴKᵢ = E`). Both are checked at `1e-10` on construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Instrument {
    kraus: Vec<CMat2>,
}

impl Instrument {
    /// Wraps a Kraus set claiming to be a channel; errors with
    /// [`Error::InvalidInstrument`] if `Σ KᵢᴴKᵢ` deviates from `I` by
    /// more than `1e-10`.
    pub fn channel(kraus: Vec<CMat2>) -> Result<Self> {
        let defect = completeness_defect(&kraus, &CMat2::identity());
        if defect > 1e-10 {
            return Err(Error::InvalidInstrument(format!(
                "Kraus completeness deviates from identity by {defect:e}"
            )));
        }
        Ok(Instrument { kraus })
    }

    /// Wraps a Kraus set claiming to implement `target` (one measurement
    /// outcome); errors with [`Error::NotImplementing`] if `Σ KᵢᴴKᵢ`
    /// deviates from the effect matrix by more than `1e-10`.
    pub fn implementing(kraus: Vec<CMat2>, target: &Effect) -> Result<Self> {
        let defect = completeness_defect(&kraus, target.matrix());
        if defect > 1e-10 {
            return Err(Error::NotImplementing(defect));
        }
        Ok(Instrument { kraus })
    }

    /// The Kraus operators.
    pub fn kraus(&self) -> &[CMat2] {
        &self.kraus
    }

    /// Applies the map `m ↦ Σ Kᵢ m Kᵢᴴ`.
    pub fn apply(&self, m: &CMat2) -> CMat2 {
        let mut out = CMat2::zero();
        for k in &self.kraus {
            out = out + (*k * *m * k.adjoint());
        }
        out
    }
}

/// Largest entry deviation of `Σ KᵢᴴKᵢ` from `target`.
fn completeness_defect(kraus: &[CMat2], target: &CMat2) -> f64 {
    let mut sum = CMat2::zero();
    for k in kraus {
        sum = sum + (k.adjoint() * *k);
    }
    sum.max_abs_diff(target)
}

/// Applies the unselective sequential-measurement update to Bob's qubit:
/// `ρ' = (1/2) Σ_y Σ_b (I ⊗ √E_{b|y}) ρ (I ⊗ √E_{b|y})`, the Lüders
/// instrument for each effect averaged over a uniformly random setting
/// `y` and a forgotten outcome `b`.
///
/// `pairs[y]` are the two outcome effects of setting `y`; each pair must
/// sum to the identity within `1e-10`. Square roots come from the
/// closed form in [`Effect::sqrt_matrix`], so the update stays exact
/// even for sharp (singular) effects. The output is re-validated as a
/// state, which makes every simulation step a positivity check.
pub fn luders_update(state: &TwoQubitState, pairs: &[[Effect; 2]; 2]) -> Result<TwoQubitState> {
    validate_pairs(pairs, "update")?;
    let mut out = CMat4::zero();
    for pair in pairs {
        for eff in pair {
            let k = kron(&CMat2::identity(), &eff.sqrt_matrix());
            // √E is Hermitian, so the sandwich uses k on both sides.
            out = out + (k * *state.rho() * k).scale(0.5);
        }
    }
    TwoQubitState::new(out)
}

/// The same update as [`luders_update`] written as three Pauli
/// conjugations: for orthogonal unit axes `b0 ⊥ b1` and second-setting
/// sharpness `γ`,
/// `ρ' = ((2+s)/4) ρ + (1/4) Σ₀ρΣ₀ + ((1-s)/4) Σ₁ρΣ₁`
/// with `s = √(1-γ²)` and `Σᵢ = I ⊗ (bᵢ·σ)`. The first setting is sharp
/// along `b0`, as in every strategy produced by the planner.
///
/// Exposed so the two routes can be compared directly; they agree to
/// machine precision whenever the axes are orthogonal.
pub fn three_term_update(
    state: &TwoQubitState,
    b0: [f64; 3],
    b1: [f64; 3],
    gamma: f64,
) -> Result<TwoQubitState> {
    for axis in [b0, b1] {
        if (norm3(axis) - 1.0).abs() > 1e-10 {
            return Err(Error::Domain(format!("axis {axis:?} is not unit length")));
        }
    }
    if dot3(b0, b1).abs() > 1e-10 {
        return Err(Error::Domain(format!(
            "axes must be orthogonal, got b0·b1 = {:e}",
            dot3(b0, b1)
        )));
    }
    if !(0.0..=1.0).contains(&gamma) {
        return Err(Error::Domain(format!("sharpness gamma = {gamma} outside [0, 1]")));
    }
    let s = ((1.0 - gamma) * (1.0 + gamma)).sqrt();
    let s0 = kron(&CMat2::identity(), &crate::linalg::sigma_axis(b0));
    let s1 = kron(&CMat2::identity(), &crate::linalg::sigma_axis(b1));
    let rho = state.rho();
    let out = rho.scale((2.0 + s) / 4.0)
        + (s0 * *rho * s0).scale(0.25)
        + (s1 * *rho * s1).scale((1.0 - s) / 4.0);
    TwoQubitState::new(out)
}

/// Born-rule joint distribution `p(a, b | x, y)` of one Alice setting
/// pair and one Bob setting pair, stored settings-first.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointDistribution {
    p: [[[[f64; 2]; 2]; 2]; 2],
}

impl JointDistribution {
    /// `p(a, b | x, y)`.
    pub fn prob(&self, x: usize, y: usize, a: usize, b: usize) -> f64 {
        self.p[x][y][a][b]
    }

    /// The correlator `E_xy = p(a=b|xy) - p(a≠b|xy)`.
    pub fn correlator(&self, x: usize, y: usize) -> f64 {
        let q = &self.p[x][y];
        q[0][0] + q[1][1] - q[0][1] - q[1][0]
    }
}

/// Evaluates all sixteen Born probabilities
/// `p(a, b | x, y) = tr(ρ (A_{a|x} ⊗ B_{b|y}))`.
///
/// Both setting pairs must sum to the identity within `1e-10`. The
/// output is checked to be a normalized distribution within `1e-12`
/// per setting, which holds automatically for any valid state.
pub fn joint_distribution(
    state: &TwoQubitState,
    alice: &[[Effect; 2]; 2],
    bob: &[[Effect; 2]; 2],
) -> Result<JointDistribution> {
    validate_pairs(alice, "Alice")?;
    validate_pairs(bob, "Bob")?;
    let mut p = [[[[0.0; 2]; 2]; 2]; 2];
    for x in 0..2 {
        for y in 0..2 {
            let mut total = 0.0;
            for a in 0..2 {
                for b in 0..2 {
                    let op = kron(alice[x][a].matrix(), bob[y][b].matrix());
                    let val = (op * *state.rho()).trace();
                    if !(-1e-12..=1.0 + 1e-12).contains(&val.re) {
                        return Err(Error::Domain(format!(
                            "probability p({a},{b}|{x},{y}) = {} outside [0, 1]",
                            val.re
                        )));
                    }
                    p[x][y][a][b] = val.re;
                    total += val.re;
                }
            }
            if (total - 1.0).abs() > 1e-12 {
                return Err(Error::Domain(format!(
                    "setting ({x},{y}) probabilities sum to {total}, expected 1"
                )));
            }
        }
    }
    Ok(JointDistribution { p })
}

/// The CHSH functional in its game form,
/// `S = 2 [p(a=b|00) + p(a=b|01) + p(a=b|10) + p(a≠b|11) - 2]`,
/// identical to `E₀₀ + E₀₁ + E₁₀ - E₁₁` for normalized distributions.
pub fn chsh_value(d: &JointDistribution) -> f64 {
    let same = |x: usize, y: usize| d.prob(x, y, 0, 0) + d.prob(x, y, 1, 1);
    let diff = |x: usize, y: usize| d.prob(x, y, 0, 1) + d.prob(x, y, 1, 0);
    2.0 * (same(0, 0) + same(0, 1) + same(1, 0) + diff(1, 1) - 2.0)
}

/// The CHSH value evaluated as one operator expectation,
/// `tr(ρ [Â₀⊗(B̂₀+B̂₁) + Â₁⊗(B̂₀-B̂₁)])` with `M̂ = M₊ - M₋`.
///
/// Algebraically identical to running [`joint_distribution`] through
/// [`chsh_value`]; kept as an independent route for cross-checks.
pub fn chsh_operator_value(
    state: &TwoQubitState,
    alice: &[[Effect; 2]; 2],
    bob: &[[Effect; 2]; 2],
) -> Result<f64> {
    validate_pairs(alice, "Alice")?;
    validate_pairs(bob, "Bob")?;
    let observable = |pair: &[Effect; 2]| -> CMat2 { *pair[0].matrix() - *pair[1].matrix() };
    let a0 = observable(&alice[0]);
    let a1 = observable(&alice[1]);
    let b0 = observable(&bob[0]);
    let b1 = observable(&bob[1]);
    let s_op = kron(&a0, &(b0 + b1)) + kron(&a1, &(b0 - b1));
    Ok((s_op * *state.rho()).trace().re)
}

/// The Pauli correlation table `T_ij = tr(ρ (σᵢ ⊗ σⱼ))`, real for every
/// Hermitian state; entries with imaginary part above `1e-10` mean the
/// input is corrupt and raise [`Error::NonRealCorrelation`].
pub fn t_matrix(state: &TwoQubitState) -> Result<Mat3> {
    let mut t = Mat3::zero();
    for i in 0..3 {
        for j in 0..3 {
            let op = kron(&crate::linalg::pauli(i), &crate::linalg::pauli(j));
            let val = (op * *state.rho()).trace();
            if val.im.abs() > 1e-10 {
                return Err(Error::NonRealCorrelation(val.im));
            }
            t.e[i][j] = val.re;
        }
    }
    Ok(t)
}

/// Eigensystem of `T Tᵀ` together with the induced Bob axes: the data
/// the planner needs from a state.
///
/// `c0, c1` are the top two eigenvectors of `T Tᵀ` (Alice side),
/// `λ0 ≥ λ1` their eigenvalues clamped into `[0, 1]`, and
/// `bᵢ = Tᵀcᵢ / ‖Tᵀcᵢ‖` the matched Bob axes, so that `cᵢᵀ T bᵢ = √λᵢ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationSpectrum {
    /// Largest eigenvalue of `T Tᵀ`.
    pub lambda0: f64,
    /// Second eigenvalue of `T Tᵀ`.
    pub lambda1: f64,
    /// Alice axis for the sharp setting.
    pub c0: [f64; 3],
    /// Alice axis for the unsharp setting.
    pub c1: [f64; 3],
    /// Bob axis matched to `c0`.
    pub b0: [f64; 3],
    /// Bob axis matched to `c1`.
    pub b1: [f64; 3],
    /// True when some `‖Tᵀcᵢ‖` vanished (eigenvalue clamped to 0) and
    /// the corresponding Bob axis was filled in from the canonical list
    /// instead of from `T`.
    pub axes_fallback: bool,
}

/// Computes the [`CorrelationSpectrum`] of a state.
///
/// Degenerate eigenspaces of `T Tᵀ` inherit the deterministic canonical
/// basis of [`eig_sym3`], so repeated runs on the same state return
/// bit-identical axes. When `‖Tᵀcᵢ‖ < 1e-12` (the state carries no
/// correlation along `cᵢ`), `λᵢ` is clamped to 0 and `bᵢ` falls back to
/// the first canonical axis orthogonal to the Bob axes chosen so far.
pub fn correlation_spectrum(state: &TwoQubitState) -> Result<CorrelationSpectrum> {
    let t = t_matrix(state)?;
    let basis = eig_sym3(&t.gram_mmt())?;
    let c0 = basis.vectors[0];
    let c1 = basis.vectors[1];
    let mut lambdas = [basis.values[0].clamp(0.0, 1.0), basis.values[1].clamp(0.0, 1.0)];
    let mut bs: [[f64; 3]; 2] = [[0.0; 3]; 2];
    let mut fallback = false;
    for (i, ci) in [c0, c1].into_iter().enumerate() {
        let raw = t.mul_vec_t(ci);
        if norm3(raw) < 1e-12 {
            lambdas[i] = 0.0;
            bs[i] = canonical_completion(&bs[..i]);
            fallback = true;
        } else {
            bs[i] = normalize3(raw)?;
        }
    }
    Ok(CorrelationSpectrum {
        lambda0: lambdas[0],
        lambda1: lambdas[1],
        c0,
        c1,
        b0: bs[0],
        b1: bs[1],
        axes_fallback: fallback,
    })
}

/// First canonical axis with a significant component orthogonal to the
/// already-chosen ones, orthonormalized against them.
fn canonical_completion(chosen: &[[f64; 3]]) -> [f64; 3] {
    for axis in CANONICAL_AXES {
        let mut u = axis;
        for prev in chosen {
            let w = dot3(*prev, u);
            for r in 0..3 {
                u[r] -= w * prev[r];
            }
        }
        let n = norm3(u);
        if n > 0.5 {
            return [u[0] / n, u[1] / n, u[2] / n];
        }
    }
    // Two chosen axes cannot exclude all three canonical ones.
    unreachable!("canonical axes span R^3")
}

/// Splits an instrument implementing effect `E` into measurement and
/// disturbance: returns the residual channel `{Kᵢ E^{-1/2}} ∪ {I - Π_E}`
/// (Moore-Penrose inverse root, support projector `Π_E`), so that each
/// original Kraus operator factors exactly as `Kᵢ = Jᵢ √E`.
///
/// The input Kraus set must satisfy `Σ KᵢᴴKᵢ = E` within `1e-10`
/// ([`Error::NotImplementing`] otherwise). The output is validated as a
/// channel, which is the completeness identity
/// `Σ JᵢᴴJᵢ + (I - Π_E) = I`.
pub fn residual_decomposition(instr: &Instrument, target: &Effect) -> Result<Instrument> {
    let e = target.matrix();
    let defect = completeness_defect(instr.kraus(), e);
    if defect > 1e-10 {
        return Err(Error::NotImplementing(defect));
    }
    let inv_root = pinv_sqrt2(e)?;
    let proj = support_proj2(e)?;
    let mut residual: Vec<CMat2> = instr.kraus().iter().map(|k| *k * inv_root).collect();
    residual.push(CMat2::identity() - proj);
    Instrument::channel(residual)
}
