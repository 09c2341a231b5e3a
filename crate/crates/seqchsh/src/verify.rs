//! Seeded self-verification suites.
//!
//! Each suite re-checks one load-bearing identity of the crate on
//! randomized instances: the analytic CHSH recursion against the
//! Born-rule simulator, the two forms of the unselected update channel
//! against each other, the growth and small-angle laws of the
//! sharpness sequence, the residual decomposition of instruments, the
//! single-step correlation factors, and the bound sandwiches and
//! closed forms. The CLI `verify` subcommand is a thin wrapper over
//! [`run_suites`].
//!
//! ## Determinism
//!
//! All randomness flows from one `u64` seed through per-suite ChaCha
//! streams, so a given `(seed, trials)` pair reproduces the same cases,
//! the same verdicts, and the same first-failure messages on any
//! platform. `trials = 0` runs nothing and vacuously passes.
//!
//! ## Tolerances
//!
//! Every suite owns a default tolerance matched to what double
//! precision can attain for its identity (1e-9 for whole-sequence
//! equivalence, down to 1e-12 for single channel applications). A
//! caller-supplied override replaces all of them, which is the
//! intended way to demonstrate failure output: `--tol 1e-15` asks for
//! more than roundoff permits and duly fails.

use crate::bounds::{bk_closed_form, coeff_sequences, d_closed_forms, d_sequences, envelopes};
use crate::linalg::{dot3, norm3, normalize3, CMat2, CMat4};
use crate::quantum::{
    correlation_spectrum, effect, luders_update, make_family_state, make_schmidt_state,
    measurement_pair, residual_decomposition, t_matrix, three_term_update, Instrument,
    TwoQubitState,
};
use crate::strategy::{gamma_next, gamma_sequence, simulate_sequence, MeasurementPlan};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{FRAC_PI_4, TAU};

/// Knobs shared by every suite.
#[derive(Debug, Clone, Copy)]
pub struct VerifyConfig {
    /// Root seed; each suite derives its own independent stream.
    pub seed: u64,
    /// Randomized cases per suite; `0` skips everything (vacuous pass).
    pub trials: usize,
    /// When set, replaces every suite's default tolerance.
    pub tol: Option<f64>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig { seed: 7, trials: 200, tol: None }
    }
}

impl VerifyConfig {
    fn tol_or(&self, default: f64) -> f64 {
        self.tol.unwrap_or(default)
    }
}

/// Outcome of one suite: how many cases ran, how many failed, and the
/// first counterexample rendered as text.
#[derive(Debug, Clone)]
pub struct SuiteResult {
    /// Stable suite name (kebab-case, used in CLI output).
    pub name: &'static str,
    /// Cases executed.
    pub cases: usize,
    /// Cases that failed.
    pub failures: usize,
    /// Message for the first failing case, if any.
    pub first_failure: Option<String>,
}

impl SuiteResult {
    /// True when no case failed.
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

/// Accumulates per-case verdicts for one suite.
struct Recorder {
    name: &'static str,
    cases: usize,
    failures: usize,
    first_failure: Option<String>,
}

impl Recorder {
    fn new(name: &'static str) -> Self {
        Recorder { name, cases: 0, failures: 0, first_failure: None }
    }

    fn case(&mut self, verdict: std::result::Result<(), String>) {
        self.cases += 1;
        if let Err(msg) = verdict {
            self.failures += 1;
            if self.first_failure.is_none() {
                self.first_failure = Some(msg);
            }
        }
    }

    fn finish(self) -> SuiteResult {
        SuiteResult {
            name: self.name,
            cases: self.cases,
            failures: self.failures,
            first_failure: self.first_failure,
        }
    }
}

fn suite_rng(cfg: &VerifyConfig, salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(cfg.seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

fn rand_axis(rng: &mut ChaCha8Rng) -> [f64; 3] {
    let z: f64 = rng.random_range(-1.0..=1.0);
    let phi: f64 = rng.random_range(0.0..TAU);
    let r = (1.0 - z * z).max(0.0).sqrt();
    [r * phi.cos(), r * phi.sin(), z]
}

fn rand_orthonormal_pair(rng: &mut ChaCha8Rng) -> ([f64; 3], [f64; 3]) {
    let a = rand_axis(rng);
    loop {
        let v = rand_axis(rng);
        let proj = dot3(v, a);
        if proj.abs() > 0.9 {
            continue;
        }
        let raw = [v[0] - proj * a[0], v[1] - proj * a[1], v[2] - proj * a[2]];
        if norm3(raw) > 1e-6 {
            return (a, normalize3(raw).expect("nonzero rejection"));
        }
    }
}

/// Random full-rank density matrix `G G† / tr(G G†)`; Hermitian and
/// PSD by construction.
fn rand_state(rng: &mut ChaCha8Rng) -> TwoQubitState {
    let mut g = CMat4::zero();
    for row in &mut g.e {
        for entry in row.iter_mut() {
            *entry = Complex64::new(rng.random_range(-1.0..=1.0), rng.random_range(-1.0..=1.0));
        }
    }
    let prod = g * g.adjoint();
    let trace = prod.trace().re;
    TwoQubitState::new(prod.scale(1.0 / trace)).expect("Gram state is valid")
}

/// Random single-qubit matrix with entries uniform in the unit square.
fn rand_cmat2(rng: &mut ChaCha8Rng) -> CMat2 {
    let mut g = CMat2::zero();
    for row in &mut g.e {
        for entry in row.iter_mut() {
            *entry = Complex64::new(rng.random_range(-1.0..=1.0), rng.random_range(-1.0..=1.0));
        }
    }
    g
}

/// Random planner-compatible state: an entangled member of the
/// two-parameter family or a Schmidt pure state.
fn rand_planner_state(rng: &mut ChaCha8Rng) -> (TwoQubitState, String) {
    if rng.random_bool(0.5) {
        let alpha: f64 = rng.random_range(0.15..=0.85);
        let r = (alpha * (1.0 - alpha)).sqrt() * rng.random_range(0.35..=0.999);
        let phase: f64 = rng.random_range(0.0..TAU);
        let beta = Complex64::from_polar(r, phase);
        let state = make_family_state(alpha, beta).expect("family parameters in range");
        (state, format!("family:{alpha:e},{:e},{:e}", beta.re, beta.im))
    } else {
        let phi: f64 = rng.random_range(0.05..=FRAC_PI_4);
        let state = make_schmidt_state(phi).expect("schmidt angle in range");
        (state, format!("schmidt:{phi:e}"))
    }
}

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    (rng.random_range(lo.ln()..=hi.ln())).exp()
}

/// Analytic recursion vs Born-rule simulation on random planner states
/// with arbitrary valid sharpness lists.
pub fn suite_oracle_equivalence(cfg: &VerifyConfig) -> SuiteResult {
    let mut rec = Recorder::new("oracle-equivalence");
    let tol = cfg.tol_or(1e-9);
    let mut rng = suite_rng(cfg, 1);
    for _ in 0..cfg.trials {
        let (state, descr) = rand_planner_state(&mut rng);
        let theta = log_uniform(&mut rng, 1e-3, FRAC_PI_4);
        let n = rng.random_range(1..=6);
        let mut gammas: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..=1.0)).collect();
        if rng.random_bool(0.05) {
            let pos = rng.random_range(0..n);
            gammas[pos] = 1.0;
        }
        rec.case((|| {
            let spec = correlation_spectrum(&state).map_err(|e| e.to_string())?;
            let plan = MeasurementPlan::new(
                theta,
                0.01,
                gammas.clone(),
                spec.c0,
                spec.c1,
                spec.b0,
                spec.b1,
                spec.lambda0,
                spec.lambda1,
            )
            .map_err(|e| e.to_string())?;
            let report = simulate_sequence(&state, &plan).map_err(|e| e.to_string())?;
            for row in &report.rows {
                let delta = (row.s_analytic - row.s_simulated).abs();
                if delta > tol {
                    return Err(format!(
                        "{descr} θ={theta:e} k={}: analytic {:e} vs simulated {:e} (Δ={delta:e})",
                        row.k, row.s_analytic, row.s_simulated
                    ));
                }
            }
            Ok(())
        })());
    }
    rec.finish()
}

/// Square-root form of the unselected Bob update vs its three-term
/// Pauli form, on random full-rank states.
pub fn suite_update_channels(cfg: &VerifyConfig) -> SuiteResult {
    let mut rec = Recorder::new("update-channels");
    let tol = cfg.tol_or(1e-12);
    let mut rng = suite_rng(cfg, 2);
    for _ in 0..cfg.trials {
        let state = rand_state(&mut rng);
        let (b0, b1) = rand_orthonormal_pair(&mut rng);
        let gamma = if rng.random_bool(0.1) {
            1.0
        } else if rng.random_bool(0.05) {
            0.0
        } else {
            rng.random_range(0.0..=1.0)
        };
        rec.case((|| {
            let pairs = [
                measurement_pair(1.0, b0).map_err(|e| e.to_string())?,
                measurement_pair(gamma, b1).map_err(|e| e.to_string())?,
            ];
            let via_sqrt = luders_update(&state, &pairs).map_err(|e| e.to_string())?;
            let via_pauli = three_term_update(&state, b0, b1, gamma).map_err(|e| e.to_string())?;
            let diff = via_sqrt.rho().max_abs_diff(via_pauli.rho());
            if diff > tol {
                return Err(format!("γ={gamma:e}: channel forms differ by {diff:e}"));
            }
            let trace_err = (via_sqrt.rho().trace().re - 1.0).abs();
            if trace_err > tol.max(1e-12) {
                return Err(format!("γ={gamma:e}: trace drifts by {trace_err:e}"));
            }
            Ok(())
        })());
    }
    rec.finish()
}

/// Finite sharpness prefixes grow strictly with consecutive ratio > 2,
/// on a fixed 10×3 grid plus random parameters.
pub fn suite_sharpness_growth(cfg: &VerifyConfig) -> SuiteResult {
    let mut rec = Recorder::new("sharpness-growth");
    let mut rng = suite_rng(cfg, 3);
    let check = |theta: f64, epsilon: f64, lambda1: f64| -> std::result::Result<(), String> {
        let seq = gamma_sequence(theta, epsilon, 8, lambda1).map_err(|e| e.to_string())?;
        let prefix = seq.finite_prefix();
        if prefix.is_empty() {
            return Err(format!("θ={theta:e} ε={epsilon:e}: no finite entries"));
        }
        for pair in prefix.windows(2) {
            let grows = pair[1] > 2.0 * pair[0];
            if !grows {
                return Err(format!(
                    "θ={theta:e} ε={epsilon:e}: ratio {:e}/{:e} = {:e} ≤ 2",
                    pair[1],
                    pair[0],
                    pair[1] / pair[0]
                ));
            }
        }
        Ok(())
    };
    if cfg.trials > 0 {
        for j in 0..10 {
            let theta = FRAC_PI_4 * 10f64.powi(-j);
            for epsilon in [0.01, 0.1, 1.0] {
                rec.case(check(theta, epsilon, 1.0));
            }
        }
        for _ in 0..cfg.trials {
            let theta = log_uniform(&mut rng, 1e-10, FRAC_PI_4);
            let epsilon: f64 = rng.random_range(0.001..=1.5);
            let lambda1: f64 = rng.random_range(0.1..=1.0);
            rec.case(check(theta, epsilon, lambda1));
        }
    }
    rec.finish()
}

/// As θ = 10^(-m) shrinks, the n-th sharpness becomes finite and then
/// decreases monotonically toward 0.
pub fn suite_small_angle_limit(cfg: &VerifyConfig) -> SuiteResult {
    let mut rec = Recorder::new("small-angle-limit");
    if cfg.trials > 0 {
        for epsilon in [0.01, 0.1, 1.0] {
            for n in 1..=6 {
                rec.case((|| {
                    let mut last: Option<f64> = None;
                    for m in 4..=18 {
                        let theta = 10f64.powi(-m);
                        let seq = gamma_sequence(theta, epsilon, n, 1.0)
                            .map_err(|e| e.to_string())?;
                        let value = seq.gammas[n - 1].finite();
                        match (last, value) {
                            (Some(prev), Some(v)) if v >= prev => {
                                return Err(format!(
                                    "ε={epsilon:e} n={n}: γ not decreasing at m={m} ({v:e} ≥ {prev:e})"
                                ));
                            }
                            (Some(_), None) => {
                                return Err(format!(
                                    "ε={epsilon:e} n={n}: finite at m={} but not at m={m}",
                                    m - 1
                                ));
                            }
                            _ => {}
                        }
                        if value.is_some() {
                            last = value;
                        }
                    }
                    match last {
                        Some(v) if v < 1.0 => Ok(()),
                        Some(v) => Err(format!("ε={epsilon:e} n={n}: final γ = {v:e} did not shrink")),
                        None => Err(format!("ε={epsilon:e} n={n}: never finite for m ≤ 18")),
                    }
                })());
            }
        }
    }
    rec.finish()
}

/// Residual decomposition: for random instruments implementing random
/// effects, the Lüders-then-residual composition reproduces the
/// original channel on the operator basis.
pub fn suite_residual_decomposition(cfg: &VerifyConfig) -> SuiteResult {
    let mut rec = Recorder::new("residual-decomposition");
    let tol = cfg.tol_or(1e-10);
    let mut rng = suite_rng(cfg, 5);
    for _ in 0..cfg.trials {
        let gamma = if rng.random_bool(0.15) {
            1.0
        } else if rng.random_bool(0.1) {
            0.0
        } else {
            rng.random_range(0.0..=1.0)
        };
        let axis = rand_axis(&mut rng);
        let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        let pieces = rng.random_range(1..=3);
        let gs: Vec<CMat2> = (0..pieces).map(|_| rand_cmat2(&mut rng)).collect();
        rec.case((|| {
            let target = effect(gamma, axis, sign).map_err(|e| e.to_string())?;
            let sqrt_e = target.sqrt_matrix();
            let mut gram = CMat2::zero();
            for g in &gs {
                gram = gram + g.adjoint() * *g;
            }
            let whiten = crate::linalg::pinv_sqrt2(&gram).map_err(|e| e.to_string())?;
            let kraus: Vec<CMat2> = gs.iter().map(|g| *g * whiten * sqrt_e).collect();
            let instr =
                Instrument::implementing(kraus.clone(), &target).map_err(|e| e.to_string())?;
            let residual = residual_decomposition(&instr, &target).map_err(|e| e.to_string())?;
            for (i, k) in kraus.iter().enumerate() {
                let rebuilt = residual.kraus()[i] * sqrt_e;
                let diff = rebuilt.max_abs_diff(k);
                if diff > tol {
                    return Err(format!("γ={gamma:e}: Kraus {i} reconstruction off by {diff:e}"));
                }
            }
            for basis in 0..4 {
                let input =
                    if basis == 0 { CMat2::identity() } else { crate::linalg::pauli(basis - 1) };
                let direct = instr.apply(&input);
                let composed = residual.apply(&(sqrt_e * input * sqrt_e));
                let diff = direct.max_abs_diff(&composed);
                if diff > tol {
                    return Err(format!(
                        "γ={gamma:e}: channel mismatch {diff:e} on basis element {basis}"
                    ));
                }
            }
            Ok(())
        })());
    }
    rec.finish()
}

/// One unselected Bob step scales the correlation column along `b₀` by
/// `(1+√(1-γ²))/2` and the column along `b₁` by `1/2`, for any state.
pub fn suite_single_step_factors(cfg: &VerifyConfig) -> SuiteResult {
    let mut rec = Recorder::new("single-step-factors");
    let tol = cfg.tol_or(1e-10);
    let mut rng = suite_rng(cfg, 6);
    for _ in 0..cfg.trials {
        let state = rand_state(&mut rng);
        let (b0, b1) = rand_orthonormal_pair(&mut rng);
        let gamma = if rng.random_bool(0.1) { 1.0 } else { rng.random_range(0.0..=1.0) };
        rec.case((|| {
            let before = t_matrix(&state).map_err(|e| e.to_string())?;
            let after_state =
                three_term_update(&state, b0, b1, gamma).map_err(|e| e.to_string())?;
            let after = t_matrix(&after_state).map_err(|e| e.to_string())?;
            let s = ((1.0 - gamma) * (1.0 + gamma)).sqrt();
            let checks = [(b0, (1.0 + s) / 2.0, "b0"), (b1, 0.5, "b1")];
            for (axis, factor, label) in checks {
                let old = before.mul_vec(axis);
                let new = after.mul_vec(axis);
                for i in 0..3 {
                    let delta = (new[i] - factor * old[i]).abs();
                    if delta > tol {
                        return Err(format!(
                            "γ={gamma:e}: {label} column deviates by {delta:e} in component {i}"
                        ));
                    }
                }
            }
            Ok(())
        })());
    }
    rec.finish()
}

/// Envelopes sandwich the exact recursion on the validity region, on a
/// fixed grid plus random parameters.
pub fn suite_envelope_sandwich(cfg: &VerifyConfig) -> SuiteResult {
    let mut rec = Recorder::new("envelope-sandwich");
    let tol = cfg.tol_or(1e-12);
    let mut rng = suite_rng(cfg, 7);
    let check = |theta: f64, epsilon: f64| -> std::result::Result<(), String> {
        let n = 8;
        let env = envelopes(theta, epsilon, n).map_err(|e| e.to_string())?;
        let mut prefix: Vec<f64> = Vec::new();
        for k in 1..=n {
            let raw = gamma_next(theta, epsilon, 1.0, &prefix).map_err(|e| e.to_string())?;
            let idx = k - 1;
            if env.lower[idx] > raw * (1.0 + tol) + 1e-15 {
                return Err(format!(
                    "θ={theta:e} ε={epsilon:e} k={k}: lower {:e} exceeds γ {raw:e}",
                    env.lower[idx]
                ));
            }
            if env.upper[idx] < raw * (1.0 - tol) - 1e-15 {
                return Err(format!(
                    "θ={theta:e} ε={epsilon:e} k={k}: upper {:e} is below γ {raw:e}",
                    env.upper[idx]
                ));
            }
            // The sandwich just checked keeps raw in (0,1) while the upper
            // envelope does, which is the region where the bounds apply.
            if env.upper[idx] < 1.0 {
                prefix.push(raw);
            } else {
                break;
            }
        }
        Ok(())
    };
    if cfg.trials > 0 {
        for m in 1..=8 {
            let theta = 10f64.powi(-m);
            for epsilon in [0.01, 0.1, 1.0] {
                rec.case(check(theta, epsilon));
            }
        }
        for _ in 0..cfg.trials {
            let theta = log_uniform(&mut rng, 1e-8, FRAC_PI_4);
            let epsilon: f64 = rng.random_range(0.001..=1.5);
            rec.case(check(theta, epsilon));
        }
    }
    rec.finish()
}

/// Squaring-recursion closed forms, straddling orderings, and the
/// affine doubling formula.
pub fn suite_closed_forms(cfg: &VerifyConfig) -> SuiteResult {
    let mut rec = Recorder::new("closed-forms");
    let tol = cfg.tol_or(1e-9);
    let mut rng = suite_rng(cfg, 8);
    let check_eps = |epsilon: f64| -> std::result::Result<(), String> {
        let n = 40;
        let (d_lower, d_upper) = d_sequences(epsilon, n).map_err(|e| e.to_string())?;
        for k in 1..=n {
            let (lo_closed, hi_closed) = d_closed_forms(epsilon, k).map_err(|e| e.to_string())?;
            if k >= 4 {
                let rec_log = d_lower[k - 4].log2();
                let closed = lo_closed.expect("defined for k ≥ 4").log2();
                if (rec_log - closed).abs() > tol * closed.abs().max(1.0) {
                    return Err(format!(
                        "ε={epsilon:e} k={k}: lower recursion {rec_log:e} vs closed {closed:e}"
                    ));
                }
            }
            let rec_log = d_upper[k - 1].log2();
            let closed = hi_closed.log2();
            if (rec_log - closed).abs() > tol * closed.abs().max(1.0) {
                return Err(format!(
                    "ε={epsilon:e} k={k}: upper recursion {rec_log:e} vs closed {closed:e}"
                ));
            }
        }
        let (c_lower, c_upper) = coeff_sequences(epsilon, 20).map_err(|e| e.to_string())?;
        for k in 4..=20 {
            if d_lower[k - 4].log2() > c_lower[k - 1].log2() + tol {
                return Err(format!("ε={epsilon:e} k={k}: d↓ exceeds c↓"));
            }
        }
        for k in 1..=20 {
            if c_upper[k - 1].log2() > d_upper[k - 1].log2() + tol {
                return Err(format!("ε={epsilon:e} k={k}: c↑ exceeds d↑"));
            }
        }
        Ok(())
    };
    if cfg.trials > 0 {
        for epsilon in [0.01, 0.1, 1.0] {
            rec.case(check_eps(epsilon));
        }
        for _ in 0..cfg.trials {
            rec.case(check_eps(rng.random_range(0.0..=2.0)));
        }
        for _ in 0..cfg.trials {
            let k0 = rng.random_range(1..=6);
            let k_max = k0 + rng.random_range(1..=10);
            let b0: f64 = rng.random_range(-5.0..=5.0);
            let t: f64 = rng.random_range(-5.0..=5.0);
            let c: f64 = rng.random_range(-5.0..=5.0);
            rec.case((|| {
                let mut b = b0;
                for k in (k0 + 1)..=k_max {
                    b = 2.0 * b + k as f64 * t + c;
                    let closed = bk_closed_form(k, k0, b0, t, c).map_err(|e| e.to_string())?;
                    if (closed - b).abs() > 1e-9 * b.abs().max(1.0) {
                        return Err(format!(
                            "k0={k0} k={k} b0={b0:e} t={t:e} c={c:e}: closed {closed:e} vs iterated {b:e}"
                        ));
                    }
                }
                Ok(())
            })());
        }
    }
    rec.finish()
}

/// Runs every suite in a fixed order.
pub fn run_suites(cfg: &VerifyConfig) -> Vec<SuiteResult> {
    vec![
        suite_oracle_equivalence(cfg),
        suite_update_channels(cfg),
        suite_sharpness_growth(cfg),
        suite_small_angle_limit(cfg),
        suite_residual_decomposition(cfg),
        suite_single_step_factors(cfg),
        suite_envelope_sandwich(cfg),
        suite_closed_forms(cfg),
    ]
}
