//! Plan documents, CSV emitters, and the `seqchsh` command entry points.
//!
//! The binary is a thin shell over this module: every subcommand is a
//! plain function from parsed flags to a string (JSON or CSV), so the
//! integration tests drive the exact code path the binary runs.
//!
//! ## Output contract
//!
//! Machine-readable output goes to `--out` or stdout; human summaries
//! go to stderr. Every floating-point field is serialized as
//! `{:.16e}` (17 significant digits), which round-trips to the
//! identical double, uses `.` as the decimal separator regardless of
//! locale, and ends lines with `\n`. Identical flags and seed
//! therefore produce byte-identical files on any platform.
//!
//! ## Exit codes
//!
//! - `0`: success.
//! - `1`: usage errors (bad flags, unparsable descriptors, I/O).
//! - `2`: the planner's hypothesis on the state fails
//!   ([`Error::HypothesisViolated`]).
//! - `3`: the requested violation count needs angles below what double
//!   precision represents ([`Error::InfeasibleAtPrecision`]).
//! - `4`: a self-check failed: `verify` suite or the simulator's
//!   analytic/Born cross-check ([`Error::Verification`]).

use crate::bounds::{coeff_sequences, d_closed_forms, d_sequences, envelopes};
use crate::quantum::{make_bell_state, make_family_state, make_schmidt_state, TwoQubitState};
use crate::strategy::{
    build_plan, count_violations, simulate_sequence, MeasurementPlan, ViolationReport,
};
use crate::verify::{run_suites, SuiteResult, VerifyConfig};
use crate::{Error, Result};

use clap::{Parser, Subcommand};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_PI_4;
use std::fmt;
use std::io;
use std::path::PathBuf;
use std::str::FromStr;

/// Largest `n` the `plan` subcommand accepts. The library's angle
/// search stays honest a little further (n = 10 near θ ≈ 1e-153), but
/// past this ceiling the certified angles drop below ~1e-37 and the
/// printed plans stop being usable numbers at double precision.
pub const PLAN_N_CEILING: usize = 8;

/// Deviation between analytic and simulated CHSH values beyond which
/// `simulate` declares its own output untrustworthy and exits 4.
pub const SIMULATE_SELF_CHECK: f64 = 1e-9;

/// Initial state selector, as written on the command line and stored
/// in plan documents.
#[derive(Debug, Clone, PartialEq)]
pub enum StateDescriptor {
    /// The maximally entangled two-qubit state.
    Bell,
    /// Pure state with Schmidt angle `φ ∈ (0, π/4]`.
    Schmidt {
        /// Schmidt angle.
        phi: f64,
    },
    /// Member of the rank-two family supported on the extreme
    /// computational corners, parameterized by weight `α` and
    /// off-diagonal `β`.
    Family {
        /// Corner weight `α ∈ [0, 1]`.
        alpha: f64,
        /// Real part of `β`.
        beta_re: f64,
        /// Imaginary part of `β`.
        beta_im: f64,
    },
    /// The maximally mixed state (useful only as a simulate override;
    /// it violates the planner's hypothesis).
    Mixed,
}

impl StateDescriptor {
    /// Constructs the described density matrix.
    pub fn build(&self) -> Result<TwoQubitState> {
        match self {
            StateDescriptor::Bell => Ok(make_bell_state()),
            StateDescriptor::Schmidt { phi } => make_schmidt_state(*phi),
            StateDescriptor::Family { alpha, beta_re, beta_im } => {
                make_family_state(*alpha, Complex64::new(*beta_re, *beta_im))
            }
            StateDescriptor::Mixed => Ok(TwoQubitState::maximally_mixed()),
        }
    }
}

impl fmt::Display for StateDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StateDescriptor::Bell => write!(f, "bell"),
            StateDescriptor::Schmidt { phi } => write!(f, "schmidt:{phi:e}"),
            StateDescriptor::Family { alpha, beta_re, beta_im } => {
                write!(f, "family:{alpha:e},{beta_re:e},{beta_im:e}")
            }
            StateDescriptor::Mixed => write!(f, "mixed"),
        }
    }
}

impl FromStr for StateDescriptor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |msg: &str| Error::Domain(format!("state descriptor '{s}': {msg}"));
        let parse_f64 = |field: &str, text: &str| -> Result<f64> {
            text.trim().parse::<f64>().map_err(|_| bad(&format!("cannot parse {field} '{text}'")))
        };
        match s.split_once(':') {
            None => match s {
                "bell" => Ok(StateDescriptor::Bell),
                "mixed" => Ok(StateDescriptor::Mixed),
                _ => Err(bad("expected bell, mixed, schmidt:PHI, or family:ALPHA,RE,IM")),
            },
            Some(("schmidt", arg)) => Ok(StateDescriptor::Schmidt { phi: parse_f64("phi", arg)? }),
            Some(("family", args)) => {
                let parts: Vec<&str> = args.split(',').collect();
                if parts.len() != 3 {
                    return Err(bad("family takes exactly alpha,beta_re,beta_im"));
                }
                Ok(StateDescriptor::Family {
                    alpha: parse_f64("alpha", parts[0])?,
                    beta_re: parse_f64("beta_re", parts[1])?,
                    beta_im: parse_f64("beta_im", parts[2])?,
                })
            }
            Some((kind, _)) => Err(bad(&format!("unknown state kind '{kind}'"))),
        }
    }
}

/// Serialized measurement plan: everything `simulate` needs, with the
/// provenance (state descriptor, ε) that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanDocument {
    /// Format version; currently always `"1"`.
    pub schema_version: String,
    /// Alice angle.
    pub theta: f64,
    /// Overshoot the sharpnesses were planned with.
    pub epsilon: f64,
    /// Number of sequential measurements.
    pub n: usize,
    /// Sharpness `γ_k` per position, length `n`.
    pub gammas: Vec<f64>,
    /// State the plan was derived for.
    pub state_descriptor: String,
    /// Largest correlation eigenvalue of that state.
    pub lambda0: f64,
    /// Second correlation eigenvalue.
    pub lambda1: f64,
    /// Measurement axes in order `c0, c1, b0, b1`.
    pub axes: [[f64; 3]; 4],
}

impl PlanDocument {
    /// Captures a plan together with the descriptor it was built from.
    pub fn from_plan(plan: &MeasurementPlan, state: &StateDescriptor) -> Self {
        PlanDocument {
            schema_version: "1".to_string(),
            theta: plan.theta(),
            epsilon: plan.epsilon(),
            n: plan.n(),
            gammas: plan.gammas().to_vec(),
            state_descriptor: state.to_string(),
            lambda0: plan.lambda0(),
            lambda1: plan.lambda1(),
            axes: [plan.c0(), plan.c1(), plan.b0(), plan.b1()],
        }
    }

    /// Reconstructs the validated plan. Rejects unknown schema
    /// versions and length mismatches before the plan's own checks.
    pub fn to_plan(&self) -> Result<MeasurementPlan> {
        if self.schema_version != "1" {
            return Err(Error::Domain(format!(
                "unsupported plan schema version '{}'",
                self.schema_version
            )));
        }
        if self.gammas.len() != self.n {
            return Err(Error::Domain(format!(
                "plan declares n = {} but carries {} gammas",
                self.n,
                self.gammas.len()
            )));
        }
        MeasurementPlan::new(
            self.theta,
            self.epsilon,
            self.gammas.clone(),
            self.axes[0],
            self.axes[1],
            self.axes[2],
            self.axes[3],
            self.lambda0,
            self.lambda1,
        )
    }

    /// The state recorded in the document.
    pub fn state(&self) -> Result<StateDescriptor> {
        self.state_descriptor.parse()
    }

    /// Pretty JSON with every float in 17-significant-digit scientific
    /// notation, newline-terminated.
    pub fn to_json(&self) -> String {
        let mut buf = Vec::new();
        let mut ser = serde_json::Serializer::with_formatter(&mut buf, SciFormatter::new());
        self.serialize(&mut ser).expect("plan serialization cannot fail");
        buf.push(b'\n');
        String::from_utf8(buf).expect("serializer emits UTF-8")
    }

    /// Parses a document produced by [`PlanDocument::to_json`] (or any
    /// JSON with the same fields).
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Domain(format!("plan file: {e}")))
    }
}

/// Pretty-printing JSON formatter that renders every `f64` as
/// `{:.16e}` so documents round-trip bit-exactly.
struct SciFormatter<'a> {
    inner: serde_json::ser::PrettyFormatter<'a>,
}

impl SciFormatter<'_> {
    fn new() -> Self {
        SciFormatter { inner: serde_json::ser::PrettyFormatter::new() }
    }
}

impl serde_json::ser::Formatter for SciFormatter<'_> {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        write!(writer, "{value:.16e}")
    }

    fn begin_array<W>(&mut self, writer: &mut W) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        self.inner.begin_array(writer)
    }

    fn end_array<W>(&mut self, writer: &mut W) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        self.inner.end_array(writer)
    }

    fn begin_array_value<W>(&mut self, writer: &mut W, first: bool) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        self.inner.begin_array_value(writer, first)
    }

    fn end_array_value<W>(&mut self, writer: &mut W) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        self.inner.end_array_value(writer)
    }

    fn begin_object<W>(&mut self, writer: &mut W) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        self.inner.begin_object(writer)
    }

    fn end_object<W>(&mut self, writer: &mut W) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        self.inner.end_object(writer)
    }

    fn begin_object_key<W>(&mut self, writer: &mut W, first: bool) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        self.inner.begin_object_key(writer, first)
    }

    fn begin_object_value<W>(&mut self, writer: &mut W) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        self.inner.begin_object_value(writer)
    }

    fn end_object_value<W>(&mut self, writer: &mut W) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        self.inner.end_object_value(writer)
    }
}

/// One point of a θ×ε scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanRow {
    /// Alice angle.
    pub theta: f64,
    /// Overshoot.
    pub epsilon: f64,
    /// Consecutive violations certified from position 1.
    pub n_violations: usize,
}

fn sci(v: f64) -> String {
    format!("{v:.16e}")
}

/// Renders a simulation transcript as CSV.
pub fn violation_report_csv(report: &ViolationReport) -> String {
    let mut out = String::from("k,gamma_k,S_analytic,S_simulated,violates,bound_ok\n");
    for row in &report.rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            row.k,
            sci(row.gamma_k),
            sci(row.s_analytic),
            sci(row.s_simulated),
            row.violates,
            row.bound_ok
        ));
    }
    out
}

/// Renders scan rows as CSV (already in output order).
pub fn scan_csv(rows: &[ScanRow]) -> String {
    let mut out = String::from("theta,epsilon,n_violations\n");
    for row in rows {
        out.push_str(&format!("{},{},{}\n", sci(row.theta), sci(row.epsilon), row.n_violations));
    }
    out
}

/// Plans `n` sequential violations with overshoot `epsilon` on the
/// given state. Fails with [`Error::InfeasibleAtPrecision`] above
/// [`PLAN_N_CEILING`] and with the planner's own errors otherwise.
pub fn cmd_plan(n: usize, epsilon: f64, state: &StateDescriptor) -> Result<PlanDocument> {
    if n == 0 {
        return Err(Error::Domain("n must be at least 1".into()));
    }
    if n > PLAN_N_CEILING {
        return Err(Error::InfeasibleAtPrecision(n));
    }
    let built = state.build()?;
    let plan = build_plan(&built, n, epsilon)?;
    Ok(PlanDocument::from_plan(&plan, state))
}

/// Runs a plan document, on its recorded state or an override, and
/// renders the transcript. The analytic and Born-rule paths must agree
/// within [`SIMULATE_SELF_CHECK`] or the result is rejected.
pub fn cmd_simulate(
    doc: &PlanDocument,
    override_state: Option<&StateDescriptor>,
) -> Result<ViolationReport> {
    let plan = doc.to_plan()?;
    let descriptor = match override_state {
        Some(d) => d.clone(),
        None => doc.state()?,
    };
    let state = descriptor.build()?;
    let report = simulate_sequence(&state, &plan)?;
    let deviation = report.max_deviation();
    if deviation > SIMULATE_SELF_CHECK {
        return Err(Error::Verification(format!(
            "analytic and simulated CHSH values disagree by {deviation:e} (limit {SIMULATE_SELF_CHECK:e})"
        )));
    }
    Ok(report)
}

/// Counts violations over a logarithmic θ grid for each ε.
///
/// The grid is `θ_i = theta_max · 10^(-i / points_per_decade)` down to
/// `theta_min`; rows are ordered by ε ascending, then θ descending
/// (the natural grid order).
pub fn cmd_scan(
    epsilon_list: &[f64],
    theta_min: f64,
    theta_max: f64,
    points_per_decade: usize,
    cap: usize,
) -> Result<Vec<ScanRow>> {
    if epsilon_list.is_empty() {
        return Err(Error::Domain("epsilon list must not be empty".into()));
    }
    for &eps in epsilon_list {
        if !(eps > 0.0 && eps <= 1.0) {
            return Err(Error::Domain(format!("epsilon = {eps} outside (0, 1]")));
        }
    }
    if !(theta_min > 0.0 && theta_min < theta_max && theta_max <= FRAC_PI_4) {
        return Err(Error::Domain(format!(
            "need 0 < theta-min < theta-max ≤ π/4, got [{theta_min}, {theta_max}]"
        )));
    }
    if points_per_decade == 0 {
        return Err(Error::Domain("points-per-decade must be at least 1".into()));
    }
    if cap == 0 {
        return Err(Error::Domain("cap must be at least 1".into()));
    }
    let mut eps_sorted = epsilon_list.to_vec();
    eps_sorted.sort_by(|a, b| a.partial_cmp(b).expect("validated finite"));
    let decades = (theta_max / theta_min).log10();
    let steps = (decades * points_per_decade as f64).floor() as usize;
    let mut rows = Vec::with_capacity(eps_sorted.len() * (steps + 1));
    for &epsilon in &eps_sorted {
        for i in 0..=steps {
            let theta = theta_max * 10f64.powf(-(i as f64) / points_per_decade as f64);
            let n_violations = count_violations(theta, epsilon, 1.0, cap)?;
            rows.push(ScanRow { theta, epsilon, n_violations });
        }
    }
    Ok(rows)
}

/// Renders the bound table for `k = 1..=n` at one `(θ, ε)`: envelope
/// values, coefficient logs, `d`-sequence logs, and the closed forms.
/// Lower `d` columns are `NaN` below their base index 4.
pub fn cmd_bounds(n: usize, epsilon: f64, theta: f64) -> Result<String> {
    let env = envelopes(theta, epsilon, n)?;
    let (c_lower, c_upper) = coeff_sequences(epsilon, n)?;
    let (d_lower, d_upper) = d_sequences(epsilon, n)?;
    let mut out = String::from(
        "k,p_lo,p_hi,c_lo_log2,c_hi_log2,d_lo_log2,d_hi_log2,d_lo_closed_log2,d_hi_closed_log2\n",
    );
    for k in 1..=n {
        let (lo_closed, hi_closed) = d_closed_forms(epsilon, k)?;
        let d_lo = if k >= 4 { d_lower[k - 4].log2() } else { f64::NAN };
        let d_lo_closed = lo_closed.map_or(f64::NAN, |v| v.log2());
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            k,
            sci(env.lower[k - 1]),
            sci(env.upper[k - 1]),
            sci(c_lower[k - 1].log2()),
            sci(c_upper[k - 1].log2()),
            sci(d_lo),
            sci(d_upper[k - 1].log2()),
            sci(d_lo_closed),
            sci(hi_closed.log2())
        ));
    }
    Ok(out)
}

/// Runs the verification suites and renders one line per suite plus a
/// closing verdict.
pub fn cmd_verify(config: &VerifyConfig) -> (Vec<SuiteResult>, String) {
    let results = run_suites(config);
    let mut out = String::new();
    for r in &results {
        out.push_str(&format!("{}: {} cases, {} failures\n", r.name, r.cases, r.failures));
        if let Some(msg) = &r.first_failure {
            out.push_str(&format!("  first failure: {msg}\n"));
        }
    }
    let failed = results.iter().filter(|r| !r.passed()).count();
    if failed == 0 {
        out.push_str(&format!("all {} suites passed\n", results.len()));
    } else {
        out.push_str(&format!("{failed} of {} suites failed\n", results.len()));
    }
    (results, out)
}

/// Command-line interface of the `seqchsh` binary.
#[derive(Debug, Parser)]
#[command(
    name = "seqchsh",
    version,
    about = "Plan, simulate, and bound sequential CHSH violations from one entangled pair"
)]
pub struct Cli {
    /// Subcommand to run.
    #[command(subcommand)]
    pub command: Command,
}

/// Subcommands of the `seqchsh` binary.
#[derive(Debug, Subcommand)]
pub enum Command {
    /// Plan measurement sharpnesses for n sequential violations.
    Plan {
        /// Number of sequential measurements to certify (1..=8).
        #[arg(long)]
        n: usize,
        /// Overshoot above the minimal sharpness, > 0.
        #[arg(long, default_value_t = 0.1)]
        epsilon: f64,
        /// Initial state: bell, schmidt:PHI, family:ALPHA,RE,IM, or mixed.
        #[arg(long, default_value = "bell")]
        state: StateDescriptor,
        /// Write the plan JSON here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Simulate a plan exactly and cross-check the analytic values.
    Simulate {
        /// Plan document produced by `plan`.
        #[arg(long)]
        plan: PathBuf,
        /// Override the plan's recorded state (e.g. mixed).
        #[arg(long)]
        state: Option<StateDescriptor>,
        /// Write the transcript CSV here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Count violations over a logarithmic θ grid for each ε.
    Scan {
        /// Comma-separated overshoot values, each in (0, 1].
        #[arg(long = "epsilon-list", value_delimiter = ',', default_value = "0.01,0.1,1")]
        epsilon_list: Vec<f64>,
        /// Smallest angle of the grid.
        #[arg(long = "theta-min", default_value_t = 1e-10)]
        theta_min: f64,
        /// Largest angle of the grid.
        #[arg(long = "theta-max", default_value_t = FRAC_PI_4)]
        theta_max: f64,
        /// Grid resolution.
        #[arg(long = "points-per-decade", default_value_t = 10)]
        points_per_decade: usize,
        /// Stop counting violations at this position.
        #[arg(long, default_value_t = 8)]
        cap: usize,
        /// Write the scan CSV here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tabulate envelope, coefficient, and d-sequence bounds.
    Bounds {
        /// Table length (positions 1..=n).
        #[arg(long, default_value_t = 12)]
        n: usize,
        /// Overshoot ε ≥ 0.
        #[arg(long, default_value_t = 0.1)]
        epsilon: f64,
        /// Angle for the envelope columns.
        #[arg(long, default_value_t = 0.05)]
        theta: f64,
        /// Write the table CSV here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the seeded self-verification suites.
    Verify {
        /// Randomized cases per suite (0 = vacuous pass).
        #[arg(long, default_value_t = 200)]
        trials: usize,
        /// Root seed for the per-suite random streams.
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Replace every suite's default tolerance.
        #[arg(long)]
        tol: Option<f64>,
    },
}

/// Maps an error to the binary's exit code.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::HypothesisViolated(_) => 2,
        Error::InfeasibleAtPrecision(_) => 3,
        Error::Verification(_) => 4,
        _ => 1,
    }
}

fn emit(out: Option<&PathBuf>, content: &str, label: &str) -> Result<()> {
    match out {
        Some(path) => {
            std::fs::write(path, content)?;
            eprintln!("wrote {label} to {}", path.display());
            Ok(())
        }
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

/// Executes a parsed command line. Errors map to exit codes via
/// [`exit_code`].
pub fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Plan { n, epsilon, state, out } => {
            let doc = cmd_plan(*n, *epsilon, state)?;
            eprintln!(
                "planned {} measurements on {}: theta = {:e}, epsilon = {:e}",
                doc.n, doc.state_descriptor, doc.theta, doc.epsilon
            );
            emit(out.as_ref(), &doc.to_json(), "plan")
        }
        Command::Simulate { plan, state, out } => {
            let text = std::fs::read_to_string(plan)?;
            let doc = PlanDocument::from_json(&text)?;
            let report = cmd_simulate(&doc, state.as_ref())?;
            let violations = report.rows.iter().filter(|r| r.violates).count();
            eprintln!(
                "simulated {} measurements: {} violations, max |S_analytic - S_simulated| = {:e}",
                report.rows.len(),
                violations,
                report.max_deviation()
            );
            emit(out.as_ref(), &violation_report_csv(&report), "transcript")
        }
        Command::Scan { epsilon_list, theta_min, theta_max, points_per_decade, cap, out } => {
            let rows = cmd_scan(epsilon_list, *theta_min, *theta_max, *points_per_decade, *cap)?;
            eprintln!("scanned {} grid points ({} epsilon values)", rows.len(), epsilon_list.len());
            emit(out.as_ref(), &scan_csv(&rows), "scan")
        }
        Command::Bounds { n, epsilon, theta, out } => {
            let table = cmd_bounds(*n, *epsilon, *theta)?;
            eprintln!("bound table for n = {n}, epsilon = {epsilon:e}, theta = {theta:e}");
            emit(out.as_ref(), &table, "bounds")
        }
        Command::Verify { trials, seed, tol } => {
            let config = VerifyConfig { seed: *seed, trials: *trials, tol: *tol };
            let (results, text) = cmd_verify(&config);
            print!("{text}");
            let failed = results.iter().filter(|r| !r.passed()).count();
            if failed > 0 {
                return Err(Error::Verification(format!(
                    "{failed} of {} suites failed",
                    results.len()
                )));
            }
            Ok(())
        }
    }
}

// Frozen reference values in the tests keep all 17 digits.
#[allow(clippy::excessive_precision)]
#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn state_descriptors_round_trip() {
        for text in ["bell", "mixed", "schmidt:7.853981633974483e-1", "family:2.5e-1,4e-1,-1e-1"] {
            let parsed: StateDescriptor = text.parse().unwrap();
            assert_eq!(parsed.to_string(), text);
            let round: StateDescriptor = parsed.to_string().parse().unwrap();
            assert_eq!(round, parsed);
        }
    }

    #[test]
    fn state_descriptor_rejects_garbage() {
        for text in ["", "belle", "schmidt", "schmidt:abc", "family:1,2", "ghz:0.1"] {
            assert!(text.parse::<StateDescriptor>().is_err(), "{text} should not parse");
        }
        // Parses but cannot be built: |β|² > α(1-α).
        let d: StateDescriptor = "family:0.5,0.9,0".parse().unwrap();
        assert!(d.build().is_err());
    }

    #[test]
    fn plan_document_round_trips_through_json() {
        let doc = cmd_plan(3, 0.01, &StateDescriptor::Bell).unwrap();
        let json = doc.to_json();
        assert!(json.ends_with('\n'));
        // Floats appear in scientific notation with 17 significant digits.
        assert!(json.contains("e-1") || json.contains("e0"));
        let back = PlanDocument::from_json(&json).unwrap();
        assert_eq!(back, doc);
        assert_eq!(back.gammas.len(), 3);
        back.to_plan().unwrap();
    }

    #[test]
    fn plan_document_rejects_bad_metadata() {
        let mut doc = cmd_plan(2, 0.1, &StateDescriptor::Bell).unwrap();
        doc.schema_version = "2".to_string();
        assert!(doc.to_plan().is_err());
        let mut doc = cmd_plan(2, 0.1, &StateDescriptor::Bell).unwrap();
        doc.n = 3;
        assert!(doc.to_plan().is_err());
    }

    #[test]
    fn plan_ceiling_and_hypothesis_exit_paths() {
        match cmd_plan(9, 0.1, &StateDescriptor::Bell) {
            Err(Error::InfeasibleAtPrecision(9)) => {}
            other => panic!("expected precision error, got {other:?}"),
        }
        let product = StateDescriptor::Family { alpha: 1.0, beta_re: 0.0, beta_im: 0.0 };
        match cmd_plan(1, 0.1, &product) {
            Err(Error::HypothesisViolated(_)) => {}
            other => panic!("expected hypothesis error, got {other:?}"),
        }
        assert!(matches!(cmd_plan(0, 0.1, &StateDescriptor::Bell), Err(Error::Domain(_))));
    }

    #[test]
    fn simulate_cross_checks_and_supports_override() {
        let doc = cmd_plan(2, 0.1, &StateDescriptor::Bell).unwrap();
        let report = cmd_simulate(&doc, None).unwrap();
        assert_eq!(report.rows.len(), 2);
        assert!(report.rows.iter().all(|r| r.violates));
        // The same plan on the maximally mixed state scores S = 0.
        let mixed = cmd_simulate(&doc, Some(&StateDescriptor::Mixed)).unwrap();
        for row in &mixed.rows {
            assert!(row.s_simulated.abs() <= 1e-12);
            assert!(!row.violates);
        }
    }

    #[test]
    fn simulate_csv_shape() {
        let doc = cmd_plan(1, 0.1, &StateDescriptor::Bell).unwrap();
        let report = cmd_simulate(&doc, None).unwrap();
        let csv = violation_report_csv(&report);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "k,gamma_k,S_analytic,S_simulated,violates,bound_ok");
        assert_eq!(lines.len(), 2);
        assert!(lines[1].starts_with("1,"));
        assert!(lines[1].ends_with(",true,true"));
        // Numeric fields round-trip to identical doubles.
        let fields: Vec<&str> = lines[1].split(',').collect();
        let gamma: f64 = fields[1].parse().unwrap();
        assert_eq!(gamma, report.rows[0].gamma_k);
        assert_eq!(fields[1], sci(gamma));
    }

    #[test]
    fn scan_grid_shape_and_desk_counts() {
        // Default grid: 99 points per ε value.
        let rows = cmd_scan(&[0.01], 1e-10, FRAC_PI_4, 10, 8).unwrap();
        assert_eq!(rows.len(), 99);
        assert_eq!(rows[0].theta, FRAC_PI_4);
        assert_eq!(rows[0].n_violations, 2);
        for pair in rows.windows(2) {
            assert!(pair[1].theta < pair[0].theta, "grid must descend");
            assert!(pair[1].n_violations >= pair[0].n_violations, "counts grow as θ shrinks");
        }
        // Desk-scale counts.
        let desk = cmd_scan(&[0.01], 0.009, 0.1, 1, 8).unwrap();
        assert_eq!(desk[0].n_violations, 3);
        assert_eq!(desk[1].n_violations, 4);
    }

    #[test]
    fn scan_validates_arguments() {
        assert!(cmd_scan(&[], 1e-3, 0.1, 10, 8).is_err());
        assert!(cmd_scan(&[0.0], 1e-3, 0.1, 10, 8).is_err());
        assert!(cmd_scan(&[1.5], 1e-3, 0.1, 10, 8).is_err());
        assert!(cmd_scan(&[0.1], 0.2, 0.1, 10, 8).is_err());
        assert!(cmd_scan(&[0.1], 1e-3, 1.0, 10, 8).is_err());
        assert!(cmd_scan(&[0.1], 1e-3, 0.1, 0, 8).is_err());
        assert!(cmd_scan(&[0.1], 1e-3, 0.1, 10, 0).is_err());
    }

    #[test]
    fn scan_rows_sorted_by_epsilon_then_descending_theta() {
        let rows = cmd_scan(&[1.0, 0.01], 0.01, 0.1, 2, 8).unwrap();
        let half = rows.len() / 2;
        assert!(rows[..half].iter().all(|r| r.epsilon == 0.01));
        assert!(rows[half..].iter().all(|r| r.epsilon == 1.0));
    }

    #[test]
    fn bounds_table_landmarks() {
        let csv = cmd_bounds(5, 0.1, 0.05).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(
            lines[0],
            "k,p_lo,p_hi,c_lo_log2,c_hi_log2,d_lo_log2,d_hi_log2,d_lo_closed_log2,d_hi_closed_log2"
        );
        assert_eq!(lines.len(), 6);
        let row = |k: usize| -> Vec<&str> { lines[k].split(',').collect() };
        // d↓ undefined below k = 4.
        assert_eq!(row(1)[5], "NaN");
        assert_eq!(row(1)[7], "NaN");
        // d↓₄ = 4 and d↑₁ = 1+ε, exact in log2.
        let d_lo4: f64 = row(4)[5].parse().unwrap();
        assert_eq!(d_lo4, 2.0);
        let d_hi1: f64 = row(1)[6].parse().unwrap();
        assert!((d_hi1 - 1.1f64.log2()).abs() <= 1e-15);
        // Closed forms agree with recursions.
        for k in 1..=5 {
            let r = row(k);
            if k >= 4 {
                let rec: f64 = r[5].parse().unwrap();
                let closed: f64 = r[7].parse().unwrap();
                assert!((rec - closed).abs() <= 1e-9 * closed.abs().max(1.0));
            }
            let rec: f64 = r[6].parse().unwrap();
            let closed: f64 = r[8].parse().unwrap();
            assert!((rec - closed).abs() <= 1e-9 * closed.abs().max(1.0));
        }
    }

    #[test]
    fn verify_command_reports_and_maps_to_exit_codes() {
        let (results, text) = cmd_verify(&VerifyConfig { seed: 7, trials: 5, tol: None });
        assert!(results.iter().all(SuiteResult::passed));
        assert!(text.contains("all 8 suites passed"));
        let (results, text) = cmd_verify(&VerifyConfig { seed: 7, trials: 5, tol: Some(1e-15) });
        assert!(results.iter().any(|r| !r.passed()));
        assert!(text.contains("first failure:"));
    }

    #[test]
    fn exit_codes_follow_the_contract() {
        assert_eq!(exit_code(&Error::Domain("x".into())), 1);
        assert_eq!(exit_code(&Error::HypothesisViolated("x".into())), 2);
        assert_eq!(exit_code(&Error::InfeasibleAtPrecision(9)), 3);
        assert_eq!(exit_code(&Error::Verification("x".into())), 4);
        assert_eq!(exit_code(&Error::NotPsd(-1.0)), 1);
    }

    #[test]
    fn flag_defaults_parse() {
        let cli = Cli::try_parse_from(["seqchsh", "plan", "--n", "3"]).unwrap();
        match cli.command {
            Command::Plan { n, epsilon, state, out } => {
                assert_eq!(n, 3);
                assert_eq!(epsilon, 0.1);
                assert_eq!(state, StateDescriptor::Bell);
                assert!(out.is_none());
            }
            _ => panic!("wrong subcommand"),
        }
        let cli = Cli::try_parse_from(["seqchsh", "scan"]).unwrap();
        match cli.command {
            Command::Scan {
                epsilon_list, theta_min, theta_max, points_per_decade, cap, ..
            } => {
                assert_eq!(epsilon_list, vec![0.01, 0.1, 1.0]);
                assert_eq!(theta_min, 1e-10);
                assert_eq!(theta_max, FRAC_PI_4);
                assert_eq!(points_per_decade, 10);
                assert_eq!(cap, 8);
            }
            _ => panic!("wrong subcommand"),
        }
        assert!(Cli::try_parse_from(["seqchsh", "plan", "--n", "x"]).is_err());
        assert!(Cli::try_parse_from(["seqchsh", "nonsense"]).is_err());
    }

    #[test]
    fn sci_format_round_trips_edge_values() {
        for v in [FRAC_PI_4, 2.8284271247461903, 1.6192e-37, 5e-324, 0.1, 1.0] {
            let text = sci(v);
            let back: f64 = text.parse().unwrap();
            assert_eq!(back, v, "{text} did not round-trip");
        }
        assert_eq!(sci(f64::NAN), "NaN");
    }
}
