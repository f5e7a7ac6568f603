//! Iterate traces and the numeric convergence certificates computed from
//! them.
//!
//! The solver records one [`IterateRecord`] per outer iteration; everything
//! here is a pure function of a finished trace, a kernel, and an optional
//! reference point, so the solver itself never needs to know the solution.
//!
//! The checks mirror the inequalities behind the convergence theory:
//!
//! * [`check_lemma41`] — the per-iteration descent inequality on
//!   `aₙ = ‖v(xₙ) − v(x*)‖²`. It is a theorem when the pair is monotone, so
//!   a violation is a computable witness that pair monotonicity fails along
//!   the trajectory.
//! * [`check_summability`] — partial sums of `δₙ = ‖v(xₙ) − v(xₙ₋₁)‖²`,
//!   whose tail must vanish for convergent runs.
//! * [`check_contraction`] — per-iteration ratios
//!   `‖v(xₙ₊₁) − v(x*)‖ / ‖v(yₙ) − v(x*)‖` against the bound
//!   `κ = 1/(1 + βγL⁻²)` available under strong pair monotonicity.
//! * [`estimate_linear_rate`] — log-linear fit of an error series over the
//!   back half of the horizon.

use std::fmt;

use crate::linalg::Vector;
use crate::operators::{KernelSpec, OperatorError, OperatorSpec};

/// Reference-point residual above which a claimed zero is rejected.
const REFERENCE_RESIDUAL_TOL: f64 = 1e-8;
/// Entries at or below this end a rate-fit window.
const RATE_FLOOR: f64 = 1e-15;

#[derive(Debug, Clone, PartialEq)]
pub enum DiagnosticsError {
    /// The trace has no reference point attached.
    MissingReference,
    /// The attached reference point is not a zero of the operator.
    ReferenceNotZero { residual: f64 },
    /// The contraction check needs a strictly positive modulus.
    InvalidBeta { beta: f64 },
    SeriesTooShort { len: usize, min: usize },
    /// The rate-fit window is empty or contains non-positive entries.
    NonPositive,
    Operator(OperatorError),
}

impl fmt::Display for DiagnosticsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DiagnosticsError::MissingReference => write!(f, "trace has no reference point"),
            DiagnosticsError::ReferenceNotZero { residual } => {
                write!(f, "reference point is not a zero (residual {residual:e})")
            }
            DiagnosticsError::InvalidBeta { beta } => {
                write!(f, "strong-monotonicity modulus must be positive, got {beta}")
            }
            DiagnosticsError::SeriesTooShort { len, min } => {
                write!(f, "series of length {len} is too short (need at least {min})")
            }
            DiagnosticsError::NonPositive => {
                write!(f, "rate fit window is empty or not strictly positive")
            }
            DiagnosticsError::Operator(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for DiagnosticsError {}

impl From<OperatorError> for DiagnosticsError {
    fn from(e: OperatorError) -> Self {
        DiagnosticsError::Operator(e)
    }
}

// ── Traces ──────────────────────────────────────────────────────────

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TerminationReason {
    /// `‖xₙ₊₁ − yₙ‖∞` fell below the step tolerance — the numeric
    /// counterpart of landing exactly on a fixed point.
    StepTolerance,
    /// `‖F(xₙ₊₁)‖∞` fell below the residual tolerance.
    ResidualTolerance,
    MaxIterations,
}

impl fmt::Display for TerminationReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            TerminationReason::StepTolerance => "step-tolerance",
            TerminationReason::ResidualTolerance => "residual-tolerance",
            TerminationReason::MaxIterations => "max-iterations",
        };
        write!(f, "{s}")
    }
}

/// One outer iteration: the extrapolated point `yₙ`, the produced iterate
/// `xₙ₊₁`, the parameters used, and the gap norms.
#[derive(Debug, Clone, PartialEq)]
pub struct IterateRecord {
    /// Iteration index, starting at 1.
    pub n: usize,
    /// Extrapolated point (`yₙ` for inertial runs, the current iterate for
    /// Newton-type runs).
    pub y: Vector,
    /// Iterate produced at this step.
    pub x_next: Vector,
    /// Step size γₙ (the step `h` for Newton-type runs).
    pub gamma: f64,
    /// Inertia αₙ (zero for Newton-type runs).
    pub alpha: f64,
    /// `‖xₙ₊₁ − yₙ‖∞`.
    pub step_gap: f64,
    /// `‖v(yₙ) − v(xₙ₊₁)‖₂`; divided by γₙ this bounds `‖F(xₙ₊₁)‖`.
    pub v_gap: f64,
    /// `‖F(xₙ₊₁)‖∞`.
    pub residual: f64,
}

/// Full record of a solver run.
#[derive(Debug, Clone, PartialEq)]
pub struct IterateTrace {
    /// Starting points: `[x₀, x₁]` for inertial runs, `[x₀]` otherwise.
    pub initial: Vec<Vector>,
    pub records: Vec<IterateRecord>,
    pub termination: TerminationReason,
    /// Optional known solution, attached after the run for reporting; the
    /// solvers never read it.
    pub x_ref: Option<Vector>,
}

impl IterateTrace {
    /// The full iterate sequence `x₀, x₁, x₂, …` (starting points followed
    /// by the produced iterates).
    pub fn sequence(&self) -> Vec<&Vector> {
        self.initial
            .iter()
            .chain(self.records.iter().map(|r| &r.x_next))
            .collect()
    }

    pub fn final_x(&self) -> &Vector {
        self.records
            .last()
            .map(|r| &r.x_next)
            .unwrap_or_else(|| self.initial.last().expect("non-empty trace"))
    }

    pub fn iterations(&self) -> usize {
        self.records.len()
    }

    pub fn with_reference(mut self, x_ref: Vector) -> Self {
        self.x_ref = Some(x_ref);
        self
    }

    pub fn v_gaps(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.v_gap).collect()
    }

    pub fn residuals(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.residual).collect()
    }

    pub fn step_gaps(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.step_gap).collect()
    }

    /// `‖xₙ₊₁ − x_ref‖₂` per record, when a reference is attached.
    pub fn errors_to_reference(&self) -> Option<Vec<f64>> {
        let x_ref = self.x_ref.as_ref()?;
        Some(self.records.iter().map(|r| (&r.x_next - x_ref).norm2()).collect())
    }

    /// First record index whose produced iterate is within `tol` of the
    /// reference in the Euclidean norm.
    pub fn iterations_to_error(&self, tol: f64) -> Option<usize> {
        let errs = self.errors_to_reference()?;
        errs.iter().position(|e| *e <= tol).map(|i| self.records[i].n)
    }

    /// The residual certificate `‖uₙ‖∞ = ‖v(yₙ) − v(xₙ₊₁)‖∞ / γₙ` implied
    /// by the final step, which bounds `‖F‖` at the last iterate.
    pub fn step_certificate(&self, kernel: &KernelSpec) -> Option<f64> {
        let last = self.records.last()?;
        let gap = &kernel.apply(&last.y) - &kernel.apply(&last.x_next);
        Some(gap.norm_inf() / last.gamma)
    }
}

// ── Certificate checks ──────────────────────────────────────────────

/// Result of checking the per-iteration descent inequality along a trace.
#[derive(Debug, Clone)]
pub struct Lemma41Report {
    /// `(n, slack)` for every iteration where the inequality fails by more
    /// than the tolerance; slack is the signed left-minus-right residual.
    pub violations: Vec<(usize, f64)>,
    /// Number of iterations checked.
    pub checked: usize,
    /// Largest signed slack observed (negative when the inequality holds
    /// strictly everywhere).
    pub max_slack: f64,
}

/// Check `aₙ₊₁ − aₙ − αₙ(aₙ − aₙ₋₁) ≤ (αₙ−1)‖v(xₙ₊₁)−v(xₙ)‖² +
/// 2αₙ‖v(xₙ)−v(xₙ₋₁)‖²` with `aₙ = ‖v(xₙ) − v(x*)‖²` along the trace.
///
/// Under pair monotonicity this inequality is a theorem, so any violation
/// reported here is evidence that the pair is not monotone along the
/// trajectory. The reference must be a zero of `op` to residual `1e-8`.
pub fn check_lemma41(
    trace: &IterateTrace,
    kernel: &KernelSpec,
    op: &OperatorSpec,
) -> Result<Lemma41Report, DiagnosticsError> {
    let x_star = trace.x_ref.as_ref().ok_or(DiagnosticsError::MissingReference)?;
    let res = op.eval(x_star)?.norm_inf();
    if res > REFERENCE_RESIDUAL_TOL {
        return Err(DiagnosticsError::ReferenceNotZero { residual: res });
    }

    let seq = trace.sequence();
    let images: Vec<Vector> = seq.iter().map(|x| kernel.apply(x)).collect();
    let target = kernel.apply(x_star);
    let a: Vec<f64> = images.iter().map(|w| (w - &target).norm2().powi(2)).collect();

    let offset = trace.initial.len();
    let mut violations = Vec::new();
    let mut max_slack = f64::NEG_INFINITY;
    let mut checked = 0;
    for t in 2..seq.len() {
        let rec_idx = t - offset;
        let alpha = trace.records[rec_idx].alpha;
        let lhs = a[t] - a[t - 1] - alpha * (a[t - 1] - a[t - 2]);
        let step_sq = (&images[t] - &images[t - 1]).norm2().powi(2);
        let prev_sq = (&images[t - 1] - &images[t - 2]).norm2().powi(2);
        let rhs = (alpha - 1.0) * step_sq + 2.0 * alpha * prev_sq;
        let slack = lhs - rhs;
        max_slack = max_slack.max(slack);
        checked += 1;
        if slack > 1e-10 * a[t - 1].max(1.0) {
            violations.push((trace.records[rec_idx].n, slack));
        }
    }
    if checked == 0 {
        max_slack = 0.0;
    }
    Ok(Lemma41Report { violations, checked, max_slack })
}

/// Partial sums of `δₙ = ‖v(xₙ) − v(xₙ₋₁)‖²` and the tail beyond the
/// midpoint of the horizon.
#[derive(Debug, Clone)]
pub struct SummabilityReport {
    pub deltas: Vec<f64>,
    pub partial_sums: Vec<f64>,
    /// Sum of `δₙ` over the back half of the horizon; small tails back the
    /// summability claim at finite scale.
    pub tail: f64,
}

pub fn check_summability(
    trace: &IterateTrace,
    kernel: &KernelSpec,
) -> Result<SummabilityReport, DiagnosticsError> {
    let seq = trace.sequence();
    if seq.len() < 2 {
        return Err(DiagnosticsError::SeriesTooShort { len: seq.len(), min: 2 });
    }
    let images: Vec<Vector> = seq.iter().map(|x| kernel.apply(x)).collect();
    let deltas: Vec<f64> = images
        .windows(2)
        .map(|w| (&w[1] - &w[0]).norm2().powi(2))
        .collect();
    let mut partial_sums = Vec::with_capacity(deltas.len());
    let mut acc = 0.0;
    for d in &deltas {
        acc += d;
        partial_sums.push(acc);
    }
    let half = deltas.len() / 2;
    let tail = deltas[half..].iter().sum();
    Ok(SummabilityReport { deltas, partial_sums, tail })
}

/// Per-iteration contraction ratios against the strong-monotonicity bound.
#[derive(Debug, Clone)]
pub struct ContractionReport {
    /// `(n, ‖v(xₙ₊₁) − v(x*)‖ / ‖v(yₙ) − v(x*)‖)`, skipping vanishing
    /// denominators.
    pub ratios: Vec<(usize, f64)>,
    /// `κ = 1/(1 + βγL⁻²)` with `L = ‖B‖₂`.
    pub kappa: f64,
    pub max_ratio: f64,
}

/// Check the contraction `‖v(xₙ₊₁) − v(x*)‖ ≤ κ‖v(yₙ) − v(x*)‖` with
/// `κ = 1/(1 + β·γ_inf·L⁻²)` along a trace, given a certified strong
/// monotonicity modulus `beta > 0`.
pub fn check_contraction(
    trace: &IterateTrace,
    kernel: &KernelSpec,
    beta: f64,
    gamma_inf: f64,
) -> Result<ContractionReport, DiagnosticsError> {
    if beta.is_nan() || beta <= 0.0 {
        return Err(DiagnosticsError::InvalidBeta { beta });
    }
    let x_star = trace.x_ref.as_ref().ok_or(DiagnosticsError::MissingReference)?;
    let target = kernel.apply(x_star);
    let lipschitz = kernel
        .lipschitz()
        .map_err(|e| DiagnosticsError::Operator(OperatorError::Linalg(e)))?;
    let kappa = 1.0 / (1.0 + beta * gamma_inf / (lipschitz * lipschitz));

    let mut ratios = Vec::new();
    let mut max_ratio: f64 = 0.0;
    for rec in &trace.records {
        let denom = (&kernel.apply(&rec.y) - &target).norm2();
        if denom <= 1e-14 {
            continue;
        }
        let numer = (&kernel.apply(&rec.x_next) - &target).norm2();
        let ratio = numer / denom;
        max_ratio = max_ratio.max(ratio);
        ratios.push((rec.n, ratio));
    }
    Ok(ContractionReport { ratios, kappa, max_ratio })
}

// ── Rate estimation ─────────────────────────────────────────────────

/// Result of a log-linear rate fit.
#[derive(Debug, Clone, Copy)]
pub struct RateFit {
    /// `exp(slope)` of the least-squares line through `log(series)`.
    pub rho_hat: f64,
    pub r_squared: f64,
    /// Index window `[start, end)` that was fitted.
    pub window: (usize, usize),
}

/// Fit a geometric rate to the back half of an error series.
///
/// The window is truncated at the first entry at or below `1e-15` (values
/// at the noise floor carry no rate information). Fails when the series is
/// shorter than 5 entries or the window ends up empty or non-positive.
pub fn estimate_linear_rate(series: &[f64]) -> Result<RateFit, DiagnosticsError> {
    if series.len() < 5 {
        return Err(DiagnosticsError::SeriesTooShort { len: series.len(), min: 5 });
    }
    let start = series.len() / 2;
    let mut end = series.len();
    for (i, &s) in series.iter().enumerate().skip(start) {
        if s <= RATE_FLOOR {
            end = i;
            break;
        }
    }
    if end - start < 2 {
        return Err(DiagnosticsError::NonPositive);
    }
    let window = &series[start..end];
    if window.iter().any(|&s| s <= 0.0) {
        return Err(DiagnosticsError::NonPositive);
    }

    let logs: Vec<f64> = window.iter().map(|s| s.ln()).collect();
    let m = logs.len() as f64;
    let mean_i = (logs.len() as f64 - 1.0) / 2.0;
    let mean_y = logs.iter().sum::<f64>() / m;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (i, y) in logs.iter().enumerate() {
        let dx = i as f64 - mean_i;
        sxx += dx * dx;
        sxy += dx * (y - mean_y);
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_i;
    let mut ss_res = 0.0;
    let mut ss_tot = 0.0;
    for (i, y) in logs.iter().enumerate() {
        let fit = intercept + slope * i as f64;
        ss_res += (y - fit) * (y - fit);
        ss_tot += (y - mean_y) * (y - mean_y);
    }
    let r_squared = if ss_tot <= 1e-30 { 1.0 } else { 1.0 - ss_res / ss_tot };
    Ok(RateFit { rho_hat: slope.exp(), r_squared, window: (start, end) })
}

/// Aggregated certificate data for report serialization.
#[derive(Debug, Clone, Default)]
pub struct CertificateReport {
    pub lemma41_violations: Vec<(usize, f64)>,
    pub delta_partial_sums: Vec<f64>,
    pub contraction_ratios: Vec<(usize, f64)>,
    pub kappa_bound: Option<f64>,
}

impl CertificateReport {
    pub fn assemble(
        lemma41: Option<&Lemma41Report>,
        summability: Option<&SummabilityReport>,
        contraction: Option<&ContractionReport>,
    ) -> Self {
        CertificateReport {
            lemma41_violations: lemma41.map(|r| r.violations.clone()).unwrap_or_default(),
            delta_partial_sums: summability.map(|r| r.partial_sums.clone()).unwrap_or_default(),
            contraction_ratios: contraction.map(|r| r.ratios.clone()).unwrap_or_default(),
            kappa_bound: contraction.map(|r| r.kappa),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Mat;
    use crate::operators::AffineOperator;

    /// Trace with prescribed iterates, unit parameters, for check-level tests.
    fn synthetic_trace(points: Vec<Vector>, alpha: f64) -> IterateTrace {
        assert!(points.len() >= 2);
        let initial = vec![points[0].clone(), points[1].clone()];
        let records = points[2..]
            .iter()
            .enumerate()
            .map(|(i, p)| IterateRecord {
                n: i + 1,
                y: points[i + 1].clone(),
                x_next: p.clone(),
                gamma: 1.0,
                alpha,
                step_gap: 0.0,
                v_gap: 0.0,
                residual: 0.0,
            })
            .collect();
        IterateTrace {
            initial,
            records,
            termination: TerminationReason::MaxIterations,
            x_ref: None,
        }
    }

    #[test]
    fn lemma41_holds_with_equality_on_constant_trace() {
        let x_star = Vector::from_slice(&[1.0, -1.0]);
        let points = vec![x_star.clone(); 6];
        let trace = synthetic_trace(points, 0.2).with_reference(x_star.clone());
        let kernel = KernelSpec::identity(2);
        let op = OperatorSpec::Affine(
            AffineOperator::new(Mat::identity(2), x_star.clone()).unwrap(),
        );
        let report = check_lemma41(&trace, &kernel, &op).unwrap();
        assert!(report.violations.is_empty());
        assert!(report.max_slack.abs() < 1e-14);
    }

    #[test]
    fn lemma41_requires_reference() {
        let points = vec![Vector::zeros(1); 4];
        let trace = synthetic_trace(points, 0.0);
        let kernel = KernelSpec::identity(1);
        let op = OperatorSpec::Affine(
            AffineOperator::new(Mat::identity(1), Vector::zeros(1)).unwrap(),
        );
        assert_eq!(
            check_lemma41(&trace, &kernel, &op).unwrap_err(),
            DiagnosticsError::MissingReference
        );
    }

    #[test]
    fn lemma41_rejects_non_zero_reference() {
        let points = vec![Vector::zeros(1); 4];
        let trace = synthetic_trace(points, 0.0).with_reference(Vector::from_slice(&[5.0]));
        let kernel = KernelSpec::identity(1);
        let op = OperatorSpec::Affine(
            AffineOperator::new(Mat::identity(1), Vector::zeros(1)).unwrap(),
        );
        assert!(matches!(
            check_lemma41(&trace, &kernel, &op),
            Err(DiagnosticsError::ReferenceNotZero { .. })
        ));
    }

    #[test]
    fn summability_of_geometric_trace_matches_closed_form() {
        // v(xₙ) = ρⁿ·w gives δₙ = ρ^{2(n−1)}(1−ρ)²‖w‖².
        let rho: f64 = 0.5;
        let w = Vector::from_slice(&[2.0, 1.0]);
        let points: Vec<Vector> = (0..12).map(|k| &w * rho.powi(k)).collect();
        let trace = synthetic_trace(points, 0.0);
        let kernel = KernelSpec::identity(2);
        let report = check_summability(&trace, &kernel).unwrap();

        let w2 = w.dot(&w);
        for (idx, d) in report.deltas.iter().enumerate() {
            let n = idx + 1;
            let expected = rho.powi(2 * (n as i32 - 1)) * (1.0 - rho) * (1.0 - rho) * w2;
            assert!((d - expected).abs() <= 1e-12 * expected.max(1e-12));
        }
        let last = *report.partial_sums.last().unwrap();
        let closed_form = (1.0 - rho).powi(2) * w2 * (1.0 - rho.powi(22)) / (1.0 - rho * rho);
        assert!((last - closed_form).abs() < 1e-12);
        assert!(report.tail < report.partial_sums.last().unwrap() * 1e-2);
    }

    #[test]
    fn summability_of_constant_trace_is_zero() {
        let points = vec![Vector::from_slice(&[3.0]); 5];
        let trace = synthetic_trace(points, 0.0);
        let report = check_summability(&trace, &KernelSpec::identity(1)).unwrap();
        assert!(report.deltas.iter().all(|d| *d == 0.0));
        assert_eq!(report.tail, 0.0);
    }

    #[test]
    fn contraction_rejects_zero_beta() {
        let points = vec![Vector::zeros(1); 4];
        let trace = synthetic_trace(points, 0.0).with_reference(Vector::zeros(1));
        let err =
            check_contraction(&trace, &KernelSpec::identity(1), 0.0, 1.0).unwrap_err();
        assert!(matches!(err, DiagnosticsError::InvalidBeta { .. }));
    }

    #[test]
    fn contraction_at_fixed_point_produces_no_ratios() {
        let x_star = Vector::from_slice(&[2.0]);
        let points = vec![x_star.clone(); 5];
        let trace = synthetic_trace(points, 0.0).with_reference(x_star);
        let report = check_contraction(&trace, &KernelSpec::identity(1), 0.5, 1.0).unwrap();
        assert!(report.ratios.is_empty());
        assert_eq!(report.max_ratio, 0.0);
    }

    #[test]
    fn rate_fit_recovers_exact_geometric_series() {
        let series: Vec<f64> = (0..40).map(|n| 2f64.powi(-n)).collect();
        let fit = estimate_linear_rate(&series).unwrap();
        assert!((fit.rho_hat - 0.5).abs() < 1e-10);
        assert!((fit.r_squared - 1.0).abs() < 1e-10);
    }

    #[test]
    fn rate_fit_recovers_prescribed_rates() {
        // Series lengths chosen so the smallest entry stays above the
        // truncation floor.
        for (rho, len) in [(0.1f64, 12), (0.5, 30), (0.9, 30), (0.99, 30)] {
            let series: Vec<f64> = (0..len).map(|n| 3.7 * rho.powi(n)).collect();
            let fit = estimate_linear_rate(&series).unwrap();
            assert!((fit.rho_hat - rho).abs() < 1e-8, "rho {rho}: got {}", fit.rho_hat);
        }
    }

    #[test]
    fn rate_fit_detects_sublinear_series() {
        let short: Vec<f64> = (1..=1000).map(|n| 1.0 / n as f64).collect();
        let long: Vec<f64> = (1..=10000).map(|n| 1.0 / n as f64).collect();
        let rho_short = estimate_linear_rate(&short).unwrap().rho_hat;
        let rho_long = estimate_linear_rate(&long).unwrap().rho_hat;
        assert!(rho_long > rho_short);
        assert!(rho_long > 0.999);
    }

    #[test]
    fn rate_fit_rejects_short_and_nonpositive_series() {
        assert!(matches!(
            estimate_linear_rate(&[1.0, 0.5]),
            Err(DiagnosticsError::SeriesTooShort { .. })
        ));
        let dead = vec![0.0; 10];
        assert!(matches!(estimate_linear_rate(&dead), Err(DiagnosticsError::NonPositive)));
    }

    #[test]
    fn rate_fit_truncates_at_noise_floor() {
        let mut series: Vec<f64> = (0..30).map(|n| 0.25f64.powi(n)).collect();
        series.extend(std::iter::repeat_n(1e-17, 10));
        let fit = estimate_linear_rate(&series).unwrap();
        assert!(fit.window.1 <= 30);
        assert!((fit.rho_hat - 0.25).abs() < 1e-6);
    }
}
