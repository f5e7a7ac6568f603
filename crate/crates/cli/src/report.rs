//! Structured text reports: `key: value` lines, plus CSV renderings of the
//! violation and ratio lists from the certificate checks.

use gippa_core::diagnostics::{
    estimate_linear_rate, ContractionReport, IterateTrace, Lemma41Report, RateFit,
};
use gippa_core::operators::KernelSpec;
use gippa_core::pairs::{PairCertificate, PairStatus};
use gippa_core::solvers::ScheduleValidation;

use crate::fmt_float;

pub fn push_kv(out: &mut String, key: &str, value: impl AsRef<str>) {
    out.push_str(key);
    out.push_str(": ");
    out.push_str(value.as_ref());
    out.push('\n');
}

/// The standard run report: termination, final gap norms, schedule
/// validation, and a rate fit over the chosen error series.
pub fn run_report(
    trace: &IterateTrace,
    kernel: &KernelSpec,
    validation: &ScheduleValidation,
) -> String {
    let mut out = String::new();
    push_kv(&mut out, "termination", trace.termination.to_string());
    push_kv(&mut out, "iterations", trace.iterations().to_string());
    if let Some(last) = trace.records.last() {
        push_kv(&mut out, "final_step_gap", fmt_float(last.step_gap));
        push_kv(&mut out, "final_v_gap", fmt_float(last.v_gap));
        push_kv(&mut out, "final_residual", fmt_float(last.residual));
    }
    if let Some(errs) = trace.errors_to_reference() {
        if let Some(last) = errs.last() {
            push_kv(&mut out, "final_err_to_ref", fmt_float(*last));
        }
    }
    if let Some(u_inf) = trace.step_certificate(kernel) {
        push_kv(&mut out, "step_certificate_u_inf", fmt_float(u_inf));
    }
    push_kv(
        &mut out,
        "schedule_alpha_nondecreasing",
        validation.alpha_nondecreasing.to_string(),
    );
    push_kv(&mut out, "schedule_alpha_cap", fmt_float(validation.alpha_cap));
    push_kv(&mut out, "schedule_gamma_inf", fmt_float(validation.gamma_inf));
    push_kv(&mut out, "schedule_theory_satisfied", validation.theory_satisfied.to_string());

    let (series_name, series) = match trace.errors_to_reference() {
        Some(errs) => ("err_to_ref", errs),
        None => ("residual", trace.residuals()),
    };
    push_kv(&mut out, "rate_series", series_name);
    match estimate_linear_rate(&series) {
        Ok(RateFit { rho_hat, r_squared, window }) => {
            push_kv(&mut out, "rate_rho_hat", fmt_float(rho_hat));
            push_kv(&mut out, "rate_r_squared", fmt_float(r_squared));
            push_kv(&mut out, "rate_window", format!("{}..{}", window.0, window.1));
        }
        Err(e) => push_kv(&mut out, "rate_error", e.to_string()),
    }
    out
}

pub fn certificate_lines(cert: &PairCertificate) -> String {
    let mut out = String::new();
    let status = match &cert.status {
        PairStatus::Monotone => "monotone".to_string(),
        PairStatus::StronglyMonotone { beta } => {
            format!("strongly-monotone beta={}", fmt_float(*beta))
        }
        PairStatus::NotMonotone { .. } => "not-monotone".to_string(),
        PairStatus::Inconclusive => "inconclusive".to_string(),
    };
    push_kv(&mut out, "status", status);
    push_kv(&mut out, "lambda_min", fmt_float(cert.lambda_min));
    let method = match cert.method {
        gippa_core::pairs::CertMethod::PsdExact => "psd-exact",
        gippa_core::pairs::CertMethod::Sampled => "sampled",
    };
    push_kv(&mut out, "method", method);
    if let Some(witness) = cert.status.witness_direction() {
        let coords: Vec<String> = witness.iter().map(|x| fmt_float(*x)).collect();
        push_kv(&mut out, "witness", coords.join(","));
    }
    out
}

/// `n,slack` rows for the descent-inequality violations.
pub fn lemma41_csv(report: &Lemma41Report) -> String {
    let mut out = String::from("n,slack\n");
    for (n, slack) in &report.violations {
        out.push_str(&format!("{n},{}\n", fmt_float(*slack)));
    }
    out
}

/// `n,ratio` rows for the contraction check.
pub fn contraction_csv(report: &ContractionReport) -> String {
    let mut out = String::from("n,ratio\n");
    for (n, ratio) in &report.ratios {
        out.push_str(&format!("{n},{}\n", fmt_float(*ratio)));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use gippa_core::pairs::{certify_linear_pair, CertMethod};
    use gippa_core::Mat;

    #[test]
    fn certificate_lines_include_witness_for_refutations() {
        let a = Mat::diag(&[1.0, -1.0]);
        let cert = certify_linear_pair(&a, &Mat::identity(2)).unwrap();
        let text = certificate_lines(&cert);
        assert!(text.contains("status: not-monotone"));
        assert!(text.contains("witness: "));
        assert_eq!(cert.method, CertMethod::PsdExact);
    }
}
