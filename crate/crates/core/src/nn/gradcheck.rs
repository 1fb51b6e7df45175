//! Central finite-difference check of analytic gradients.

use super::ModelParams;

/// Denominator floor for the relative error: coordinates whose true
/// gradient is below this are judged on absolute error instead.
pub const REL_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradCheckReport {
    /// `max_i |a_i - n_i| / max(|a_i|, |n_i|, REL_FLOOR)`.
    pub max_rel_error: f64,
    pub max_abs_error: f64,
    pub worst_index: usize,
    pub checked: usize,
}

/// Compare `analytic` against `(f(p + s e_i) - f(p - s e_i)) / 2s` for
/// every coordinate.
pub fn check_gradients<F>(params: &ModelParams, analytic: &ModelParams, step: f64, f: F) -> GradCheckReport
where
    F: Fn(&ModelParams) -> f64,
{
    let mut probe = params.clone();
    let mut report = GradCheckReport {
        max_rel_error: 0.0,
        max_abs_error: 0.0,
        worst_index: 0,
        checked: 0,
    };
    for i in 0..params.parameter_count() {
        let orig = probe.as_slice()[i];
        probe.as_mut_slice()[i] = orig + step;
        let up = f(&probe);
        probe.as_mut_slice()[i] = orig - step;
        let down = f(&probe);
        probe.as_mut_slice()[i] = orig;
        let numeric = (up - down) / (2.0 * step);
        let a = analytic.as_slice()[i];
        let abs = (a - numeric).abs();
        let rel = abs / a.abs().max(numeric.abs()).max(REL_FLOOR);
        report.max_abs_error = report.max_abs_error.max(abs);
        if rel > report.max_rel_error {
            report.max_rel_error = rel;
            report.worst_index = i;
        }
        report.checked += 1;
    }
    report
}
