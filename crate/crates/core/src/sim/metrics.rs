//! Scalar summaries of `(t, value)` series.

/// Earliest logged time after which `value` stays strictly below `threshold`
/// until the end of the series. `None` if the last sample is not below it.
pub fn settling_time(series: &[(f64, f64)], threshold: f64) -> Option<f64> {
    let mut settled = None;
    for &(t, v) in series.iter().rev() {
        if v < threshold {
            settled = Some(t);
        } else {
            break;
        }
    }
    settled
}

/// Settling into a band of `fraction` times the peak magnitude.
pub fn relative_settling_time(series: &[(f64, f64)], fraction: f64) -> Option<f64> {
    let p = peak(series)?.1;
    settling_time(series, fraction * p)
}

/// True if every sample with `t >= t0` is below `threshold`. An empty window
/// counts as false.
pub fn all_below_after(series: &[(f64, f64)], t0: f64, threshold: f64) -> bool {
    let mut window = series.iter().filter(|(t, _)| *t >= t0).peekable();
    window.peek().is_some() && window.all(|&(_, v)| v < threshold)
}

/// Sample with the largest value.
pub fn peak(series: &[(f64, f64)]) -> Option<(f64, f64)> {
    series.iter().copied().max_by(|a, b| a.1.total_cmp(&b.1))
}

/// Largest value over `t >= t0`.
pub fn max_after(series: &[(f64, f64)], t0: f64) -> Option<f64> {
    series
        .iter()
        .filter(|(t, _)| *t >= t0)
        .map(|&(_, v)| v)
        .max_by(f64::total_cmp)
}

/// Value at the first sample with `t >= t0`.
pub fn value_at(series: &[(f64, f64)], t0: f64) -> Option<f64> {
    series.iter().find(|(t, _)| *t >= t0 - 1e-9).map(|&(_, v)| v)
}
