//! Compensated summation.

/// Neumaier (improved Kahan–Babuška) sum.
pub(crate) fn neumaier(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Compensated sum taken in descending order of magnitude, which keeps
/// alternating sums with large cancellation as accurate as possible.
pub(crate) fn sorted_sum(mut values: Vec<f64>) -> f64 {
    values.sort_by(|a, b| b.abs().total_cmp(&a.abs()));
    neumaier(values)
}
