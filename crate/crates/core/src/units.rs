//! Decibel conversions. Every dB quantity passes through these two functions.

/// 10^(db/10).
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// 10·log10(x).
pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// 10^(db/20), for amplitude ratios.
pub fn amplitude_db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 20.0)
}
