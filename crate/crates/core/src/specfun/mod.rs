//! Special functions: ln Γ, erfc, e^x·Ei(−x), K_ν, Q(p, x) and the Meijer G-function.
//!
//! All routines are pure and thread-safe.

mod bessel;
mod erf;
mod expint;
mod gamma;
mod incgamma;
mod meijer;

pub use bessel::{bessel_k, bessel_k_scaled, MAX_ORDER as BESSEL_MAX_ORDER};
pub use erf::erfc;
pub use expint::exp_ei_neg;
pub use gamma::ln_gamma;
pub use incgamma::gamma_upper_reg;
pub use meijer::{meijer_g, meijer_g_with, MeijerMethod, MeijerOptions, MeijerParams, MeijerStrategy, MeijerValue};

pub(crate) use bessel::ln_bessel_k;
pub(crate) use gamma::{ln_binomial, ln_gamma_pos};
