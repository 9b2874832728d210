//! Performance evaluation of a dual-hop mixed RF/FSO amplify-and-forward link
//! with partial relay selection, outdated CSI, relay amplifier nonlinearity and
//! receiver IQ imbalance.
//!
//! Every metric is available in two independent forms: closed-form or
//! quadrature evaluation in [`analytic`], and Monte Carlo estimation in
//! [`mcsim`].

pub mod analytic;
pub mod error;
pub mod fading;
pub mod impairments;
pub mod mcsim;
pub mod quad;
pub mod sndr;
pub mod specfun;
mod sum;
pub mod units;

pub use error::{Error, Result};
