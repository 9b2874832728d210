use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{function}: argument {value} outside the domain ({expected})")]
    Domain {
        function: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    #[error("series did not converge after {terms} terms (partial sum {partial_sum:e}, last term {last_term:e})")]
    SeriesConvergence {
        terms: usize,
        partial_sum: f64,
        last_term: f64,
    },

    #[error("quadrature did not reach tolerance: estimate {estimate:e} with error {error_estimate:e} after {intervals} intervals")]
    Quadrature {
        estimate: f64,
        error_estimate: f64,
        intervals: usize,
    },

    #[error("internal consistency check failed: {0}")]
    Consistency(String),

    #[error("no finite SNDR ceiling: denominator {denominator:e} is not positive")]
    NoFiniteCeiling { denominator: f64 },

    #[error("degenerate IQ receiver: omega1 vanishes (zeta = {zeta}, theta = {theta})")]
    DegenerateReceiver { zeta: f64, theta: f64 },

    #[error("{context}: {source}")]
    Context {
        context: String,
        #[source]
        source: Box<Error>,
    },

    #[error("{0}")]
    Samples(String),
}

impl Error {
    pub fn context(self, context: impl Into<String>) -> Self {
        Error::Context {
            context: context.into(),
            source: Box::new(self),
        }
    }
}

pub(crate) fn domain(function: &'static str, value: f64, expected: &'static str) -> Error {
    Error::Domain {
        function,
        value,
        expected,
    }
}
