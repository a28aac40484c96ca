//! Error type shared by every layer of the engine.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{numerator} is not divisible by {divisor} in Z[w]")]
    NotDivisible { numerator: String, divisor: String },

    #[error("series is not invertible: leading coefficient {leading} is not a unit")]
    NotInvertible { leading: String },

    #[error("cannot invert the zero series")]
    ZeroSeries,

    #[error("twist needs integer exponents, found q^({num}/{den})")]
    NonIntegerExponents { num: i64, den: i64 },

    #[error("exponent {num}/{den} lies beyond the guaranteed order {order_num}/{order_den}")]
    OrderExceeded {
        num: i64,
        den: i64,
        order_num: i64,
        order_den: i64,
    },

    #[error("infinite product (q^{a}/{den}; ...) does not converge: first factor has valuation <= 0")]
    Divergent { a: i64, den: i64 },

    #[error("cannot certify output window: {0}")]
    WindowUnderflow(String),

    #[error("monomial exponent {exponent} lies outside the certified window {window}")]
    WindowExceeded { exponent: i64, window: i64 },

    #[error("unknown identity `{0}`")]
    UnknownIdentity(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
