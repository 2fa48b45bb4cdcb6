//! Exact rational scalars.
//!
//! Every coefficient in the engine is an arbitrary-precision rational.
//! `BigRational` keeps fractions in lowest terms with a positive
//! denominator, which is exactly the canonical form we need; no floating
//! point appears anywhere.

use num::BigInt;
pub use num::BigRational as Scalar;
use num::{One, Signed, Zero};

/// The rational `n/d`. Panics if `d == 0`.
pub fn ratio(n: i64, d: i64) -> Scalar {
    Scalar::new(BigInt::from(n), BigInt::from(d))
}

/// The integer `n` as a scalar.
pub fn int(n: i64) -> Scalar {
    Scalar::from_integer(BigInt::from(n))
}

pub fn zero() -> Scalar {
    Scalar::zero()
}

pub fn one() -> Scalar {
    Scalar::one()
}

/// `n!` as a scalar.
pub fn factorial(n: usize) -> Scalar {
    let mut acc = BigInt::from(1);
    for k in 2..=n {
        acc *= BigInt::from(k);
    }
    Scalar::from_integer(acc)
}

/// Renders `c` as `num` or `num/den`, with a leading minus sign if negative.
pub fn display(c: &Scalar) -> String {
    if c.denom().is_one() {
        format!("{}", c.numer())
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

/// Serialized form: numerator and denominator as decimal strings.
pub fn to_json(c: &Scalar) -> serde_json::Value {
    serde_json::json!({ "num": c.numer().to_string(), "den": c.denom().to_string() })
}

/// True if `c` is a (possibly negative) integer.
pub fn is_integer(c: &Scalar) -> bool {
    c.denom().is_one()
}

/// Absolute value.
pub fn abs(c: &Scalar) -> Scalar {
    if c.is_negative() {
        -c.clone()
    } else {
        c.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lowest_terms_and_positive_denominator() {
        let c = ratio(2, -4);
        assert_eq!(c, ratio(-1, 2));
        assert!(c.denom() > &BigInt::from(0));
        assert_eq!(display(&c), "-1/2");
    }

    #[test]
    fn factorial_values() {
        assert_eq!(factorial(0), int(1));
        assert_eq!(factorial(4), int(24));
    }
}
