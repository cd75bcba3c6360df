//! Exact Catalan-number identities behind the majorant series estimate.

use std::fmt;
use std::ops::{Add, Div, Mul, Sub};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};

/// Arbitrary-precision fraction in lowest terms with a positive denominator.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExactRational(BigRational);

impl ExactRational {
    pub fn new(numer: impl Into<BigInt>, denom: impl Into<BigInt>) -> Self {
        Self(BigRational::new(numer.into(), denom.into()))
    }

    pub fn integer(n: impl Into<BigInt>) -> Self {
        Self(BigRational::from_integer(n.into()))
    }

    pub fn zero() -> Self {
        Self(BigRational::zero())
    }

    pub fn one() -> Self {
        Self(BigRational::one())
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn recip(&self) -> Self {
        Self(self.0.recip())
    }

    pub fn to_f64(&self) -> f64 {
        use num_traits::ToPrimitive;
        self.0.to_f64().unwrap_or(f64::NAN)
    }
}

impl From<BigUint> for ExactRational {
    fn from(n: BigUint) -> Self {
        Self::integer(BigInt::from(n))
    }
}

impl fmt::Display for ExactRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

macro_rules! forward_op {
    ($tr:ident, $method:ident) => {
        impl $tr for ExactRational {
            type Output = ExactRational;
            fn $method(self, rhs: Self) -> Self {
                ExactRational(self.0.$method(rhs.0))
            }
        }
        impl<'a> $tr<&'a ExactRational> for &'a ExactRational {
            type Output = ExactRational;
            fn $method(self, rhs: &'a ExactRational) -> ExactRational {
                ExactRational((&self.0).$method(&rhs.0))
            }
        }
    };
}

forward_op!(Add, add);
forward_op!(Sub, sub);
forward_op!(Mul, mul);
forward_op!(Div, div);

/// The `n`-th Catalan number from the product `prod_{k=2}^{n} (n + k) / k`.
pub fn catalan(n: u32) -> BigUint {
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    for k in 2..=n {
        num *= n + k;
        den *= k;
    }
    num / den
}

/// `prod_{j=2}^{l} (4 - 6/j)`; the empty product for `l = 1`.
pub fn majorant_product(l: u32) -> ExactRational {
    assert!(l >= 1, "majorant product needs l >= 1");
    (2..=l).fold(ExactRational::one(), |acc, j| {
        acc * (ExactRational::integer(4) - ExactRational::new(6, j))
    })
}

/// Whether `C(l-1) = sum_{i=1}^{l-1} C(i-1) C(l-i-1)` holds exactly.
pub fn recurrence_check(l: u32) -> bool {
    assert!(l >= 2, "recurrence needs l >= 2");
    let sum: BigUint = (1..l).map(|i| catalan(i - 1) * catalan(l - i - 1)).sum();
    sum == catalan(l - 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binomial(n: u32, k: u32) -> BigUint {
        // Pascal row, independent of the product formula above.
        let mut row = vec![BigUint::one()];
        for _ in 0..n {
            let mut next = vec![BigUint::one()];
            for w in row.windows(2) {
                next.push(&w[0] + &w[1]);
            }
            next.push(BigUint::one());
            row = next;
        }
        row[k as usize].clone()
    }

    #[test]
    fn small_catalans() {
        let expected = [1u32, 1, 2, 5, 14];
        for (n, &c) in expected.iter().enumerate() {
            assert_eq!(catalan(n as u32), BigUint::from(c));
        }
    }

    #[test]
    fn catalan_closed_form() {
        for n in [10, 20, 30] {
            assert_eq!(catalan(n), binomial(2 * n, n) / BigUint::from(n + 1));
        }
        assert_eq!(catalan(20), BigUint::from(6_564_120_420u64));
    }

    #[test]
    fn ratio_recurrence() {
        for n in 0..40u32 {
            let lhs = ExactRational::from(catalan(n + 1)) / ExactRational::from(catalan(n));
            assert_eq!(lhs, ExactRational::new(2 * (2 * n + 1), n + 2));
        }
    }

    #[test]
    fn majorant_examples() {
        assert_eq!(majorant_product(1), ExactRational::one());
        assert_eq!(majorant_product(3), ExactRational::integer(2));
        assert_eq!(majorant_product(4), ExactRational::integer(5));
        assert_eq!(majorant_product(2), ExactRational::integer(1));
    }

    #[test]
    fn majorant_equals_catalan() {
        for l in 1..=25 {
            assert_eq!(majorant_product(l), ExactRational::from(catalan(l - 1)), "l = {l}");
        }
    }

    #[test]
    fn convolution_recurrence() {
        assert!(recurrence_check(2));
        assert!(recurrence_check(5));
        assert!((2..=25).all(recurrence_check));
    }

    #[test]
    fn rational_normalises() {
        let x = ExactRational::new(6, -4);
        assert_eq!(x.numer(), &BigInt::from(-3));
        assert_eq!(x.denom(), &BigInt::from(2));
        assert!(!x.is_integer());
        assert_eq!(x.to_f64(), -1.5);
    }
}
