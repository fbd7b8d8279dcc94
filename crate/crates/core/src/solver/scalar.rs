//! Exact rationals: `i128` fractions, promoted to big integers on overflow.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{CheckedAdd, CheckedDiv, CheckedMul, CheckedSub, One, ToPrimitive, Zero};

#[derive(Debug, Clone)]
pub(crate) enum Q {
    Small(Ratio<i128>),
    Big(BigRational),
}

impl Q {
    pub fn zero() -> Q {
        Q::Small(Ratio::zero())
    }

    pub fn int(v: i128) -> Q {
        Q::Small(Ratio::from_integer(v))
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Q::Small(r) => r.is_zero(),
            Q::Big(r) => r.is_zero(),
        }
    }

    pub fn signum(&self) -> Ordering {
        match self {
            Q::Small(r) => r.numer().cmp(&0),
            Q::Big(r) => r.numer().sign().cmp(&num_bigint::Sign::NoSign),
        }
    }

    pub fn is_positive(&self) -> bool {
        self.signum() == Ordering::Greater
    }

    pub fn is_negative(&self) -> bool {
        self.signum() == Ordering::Less
    }

    pub fn is_integer(&self) -> bool {
        match self {
            Q::Small(r) => r.is_integer(),
            Q::Big(r) => r.is_integer(),
        }
    }

    fn big(&self) -> BigRational {
        match self {
            Q::Small(r) => BigRational::new_raw(BigInt::from(*r.numer()), BigInt::from(*r.denom())),
            Q::Big(r) => r.clone(),
        }
    }

    fn shrink(r: BigRational) -> Q {
        match (r.numer().to_i128(), r.denom().to_i128()) {
            (Some(n), Some(d)) => Q::Small(Ratio::new_raw(n, d)),
            _ => Q::Big(r),
        }
    }

    fn combine(
        &self,
        other: &Q,
        small: impl Fn(&Ratio<i128>, &Ratio<i128>) -> Option<Ratio<i128>>,
        big: impl Fn(BigRational, BigRational) -> BigRational,
    ) -> Q {
        if let (Q::Small(a), Q::Small(b)) = (self, other) {
            if let Some(r) = small(a, b) {
                return Q::Small(r);
            }
        }
        Q::shrink(big(self.big(), other.big()))
    }

    pub fn add(&self, other: &Q) -> Q {
        if other.is_zero() {
            return self.clone();
        }
        self.combine(other, |a, b| a.checked_add(b), |a, b| a + b)
    }

    pub fn sub(&self, other: &Q) -> Q {
        self.combine(other, |a, b| a.checked_sub(b), |a, b| a - b)
    }

    pub fn mul(&self, other: &Q) -> Q {
        if self.is_zero() || other.is_zero() {
            return Q::zero();
        }
        self.combine(other, |a, b| a.checked_mul(b), |a, b| a * b)
    }

    pub fn mul_int(&self, k: i64) -> Q {
        match k {
            0 => Q::zero(),
            1 => self.clone(),
            _ => self.mul(&Q::int(k as i128)),
        }
    }

    pub fn div(&self, other: &Q) -> Q {
        assert!(!other.is_zero(), "division by zero");
        self.combine(other, |a, b| a.checked_div(b), |a, b| a / b)
    }

    pub fn neg(&self) -> Q {
        match self {
            Q::Small(r) if *r.numer() != i128::MIN => Q::Small(-r),
            _ => Q::shrink(-self.big()),
        }
    }

    pub fn abs(&self) -> Q {
        if self.is_negative() {
            self.neg()
        } else {
            self.clone()
        }
    }

    pub fn floor(&self) -> i128 {
        match self {
            Q::Small(r) => r.floor().to_integer(),
            Q::Big(r) => r
                .floor()
                .to_integer()
                .to_i128()
                .expect("value out of range"),
        }
    }

    pub fn ceil(&self) -> i128 {
        match self {
            Q::Small(r) => r.ceil().to_integer(),
            Q::Big(r) => r.ceil().to_integer().to_i128().expect("value out of range"),
        }
    }

    /// Distance to the nearest integer, as a fraction in `[0, 1/2]`.
    pub fn fractionality(&self) -> Q {
        let down = self.sub(&Q::int(self.floor()));
        let up = Q::int(1).sub(&down);
        if down.cmp_q(&up) == Ordering::Greater {
            up
        } else {
            down
        }
    }

    pub fn cmp_q(&self, other: &Q) -> Ordering {
        match (self, other) {
            (Q::Small(a), Q::Small(b)) => a.cmp(b),
            _ => self.big().cmp(&other.big()),
        }
    }

    pub fn cmp_int(&self, v: i128) -> Ordering {
        match self {
            Q::Small(r) if r.denom().is_one() => r.numer().cmp(&v),
            _ => self.cmp_q(&Q::int(v)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_is_exact() {
        let third = Q::int(1).div(&Q::int(3));
        let sum = third.add(&third).add(&third);
        assert_eq!(sum.cmp_int(1), Ordering::Equal);
        assert_eq!(third.floor(), 0);
        assert_eq!(third.ceil(), 1);
        assert_eq!(third.neg().floor(), -1);
        assert_eq!(
            Q::int(5)
                .div(&Q::int(2))
                .fractionality()
                .cmp_q(&Q::int(1).div(&Q::int(2))),
            Ordering::Equal
        );
    }

    #[test]
    fn overflow_promotes_and_shrinks_back() {
        let huge = Q::int(i128::MAX / 2);
        let product = huge.mul(&Q::int(8));
        assert!(matches!(product, Q::Big(_)));
        let back = product.div(&Q::int(8));
        assert!(matches!(back, Q::Small(_)));
        assert_eq!(back.cmp_q(&huge), Ordering::Equal);
        let tiny = Q::int(1).div(&Q::int(i128::MAX));
        let tinier = tiny.mul(&tiny);
        assert!(tinier.is_positive());
        assert_eq!(tinier.cmp_q(&tiny), Ordering::Less);
    }
}
