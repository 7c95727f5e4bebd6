//! Exact rationals on machine words with transparent promotion to
//! arbitrary precision on overflow. The verification workload is almost
//! entirely small numbers; the big path exists so overflow is impossible,
//! not because it is common.

use std::cmp::Ordering;
use std::fmt;

use num::{BigInt, BigRational, Integer, One, Signed, Zero};

#[derive(Clone, PartialEq, Eq)]
pub enum Rat {
    /// Reduced fraction with positive denominator.
    Small(i64, i64),
    Big(Box<BigRational>),
}

fn gcd_i64(a: i64, b: i64) -> i64 {
    a.unsigned_abs().gcd(&b.unsigned_abs()) as i64
}

impl Rat {
    pub fn zero() -> Self {
        Rat::Small(0, 1)
    }

    pub fn one() -> Self {
        Rat::Small(1, 1)
    }

    pub fn from_int(n: i64) -> Self {
        Rat::Small(n, 1)
    }

    pub fn new(n: i64, d: i64) -> Self {
        assert!(d != 0);
        let (mut n, mut d) = if d < 0 { (-n, -d) } else { (n, d) };
        let g = gcd_i64(n, d);
        if g > 1 {
            n /= g;
            d /= g;
        }
        Rat::Small(n, d)
    }

    pub fn from_big(b: BigRational) -> Self {
        Self::demote(b)
    }

    pub fn from_rational64(r: num::Rational64) -> Self {
        Rat::Small(*r.numer(), *r.denom())
    }

    fn demote(b: BigRational) -> Self {
        if let (Ok(n), Ok(d)) = (i64::try_from(b.numer().clone()), i64::try_from(b.denom().clone())) {
            Rat::Small(n, d)
        } else {
            Rat::Big(Box::new(b))
        }
    }

    pub fn to_big(&self) -> BigRational {
        match self {
            Rat::Small(n, d) => BigRational::new(BigInt::from(*n), BigInt::from(*d)),
            Rat::Big(b) => (**b).clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Rat::Small(n, _) => *n == 0,
            Rat::Big(b) => b.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Rat::Small(n, d) => *n == 1 && *d == 1,
            Rat::Big(b) => b.is_one(),
        }
    }

    pub fn is_negative(&self) -> bool {
        match self {
            Rat::Small(n, _) => *n < 0,
            Rat::Big(b) => b.is_negative(),
        }
    }

    pub fn is_integer(&self) -> bool {
        match self {
            Rat::Small(_, d) => *d == 1,
            Rat::Big(b) => b.is_integer(),
        }
    }

    pub fn add(&self, other: &Rat) -> Rat {
        if let (Rat::Small(n1, d1), Rat::Small(n2, d2)) = (self, other) {
            // n1/d1 + n2/d2 with the denominators' gcd pulled out
            let g = gcd_i64(*d1, *d2);
            let d1g = d1 / g;
            let d2g = d2 / g;
            let num = n1
                .checked_mul(d2g)
                .and_then(|a| n2.checked_mul(d1g).and_then(|b| a.checked_add(b)));
            let den = d1.checked_mul(d2g);
            if let (Some(n), Some(d)) = (num, den) {
                return Rat::new(n, d);
            }
        }
        Rat::demote(self.to_big() + other.to_big())
    }

    pub fn sub(&self, other: &Rat) -> Rat {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Rat {
        match self {
            Rat::Small(n, d) => Rat::Small(-n, *d),
            Rat::Big(b) => Rat::Big(Box::new(-(**b).clone())),
        }
    }

    pub fn mul(&self, other: &Rat) -> Rat {
        if let (Rat::Small(n1, d1), Rat::Small(n2, d2)) = (self, other) {
            // cross-reduce before multiplying
            let g1 = gcd_i64(*n1, *d2);
            let g2 = gcd_i64(*n2, *d1);
            let a = n1 / g1;
            let b = n2 / g2;
            let c = d1 / g2;
            let d = d2 / g1;
            if let (Some(n), Some(den)) = (a.checked_mul(b), c.checked_mul(d)) {
                return Rat::Small(if den < 0 { -n } else { n }, den.abs());
            }
        }
        Rat::demote(self.to_big() * other.to_big())
    }

    pub fn recip(&self) -> Rat {
        match self {
            Rat::Small(n, d) => {
                assert!(*n != 0, "reciprocal of zero");
                if *n < 0 {
                    Rat::Small(-d, -n)
                } else {
                    Rat::Small(*d, *n)
                }
            }
            Rat::Big(b) => Rat::demote(b.recip()),
        }
    }

    pub fn div(&self, other: &Rat) -> Rat {
        self.mul(&other.recip())
    }

    pub fn abs(&self) -> Rat {
        if self.is_negative() {
            self.neg()
        } else {
            self.clone()
        }
    }
}

impl PartialOrd for Rat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Rat {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Rat::Small(n1, d1), Rat::Small(n2, d2)) => {
                match (n1.checked_mul(*d2), n2.checked_mul(*d1)) {
                    (Some(a), Some(b)) => a.cmp(&b),
                    _ => self.to_big().cmp(&other.to_big()),
                }
            }
            _ => self.to_big().cmp(&other.to_big()),
        }
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rat::Small(n, d) => {
                if *d == 1 {
                    write!(f, "{}", n)
                } else {
                    write!(f, "{}/{}", n, d)
                }
            }
            Rat::Big(b) => {
                if b.denom().is_one() {
                    write!(f, "{}", b.numer())
                } else {
                    write!(f, "{}/{}", b.numer(), b.denom())
                }
            }
        }
    }
}

impl fmt::Debug for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_arithmetic() {
        let a = Rat::new(1, 2);
        let b = Rat::new(1, 3);
        assert_eq!(a.add(&b), Rat::new(5, 6));
        assert_eq!(a.mul(&b), Rat::new(1, 6));
        assert_eq!(a.sub(&b), Rat::new(1, 6));
        assert_eq!(a.div(&b), Rat::new(3, 2));
        assert_eq!(Rat::new(-4, -6), Rat::new(2, 3));
        assert!(Rat::new(-1, 2).is_negative());
    }

    #[test]
    fn promotion_and_demotion() {
        let big = Rat::from_int(i64::MAX);
        let sq = big.mul(&big);
        assert!(matches!(sq, Rat::Big(_)));
        let back = sq.div(&big);
        // demotes back to the small representation
        assert_eq!(back, Rat::from_int(i64::MAX));
        assert!(matches!(back, Rat::Small(_, _)));
        let sum = sq.add(&sq.neg());
        assert!(sum.is_zero());
        assert!(matches!(sum, Rat::Small(_, _)));
    }

    #[test]
    fn ordering_consistency() {
        let a = Rat::new(7, 3);
        let b = Rat::new(5, 2);
        assert!(a < b);
        let big = Rat::from_int(i64::MAX).mul(&Rat::from_int(2));
        assert!(a < big);
    }
}
