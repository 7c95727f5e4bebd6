//! The exact coefficient field of the engine: rational functions in `q`
//! (with exponents in a rational lattice) over cyclotomic number fields.
//!
//! Everything downstream — evaluation-module matrices, Fock-space
//! coefficients, operator-product series — computes in [`Scalar`], so
//! identity checking reduces to canonical-form equality here.

mod cyclotomic;
mod parse;
mod qlaurent;
mod rat;

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use num::Rational64;

pub use cyclotomic::Cyclo;
pub use parse::parse_scalar;
pub use qlaurent::QLaurent;
pub use rat::Rat;

use crate::EngineError;

pub(crate) fn cyclotomic_display_fragment(c: &Cyclo) -> String {
    format!("{}", c)
}

/// A reduced fraction of Laurent polynomials in `q`.
///
/// Invariants after every operation: the denominator is a monic ordinary
/// polynomial (minimum exponent 0, leading coefficient 1) coprime to the
/// numerator, so equality is plain structural comparison.
#[derive(Clone, PartialEq, Eq)]
pub struct Scalar {
    num: QLaurent,
    den: QLaurent,
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar { num: QLaurent::zero(), den: QLaurent::one() }
    }

    pub fn one() -> Self {
        Scalar { num: QLaurent::one(), den: QLaurent::one() }
    }

    pub fn from_int(n: i64) -> Self {
        Scalar { num: QLaurent::from_int(n), den: QLaurent::one() }
    }

    pub fn from_rational64(r: Rational64) -> Self {
        Self::from_cyclo(Cyclo::from_rat(Rat::from_rational64(r)))
    }

    pub fn from_cyclo(c: Cyclo) -> Self {
        Scalar { num: QLaurent::from_cyclo(c), den: QLaurent::one() }
    }

    pub fn from_poly(p: QLaurent) -> Self {
        Scalar { num: p, den: QLaurent::one() }
    }

    /// `q^e` for a rational exponent.
    pub fn q_pow(e: Rational64) -> Self {
        Scalar { num: QLaurent::q_pow(e), den: QLaurent::one() }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn numerator(&self) -> &QLaurent {
        &self.num
    }

    pub fn denominator(&self) -> &QLaurent {
        &self.den
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    fn reduced(num: QLaurent, den: QLaurent) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        if num.is_zero() {
            return Scalar::zero();
        }
        // Fold Laurent units of the denominator into the numerator.
        let (unit_exp, unit_coeff) = den.unit_part().unwrap();
        let den = den.normalize_unit();
        let unit_inv = unit_coeff.inverse().expect("unit coefficient invertible");
        let mut num = num.shift(-unit_exp).mul_cyclo(&unit_inv);
        if den.is_one() {
            return Scalar { num, den };
        }
        // Exact-division fast path, then full gcd.
        if let Some(q) = den.divides(&num) {
            return Scalar { num: q, den: QLaurent::one() };
        }
        let g = num.gcd(&den);
        let mut den = den;
        if !g.is_one() {
            num = g.divides(&num).expect("gcd divides numerator");
            den = g.divides(&den).expect("gcd divides denominator");
            let (ue, uc) = den.unit_part().unwrap();
            let den_norm = den.normalize_unit();
            let uinv = uc.inverse().unwrap();
            num = num.shift(-ue).mul_cyclo(&uinv);
            den = den_norm;
        }
        Scalar { num, den }
    }

    pub fn checked_div(&self, other: &Scalar) -> Result<Scalar, EngineError> {
        if other.is_zero() {
            return Err(EngineError::DivisionByZero);
        }
        Ok(Scalar::reduced(self.num.mul(&other.den), self.den.mul(&other.num)))
    }

    pub fn inverse(&self) -> Result<Scalar, EngineError> {
        Scalar::one().checked_div(self)
    }

    pub fn pow(&self, n: i32) -> Scalar {
        let base = if n >= 0 { self.clone() } else { self.inverse().expect("nonzero base") };
        let mut out = Scalar::one();
        for _ in 0..n.unsigned_abs() {
            out = &out * &base;
        }
        out
    }

    /// Substitute `q -> q^-1`.
    pub fn invert_q(&self) -> Scalar {
        Scalar::reduced(self.num.invert_q(), self.den.invert_q())
    }
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        if self.den.is_one() && rhs.den.is_one() {
            return Scalar { num: self.num.add(&rhs.num), den: QLaurent::one() };
        }
        if self.den == rhs.den {
            return Scalar::reduced(self.num.add(&rhs.num), self.den.clone());
        }
        Scalar::reduced(
            self.num.mul(&rhs.den).add(&rhs.num.mul(&self.den)),
            self.den.mul(&rhs.den),
        )
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        if rhs.is_zero() {
            return self.clone();
        }
        if self.den.is_one() && rhs.den.is_one() {
            return Scalar { num: self.num.sub(&rhs.num), den: QLaurent::one() };
        }
        if self.den == rhs.den {
            return Scalar::reduced(self.num.sub(&rhs.num), self.den.clone());
        }
        Scalar::reduced(
            self.num.mul(&rhs.den).sub(&rhs.num.mul(&self.den)),
            self.den.mul(&rhs.den),
        )
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        if self.is_zero() || rhs.is_zero() {
            return Scalar::zero();
        }
        if self.den.is_one() && rhs.den.is_one() {
            return Scalar { num: self.num.mul(&rhs.num), den: QLaurent::one() };
        }
        Scalar::reduced(self.num.mul(&rhs.num), self.den.mul(&rhs.den))
    }
}

impl Div for &Scalar {
    type Output = Scalar;
    fn div(self, rhs: &Scalar) -> Scalar {
        self.checked_div(rhs).expect("division by zero scalar")
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar { num: self.num.neg(), den: self.den.clone() }
    }
}

macro_rules! forward_owned_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                $trait::$method(&self, &rhs)
            }
        }
        impl $trait<&Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                $trait::$method(&self, rhs)
            }
        }
    };
}
forward_owned_binop!(Add, add);
forward_owned_binop!(Sub, sub);
forward_owned_binop!(Mul, mul);
forward_owned_binop!(Div, div);

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        *self = &*self + rhs;
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: &Scalar) {
        *self = &*self - rhs;
    }
}

impl MulAssign<&Scalar> for Scalar {
    fn mul_assign(&mut self, rhs: &Scalar) {
        *self = &*self * rhs;
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

/// The q-integer `[n]_q = (q^n - q^-n)/(q - q^-1)`, expanded as the Laurent
/// polynomial `q^(n-1) + q^(n-3) + .. + q^(1-n)`; antisymmetric in `n`.
pub fn q_int(n: i64) -> Scalar {
    if n == 0 {
        return Scalar::zero();
    }
    let m = n.unsigned_abs() as i64;
    let mut p = QLaurent::zero();
    let mut e = m - 1;
    while e >= 1 - m {
        p = p.add(&QLaurent::q_pow(Rational64::from_integer(e)));
        e -= 2;
    }
    let s = Scalar::from_poly(p);
    if n > 0 {
        s
    } else {
        -s
    }
}

/// `q - q^-1`, the ubiquitous normalization factor.
pub fn q_minus_qinv() -> Scalar {
    Scalar::q_pow(Rational64::from_integer(1)) - Scalar::q_pow(Rational64::from_integer(-1))
}

/// `q^n + q^-n`.
pub fn q_plus_qinv_pow(n: i64) -> Scalar {
    Scalar::q_pow(Rational64::from_integer(n)) + Scalar::q_pow(Rational64::from_integer(-n))
}

/// Exact `e^(i*pi*r)` as a cyclotomic number, with the momentum-lattice
/// guard: the denominator of `r` must divide `2N`.
pub fn root_of_unity_phase(r: Rational64, two_n: i64) -> Result<Cyclo, EngineError> {
    if two_n % *r.denom() != 0 {
        return Err(EngineError::PhaseDenominator { denom: *r.denom(), two_n });
    }
    Ok(Cyclo::phase(r))
}

/// Unrestricted exact phase; cocycle eigenvalues on shifted momenta fall
/// outside the `2N` lattice, so the engine core uses this form.
pub fn phase(r: Rational64) -> Scalar {
    Scalar::from_cyclo(Cyclo::phase(r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q() -> Scalar {
        Scalar::q_pow(Rational64::from_integer(1))
    }

    fn qinv() -> Scalar {
        Scalar::q_pow(Rational64::from_integer(-1))
    }

    #[test]
    fn q_int_small_values() {
        assert!(q_int(0).is_zero());
        assert_eq!(q_int(1), Scalar::one());
        assert_eq!(q_int(2), q() + qinv());
        let three = Scalar::q_pow(Rational64::from_integer(2))
            + Scalar::one()
            + Scalar::q_pow(Rational64::from_integer(-2));
        assert_eq!(q_int(-3), -three);
    }

    #[test]
    fn q_int_matches_defining_quotient() {
        for n in -6i64..=6 {
            let lhs = q_int(n) * q_minus_qinv();
            let rhs = Scalar::q_pow(Rational64::from_integer(n))
                - Scalar::q_pow(Rational64::from_integer(-n));
            assert_eq!(lhs, rhs, "n = {}", n);
        }
    }

    #[test]
    fn field_arithmetic_examples() {
        let two_over = Scalar::from_int(2) / q_int(2);
        assert_eq!(two_over * q_int(2), Scalar::from_int(2));
        assert!((q_int(2) - q() - qinv()).is_zero());
        let r = q_int(2) * q_int(3) / q_int(3);
        assert_eq!(r, q_int(2));
        assert!(Scalar::one().checked_div(&Scalar::zero()).is_err());
    }

    #[test]
    fn phase_guard() {
        assert_eq!(root_of_unity_phase(Rational64::new(1, 1), 2).unwrap(), Cyclo::from_int(-1));
        assert_eq!(root_of_unity_phase(Rational64::new(0, 1), 2).unwrap(), Cyclo::from_int(1));
        assert_eq!(
            root_of_unity_phase(Rational64::new(1, 2), 2).unwrap(),
            Cyclo::zeta_pow(4, 1)
        );
        assert!(root_of_unity_phase(Rational64::new(1, 3), 2).is_err());
    }

    #[test]
    fn canonical_equality_through_denominators() {
        // (q^2 - q^-2)/(q - q^-1) reduces to q + q^-1
        let a = (Scalar::q_pow(2.into()) - Scalar::q_pow((-2).into())) / q_minus_qinv();
        assert_eq!(a, q_int(2));
        // fractional exponents reduce too
        let h = Scalar::q_pow(Rational64::new(1, 2));
        assert_eq!(&h * &h, q());
        let back = q() / h.clone();
        assert_eq!(back, h);
    }

    fn arb_scalar() -> impl Strategy<Value = Scalar> {
        let term = (-4i64..5, -3i64..4, 1i64..3).prop_map(|(c, e_num, e_den)| {
            Scalar::from_int(c) * Scalar::q_pow(Rational64::new(e_num, e_den))
        });
        prop::collection::vec(term, 1..4)
            .prop_map(|ts| ts.into_iter().fold(Scalar::zero(), |a, b| a + b))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn q_int_addition_identity(n in -5i64..6, m in -5i64..6) {
            // q^(n+m) - q^-(n+m) = q^m (q^n - q^-n) + q^-n (q^m - q^-m)
            let lhs = q_int(n + m) * q_minus_qinv();
            let rhs = Scalar::q_pow(m.into()) * q_int(n) * q_minus_qinv()
                + Scalar::q_pow((-n).into()) * q_int(m) * q_minus_qinv();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn sub_zero_iff_structural_equality(a in arb_scalar(), b in arb_scalar()) {
            let diff_zero = (&a - &b).is_zero();
            prop_assert_eq!(diff_zero, a == b);
        }

        #[test]
        fn phase_homomorphism(p1 in -8i64..9, d1 in 1i64..5, p2 in -8i64..9, d2 in 1i64..5) {
            let r1 = Rational64::new(p1, d1);
            let r2 = Rational64::new(p2, d2);
            let lhs = phase(r1) * phase(r2);
            let rhs = phase(r1 + r2);
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn field_axioms_spotcheck(a in arb_scalar(), b in arb_scalar(), c in arb_scalar()) {
            prop_assert_eq!(&a * &(&b + &c), &a * &b + &a * &c);
            if !b.is_zero() {
                let d = &a / &b;
                prop_assert_eq!(d * b, a);
            }
        }
    }
}
