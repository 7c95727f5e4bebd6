//! Sparse Laurent polynomials in the deformation parameter `q` with
//! cyclotomic coefficients. Exponents are rationals: zero-mode scalars of
//! vertex operators produce genuine fractional powers of `q`, so the
//! exponent lattice is `(1/L)Z` for a per-expression `L`.
//!
//! Terms are kept in an exponent-sorted vector; the polynomials in this
//! workload rarely exceed a handful of terms.

use std::fmt;

use num::{Rational64, Zero};

use super::cyclotomic::Cyclo;
use super::rat::Rat;

#[derive(Clone, PartialEq, Eq, Default)]
pub struct QLaurent {
    // (exponent, nonzero coefficient), ascending in exponent
    terms: Vec<(Rational64, Cyclo)>,
}

impl QLaurent {
    pub fn zero() -> Self {
        QLaurent { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Self::monomial(Rational64::zero(), Cyclo::one())
    }

    pub fn monomial(exp: Rational64, coeff: Cyclo) -> Self {
        let mut terms = Vec::new();
        if !coeff.is_zero() {
            terms.push((exp, coeff));
        }
        QLaurent { terms }
    }

    pub fn from_cyclo(c: Cyclo) -> Self {
        Self::monomial(Rational64::zero(), c)
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_cyclo(Cyclo::from_int(n))
    }

    pub fn q_pow(exp: Rational64) -> Self {
        Self::monomial(exp, Cyclo::one())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0.is_zero() && self.terms[0].1.is_one()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Rational64, &Cyclo)> {
        self.terms.iter().map(|(e, c)| (e, c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Sole term, if this is a monomial.
    pub fn as_monomial(&self) -> Option<(Rational64, &Cyclo)> {
        if self.terms.len() == 1 {
            Some((self.terms[0].0, &self.terms[0].1))
        } else {
            None
        }
    }

    pub fn as_constant(&self) -> Option<&Cyclo> {
        if self.terms.len() == 1 && self.terms[0].0.is_zero() {
            Some(&self.terms[0].1)
        } else {
            None
        }
    }

    pub fn min_exp(&self) -> Option<Rational64> {
        self.terms.first().map(|(e, _)| *e)
    }

    pub fn max_exp(&self) -> Option<Rational64> {
        self.terms.last().map(|(e, _)| *e)
    }

    fn insert_add(&mut self, exp: Rational64, c: Cyclo) {
        if c.is_zero() {
            return;
        }
        match self.terms.binary_search_by(|(e, _)| e.cmp(&exp)) {
            Ok(idx) => {
                let sum = self.terms[idx].1.add(&c);
                if sum.is_zero() {
                    self.terms.remove(idx);
                } else {
                    self.terms[idx].1 = sum;
                }
            }
            Err(idx) => self.terms.insert(idx, (exp, c)),
        }
    }

    /// Merge of two sorted term lists.
    pub fn add(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let mut i = 0;
        let mut j = 0;
        while i < self.terms.len() && j < other.terms.len() {
            let (ea, ca) = &self.terms[i];
            let (eb, cb) = &other.terms[j];
            match ea.cmp(eb) {
                std::cmp::Ordering::Less => {
                    out.push((*ea, ca.clone()));
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push((*eb, cb.clone()));
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let s = ca.add(cb);
                    if !s.is_zero() {
                        out.push((*ea, s));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.terms[i..]);
        out.extend(other.terms[j..].iter().cloned());
        QLaurent { terms: out }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        QLaurent { terms: self.terms.iter().map(|(e, c)| (*e, c.neg())).collect() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return QLaurent::zero();
        }
        if self.terms.len() == 1 {
            let (e, c) = &self.terms[0];
            return other.shift(*e).mul_cyclo(c);
        }
        if other.terms.len() == 1 {
            let (e, c) = &other.terms[0];
            return self.shift(*e).mul_cyclo(c);
        }
        let mut out = QLaurent::zero();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                out.insert_add(e1 + e2, c1.mul(c2));
            }
        }
        out
    }

    pub fn mul_cyclo(&self, c: &Cyclo) -> Self {
        if c.is_zero() {
            return QLaurent::zero();
        }
        if c.is_one() {
            return self.clone();
        }
        QLaurent { terms: self.terms.iter().map(|(e, c1)| (*e, c1.mul(c))).collect() }
    }

    /// Multiply by `q^exp`.
    pub fn shift(&self, exp: Rational64) -> Self {
        if exp.is_zero() {
            return self.clone();
        }
        QLaurent { terms: self.terms.iter().map(|(e, c)| (e + exp, c.clone())).collect() }
    }

    /// Substitute `q -> q^-1`.
    pub fn invert_q(&self) -> Self {
        let mut terms: Vec<(Rational64, Cyclo)> =
            self.terms.iter().map(|(e, c)| (-e, c.clone())).collect();
        terms.reverse();
        QLaurent { terms }
    }

    /// Common denominator of all exponents.
    fn exponent_scale(polys: &[&QLaurent]) -> i64 {
        let mut l: i64 = 1;
        for p in polys {
            for (e, _) in &p.terms {
                l = num::integer::lcm(l, *e.denom());
            }
        }
        l
    }

    /// Leading (highest-exponent) term.
    fn lead(&self) -> (Rational64, &Cyclo) {
        let (e, c) = self.terms.last().expect("lead of zero polynomial");
        (*e, c)
    }

    /// Division with remainder in the Laurent ring: `self = q*div + rem`,
    /// with remainder degree (relative to the exponent lattice) below the
    /// divisor's. Panics on zero divisor.
    pub fn div_rem(&self, den: &Self) -> (Self, Self) {
        assert!(!den.is_zero(), "division by zero polynomial");
        if self.is_zero() {
            return (QLaurent::zero(), QLaurent::zero());
        }
        let scale = Self::exponent_scale(&[self, den]);
        let step = Rational64::new(1, scale);
        let (dlead_e, dlead_c) = den.lead();
        let dmin = den.min_exp().unwrap();
        let span = ((dlead_e - dmin) * Rational64::from_integer(scale)).to_integer();
        let dlead_inv = dlead_c.inverse().expect("nonzero leading coefficient");
        let mut rem = self.clone();
        let mut quo = QLaurent::zero();
        loop {
            if rem.is_zero() {
                break;
            }
            let (rlead_e, rlead_c) = rem.lead();
            let rmin = rem.min_exp().unwrap();
            let rspan = ((rlead_e - rmin) * Rational64::from_integer(scale)).to_integer();
            if rspan < span {
                break;
            }
            let t_exp = rlead_e - dlead_e;
            let t_coeff = rlead_c.mul(&dlead_inv);
            let t = QLaurent::monomial(t_exp, t_coeff);
            rem = rem.sub(&t.mul(den));
            quo = quo.add(&t);
            if let Some(new_lead) = rem.max_exp() {
                debug_assert!(new_lead < rlead_e + step, "no progress in division");
            }
        }
        (quo, rem)
    }

    pub fn divides(&self, num: &Self) -> Option<Self> {
        let (q, r) = num.div_rem(self);
        if r.is_zero() {
            Some(q)
        } else {
            None
        }
    }

    /// Monic gcd with minimum exponent 0 (Laurent units factored away).
    pub fn gcd(&self, other: &Self) -> Self {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        a.normalize_unit()
    }

    /// Divide by the unit `c * q^min_exp` so the result is an ordinary
    /// polynomial in q with leading coefficient 1.
    pub fn normalize_unit(&self) -> Self {
        if self.is_zero() {
            return QLaurent::zero();
        }
        let min = self.min_exp().unwrap();
        let (_, lead) = self.lead();
        let inv = lead.inverse().expect("nonzero leading coefficient");
        QLaurent { terms: self.terms.iter().map(|(e, c)| (e - min, c.mul(&inv))).collect() }
    }

    /// The unit `lead_coeff * q^min_exp` relating self to its normalization.
    pub fn unit_part(&self) -> Option<(Rational64, Cyclo)> {
        if self.is_zero() {
            return None;
        }
        let min = self.min_exp().unwrap();
        let (_, lead) = self.lead();
        Some((min, lead.clone()))
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut out = QLaurent::one();
        for _ in 0..n {
            out = out.mul(self);
        }
        out
    }

    /// Substitute a rational value for q. Only used by diagnostics.
    pub fn eval_rational(&self, v: &Rat) -> Option<Cyclo> {
        let mut acc = Cyclo::zero();
        for (e, c) in &self.terms {
            if *e.denom() != 1 {
                return None;
            }
            let k = *e.numer();
            let mut p = Rat::one();
            let (base, n) = if k >= 0 { (v.clone(), k) } else { (v.recip(), -k) };
            for _ in 0..n {
                p = p.mul(&base);
            }
            acc = acc.add(&c.mul(&Cyclo::from_rat(p)));
        }
        Some(acc)
    }
}

impl fmt::Display for QLaurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        // highest power first
        for (e, c) in self.terms.iter().rev() {
            let (neg, mag) = match c.as_rational() {
                Some(r) if r.is_negative() => (true, c.neg()),
                _ => (false, c.clone()),
            };
            if first {
                if neg {
                    write!(f, "-")?;
                }
                first = false;
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let coeff_str = if mag.is_rational() {
                super::cyclotomic_display_fragment(&mag)
            } else {
                format!("({})", mag)
            };
            if e.is_zero() {
                write!(f, "{}", coeff_str)?;
            } else {
                if coeff_str != "1" {
                    write!(f, "{}*", coeff_str)?;
                }
                if *e.denom() == 1 {
                    if *e.numer() == 1 {
                        write!(f, "q")?;
                    } else {
                        write!(f, "q^{}", e.numer())?;
                    }
                } else {
                    write!(f, "q^({}/{})", e.numer(), e.denom())?;
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for QLaurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> QLaurent {
        QLaurent::q_pow(Rational64::new(1, 1))
    }

    #[test]
    fn laurent_ring_ops() {
        let a = q().add(&QLaurent::q_pow(Rational64::new(-1, 1))); // q + q^-1
        let b = a.mul(&a);
        // (q + q^-1)^2 = q^2 + 2 + q^-2
        let expect = QLaurent::q_pow(Rational64::new(2, 1))
            .add(&QLaurent::from_int(2))
            .add(&QLaurent::q_pow(Rational64::new(-2, 1)));
        assert_eq!(b, expect);
    }

    #[test]
    fn division_exact_and_with_remainder() {
        let a = q().sub(&QLaurent::q_pow(Rational64::new(-1, 1))); // q - q^-1
        let prod = a.mul(&a);
        let (quo, rem) = prod.div_rem(&a);
        assert!(rem.is_zero());
        assert_eq!(quo, a);

        let num = q().add(&QLaurent::one()); // q + 1
        let (_, rem) = num.div_rem(&a);
        assert!(!rem.is_zero());
    }

    #[test]
    fn fractional_exponents() {
        let h = QLaurent::q_pow(Rational64::new(1, 2));
        assert_eq!(h.mul(&h), q());
        let (quo, rem) = q().div_rem(&h);
        assert!(rem.is_zero());
        assert_eq!(quo, h);
    }

    #[test]
    fn gcd_is_monic_polynomial() {
        let a = q().sub(&QLaurent::q_pow(Rational64::new(-1, 1)));
        let b = q().add(&QLaurent::q_pow(Rational64::new(-1, 1)));
        let m = a.mul(&b);
        let g = m.gcd(&a.mul(&a));
        let expect = QLaurent::q_pow(Rational64::new(2, 1)).sub(&QLaurent::one());
        assert_eq!(g, expect);
    }

    #[test]
    fn invert_q_keeps_order() {
        let p = q().add(&QLaurent::q_pow(Rational64::new(3, 1))).add(&QLaurent::one());
        let r = p.invert_q();
        assert_eq!(r.min_exp(), Some(Rational64::new(-3, 1)));
        assert_eq!(r.max_exp(), Some(Rational64::zero()));
        assert_eq!(r.invert_q(), p);
    }
}
