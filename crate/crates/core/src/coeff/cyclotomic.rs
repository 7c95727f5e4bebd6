//! Exact arithmetic in cyclotomic number fields `Q(zeta_C)`.
//!
//! A non-rational value is stored as a vector of rationals in the power
//! basis `1, zeta, .., zeta^(phi(C)-1)` of a primitive `C`-th root of
//! unity, reduced modulo the `C`-th cyclotomic polynomial. Rational values
//! are stored inline. Values at different conductors are lifted to the
//! least common conductor before mixing, and a value whose tail vanishes
//! collapses back to the rational form.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use num::{BigInt, BigRational, One, Zero};
use once_cell::sync::Lazy;

use super::rat::Rat;
use crate::EngineError;

fn euler_phi(n: u32) -> usize {
    let mut n = n as u64;
    let mut result = n;
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            while n % p == 0 {
                n /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result as usize
}

/// Dense integer polynomials, used only to set up reduction tables.
fn poly_mul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, ai) in a.iter().enumerate() {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            if !bj.is_zero() {
                out[i + j] += ai * bj;
            }
        }
    }
    out
}

/// Exact division of integer polynomials; the divisor must divide evenly.
fn poly_div_exact(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    let mut rem: Vec<BigInt> = num.to_vec();
    let dd = den.len() - 1;
    let lead = den[dd].clone();
    assert!(!lead.is_zero());
    let mut quo = vec![BigInt::zero(); rem.len() - dd];
    for k in (0..quo.len()).rev() {
        let c = &rem[k + dd] / &lead;
        quo[k] = c.clone();
        if c.is_zero() {
            continue;
        }
        for (j, dj) in den.iter().enumerate() {
            let t = &c * dj;
            rem[k + j] -= t;
        }
    }
    assert!(rem.iter().all(|c| c.is_zero()), "non-exact polynomial division");
    quo
}

fn cyclotomic_poly(n: u32, memo: &mut HashMap<u32, Vec<BigInt>>) -> Vec<BigInt> {
    if let Some(p) = memo.get(&n) {
        return p.clone();
    }
    // x^n - 1 divided by the product of Phi_d for proper divisors d of n.
    let mut num = vec![BigInt::zero(); n as usize + 1];
    num[0] = BigInt::from(-1);
    num[n as usize] = BigInt::one();
    let mut den = vec![BigInt::one()];
    for d in 1..n {
        if n % d == 0 {
            let pd = cyclotomic_poly(d, memo);
            den = poly_mul(&den, &pd);
        }
    }
    let p = poly_div_exact(&num, &den);
    memo.insert(n, p.clone());
    p
}

/// Reduction data for one conductor: `red[k]` is `x^(phi+k) mod Phi_C`.
pub struct CycloTable {
    pub phi: usize,
    red: Vec<Vec<Rat>>,
}

impl CycloTable {
    fn new(conductor: u32) -> Self {
        let mut memo = HashMap::new();
        let phi_poly = cyclotomic_poly(conductor, &mut memo);
        let phi = phi_poly.len() - 1;
        debug_assert_eq!(phi, euler_phi(conductor));
        // x^phi = -(tail of Phi), then shift-and-reduce up to x^(2*phi-2).
        let base: Vec<Rat> = phi_poly[..phi]
            .iter()
            .map(|c| Rat::from_big(BigRational::from(-c.clone())))
            .collect();
        let mut red = vec![base.clone()];
        for _ in 1..phi.max(1) {
            let prev = red.last().unwrap();
            let mut next = vec![Rat::zero(); phi];
            let top = prev[phi - 1].clone();
            for i in (1..phi).rev() {
                next[i] = prev[i - 1].clone();
            }
            if !top.is_zero() {
                for (i, b) in base.iter().enumerate() {
                    next[i] = next[i].add(&top.mul(b));
                }
            }
            red.push(next);
        }
        CycloTable { phi, red }
    }

    /// Reduce a coefficient vector of arbitrary length into the power basis.
    fn reduce(&self, mut coeffs: Vec<Rat>) -> Vec<Rat> {
        while coeffs.len() > self.phi {
            let d = coeffs.len() - 1;
            let top = coeffs.pop().unwrap();
            if top.is_zero() {
                continue;
            }
            let k = d - self.phi;
            if k < self.red.len() {
                for (i, r) in self.red[k].iter().enumerate() {
                    coeffs[i] = coeffs[i].add(&top.mul(r));
                }
            } else {
                // very high powers: peel one shift at a time
                let mut row = vec![Rat::zero(); d];
                row[d - 1] = top;
                let reduced = self.reduce(row);
                let mut shifted = vec![Rat::zero(); reduced.len() + 1];
                for (i, c) in reduced.into_iter().enumerate() {
                    shifted[i + 1] = c;
                }
                let reduced = self.reduce(shifted);
                for (i, c) in reduced.into_iter().enumerate() {
                    coeffs[i] = coeffs[i].add(&c);
                }
            }
        }
        coeffs.resize(self.phi, Rat::zero());
        coeffs
    }
}

static TABLES: Lazy<Mutex<HashMap<u32, Arc<CycloTable>>>> = Lazy::new(|| Mutex::new(HashMap::new()));

pub fn table(conductor: u32) -> Arc<CycloTable> {
    let mut map = TABLES.lock().unwrap();
    map.entry(conductor)
        .or_insert_with(|| Arc::new(CycloTable::new(conductor)))
        .clone()
}

/// An element of some `Q(zeta_C)`, rationals stored inline.
#[derive(Clone)]
pub enum Cyclo {
    Rat(Rat),
    /// Reduced power-basis coordinates with a nonzero tail.
    Ext { conductor: u32, coeffs: Vec<Rat> },
}

impl Cyclo {
    pub fn zero() -> Self {
        Cyclo::Rat(Rat::zero())
    }

    pub fn one() -> Self {
        Cyclo::Rat(Rat::one())
    }

    pub fn from_rat(r: Rat) -> Self {
        Cyclo::Rat(r)
    }

    pub fn from_rational(r: BigRational) -> Self {
        Cyclo::Rat(Rat::from_big(r))
    }

    pub fn from_int(n: i64) -> Self {
        Cyclo::Rat(Rat::from_int(n))
    }

    fn make(conductor: u32, coeffs: Vec<Rat>) -> Self {
        if coeffs[1..].iter().all(|c| c.is_zero()) {
            Cyclo::Rat(coeffs.into_iter().next().unwrap())
        } else {
            Cyclo::Ext { conductor, coeffs }
        }
    }

    /// `zeta_C^k`, the chosen primitive root raised to an integer power.
    pub fn zeta_pow(conductor: u32, k: i64) -> Self {
        assert!(conductor >= 1);
        let t = table(conductor);
        let e = k.rem_euclid(conductor as i64) as usize;
        let mut coeffs = vec![Rat::zero(); e + 1];
        coeffs[e] = Rat::one();
        let coeffs = t.reduce(coeffs);
        Self::make(conductor, coeffs)
    }

    /// Exact value of `e^(i*pi*r)` for rational `r`.
    pub fn phase(r: num::Rational64) -> Self {
        // e^(i pi p/d) = zeta_{2d}^p
        let p = *r.numer();
        let d = *r.denom(); // > 0, reduced
        Self::zeta_pow(2 * d as u32, p)
    }

    pub fn conductor(&self) -> u32 {
        match self {
            Cyclo::Rat(_) => 1,
            Cyclo::Ext { conductor, .. } => *conductor,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Cyclo::Rat(r) => r.is_zero(),
            Cyclo::Ext { .. } => false,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Cyclo::Rat(r) => r.is_one(),
            Cyclo::Ext { .. } => false,
        }
    }

    pub fn is_rational(&self) -> bool {
        matches!(self, Cyclo::Rat(_))
    }

    pub fn as_rational(&self) -> Option<&Rat> {
        match self {
            Cyclo::Rat(r) => Some(r),
            Cyclo::Ext { .. } => None,
        }
    }

    fn lift(&self, conductor: u32) -> Vec<Rat> {
        match self {
            Cyclo::Rat(r) => {
                let phi = table(conductor).phi;
                let mut v = vec![Rat::zero(); phi];
                v[0] = r.clone();
                v
            }
            Cyclo::Ext { conductor: c, coeffs } => {
                if *c == conductor {
                    return coeffs.clone();
                }
                debug_assert_eq!(conductor % c, 0);
                let step = (conductor / c) as usize;
                let t = table(conductor);
                let mut raw = vec![Rat::zero(); (coeffs.len() - 1) * step + 1];
                for (e, v) in coeffs.iter().enumerate() {
                    if !v.is_zero() {
                        raw[e * step] = v.clone();
                    }
                }
                t.reduce(raw)
            }
        }
    }

    fn common(a: &Cyclo, b: &Cyclo) -> (u32, Vec<Rat>, Vec<Rat>) {
        let c = num::integer::lcm(a.conductor() as u64, b.conductor() as u64) as u32;
        (c, a.lift(c), b.lift(c))
    }

    pub fn add(&self, other: &Cyclo) -> Cyclo {
        match (self, other) {
            (Cyclo::Rat(a), Cyclo::Rat(b)) => Cyclo::Rat(a.add(b)),
            (Cyclo::Rat(a), Cyclo::Ext { conductor, coeffs }) => {
                if a.is_zero() {
                    return other.clone();
                }
                let mut v = coeffs.clone();
                v[0] = v[0].add(a);
                Cyclo::Ext { conductor: *conductor, coeffs: v }
            }
            (Cyclo::Ext { .. }, Cyclo::Rat(_)) => other.add(self),
            (
                Cyclo::Ext { conductor: c1, coeffs: x },
                Cyclo::Ext { conductor: c2, coeffs: y },
            ) => {
                if c1 == c2 {
                    let coeffs = x.iter().zip(y).map(|(a, b)| a.add(b)).collect();
                    Self::make(*c1, coeffs)
                } else {
                    let (c, x, y) = Self::common(self, other);
                    let coeffs = x.iter().zip(&y).map(|(a, b)| a.add(b)).collect();
                    Self::make(c, coeffs)
                }
            }
        }
    }

    pub fn sub(&self, other: &Cyclo) -> Cyclo {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Cyclo {
        match self {
            Cyclo::Rat(r) => Cyclo::Rat(r.neg()),
            Cyclo::Ext { conductor, coeffs } => Cyclo::Ext {
                conductor: *conductor,
                coeffs: coeffs.iter().map(|c| c.neg()).collect(),
            },
        }
    }

    pub fn mul(&self, other: &Cyclo) -> Cyclo {
        match (self, other) {
            (Cyclo::Rat(a), Cyclo::Rat(b)) => Cyclo::Rat(a.mul(b)),
            (Cyclo::Rat(a), Cyclo::Ext { conductor, coeffs }) => {
                if a.is_zero() {
                    return Cyclo::zero();
                }
                if a.is_one() {
                    return other.clone();
                }
                Cyclo::Ext {
                    conductor: *conductor,
                    coeffs: coeffs.iter().map(|c| c.mul(a)).collect(),
                }
            }
            (Cyclo::Ext { .. }, Cyclo::Rat(_)) => other.mul(self),
            (Cyclo::Ext { .. }, Cyclo::Ext { .. }) => {
                let (c, x, y) = Self::common(self, other);
                let t = table(c);
                let mut raw = vec![Rat::zero(); x.len() + y.len() - 1];
                for (i, xi) in x.iter().enumerate() {
                    if xi.is_zero() {
                        continue;
                    }
                    for (j, yj) in y.iter().enumerate() {
                        if !yj.is_zero() {
                            raw[i + j] = raw[i + j].add(&xi.mul(yj));
                        }
                    }
                }
                Self::make(c, t.reduce(raw))
            }
        }
    }

    /// Multiplicative inverse via the extended Euclidean algorithm against
    /// the (irreducible) cyclotomic polynomial.
    pub fn inverse(&self) -> Result<Cyclo, EngineError> {
        let (conductor, coeffs) = match self {
            Cyclo::Rat(r) => {
                if r.is_zero() {
                    return Err(EngineError::DivisionByZero);
                }
                return Ok(Cyclo::Rat(r.recip()));
            }
            Cyclo::Ext { conductor, coeffs } => (*conductor, coeffs.clone()),
        };
        let mut memo = HashMap::new();
        let phi_poly: Vec<Rat> = cyclotomic_poly(conductor, &mut memo)
            .into_iter()
            .map(|c| Rat::from_big(BigRational::from(c)))
            .collect();
        // xgcd(a, Phi) = 1 = s*a + t*Phi  =>  a^(-1) = s mod Phi
        let trim = |mut v: Vec<Rat>| -> Vec<Rat> {
            while v.len() > 1 && v.last().unwrap().is_zero() {
                v.pop();
            }
            v
        };
        let mut r0 = phi_poly;
        let mut r1 = trim(coeffs);
        let mut s0: Vec<Rat> = vec![Rat::zero()];
        let mut s1: Vec<Rat> = vec![Rat::one()];
        while !(r1.len() == 1 && r1[0].is_zero()) {
            let mut rem = r0.clone();
            let dd = r1.len() - 1;
            let lead = r1[dd].clone();
            let mut quo = vec![Rat::zero(); rem.len().saturating_sub(dd).max(1)];
            if rem.len() > dd {
                for k in (0..=rem.len() - 1 - dd).rev() {
                    let c = rem[k + dd].div(&lead);
                    if !c.is_zero() {
                        quo[k] = c.clone();
                        for (j, dj) in r1.iter().enumerate() {
                            rem[k + j] = rem[k + j].sub(&c.mul(dj));
                        }
                    }
                }
            }
            let rem = trim(rem);
            // s2 = s0 - quo*s1
            let qs = poly_mul_rat(&quo, &s1);
            let mut s2 = s0.clone();
            s2.resize(s2.len().max(qs.len()), Rat::zero());
            for (i, c) in qs.into_iter().enumerate() {
                s2[i] = s2[i].sub(&c);
            }
            let s2 = trim(s2);
            r0 = r1;
            r1 = rem;
            s0 = s1;
            s1 = s2;
        }
        // r0 is the gcd (a nonzero constant since Phi is irreducible)
        assert_eq!(r0.len(), 1, "cyclotomic polynomial must be irreducible over Q");
        let g = r0[0].clone();
        let t = table(conductor);
        let coeffs: Vec<Rat> = s0.into_iter().map(|c| c.div(&g)).collect();
        Ok(Self::make(conductor, t.reduce(coeffs)))
    }

    pub fn eq_value(&self, other: &Cyclo) -> bool {
        match (self, other) {
            (Cyclo::Rat(a), Cyclo::Rat(b)) => a == b,
            // extension values are never secretly rational (tail nonzero)
            (Cyclo::Rat(_), Cyclo::Ext { .. }) | (Cyclo::Ext { .. }, Cyclo::Rat(_)) => false,
            (
                Cyclo::Ext { conductor: c1, coeffs: x },
                Cyclo::Ext { conductor: c2, coeffs: y },
            ) => {
                if c1 == c2 {
                    x == y
                } else {
                    let (_, x, y) = Self::common(self, other);
                    x == y
                }
            }
        }
    }
}

fn poly_mul_rat(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    let mut out = vec![Rat::zero(); a.len() + b.len() - 1];
    for (i, ai) in a.iter().enumerate() {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            if !bj.is_zero() {
                out[i + j] = out[i + j].add(&ai.mul(bj));
            }
        }
    }
    out
}

impl PartialEq for Cyclo {
    fn eq(&self, other: &Self) -> bool {
        self.eq_value(other)
    }
}
impl Eq for Cyclo {}

impl fmt::Debug for Cyclo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for Cyclo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (conductor, coeffs) = match self {
            Cyclo::Rat(r) => return write!(f, "{}", r),
            Cyclo::Ext { conductor, coeffs } => (conductor, coeffs),
        };
        let mut first = true;
        for (e, c) in coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            let sign = c.is_negative();
            if first {
                if sign {
                    write!(f, "-")?;
                }
                first = false;
            } else if sign {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            if e == 0 {
                write!(f, "{}", mag)?;
            } else {
                if !mag.is_one() {
                    write!(f, "{}*", mag)?;
                }
                if e == 1 {
                    write!(f, "zeta{}", conductor)?;
                } else {
                    write!(f, "zeta{}^{}", conductor, e)?;
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::Rational64;

    #[test]
    fn phase_basic_values() {
        assert_eq!(Cyclo::phase(Rational64::new(1, 1)), Cyclo::from_int(-1));
        assert_eq!(Cyclo::phase(Rational64::new(0, 1)), Cyclo::from_int(1));
        assert_eq!(Cyclo::phase(Rational64::new(2, 1)), Cyclo::from_int(1));
        // e^(i pi / 2) = zeta_4
        assert_eq!(Cyclo::phase(Rational64::new(1, 2)), Cyclo::zeta_pow(4, 1));
    }

    #[test]
    fn phase_is_multiplicative() {
        let a = Rational64::new(3, 4);
        let b = Rational64::new(5, 6);
        let lhs = Cyclo::phase(a).mul(&Cyclo::phase(b));
        let rhs = Cyclo::phase(a + b);
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn mixed_conductor_arithmetic() {
        // zeta_8^2 = zeta_4 = i
        let z8sq = Cyclo::zeta_pow(8, 2);
        let i = Cyclo::zeta_pow(4, 1);
        assert_eq!(z8sq, i);
        // i^2 = -1
        assert_eq!(i.mul(&i), Cyclo::from_int(-1));
    }

    #[test]
    fn inverse_roundtrip() {
        let x = Cyclo::zeta_pow(8, 3).add(&Cyclo::from_int(2));
        let inv = x.inverse().unwrap();
        assert_eq!(x.mul(&inv), Cyclo::one());
        assert!(Cyclo::zero().inverse().is_err());
    }

    #[test]
    fn zeta_order() {
        let z = Cyclo::zeta_pow(8, 1);
        let mut p = Cyclo::one();
        for _ in 0..8 {
            p = p.mul(&z);
        }
        assert_eq!(p, Cyclo::one());
        assert_eq!(Cyclo::zeta_pow(8, 4), Cyclo::from_int(-1));
    }

    #[test]
    fn collapse_to_rational() {
        // zeta + (1 - zeta) collapses to the inline rational form
        let z = Cyclo::zeta_pow(8, 1);
        let v = z.add(&Cyclo::one().sub(&z));
        assert!(v.is_rational());
        assert!(v.is_one());
    }
}
