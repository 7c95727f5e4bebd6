//! Truncated Fock modules over the deformed boson algebra, and the
//! normal-ordered vertex-operator machinery acting on them.
//!
//! The engine stores two primitive oscillator families: 2N diagonal bosons
//! `a^j` with signed norms and N auxiliary bosons `c^l`. Every current is
//! expressed over this basis. A [`VertexFactor`] is one normal-ordered
//! exponential — creation half, momentum shift, `z`- and `q`-power zero
//! modes, phase cocycle, annihilation half — and mode operators are exact
//! coefficient extractions of such factors on states of bounded degree.
//!
//! Normal-ordering convention: momentum shifts and creation exponentials
//! stand to the left, `z`-power and `q`-power zero modes and annihilation
//! exponentials to the right, and phase cocycles rightmost; the zero
//! modes therefore always see the incoming momentum.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num::{One, Rational64, Zero};

use crate::coeff::{phase, q_int, Scalar};
use crate::graded::Parity;
use crate::report::{InstanceRecord, SuiteReport};
use crate::rootdata::build_root_system;
use crate::EngineError;

const NORM_CACHE_DEPTH: u32 = 24;

/// Registry of the primitive oscillator slots for one rank.
#[derive(Clone, Debug)]
pub struct Oscillators {
    pub n: usize,
    /// `[x_n, x_{-n}]` per slot and mode, precomputed.
    norms: Arc<Vec<Vec<Scalar>>>,
}

impl Oscillators {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let slots = 3 * n;
        let norms = (0..slots)
            .map(|slot| {
                let eta = if slot < 2 * n && slot % 2 == 1 { -1 } else { 1 };
                (1..=NORM_CACHE_DEPTH as i64)
                    .map(|m| {
                        Scalar::from_int(eta) * q_int(m) * q_int(m)
                            * Scalar::from_rational64(Rational64::new(1, m))
                    })
                    .collect()
            })
            .collect();
        Oscillators { n, norms: Arc::new(norms) }
    }

    pub fn slots(&self) -> usize {
        3 * self.n
    }

    /// Slot of the diagonal boson `a^j`, `j = 1..=2N`.
    pub fn a_slot(&self, j: usize) -> usize {
        debug_assert!((1..=2 * self.n).contains(&j));
        j - 1
    }

    /// Slot of the auxiliary boson `c^l`, `l = 1..=N`.
    pub fn c_slot(&self, l: usize) -> usize {
        debug_assert!((1..=self.n).contains(&l));
        2 * self.n + l - 1
    }

    pub fn is_a_slot(&self, slot: usize) -> bool {
        slot < 2 * self.n
    }

    pub fn slot_name(&self, slot: usize) -> String {
        if self.is_a_slot(slot) {
            format!("a{}", slot + 1)
        } else {
            format!("c{}", slot - 2 * self.n + 1)
        }
    }

    /// Sign of the slot's norm: `(-1)^(j+1)` on the diagonal family.
    pub fn eta(&self, slot: usize) -> i64 {
        if self.is_a_slot(slot) && slot % 2 == 1 {
            -1
        } else {
            1
        }
    }

    /// The scalar `[x_n, x_{-n}] = eta * [n]^2 / n`.
    pub fn norm(&self, slot: usize, n: u32) -> Scalar {
        if n >= 1 && n <= NORM_CACHE_DEPTH {
            return self.norms[slot][(n - 1) as usize].clone();
        }
        let nn = n as i64;
        Scalar::from_int(self.eta(slot)) * q_int(nn) * q_int(nn)
            * Scalar::from_rational64(Rational64::new(1, nn))
    }

    /// Zero-mode charges of a momentum vector: the diagonal family pairs
    /// with the sign `(-1)^(j+1)`, the auxiliary family pairs straight.
    pub fn charges(&self, momentum: &[Rational64]) -> Vec<Rational64> {
        momentum
            .iter()
            .enumerate()
            .map(|(slot, m)| if self.eta(slot) < 0 { -m } else { *m })
            .collect()
    }

    pub fn validate_sector(&self, momentum: &[Rational64]) -> Result<(), EngineError> {
        if momentum.len() != self.slots() {
            return Err(EngineError::BadSector { got: momentum.len(), want: self.slots() });
        }
        let two_n = 2 * self.n as i64;
        for m in momentum {
            if two_n % m.denom() != 0 {
                return Err(EngineError::SectorDenominator { denom: *m.denom(), two_n });
            }
        }
        Ok(())
    }
}

/// A Fock basis state: a rational momentum plus a multiset of creation
/// modes `(slot, n)` standing for `x_{-n}` with `n > 0`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FockState {
    pub momentum: Vec<Rational64>,
    pub content: BTreeMap<(usize, u32), u32>,
}

impl FockState {
    pub fn vacuum(momentum: Vec<Rational64>) -> Self {
        FockState { momentum, content: BTreeMap::new() }
    }

    pub fn degree(&self) -> u32 {
        self.content.iter().map(|((_, n), mult)| n * mult).sum()
    }

    fn render(&self, osc: &Oscillators) -> String {
        let p = self
            .momentum
            .iter()
            .map(|m| {
                if *m.denom() == 1 {
                    format!("{}", m.numer())
                } else {
                    format!("{}/{}", m.numer(), m.denom())
                }
            })
            .collect::<Vec<_>>()
            .join(",");
        let mut s = format!("|{}", p);
        for ((slot, n), mult) in &self.content {
            s.push_str(&format!(" {}[-{}]", osc.slot_name(*slot), n));
            if *mult > 1 {
                s.push_str(&format!("^{}", mult));
            }
        }
        s.push('>');
        s
    }
}

impl fmt::Debug for FockState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|{:?}; {:?}>", self.momentum, self.content)
    }
}

/// A finite linear combination of Fock basis states.
#[derive(Clone, Default, PartialEq)]
pub struct FockVector {
    terms: BTreeMap<FockState, Scalar>,
}

impl FockVector {
    pub fn zero() -> Self {
        FockVector { terms: BTreeMap::new() }
    }

    pub fn basis(state: FockState) -> Self {
        let mut v = FockVector::zero();
        v.add_term(state, Scalar::one());
        v
    }

    pub fn add_term(&mut self, state: FockState, coeff: Scalar) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.get_mut(&state) {
            Some(c) => {
                *c += &coeff;
                if c.is_zero() {
                    self.terms.remove(&state);
                }
            }
            None => {
                self.terms.insert(state, coeff);
            }
        }
    }

    pub fn add_scaled(&mut self, other: &FockVector, scale: &Scalar) {
        for (s, c) in &other.terms {
            self.add_term(s.clone(), c * scale);
        }
    }

    pub fn scale(&self, s: &Scalar) -> FockVector {
        let mut out = FockVector::zero();
        out.add_scaled(self, s);
        out
    }

    pub fn sub(&self, other: &FockVector) -> FockVector {
        let mut out = self.clone();
        out.add_scaled(other, &Scalar::from_int(-1));
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&FockState, &Scalar)> {
        self.terms.iter()
    }

    pub fn render_leading(&self, osc: &Oscillators) -> String {
        match self.terms.iter().next() {
            None => "0".into(),
            Some((s, c)) => format!("({}) {}", c, s.render(osc)),
        }
    }
}

impl fmt::Debug for FockVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (s, c) in &self.terms {
            writeln!(f, "({}) {:?}", c, s)?;
        }
        Ok(())
    }
}

/// A rational linear form in the zero-mode charges.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct LinForm {
    pub coeffs: Vec<Rational64>,
}

impl LinForm {
    pub fn zero(slots: usize) -> Self {
        LinForm { coeffs: vec![Rational64::zero(); slots] }
    }

    pub fn eval(&self, charges: &[Rational64]) -> Rational64 {
        self.coeffs.iter().zip(charges).map(|(a, b)| a * b).sum()
    }

    pub fn add_scaled(&mut self, other: &LinForm, s: Rational64) {
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += b * s;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }
}

/// One normal-ordered exponential factor.
#[derive(Clone, Debug)]
pub struct VertexFactor {
    pub scalar: Scalar,
    /// Constant power of `z` carried by the factor's prefactor.
    pub z_const: Rational64,
    /// Momentum increment (coefficients of the shift operators).
    pub shift: Vec<Rational64>,
    /// `z` raised to this form of the incoming charges.
    pub z_form: LinForm,
    /// `q` raised to this form of the incoming charges.
    pub q_form: LinForm,
    /// Phase `e^(i pi <form, charges>)` applied first.
    pub cocycle: LinForm,
    /// Creation exponent: coefficient of `x_{-n} z^n` per `(slot, n)`.
    pub cre: BTreeMap<(usize, u32), Scalar>,
    /// Annihilation exponent: coefficient of `x_n z^-n` per `(slot, n)`.
    pub ann: BTreeMap<(usize, u32), Scalar>,
}

impl VertexFactor {
    pub fn identity(slots: usize) -> Self {
        VertexFactor {
            scalar: Scalar::one(),
            z_const: Rational64::zero(),
            shift: vec![Rational64::zero(); slots],
            z_form: LinForm::zero(slots),
            q_form: LinForm::zero(slots),
            cocycle: LinForm::zero(slots),
            cre: BTreeMap::new(),
            ann: BTreeMap::new(),
        }
    }

    /// Zero-mode `z`-exponent on a state with the given charges.
    pub fn base_exponent(&self, charges: &[Rational64]) -> Rational64 {
        self.z_const + self.z_form.eval(charges)
    }
}

// The application recursion threads its state through a small context.
struct ApplyCtx<'a> {
    osc: &'a Oscillators,
    cap_degree: i64,
    cre_keys: &'a [((usize, u32), Scalar)],
    out: &'a mut FockVector,
}

fn falling_factorial(m: u32, k: u32) -> i64 {
    let mut acc: i64 = 1;
    for i in 0..k {
        acc *= (m - i) as i64;
    }
    acc
}

fn int_factorial(k: u32) -> i64 {
    (1..=k as i64).product::<i64>().max(1)
}

fn ann_recurse(
    ctx: &mut ApplyCtx,
    options: &[((usize, u32), Scalar, u32)],
    idx: usize,
    ann_degree: i64,
    content: &mut BTreeMap<(usize, u32), u32>,
    acc: Scalar,
    d: i64,
    momentum: &[Rational64],
) {
    if acc.is_zero() {
        return;
    }
    if idx == options.len() {
        let cre_degree = d + ann_degree;
        if cre_degree < 0 {
            return;
        }
        cre_recurse(ctx, 0, cre_degree as u32, content, acc, momentum);
        return;
    }
    let ((slot, n), beta, mult) = &options[idx];
    // k = 0 branch
    ann_recurse(ctx, options, idx + 1, ann_degree, content, acc.clone(), d, momentum);
    let norm = ctx.osc.norm(*slot, *n);
    let mut factor = Scalar::one();
    for k in 1..=*mult {
        factor = factor * beta * &norm;
        let comb = Scalar::from_int(falling_factorial(*mult, k))
            / Scalar::from_int(int_factorial(k));
        let next = &acc * &factor * comb;
        let key = (*slot, *n);
        *content.get_mut(&key).unwrap() -= k;
        if content[&key] == 0 {
            content.remove(&key);
        }
        ann_recurse(ctx, options, idx + 1, ann_degree + (*n as i64) * k as i64, content, next, d, momentum);
        *content.entry(key).or_insert(0) += k;
    }
}

fn cre_recurse(
    ctx: &mut ApplyCtx,
    idx: usize,
    remaining: u32,
    content: &mut BTreeMap<(usize, u32), u32>,
    acc: Scalar,
    momentum: &[Rational64],
) {
    if acc.is_zero() {
        return;
    }
    if remaining == 0 {
        let state = FockState { momentum: momentum.to_vec(), content: content.clone() };
        debug_assert!((state.degree() as i64) <= ctx.cap_degree);
        ctx.out.add_term(state, acc);
        return;
    }
    if idx == ctx.cre_keys.len() {
        return;
    }
    let ((slot, n), beta) = &ctx.cre_keys[idx];
    // multiplicity 0
    cre_recurse(ctx, idx + 1, remaining, content, acc.clone(), momentum);
    let max_k = remaining / n;
    let mut factor = Scalar::one();
    for k in 1..=max_k {
        factor = factor * beta;
        let coeff = &acc * &factor / Scalar::from_int(int_factorial(k));
        let key = (*slot, *n);
        *content.entry(key).or_insert(0) += k;
        cre_recurse(ctx, idx + 1, remaining - n * k, content, coeff, momentum);
        let m = content.get_mut(&key).unwrap();
        *m -= k;
        if *m == 0 {
            content.remove(&key);
        }
    }
}

impl VertexFactor {
    /// The exact application path used by the engine.
    pub fn apply(
        &self,
        osc: &Oscillators,
        target: Rational64,
        state: &FockState,
        coeff: &Scalar,
        cap: u32,
        out: &mut FockVector,
    ) -> Result<(), EngineError> {
        let charges = osc.charges(&state.momentum);
        let e0 = self.base_exponent(&charges);
        let diff = target - e0;
        if !diff.denom().is_one() {
            return Ok(());
        }
        let d = *diff.numer();
        let out_degree = state.degree() as i64 + d;
        if out_degree < 0 {
            return Ok(());
        }
        if out_degree as u32 > cap {
            return Err(EngineError::TruncationHit);
        }

        let mut base = coeff * &self.scalar;
        let cocycle_arg = self.cocycle.eval(&charges);
        if !cocycle_arg.is_zero() {
            base = base * phase(cocycle_arg);
        }
        let q_arg = self.q_form.eval(&charges);
        if !q_arg.is_zero() {
            base = base * Scalar::q_pow(q_arg);
        }
        if base.is_zero() {
            return Ok(());
        }

        let ann_options: Vec<((usize, u32), Scalar, u32)> = self
            .ann
            .iter()
            .filter_map(|(key, beta)| state.content.get(key).map(|mult| (*key, beta.clone(), *mult)))
            .collect();
        let cre_keys: Vec<((usize, u32), Scalar)> =
            self.cre.iter().map(|(k, v)| (*k, v.clone())).collect();

        let mut momentum = state.momentum.clone();
        for (m, s) in momentum.iter_mut().zip(&self.shift) {
            *m += s;
        }

        let mut content = state.content.clone();
        let mut ctx = ApplyCtx { osc, cap_degree: cap as i64, cre_keys: &cre_keys, out };
        ann_recurse(&mut ctx, &ann_options, 0, 0, &mut content, base, d, &momentum);
        Ok(())
    }
}

/// A current: a finite list of vertex factors sharing zero-mode data,
/// expanded in `z`-powers `z^(-m + base + s)` where `s` is the
/// sector-dependent fractional offset.
#[derive(Clone, Debug)]
pub struct CurrentOp {
    pub label: String,
    pub pieces: Vec<VertexFactor>,
    /// `-1` for currents expanded as `sum_m X_m z^(-m-1)`, `0` for those
    /// expanded as `sum_m Y_m z^(-m)`.
    pub base: i32,
    pub parity: Parity,
}

impl CurrentOp {
    pub fn new(label: impl Into<String>, pieces: Vec<VertexFactor>, base: i32, parity: Parity) -> Self {
        let label = label.into();
        assert!(!pieces.is_empty());
        for p in &pieces[1..] {
            assert_eq!(p.z_form, pieces[0].z_form, "pieces of {} disagree on z-form", label);
            assert_eq!(p.z_const, pieces[0].z_const, "pieces of {} disagree on z-const", label);
            assert_eq!(p.shift, pieces[0].shift, "pieces of {} disagree on shift", label);
        }
        CurrentOp { label, pieces, base, parity }
    }

    pub fn momentum_shift(&self) -> &[Rational64] {
        &self.pieces[0].shift
    }

    /// Fractional part of the zero-mode exponent on the given sector.
    pub fn frac_offset(&self, osc: &Oscillators, momentum: &[Rational64]) -> Rational64 {
        let charges = osc.charges(momentum);
        let e0 = self.pieces[0].base_exponent(&charges);
        e0 - e0.floor()
    }

    /// Absolute `z`-power extracted by mode `m` on the given sector.
    pub fn mode_target(&self, osc: &Oscillators, momentum: &[Rational64], m: i32) -> Rational64 {
        Rational64::from_integer(self.base as i64 - m as i64)
            + self.frac_offset(osc, momentum)
    }

    /// Degree shift of mode `m` on the given sector.
    pub fn degree_shift(&self, osc: &Oscillators, momentum: &[Rational64], m: i32) -> i64 {
        let charges = osc.charges(momentum);
        let e0 = self.pieces[0].base_exponent(&charges);
        let target = self.mode_target(osc, momentum, m);
        let d = target - e0;
        debug_assert!(d.denom().is_one());
        *d.numer()
    }

    pub fn apply_mode(
        &self,
        osc: &Oscillators,
        m: i32,
        v: &FockVector,
        cap: u32,
    ) -> Result<FockVector, EngineError> {
        let mut out = FockVector::zero();
        for (state, coeff) in v.iter() {
            let target = self.mode_target(osc, &state.momentum, m);
            for piece in &self.pieces {
                piece.apply(osc, target, state, coeff, cap, &mut out)?;
            }
        }
        Ok(out)
    }
}

/// A single oscillator mode acting linearly: `sum_slots coeff * x_mode`.
#[derive(Clone, Debug)]
pub struct OscLinear {
    pub label: String,
    pub mode: i64,
    pub parts: Vec<(usize, Scalar)>,
}

impl OscLinear {
    pub fn apply(
        &self,
        osc: &Oscillators,
        v: &FockVector,
        cap: u32,
    ) -> Result<FockVector, EngineError> {
        let mut out = FockVector::zero();
        let n = self.mode.unsigned_abs() as u32;
        assert!(self.mode != 0);
        for (state, coeff) in v.iter() {
            if self.mode < 0 {
                if state.degree() + n > cap {
                    return Err(EngineError::TruncationHit);
                }
                for (slot, c) in &self.parts {
                    let mut s = state.clone();
                    *s.content.entry((*slot, n)).or_insert(0) += 1;
                    out.add_term(s, coeff * c);
                }
            } else {
                for (slot, c) in &self.parts {
                    if let Some(&mult) = state.content.get(&(*slot, n)) {
                        let mut s = state.clone();
                        if mult == 1 {
                            s.content.remove(&(*slot, n));
                        } else {
                            *s.content.get_mut(&(*slot, n)).unwrap() -= 1;
                        }
                        let factor = Scalar::from_int(mult as i64) * osc.norm(*slot, n);
                        out.add_term(s, coeff * c * factor);
                    }
                }
            }
        }
        Ok(out)
    }
}

/// Any operator the relation drivers can schedule.
#[derive(Clone, Debug)]
pub enum EngineOp {
    Mode(Arc<CurrentOp>, i32),
    Osc(Arc<OscLinear>),
}

/// Memo table for single-state operator applications. Operator identity
/// is the shared allocation, so entries stay valid for as long as the
/// scheduled operators are alive; one cache serves one degree cap.
pub struct ApplyCache {
    cap: u32,
    map: std::sync::Mutex<std::collections::HashMap<(usize, i32, FockState), Option<Arc<FockVector>>>>,
}

impl ApplyCache {
    pub fn new(cap: u32) -> Self {
        ApplyCache { cap, map: std::sync::Mutex::new(std::collections::HashMap::new()) }
    }

    pub fn cap(&self) -> u32 {
        self.cap
    }

    fn key(op: &EngineOp, state: &FockState) -> (usize, i32, FockState) {
        match op {
            EngineOp::Mode(c, m) => (Arc::as_ptr(c) as usize, *m, state.clone()),
            EngineOp::Osc(o) => (Arc::as_ptr(o) as usize, i32::MIN, state.clone()),
        }
    }

    fn get_or_compute(
        &self,
        osc: &Oscillators,
        op: &EngineOp,
        state: &FockState,
    ) -> Result<Arc<FockVector>, EngineError> {
        let key = Self::key(op, state);
        if let Some(hit) = self.map.lock().unwrap().get(&key) {
            return match hit {
                Some(v) => Ok(v.clone()),
                None => Err(EngineError::TruncationHit),
            };
        }
        let single = FockVector::basis(state.clone());
        let computed = op.apply_uncached(osc, &single, self.cap);
        let entry = match &computed {
            Ok(v) => Some(Arc::new(v.clone())),
            Err(_) => None,
        };
        let mut map = self.map.lock().unwrap();
        let slot = map.entry(key).or_insert(entry);
        match slot {
            Some(v) => Ok(v.clone()),
            None => Err(EngineError::TruncationHit),
        }
    }
}

impl EngineOp {
    fn apply_uncached(&self, osc: &Oscillators, v: &FockVector, cap: u32) -> Result<FockVector, EngineError> {
        match self {
            EngineOp::Mode(c, m) => c.apply_mode(osc, *m, v, cap),
            EngineOp::Osc(o) => o.apply(osc, v, cap),
        }
    }

    pub fn apply(&self, osc: &Oscillators, v: &FockVector, cap: u32) -> Result<FockVector, EngineError> {
        self.apply_uncached(osc, v, cap)
    }

    pub fn apply_cached(
        &self,
        osc: &Oscillators,
        v: &FockVector,
        cache: &ApplyCache,
    ) -> Result<FockVector, EngineError> {
        let mut out = FockVector::zero();
        for (state, coeff) in v.iter() {
            let res = cache.get_or_compute(osc, self, state)?;
            out.add_scaled(&res, coeff);
        }
        Ok(out)
    }

    pub fn degree_shift(&self, osc: &Oscillators, momentum: &[Rational64]) -> i64 {
        match self {
            EngineOp::Mode(c, m) => c.degree_shift(osc, momentum, *m),
            EngineOp::Osc(o) => -o.mode,
        }
    }

    pub fn momentum_shift(&self, slots: usize) -> Vec<Rational64> {
        match self {
            EngineOp::Mode(c, _) => c.momentum_shift().to_vec(),
            EngineOp::Osc(_) => vec![Rational64::zero(); slots],
        }
    }

    pub fn parity(&self) -> Parity {
        match self {
            EngineOp::Mode(c, _) => c.parity,
            EngineOp::Osc(_) => Parity::Even,
        }
    }

    pub fn describe(&self) -> String {
        match self {
            EngineOp::Mode(c, m) => format!("{}[{}]", c.label, m),
            EngineOp::Osc(o) => o.label.clone(),
        }
    }
}

/// One additive term of a relation side: a coefficient times a product of
/// operators; `ops[0]` acts first.
#[derive(Clone, Debug)]
pub struct OpSequence {
    pub coeff: Scalar,
    pub ops: Vec<EngineOp>,
}

impl OpSequence {
    pub fn new(coeff: Scalar, ops: Vec<EngineOp>) -> Self {
        OpSequence { coeff, ops }
    }

    /// Maximum prefix degree shift on the given input sector.
    pub fn max_prefix_shift(&self, osc: &Oscillators, sector: &[Rational64]) -> i64 {
        let mut momentum = sector.to_vec();
        let mut acc = 0i64;
        let mut max = 0i64;
        for op in &self.ops {
            acc += op.degree_shift(osc, &momentum);
            max = max.max(acc);
            for (m, s) in momentum.iter_mut().zip(op.momentum_shift(osc.slots())) {
                *m += s;
            }
        }
        max
    }

    pub fn apply(&self, osc: &Oscillators, v: &FockVector, cap: u32) -> Result<FockVector, EngineError> {
        let mut cur = v.scale(&self.coeff);
        for op in &self.ops {
            if cur.is_zero() {
                return Ok(cur);
            }
            cur = op.apply(osc, &cur, cap)?;
        }
        Ok(cur)
    }

    pub fn apply_cached(
        &self,
        osc: &Oscillators,
        v: &FockVector,
        cache: &ApplyCache,
    ) -> Result<FockVector, EngineError> {
        let mut cur = v.scale(&self.coeff);
        for op in &self.ops {
            if cur.is_zero() {
                return Ok(cur);
            }
            cur = op.apply_cached(osc, &cur, cache)?;
        }
        Ok(cur)
    }
}

/// Graded bracket of two schedulable operators as operator sequences:
/// `[a, b]_x = a b - (-1)^([a][b]) x b a`.
pub fn bracket_sequences(a: &EngineOp, b: &EngineOp, x: &Scalar) -> Vec<OpSequence> {
    let sign = if a.parity().is_odd() && b.parity().is_odd() {
        Scalar::from_int(-1)
    } else {
        Scalar::one()
    };
    vec![
        OpSequence::new(Scalar::one(), vec![b.clone(), a.clone()]),
        OpSequence::new(-(&sign * x), vec![a.clone(), b.clone()]),
    ]
}

/// All basis states of the given momentum with degree at most `max_degree`.
pub fn spanning_states(osc: &Oscillators, momentum: &[Rational64], max_degree: u32) -> Vec<FockState> {
    let mut out = Vec::new();
    let slots = osc.slots();
    // enumerate slot-mode pairs in a fixed order
    let mut pairs = Vec::new();
    for slot in 0..slots {
        for n in 1..=max_degree.max(0) {
            pairs.push((slot, n));
        }
    }
    fn rec(
        pairs: &[(usize, u32)],
        idx: usize,
        left: u32,
        content: &mut BTreeMap<(usize, u32), u32>,
        momentum: &[Rational64],
        out: &mut Vec<FockState>,
    ) {
        if idx == pairs.len() {
            out.push(FockState { momentum: momentum.to_vec(), content: content.clone() });
            return;
        }
        let (slot, n) = pairs[idx];
        rec(pairs, idx + 1, left, content, momentum, out);
        let max_k = left / n;
        for k in 1..=max_k {
            content.insert((slot, n), k);
            rec(pairs, idx + 1, left - n * k, content, momentum, out);
        }
        content.remove(&(slot, n));
    }
    let mut content = BTreeMap::new();
    rec(&pairs, 0, max_degree, &mut content, momentum, &mut out);
    out.sort();
    out
}

/// One relation instance: two operator-sum sides applied to every
/// admissible state of a sector.
#[derive(Clone, Debug)]
pub struct RelationInstance {
    pub id: String,
    pub params: Vec<(String, String)>,
    pub lhs: Vec<OpSequence>,
    pub rhs: Vec<OpSequence>,
}

impl RelationInstance {
    pub fn new(id: impl Into<String>) -> Self {
        RelationInstance { id: id.into(), params: Vec::new(), lhs: Vec::new(), rhs: Vec::new() }
    }

    pub fn with(mut self, key: &str, value: impl ToString) -> Self {
        self.params.push((key.to_string(), value.to_string()));
        self
    }

    /// Evaluate on one sector with the boundary rule: inputs are
    /// restricted to degrees where no truncated term can contribute; if
    /// none remain the instance is counted as boundary-skipped.
    pub fn check(&self, osc: &Oscillators, sector: &[Rational64], cache: &ApplyCache) -> InstanceRecord {
        let cap = cache.cap();
        let mut rec = InstanceRecord::new(self.id.clone());
        for (k, v) in &self.params {
            rec = rec.with(k, v);
        }
        rec = rec.with("sector", render_sector(sector));

        let mut max_shift = 0i64;
        for seq in self.lhs.iter().chain(&self.rhs) {
            max_shift = max_shift.max(seq.max_prefix_shift(osc, sector));
        }
        let input_cap = cap as i64 - max_shift;
        if input_cap < 0 {
            return rec.skipped();
        }
        let states = spanning_states(osc, sector, input_cap as u32);
        rec = rec.with("states", states.len());
        for state in states {
            let v = FockVector::basis(state.clone());
            let mut acc = FockVector::zero();
            for seq in &self.lhs {
                let r = match seq.apply_cached(osc, &v, cache) {
                    Ok(r) => r,
                    Err(_) => return rec.fail("unexpected truncation hit".into()),
                };
                acc.add_scaled(&r, &Scalar::one());
            }
            for seq in &self.rhs {
                let r = match seq.apply_cached(osc, &v, cache) {
                    Ok(r) => r,
                    Err(_) => return rec.fail("unexpected truncation hit".into()),
                };
                acc.add_scaled(&r, &Scalar::from_int(-1));
            }
            if !acc.is_zero() {
                let lead = acc.render_leading(osc);
                return rec
                    .with("state", state.render(osc))
                    .fail(format!("residual {}", lead));
            }
        }
        rec.pass()
    }
}

pub fn render_sector(sector: &[Rational64]) -> String {
    sector
        .iter()
        .map(|m| {
            if *m.denom() == 1 {
                format!("{}", m.numer())
            } else {
                format!("{}/{}", m.numer(), m.denom())
            }
        })
        .collect::<Vec<_>>()
        .join(",")
}

pub fn parse_sector(text: &str) -> Result<Vec<Rational64>, EngineError> {
    text.split(',')
        .map(|part| {
            let part = part.trim();
            let (num, den) = match part.split_once('/') {
                Some((a, b)) => (a.trim(), b.trim()),
                None => (part, "1"),
            };
            let n: i64 = num.parse().map_err(|_| EngineError::Parse {
                message: format!("bad sector component `{}`", part),
            })?;
            let d: i64 = den.parse().map_err(|_| EngineError::Parse {
                message: format!("bad sector component `{}`", part),
            })?;
            if d == 0 {
                return Err(EngineError::Parse { message: "zero denominator in sector".into() });
            }
            Ok(Rational64::new(n, d))
        })
        .collect()
}

/// Check a batch of instances over the given sectors, in parallel, with a
/// deterministic merged ordering.
pub fn run_instances(
    osc: &Oscillators,
    suite: &str,
    instances: Vec<RelationInstance>,
    sectors: &[Vec<Rational64>],
    cap: u32,
    jobs: usize,
) -> SuiteReport {
    use rayon::prelude::*;
    let tasks: Vec<(RelationInstance, Vec<Rational64>)> = instances
        .into_iter()
        .flat_map(|inst| {
            sectors
                .iter()
                .map(move |s| (inst.clone(), s.clone()))
                .collect::<Vec<_>>()
        })
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .expect("thread pool");
    let cache = ApplyCache::new(cap);
    let records: Vec<InstanceRecord> = pool.install(|| {
        tasks
            .par_iter()
            .map(|(inst, sector)| inst.check(osc, sector, &cache))
            .collect()
    });
    SuiteReport::new(suite, records)
}

/// The `A`-family expressed over the primitive slots.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DiagFamily {
    /// `A^j`, `j = 1..=2N`.
    A(usize),
    /// `A*^j`, `j` in {1, 2N-1}.
    ADual(usize),
    /// `c^l`, `l = 1..=N`.
    C(usize),
}

/// Inverse-row data in machine rationals.
pub fn inverse_rows_r64(n: usize) -> Result<BTreeMap<(usize, usize), Rational64>, EngineError> {
    let rs = build_root_system(n)?;
    let rows = rs.inverse_cartan_rows()?;
    let mut out = BTreeMap::new();
    for ((i, l), v) in rows {
        let num = i64::try_from(v.numer().clone()).expect("small rational");
        let den = i64::try_from(v.denom().clone()).expect("small rational");
        out.insert((i, l), Rational64::new(num, den));
    }
    Ok(out)
}

/// Oscillator-basis data for building currents.
pub struct Basis {
    pub osc: Oscillators,
    inv_rows: BTreeMap<(usize, usize), Rational64>,
}

impl Basis {
    pub fn new(n: usize) -> Result<Self, EngineError> {
        Ok(Basis { osc: Oscillators::new(n), inv_rows: inverse_rows_r64(n)? })
    }

    fn inv(&self, i: usize, l: usize) -> Rational64 {
        *self.inv_rows.get(&(i, l)).expect("inverse row entry")
    }

    /// Coefficients of the family's mode `n != 0` over the slots.
    pub fn mode_coeffs(&self, fam: DiagFamily, n: i64) -> Vec<(usize, Scalar)> {
        let two_n = 2 * self.osc.n;
        match fam {
            DiagFamily::C(l) => vec![(self.osc.c_slot(l), Scalar::one())],
            DiagFamily::A(i) if i < two_n => {
                let s = Scalar::from_int(if i % 2 == 1 { 1 } else { -1 });
                vec![(self.osc.a_slot(i), s.clone()), (self.osc.a_slot(i + 1), s)]
            }
            DiagFamily::A(i) => {
                assert_eq!(i, two_n);
                let half = Scalar::from_rational64(Rational64::new(1, 2));
                let envelope = crate::coeff::q_plus_qinv_pow(n) * half;
                (1..=two_n)
                    .map(|l| {
                        let s = Scalar::from_int(if l % 2 == 1 { 1 } else { -1 });
                        (self.osc.a_slot(l), &envelope * &s)
                    })
                    .collect()
            }
            DiagFamily::ADual(j) => {
                let mut acc: BTreeMap<usize, Scalar> = BTreeMap::new();
                for l in 1..two_n {
                    let c = self.inv(j, l);
                    if c.is_zero() {
                        continue;
                    }
                    for (slot, v) in self.mode_coeffs(DiagFamily::A(l), n) {
                        let add = v * Scalar::from_rational64(c);
                        let e = acc.entry(slot).or_insert_with(Scalar::zero);
                        *e += &add;
                    }
                }
                // The top-family term: 2/(q^n + q^-n) times the enveloped
                // combination collapses to a flat signed sum.
                let c = self.inv(j, two_n);
                if !c.is_zero() {
                    for l in 1..=two_n {
                        let s = Scalar::from_int(if l % 2 == 1 { 1 } else { -1 });
                        let add = s * Scalar::from_rational64(c);
                        let e = acc.entry(self.osc.a_slot(l)).or_insert_with(Scalar::zero);
                        *e += &add;
                    }
                }
                acc.into_iter().filter(|(_, v)| !v.is_zero()).collect()
            }
        }
    }

    /// The family's zero-mode charge form.
    pub fn zero_form(&self, fam: DiagFamily) -> LinForm {
        let two_n = 2 * self.osc.n;
        let mut form = LinForm::zero(self.osc.slots());
        match fam {
            DiagFamily::C(l) => form.coeffs[self.osc.c_slot(l)] = Rational64::from_integer(1),
            DiagFamily::A(i) if i < two_n => {
                let s = Rational64::from_integer(if i % 2 == 1 { 1 } else { -1 });
                form.coeffs[self.osc.a_slot(i)] = s;
                form.coeffs[self.osc.a_slot(i + 1)] = s;
            }
            DiagFamily::A(i) => {
                assert_eq!(i, two_n);
                for l in 1..=two_n {
                    form.coeffs[self.osc.a_slot(l)] =
                        Rational64::from_integer(if l % 2 == 1 { 1 } else { -1 });
                }
            }
            DiagFamily::ADual(j) => {
                for l in 1..=two_n {
                    let c = self.inv(j, l);
                    if c.is_zero() {
                        continue;
                    }
                    let sub = self.zero_form(DiagFamily::A(l));
                    form.add_scaled(&sub, c);
                }
            }
        }
        form
    }

    /// The family's momentum-shift vector.
    pub fn shift_vector(&self, fam: DiagFamily) -> Vec<Rational64> {
        let two_n = 2 * self.osc.n;
        let mut v = vec![Rational64::zero(); self.osc.slots()];
        match fam {
            DiagFamily::C(l) => v[self.osc.c_slot(l)] = Rational64::from_integer(1),
            DiagFamily::A(i) if i < two_n => {
                let s = Rational64::from_integer(if i % 2 == 1 { 1 } else { -1 });
                v[self.osc.a_slot(i)] = s;
                v[self.osc.a_slot(i + 1)] = s;
            }
            DiagFamily::A(i) => {
                assert_eq!(i, two_n);
                for l in 1..=two_n {
                    v[self.osc.a_slot(l)] = Rational64::from_integer(if l % 2 == 1 { 1 } else { -1 });
                }
            }
            DiagFamily::ADual(j) => {
                for l in 1..=two_n {
                    let c = self.inv(j, l);
                    if c.is_zero() {
                        continue;
                    }
                    for (slot, s) in self.shift_vector(DiagFamily::A(l)).into_iter().enumerate() {
                        v[slot] += s * c;
                    }
                }
            }
        }
        v
    }

    /// The linear oscillator mode of a diagonal family.
    pub fn family_mode(&self, fam: DiagFamily, n: i64, label: impl Into<String>) -> OscLinear {
        let parts = self
            .mode_coeffs(fam, n)
            .into_iter()
            .map(|(slot, c)| (slot, c))
            .collect();
        OscLinear { label: label.into(), mode: n, parts }
    }
}

/// One exponent term of a current: `sign * F(q^arg_shift z; kappa)` where
/// `F` is the standard field of the family.
#[derive(Clone, Debug)]
pub struct ExpTerm {
    pub sign: i64,
    pub family: DiagFamily,
    pub kappa: Rational64,
    pub arg_shift: Rational64,
}

/// Build one normal-ordered exponential from its exponent terms. Mode
/// tables are truncated at `depth`, which must be at least the degree cap
/// plus the largest series order in use.
pub fn vertex_exponential(
    basis: &Basis,
    terms: &[ExpTerm],
    cocycle: LinForm,
    scalar: Scalar,
    z_const: i64,
    depth: u32,
) -> VertexFactor {
    let slots = basis.osc.slots();
    let mut vf = VertexFactor::identity(slots);
    vf.scalar = scalar;
    vf.z_const = Rational64::from_integer(z_const);
    vf.cocycle = cocycle;
    for t in terms {
        let sgn = Scalar::from_int(t.sign);
        let zero = basis.zero_form(t.family);
        vf.z_form.add_scaled(&zero, Rational64::from_integer(t.sign));
        if !t.arg_shift.is_zero() {
            vf.q_form.add_scaled(&zero, t.arg_shift * Rational64::from_integer(t.sign));
        }
        for (slot, s) in basis.shift_vector(t.family).into_iter().enumerate() {
            vf.shift[slot] += s * Rational64::from_integer(t.sign);
        }
        for n in 1..=depth {
            let nn = n as i64;
            let kq = Scalar::q_pow(t.kappa * Rational64::from_integer(nn));
            let inv_qint = q_int(nn).inverse().expect("nonzero q-integer");
            // annihilation: sign * (-q^{kappa n}/[n]) * q^{-s n}
            let base_ann = -(&sgn) * &kq * &inv_qint * Scalar::q_pow(-t.arg_shift * Rational64::from_integer(nn));
            for (slot, c) in basis.mode_coeffs(t.family, nn) {
                let add = &base_ann * &c;
                let e = vf.ann.entry((slot, n)).or_insert_with(Scalar::zero);
                *e += &add;
            }
            // creation: sign * (+q^{kappa n}/[n]) * q^{+s n}
            let base_cre = &sgn * &kq * &inv_qint * Scalar::q_pow(t.arg_shift * Rational64::from_integer(nn));
            for (slot, c) in basis.mode_coeffs(t.family, -nn) {
                let add = &base_cre * &c;
                let e = vf.cre.entry((slot, n)).or_insert_with(Scalar::zero);
                *e += &add;
            }
        }
    }
    vf.cre.retain(|_, v| !v.is_zero());
    vf.ann.retain(|_, v| !v.is_zero());
    vf
}

/// The scalar function `C(z, w)` with `f1(z) f2(w) = C(z, w) :f1(z) f2(w):`,
/// truncated to the requested order: an overall rational power of `z`
/// (and `w^-1` implicitly through `x = w/z`) times a power series in `x`.
#[derive(Clone, Debug, PartialEq)]
pub struct Contraction {
    pub z_power: Rational64,
    pub coeffs: Vec<Scalar>,
}

impl Contraction {
    pub fn one(order: usize) -> Self {
        let mut coeffs = vec![Scalar::zero(); order + 1];
        coeffs[0] = Scalar::one();
        Contraction { z_power: Rational64::zero(), coeffs }
    }

    pub fn scale(&self, s: &Scalar) -> Self {
        Contraction { z_power: self.z_power, coeffs: self.coeffs.iter().map(|c| c * s).collect() }
    }

    /// Multiply by `(z - c w) = z(1 - c x)`.
    pub fn mul_z_minus(&self, c: &Scalar) -> Self {
        let mut coeffs = self.coeffs.clone();
        for k in (1..coeffs.len()).rev() {
            let t = &self.coeffs[k - 1] * c;
            coeffs[k] = &coeffs[k] - &t;
        }
        Contraction { z_power: self.z_power + Rational64::from_integer(1), coeffs }
    }

    /// Divide by `(z - c w)`: the geometric-series inverse.
    pub fn div_z_minus(&self, c: &Scalar) -> Self {
        let mut coeffs = vec![Scalar::zero(); self.coeffs.len()];
        for k in 0..self.coeffs.len() {
            let mut v = self.coeffs[k].clone();
            if k >= 1 {
                let t = c * &coeffs[k - 1];
                v = v + t;
            }
            coeffs[k] = v;
        }
        Contraction { z_power: self.z_power - Rational64::from_integer(1), coeffs }
    }
}

pub fn contraction_series(
    osc: &Oscillators,
    f1: &VertexFactor,
    f2: &VertexFactor,
    order: usize,
) -> Contraction {
    // gamma_k = sum_slots ann1(slot,k) * cre2(slot,k) * norm(slot,k)
    let mut gamma = vec![Scalar::zero(); order + 1];
    for k in 1..=order as u32 {
        let mut acc = Scalar::zero();
        for slot in 0..osc.slots() {
            if let (Some(a), Some(c)) = (f1.ann.get(&(slot, k)), f2.cre.get(&(slot, k))) {
                acc += &(a * c * osc.norm(slot, k));
            }
        }
        gamma[k as usize] = acc;
    }
    // E = exp(sum gamma_k x^k) via k E_k = sum_j (j gamma_j) E_{k-j}
    let mut coeffs = vec![Scalar::zero(); order + 1];
    coeffs[0] = Scalar::one();
    for k in 1..=order {
        let mut acc = Scalar::zero();
        for j in 1..=k {
            if gamma[j].is_zero() {
                continue;
            }
            let t = Scalar::from_int(j as i64) * &gamma[j] * &coeffs[k - j];
            acc += &t;
        }
        coeffs[k] = acc / Scalar::from_int(k as i64);
    }
    // zero-mode pairing of f1 against f2's momentum shift
    let delta_charges = osc.charges(&f2.shift);
    let z_power = f1.z_form.eval(&delta_charges);
    let mut unit = Scalar::one();
    let q_arg = f1.q_form.eval(&delta_charges);
    if !q_arg.is_zero() {
        unit = unit * Scalar::q_pow(q_arg);
    }
    let ph = f1.cocycle.eval(&delta_charges);
    if !ph.is_zero() {
        unit = unit * phase(ph);
    }
    Contraction { z_power, coeffs: coeffs.into_iter().map(|c| &c * &unit).collect() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::q_minus_qinv;

    fn r(n: i64) -> Rational64 {
        Rational64::from_integer(n)
    }

    fn zero_sector(osc: &Oscillators) -> Vec<Rational64> {
        vec![Rational64::zero(); osc.slots()]
    }

    #[test]
    fn oscillator_commutators_on_states() {
        // applying x_n then x_{-n} to the vacuum realizes the norm scalar
        let basis = Basis::new(2).unwrap();
        let osc = &basis.osc;
        let vac = FockVector::basis(FockState::vacuum(zero_sector(osc)));
        for fam in [DiagFamily::A(1), DiagFamily::A(4), DiagFamily::C(2)] {
            for n in 1..=2i64 {
                let up = basis.family_mode(fam, -n, "up");
                let down = basis.family_mode(fam, n, "down");
                let lifted = up.apply(osc, &vac, 4).unwrap();
                let back = down.apply(osc, &lifted, 4).unwrap();
                // expected scalar: sum over slots of c_slot^2 * norm(slot);
                // vanishes on the isotropic self-pairings
                let mut want = Scalar::zero();
                for (slot, c) in basis.mode_coeffs(fam, n) {
                    let c2 = basis
                        .mode_coeffs(fam, -n)
                        .into_iter()
                        .find(|(s, _)| *s == slot)
                        .map(|(_, v)| v)
                        .unwrap();
                    want += &(c * c2 * osc.norm(slot, n as u32));
                }
                if want.is_zero() {
                    assert!(back.is_zero(), "fam {:?} n {}", fam, n);
                } else {
                    assert_eq!(back.len(), 1, "fam {:?} n {}", fam, n);
                    let (state, coeff) = back.iter().next().unwrap();
                    assert_eq!(state.degree(), 0);
                    assert_eq!(coeff, &want, "fam {:?} n {}", fam, n);
                }
            }
        }
    }

    #[test]
    fn diagonal_family_pairings_match_cartan() {
        // [A^j_n, A^j'_{-n}] = [a_jj' n][n]/n, including the enveloped
        // 2N-th family; and the dual rows pair to delta.
        for n_rank in 1..=3usize {
            let basis = Basis::new(n_rank).unwrap();
            let osc = &basis.osc;
            let rs = build_root_system(n_rank).unwrap();
            let two_n = 2 * n_rank;
            for n in 1..=3i64 {
                let pairing = |f1: DiagFamily, f2: DiagFamily| -> Scalar {
                    let mut acc = Scalar::zero();
                    let right = basis.mode_coeffs(f2, -n);
                    for (slot, c1) in basis.mode_coeffs(f1, n) {
                        if let Some((_, c2)) = right.iter().find(|(s, _)| *s == slot) {
                            acc += &(c1 * c2.clone() * osc.norm(slot, n as u32));
                        }
                    }
                    acc
                };
                for j in 1..=two_n {
                    for jp in 1..=two_n {
                        let a = rs.cartan_i64(j, jp);
                        let want = q_int(a * n) * q_int(n) * Scalar::from_rational64(Rational64::new(1, n));
                        assert_eq!(pairing(DiagFamily::A(j), DiagFamily::A(jp)), want,
                            "rank {} pair ({}, {}) mode {}", n_rank, j, jp, n);
                    }
                }
                let dual_rows = if two_n - 1 == 1 { vec![1] } else { vec![1, two_n - 1] };
                for &i in &dual_rows {
                    for jp in 1..=two_n {
                        let want = if i == jp {
                            q_int(n) * q_int(n) * Scalar::from_rational64(Rational64::new(1, n))
                        } else {
                            Scalar::zero()
                        };
                        assert_eq!(pairing(DiagFamily::ADual(i), DiagFamily::A(jp)), want,
                            "rank {} dual pair ({}, {}) mode {}", n_rank, i, jp, n);
                    }
                }
            }
        }
    }

    #[test]
    fn momentum_shift_and_charge() {
        let basis = Basis::new(1).unwrap();
        let osc = &basis.osc;
        // a single momentum-shift exponential: e^{c^1(z)} raises the c
        // charge by one
        let vf = vertex_exponential(
            &basis,
            &[ExpTerm { sign: 1, family: DiagFamily::C(1), kappa: r(0), arg_shift: r(0) }],
            LinForm::zero(osc.slots()),
            Scalar::one(),
            0,
            4,
        );
        let current = CurrentOp::new("E", vec![vf], 0, Parity::Even);
        let vac = FockVector::basis(FockState::vacuum(zero_sector(osc)));
        let out = current.apply_mode(osc, 0, &vac, 4).unwrap();
        assert_eq!(out.len(), 1);
        let (state, coeff) = out.iter().next().unwrap();
        assert_eq!(state.momentum[osc.c_slot(1)], r(1));
        assert_eq!(state.degree(), 0);
        assert_eq!(coeff, &Scalar::one());
        // mode -1 creates one unit of degree
        let out = current.apply_mode(osc, -1, &vac, 4).unwrap();
        for (s, _) in out.iter() {
            assert_eq!(s.degree(), 1);
        }
        assert!(!out.is_zero());
    }

    #[test]
    fn single_mode_exponential_first_order() {
        // e^{alpha A_{-1} z}: the degree-1 extraction on the vacuum is
        // alpha A_{-1} |0>
        let basis = Basis::new(1).unwrap();
        let osc = &basis.osc;
        let mut vf = VertexFactor::identity(osc.slots());
        let alpha = q_int(3);
        vf.cre.insert((osc.a_slot(1), 1), alpha.clone());
        let current = CurrentOp::new("T", vec![vf], 0, Parity::Even);
        let vac = FockVector::basis(FockState::vacuum(zero_sector(osc)));
        let out = current.apply_mode(osc, -1, &vac, 3).unwrap();
        assert_eq!(out.len(), 1);
        let (state, coeff) = out.iter().next().unwrap();
        assert_eq!(state.content.get(&(osc.a_slot(1), 1)), Some(&1));
        assert_eq!(coeff, &alpha);
    }

    #[test]
    fn q_charge_zero_mode() {
        // q^{A^1_0} acts on a momentum state by q^{charge}
        let basis = Basis::new(1).unwrap();
        let osc = &basis.osc;
        let mut vf = VertexFactor::identity(osc.slots());
        vf.q_form = basis.zero_form(DiagFamily::A(1));
        let op = CurrentOp::new("qh", vec![vf], 0, Parity::Even);
        let mut momentum = zero_sector(osc);
        momentum[osc.a_slot(1)] = r(1);
        momentum[osc.a_slot(2)] = r(2);
        let v = FockVector::basis(FockState::vacuum(momentum));
        let out = op.apply_mode(osc, 0, &v, 2).unwrap();
        let (_, coeff) = out.iter().next().unwrap();
        // charges: +1 on slot a1, -2 on slot a2; form is (+1, +1, 0)
        assert_eq!(coeff, &Scalar::q_pow(r(-1)));
    }

    #[test]
    fn contraction_of_shifted_exponentials() {
        // <e^{c(z)} e^{-c(q w)}> = 1/(z - q w), i.e. z^-1 sum q^k x^k
        let basis = Basis::new(1).unwrap();
        let osc = &basis.osc;
        let order = 6;
        let f1 = vertex_exponential(
            &basis,
            &[ExpTerm { sign: 1, family: DiagFamily::C(1), kappa: r(0), arg_shift: r(0) }],
            LinForm::zero(osc.slots()),
            Scalar::one(),
            0,
            order as u32 + 2,
        );
        let f2 = vertex_exponential(
            &basis,
            &[ExpTerm { sign: -1, family: DiagFamily::C(1), kappa: r(0), arg_shift: r(1) }],
            LinForm::zero(osc.slots()),
            Scalar::one(),
            0,
            order as u32 + 2,
        );
        let c = contraction_series(osc, &f1, &f2, order);
        let want = Contraction::one(order).div_z_minus(&Scalar::q_pow(r(1)));
        assert_eq!(c, want);
    }

    #[test]
    fn boundary_planning_blocks_overflow() {
        let basis = Basis::new(1).unwrap();
        let osc = &basis.osc;
        let up = Arc::new(basis.family_mode(DiagFamily::A(1), -2, "up2"));
        let seq = OpSequence::new(Scalar::one(), vec![EngineOp::Osc(up.clone()), EngineOp::Osc(up)]);
        let sector = zero_sector(osc);
        assert_eq!(seq.max_prefix_shift(osc, &sector), 4);
        let inst = RelationInstance {
            id: "t".into(),
            params: vec![],
            lhs: vec![seq],
            rhs: vec![],
        };
        // cap 3 < 4: every input degree is blocked, instance skips
        let rec = inst.check(osc, &sector, &ApplyCache::new(3));
        assert_eq!(rec.status, crate::report::Status::SkippedBoundary);
    }

    #[test]
    fn sector_roundtrip_and_validation() {
        let osc = Oscillators::new(2);
        let s = parse_sector("0,1/2,0,-3/4,1,0").unwrap();
        assert_eq!(render_sector(&s), "0,1/2,0,-3/4,1,0");
        assert!(osc.validate_sector(&s).is_ok());
        assert!(osc.validate_sector(&parse_sector("0,1/3,0,0,0,0").unwrap()).is_err());
        assert!(osc.validate_sector(&parse_sector("0,0").unwrap()).is_err());
    }

    #[test]
    fn spanning_state_counts() {
        let osc = Oscillators::new(2);
        let sector = vec![Rational64::zero(); osc.slots()];
        // 6 slots: degree <= 1 gives 1 + 6 states
        assert_eq!(spanning_states(&osc, &sector, 1).len(), 7);
        // degree <= 2: 1 + 6 + (6 at n=2) + multichoose(6,2)=21 -> 34
        assert_eq!(spanning_states(&osc, &sector, 2).len(), 34);
    }

    #[test]
    fn psi_style_factor_zero_mode() {
        // with only a q-form, mode 0 multiplies by q^{charge}; all other
        // modes vanish on the vacuum
        let basis = Basis::new(1).unwrap();
        let osc = &basis.osc;
        let mut vf = VertexFactor::identity(osc.slots());
        vf.q_form = basis.zero_form(DiagFamily::A(2));
        let mut mom = zero_sector(osc);
        mom[osc.a_slot(2)] = r(1);
        let op = CurrentOp::new("psi0", vec![vf], 0, Parity::Even);
        let v = FockVector::basis(FockState::vacuum(mom));
        let out = op.apply_mode(osc, 1, &v, 2).unwrap();
        assert!(out.is_zero());
        let out = op.apply_mode(osc, 0, &v, 2).unwrap();
        let (_, c) = out.iter().next().unwrap();
        // A^2_0 form: -(a2+a3)? rank 1: A^2 is the top family: charges
        // (+1 at a1, +1 at a2 with signs): charge of slot a2 = -1, form
        // coefficient -1 -> q^{+1}... computed value:
        let charges = osc.charges(&[r(0), r(1), r(0)]);
        let arg = basis.zero_form(DiagFamily::A(2)).eval(&charges);
        assert_eq!(c, &Scalar::q_pow(arg));
    }

    #[test]
    fn graded_bracket_sequences_sign() {
        let basis = Basis::new(1).unwrap();
        let osc = &basis.osc;
        // two odd currents: bracket is the anticommutator
        let mut vf = VertexFactor::identity(osc.slots());
        vf.cre.insert((osc.c_slot(1), 1), Scalar::one());
        let a = EngineOp::Mode(Arc::new(CurrentOp::new("A", vec![vf.clone()], 0, Parity::Odd)), -1);
        let b = EngineOp::Mode(Arc::new(CurrentOp::new("B", vec![vf], 0, Parity::Odd)), -1);
        let seqs = bracket_sequences(&a, &b, &Scalar::one());
        let vac = FockVector::basis(FockState::vacuum(zero_sector(osc)));
        let mut acc = FockVector::zero();
        for s in &seqs {
            acc.add_scaled(&s.apply(osc, &vac, 4).unwrap(), &Scalar::one());
        }
        // odd-odd bracket at x = 1 is the anticommutator: AB + BA
        assert_eq!(acc.len(), 1);
        let (state, c) = acc.iter().next().unwrap();
        assert_eq!(state.degree(), 2);
        assert_eq!(c, &Scalar::from_int(2));
        let _ = q_minus_qinv();
    }
}
