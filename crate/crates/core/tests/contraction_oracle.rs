//! Independent check of the contraction series: brute-force operator
//! reordering. Both exponentials are expanded term by term to the target
//! order and every annihilation mode is moved past every creation mode by
//! the two-oscillator commutation scalars, with multiset pairing counts.
//! The closed-form series exponentiation in the engine never enters this
//! path.

use std::collections::BTreeMap;

use glnn_core::coeff::Scalar;
use glnn_core::fock::{
    contraction_series, vertex_exponential, Basis, Contraction, DiagFamily, ExpTerm, LinForm,
    Oscillators, VertexFactor,
};
use num::{Rational64, Zero};

fn factorial(k: u32) -> i64 {
    (1..=k as i64).product::<i64>().max(1)
}

/// All multisets over `keys` with total weighted degree exactly `target`.
fn multisets(
    keys: &[((usize, u32), Scalar)],
    target: u32,
) -> Vec<Vec<((usize, u32), u32, Scalar)>> {
    fn rec(
        keys: &[((usize, u32), Scalar)],
        idx: usize,
        left: u32,
        acc: &mut Vec<((usize, u32), u32, Scalar)>,
        out: &mut Vec<Vec<((usize, u32), u32, Scalar)>>,
    ) {
        if left == 0 {
            out.push(acc.clone());
            return;
        }
        if idx == keys.len() {
            return;
        }
        rec(keys, idx + 1, left, acc, out);
        let ((slot, n), beta) = &keys[idx];
        let max_k = left / n;
        for k in 1..=max_k {
            acc.push(((*slot, *n), k, beta.clone()));
            rec(keys, idx + 1, left - n * k, acc, out);
            acc.pop();
        }
    }
    let mut out = Vec::new();
    let mut acc = Vec::new();
    rec(keys, 0, target, &mut acc, &mut out);
    out
}

/// Vacuum expectation of `exp(ann half of f1) * exp(cre half of f2)` at
/// order `w^k z^-k`, by full contraction: only identical mode multisets
/// pair, each with `k!` pairings per mode.
fn brute_force_coefficient(osc: &Oscillators, f1: &VertexFactor, f2: &VertexFactor, k: u32) -> Scalar {
    let ann: Vec<((usize, u32), Scalar)> = f1.ann.iter().map(|(a, b)| (*a, b.clone())).collect();
    let cre: Vec<((usize, u32), Scalar)> = f2.cre.iter().map(|(a, b)| (*a, b.clone())).collect();
    let mut total = Scalar::zero();
    for t1 in multisets(&ann, k) {
        let m1: BTreeMap<(usize, u32), (u32, Scalar)> =
            t1.into_iter().map(|(key, mult, beta)| (key, (mult, beta))).collect();
        'outer: for t2 in multisets(&cre, k) {
            // all annihilators must find matching creators
            let m2: BTreeMap<(usize, u32), (u32, Scalar)> =
                t2.into_iter().map(|(key, mult, beta)| (key, (mult, beta))).collect();
            if m1.len() != m2.len() {
                continue;
            }
            let mut term = Scalar::one();
            for (key, (mult1, beta1)) in &m1 {
                let Some((mult2, beta2)) = m2.get(key) else { continue 'outer };
                if mult1 != mult2 {
                    continue 'outer;
                }
                // (beta1 beta2 norm)^mult * mult! pairings / (mult!)^2
                let norm = osc.norm(key.0, key.1);
                let base = beta1 * beta2 * norm;
                term = term * base.pow(*mult1 as i32) / Scalar::from_int(factorial(*mult1));
            }
            total += &term;
        }
    }
    total
}

fn oracle_contraction(osc: &Oscillators, f1: &VertexFactor, f2: &VertexFactor, order: usize) -> Contraction {
    // zero-mode pairing, computed independently from the factor data
    let charges = osc.charges(&f2.shift);
    let z_power = f1.z_form.eval(&charges);
    let mut unit = Scalar::one();
    let q_arg = f1.q_form.eval(&charges);
    if !q_arg.is_zero() {
        unit = unit * Scalar::q_pow(q_arg);
    }
    let ph = f1.cocycle.eval(&charges);
    if !ph.is_zero() {
        unit = unit * glnn_core::coeff::phase(ph);
    }
    let coeffs = (0..=order as u32)
        .map(|k| brute_force_coefficient(osc, f1, f2, k) * &unit)
        .collect();
    Contraction { z_power, coeffs }
}

fn z_factor(basis: &Basis, plus: bool, i: usize, depth: u32) -> VertexFactor {
    let kappa = Rational64::new(if plus { -1 } else { 1 }, 2);
    vertex_exponential(
        basis,
        &[ExpTerm {
            sign: if plus { 1 } else { -1 },
            family: DiagFamily::A(i),
            kappa,
            arg_shift: Rational64::zero(),
        }],
        LinForm::zero(basis.osc.slots()),
        Scalar::one(),
        0,
        depth,
    )
}

#[test]
fn contraction_matches_brute_force_reordering() {
    let order = 8;
    let depth = order as u32 + 1;
    for n in 1..=3usize {
        let basis = Basis::new(n).unwrap();
        let osc = &basis.osc;
        for s1 in [true, false] {
            for s2 in [true, false] {
                for i in 1..2 * n {
                    for ip in 1..2 * n {
                        let f1 = z_factor(&basis, s1, i, depth);
                        let f2 = z_factor(&basis, s2, ip, depth);
                        let fast = contraction_series(osc, &f1, &f2, order);
                        let slow = oracle_contraction(osc, &f1, &f2, order);
                        assert_eq!(fast, slow, "n={} s1={} s2={} i={} ip={}", n, s1, s2, i, ip);
                    }
                }
            }
        }
    }
}

#[test]
fn contraction_matches_brute_force_on_auxiliary_factors() {
    let order = 8;
    let depth = order as u32 + 1;
    let basis = Basis::new(2).unwrap();
    let osc = &basis.osc;
    let c_exp = |sign: i64, l: usize, arg: i64| {
        vertex_exponential(
            &basis,
            &[ExpTerm {
                sign,
                family: DiagFamily::C(l),
                kappa: Rational64::zero(),
                arg_shift: Rational64::from_integer(arg),
            }],
            LinForm::zero(osc.slots()),
            Scalar::one(),
            0,
            depth,
        )
    };
    for (f1, f2) in [
        (c_exp(1, 1, 0), c_exp(-1, 1, 1)),
        (c_exp(-1, 1, 1), c_exp(-1, 1, -1)),
        (c_exp(-1, 2, 2), c_exp(1, 2, 0)),
        (c_exp(1, 1, 0), c_exp(1, 2, 0)),
    ] {
        let fast = contraction_series(osc, &f1, &f2, order);
        let slow = oracle_contraction(osc, &f1, &f2, order);
        assert_eq!(fast, slow);
    }
}

#[test]
fn contraction_of_identity_factor_is_one() {
    let basis = Basis::new(1).unwrap();
    let f1 = z_factor(&basis, true, 1, 6);
    let id = VertexFactor::identity(basis.osc.slots());
    let c = contraction_series(&basis.osc, &f1, &id, 5);
    assert_eq!(c, Contraction::one(5));
}

#[test]
fn mixed_seed_style_factors_against_currents() {
    // dressed dual-row exponentials against plain ones: the pairs that
    // actually occur in the component checks
    let order = 6;
    let depth = order as u32 + 1;
    for n in 1..=2usize {
        let basis = Basis::new(n).unwrap();
        let osc = &basis.osc;
        let top = (2 * n - 1).max(1);
        let dual = vertex_exponential(
            &basis,
            &[ExpTerm {
                sign: -1,
                family: DiagFamily::ADual(top),
                kappa: Rational64::new(1, 2),
                arg_shift: Rational64::from_integer(1),
            }],
            LinForm::zero(osc.slots()),
            Scalar::one(),
            0,
            depth,
        );
        for i in 1..2 * n {
            for plus in [true, false] {
                let x = z_factor(&basis, plus, i, depth);
                assert_eq!(
                    contraction_series(osc, &dual, &x, order),
                    oracle_contraction(osc, &dual, &x, order),
                    "n={} i={} plus={}",
                    n,
                    i,
                    plus
                );
                assert_eq!(
                    contraction_series(osc, &x, &dual, order),
                    oracle_contraction(osc, &x, &dual, order),
                    "reversed n={} i={} plus={}",
                    n,
                    i,
                    plus
                );
            }
        }
    }
}
