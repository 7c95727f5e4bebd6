use glnn_core::levelone::*;
use glnn_core::fock::run_instances;
use num::{Rational64, Zero};
use std::time::Instant;
fn main() {
    let alg = build_level_one(2, 3, true).unwrap();
    let instances: Vec<_> = current_relation_instances(&alg, 2)
        .into_iter()
        .filter(|i| i.id == "currents.psi-x")
        .take(40)
        .collect();
    let sectors = vec![vec![Rational64::zero(); alg.basis.osc.slots()]];
    let t1 = Instant::now();
    let report = run_instances(&alg.basis.osc, "currents", instances, &sectors, 3, 1);
    println!("run {:?}: pass={} fail={}", t1.elapsed(), report.counts.pass, report.counts.fail);
}
