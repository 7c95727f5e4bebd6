use glnn_core::levelone::*;
use glnn_core::fock::run_instances;
use num::{Rational64, Zero};
use std::time::Instant;
fn main() {
    let t0 = Instant::now();
    let alg = build_level_one(2, 3, true).unwrap();
    let instances = current_relation_instances(&alg, 2);
    println!("build {:?}, instances: {}", t0.elapsed(), instances.len());
    let sectors = vec![vec![Rational64::zero(); alg.basis.osc.slots()]];
    let t1 = Instant::now();
    let report = run_instances(&alg.basis.osc, "currents", instances, &sectors, 3, 8);
    println!("run {:?}: pass={} fail={} skip={}", t1.elapsed(), report.counts.pass, report.counts.fail, report.counts.skipped_boundary);
    for f in report.failures().take(5) { println!("FAIL {:?}", f); }
}
