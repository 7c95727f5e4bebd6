use glnn_core::{levelone::*, vertexops::*, fock::run_instances};
use num::{Rational64, Zero};
use std::time::Instant;
fn main() {
    for n in [1usize, 2] {
        let sectors = default_sectors(n).unwrap();
        println!("n={} sectors: {}", n, sectors.len());
        let t = Instant::now();
        let alg = build_level_one(n, 3 + 2 + 2, true).unwrap();
        let instances = current_relation_instances(&alg, 2);
        let rep = run_instances(&alg.basis.osc, "currents", instances, &sectors[..2.min(sectors.len())], 3, 1);
        println!("  currents {:?}: pass={} fail={} skip={}", t.elapsed(), rep.counts.pass, rep.counts.fail, rep.counts.skipped_boundary);
        for f in rep.failures().take(3) { println!("  FAIL {:?}", f); }
        let t = Instant::now();
        let serre = serre_relation_instances(&alg, 2);
        let rep = run_instances(&alg.basis.osc, "serre", serre, &sectors[..2.min(sectors.len())], 3, 1);
        println!("  serre {:?}: pass={} fail={} skip={}", t.elapsed(), rep.counts.pass, rep.counts.fail, rep.counts.skipped_boundary);
        for f in rep.failures().take(3) { println!("  FAIL {:?}", f); }
        let t = Instant::now();
        let rep = check_seed_drinfeld_relations(n, 3, 2, &sectors, 1).unwrap();
        println!("  intseed {:?}: pass={} fail={} skip={}", t.elapsed(), rep.counts.pass, rep.counts.fail, rep.counts.skipped_boundary);
        for f in rep.failures().take(3) { println!("  FAIL {:?}", f); }
        let t = Instant::now();
        let rep = check_component_relations(n, 3, 2, &sectors, 1).unwrap();
        println!("  intrec {:?}: pass={} fail={} skip={}", t.elapsed(), rep.counts.pass, rep.counts.fail, rep.counts.skipped_boundary);
        for f in rep.failures().take(3) { println!("  FAIL {:?}", f); }
    }
    let _ = Rational64::zero();
}
