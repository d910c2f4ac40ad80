use std::time::Instant;
use sqhex_core::lattice::{LatticeSpec, PeriodicWeights};
use sqhex_core::rng::replica_rng;
use sqhex_core::sample::sample_chain;

#[test]
fn probe_chain_speed() {
    // hexagon staircase N=60 (criterion-9 shape)
    let spec = LatticeSpec::staircase(60, 2, vec![1], PeriodicWeights::uniform(1, &[])).unwrap();
    let t0 = Instant::now();
    let reps = 50;
    for r in 0..reps {
        let mut rng = replica_rng(1, r);
        let _ = sample_chain(&spec, &mut rng).unwrap();
    }
    let dt = t0.elapsed().as_secs_f64() / reps as f64;
    println!("hexagon N=60: {:.4} s/replica -> 5000 replicas ~ {:.0} s single-thread", dt, dt * 5000.0);

    // §7.1.2 N=100
    let mut y = std::collections::BTreeMap::new();
    y.insert(1, 1.0);
    let spec = LatticeSpec::staircase(100, 2, vec![0, 1], PeriodicWeights { n: 2, x: vec![1.0, 1.0], y }).unwrap();
    let t0 = Instant::now();
    for r in 0..5 {
        let mut rng = replica_rng(2, r);
        let _ = sample_chain(&spec, &mut rng).unwrap();
    }
    println!("sqhex N=100: {:.4} s/replica", t0.elapsed().as_secs_f64() / 5.0);
}
