use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;

use p3hc::gibbs::{
    certificate_holds, certificate_tail, heat_bath_kernel, polymer_series_bound, tau_threshold, Sampler,
};

fn graph_from_mask(n: usize, mask: u32) -> Vec<Vec<u32>> {
    let mut adj = vec![Vec::new(); n];
    let mut bit = 0;
    for a in 0..n {
        for b in a + 1..n {
            if mask >> bit & 1 == 1 {
                adj[a].push(b as u32);
                adj[b].push(a as u32);
            }
            bit += 1;
        }
    }
    adj
}

fn weight(s: u32, u: &BigRational) -> BigRational {
    let mut w = BigRational::one();
    for _ in 0..s.count_ones() {
        w *= u;
    }
    w
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn heat_bath_is_reversible_on_small_graphs(n in 1usize..=4, mask in 0u32..64, p in 1i64..1000, q in 1i64..100) {
        let edges = n * (n - 1) / 2;
        let adj = graph_from_mask(n, mask & ((1 << edges) - 1));
        let u = BigRational::new(BigInt::from(p), BigInt::from(q));
        let (states, k) = heat_bath_kernel(&adj, &u);
        for (i, row) in k.iter().enumerate() {
            let total = row.iter().fold(BigRational::zero(), |a, x| a + x);
            prop_assert_eq!(total, BigRational::one());
            for (j, kij) in row.iter().enumerate() {
                let lhs = weight(states[i], &u) * kij;
                let rhs = weight(states[j], &u) * &k[j][i];
                prop_assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn series_ratio_falls_with_activity(a in 2.0f64..8.0, b in 0.01f64..1.0) {
        let lo = polymer_series_bound(10f64.powf(a));
        let hi = polymer_series_bound(10f64.powf(a + b));
        prop_assert!(hi.rhs_ratio < lo.rhs_ratio);
    }
}

#[test]
fn two_sites_sample_the_edge_measure() {
    let adj = vec![vec![1u32], vec![0u32]];
    let u = 1.0;
    let mut s = Sampler::new(&adj, u, 7, vec![false, false], &[false, false]).unwrap();
    let mut counts = [0u64; 3];
    let steps = 1_000_000;
    for _ in 0..steps {
        s.step();
        let st = s.state();
        counts[match (st[0], st[1]) {
            (false, false) => 0,
            (true, false) => 1,
            (false, true) => 2,
            _ => unreachable!("both ends of an edge occupied"),
        }] += 1;
    }
    // Z = 1 + 2u
    let z = 1.0 + 2.0 * u;
    let want = [1.0 / z, u / z, u / z];
    for i in 0..3 {
        let got = counts[i] as f64 / steps as f64;
        assert!((got - want[i]).abs() / want[i] < 0.02, "state {i}: {got} vs {}", want[i]);
    }
}

#[test]
fn frozen_sites_never_move() {
    let adj = vec![vec![1u32], vec![0, 2], vec![1]];
    let mut s = Sampler::new(&adj, 5.0, 3, vec![true, false, false], &[true, false, false]).unwrap();
    s.run(10_000);
    assert!(s.state()[0]);
    assert!(!s.state()[1]);
    assert_eq!(s.free_sites(), 2);
    assert!(Sampler::new(&adj, 1.0, 0, vec![true, true, false], &[false; 3]).is_err());
}

#[test]
fn same_seed_same_run() {
    let adj: Vec<Vec<u32>> = (0..10u32).map(|v| vec![(v + 1) % 10, (v + 9) % 10]).collect();
    let run = |seed| {
        let mut s = Sampler::new(&adj, 2.0, seed, vec![false; 10], &[false; 10]).unwrap();
        s.run(5000);
        s.state().to_vec()
    };
    assert_eq!(run(11), run(11));
}

#[test]
fn certificate_switches_on_at_tau_zero() {
    let t = tau_threshold(5, 150.0);
    let want = 6.0 * (13f64.ln() + 1.0 + 5f64.ln() + 150.0 * 2f64.ln());
    assert!((t.tau0 - want).abs() < 1e-9);
    assert!(certificate_holds(5, 150.0, t.tau0));
    assert!(!certificate_holds(5, 150.0, t.tau0 - 0.5));
    assert!(certificate_tail(5, 150.0, t.tau0 * 2.0).unwrap() < 1e-6);
}

#[test]
fn series_bound_at_the_threshold_activity() {
    let b = polymer_series_bound(1e5);
    assert!(b.converges);
    assert!((b.rhs_ratio - 0.0868).abs() / 0.0868 < 0.05);
    assert!(b.lhs_ratio <= b.rhs_ratio);
    assert!(!polymer_series_bound(100.0).converges);
}
