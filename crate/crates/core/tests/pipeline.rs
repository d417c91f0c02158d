use std::collections::HashSet;
use std::sync::OnceLock;

use num_rational::BigRational;
use num_traits::ToPrimitive;

use p3hc::exact::{konig_mis, loop_decomposition_check, verify_lemma1, LoopDecomposition};
use p3hc::gibbs::{contour_weight, hamiltonian, CoarseGraph, CoarseSpin, Contour, ModelParams};
use p3hc::graph::{AtlasClass, Parity};
use p3hc::ground_state::{
    exact_density, pattern_window_density, urchin_flip, urchin_sites, vacant_edges, vacant_spurs, yellow_loops,
    Configuration, YellowShape,
};
use p3hc::partition::{template_of_kind, PatternKind};
use p3hc::pipeline::Pipeline;
use p3hc::substitution::SeedKind;
use p3hc::supertiling::build_supertiling;

fn pipe() -> &'static Pipeline {
    static P: OnceLock<Pipeline> = OnceLock::new();
    P.get_or_init(|| Pipeline::new(SeedKind::Sun, 8).expect("k=8 sun pipeline"))
}

#[test]
fn interiors_partition_the_safe_window() {
    let p = pipe();
    let part = &p.partition;
    assert!(part.safe_count() > 1000);
    let mut seen = HashSet::new();
    for (i, inst) in part.patterns.iter().enumerate() {
        assert_eq!(inst.interior.len(), template_of_kind(inst.kind).cells.len());
        for &v in &inst.interior {
            assert!(seen.insert(v), "vertex {v} in two interiors");
            assert_eq!(part.owner[v as usize], Some(i as u32));
        }
    }
    for v in 0..p.patch.graph.len() {
        if part.safe[v] {
            assert!(part.owner[v].is_some(), "safe vertex {v} uncovered");
        }
    }
}

#[test]
fn pattern_kind_follows_the_supertile_class() {
    for inst in &pipe().partition.patterns {
        assert_eq!(PatternKind::of_class(inst.center_class), Some(inst.kind));
        assert_eq!(inst.perfect.len(), inst.kind.perfect_count());
    }
}

#[test]
fn supertiling_needs_four_levels() {
    let shallow = Pipeline::new(SeedKind::Sun, 3);
    assert!(shallow.is_err());
    let p = pipe();
    let sg = build_supertiling(&p.patch.tiling, &p.patch.graph).unwrap();
    assert!(sg.to_original.iter().all(|o| o.is_some()));
}

#[test]
fn ground_state_is_the_unique_maximum() {
    let p = pipe();
    let g = &p.patch.graph;
    p.ground.check_admissible(g).unwrap();
    let left: Vec<bool> = g.parity.iter().map(|&x| x == Parity::Even).collect();
    let mis = konig_mis(&g.adj, &left);
    let differ = (0..g.len()).filter(|&v| p.partition.safe[v] && mis[v] != p.ground.occupied[v]).count();
    assert_eq!(differ, 0);
    let d = pattern_window_density(&p.ground, &p.partition).unwrap().to_f64().unwrap();
    assert!((d - exact_density().to_f64()).abs() < 0.02, "{d}");
}

#[test]
fn every_instance_passes_the_exact_check() {
    let p = pipe();
    let mut done = HashSet::new();
    for inst in &p.partition.patterns {
        if !done.insert(inst.center_class) {
            continue;
        }
        let r = verify_lemma1(inst, &p.patch.graph).unwrap();
        assert!(r.passed, "{:?}", r);
        let ld = LoopDecomposition { center: inst.center, loops: inst.loops(&p.patch.graph).unwrap() };
        let v = loop_decomposition_check(inst, &ld, &p.patch.graph);
        assert!(v.passed(), "{:?} {:?}", inst.kind, v);
        assert_eq!(v.exact_cover, inst.kind == PatternKind::Urchin);
    }
}

#[test]
fn pruned_yellow_lines_close_up() {
    let p = pipe();
    let g = &p.patch.graph;
    let comps = yellow_loops(&p.ground, g);
    assert!(!comps.is_empty());
    for c in comps.iter().filter(|c| !c.clipped) {
        assert_eq!(c.shape, YellowShape::Closed);
        assert_eq!(c.edges.len() % 2, 0);
    }
    let total: usize = comps.iter().map(|c| c.edges.len()).sum();
    assert_eq!(total + vacant_spurs(&p.ground, g).len(), vacant_edges(&p.ground, g).len());
}

#[test]
fn each_urchin_flip_adds_one_particle() {
    let p = pipe();
    let g = &p.patch.graph;
    let sites = urchin_sites(g, &p.patch.classes);
    assert!(!sites.is_empty());
    for s in &sites {
        assert_eq!(p.patch.classes[s.center as usize], AtlasClass::Star);
    }
    let even = Configuration::sublattice(g, Parity::Even);
    let flipped = urchin_flip(&even, g, &sites).unwrap();
    assert_eq!(flipped.count(), even.count() + sites.len());
    flipped.check_admissible(g).unwrap();
    assert!(urchin_flip(&flipped, g, &sites[..1]).is_err());
}

#[test]
fn energy_counts_particles() {
    let p = pipe();
    let u = BigRational::from_integer(1000.into());
    let e = hamiltonian(&p.ground, &p.patch.graph, &u).unwrap();
    assert_eq!(e.particles, BigRational::from_integer(p.ground.count().into()));
    assert!(e.value() < 0.0);
    let bad = Configuration::from_occupied(p.patch.graph.len(), &[p.patch.graph.edges[0].0, p.patch.graph.edges[0].1]);
    assert!(hamiltonian(&bad, &p.patch.graph, &u).is_err());
}

#[test]
fn single_pattern_contours_obey_the_peierls_bound() {
    let p = pipe();
    let g = &p.patch.graph;
    let cg = CoarseGraph::new(&p.partition, g, &p.ground);
    let params = ModelParams::new(1e5);
    for i in 0..p.partition.patterns.len() as u32 {
        let theta = Contour { support: vec![i], spins: vec![CoarseSpin::empty(i)] };
        let w = contour_weight(&theta, &cg, g, &params).unwrap();
        assert!(w.peierls_holds, "pattern {i}: {} > {}", w.log_weight, w.log_peierls);
    }
    // two patterns that don't touch make no contour
    let far = (1..p.partition.patterns.len() as u32).find(|j| !cg.adj[0].contains(j)).unwrap();
    let theta = Contour { support: vec![0, far], spins: vec![CoarseSpin::empty(0), CoarseSpin::empty(far)] };
    assert!(contour_weight(&theta, &cg, g, &params).is_err());
    // all-perfect spins are not a contour
    let theta = Contour { support: vec![0], spins: vec![cg.perfect[0].clone()] };
    assert!(contour_weight(&theta, &cg, g, &params).is_err());
}
