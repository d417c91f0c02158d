//! The hard-core Hamiltonian, the coarse-grained pattern model with its
//! contour bounds, and a heat-bath Glauber sampler.

use std::collections::{HashMap, HashSet, VecDeque};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ground_state::Configuration;
use crate::graph::SiteGraph;
use crate::partition::Partition;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub u: f64,
    /// Largest degree of the coarse graph.
    pub d: u32,
    /// log₂ of the spin-space bound.
    pub log2_s: f64,
}

impl ModelParams {
    pub fn new(u: f64) -> Self {
        ModelParams { u, d: 5, log2_s: 150.0 }
    }

    pub fn tau(&self) -> f64 {
        self.u.ln()
    }
}

/// −particles·log u, kept symbolic. `particles` may be a half-integer.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Energy {
    pub particles: BigRational,
    pub u: BigRational,
}

impl Energy {
    pub fn value(&self) -> f64 {
        -self.particles.to_f64().unwrap_or(f64::NAN) * self.u.to_f64().unwrap_or(f64::NAN).ln()
    }
}

pub fn hamiltonian(c: &Configuration, g: &SiteGraph, u: &BigRational) -> Result<Energy> {
    c.check_admissible(g)?;
    Ok(Energy { particles: BigRational::from_integer(BigInt::from(c.count())), u: u.clone() })
}

/// Occupancy of one pattern: interior particles count fully, collar particles half.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoarseSpin {
    pub pattern: u32,
    pub interior: Vec<u32>,
    pub shared: Vec<u32>,
}

impl CoarseSpin {
    /// Restriction of a configuration to a pattern and its collar.
    pub fn of(p: &Partition, pattern: u32, c: &Configuration) -> Self {
        let inst = &p.patterns[pattern as usize];
        let pick = |vs: &[u32]| vs.iter().copied().filter(|&v| c.occupied[v as usize]).collect();
        CoarseSpin { pattern, interior: pick(&inst.interior), shared: pick(&inst.sm_boundary) }
    }

    pub fn empty(pattern: u32) -> Self {
        CoarseSpin { pattern, interior: Vec::new(), shared: Vec::new() }
    }

    pub fn check_admissible(&self, g: &SiteGraph) -> Result<()> {
        let occ: HashSet<u32> = self.interior.iter().chain(&self.shared).copied().collect();
        for &v in &occ {
            if let Some(&w) = g.adj[v as usize].iter().find(|w| occ.contains(w)) {
                return Err(Error::Inadmissible(v, w));
            }
        }
        Ok(())
    }

    fn weight_count(&self) -> BigRational {
        BigRational::from_integer(BigInt::from(self.interior.len()))
            + BigRational::new(BigInt::from(self.shared.len()), BigInt::from(2))
    }
}

pub fn coarse_energy(s: &CoarseSpin, g: &SiteGraph, u: &BigRational) -> Result<Energy> {
    s.check_admissible(g)?;
    Ok(Energy { particles: s.weight_count(), u: u.clone() })
}

/// The coarse graph: patterns joined when an edge runs between their interiors.
#[derive(Clone, Debug)]
pub struct CoarseGraph {
    pub adj: Vec<Vec<u32>>,
    /// Spin of every pattern in the ground state.
    pub perfect: Vec<CoarseSpin>,
}

impl CoarseGraph {
    pub fn new(p: &Partition, g: &SiteGraph, ground: &Configuration) -> Self {
        let mut adj: Vec<Vec<u32>> = vec![Vec::new(); p.patterns.len()];
        for &(a, b) in &g.edges {
            if let (Some(x), Some(y)) = (p.owner[a as usize], p.owner[b as usize]) {
                if x != y && !adj[x as usize].contains(&y) {
                    adj[x as usize].push(y);
                    adj[y as usize].push(x);
                }
            }
        }
        for a in adj.iter_mut() {
            a.sort_unstable();
        }
        let perfect = (0..p.patterns.len() as u32).map(|i| CoarseSpin::of(p, i, ground)).collect();
        CoarseGraph { adj, perfect }
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(|a| a.len()).max().unwrap_or(0)
    }

    pub fn is_connected(&self, support: &[u32]) -> bool {
        let Some(&s) = support.first() else { return false };
        let set: HashSet<u32> = support.iter().copied().collect();
        let mut seen = HashSet::from([s]);
        let mut q = VecDeque::from([s]);
        while let Some(x) = q.pop_front() {
            for &y in &self.adj[x as usize] {
                if set.contains(&y) && seen.insert(y) {
                    q.push_back(y);
                }
            }
        }
        seen.len() == set.len()
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Contour {
    pub support: Vec<u32>,
    pub spins: Vec<CoarseSpin>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContourWeight {
    pub log_weight: f64,
    /// −τ|C|/(d+1)
    pub log_peierls: f64,
    pub peierls_holds: bool,
}

impl ContourWeight {
    pub fn weight(&self) -> f64 {
        self.log_weight.exp()
    }
}

/// exp(−Σ U) over non-perfect spins, with energies shifted so perfect spins have U = 0.
/// No validity check: an all-perfect assignment gets weight 1.
pub fn raw_log_weight(theta: &Contour, cg: &CoarseGraph, u: f64) -> f64 {
    let mut s = BigRational::zero();
    for sp in &theta.spins {
        let perfect = &cg.perfect[sp.pattern as usize];
        if sp != perfect {
            s += perfect.weight_count() - sp.weight_count();
        }
    }
    -s.to_f64().unwrap_or(f64::NAN) * u.ln()
}

pub fn contour_weight(theta: &Contour, cg: &CoarseGraph, g: &SiteGraph, params: &ModelParams) -> Result<ContourWeight> {
    let n = theta.support.len();
    if n == 0 || theta.spins.len() != n {
        return Err(Error::InvalidContour("support and spins differ in size".into()));
    }
    let ids: HashSet<u32> = theta.spins.iter().map(|s| s.pattern).collect();
    if ids != theta.support.iter().copied().collect() {
        return Err(Error::InvalidContour("spins do not sit on the support".into()));
    }
    if !cg.is_connected(&theta.support) {
        return Err(Error::InvalidContour("support is not connected".into()));
    }
    for s in &theta.spins {
        s.check_admissible(g)?;
    }
    let bad = theta.spins.iter().filter(|s| **s != cg.perfect[s.pattern as usize]).count();
    if bad * (params.d as usize + 1) < n {
        return Err(Error::InvalidContour(format!("{bad} non-perfect spins on a support of {n}")));
    }
    let log_weight = raw_log_weight(theta, cg, params.u);
    let log_peierls = -params.tau() * n as f64 / (params.d as f64 + 1.0);
    Ok(ContourWeight { log_weight, log_peierls, peierls_holds: log_weight <= log_peierls + 1e-9 })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TauThresholds {
    /// (d+1)·log(13ed|S|)
    pub tau0: f64,
    /// 10(d+1)·log(|S|ed)
    pub crude_tau: f64,
}

pub fn tau_threshold(d: u32, log2_s: f64) -> TauThresholds {
    let d1 = d as f64 + 1.0;
    let log_eds = 1.0 + (d as f64).ln() + log2_s * std::f64::consts::LN_2;
    TauThresholds { tau0: d1 * (13f64.ln() + log_eds), crude_tau: 10.0 * d1 * log_eds }
}

/// (ed|S|)·exp(−τ/(d+1) + 1/10) < 1/11, evaluated in logarithms. When it holds the
/// geometric tail is at most 1/10.
pub fn certificate_holds(d: u32, log2_s: f64, tau: f64) -> bool {
    let log_eds = 1.0 + (d as f64).ln() + log2_s * std::f64::consts::LN_2;
    log_eds - tau / (d as f64 + 1.0) + 0.1 < -(11f64.ln())
}

/// Tail sum Σ_k r^k, k ≥ 1, for the ratio r of the certificate at τ.
pub fn certificate_tail(d: u32, log2_s: f64, tau: f64) -> Option<f64> {
    let log_eds = 1.0 + (d as f64).ln() + log2_s * std::f64::consts::LN_2;
    let r = (log_eds - tau / (d as f64 + 1.0) + 0.1).exp();
    (r < 1.0).then(|| r / (1.0 - r))
}

/// log of the crude activity bound, read two ways: the sum form e^{60}·2^{150}·e·5,
/// and as the product form (2^{150}·e·5)^{60} that the threshold condition needs.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrudeBound {
    pub sum_log: f64,
    pub product_log: f64,
}

pub fn crude_activity_bound(d: u32, log2_s: f64) -> CrudeBound {
    let log_eds = 1.0 + (d as f64).ln() + log2_s * std::f64::consts::LN_2;
    let k = 10.0 * (d as f64 + 1.0);
    CrudeBound { sum_log: k + log_eds, product_log: k * log_eds }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesBound {
    /// 5³e·16(1+√u)^{148}/u^{75}
    pub lhs_ratio: f64,
    /// 2000e·e^{148/√u}/u
    pub rhs_ratio: f64,
    pub lhs_sum: Option<f64>,
    pub rhs_sum: Option<f64>,
    pub converges: bool,
}

pub fn polymer_series_bound(u: f64) -> SeriesBound {
    let e = std::f64::consts::E;
    let lhs_log = (125.0 * e * 16.0).ln() + 148.0 * (1.0 + u.sqrt()).ln() - 75.0 * u.ln();
    let rhs_log = (2000.0 * e).ln() + 148.0 / u.sqrt() - u.ln();
    let geo = |r: f64| (r < 1.0).then(|| r / (1.0 - r));
    let (lhs_ratio, rhs_ratio) = (lhs_log.exp(), rhs_log.exp());
    SeriesBound { lhs_ratio, rhs_ratio, lhs_sum: geo(lhs_ratio), rhs_sum: geo(rhs_ratio), converges: rhs_ratio < 1.0 }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Free,
    Even,
    Odd,
    Ground,
}

impl std::str::FromStr for Boundary {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "free" => Ok(Boundary::Free),
            "even" => Ok(Boundary::Even),
            "odd" => Ok(Boundary::Odd),
            "ground" => Ok(Boundary::Ground),
            _ => Err(format!("unknown boundary '{s}'")),
        }
    }
}

/// Heat-bath single-site dynamics: a uniformly chosen free site becomes occupied
/// with probability u/(1+u) when all its neighbours are vacant, and vacant otherwise.
pub struct Sampler<'a> {
    adj: &'a [Vec<u32>],
    p_occ: f64,
    free: Vec<u32>,
    state: Vec<bool>,
    rng: ChaCha8Rng,
}

impl<'a> Sampler<'a> {
    pub fn new(adj: &'a [Vec<u32>], u: f64, seed: u64, init: Vec<bool>, frozen: &[bool]) -> Result<Self> {
        for (a, ns) in adj.iter().enumerate() {
            if init[a] {
                if let Some(&b) = ns.iter().find(|&&b| init[b as usize]) {
                    return Err(Error::Inadmissible(a as u32, b));
                }
            }
        }
        let free = (0..adj.len() as u32).filter(|&v| !frozen[v as usize]).collect();
        Ok(Sampler { adj, p_occ: u / (1.0 + u), free, state: init, rng: ChaCha8Rng::seed_from_u64(seed) })
    }

    pub fn step(&mut self) {
        if self.free.is_empty() {
            return;
        }
        let v = self.free[self.rng.gen_range(0..self.free.len())] as usize;
        let blocked = self.adj[v].iter().any(|&w| self.state[w as usize]);
        let x: f64 = self.rng.gen();
        self.state[v] = !blocked && x < self.p_occ;
    }

    pub fn run(&mut self, steps: u64) {
        for _ in 0..steps {
            self.step();
        }
    }

    pub fn state(&self) -> &[bool] {
        &self.state
    }

    pub fn free_sites(&self) -> usize {
        self.free.len()
    }
}

/// Run the sampler for `steps` single-site updates.
pub fn glauber_sample(
    g: &SiteGraph,
    u: f64,
    steps: u64,
    seed: u64,
    init: &Configuration,
    frozen: &[bool],
) -> Result<Configuration> {
    let mut s = Sampler::new(&g.adj, u, seed, init.occupied.clone(), frozen)?;
    s.run(steps);
    Ok(Configuration { occupied: s.state, domain: init.domain.clone() })
}

/// Exact heat-bath kernel on the independent sets of a small graph, indexed by bitmask.
pub fn heat_bath_kernel(adj: &[Vec<u32>], u: &BigRational) -> (Vec<u32>, Vec<Vec<BigRational>>) {
    let n = adj.len();
    assert!(n <= 12, "kernel is for small graphs");
    let ok = |s: u32| (0..n).all(|v| s >> v & 1 == 0 || adj[v].iter().all(|&w| s >> w & 1 == 0));
    let states: Vec<u32> = (0..1u32 << n).filter(|&s| ok(s)).collect();
    let index: HashMap<u32, usize> = states.iter().enumerate().map(|(i, &s)| (s, i)).collect();
    let p_occ = u / (BigRational::one() + u);
    let pick = BigRational::new(BigInt::one(), BigInt::from(n));
    let mut k = vec![vec![BigRational::zero(); states.len()]; states.len()];
    for (i, &s) in states.iter().enumerate() {
        for v in 0..n {
            let blocked = adj[v].iter().any(|&w| s >> w & 1 == 1);
            let on = s | (1 << v);
            let off = s & !(1 << v);
            if blocked {
                k[i][index[&off]] += &pick;
            } else {
                k[i][index[&on]] += &pick * &p_occ;
                k[i][index[&off]] += &pick * (BigRational::one() - &p_occ);
            }
        }
    }
    (states, k)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SampleManifest {
    pub seed_kind: String,
    pub k: u32,
    pub u: String,
    pub steps: u64,
    pub rng_seed: u64,
    pub boundary: Boundary,
    pub init: String,
    pub density: f64,
    pub overlap_with_ground_state: f64,
}
