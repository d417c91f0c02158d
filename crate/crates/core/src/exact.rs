//! Exact counting: maximum independent sets, unique maxima of the five patterns,
//! loop decompositions and the partition function of a cycle.

use std::collections::{HashMap, HashSet, VecDeque};

use num_bigint::BigInt;
use num_integer::binomial;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::cyclo::CycloPoint;
use crate::error::{Error, Result};
use crate::graph::SiteGraph;
use crate::partition::{PatternInstance, PatternKind, Template};
use crate::substitution::{Rhombus, TileKind, Tiling};

/// A small graph on vertices 0..n.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LocalGraph {
    pub adj: Vec<Vec<usize>>,
}

impl LocalGraph {
    pub fn new(n: usize) -> Self {
        LocalGraph { adj: vec![Vec::new(); n] }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut g = LocalGraph::new(n);
        for &(a, b) in edges {
            g.add_edge(a, b);
        }
        g
    }

    pub fn cycle(n: usize) -> Self {
        LocalGraph::from_edges(n, &(0..n).map(|i| (i, (i + 1) % n)).collect::<Vec<_>>())
    }

    pub fn add_edge(&mut self, a: usize, b: usize) {
        if a != b && !self.adj[a].contains(&b) {
            self.adj[a].push(b);
            self.adj[b].push(a);
        }
    }

    pub fn len(&self) -> usize {
        self.adj.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    /// Subgraph of a site graph induced on `verts`, in that order.
    pub fn induced(g: &SiteGraph, verts: &[u32]) -> Self {
        let pos: HashMap<u32, usize> = verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut lg = LocalGraph::new(verts.len());
        for (i, &v) in verts.iter().enumerate() {
            for w in &g.adj[v as usize] {
                if let Some(&j) = pos.get(w) {
                    lg.add_edge(i, j);
                }
            }
        }
        lg
    }

    pub fn is_independent(&self, set: &[bool]) -> bool {
        (0..self.len()).all(|a| !set[a] || self.adj[a].iter().all(|&b| !set[b]))
    }

    fn two_colouring(&self) -> Option<Vec<bool>> {
        let mut col: Vec<Option<bool>> = vec![None; self.len()];
        for s in 0..self.len() {
            if col[s].is_some() {
                continue;
            }
            col[s] = Some(false);
            let mut q = VecDeque::from([s]);
            while let Some(x) = q.pop_front() {
                let c = col[x].unwrap();
                for &y in &self.adj[x] {
                    match col[y] {
                        None => {
                            col[y] = Some(!c);
                            q.push_back(y);
                        }
                        Some(d) if d == c => return None,
                        _ => {}
                    }
                }
            }
        }
        Some(col.into_iter().map(|c| c.unwrap()).collect())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MisResult {
    pub best_count: usize,
    /// Every maximum independent set consistent with the fixed part.
    pub best_configs: Vec<Vec<bool>>,
    /// Largest size of a consistent independent set that is not a maximizer.
    pub second_best_count: usize,
}

/// Exact maximum independent sets by branch and bound.
///
/// `fixed[v]` forces v occupied or vacant. The bound on the free part is
/// |free| − |M| for a matching M, which is valid in any graph and exact in
/// bipartite ones, where M is taken maximum.
pub fn max_independent_set(g: &LocalGraph, fixed: &[Option<bool>]) -> Result<MisResult> {
    let n = g.len();
    for a in 0..n {
        if fixed[a] == Some(true) {
            if let Some(&b) = g.adj[a].iter().find(|&&b| fixed[b] == Some(true)) {
                return Err(Error::Inadmissible(a as u32, b as u32));
            }
        }
    }
    let mut state: Vec<i8> = vec![-1; n]; // -1 free, 0 vacant, 1 occupied
    let mut base = 0;
    for v in 0..n {
        if fixed[v] == Some(true) {
            state[v] = 1;
            base += 1;
        }
    }
    for v in 0..n {
        if fixed[v] == Some(false) {
            state[v] = 0;
        } else if state[v] == -1 && g.adj[v].iter().any(|&w| state[w] == 1) {
            state[v] = 0;
        }
    }
    let mut s = Search { g, colour: g.two_colouring(), best: 0, found: Vec::new() };
    // a greedy solution seeds the incumbent
    s.best = base + greedy(g, &state);
    s.branch(&mut state, base);
    let best_configs = std::mem::take(&mut s.found);
    let best_count = s.best;
    let second_best_count = if best_configs.len() > 1 { best_count } else { best_count.saturating_sub(1).max(base) };
    Ok(MisResult { best_count, best_configs, second_best_count })
}

fn greedy(g: &LocalGraph, state: &[i8]) -> usize {
    let mut st = state.to_vec();
    let mut order: Vec<usize> = (0..g.len()).filter(|&v| st[v] == -1).collect();
    order.sort_by_key(|&v| g.adj[v].len());
    let mut k = 0;
    for v in order {
        if st[v] == -1 {
            st[v] = 1;
            k += 1;
            for &w in &g.adj[v] {
                if st[w] == -1 {
                    st[w] = 0;
                }
            }
        }
    }
    k
}

struct Search<'a> {
    g: &'a LocalGraph,
    colour: Option<Vec<bool>>,
    best: usize,
    found: Vec<Vec<bool>>,
}

impl Search<'_> {
    fn bound(&self, state: &[i8]) -> usize {
        let free: Vec<usize> = (0..state.len()).filter(|&v| state[v] == -1).collect();
        free.len() - self.matching(state, &free)
    }

    fn matching(&self, state: &[i8], free: &[usize]) -> usize {
        let g = self.g;
        let Some(col) = &self.colour else {
            // greedy maximal matching
            let mut used = vec![false; g.len()];
            let mut m = 0;
            for &a in free {
                if used[a] {
                    continue;
                }
                if let Some(&b) = g.adj[a].iter().find(|&&b| state[b] == -1 && !used[b]) {
                    used[a] = true;
                    used[b] = true;
                    m += 1;
                }
            }
            return m;
        };
        // augmenting paths from the left side
        let mut mate: Vec<Option<usize>> = vec![None; g.len()];
        let mut m = 0;
        for &a in free.iter().filter(|&&a| !col[a]) {
            let mut seen = vec![false; g.len()];
            if augment(g, state, a, &mut mate, &mut seen) {
                m += 1;
            }
        }
        m
    }

    fn branch(&mut self, state: &mut Vec<i8>, count: usize) {
        if count + self.bound(state) < self.best {
            return;
        }
        let g = self.g;
        let pick = (0..state.len())
            .filter(|&v| state[v] == -1)
            .max_by_key(|&v| (g.adj[v].iter().filter(|&&w| state[w] == -1).count(), std::cmp::Reverse(v)));
        let Some(v) = pick else {
            if count > self.best {
                self.best = count;
                self.found.clear();
            }
            if count == self.best {
                self.found.push(state.iter().map(|&x| x == 1).collect());
            }
            return;
        };
        // occupy v
        let mut touched = vec![v];
        state[v] = 1;
        for &w in &g.adj[v] {
            if state[w] == -1 {
                state[w] = 0;
                touched.push(w);
            }
        }
        self.branch(state, count + 1);
        for &w in &touched {
            state[w] = -1;
        }
        // leave v vacant
        state[v] = 0;
        self.branch(state, count);
        state[v] = -1;
    }
}

fn augment(g: &LocalGraph, state: &[i8], a: usize, mate: &mut Vec<Option<usize>>, seen: &mut Vec<bool>) -> bool {
    for &b in &g.adj[a] {
        if state[b] != -1 || seen[b] {
            continue;
        }
        seen[b] = true;
        let free_b = match mate[b] {
            None => true,
            Some(a2) => augment(g, state, a2, mate, seen),
        };
        if free_b {
            mate[b] = Some(a);
            mate[a] = Some(b);
            return true;
        }
    }
    false
}

/// Exhaustive maximum independent set count, for small graphs.
pub fn mis_exhaustive(g: &LocalGraph) -> (usize, usize) {
    let n = g.len();
    assert!(n <= 26, "exhaustive search is limited to 26 vertices");
    let masks: Vec<u64> = g.adj.iter().map(|a| a.iter().fold(0u64, |m, &b| m | (1 << b))).collect();
    let (mut best, mut ways) = (0, 0);
    for s in 0u64..(1 << n) {
        if (0..n).any(|v| s >> v & 1 == 1 && s & masks[v] != 0) {
            continue;
        }
        let c = s.count_ones() as usize;
        if c > best {
            best = c;
            ways = 0;
        }
        if c == best {
            ways += 1;
        }
    }
    (best, ways)
}

/// Maximum independent set of a bipartite graph through König's theorem:
/// a maximum matching gives a minimum vertex cover, whose complement is the answer.
pub fn konig_mis(adj: &[Vec<u32>], left: &[bool]) -> Vec<bool> {
    let n = adj.len();
    let mut mate: Vec<Option<u32>> = vec![None; n];
    // Hopcroft–Karp
    loop {
        let mut dist = vec![u32::MAX; n];
        let mut q = VecDeque::new();
        for v in 0..n {
            if left[v] && mate[v].is_none() {
                dist[v] = 0;
                q.push_back(v as u32);
            }
        }
        let mut found = false;
        while let Some(a) = q.pop_front() {
            for &b in &adj[a as usize] {
                match mate[b as usize] {
                    None => found = true,
                    Some(a2) if dist[a2 as usize] == u32::MAX => {
                        dist[a2 as usize] = dist[a as usize] + 1;
                        q.push_back(a2);
                    }
                    _ => {}
                }
            }
        }
        if !found {
            break;
        }
        let mut progressed = false;
        for v in 0..n {
            if left[v] && mate[v].is_none() && hk_dfs(adj, v as u32, &mut mate, &mut dist) {
                progressed = true;
            }
        }
        if !progressed {
            break;
        }
    }
    // alternating reachability from unmatched left vertices
    let mut z = vec![false; n];
    let mut q: VecDeque<u32> = (0..n as u32).filter(|&v| left[v as usize] && mate[v as usize].is_none()).collect();
    for &v in &q {
        z[v as usize] = true;
    }
    while let Some(a) = q.pop_front() {
        for &b in &adj[a as usize] {
            if z[b as usize] || mate[a as usize] == Some(b) {
                continue;
            }
            z[b as usize] = true;
            if let Some(a2) = mate[b as usize] {
                if !z[a2 as usize] {
                    z[a2 as usize] = true;
                    q.push_back(a2);
                }
            }
        }
    }
    // the cover is (L \ Z) ∪ (R ∩ Z); its complement is returned
    (0..n).map(|v| if left[v] { z[v] } else { !z[v] }).collect()
}

fn hk_dfs(adj: &[Vec<u32>], a: u32, mate: &mut [Option<u32>], dist: &mut [u32]) -> bool {
    for &b in &adj[a as usize] {
        let ok = match mate[b as usize] {
            None => true,
            Some(a2) => dist[a2 as usize] == dist[a as usize] + 1 && hk_dfs(adj, a2, mate, dist),
        };
        if ok {
            mate[b as usize] = Some(a);
            mate[a as usize] = Some(b);
            return true;
        }
    }
    dist[a as usize] = u32::MAX;
    false
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Lemma1Report {
    pub kind: PatternKind,
    pub best: usize,
    pub second_best: usize,
    pub unique: bool,
    pub matches_perfect: bool,
    pub passed: bool,
    /// A maximizer other than the perfect configuration, as occupied vertex ids.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<u32>>,
}

/// Maximum independent sets of a pattern interior with its boundary left free.
pub fn verify_lemma1(p: &PatternInstance, g: &SiteGraph) -> Result<Lemma1Report> {
    let lg = LocalGraph::induced(g, &p.interior);
    let perfect: HashSet<u32> = p.perfect.iter().copied().collect();
    let target: Vec<bool> = p.interior.iter().map(|v| perfect.contains(v)).collect();
    Ok(lemma1_report(p.kind, &lg, &target, |cfg| {
        p.interior.iter().zip(cfg).filter(|(_, &o)| o).map(|(&v, _)| v).collect()
    }))
}

/// The same check on a template alone, with adjacency between cells at unit distance.
pub fn verify_lemma1_template(t: &Template) -> Lemma1Report {
    let pts: Vec<&CycloPoint> = t.cells.iter().map(|c| &c.0).collect();
    let mut lg = LocalGraph::new(pts.len());
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            if (pts[j] - pts[i]).direction().is_some() {
                lg.add_edge(i, j);
            }
        }
    }
    let target: Vec<bool> = t.cells.iter().map(|c| c.1).collect();
    lemma1_report(t.kind, &lg, &target, |cfg| (0..cfg.len() as u32).filter(|&i| cfg[i as usize]).collect())
}

fn lemma1_report(kind: PatternKind, lg: &LocalGraph, target: &[bool], ids: impl Fn(&[bool]) -> Vec<u32>) -> Lemma1Report {
    let free = vec![None; lg.len()];
    let r = max_independent_set(lg, &free).expect("nothing is fixed");
    let unique = r.best_configs.len() == 1;
    let matches_perfect = r.best_configs.iter().any(|c| c == target);
    let witness = r.best_configs.iter().find(|c| *c != target).map(|c| ids(c));
    let passed =
        r.best_count == kind.perfect_count() && unique && matches_perfect && r.second_best_count < r.best_count;
    Lemma1Report { kind, best: r.best_count, second_best: r.second_best_count, unique, matches_perfect, passed, witness }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LoopDecomposition {
    pub center: u32,
    /// Closed walks; the last vertex is adjacent to the first.
    pub loops: Vec<Vec<u32>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LoopVerdict {
    pub even: bool,
    pub alternating: bool,
    pub half_occupied: bool,
    /// Every occupied vertex except the center is used exactly once.
    pub occupied_once: bool,
    /// Every vacant vertex is used, and only vacant vertices repeat.
    pub vacant_covered: bool,
    /// Every vertex but the center is used exactly once.
    pub exact_cover: bool,
    pub center_excluded: bool,
    /// First offending loop, if any.
    pub offending: Option<usize>,
}

impl LoopVerdict {
    pub fn passed(&self) -> bool {
        self.even && self.alternating && self.half_occupied && self.occupied_once && self.vacant_covered && self.center_excluded
    }
}

/// Check a loop decomposition of a pattern interior against its perfect configuration.
pub fn loop_decomposition_check(p: &PatternInstance, ld: &LoopDecomposition, g: &SiteGraph) -> LoopVerdict {
    let interior: HashSet<u32> = p.interior.iter().copied().collect();
    let occ: HashSet<u32> = p.perfect.iter().copied().collect();
    let mut v = LoopVerdict {
        even: true,
        alternating: true,
        half_occupied: true,
        occupied_once: true,
        vacant_covered: true,
        exact_cover: true,
        center_excluded: true,
        offending: None,
    };
    let mut uses: HashMap<u32, usize> = HashMap::new();
    for (i, l) in ld.loops.iter().enumerate() {
        let mut bad = false;
        if l.len() < 4 || l.len() % 2 == 1 {
            v.even = false;
            bad = true;
        }
        let n = l.len();
        for k in 0..n {
            let (a, b) = (l[k], l[(k + 1) % n]);
            if !g.adj[a as usize].contains(&b) || occ.contains(&a) == occ.contains(&b) || !interior.contains(&a) {
                v.alternating = false;
                bad = true;
            }
            *uses.entry(a).or_insert(0) += 1;
        }
        // a cycle of length 2m holds at most m particles, so half is the maximum
        let k = l.iter().filter(|x| occ.contains(x)).count();
        if 2 * k != n {
            v.half_occupied = false;
            bad = true;
        }
        if l.contains(&ld.center) {
            v.center_excluded = false;
            bad = true;
        }
        if bad && v.offending.is_none() {
            v.offending = Some(i);
        }
    }
    for &x in &p.interior {
        if x == ld.center {
            continue;
        }
        let u = uses.get(&x).copied().unwrap_or(0);
        if occ.contains(&x) && u != 1 {
            v.occupied_once = false;
        }
        if !occ.contains(&x) && u == 0 {
            v.vacant_covered = false;
        }
        if u != 1 {
            v.exact_cover = false;
        }
    }
    v
}

/// Partition function of a cycle of length 2m at activity u:
/// 2^{−2m}((1+s)^{2m} + (1−s)^{2m}) with s² = 1 + 4u. Odd powers of s cancel, so
/// the value is 2^{1−2m} Σ_i C(2m, 2i)(1+4u)^i.
pub fn loop_partition_function(m: u32, u: &BigRational) -> BigRational {
    let s2 = BigRational::one() + u * BigRational::from_integer(BigInt::from(4));
    let mut acc = BigRational::zero();
    let mut pw = BigRational::one();
    for i in 0..=m {
        let c = binomial(BigInt::from(2 * m), BigInt::from(2 * i));
        acc += &pw * BigRational::from_integer(c);
        pw *= &s2;
    }
    acc * BigRational::new(BigInt::from(2), BigInt::one() << (2 * m) as usize)
}

/// Coefficients of the loop partition function as a polynomial in u, lowest degree first.
pub fn loop_partition_polynomial(m: u32) -> Vec<BigRational> {
    // (1+4u)^i = Σ_j C(i,j) 4^j u^j
    let mut coef = vec![BigRational::zero(); m as usize + 1];
    let scale = BigRational::new(BigInt::from(2), BigInt::one() << (2 * m) as usize);
    for i in 0..=m {
        let c = binomial(BigInt::from(2 * m), BigInt::from(2 * i));
        for j in 0..=i {
            let t = &c * binomial(BigInt::from(i), BigInt::from(j)) * (BigInt::one() << (2 * j) as usize);
            coef[j as usize] += BigRational::from_integer(t) * &scale;
        }
    }
    coef
}

/// The bound 2(1+√u)^{2m} on the loop partition function, in floating point.
pub fn loop_bound_holds(m: u32, u: &BigRational) -> bool {
    let z = loop_partition_function(m, u).to_f64().unwrap_or(f64::INFINITY);
    let uf = u.to_f64().unwrap_or(f64::INFINITY);
    z < 2.0 * (1.0 + uf.sqrt()).powi(2 * m as i32)
}

/// Σ over independent sets of the n-cycle of u^{size}, by direct enumeration.
pub fn cycle_brute_force(n: u32, u: &BigRational) -> BigRational {
    assert!((3..=24).contains(&n), "cycle length out of range");
    let mut by_size = vec![0u64; n as usize + 1];
    for s in 0u32..(1 << n) {
        let rot = (s >> 1) | ((s & 1) << (n - 1));
        if s & rot == 0 {
            by_size[s.count_ones() as usize] += 1;
        }
    }
    let mut acc = BigRational::zero();
    let mut pw = BigRational::one();
    for c in by_size {
        acc += &pw * BigRational::from_integer(BigInt::from(c));
        pw *= u;
    }
    acc
}

/// Triples x, y, z where xy and yz are the short diagonals of two thin rhombi
/// that share an edge and have the obtuse corner y in common.
pub fn diagonal_triples(t: &Tiling) -> Vec<[u32; 3]> {
    let thin: Vec<&Rhombus> = t.rhombi.iter().filter(|r| r.kind == TileKind::Thin).collect();
    let mut at: HashMap<u32, Vec<usize>> = HashMap::new();
    for (i, r) in thin.iter().enumerate() {
        // obtuse corners B and C
        at.entry(r.vertices[1]).or_default().push(i);
        at.entry(r.vertices[3]).or_default().push(i);
    }
    let mut out = Vec::new();
    for (&y, rs) in &at {
        for i in 0..rs.len() {
            for j in i + 1..rs.len() {
                let (p, q) = (thin[rs[i]], thin[rs[j]]);
                let shared = p.vertices.iter().filter(|v| q.vertices.contains(v)).count();
                if shared == 2 {
                    let other = |r: &Rhombus| if r.vertices[1] == y { r.vertices[3] } else { r.vertices[1] };
                    let (x, z) = (other(p), other(q));
                    out.push([x.min(z), y, x.max(z)]);
                }
            }
        }
    }
    out.sort();
    out
}
