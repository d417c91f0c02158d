//! Configurations of the hard-core gas, the ground state and its densities.

use std::collections::VecDeque;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::golden::GoldenNumber;
use crate::graph::{AtlasClass, Parity, SiteGraph};
use crate::partition::{template_of_kind, Partition, PatternKind};

/// Occupancy over the vertices of one site graph. Vertices outside the domain are vacant.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Configuration {
    pub occupied: Vec<bool>,
    pub domain: Vec<bool>,
}

impl Configuration {
    pub fn empty(n: usize) -> Self {
        Configuration { occupied: vec![false; n], domain: vec![true; n] }
    }

    pub fn from_occupied(n: usize, occ: &[u32]) -> Self {
        let mut c = Configuration::empty(n);
        for &v in occ {
            c.occupied[v as usize] = true;
        }
        c
    }

    /// Every vertex of the given parity occupied.
    pub fn sublattice(g: &SiteGraph, parity: Parity) -> Self {
        Configuration { occupied: g.parity.iter().map(|&p| p == parity).collect(), domain: vec![true; g.len()] }
    }

    pub fn len(&self) -> usize {
        self.occupied.len()
    }

    pub fn is_empty(&self) -> bool {
        self.occupied.is_empty()
    }

    pub fn is_occupied(&self, v: u32) -> bool {
        self.occupied[v as usize]
    }

    pub fn count(&self) -> usize {
        self.occupied.iter().filter(|&&o| o).count()
    }

    pub fn count_in(&self, window: &[bool]) -> usize {
        self.occupied.iter().zip(window).filter(|(&o, &w)| o && w).count()
    }

    pub fn occupied_ids(&self) -> Vec<u32> {
        (0..self.len() as u32).filter(|&v| self.occupied[v as usize]).collect()
    }

    pub fn check_admissible(&self, g: &SiteGraph) -> Result<()> {
        for &(a, b) in &g.edges {
            if self.occupied[a as usize] && self.occupied[b as usize] {
                return Err(Error::Inadmissible(a, b));
            }
        }
        Ok(())
    }

    pub fn is_admissible(&self, g: &SiteGraph) -> bool {
        self.check_admissible(g).is_ok()
    }

    pub fn to_json(&self) -> Result<String> {
        #[derive(Serialize)]
        struct Doc {
            occupied: Vec<u32>,
            domain: Vec<u32>,
        }
        let domain = (0..self.len() as u32).filter(|&v| self.domain[v as usize]).collect();
        Ok(serde_json::to_string(&Doc { occupied: self.occupied_ids(), domain })?)
    }
}

/// Concatenation of the perfect configurations of all stamped patterns.
pub fn perfect_configuration(p: &Partition, g: &SiteGraph) -> Result<Configuration> {
    let mut c = Configuration { occupied: vec![false; g.len()], domain: p.complete_window() };
    for inst in &p.patterns {
        let n = inst.perfect.len();
        if n != inst.kind.perfect_count() {
            return Err(Error::Partition(format!(
                "{} at {} has {n} particles, expected {}",
                inst.kind.name(),
                inst.center,
                inst.kind.perfect_count()
            )));
        }
        for &v in &inst.perfect {
            c.occupied[v as usize] = true;
        }
    }
    c.check_admissible(g)?;
    Ok(c)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum YellowShape {
    Closed,
    Path,
    Branching,
}

/// A connected component of the vacant-edge set.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct YellowComponent {
    pub vertices: Vec<u32>,
    pub edges: Vec<(u32, u32)>,
    pub shape: YellowShape,
    /// Touches a vertex outside the configuration's domain.
    pub clipped: bool,
}

/// Edges with both ends vacant and inside the domain.
pub fn vacant_edges(c: &Configuration, g: &SiteGraph) -> Vec<(u32, u32)> {
    g.edges
        .iter()
        .copied()
        .filter(|&(a, b)| {
            c.domain[a as usize] && c.domain[b as usize] && !c.occupied[a as usize] && !c.occupied[b as usize]
        })
        .collect()
}

/// Vacant edges that end at an unclipped vertex of yellow degree one, removed
/// repeatedly. What is left is the loop structure.
pub fn vacant_spurs(c: &Configuration, g: &SiteGraph) -> Vec<(u32, u32)> {
    let (_, spurs) = prune_spurs(c, g);
    spurs
}

fn prune_spurs(c: &Configuration, g: &SiteGraph) -> (Vec<(u32, u32)>, Vec<(u32, u32)>) {
    let edges = vacant_edges(c, g);
    let clipped: Vec<bool> = (0..g.len() as u32).map(|v| is_clipped(c, g, v)).collect();
    let mut deg = vec![0u32; g.len()];
    for &(a, b) in &edges {
        deg[a as usize] += 1;
        deg[b as usize] += 1;
    }
    let mut alive = vec![true; edges.len()];
    loop {
        let mut changed = false;
        for (i, &(a, b)) in edges.iter().enumerate() {
            let end_a = deg[a as usize] == 1 && !clipped[a as usize];
            let end_b = deg[b as usize] == 1 && !clipped[b as usize];
            if alive[i] && (end_a || end_b) {
                alive[i] = false;
                deg[a as usize] -= 1;
                deg[b as usize] -= 1;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let (mut keep, mut spurs) = (Vec::new(), Vec::new());
    for (i, e) in edges.into_iter().enumerate() {
        if alive[i] {
            keep.push(e);
        } else {
            spurs.push(e);
        }
    }
    (keep, spurs)
}

fn is_clipped(c: &Configuration, g: &SiteGraph, v: u32) -> bool {
    !g.is_complete(v) || g.adj[v as usize].iter().any(|&w| !c.domain[w as usize])
}

/// Connected components of the vacant edges once dangling spurs are pruned.
pub fn yellow_loops(c: &Configuration, g: &SiteGraph) -> Vec<YellowComponent> {
    let (edges, _) = prune_spurs(c, g);
    let mut yadj: Vec<Vec<u32>> = vec![Vec::new(); g.len()];
    for &(a, b) in &edges {
        yadj[a as usize].push(b);
        yadj[b as usize].push(a);
    }
    let mut seen = vec![false; g.len()];
    let mut out = Vec::new();
    for s in 0..g.len() as u32 {
        if seen[s as usize] || yadj[s as usize].is_empty() {
            continue;
        }
        seen[s as usize] = true;
        let mut verts = vec![s];
        let mut q = VecDeque::from([s]);
        while let Some(x) = q.pop_front() {
            for &y in &yadj[x as usize] {
                if !seen[y as usize] {
                    seen[y as usize] = true;
                    verts.push(y);
                    q.push_back(y);
                }
            }
        }
        verts.sort_unstable();
        let mut es: Vec<(u32, u32)> = Vec::new();
        for &v in &verts {
            for &w in &yadj[v as usize] {
                if v < w {
                    es.push((v, w));
                }
            }
        }
        let maxdeg = verts.iter().map(|&v| yadj[v as usize].len()).max().unwrap();
        let shape = if maxdeg > 2 {
            YellowShape::Branching
        } else if verts.iter().all(|&v| yadj[v as usize].len() == 2) {
            YellowShape::Closed
        } else {
            YellowShape::Path
        };
        let clipped = verts.iter().any(|&v| is_clipped(c, g, v));
        out.push(YellowComponent { vertices: verts, edges: es, shape, clipped });
    }
    out
}

/// The bracketed sum of the density formula over pattern frequencies, divided by φ⁸.
pub fn exact_density() -> GoldenNumber {
    let g = GoldenNumber::from_ints;
    let f = GoldenNumber::from_fracs;
    let terms = [
        (75, g(5, -3)),
        (63, g(-8, 5)),
        (23, g(-3, 2)),
        (16, g(-21, 13)),
        (16, g(13, -8)),
        (16, f(47, 5, -29, 5)),
        (51, f(18, 5, -11, 5)),
    ];
    let sum = terms.into_iter().fold(GoldenNumber::zero(), |acc, (n, x)| acc + g(n, 0) * x);
    sum / GoldenNumber::phi().pow(8)
}

/// Occupied fraction of a window, exactly.
pub fn window_density(c: &Configuration, window: &[bool]) -> Result<BigRational> {
    let size = window.iter().filter(|&&w| w).count();
    if size == 0 {
        return Err(Error::Partition("empty window".into()));
    }
    Ok(BigRational::new(BigInt::from(c.count_in(window)), BigInt::from(size)))
}

/// Density over the union of complete pattern interiors.
pub fn pattern_window_density(c: &Configuration, p: &Partition) -> Result<BigRational> {
    window_density(c, &p.complete_window())
}

/// A patch around an odd star vertex whose interior can take the urchin occupancy.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct UrchinSite {
    pub center: u32,
    pub orientation: u8,
    pub interior: Vec<u32>,
    pub occupied: Vec<u32>,
}

/// Urchin-shaped patches centered at odd star-class vertices whose template
/// occupancy puts its particles on the odd sublattice. Sites never overlap.
pub fn urchin_sites(g: &SiteGraph, classes: &[AtlasClass]) -> Vec<UrchinSite> {
    let tpl = template_of_kind(PatternKind::Urchin);
    let mut taken = vec![false; g.len()];
    let mut sites = Vec::new();
    for v in 0..g.len() as u32 {
        if classes[v as usize] != AtlasClass::Star || g.parity[v as usize] != Parity::Odd {
            continue;
        }
        'rot: for r in 0..10u8 {
            let c = &g.points[v as usize];
            let mut interior = Vec::new();
            let mut occupied = Vec::new();
            for (off, occ) in &tpl.cells {
                let Some(&w) = g.index.get(&(c + &off.rotate(r))) else { continue 'rot };
                if *occ != (g.parity[w as usize] == Parity::Odd) || !g.is_complete(w) {
                    continue 'rot;
                }
                interior.push(w);
                if *occ {
                    occupied.push(w);
                }
            }
            if interior.iter().any(|&w| taken[w as usize]) {
                break;
            }
            for &w in &interior {
                taken[w as usize] = true;
            }
            sites.push(UrchinSite { center: v, orientation: r, interior, occupied });
            break;
        }
    }
    sites
}

/// Replace the occupancy inside each site by the urchin occupancy.
/// Each flip must raise the particle count by exactly one and keep the state admissible.
pub fn urchin_flip(c: &Configuration, g: &SiteGraph, sites: &[UrchinSite]) -> Result<Configuration> {
    let mut out = c.clone();
    for s in sites {
        let before = s.interior.iter().filter(|&&w| out.occupied[w as usize]).count();
        for &w in &s.interior {
            out.occupied[w as usize] = false;
        }
        for &w in &s.occupied {
            out.occupied[w as usize] = true;
        }
        if s.occupied.len() != before + 1 {
            return Err(Error::Partition(format!("flip at {} changes the count by {}", s.center, s.occupied.len() as i64 - before as i64)));
        }
        for &w in &s.interior {
            for &x in &g.adj[w as usize] {
                if out.occupied[w as usize] && out.occupied[x as usize] {
                    return Err(Error::Inadmissible(w, x));
                }
            }
        }
    }
    Ok(out)
}
