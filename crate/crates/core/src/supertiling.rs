//! The level-4 supertiling and the RKTT tiling derived from it.
//!
//! The supertiling is generated directly as the tiling four substitution steps
//! shallower, kept at unit edge length. Multiplying a supertile vertex by φ⁴
//! lands on a vertex of the original tiling.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::cyclo::CycloPoint;
use crate::error::{Error, Result};
use crate::graph::{build_graph, AtlasClass, SiteGraph};
use crate::partition::PatternKind;
use crate::substitution::{generate, Tiling};

pub const LEVEL: u32 = 4;

#[derive(Clone, Debug)]
pub struct SupertilingGraph {
    /// The supertiling at unit scale.
    pub tiling: Tiling,
    pub graph: SiteGraph,
    pub classes: Vec<AtlasClass>,
    /// Original vertex under each supertile vertex.
    pub to_original: Vec<Option<u32>>,
}

pub fn build_supertiling(t: &Tiling, g: &SiteGraph) -> Result<SupertilingGraph> {
    if t.scale_exponent < LEVEL {
        return Err(Error::LevelTooDeep { level: LEVEL as usize, depth: t.scale_exponent as usize });
    }
    let tiling = generate(t.seed_kind, t.scale_exponent - LEVEL);
    let graph = build_graph(&tiling)?;
    let classes = graph.classify_all()?;
    let to_original = graph.points.iter().map(|p| g.index.get(&scale_up(p)).copied()).collect();
    Ok(SupertilingGraph { tiling, graph, classes, to_original })
}

/// Multiply by φ⁴.
pub fn scale_up(p: &CycloPoint) -> CycloPoint {
    (0..LEVEL).fold(p.clone(), |z, _| z.mul_phi())
}

impl SupertilingGraph {
    pub fn len(&self) -> usize {
        self.graph.len()
    }

    pub fn is_empty(&self) -> bool {
        self.graph.is_empty()
    }

    pub fn scaled_point(&self, s: u32) -> CycloPoint {
        scale_up(&self.graph.points[s as usize])
    }

    /// The star of s and the stars of all its neighbours are complete.
    pub fn is_deep(&self, s: u32) -> bool {
        self.classes[s as usize] != AtlasClass::Incomplete
            && self.graph.adj[s as usize].iter().all(|&n| self.classes[n as usize] != AtlasClass::Incomplete)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FaceKind {
    Rhombus,
    Kite,
    Trapeze,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RkttEdge {
    pub a: u32,
    pub b: u32,
    /// A thick-thick kite edge prolonged through the removed kite center.
    pub long: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RkttFace {
    /// Supertile vertex ids, counter-clockwise.
    pub vertices: Vec<u32>,
    pub kind: Option<FaceKind>,
    pub complete: bool,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StarCensus {
    pub rhombus: u8,
    pub kite: u8,
    pub trapeze: u8,
}

impl StarCensus {
    pub fn new(rhombus: u8, kite: u8, trapeze: u8) -> Self {
        StarCensus { rhombus, kite, trapeze }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RkttGraph {
    /// Which supertile vertices survive.
    pub kept: Vec<bool>,
    pub edges: Vec<RkttEdge>,
    pub faces: Vec<RkttFace>,
    /// Face census of every complete RKTT star.
    pub stars: Vec<(u32, StarCensus)>,
}

impl RkttGraph {
    pub fn face_census(&self) -> HashMap<FaceKind, usize> {
        let mut m = HashMap::new();
        for f in self.faces.iter().filter(|f| f.complete) {
            if let Some(k) = f.kind {
                *m.entry(k).or_insert(0) += 1;
            }
        }
        m
    }

    /// Complete stars whose census matches none of the seven rules.
    pub fn unmatched_stars(&self) -> Vec<(u32, StarCensus)> {
        self.stars.iter().copied().filter(|(_, c)| map_star_to_pattern(*c).is_none()).collect()
    }
}

pub fn derive_rktt(sg: &SupertilingGraph) -> Result<RkttGraph> {
    let g = &sg.graph;
    let n = g.len();
    let kite = |v: u32| sg.classes[v as usize] == AtlasClass::Kite;
    let kept: Vec<bool> = (0..n as u32).map(|v| !kite(v)).collect();
    let dir = |a: u32, b: u32| (&g.points[b as usize] - &g.points[a as usize]).direction();

    // outgoing edges per vertex as (direction, neighbour)
    let mut out: Vec<Vec<(u8, u32)>> = vec![Vec::new(); n];
    let mut edges = Vec::new();
    for &(a, b) in &g.edges {
        if kept[a as usize] && kept[b as usize] {
            out[a as usize].push((dir(a, b).unwrap(), b));
            out[b as usize].push((dir(b, a).unwrap(), a));
            edges.push(RkttEdge { a, b, long: false });
        }
    }
    let mut broken = vec![false; n];
    for kv in 0..n as u32 {
        if !kite(kv) {
            continue;
        }
        let cs = &g.corners[kv as usize];
        let thin = cs.iter().find(|c| c.size == 4);
        let thick: Vec<_> = cs.iter().filter(|c| c.size == 3).collect();
        let (Some(thin), 2) = (thin, thick.len()) else {
            return Err(Error::InvalidTiling(format!("kite vertex {kv} has an unexpected star")));
        };
        // the edge shared by the two thick corners
        let shared = if (thick[0].start + 3) % 10 == thick[1].start { thick[1].start } else { thick[0].start };
        let w = g.adj[kv as usize].iter().copied().find(|&x| dir(kv, x) == Some(shared)).unwrap();
        // far obtuse vertex of the thin rhombus, straight across from w
        let r = &sg.tiling.rhombi[thin.rhombus as usize];
        let x = r.vertices[(thin.role as usize + 2) % 4];
        if !kept[w as usize] || !kept[x as usize] {
            broken[w as usize] = true;
            broken[x as usize] = true;
            continue;
        }
        let d = dir(w, kv).unwrap();
        out[w as usize].push((d, x));
        out[x as usize].push(((d + 5) % 10, w));
        edges.push(RkttEdge { a: w.min(x), b: w.max(x), long: true });
    }
    edges.sort_by_key(|e| (e.a, e.b));
    let long: std::collections::HashSet<(u32, u32)> =
        edges.iter().filter(|e| e.long).map(|e| (e.a, e.b)).collect();
    for o in out.iter_mut() {
        o.sort_unstable();
    }

    // a vertex is settled when every supertile vertex it touches is classified
    let settled = |v: u32| sg.is_deep(v) && !broken[v as usize];

    let mut face_of: HashMap<(u32, u32), usize> = HashMap::new();
    let mut faces = Vec::new();
    for a in 0..n as u32 {
        for &(_, b) in &out[a as usize] {
            if face_of.contains_key(&(a, b)) {
                continue;
            }
            let fid = faces.len();
            let mut cyc = vec![a];
            let (mut u, mut v) = (a, b);
            let mut ok = true;
            loop {
                face_of.insert((u, v), fid);
                let o = &out[v as usize];
                let back = o.iter().position(|&(_, y)| y == u).unwrap();
                let (_, nxt) = o[(back + o.len() - 1) % o.len()];
                u = v;
                v = nxt;
                if u == a {
                    break;
                }
                cyc.push(u);
                if cyc.len() > 64 {
                    ok = false;
                    break;
                }
            }
            let area = signed_area(g, &cyc);
            let kind = if ok && cyc.len() == 4 && area > 0.0 {
                let nlong = (0..4)
                    .filter(|&i| {
                        let (p, q) = (cyc[i], cyc[(i + 1) % 4]);
                        long.contains(&(p.min(q), p.max(q)))
                    })
                    .count();
                match nlong {
                    0 => Some(FaceKind::Rhombus),
                    1 => Some(FaceKind::Trapeze),
                    2 => Some(FaceKind::Kite),
                    _ => None,
                }
            } else {
                None
            };
            let complete = ok && area > 0.0 && cyc.iter().all(|&v| settled(v));
            faces.push(RkttFace { vertices: cyc, kind, complete });
        }
    }

    let mut stars = Vec::new();
    for v in 0..n as u32 {
        if !kept[v as usize] || !settled(v) || out[v as usize].is_empty() {
            continue;
        }
        let fs: Vec<&RkttFace> = out[v as usize].iter().map(|&(_, b)| &faces[face_of[&(v, b)]]).collect();
        if !fs.iter().all(|f| f.complete && f.kind.is_some()) {
            continue;
        }
        let mut c = StarCensus::default();
        for f in fs {
            match f.kind.unwrap() {
                FaceKind::Rhombus => c.rhombus += 1,
                FaceKind::Kite => c.kite += 1,
                FaceKind::Trapeze => c.trapeze += 1,
            }
        }
        stars.push((v, c));
    }
    Ok(RkttGraph { kept, edges, faces, stars })
}

fn signed_area(g: &SiteGraph, cyc: &[u32]) -> f64 {
    let pts: Vec<(f64, f64)> = cyc.iter().map(|&v| g.points[v as usize].to_cartesian()).collect();
    let n = pts.len();
    (0..n)
        .map(|i| {
            let (x0, y0) = pts[i];
            let (x1, y1) = pts[(i + 1) % n];
            x0 * y1 - x1 * y0
        })
        .sum::<f64>()
        / 2.0
}

/// The seven star-to-pattern rules, verbatim.
pub fn map_star_to_pattern(c: StarCensus) -> Option<PatternKind> {
    use PatternKind::*;
    Some(match (c.rhombus, c.kite, c.trapeze) {
        (0, 5, 0) => Starfish,
        (5, 0, 0) => Urchin,
        (2, 0, 2) => Urchin,
        (0, 1, 2) => Urchin,
        (2, 1, 0) => Snail,
        (0, 1, 4) => Turtle,
        (1, 2, 2) => Bat,
        _ => return None,
    })
}
