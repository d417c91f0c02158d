//! The bipartite site graph of a tiling and the vertex-star atlas.

use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::cyclo::CycloPoint;
use crate::error::{Error, Result};
use crate::substitution::{TileKind, Tiling};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

/// A rhombus corner at a vertex: the sector from direction `start`
/// counter-clockwise over `size` steps of 36°.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Corner {
    pub start: u8,
    pub size: u8,
    pub kind: TileKind,
    pub rhombus: u32,
    /// Position of the vertex in the rhombus (A, B, A', C).
    pub role: u8,
}

#[derive(Clone, Debug)]
pub struct SiteGraph {
    pub points: Vec<CycloPoint>,
    pub parity: Vec<Parity>,
    pub edges: Vec<(u32, u32)>,
    pub adj: Vec<Vec<u32>>,
    pub corners: Vec<Vec<Corner>>,
    pub index: HashMap<CycloPoint, u32>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AtlasClass {
    Kite,
    Deuce,
    Jack,
    Ace,
    King,
    Queen,
    Star,
    Sun,
    Incomplete,
}

impl AtlasClass {
    pub const COMPLETE: [AtlasClass; 8] = [
        AtlasClass::Kite,
        AtlasClass::Deuce,
        AtlasClass::Jack,
        AtlasClass::Ace,
        AtlasClass::King,
        AtlasClass::Queen,
        AtlasClass::Star,
        AtlasClass::Sun,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AtlasClass::Kite => "kite",
            AtlasClass::Deuce => "deuce",
            AtlasClass::Jack => "jack",
            AtlasClass::Ace => "ace",
            AtlasClass::King => "king",
            AtlasClass::Queen => "queen",
            AtlasClass::Star => "star",
            AtlasClass::Sun => "sun",
            AtlasClass::Incomplete => "incomplete",
        }
    }
}

pub fn build_graph(t: &Tiling) -> Result<SiteGraph> {
    let n = t.vertices.len();
    let mut adj: Vec<Vec<u32>> = vec![Vec::new(); n];
    let mut corners: Vec<Vec<Corner>> = vec![Vec::new(); n];
    let mut edges = Vec::new();
    for (ri, r) in t.rhombi.iter().enumerate() {
        let ang = r.kind.corner_angles();
        for k in 0..4 {
            let v = r.vertices[k];
            let nxt = r.vertices[(k + 1) % 4];
            let prv = r.vertices[(k + 3) % 4];
            let p = &t.vertices[v as usize];
            let dn = (&t.vertices[nxt as usize] - p).direction();
            let dp = (&t.vertices[prv as usize] - p).direction();
            let (Some(dn), Some(dp)) = (dn, dp) else {
                return Err(Error::InvalidTiling(format!("rhombus {ri} has a non-unit edge")));
            };
            let start = if (dn + ang[k]) % 10 == dp { dn } else { dp };
            corners[v as usize].push(Corner { start, size: ang[k], kind: r.kind, rhombus: ri as u32, role: k as u8 });
            let e = (v.min(nxt), v.max(nxt));
            if !adj[e.0 as usize].contains(&e.1) {
                adj[e.0 as usize].push(e.1);
                adj[e.1 as usize].push(e.0);
                edges.push(e);
            }
        }
    }
    for a in adj.iter_mut() {
        a.sort_unstable();
    }
    for c in corners.iter_mut() {
        c.sort();
    }
    edges.sort_unstable();
    let parity = bipartition(&t.vertices, &adj)?;
    Ok(SiteGraph { points: t.vertices.clone(), parity, edges, adj, corners, index: t.vertex_index() })
}

/// Proper 2-colouring by breadth-first search. In every component the root is
/// the lexicographically smallest coordinate tuple and is labelled even.
pub fn bipartition(points: &[CycloPoint], adj: &[Vec<u32>]) -> Result<Vec<Parity>> {
    let n = points.len();
    let mut order: Vec<u32> = (0..n as u32).collect();
    order.sort_by(|&a, &b| points[a as usize].cmp(&points[b as usize]));
    let mut col: Vec<Option<Parity>> = vec![None; n];
    let mut q = VecDeque::new();
    for root in order {
        if col[root as usize].is_some() {
            continue;
        }
        col[root as usize] = Some(Parity::Even);
        q.push_back(root);
        while let Some(x) = q.pop_front() {
            let cx = col[x as usize].unwrap();
            let other = if cx == Parity::Even { Parity::Odd } else { Parity::Even };
            for &y in &adj[x as usize] {
                match col[y as usize] {
                    None => {
                        col[y as usize] = Some(other);
                        q.push_back(y);
                    }
                    Some(c) if c == cx => return Err(Error::OddCycle(y)),
                    _ => {}
                }
            }
        }
    }
    Ok(col.into_iter().map(|c| c.unwrap()).collect())
}

/// Cyclic sequence of corner sizes, canonical up to rotation and reflection,
/// or None if the corners do not close up to 360°.
pub fn star_signature(corners: &[Corner]) -> Option<Vec<u8>> {
    if corners.iter().map(|c| c.size as u32).sum::<u32>() != 10 {
        return None;
    }
    let seq: Vec<u8> = corners.iter().map(|c| c.size).collect();
    let n = seq.len();
    let mut best: Option<Vec<u8>> = None;
    for s in [seq.clone(), seq.iter().rev().copied().collect()] {
        for r in 0..n {
            let cand: Vec<u8> = (0..n).map(|i| s[(i + r) % n]).collect();
            if best.as_ref().map_or(true, |b| cand < *b) {
                best = Some(cand);
            }
        }
    }
    best
}

fn class_of_signature(sig: &[u8]) -> Option<AtlasClass> {
    Some(match sig {
        [3, 3, 4] => AtlasClass::Kite,
        [1, 2, 1, 3, 3] => AtlasClass::Ace,
        [2, 4, 4] => AtlasClass::Deuce,
        [2, 2, 2, 4] => AtlasClass::Jack,
        [1, 1, 2, 1, 1, 2, 2] => AtlasClass::Queen,
        [1, 1, 2, 2, 2, 2] => AtlasClass::King,
        _ => return None,
    })
}

impl SiteGraph {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn degree(&self, v: u32) -> usize {
        self.adj[v as usize].len()
    }

    pub fn is_complete(&self, v: u32) -> bool {
        self.corners[v as usize].iter().map(|c| c.size as u32).sum::<u32>() == 10
    }

    pub fn classify_vertex_star(&self, v: u32) -> Result<AtlasClass> {
        let Some(sig) = star_signature(&self.corners[v as usize]) else {
            return Ok(AtlasClass::Incomplete);
        };
        if let Some(c) = class_of_signature(&sig) {
            return Ok(c);
        }
        if sig == [2, 2, 2, 2, 2] {
            // five thick acute corners: the decoration tells sun from star
            let cs = &self.corners[v as usize];
            if cs.iter().all(|c| c.role == 3) {
                return Ok(AtlasClass::Sun);
            }
            if cs.iter().all(|c| c.role == 1) {
                return Ok(AtlasClass::Star);
            }
        }
        Err(Error::UnknownStar(v))
    }

    pub fn classify_all(&self) -> Result<Vec<AtlasClass>> {
        (0..self.len() as u32).map(|v| self.classify_vertex_star(v)).collect()
    }

    /// The corners at v as (start, size, kind), sorted: an exact description
    /// of the vertex star that rotates with the tiling.
    pub fn star_key(&self, v: u32) -> Vec<(u8, u8, TileKind)> {
        let mut k: Vec<_> = self.corners[v as usize].iter().map(|c| (c.start, c.size, c.kind)).collect();
        k.sort();
        k
    }

    pub fn even_fraction(&self) -> f64 {
        let e = self.parity.iter().filter(|&&p| p == Parity::Even).count();
        e as f64 / self.len() as f64
    }

    pub fn to_json(&self, labels: Option<&[AtlasClass]>) -> Result<String> {
        #[derive(Serialize)]
        struct V {
            id: u32,
            coord: [i64; 4],
            parity: Parity,
            #[serde(skip_serializing_if = "Option::is_none")]
            atlas: Option<AtlasClass>,
        }
        #[derive(Serialize)]
        struct Doc {
            vertices: Vec<V>,
            edges: Vec<(u32, u32)>,
        }
        let doc = Doc {
            vertices: (0..self.len())
                .map(|i| V {
                    id: i as u32,
                    coord: self.points[i].to_i64s(),
                    parity: self.parity[i],
                    atlas: labels.map(|l| l[i]),
                })
                .collect(),
            edges: self.edges.clone(),
        };
        Ok(serde_json::to_string(&doc)?)
    }
}
