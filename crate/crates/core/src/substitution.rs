//! Robinson-triangle substitution for P3.
//!
//! Every step multiplies all coordinates by φ instead of shrinking the
//! triangles, so edges stay unit length and coordinates stay integral.
//! A half-rhomb (A, B, C) has its apex at A and its base on BC; two mirror
//! halves with the same kind and the same (B, C) make one rhombus.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::cyclo::CycloPoint;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TileKind {
    Thin,
    Thick,
}

impl TileKind {
    /// Corner angles in units of 36°, in the vertex order (A, B, A', C).
    pub fn corner_angles(self) -> [u8; 4] {
        match self {
            TileKind::Thin => [1, 4, 1, 4],
            TileKind::Thick => [3, 2, 3, 2],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Chirality {
    Left,
    Right,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SeedKind {
    OneThick,
    OneThin,
    Sun,
}

impl std::str::FromStr for SeedKind {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "one-thick" => Ok(SeedKind::OneThick),
            "one-thin" => Ok(SeedKind::OneThin),
            "sun" => Ok(SeedKind::Sun),
            _ => Err(format!("unknown seed '{s}' (expected one-thick, one-thin or sun)")),
        }
    }
}

impl SeedKind {
    pub fn name(self) -> &'static str {
        match self {
            SeedKind::OneThick => "one-thick",
            SeedKind::OneThin => "one-thin",
            SeedKind::Sun => "sun",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HalfRhomb {
    pub kind: TileKind,
    pub chirality: Chirality,
    /// Apex first.
    pub vertices: [CycloPoint; 3],
    pub generation: u32,
    /// Index of the ancestor in generation 0, 1, … generation−1.
    pub lineage: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rhombus {
    pub kind: TileKind,
    /// (A, B, A', C) in cyclic order; A and A' are the two apexes.
    pub vertices: [u32; 4],
    pub halves: [u32; 2],
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tiling {
    pub seed_kind: SeedKind,
    pub scale_exponent: u32,
    pub vertices: Vec<CycloPoint>,
    pub rhombi: Vec<Rhombus>,
    pub halves: Vec<HalfRhomb>,
}

fn chirality_of(v: &[CycloPoint; 3]) -> Chirality {
    let (ax, ay) = v[0].to_cartesian();
    let (bx, by) = v[1].to_cartesian();
    let (cx, cy) = v[2].to_cartesian();
    let cross = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax);
    if cross > 0.0 {
        Chirality::Left
    } else {
        Chirality::Right
    }
}

fn half(kind: TileKind, a: CycloPoint, b: CycloPoint, c: CycloPoint, generation: u32, lineage: Vec<u32>) -> HalfRhomb {
    let vertices = [a, b, c];
    HalfRhomb { kind, chirality: chirality_of(&vertices), vertices, generation, lineage }
}

fn seed_halves(kind: SeedKind) -> Vec<HalfRhomb> {
    let u = CycloPoint::unit;
    let o = CycloPoint::zero();
    match kind {
        SeedKind::OneThick => {
            let c = CycloPoint::one().mul_phi();
            vec![
                half(TileKind::Thick, u(1), o.clone(), c.clone(), 0, vec![]),
                half(TileKind::Thick, u(9), o, c, 0, vec![]),
            ]
        }
        SeedKind::OneThin => {
            let far = &u(0) + &u(1);
            vec![
                half(TileKind::Thin, o, u(0), u(1), 0, vec![]),
                half(TileKind::Thin, far, u(0), u(1), 0, vec![]),
            ]
        }
        SeedKind::Sun => {
            let mut out = Vec::with_capacity(10);
            for i in 0..5u8 {
                let s0 = u(2 * i);
                let s1 = u((2 * i + 2) % 10);
                let t = &s0 + &s1;
                // the origin is the C corner of every half, which makes it a sun
                out.push(half(TileKind::Thick, s0, t.clone(), o.clone(), 0, vec![]));
                out.push(half(TileKind::Thick, s1, t, o.clone(), 0, vec![]));
            }
            out
        }
    }
}

fn subdivide(halves: &[HalfRhomb]) -> Vec<HalfRhomb> {
    let mut out = Vec::with_capacity(halves.len() * 3);
    for (idx, h) in halves.iter().enumerate() {
        let a = h.vertices[0].mul_phi();
        let b = h.vertices[1].mul_phi();
        let c = h.vertices[2].mul_phi();
        let g = h.generation + 1;
        let mut lin = h.lineage.clone();
        lin.push(idx as u32);
        match h.kind {
            TileKind::Thin => {
                let p = &a + &(&b - &a).div_phi();
                out.push(half(TileKind::Thin, c.clone(), p.clone(), b, g, lin.clone()));
                out.push(half(TileKind::Thick, p, c, a, g, lin));
            }
            TileKind::Thick => {
                let q = &b + &(&a - &b).div_phi();
                let r = &b + &(&c - &b).div_phi();
                out.push(half(TileKind::Thick, r.clone(), c, a.clone(), g, lin.clone()));
                out.push(half(TileKind::Thick, q.clone(), r.clone(), b, g, lin.clone()));
                out.push(half(TileKind::Thin, r, q, a, g, lin));
            }
        }
    }
    out
}

/// Pair mirror halves into rhombi. Returns the rhombi (with vertex ids into
/// the returned vertex list) and the vertex list.
fn assemble(halves: &[HalfRhomb]) -> Result<(Vec<CycloPoint>, Vec<Rhombus>)> {
    let mut by_base: HashMap<(TileKind, &CycloPoint, &CycloPoint), Vec<u32>> = HashMap::new();
    for (i, h) in halves.iter().enumerate() {
        by_base.entry((h.kind, &h.vertices[1], &h.vertices[2])).or_default().push(i as u32);
    }
    let mut pairs: Vec<[u32; 2]> = Vec::new();
    for ids in by_base.values() {
        match ids.len() {
            1 => {}
            2 => pairs.push([ids[0].min(ids[1]), ids[0].max(ids[1])]),
            n => return Err(Error::InvalidTiling(format!("{n} halves share one base"))),
        }
    }
    pairs.sort_unstable();
    let mut vid: HashMap<CycloPoint, u32> = HashMap::new();
    let mut vertices = Vec::new();
    let mut rhombi = Vec::with_capacity(pairs.len());
    for [i, j] in pairs {
        let (hi, hj) = (&halves[i as usize], &halves[j as usize]);
        if hi.chirality == hj.chirality {
            return Err(Error::InvalidTiling("paired halves are not mirror images".into()));
        }
        let pts = [&hi.vertices[0], &hi.vertices[1], &hj.vertices[0], &hi.vertices[2]];
        let mut ids = [0u32; 4];
        for (k, p) in pts.iter().enumerate() {
            let next = vertices.len() as u32;
            ids[k] = *vid.entry((*p).clone()).or_insert_with(|| {
                vertices.push((*p).clone());
                next
            });
        }
        rhombi.push(Rhombus { kind: hi.kind, vertices: ids, halves: [i, j] });
    }
    Ok((vertices, rhombi))
}

pub fn make_seed(kind: SeedKind) -> Tiling {
    let halves = seed_halves(kind);
    let (vertices, rhombi) = assemble(&halves).expect("seed halves pair up");
    Tiling { seed_kind: kind, scale_exponent: 0, vertices, rhombi, halves }
}

pub fn substitute(t: &Tiling, steps: u32) -> Tiling {
    if steps == 0 {
        return t.clone();
    }
    let mut halves = t.halves.clone();
    for _ in 0..steps {
        halves = subdivide(&halves);
    }
    let (vertices, rhombi) = assemble(&halves).expect("substitution preserves pairing");
    Tiling { seed_kind: t.seed_kind, scale_exponent: t.scale_exponent + steps, vertices, rhombi, halves }
}

/// Seed of the given kind substituted k times.
pub fn generate(kind: SeedKind, k: u32) -> Tiling {
    substitute(&make_seed(kind), k)
}

/// Numbers of thin and thick halves. Half the value is the rhombus-equivalent census.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HalfCensus {
    pub thin: u64,
    pub thick: u64,
}

impl HalfCensus {
    /// (thin, thick) in whole rhombi, if both half counts are even.
    pub fn rhombi(&self) -> Option<(u64, u64)> {
        (self.thin % 2 == 0 && self.thick % 2 == 0).then_some((self.thin / 2, self.thick / 2))
    }

    /// Image under `steps` substitution steps: thin → thin + thick, thick → thin + 2 thick.
    pub fn substituted(&self, steps: u32) -> HalfCensus {
        let (mut a, mut b) = (self.thin, self.thick);
        for _ in 0..steps {
            let na = a + b;
            let nb = a + 2 * b;
            a = na;
            b = nb;
        }
        HalfCensus { thin: a, thick: b }
    }
}

impl Tiling {
    pub fn census(&self) -> HalfCensus {
        let thin = self.halves.iter().filter(|h| h.kind == TileKind::Thin).count() as u64;
        HalfCensus { thin, thick: self.halves.len() as u64 - thin }
    }

    pub fn vertex_index(&self) -> HashMap<CycloPoint, u32> {
        self.vertices.iter().enumerate().map(|(i, p)| (p.clone(), i as u32)).collect()
    }

    /// Halves left unpaired at the patch boundary.
    pub fn orphan_halves(&self) -> Vec<u32> {
        let mut paired = vec![false; self.halves.len()];
        for r in &self.rhombi {
            paired[r.halves[0] as usize] = true;
            paired[r.halves[1] as usize] = true;
        }
        (0..self.halves.len() as u32).filter(|&i| !paired[i as usize]).collect()
    }

    /// Check the local validity conditions: unit edges, mirror pairing,
    /// at most two rhombi per edge, and non-overlapping corners at every vertex.
    pub fn validate(&self) -> Result<()> {
        let mut edge_use: HashMap<(u32, u32), u8> = HashMap::new();
        let mut sectors: HashMap<u32, Vec<(u8, u8)>> = HashMap::new();
        for (ri, r) in self.rhombi.iter().enumerate() {
            let [hi, hj] = r.halves;
            let (a, b) = (&self.halves[hi as usize], &self.halves[hj as usize]);
            if a.kind != b.kind || a.vertices[1] != b.vertices[1] || a.vertices[2] != b.vertices[2] || a.chirality == b.chirality {
                return Err(Error::InvalidTiling(format!("rhombus {ri} halves do not mirror")));
            }
            let ang = r.kind.corner_angles();
            for k in 0..4 {
                let v = r.vertices[k];
                let nxt = r.vertices[(k + 1) % 4];
                let prv = r.vertices[(k + 3) % 4];
                let p = &self.vertices[v as usize];
                let dn = (&self.vertices[nxt as usize] - p).direction();
                let dp = (&self.vertices[prv as usize] - p).direction();
                let (dn, dp) = match (dn, dp) {
                    (Some(x), Some(y)) => (x, y),
                    _ => return Err(Error::InvalidTiling(format!("rhombus {ri} has a non-unit edge"))),
                };
                let start = if (dn + ang[k]) % 10 == dp {
                    dn
                } else if (dp + ang[k]) % 10 == dn {
                    dp
                } else {
                    return Err(Error::InvalidTiling(format!("rhombus {ri} corner angle mismatch")));
                };
                sectors.entry(v).or_default().push((start, ang[k]));
                *edge_use.entry((v.min(nxt), v.max(nxt))).or_default() += 1;
            }
        }
        if let Some(e) = edge_use.iter().find(|(_, &c)| c > 2) {
            return Err(Error::InvalidTiling(format!("edge {:?} is shared by more than two rhombi", e.0)));
        }
        for (v, secs) in &sectors {
            let mut covered = [false; 10];
            for &(s, a) in secs {
                for t in 0..a {
                    let slot = ((s + t) % 10) as usize;
                    if covered[slot] {
                        return Err(Error::InvalidTiling(format!("overlapping corners at vertex {v}")));
                    }
                    covered[slot] = true;
                }
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&TilingDoc::from(self))?)
    }

    pub fn from_json(s: &str) -> Result<Tiling> {
        let doc: TilingDoc = serde_json::from_str(s)?;
        Ok(doc.into())
    }
}

/// JSON layout for a tiling. Coordinates are plain integer 4-tuples.
#[derive(Serialize, Deserialize)]
struct TilingDoc {
    seed_kind: SeedKind,
    scale_exponent: u32,
    vertices: Vec<[i64; 4]>,
    rhombi: Vec<Rhombus>,
    halves: Vec<HalfDoc>,
}

#[derive(Serialize, Deserialize)]
struct HalfDoc {
    kind: TileKind,
    chirality: Chirality,
    vertices: [[i64; 4]; 3],
    generation: u32,
    lineage: Vec<u32>,
}

fn from_i64s(a: [i64; 4]) -> CycloPoint {
    CycloPoint::new(a[0], a[1], a[2], a[3])
}

impl From<&Tiling> for TilingDoc {
    fn from(t: &Tiling) -> Self {
        TilingDoc {
            seed_kind: t.seed_kind,
            scale_exponent: t.scale_exponent,
            vertices: t.vertices.iter().map(|p| p.to_i64s()).collect(),
            rhombi: t.rhombi.clone(),
            halves: t
                .halves
                .iter()
                .map(|h| HalfDoc {
                    kind: h.kind,
                    chirality: h.chirality,
                    vertices: [h.vertices[0].to_i64s(), h.vertices[1].to_i64s(), h.vertices[2].to_i64s()],
                    generation: h.generation,
                    lineage: h.lineage.clone(),
                })
                .collect(),
        }
    }
}

impl From<TilingDoc> for Tiling {
    fn from(d: TilingDoc) -> Self {
        Tiling {
            seed_kind: d.seed_kind,
            scale_exponent: d.scale_exponent,
            vertices: d.vertices.into_iter().map(from_i64s).collect(),
            rhombi: d.rhombi,
            halves: d
                .halves
                .into_iter()
                .map(|h| HalfRhomb {
                    kind: h.kind,
                    chirality: h.chirality,
                    vertices: h.vertices.map(from_i64s),
                    generation: h.generation,
                    lineage: h.lineage,
                })
                .collect(),
        }
    }
}

/// One level-`level` supertile: a rhombus of the ancestor generation, or a
/// lone ancestor half clipped by the seed boundary.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Supertile {
    pub kind: TileKind,
    /// Ancestor halves, indices into the ancestor generation.
    pub ancestors: Vec<u32>,
    pub complete: bool,
    pub census: HalfCensus,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SupertilePartition {
    pub level: u32,
    /// Supertile id of every half-rhomb of the tiling.
    pub of_half: Vec<u32>,
    pub supertiles: Vec<Supertile>,
}

impl SupertilePartition {
    /// Rhombus-equivalent census of the supertile types: (thin, thick) counted in halves.
    pub fn type_census(&self) -> HalfCensus {
        let mut c = HalfCensus { thin: 0, thick: 0 };
        for s in &self.supertiles {
            let n = s.ancestors.len() as u64;
            match s.kind {
                TileKind::Thin => c.thin += n,
                TileKind::Thick => c.thick += n,
            }
        }
        c
    }
}

pub fn supertile_partition(t: &Tiling, level: u32) -> Result<SupertilePartition> {
    if level > t.scale_exponent {
        return Err(Error::LevelTooDeep { level: level as usize, depth: t.scale_exponent as usize });
    }
    let anc_gen = t.scale_exponent - level;
    let ancestors = generate(t.seed_kind, anc_gen);
    let mut group_of_anc = vec![u32::MAX; ancestors.halves.len()];
    let mut supertiles = Vec::new();
    for r in &ancestors.rhombi {
        for &h in &r.halves {
            group_of_anc[h as usize] = supertiles.len() as u32;
        }
        supertiles.push(Supertile {
            kind: r.kind,
            ancestors: r.halves.to_vec(),
            complete: true,
            census: HalfCensus { thin: 0, thick: 0 },
        });
    }
    for h in ancestors.orphan_halves() {
        group_of_anc[h as usize] = supertiles.len() as u32;
        supertiles.push(Supertile {
            kind: ancestors.halves[h as usize].kind,
            ancestors: vec![h],
            complete: false,
            census: HalfCensus { thin: 0, thick: 0 },
        });
    }
    let mut of_half: Vec<u32> = t
        .halves
        .iter()
        .enumerate()
        .map(|(i, h)| if level == 0 { i as u32 } else { h.lineage[anc_gen as usize] })
        .collect();
    for (i, h) in t.halves.iter().enumerate() {
        let g = group_of_anc[of_half[i] as usize];
        of_half[i] = g;
        let c = &mut supertiles[g as usize].census;
        match h.kind {
            TileKind::Thin => c.thin += 1,
            TileKind::Thick => c.thick += 1,
        }
    }
    Ok(SupertilePartition { level, of_half, supertiles })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeds() {
        let t = make_seed(SeedKind::OneThick);
        assert_eq!((t.rhombi.len(), t.halves.len()), (1, 2));
        let s = make_seed(SeedKind::Sun);
        assert_eq!((s.rhombi.len(), s.halves.len(), s.vertices.len()), (5, 10, 11));
        assert_eq!(make_seed(SeedKind::OneThin).census().rhombi(), Some((1, 0)));
        for t in [t, s, make_seed(SeedKind::OneThin)] {
            t.validate().unwrap();
        }
    }

    #[test]
    fn one_step_of_thin() {
        let t = generate(SeedKind::OneThin, 1);
        assert_eq!(t.census().rhombi(), Some((1, 1)));
        t.validate().unwrap();
    }

    #[test]
    fn zero_steps_is_identity() {
        let t = make_seed(SeedKind::Sun);
        assert_eq!(substitute(&t, 0), t);
    }
}
