//! The five basic patterns and the partition of a tiling into their interiors.
//!
//! Each pattern is stored as a template: cell offsets from the center with the
//! perfect occupancy, plus a loop decomposition. A template is stamped at every
//! non-kite supertile vertex, rotated so that the supertile star matches.

use std::collections::HashMap;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::cyclo::CycloPoint;
use crate::error::{Error, Result};
use crate::golden::GoldenNumber;
use crate::graph::{AtlasClass, SiteGraph};
use crate::substitution::TileKind;
use crate::supertiling::SupertilingGraph;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PatternKind {
    Urchin,
    Starfish,
    Snail,
    Turtle,
    Bat,
}

impl PatternKind {
    pub const ALL: [PatternKind; 5] =
        [PatternKind::Urchin, PatternKind::Starfish, PatternKind::Snail, PatternKind::Turtle, PatternKind::Bat];

    pub fn perfect_count(self) -> usize {
        match self {
            PatternKind::Urchin => 16,
            PatternKind::Starfish => 51,
            PatternKind::Snail => 23,
            PatternKind::Turtle => 63,
            PatternKind::Bat => 75,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            PatternKind::Urchin => "urchin",
            PatternKind::Starfish => "starfish",
            PatternKind::Snail => "snail",
            PatternKind::Turtle => "turtle",
            PatternKind::Bat => "bat",
        }
    }

    /// Pattern centered at a supertile vertex of the given class.
    pub fn of_class(c: AtlasClass) -> Option<PatternKind> {
        Some(match c {
            AtlasClass::Deuce => PatternKind::Bat,
            AtlasClass::Jack => PatternKind::Turtle,
            AtlasClass::Ace => PatternKind::Snail,
            AtlasClass::King | AtlasClass::Queen | AtlasClass::Star => PatternKind::Urchin,
            AtlasClass::Sun => PatternKind::Starfish,
            AtlasClass::Kite | AtlasClass::Incomplete => return None,
        })
    }
}

impl std::str::FromStr for PatternKind {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        PatternKind::ALL.into_iter().find(|k| k.name() == s).ok_or_else(|| format!("unknown pattern '{s}'"))
    }
}

/// Frequency of supertile vertices of each non-kite class, per supertile vertex.
pub fn class_frequency(c: AtlasClass) -> Option<GoldenNumber> {
    Some(match c {
        AtlasClass::Deuce => GoldenNumber::from_ints(5, -3),
        AtlasClass::Jack => GoldenNumber::from_ints(-8, 5),
        AtlasClass::Ace => GoldenNumber::from_ints(-3, 2),
        AtlasClass::King => GoldenNumber::from_ints(-21, 13),
        AtlasClass::Queen => GoldenNumber::from_ints(13, -8),
        AtlasClass::Star => GoldenNumber::from_fracs(47, 5, -29, 5),
        AtlasClass::Sun => GoldenNumber::from_fracs(18, 5, -11, 5),
        AtlasClass::Kite | AtlasClass::Incomplete => return None,
    })
}

/// Frequency of pattern centers per supertile vertex.
pub fn pattern_frequency(k: PatternKind) -> GoldenNumber {
    AtlasClass::COMPLETE
        .iter()
        .filter(|&&c| PatternKind::of_class(c) == Some(k))
        .map(|&c| class_frequency(c).unwrap())
        .fold(GoldenNumber::zero(), |a, b| a + b)
}

#[derive(Clone, Debug)]
pub struct Template {
    pub center_class: AtlasClass,
    pub kind: PatternKind,
    /// Supertile star in the template frame, sorted.
    pub star: Vec<(u8, u8, TileKind)>,
    /// Offsets from the center with the perfect occupancy.
    pub cells: Vec<(CycloPoint, bool)>,
    /// Closed alternating walks, as offsets.
    pub loops: Vec<Vec<CycloPoint>>,
}

impl Template {
    pub fn perfect_count(&self) -> usize {
        self.cells.iter().filter(|c| c.1).count()
    }

    pub fn radius(&self) -> f64 {
        self.cells
            .iter()
            .map(|(p, _)| {
                let (x, y) = p.to_cartesian();
                x.hypot(y)
            })
            .fold(0.0, f64::max)
    }
}

#[derive(Deserialize)]
struct TemplateDoc {
    center_class: AtlasClass,
    kind: PatternKind,
    star: Vec<(u8, u8, u8)>,
    cells: Vec<[i64; 5]>,
    loops: Vec<Vec<[i64; 4]>>,
}

pub fn templates() -> &'static [Template] {
    static T: OnceLock<Vec<Template>> = OnceLock::new();
    T.get_or_init(|| {
        let docs: Vec<TemplateDoc> = serde_json::from_str(include_str!("templates.json")).expect("embedded templates");
        let pt = |a: &[i64]| CycloPoint::new(a[0], a[1], a[2], a[3]);
        docs.into_iter()
            .map(|d| Template {
                center_class: d.center_class,
                kind: d.kind,
                star: d
                    .star
                    .iter()
                    .map(|&(s, a, k)| (s, a, if k == 0 { TileKind::Thin } else { TileKind::Thick }))
                    .collect(),
                cells: d.cells.iter().map(|c| (pt(c), c[4] == 1)).collect(),
                loops: d.loops.iter().map(|l| l.iter().map(|p| pt(p)).collect()).collect(),
            })
            .collect()
    })
}

pub fn template_for(c: AtlasClass) -> Option<&'static Template> {
    templates().iter().find(|t| t.center_class == c)
}

/// First template of a kind; all templates of one kind share their cells up to rotation.
pub fn template_of_kind(k: PatternKind) -> &'static Template {
    templates().iter().find(|t| t.kind == k).expect("every kind has a template")
}

/// Largest distance from a center to a cell of its pattern.
pub fn max_radius() -> f64 {
    templates().iter().map(|t| t.radius()).fold(0.0, f64::max)
}

/// The rotation r that brings a star key to its canonical form, with that form.
pub fn canonical_orientation(key: &[(u8, u8, TileKind)]) -> (u8, Vec<(u8, u8, TileKind)>) {
    let mut best: Option<(u8, Vec<(u8, u8, TileKind)>)> = None;
    for r in 0..10u8 {
        let mut k: Vec<_> = key.iter().map(|&(s, a, t)| ((s + 10 - r) % 10, a, t)).collect();
        k.sort();
        if best.as_ref().map_or(true, |b| k < b.1) {
            best = Some((r, k));
        }
    }
    best.expect("non-empty rotation set")
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PatternInstance {
    pub kind: PatternKind,
    /// Original vertex at the center.
    pub center: u32,
    /// Supertile vertex the pattern is stamped at, and its class.
    pub supertile_vertex: u32,
    pub center_class: AtlasClass,
    pub orientation: u8,
    pub interior: Vec<u32>,
    /// Occupied interior vertices of the perfect configuration.
    pub perfect: Vec<u32>,
    pub sm_boundary: Vec<u32>,
    pub yellow_edges: Vec<(u32, u32)>,
}

impl PatternInstance {
    pub fn template(&self) -> &'static Template {
        template_for(self.center_class).expect("instance class has a template")
    }

    /// Template loops mapped to vertex ids.
    pub fn loops(&self, g: &SiteGraph) -> Result<Vec<Vec<u32>>> {
        let c = &g.points[self.center as usize];
        self.template()
            .loops
            .iter()
            .map(|l| {
                l.iter()
                    .map(|off| {
                        let p = c + &off.rotate(self.orientation);
                        g.index.get(&p).copied().ok_or_else(|| Error::Partition(format!("loop vertex {p} missing")))
                    })
                    .collect()
            })
            .collect()
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Partition {
    pub patterns: Vec<PatternInstance>,
    /// Pattern owning each vertex, if any.
    pub owner: Vec<Option<u32>>,
    /// Vertices far enough from every clipped star that their covering is reliable.
    pub safe: Vec<bool>,
    /// Non-kite supertile vertices whose pattern could not be stamped.
    pub skipped: usize,
}

impl Partition {
    /// Union of all stamped interiors.
    pub fn complete_window(&self) -> Vec<bool> {
        self.owner.iter().map(|o| o.is_some()).collect()
    }

    pub fn safe_count(&self) -> usize {
        self.safe.iter().filter(|&&b| b).count()
    }

    pub fn kind_census(&self) -> HashMap<PatternKind, usize> {
        let mut m = HashMap::new();
        for p in &self.patterns {
            *m.entry(p.kind).or_insert(0) += 1;
        }
        m
    }

    pub fn to_json(&self) -> Result<String> {
        #[derive(Serialize)]
        struct P<'a> {
            kind: PatternKind,
            center: u32,
            interior: &'a [u32],
            boundary: &'a [u32],
            yellow_edges: &'a [(u32, u32)],
            orientation: u8,
        }
        let ps: Vec<P> = self
            .patterns
            .iter()
            .map(|p| P {
                kind: p.kind,
                center: p.center,
                interior: &p.interior,
                boundary: &p.sm_boundary,
                yellow_edges: &p.yellow_edges,
                orientation: p.orientation,
            })
            .collect();
        Ok(serde_json::to_string(&ps)?)
    }
}

/// Stamp a pattern at every deep non-kite supertile vertex and check that the
/// interiors partition the safe window.
pub fn partition_patches(g: &SiteGraph, sg: &SupertilingGraph) -> Result<Partition> {
    let n = g.len();
    let mut owner: Vec<Option<u32>> = vec![None; n];
    let mut patterns = Vec::new();
    let mut skipped = 0;
    let mut overlaps = Vec::new();
    for s in 0..sg.len() as u32 {
        let class = sg.classes[s as usize];
        let Some(kind) = PatternKind::of_class(class) else { continue };
        if !sg.is_deep(s) {
            skipped += 1;
            continue;
        }
        let Some(center) = sg.to_original[s as usize] else {
            return Err(Error::Partition(format!("supertile vertex {s} is not an original vertex")));
        };
        let tpl = template_for(class).unwrap();
        let (r, key) = canonical_orientation(&sg.graph.star_key(s));
        if key != tpl.star {
            return Err(Error::Partition(format!("supertile vertex {s}: star does not match the {} template", class.name())));
        }
        let c = &g.points[center as usize];
        let mut interior = Vec::with_capacity(tpl.cells.len());
        let mut perfect = Vec::new();
        for (off, occ) in &tpl.cells {
            let p = c + &off.rotate(r);
            let Some(&v) = g.index.get(&p) else { break };
            interior.push(v);
            if *occ {
                perfect.push(v);
            }
        }
        if interior.len() < tpl.cells.len() {
            skipped += 1;
            continue;
        }
        let id = patterns.len() as u32;
        for &v in &interior {
            match owner[v as usize] {
                None => owner[v as usize] = Some(id),
                Some(_) => overlaps.push(v),
            }
        }
        interior.sort_unstable();
        perfect.sort_unstable();
        patterns.push(PatternInstance {
            kind,
            center,
            supertile_vertex: s,
            center_class: class,
            orientation: r,
            interior,
            perfect,
            sm_boundary: Vec::new(),
            yellow_edges: Vec::new(),
        });
    }
    if let Some(v) = overlaps.first() {
        return Err(Error::Partition(format!("vertex {v} lies in two pattern interiors ({} overlaps)", overlaps.len())));
    }

    // collars and yellow edges, read off the concatenated perfect occupancy
    let mut occ = vec![false; n];
    for p in &patterns {
        for &v in &p.perfect {
            occ[v as usize] = true;
        }
    }
    for (i, p) in patterns.iter_mut().enumerate() {
        let mut collar = Vec::new();
        let mut yellow = Vec::new();
        for &v in &p.interior {
            for &w in &g.adj[v as usize] {
                let inside = owner[w as usize] == Some(i as u32);
                if !inside {
                    collar.push(w);
                }
                if !occ[v as usize] && !occ[w as usize] && owner[w as usize].is_some() && (!inside || v < w) {
                    yellow.push((v.min(w), v.max(w)));
                }
            }
        }
        collar.sort_unstable();
        collar.dedup();
        yellow.sort_unstable();
        yellow.dedup();
        p.sm_boundary = collar;
        p.yellow_edges = yellow;
    }

    let safe = safe_window(g, sg);
    let uncovered: Vec<usize> = (0..n).filter(|&v| safe[v] && owner[v].is_none()).collect();
    if let Some(v) = uncovered.first() {
        return Err(Error::Partition(format!("vertex {v} in the safe window is uncovered ({} total)", uncovered.len())));
    }
    Ok(Partition { patterns, owner, safe, skipped })
}

/// Original vertices at distance more than the largest pattern radius from
/// every clipped original star and every supertile vertex that is not deep.
/// Every supertile vertex whose pattern can reach such a vertex is then deep.
pub fn safe_window(g: &SiteGraph, sg: &SupertilingGraph) -> Vec<bool> {
    let radius = max_radius() + 1e-6;
    let mut bad: Vec<(f64, f64)> =
        (0..g.len() as u32).filter(|&v| !g.is_complete(v)).map(|v| g.points[v as usize].to_cartesian()).collect();
    bad.extend((0..sg.len() as u32).filter(|&s| !sg.is_deep(s)).map(|s| sg.scaled_point(s).to_cartesian()));
    let grid = PointGrid::new(&bad, radius);
    g.points.iter().map(|p| !grid.any_within(p.to_cartesian(), radius)).collect()
}

/// Bucketed point set for radius queries.
struct PointGrid {
    cell: f64,
    buckets: HashMap<(i64, i64), Vec<(f64, f64)>>,
}

impl PointGrid {
    fn new(pts: &[(f64, f64)], cell: f64) -> Self {
        let mut buckets: HashMap<(i64, i64), Vec<(f64, f64)>> = HashMap::new();
        for &(x, y) in pts {
            buckets.entry(((x / cell).floor() as i64, (y / cell).floor() as i64)).or_default().push((x, y));
        }
        PointGrid { cell, buckets }
    }

    fn any_within(&self, (x, y): (f64, f64), r: f64) -> bool {
        let (cx, cy) = ((x / self.cell).floor() as i64, (y / self.cell).floor() as i64);
        let reach = (r / self.cell).ceil() as i64;
        for i in cx - reach..=cx + reach {
            for j in cy - reach..=cy + reach {
                if let Some(b) = self.buckets.get(&(i, j)) {
                    if b.iter().any(|&(px, py)| (px - x).hypot(py - y) <= r) {
                        return true;
                    }
                }
            }
        }
        false
    }
}
