//! SVG output for tilings, configurations and supertiling overlays.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ground_state::{vacant_edges, Configuration};
use crate::graph::{Parity, SiteGraph};
use crate::partition::Partition;
use crate::substitution::{SeedKind, TileKind, Tiling};
use crate::supertiling::{RkttGraph, SupertilingGraph};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RenderStyle {
    pub even_color: String,
    pub odd_color: String,
    pub yellow_color: String,
    pub edge_color: String,
    pub thin_fill: String,
    pub thick_fill: String,
    pub supertiling_color: String,
    pub rktt_color: String,
    pub dot_radius: f64,
    pub edge_width: f64,
    pub yellow_width: f64,
    pub overlay_width: f64,
    /// Pixels per unit edge.
    pub scale: f64,
}

impl Default for RenderStyle {
    fn default() -> Self {
        RenderStyle {
            even_color: "#1f4fd8".into(),
            odd_color: "#d62728".into(),
            yellow_color: "#f2c200".into(),
            edge_color: "#8c8c8c".into(),
            thin_fill: "#e4e4e4".into(),
            thick_fill: "#f8f8f8".into(),
            supertiling_color: "#1f4fd8".into(),
            rktt_color: "#d62728".into(),
            dot_radius: 0.14,
            edge_width: 0.04,
            yellow_width: 0.12,
            overlay_width: 0.16,
            scale: 20.0,
        }
    }
}

impl RenderStyle {
    /// Override one field from a KEY=VALUE pair.
    pub fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        let num = || value.parse::<f64>().map_err(|_| format!("style {key} needs a number, got '{value}'"));
        match key {
            "even_color" => self.even_color = value.into(),
            "odd_color" => self.odd_color = value.into(),
            "yellow_color" => self.yellow_color = value.into(),
            "edge_color" => self.edge_color = value.into(),
            "thin_fill" => self.thin_fill = value.into(),
            "thick_fill" => self.thick_fill = value.into(),
            "supertiling_color" => self.supertiling_color = value.into(),
            "rktt_color" => self.rktt_color = value.into(),
            "dot_radius" => self.dot_radius = num()?,
            "edge_width" => self.edge_width = num()?,
            "yellow_width" => self.yellow_width = num()?,
            "overlay_width" => self.overlay_width = num()?,
            "scale" => self.scale = num()?,
            _ => return Err(format!("unknown style key '{key}'")),
        }
        Ok(())
    }
}

/// `{seed}_{k}_{layer}.svg`
pub fn file_name(seed: SeedKind, k: u32, layer: &str) -> String {
    format!("{}_{}_{}.svg", seed.name(), k, layer)
}

struct Canvas {
    pts: Vec<(f64, f64)>,
    scale: f64,
    out: String,
}

impl Canvas {
    fn new(t: &Tiling, style: &RenderStyle) -> Self {
        let pts: Vec<(f64, f64)> = t
            .vertices
            .iter()
            .map(|p| {
                let (x, y) = p.to_cartesian();
                (x, -y)
            })
            .collect();
        let (mut x0, mut y0, mut x1, mut y1) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
        if let Some(&(x, y)) = pts.first() {
            (x0, y0, x1, y1) = (x, y, x, y);
        }
        for &(x, y) in &pts {
            x0 = x0.min(x);
            y0 = y0.min(y);
            x1 = x1.max(x);
            y1 = y1.max(y);
        }
        let m = 2.0;
        let s = style.scale;
        let (w, h) = ((x1 - x0 + 2.0 * m) * s, (y1 - y0 + 2.0 * m) * s);
        let mut out = String::new();
        out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
        let _ = writeln!(
            out,
            "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{w:.2}\" height=\"{h:.2}\" viewBox=\"{:.3} {:.3} {w:.2} {h:.2}\">",
            (x0 - m) * s,
            (y0 - m) * s
        );
        Canvas { pts, scale: s, out }
    }

    fn xy(&self, v: u32) -> (f64, f64) {
        let (x, y) = self.pts[v as usize];
        (x * self.scale, y * self.scale)
    }

    fn rhombi(&mut self, t: &Tiling, style: &RenderStyle) {
        self.out.push_str("<g id=\"tiling\">\n");
        for r in &t.rhombi {
            let (cls, fill) = match r.kind {
                TileKind::Thin => ("thin", &style.thin_fill),
                TileKind::Thick => ("thick", &style.thick_fill),
            };
            let pts: Vec<String> = r
                .vertices
                .iter()
                .map(|&v| {
                    let (x, y) = self.xy(v);
                    format!("{x:.3},{y:.3}")
                })
                .collect();
            let _ = writeln!(
                self.out,
                "<polygon class=\"{cls}\" points=\"{}\" fill=\"{fill}\" stroke=\"{}\" stroke-width=\"{:.3}\"/>",
                pts.join(" "),
                style.edge_color,
                style.edge_width * self.scale
            );
        }
        self.out.push_str("</g>\n");
    }

    fn line(&mut self, cls: &str, a: (f64, f64), b: (f64, f64), color: &str, width: f64) {
        let _ = writeln!(
            self.out,
            "<line class=\"{cls}\" x1=\"{:.3}\" y1=\"{:.3}\" x2=\"{:.3}\" y2=\"{:.3}\" stroke=\"{color}\" stroke-width=\"{:.3}\" stroke-linecap=\"round\"/>",
            a.0, a.1, b.0, b.1, width * self.scale
        );
    }

    fn finish(mut self) -> String {
        self.out.push_str("</svg>\n");
        self.out
    }
}

pub fn render_tiling(t: &Tiling, style: &RenderStyle) -> String {
    let mut c = Canvas::new(t, style);
    c.rhombi(t, style);
    c.finish()
}

/// Tiling underlay, yellow vacant edges and one dot per particle.
pub fn render_ground_state(t: &Tiling, g: &SiteGraph, conf: &Configuration, style: &RenderStyle) -> Result<String> {
    if g.len() != t.vertices.len() || conf.len() != g.len() {
        return Err(Error::InvalidTiling("graph, tiling and configuration differ in size".into()));
    }
    let mut c = Canvas::new(t, style);
    c.rhombi(t, style);
    c.out.push_str("<g id=\"yellow\">\n");
    for (a, b) in vacant_edges(conf, g) {
        let (pa, pb) = (c.xy(a), c.xy(b));
        c.line("yellow", pa, pb, &style.yellow_color, style.yellow_width);
    }
    c.out.push_str("</g>\n<g id=\"particles\">\n");
    for v in conf.occupied_ids() {
        let (x, y) = c.xy(v);
        let (cls, col) = match g.parity[v as usize] {
            Parity::Even => ("even", &style.even_color),
            Parity::Odd => ("odd", &style.odd_color),
        };
        let _ = writeln!(
            c.out,
            "<circle class=\"{cls}\" cx=\"{x:.3}\" cy=\"{y:.3}\" r=\"{:.3}\" fill=\"{col}\"/>",
            style.dot_radius * c.scale
        );
    }
    c.out.push_str("</g>\n");
    Ok(c.finish())
}

#[derive(Clone, Copy, Default)]
pub struct Layers<'a> {
    pub supertiling: Option<&'a SupertilingGraph>,
    pub rktt: Option<&'a RkttGraph>,
    pub partition: Option<&'a Partition>,
}

/// Tiling underlay with supertiling edges in blue, RKTT edges in red drawn
/// above them, and pattern boundaries in yellow on top.
pub fn render_overlay(t: &Tiling, layers: Layers, style: &RenderStyle) -> String {
    let mut c = Canvas::new(t, style);
    c.rhombi(t, style);
    let sup = |c: &Canvas, sg: &SupertilingGraph, s: u32| {
        let (x, y) = sg.scaled_point(s).to_cartesian();
        (x * c.scale, -y * c.scale)
    };
    if let Some(sg) = layers.supertiling {
        c.out.push_str("<g id=\"supertiling\">\n");
        for &(a, b) in &sg.graph.edges {
            let (pa, pb) = (sup(&c, sg, a), sup(&c, sg, b));
            c.line("supertiling", pa, pb, &style.supertiling_color, style.overlay_width);
        }
        c.out.push_str("</g>\n");
    }
    if let (Some(r), Some(sg)) = (layers.rktt, layers.supertiling) {
        c.out.push_str("<g id=\"rktt\">\n");
        for e in &r.edges {
            let (pa, pb) = (sup(&c, sg, e.a), sup(&c, sg, e.b));
            c.line("rktt", pa, pb, &style.rktt_color, style.overlay_width);
        }
        c.out.push_str("</g>\n");
    }
    if let Some(p) = layers.partition {
        c.out.push_str("<g id=\"boundaries\">\n");
        let mut drawn = std::collections::BTreeSet::new();
        for inst in &p.patterns {
            for &(a, b) in &inst.yellow_edges {
                if drawn.insert((a, b)) {
                    let (pa, pb) = (c.xy(a), c.xy(b));
                    c.line("yellow", pa, pb, &style.yellow_color, style.yellow_width);
                }
            }
        }
        c.out.push_str("</g>\n");
    }
    c.finish()
}
