//! The whole construction for one seed and depth, built in order.

use crate::error::Result;
use crate::graph::{build_graph, AtlasClass, SiteGraph};
use crate::ground_state::{perfect_configuration, Configuration};
use crate::partition::{partition_patches, Partition};
use crate::substitution::{generate, SeedKind, Tiling};
use crate::supertiling::{build_supertiling, derive_rktt, RkttGraph, SupertilingGraph};

pub struct Patch {
    pub tiling: Tiling,
    pub graph: SiteGraph,
    pub classes: Vec<AtlasClass>,
}

impl Patch {
    pub fn new(seed: SeedKind, k: u32) -> Result<Self> {
        let tiling = generate(seed, k);
        let graph = build_graph(&tiling)?;
        let classes = graph.classify_all()?;
        Ok(Patch { tiling, graph, classes })
    }
}

/// A patch with its supertiling, RKTT, partition and ground state. Needs k ≥ 4.
pub struct Pipeline {
    pub patch: Patch,
    pub supertiling: SupertilingGraph,
    pub rktt: RkttGraph,
    pub partition: Partition,
    pub ground: Configuration,
}

impl Pipeline {
    pub fn new(seed: SeedKind, k: u32) -> Result<Self> {
        Pipeline::from_patch(Patch::new(seed, k)?)
    }

    pub fn from_patch(patch: Patch) -> Result<Self> {
        let supertiling = build_supertiling(&patch.tiling, &patch.graph)?;
        let rktt = derive_rktt(&supertiling)?;
        let partition = partition_patches(&patch.graph, &supertiling)?;
        let ground = perfect_configuration(&partition, &patch.graph)?;
        Ok(Pipeline { patch, supertiling, rktt, partition, ground })
    }
}
