//! Geometric neighbourhoods `C_R(v) = B_R(v) ∩ V` and their community
//! quality: size, induced connectivity, conductance, long-degree mass and
//! expander scans over a range of radii.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{EvolvingGraph, VertexId};
use crate::index::CapIndex;
use crate::sphere::AngularRadius;

/// A frozen graph together with a spatial index over its vertices.
#[derive(Debug)]
pub struct SpatialView<'g> {
    graph: &'g EvolvingGraph,
    index: CapIndex,
}

/// Thresholds a neighbourhood must meet to be certified as a community.
///
/// The size bound is applied separately from the conductance bound: the
/// caller evaluates `(ln n)^gamma` (times whatever constant it wants) and
/// passes it as `size_cap`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CommunityCriteria {
    pub alpha: f64,
    pub beta: f64,
    pub size_cap: f64,
    /// Smallest accepted community size.
    pub min_size: usize,
}

impl CommunityCriteria {
    pub fn new(alpha: f64, beta: f64, size_cap: f64) -> Self {
        Self {
            alpha,
            beta,
            size_cap,
            min_size: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommunityReport {
    pub center: VertexId,
    pub radius: f64,
    pub size: usize,
    pub connected: bool,
    pub conductance: f64,
    pub criteria: CommunityCriteria,
    /// `connected && conductance <= alpha / size^beta && min_size <= size <= size_cap`.
    pub satisfies: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanEntry {
    pub center: VertexId,
    pub size: usize,
    pub conductance: Option<f64>,
    /// Why the conductance is undefined, when it is.
    pub skipped: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadiusScan {
    pub radius: f64,
    pub entries: Vec<ScanEntry>,
    pub defined: usize,
    pub min: Option<f64>,
    pub median: Option<f64>,
    pub max: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpanderScan {
    pub radii: Vec<RadiusScan>,
}

/// Median of a non-empty sample (mean of the two middle values for even
/// sizes).
pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    Some(if v.len() % 2 == 1 {
        v[mid]
    } else {
        0.5 * (v[mid - 1] + v[mid])
    })
}

impl<'g> SpatialView<'g> {
    /// Indexes `graph` with cells holding about eight vertices each.
    pub fn new(graph: &'g EvolvingGraph) -> Self {
        let n = graph.vertex_count().max(1) as f64;
        Self::with_cell_size(graph, (32.0 * PI / n).sqrt())
    }

    pub fn with_cell_size(graph: &'g EvolvingGraph, cell_size: f64) -> Self {
        let index = crate::generators::index_graph(graph, cell_size);
        Self { graph, index }
    }

    pub fn graph(&self) -> &'g EvolvingGraph {
        self.graph
    }

    pub fn index(&self) -> &CapIndex {
        &self.index
    }

    /// Vertices within angular distance `radius` of vertex `v`, ascending.
    pub fn r_neighborhood(&self, v: VertexId, radius: AngularRadius) -> Result<Vec<VertexId>> {
        let center = self.graph.position(v)?;
        Ok(self.index.query_cap(center, radius))
    }

    /// Size, connectivity and conductance of `C_R(v)`, certified against
    /// `criteria`.
    pub fn community_check(
        &self,
        v: VertexId,
        radius: AngularRadius,
        criteria: CommunityCriteria,
    ) -> Result<CommunityReport> {
        let members = self.r_neighborhood(v, radius)?;
        let conductance = self.graph.conductance(&members)?;
        let connected = self.graph.induced_connected(&members)?;
        let size = members.len();
        let satisfies = connected
            && conductance <= criteria.alpha / (size as f64).powf(criteria.beta)
            && size >= criteria.min_size
            && size as f64 <= criteria.size_cap;
        Ok(CommunityReport {
            center: v,
            radius: radius.value(),
            size,
            connected,
            conductance,
            criteria,
            satisfies,
        })
    }

    /// Sum of long degrees over `C_R(v)`.
    pub fn long_degree_sum(&self, v: VertexId, radius: AngularRadius) -> Result<u64> {
        Ok(self
            .r_neighborhood(v, radius)?
            .into_iter()
            .map(|u| self.graph.vertices()[u].long_degree() as u64)
            .sum())
    }

    fn scan_one(&self, v: VertexId, radius: f64) -> Result<ScanEntry> {
        if !(radius > 0.0 && radius < PI) {
            return Ok(ScanEntry {
                center: v,
                size: if radius >= PI { self.graph.vertex_count() } else { 0 },
                conductance: None,
                skipped: Some(format!("radius {radius} outside (0, pi)")),
            });
        }
        let members = self.r_neighborhood(v, AngularRadius::new(radius)?)?;
        let size = members.len();
        Ok(match self.graph.conductance(&members) {
            Ok(phi) => ScanEntry {
                center: v,
                size,
                conductance: Some(phi),
                skipped: None,
            },
            Err(e @ (Error::WholeSet | Error::EmptySet | Error::ZeroVolume)) => ScanEntry {
                center: v,
                size,
                conductance: None,
                skipped: Some(e.to_string()),
            },
            Err(e) => return Err(e),
        })
    }

    /// `Phi(C_R(v))` for every centre and radius, with per-radius summaries.
    /// Degenerate neighbourhoods are kept with a reason and left out of the
    /// summary statistics.
    pub fn expander_scan(&self, centers: &[VertexId], radii: &[f64]) -> Result<ExpanderScan> {
        let radii = radii
            .iter()
            .map(|&radius| {
                let entries = centers
                    .par_iter()
                    .map(|&v| self.scan_one(v, radius))
                    .collect::<Result<Vec<_>>>()?;
                let values: Vec<f64> = entries.iter().filter_map(|e| e.conductance).collect();
                Ok(RadiusScan {
                    radius,
                    defined: values.len(),
                    min: values.iter().copied().reduce(f64::min),
                    median: median(&values),
                    max: values.iter().copied().reduce(f64::max),
                    entries,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ExpanderScan { radii })
    }
}
