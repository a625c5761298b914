//! The evolving multigraph with typed edges.
//!
//! Parallel edges are stored individually and self-loops contribute 1 to the
//! degree of their vertex. Flexible self-loops of the self-loop model are not
//! materialised as edges; each vertex carries a count of them instead.

use std::collections::VecDeque;
use std::io::Write;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sphere::SpherePoint;

/// Birth rank of a vertex, starting at 0.
pub type VertexId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeKind {
    /// Local contact (or any edge of the base model), including the plain
    /// self-loops of an isolated birth.
    Plain,
    /// Long contact of the hybrid model.
    Long,
    /// Rewired edge of the self-loop model.
    FlexibleEdge,
}

impl EdgeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EdgeKind::Plain => "plain",
            EdgeKind::Long => "long",
            EdgeKind::FlexibleEdge => "flexible",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub src: VertexId,
    pub dst: VertexId,
    pub kind: EdgeKind,
}

impl Edge {
    pub fn is_loop(&self) -> bool {
        self.src == self.dst
    }
}

/// Which edges a degree counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DegreeKind {
    /// Every incident edge and loop.
    Total,
    /// Plain (local) edges only. This is the attachment degree of the base
    /// and hybrid models and the non-flexible degree of the self-loop model.
    Plain,
    Long,
    /// Everything except flexible loops and flexible edges.
    NonFlexible,
    /// Flexible loops plus flexible edges.
    Flexible,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VertexRecord {
    id: VertexId,
    position: SpherePoint,
    birth_time: usize,
    plain_degree: usize,
    long_degree: usize,
    flexible_loop_count: usize,
    flexible_edge_degree: usize,
}

impl VertexRecord {
    pub fn id(&self) -> VertexId {
        self.id
    }

    pub fn position(&self) -> &SpherePoint {
        &self.position
    }

    /// Step index `t` at which the vertex was born (the first vertex is born
    /// at `t = 1`).
    pub fn birth_time(&self) -> usize {
        self.birth_time
    }

    pub fn plain_degree(&self) -> usize {
        self.plain_degree
    }

    pub fn long_degree(&self) -> usize {
        self.long_degree
    }

    pub fn flexible_loop_count(&self) -> usize {
        self.flexible_loop_count
    }

    pub fn flexible_edge_degree(&self) -> usize {
        self.flexible_edge_degree
    }

    pub fn degree(&self, kind: DegreeKind) -> usize {
        match kind {
            DegreeKind::Total => {
                self.plain_degree + self.long_degree + self.flexible_loop_count + self.flexible_edge_degree
            }
            DegreeKind::Plain => self.plain_degree,
            DegreeKind::Long => self.long_degree,
            DegreeKind::NonFlexible => self.plain_degree + self.long_degree,
            DegreeKind::Flexible => self.flexible_loop_count + self.flexible_edge_degree,
        }
    }
}

/// Per-vertex tallies recomputed from the edge list.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DegreeTally {
    pub plain: usize,
    pub long: usize,
    pub flexible_edge: usize,
}

/// Compressed neighbour lists over non-loop edges, multiplicity kept.
#[derive(Debug, Clone)]
pub struct Adjacency {
    offsets: Vec<usize>,
    targets: Vec<VertexId>,
    kinds: Vec<EdgeKind>,
}

impl Adjacency {
    fn build(n: usize, edges: &[Edge]) -> Self {
        let mut counts = vec![0usize; n + 1];
        for e in edges.iter().filter(|e| !e.is_loop()) {
            counts[e.src + 1] += 1;
            counts[e.dst + 1] += 1;
        }
        for i in 0..n {
            counts[i + 1] += counts[i];
        }
        let offsets = counts;
        let mut fill = offsets.clone();
        let total = offsets[n];
        let mut targets = vec![0; total];
        let mut kinds = vec![EdgeKind::Plain; total];
        for e in edges.iter().filter(|e| !e.is_loop()) {
            for (a, b) in [(e.src, e.dst), (e.dst, e.src)] {
                targets[fill[a]] = b;
                kinds[fill[a]] = e.kind;
                fill[a] += 1;
            }
        }
        Self {
            offsets,
            targets,
            kinds,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.offsets.len() - 1
    }

    /// Neighbours of `v`, one entry per incident non-loop edge.
    pub fn neighbors(&self, v: VertexId) -> &[VertexId] {
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    /// Neighbours with the kind of the connecting edge.
    pub fn neighbors_with_kind(&self, v: VertexId) -> impl Iterator<Item = (VertexId, EdgeKind)> + '_ {
        let range = self.offsets[v]..self.offsets[v + 1];
        self.targets[range.clone()]
            .iter()
            .copied()
            .zip(self.kinds[range].iter().copied())
    }
}

#[derive(Debug, Default)]
pub struct EvolvingGraph {
    vertices: Vec<VertexRecord>,
    edges: Vec<Edge>,
    total_volume: u64,
    adjacency: OnceLock<Adjacency>,
}

impl Clone for EvolvingGraph {
    fn clone(&self) -> Self {
        Self {
            vertices: self.vertices.clone(),
            edges: self.edges.clone(),
            total_volume: self.total_volume,
            adjacency: OnceLock::new(),
        }
    }
}

impl PartialEq for EvolvingGraph {
    fn eq(&self, other: &Self) -> bool {
        self.vertices == other.vertices && self.edges == other.edges
    }
}

impl EvolvingGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(vertices: usize, edges: usize) -> Self {
        Self {
            vertices: Vec::with_capacity(vertices),
            edges: Vec::with_capacity(edges),
            ..Self::default()
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> &[VertexRecord] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn vertex(&self, v: VertexId) -> Result<&VertexRecord> {
        self.vertices.get(v).ok_or(Error::UnknownVertex(v))
    }

    pub fn position(&self, v: VertexId) -> Result<&SpherePoint> {
        self.vertex(v).map(VertexRecord::position)
    }

    /// Appends a vertex with no incident edges; its id is its birth rank.
    pub fn add_vertex(&mut self, position: SpherePoint) -> VertexId {
        let id = self.vertices.len();
        self.vertices.push(VertexRecord {
            id,
            position,
            birth_time: id + 1,
            plain_degree: 0,
            long_degree: 0,
            flexible_loop_count: 0,
            flexible_edge_degree: 0,
        });
        self.adjacency.take();
        id
    }

    pub fn add_edge(&mut self, src: VertexId, dst: VertexId, kind: EdgeKind) -> Result<()> {
        let n = self.vertices.len();
        for v in [src, dst] {
            if v >= n {
                return Err(Error::UnknownVertex(v));
            }
        }
        if src == dst && kind == EdgeKind::FlexibleEdge {
            return Err(Error::InvalidParameter(
                "flexible edges join two distinct vertices".into(),
            ));
        }
        let bump = |rec: &mut VertexRecord| match kind {
            EdgeKind::Plain => rec.plain_degree += 1,
            EdgeKind::Long => rec.long_degree += 1,
            EdgeKind::FlexibleEdge => rec.flexible_edge_degree += 1,
        };
        bump(&mut self.vertices[src]);
        if src != dst {
            bump(&mut self.vertices[dst]);
            self.total_volume += 2;
        } else {
            self.total_volume += 1;
        }
        self.edges.push(Edge { src, dst, kind });
        self.adjacency.take();
        Ok(())
    }

    pub fn add_flexible_loops(&mut self, v: VertexId, count: usize) -> Result<()> {
        let rec = self.vertices.get_mut(v).ok_or(Error::UnknownVertex(v))?;
        rec.flexible_loop_count += count;
        self.total_volume += count as u64;
        Ok(())
    }

    pub fn remove_flexible_loop(&mut self, v: VertexId) -> Result<()> {
        let rec = self.vertices.get_mut(v).ok_or(Error::UnknownVertex(v))?;
        if rec.flexible_loop_count == 0 {
            return Err(Error::InvalidParameter(format!("vertex {v} has no flexible self-loop")));
        }
        rec.flexible_loop_count -= 1;
        self.total_volume -= 1;
        Ok(())
    }

    pub fn degree(&self, v: VertexId, kind: DegreeKind) -> Result<usize> {
        self.vertex(v).map(|rec| rec.degree(kind))
    }

    /// Sum of total degrees over all vertices.
    pub fn total_volume(&self) -> u64 {
        self.total_volume
    }

    /// Neighbour lists of the current graph; rebuilt lazily after mutation.
    pub fn adjacency(&self) -> &Adjacency {
        self.adjacency
            .get_or_init(|| Adjacency::build(self.vertices.len(), &self.edges))
    }

    /// Recounts plain, long and flexible-edge degrees from the edge list.
    pub fn recount_degrees(&self) -> Vec<DegreeTally> {
        let mut tallies = vec![DegreeTally::default(); self.vertices.len()];
        for e in &self.edges {
            let ends: &[VertexId] = if e.is_loop() { &[e.src] } else { &[e.src, e.dst] };
            for &v in ends {
                let t = &mut tallies[v];
                match e.kind {
                    EdgeKind::Plain => t.plain += 1,
                    EdgeKind::Long => t.long += 1,
                    EdgeKind::FlexibleEdge => t.flexible_edge += 1,
                }
            }
        }
        tallies
    }

    /// True when the stored per-vertex tallies match a full recount.
    pub fn tallies_consistent(&self) -> bool {
        let volume: u64 = self.vertices.iter().map(|r| r.degree(DegreeKind::Total) as u64).sum();
        volume == self.total_volume
            && self.recount_degrees().iter().zip(&self.vertices).all(|(t, r)| {
                t.plain == r.plain_degree && t.long == r.long_degree && t.flexible_edge == r.flexible_edge_degree
            })
    }

    /// Membership mask of `set` plus the number of distinct members.
    fn mask(&self, set: &[VertexId]) -> Result<(Vec<bool>, usize)> {
        let mut mask = vec![false; self.vertices.len()];
        let mut distinct = 0;
        for &v in set {
            let slot = mask.get_mut(v).ok_or(Error::UnknownVertex(v))?;
            if !*slot {
                *slot = true;
                distinct += 1;
            }
        }
        Ok((mask, distinct))
    }

    /// `vol(S)`: sum of total degrees over the distinct members of `set`.
    pub fn volume(&self, set: &[VertexId]) -> Result<u64> {
        let (mask, _) = self.mask(set)?;
        Ok(self
            .vertices
            .iter()
            .zip(&mask)
            .filter(|(_, &inside)| inside)
            .map(|(r, _)| r.degree(DegreeKind::Total) as u64)
            .sum())
    }

    fn boundary_with_mask(&self, mask: &[bool]) -> u64 {
        let adj = self.adjacency();
        let mut count = 0u64;
        for v in (0..mask.len()).filter(|&v| mask[v]) {
            count += adj.neighbors(v).iter().filter(|&&w| !mask[w]).count() as u64;
        }
        count
    }

    /// `|e(S, S^c)|`: edges with exactly one endpoint in `set`, counted with
    /// multiplicity. Self-loops never cross.
    pub fn boundary_edge_count(&self, set: &[VertexId]) -> Result<u64> {
        let (mask, _) = self.mask(set)?;
        Ok(self.boundary_with_mask(&mask))
    }

    /// `Phi(S) = |e(S, S^c)| / min(vol(S), vol(S^c))`.
    pub fn conductance(&self, set: &[VertexId]) -> Result<f64> {
        let (mask, distinct) = self.mask(set)?;
        if distinct == 0 {
            return Err(Error::EmptySet);
        }
        if distinct == self.vertices.len() {
            return Err(Error::WholeSet);
        }
        let vol_in: u64 = self
            .vertices
            .iter()
            .zip(&mask)
            .filter(|(_, &inside)| inside)
            .map(|(r, _)| r.degree(DegreeKind::Total) as u64)
            .sum();
        let denom = vol_in.min(self.total_volume - vol_in);
        if denom == 0 {
            return Err(Error::ZeroVolume);
        }
        Ok(self.boundary_with_mask(&mask) as f64 / denom as f64)
    }

    /// Whether the subgraph induced by `set` (edges of any kind with both
    /// endpoints inside) is connected.
    pub fn induced_connected(&self, set: &[VertexId]) -> Result<bool> {
        let (mut pending, distinct) = self.mask(set)?;
        let start = *set.first().ok_or(Error::EmptySet)?;
        let adj = self.adjacency();
        pending[start] = false;
        let mut reached = 1;
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            for &w in adj.neighbors(v) {
                if pending[w] {
                    pending[w] = false;
                    reached += 1;
                    queue.push_back(w);
                }
            }
        }
        Ok(reached == distinct)
    }

    /// Edge list as CSV with header `src,dst,kind`.
    ///
    /// One row per stored edge in insertion order, followed by one
    /// `v,v,flexible_loop` row per remaining flexible self-loop (vertex
    /// order), so the file accounts for every unit of degree.
    pub fn write_edge_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "src,dst,kind")?;
        for e in &self.edges {
            writeln!(w, "{},{},{}", e.src, e.dst, e.kind.as_str())?;
        }
        for rec in &self.vertices {
            for _ in 0..rec.flexible_loop_count {
                writeln!(w, "{0},{0},flexible_loop", rec.id)?;
            }
        }
        Ok(())
    }

    /// Vertex table as CSV with header `id,colatitude,longitude,birth_time`
    /// (angles in radians).
    pub fn write_vertex_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "id,colatitude,longitude,birth_time")?;
        for rec in &self.vertices {
            writeln!(
                w,
                "{},{},{},{}",
                rec.id,
                rec.position.colatitude(),
                rec.position.longitude(),
                rec.birth_time
            )?;
        }
        Ok(())
    }
}
