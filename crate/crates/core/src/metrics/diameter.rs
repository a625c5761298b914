//! Exact graph diameter.
//!
//! Small components are handled by a BFS from every vertex. Larger ones take
//! a double-sweep lower bound and a central vertex, then evaluate
//! eccentricities from the outermost BFS level inwards until the remaining
//! pairs cannot beat the bound. Both methods are exact. BFS runs 64 sources
//! at a time, one bit per source.

use std::collections::VecDeque;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::graph::{EdgeKind, EvolvingGraph, VertexId};

/// Components up to this size are solved by all-sources BFS.
pub const EXHAUSTIVE_LIMIT: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiameterMode {
    /// Diameter of the whole graph; when it is disconnected only the largest
    /// component is measured.
    Exact,
    /// Diameter of every component.
    ComponentWise,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiameterMethod {
    AllSourcesBfs,
    EccentricityBounds,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentDiameter {
    /// Smallest vertex id in the component.
    pub representative: VertexId,
    pub size: usize,
    pub diameter: u32,
    pub method: DiameterMethod,
    /// Number of BFS sources evaluated.
    pub sweeps: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiameterReport {
    pub mode: DiameterMode,
    pub connected: bool,
    pub component_count: usize,
    /// Whole-graph diameter; `None` when the graph is disconnected.
    pub diameter: Option<u32>,
    /// Measured components, largest first.
    pub components: Vec<ComponentDiameter>,
}

impl DiameterReport {
    pub fn largest_component(&self) -> Option<&ComponentDiameter> {
        self.components.first()
    }
}

/// An undirected simple graph over local ids `0..n`.
#[derive(Debug, Clone)]
pub(crate) struct LocalGraph {
    offsets: Vec<usize>,
    targets: Vec<u32>,
}

impl LocalGraph {
    /// Builds the subgraph induced by `members`, keeping edges accepted by
    /// `keep`, with neighbour lists deduplicated.
    pub(crate) fn induced<F: Fn(EdgeKind) -> bool>(
        g: &EvolvingGraph,
        members: &[VertexId],
        local: &[u32],
        keep: F,
    ) -> Self {
        let adj = g.adjacency();
        let mut offsets = Vec::with_capacity(members.len() + 1);
        let mut targets = Vec::new();
        offsets.push(0);
        for &v in members {
            let start = targets.len();
            targets.extend(
                adj.neighbors_with_kind(v)
                    .filter(|&(_, kind)| keep(kind))
                    .map(|(w, _)| local[w]),
            );
            targets[start..].sort_unstable();
            let mut write = start;
            for read in start..targets.len() {
                if write == start || targets[read] != targets[write - 1] {
                    targets[write] = targets[read];
                    write += 1;
                }
            }
            targets.truncate(write);
            offsets.push(targets.len());
        }
        Self { offsets, targets }
    }

    pub(crate) fn len(&self) -> usize {
        self.offsets.len() - 1
    }

    pub(crate) fn neighbors(&self, v: usize) -> &[u32] {
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    pub(crate) fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    /// Fills `dist` with BFS distances from `source` (`u32::MAX` for
    /// unreachable) and returns the eccentricity within the reached set.
    pub(crate) fn bfs(&self, source: usize, dist: &mut [u32], queue: &mut VecDeque<u32>) -> u32 {
        dist.fill(u32::MAX);
        dist[source] = 0;
        queue.clear();
        queue.push_back(source as u32);
        let mut ecc = 0;
        while let Some(v) = queue.pop_front() {
            let d = dist[v as usize];
            ecc = d;
            for &w in self.neighbors(v as usize) {
                if dist[w as usize] == u32::MAX {
                    dist[w as usize] = d + 1;
                    queue.push_back(w);
                }
            }
        }
        ecc
    }
}

/// Connected components over non-loop edges of any kind, largest first
/// (ties by smallest member), members ascending.
pub fn connected_components(g: &EvolvingGraph) -> Vec<Vec<VertexId>> {
    let n = g.vertex_count();
    let adj = g.adjacency();
    let mut seen = vec![false; n];
    let mut comps = Vec::new();
    let mut queue = VecDeque::new();
    for s in 0..n {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut comp = vec![s];
        queue.push_back(s);
        while let Some(v) = queue.pop_front() {
            for &w in adj.neighbors(v) {
                if !seen[w] {
                    seen[w] = true;
                    comp.push(w);
                    queue.push_back(w);
                }
            }
        }
        comp.sort_unstable();
        comps.push(comp);
    }
    comps.sort_by(|a, b| b.len().cmp(&a.len()).then(a[0].cmp(&b[0])));
    comps
}

/// Eccentricity of every source within its reachable set, by bit-parallel
/// BFS over batches of 64 sources.
pub(crate) fn eccentricities(graph: &LocalGraph, sources: &[usize]) -> Vec<u32> {
    let n = graph.len();
    sources
        .par_chunks(64)
        .map_init(
            || (vec![0u64; n], vec![0u64; n], vec![0u64; n]),
            |(visited, frontier, next), batch| {
                visited.fill(0);
                frontier.fill(0);
                for (j, &s) in batch.iter().enumerate() {
                    visited[s] |= 1 << j;
                    frontier[s] |= 1 << j;
                }
                let full = u64::MAX >> (64 - batch.len());
                let mut ecc = vec![0u32; batch.len()];
                let mut level = 0;
                loop {
                    level += 1;
                    let mut any = 0u64;
                    for v in 0..n {
                        if visited[v] == full {
                            next[v] = 0;
                            continue;
                        }
                        let reach = graph
                            .neighbors(v)
                            .iter()
                            .fold(0u64, |acc, &w| acc | frontier[w as usize]);
                        let new = reach & !visited[v];
                        next[v] = new;
                        visited[v] |= new;
                        any |= new;
                    }
                    if any == 0 {
                        break;
                    }
                    let mut bits = any;
                    while bits != 0 {
                        ecc[bits.trailing_zeros() as usize] = level;
                        bits &= bits - 1;
                    }
                    std::mem::swap(frontier, next);
                }
                ecc
            },
        )
        .flatten()
        .collect()
}

fn all_sources(graph: &LocalGraph) -> (u32, usize) {
    let n = graph.len();
    let sources: Vec<usize> = (0..n).collect();
    let diameter = eccentricities(graph, &sources).into_iter().max().unwrap_or(0);
    (diameter, n)
}

/// Walks from `far` towards the BFS source recorded in `dist` and returns
/// the vertex at distance `dist[far] / 2` from the source.
fn midpoint(graph: &LocalGraph, dist: &[u32], far: usize) -> usize {
    let target = dist[far] / 2;
    let mut v = far;
    while dist[v] > target {
        v = graph
            .neighbors(v)
            .iter()
            .map(|&w| w as usize)
            .find(|&w| dist[w] + 1 == dist[v])
            .expect("BFS predecessor");
    }
    v
}

fn farthest(dist: &[u32]) -> usize {
    (0..dist.len())
        .max_by_key(|&v| (dist[v], std::cmp::Reverse(v)))
        .unwrap()
}

/// Exact diameter of a connected graph by fringe sweeps.
///
/// Two double sweeps give a lower bound `lb` and a central vertex `u`.
/// Vertices are then taken in decreasing distance from `u`, contributing
/// their eccentricities to `lb`. Once every vertex beyond level `i` is done,
/// any remaining pair lies within level `i` of `u` and so is at most `2i`
/// apart; the search stops as soon as `lb >= 2i`.
pub(crate) fn bounded_eccentricity(graph: &LocalGraph) -> (u32, usize) {
    let n = graph.len();
    if n <= 1 {
        return (0, 0);
    }
    let mut dist = vec![0u32; n];
    let mut queue = VecDeque::new();
    let mut sweeps = 0;
    let mut bfs = |s: usize, dist: &mut [u32]| {
        sweeps += 1;
        graph.bfs(s, dist, &mut queue)
    };

    let start = (0..n).max_by_key(|&v| (graph.degree(v), std::cmp::Reverse(v))).unwrap();
    bfs(start, &mut dist);
    let a1 = farthest(&dist);
    let mut lb = bfs(a1, &mut dist);
    let r2 = midpoint(graph, &dist, farthest(&dist));
    bfs(r2, &mut dist);
    let a2 = farthest(&dist);
    lb = lb.max(bfs(a2, &mut dist));
    let u = midpoint(graph, &dist, farthest(&dist));
    lb = lb.max(bfs(u, &mut dist));

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| (std::cmp::Reverse(dist[v]), v));
    let mut done = 0;
    // 64 sources cost about as much as one
    while done < n && lb < 2 * dist[order[done]] {
        let batch = &order[done..(done + 64).min(n)];
        lb = lb.max(eccentricities(graph, batch).into_iter().max().unwrap_or(0));
        sweeps += batch.len();
        done += batch.len();
    }
    (lb, sweeps)
}

fn measure(g: &EvolvingGraph, members: &[VertexId], local: &mut [u32]) -> ComponentDiameter {
    for (i, &v) in members.iter().enumerate() {
        local[v] = i as u32;
    }
    let graph = LocalGraph::induced(g, members, local, |_| true);
    let (diameter, sweeps, method) = if members.len() <= EXHAUSTIVE_LIMIT {
        let (d, s) = all_sources(&graph);
        (d, s, DiameterMethod::AllSourcesBfs)
    } else {
        let (d, s) = bounded_eccentricity(&graph);
        (d, s, DiameterMethod::EccentricityBounds)
    };
    ComponentDiameter {
        representative: members[0],
        size: members.len(),
        diameter,
        method,
        sweeps,
    }
}

/// Exact diameter over non-loop edges of every kind.
pub fn diameter(g: &EvolvingGraph, mode: DiameterMode) -> DiameterReport {
    let comps = connected_components(g);
    let connected = comps.len() <= 1;
    let mut local = vec![0u32; g.vertex_count()];
    let measured: Vec<&Vec<VertexId>> = match mode {
        DiameterMode::Exact => comps.iter().take(1).collect(),
        DiameterMode::ComponentWise => comps.iter().collect(),
    };
    let components: Vec<ComponentDiameter> = measured
        .into_iter()
        .map(|members| measure(g, members, &mut local))
        .collect();
    DiameterReport {
        mode,
        connected,
        component_count: comps.len(),
        diameter: if connected {
            Some(components.first().map_or(0, |c| c.diameter))
        } else {
            None
        },
        components,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere::SpherePoint;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn graph_from(n: usize, edges: &[(usize, usize)]) -> EvolvingGraph {
        let mut g = EvolvingGraph::new();
        for _ in 0..n {
            g.add_vertex(SpherePoint::north_pole());
        }
        for &(a, b) in edges {
            g.add_edge(a, b, EdgeKind::Plain).unwrap();
        }
        g
    }

    fn path(n: usize) -> EvolvingGraph {
        graph_from(n, &(1..n).map(|i| (i - 1, i)).collect::<Vec<_>>())
    }

    /// Floyd-Warshall over the raw edge list.
    fn brute_diameters(g: &EvolvingGraph) -> Vec<u32> {
        let n = g.vertex_count();
        let inf = u32::MAX / 4;
        let mut d = vec![vec![inf; n]; n];
        for (i, row) in d.iter_mut().enumerate() {
            row[i] = 0;
        }
        for e in g.edges() {
            d[e.src][e.dst] = d[e.src][e.dst].min(if e.is_loop() { 0 } else { 1 });
            d[e.dst][e.src] = d[e.src][e.dst];
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let via = d[i][k] + d[k][j];
                    if via < d[i][j] {
                        d[i][j] = via;
                    }
                }
            }
        }
        let comps = connected_components(g);
        comps
            .iter()
            .map(|c| {
                c.iter()
                    .flat_map(|&a| c.iter().map(move |&b| (a, b)))
                    .map(|(a, b)| d[a][b])
                    .max()
                    .unwrap()
            })
            .collect()
    }

    #[test]
    fn paths_and_stars() {
        assert_eq!(diameter(&path(5), DiameterMode::Exact).diameter, Some(4));
        for n in 1..=200 {
            assert_eq!(diameter(&path(n), DiameterMode::Exact).diameter, Some(n as u32 - 1));
        }
        let star = graph_from(8, &(1..8).map(|i| (0, i)).collect::<Vec<_>>());
        assert_eq!(diameter(&star, DiameterMode::Exact).diameter, Some(2));
    }

    #[test]
    fn disconnected_graphs_are_flagged() {
        let g = graph_from(6, &[(0, 1), (1, 2), (3, 4)]);
        let exact = diameter(&g, DiameterMode::Exact);
        assert!(!exact.connected);
        assert_eq!(exact.diameter, None);
        assert_eq!(exact.component_count, 3);
        assert_eq!(exact.components.len(), 1);
        assert_eq!(exact.components[0].diameter, 2);
        let each = diameter(&g, DiameterMode::ComponentWise);
        let diams: Vec<_> = each.components.iter().map(|c| (c.size, c.diameter)).collect();
        assert_eq!(diams, vec![(3, 2), (2, 1), (1, 0)]);
    }

    #[test]
    fn random_graphs_match_floyd_warshall() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..60 {
            let n = rng.gen_range(1..=100);
            let e = rng.gen_range(0..2 * n);
            let edges: Vec<_> = (0..e).map(|_| (rng.gen_range(0..n), rng.gen_range(0..n))).collect();
            let g = graph_from(n, &edges);
            let report = diameter(&g, DiameterMode::ComponentWise);
            let got: Vec<_> = report.components.iter().map(|c| c.diameter).collect();
            assert_eq!(got, brute_diameters(&g));
        }
    }

    #[test]
    fn bit_parallel_matches_single_bfs() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let n = rng.gen_range(1..=300);
            let edges: Vec<_> = (0..rng.gen_range(0..2 * n))
                .map(|_| (rng.gen_range(0..n), rng.gen_range(0..n)))
                .collect();
            let g = graph_from(n, &edges);
            let members: Vec<_> = (0..n).collect();
            let local: Vec<u32> = (0..n as u32).collect();
            let lg = LocalGraph::induced(&g, &members, &local, |_| true);
            let mut dist = vec![0; n];
            let mut queue = VecDeque::new();
            let single: Vec<u32> = (0..n).map(|s| lg.bfs(s, &mut dist, &mut queue)).collect();
            assert_eq!(eccentricities(&lg, &members), single);
        }
    }

    #[test]
    fn bounding_agrees_with_all_sources() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for trial in 0..30 {
            let n = rng.gen_range(2..=400);
            // random tree plus extra edges keeps it connected
            let mut edges: Vec<_> = (1..n).map(|i| (i, rng.gen_range(0..i))).collect();
            for _ in 0..rng.gen_range(0..n) {
                edges.push((rng.gen_range(0..n), rng.gen_range(0..n)));
            }
            let g = graph_from(n, &edges);
            let members: Vec<_> = (0..n).collect();
            let local: Vec<u32> = (0..n as u32).collect();
            let lg = LocalGraph::induced(&g, &members, &local, |_| true);
            assert_eq!(bounded_eccentricity(&lg).0, all_sources(&lg).0, "trial {trial}");
        }
    }
}
