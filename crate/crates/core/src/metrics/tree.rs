//! Statistics of the recursive tree embedded in the generalised models:
//! long edges of the hybrid model, flexible edges of the self-loop model.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::diameter::LocalGraph;
use crate::error::{Error, Result};
use crate::graph::{EdgeKind, EvolvingGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TreeEdges {
    Long,
    Flexible,
}

impl TreeEdges {
    fn kind(self) -> EdgeKind {
        match self {
            TreeEdges::Long => EdgeKind::Long,
            TreeEdges::Flexible => EdgeKind::FlexibleEdge,
        }
    }

    fn label(self) -> &'static str {
        match self {
            TreeEdges::Long => "long-edge",
            TreeEdges::Flexible => "flexible-edge",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeStats {
    pub vertices: usize,
    pub diameter: u32,
    pub max_degree: usize,
}

/// Diameter and maximum degree of the spanning tree formed by the `which`
/// edges. Fails with [`Error::NotATree`] if those edges do not form a
/// spanning tree (wrong edge count, a cycle or a disconnection).
pub fn urt_stats(g: &EvolvingGraph, which: TreeEdges) -> Result<TreeStats> {
    let n = g.vertex_count();
    let kind = which.kind();
    let not_tree = |reason: String| Error::NotATree {
        kind: which.label(),
        reason,
    };
    if n == 0 {
        return Err(not_tree("graph has no vertices".into()));
    }
    let edges = g.edges().iter().filter(|e| e.kind == kind).count();
    if edges != n - 1 {
        return Err(not_tree(format!("{edges} edges on {n} vertices")));
    }
    let members: Vec<usize> = (0..n).collect();
    let local: Vec<u32> = (0..n as u32).collect();
    let tree = LocalGraph::induced(g, &members, &local, |k| k == kind);
    let mut dist = vec![0u32; n];
    let mut queue = VecDeque::new();
    tree.bfs(0, &mut dist, &mut queue);
    if dist.contains(&u32::MAX) {
        return Err(not_tree("edges do not span every vertex".into()));
    }
    // n - 1 edges spanning n vertices leaves no room for cycles or parallels
    let far = (0..n).max_by_key(|&v| (dist[v], std::cmp::Reverse(v))).unwrap();
    let diameter = tree.bfs(far, &mut dist, &mut queue);
    let max_degree = g
        .vertices()
        .iter()
        .map(|r| match which {
            TreeEdges::Long => r.long_degree(),
            TreeEdges::Flexible => r.flexible_edge_degree(),
        })
        .max()
        .unwrap_or(0);
    Ok(TreeStats {
        vertices: n,
        diameter,
        max_degree,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{generate, ModelConfig, ModelKind};
    use crate::sphere::SpherePoint;

    fn long_graph(n: usize, edges: &[(usize, usize)]) -> EvolvingGraph {
        let mut g = EvolvingGraph::new();
        for _ in 0..n {
            g.add_vertex(SpherePoint::north_pole());
        }
        for &(a, b) in edges {
            g.add_edge(a, b, EdgeKind::Long).unwrap();
        }
        g
    }

    #[test]
    fn hybrid_pair() {
        let cfg = ModelConfig::new(ModelKind::Hybrid, 2, 3, 1.0, 0.3, 0).unwrap();
        let (g, _) = generate(&cfg).unwrap();
        let s = urt_stats(&g, TreeEdges::Long).unwrap();
        assert_eq!((s.diameter, s.max_degree), (1, 1));
    }

    #[test]
    fn star_tree() {
        let n = 50;
        let g = long_graph(n, &(1..n).map(|i| (i, 0)).collect::<Vec<_>>());
        let s = urt_stats(&g, TreeEdges::Long).unwrap();
        assert_eq!(s.max_degree, n - 1);
        assert_eq!(s.diameter, 2);
    }

    #[test]
    fn non_trees_are_reported() {
        let cycle_plus_isolated = long_graph(4, &[(0, 1), (1, 2), (2, 0)]);
        assert!(matches!(
            urt_stats(&cycle_plus_isolated, TreeEdges::Long),
            Err(Error::NotATree { .. })
        ));
        let too_few = long_graph(4, &[(0, 1), (1, 2)]);
        assert!(urt_stats(&too_few, TreeEdges::Long).is_err());
        let base = generate(&ModelConfig::new(ModelKind::Base, 10, 1, 1.0, 0.3, 0).unwrap())
            .unwrap()
            .0;
        assert!(urt_stats(&base, TreeEdges::Long).is_err());
    }

    #[test]
    fn generalised_models_embed_spanning_trees() {
        let (h, _) = generate(&ModelConfig::new(ModelKind::Hybrid, 4000, 2, 1.0, 0.1, 3).unwrap()).unwrap();
        let s = urt_stats(&h, TreeEdges::Long).unwrap();
        assert_eq!(s.vertices, 4000);
        let (sl, _) = generate(&ModelConfig::new(ModelKind::SelfLoop, 4000, 4, 1.0, 0.1, 3).unwrap()).unwrap();
        let s = urt_stats(&sl, TreeEdges::Flexible).unwrap();
        // each vertex spends one loop on its own edge, so at most delta
        assert!(s.max_degree <= 4);
    }
}
