//! Plain adjacency-list graphs, used for induced subgraphs of tori and for
//! the small test graphs the bounds are checked on.

use crate::error::{domain, Error, Result};
use crate::torus::VertexId;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenericGraph {
    adj: Vec<Vec<usize>>,
    back_map: Option<Vec<VertexId>>,
}

impl GenericGraph {
    /// Builds a simple graph; duplicate edges collapse, loops are rejected.
    pub fn from_edges(vertex_count: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut adj = vec![Vec::new(); vertex_count];
        for &(u, v) in edges {
            if u >= vertex_count || v >= vertex_count {
                return Err(domain(format!("edge ({u},{v}) outside {vertex_count} vertices")));
            }
            if u == v {
                return Err(domain(format!("self-loop at {u}")));
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        Ok(GenericGraph {
            adj,
            back_map: None,
        })
    }

    pub(crate) fn from_adjacency(adj: Vec<Vec<usize>>, back_map: Option<Vec<VertexId>>) -> Self {
        GenericGraph { adj, back_map }
    }

    pub fn empty(vertex_count: usize) -> Self {
        GenericGraph {
            adj: vec![Vec::new(); vertex_count],
            back_map: None,
        }
    }

    pub fn path(k: usize) -> Self {
        let edges: Vec<_> = (1..k).map(|i| (i - 1, i)).collect();
        Self::from_edges(k, &edges).unwrap()
    }

    /// The cycle C_k (k >= 3).
    pub fn cycle(k: usize) -> Self {
        assert!(k >= 3);
        let edges: Vec<_> = (0..k).map(|i| (i, (i + 1) % k)).collect();
        Self::from_edges(k, &edges).unwrap()
    }

    pub fn complete(k: usize) -> Self {
        let mut edges = Vec::new();
        for i in 0..k {
            for j in i + 1..k {
                edges.push((i, j));
            }
        }
        Self::from_edges(k, &edges).unwrap()
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, l)| l.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    /// Original torus vertex of each relabelled vertex, for induced subgraphs.
    pub fn back_map(&self) -> Option<&[VertexId]> {
        self.back_map.as_deref()
    }

    /// True when no two edges share an endpoint.
    pub fn is_matching(&self) -> bool {
        self.adj.iter().all(|l| l.len() <= 1)
    }

    pub fn is_connected(&self) -> bool {
        let k = self.vertex_count();
        if k == 0 {
            return true;
        }
        let mut seen = vec![false; k];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = stack.pop() {
            for &v in &self.adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    count += 1;
                    stack.push(v);
                }
            }
        }
        count == k
    }

    /// Per-vertex neighbour bitmasks; graphs above 127 vertices are refused
    /// so that subset counts always fit a `u128`.
    pub fn neighbor_masks(&self) -> Result<Vec<u128>> {
        if self.vertex_count() > 127 {
            return Err(Error::CapExceeded {
                what: "vertex count for bitmask enumeration",
                value: self.vertex_count() as u128,
                limit: 127,
                hint: "use the transfer-matrix counter for large tori".into(),
            });
        }
        Ok(self
            .adj
            .iter()
            .map(|l| l.iter().fold(0u128, |m, &v| m | 1 << v))
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_shapes() {
        let c5 = GenericGraph::cycle(5);
        assert_eq!(c5.edge_count(), 5);
        assert_eq!(c5.max_degree(), 2);
        assert!(c5.is_connected());
        assert!(!c5.is_matching());
        assert_eq!(GenericGraph::complete(4).edge_count(), 6);
        assert_eq!(GenericGraph::path(1).edge_count(), 0);
        assert!(!GenericGraph::empty(2).is_connected());
        let m = GenericGraph::from_edges(4, &[(0, 1), (2, 3), (1, 0)]).unwrap();
        assert_eq!(m.edge_count(), 2);
        assert!(m.is_matching());
    }

    #[test]
    fn rejects_bad_edges() {
        assert!(GenericGraph::from_edges(3, &[(0, 3)]).is_err());
        assert!(GenericGraph::from_edges(3, &[(1, 1)]).is_err());
    }
}
