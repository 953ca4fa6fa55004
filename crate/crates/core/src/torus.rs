//! The discrete torus Z_m^n for odd m.
//!
//! Vertices are indexed row-major in mixed radix with the first coordinate
//! most significant, so vertex `(v_1, .., v_n)` has index
//! `v_1 m^{n-1} + .. + v_n`. Every bit-vector layout in the crate uses this
//! order.

use std::fmt;

use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::graph::GenericGraph;
use crate::vertex_set::VertexSet;

/// Constructors refuse tori with more vertices than this.
pub const MAX_VERTICES: u64 = 1 << 31;

/// Neighbour tables are precomputed below this many adjacency entries.
const TABLE_LIMIT: usize = 1 << 22;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct VertexId(pub usize);

/// A residue class `p` in `Z_m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ClassIndex(pub u32);

impl fmt::Display for ClassIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[derive(Clone)]
pub struct TorusGraph {
    m: u32,
    n: u32,
    ell: u32,
    vertex_count: usize,
    /// `strides[j] = m^{n-1-j}`, the weight of coordinate j.
    strides: Vec<usize>,
    table: Option<Vec<u32>>,
}

impl fmt::Debug for TorusGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Z_{}^{}", self.m, self.n)
    }
}

impl PartialEq for TorusGraph {
    fn eq(&self, other: &Self) -> bool {
        self.m == other.m && self.n == other.n
    }
}

impl Eq for TorusGraph {}

impl TorusGraph {
    pub fn new(m: u32, n: u32) -> Result<Self> {
        if m < 3 || m.is_multiple_of(2) {
            return Err(domain(format!("side length must be odd and >= 3, got {m}")));
        }
        if n < 1 {
            return Err(domain("dimension must be >= 1"));
        }
        let mut count: u64 = 1;
        for _ in 0..n {
            count = count.saturating_mul(m as u64);
            if count > MAX_VERTICES {
                return Err(Error::CapExceeded {
                    what: "torus vertex count",
                    value: (m as u128).saturating_pow(n),
                    limit: MAX_VERTICES as u128,
                    hint: "choose a smaller m or n".into(),
                });
            }
        }
        let vertex_count = count as usize;
        let strides = (0..n)
            .map(|j| (m as usize).pow(n - 1 - j))
            .collect::<Vec<_>>();
        let mut g = TorusGraph {
            m,
            n,
            ell: m / 2,
            vertex_count,
            strides,
            table: None,
        };
        let deg = 2 * n as usize;
        if vertex_count.saturating_mul(deg) <= TABLE_LIMIT {
            let mut table = Vec::with_capacity(vertex_count * deg);
            for v in 0..vertex_count {
                g.for_each_neighbor_arith(v, |u| table.push(u as u32));
            }
            g.table = Some(table);
        }
        Ok(g)
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// floor(m / 2).
    pub fn ell(&self) -> u32 {
        self.ell
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    /// m^{n-1}, the size of each class and of each layer.
    pub fn class_size(&self) -> usize {
        self.vertex_count / self.m as usize
    }

    pub fn degree(&self) -> usize {
        2 * self.n as usize
    }

    /// Coordinate j (0-based, so `coord(v, 0)` is v_1).
    #[inline]
    pub fn coord(&self, v: usize, j: usize) -> u32 {
        ((v / self.strides[j]) % self.m as usize) as u32
    }

    pub fn stride(&self, j: usize) -> usize {
        self.strides[j]
    }

    pub fn encode(&self, coords: &[u32]) -> Result<VertexId> {
        if coords.len() != self.n as usize {
            return Err(domain(format!(
                "expected {} coordinates, got {}",
                self.n,
                coords.len()
            )));
        }
        let mut idx = 0usize;
        for &c in coords {
            if c >= self.m {
                return Err(domain(format!("coordinate {c} not in Z_{}", self.m)));
            }
            idx = idx * self.m as usize + c as usize;
        }
        Ok(VertexId(idx))
    }

    pub fn decode(&self, v: VertexId) -> Result<Vec<u32>> {
        self.check(v)?;
        Ok((0..self.n as usize).map(|j| self.coord(v.0, j)).collect())
    }

    pub fn check(&self, v: VertexId) -> Result<()> {
        if v.0 >= self.vertex_count {
            return Err(domain(format!(
                "vertex index {} outside Z_{}^{}",
                v.0, self.m, self.n
            )));
        }
        Ok(())
    }

    /// Moves `v` by `delta` (±1, ±2, ..) in coordinate j, modulo m.
    #[inline]
    pub fn shift(&self, v: usize, j: usize, delta: i64) -> usize {
        let m = self.m as i64;
        let c = self.coord(v, j) as i64;
        let nc = (c + delta).rem_euclid(m);
        (v as i64 + (nc - c) * self.strides[j] as i64) as usize
    }

    fn for_each_neighbor_arith(&self, v: usize, mut f: impl FnMut(usize)) {
        for j in 0..self.n as usize {
            f(self.shift(v, j, 1));
            f(self.shift(v, j, -1));
        }
    }

    /// Calls `f` on each of the 2n neighbours, coordinate by coordinate, +1
    /// before -1.
    #[inline]
    pub fn for_each_neighbor(&self, v: usize, mut f: impl FnMut(usize)) {
        match &self.table {
            Some(t) => {
                let d = self.degree();
                for &u in &t[v * d..(v + 1) * d] {
                    f(u as usize);
                }
            }
            None => self.for_each_neighbor_arith(v, f),
        }
    }

    pub fn neighbors(&self, v: VertexId) -> Result<Vec<VertexId>> {
        self.check(v)?;
        let mut out = Vec::with_capacity(self.degree());
        self.for_each_neighbor(v.0, |u| out.push(VertexId(u)));
        Ok(out)
    }

    #[inline]
    pub fn class_raw(&self, v: usize) -> u32 {
        let mut s = 0usize;
        for j in 0..self.n as usize {
            s += self.coord(v, j) as usize;
        }
        (s % self.m as usize) as u32
    }

    pub fn class_of(&self, v: VertexId) -> Result<ClassIndex> {
        self.check(v)?;
        Ok(ClassIndex(self.class_raw(v.0)))
    }

    pub fn class_index(&self, p: i64) -> ClassIndex {
        ClassIndex(p.rem_euclid(self.m as i64) as u32)
    }

    /// E_m^n(p): the vertices whose coordinate sum is p mod m.
    pub fn class_set(&self, p: ClassIndex) -> Result<VertexSet> {
        if p.0 >= self.m {
            return Err(domain(format!("class {} not in Z_{}", p.0, self.m)));
        }
        let mut s = VertexSet::empty(self.vertex_count);
        for v in 0..self.vertex_count {
            if self.class_raw(v) == p.0 {
                s.insert(v);
            }
        }
        Ok(s)
    }

    /// The class sets E(0), .., E(m-1) in order.
    pub fn class_sets(&self) -> Vec<VertexSet> {
        let mut sets = vec![VertexSet::empty(self.vertex_count); self.m as usize];
        for v in 0..self.vertex_count {
            sets[self.class_raw(v) as usize].insert(v);
        }
        sets
    }

    fn check_set(&self, s: &VertexSet) -> Result<()> {
        if s.universe() != self.vertex_count {
            return Err(domain(format!(
                "vertex set over {} vertices used with Z_{}^{}",
                s.universe(),
                self.m,
                self.n
            )));
        }
        Ok(())
    }

    /// N(A) \ A, intersected with `within` when given.
    pub fn neighborhood(&self, a: &VertexSet, within: Option<&VertexSet>) -> Result<VertexSet> {
        self.check_set(a)?;
        if let Some(b) = within {
            self.check_set(b)?;
        }
        let mut out = VertexSet::empty(self.vertex_count);
        for v in a.iter() {
            self.for_each_neighbor(v, |u| {
                if !a.contains(u) && within.is_none_or(|b| b.contains(u)) {
                    out.insert(u);
                }
            });
        }
        Ok(out)
    }

    pub fn is_independent(&self, a: &VertexSet) -> Result<bool> {
        self.check_set(a)?;
        for v in a.iter() {
            let mut clash = false;
            self.for_each_neighbor(v, |u| clash |= u > v && a.contains(u));
            if clash {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// The subgraph induced by `s`, relabelled to `0..|s|` in index order.
    pub fn induced_subgraph(&self, s: &VertexSet) -> Result<GenericGraph> {
        self.check_set(s)?;
        if s.is_empty() {
            return Err(domain("induced subgraph of the empty set"));
        }
        let members: Vec<usize> = s.iter().collect();
        let mut local = std::collections::HashMap::with_capacity(members.len());
        for (i, &v) in members.iter().enumerate() {
            local.insert(v, i);
        }
        let adj = members
            .iter()
            .map(|&v| {
                let mut l = Vec::new();
                self.for_each_neighbor(v, |u| {
                    if let Some(&j) = local.get(&u) {
                        l.push(j);
                    }
                });
                l.sort_unstable();
                l.dedup();
                l
            })
            .collect();
        Ok(GenericGraph::from_adjacency(
            adj,
            Some(members.into_iter().map(VertexId).collect()),
        ))
    }

    /// The whole torus as an adjacency-list graph (identity labelling).
    pub fn to_generic(&self) -> GenericGraph {
        let adj = (0..self.vertex_count)
            .map(|v| {
                let mut l = Vec::with_capacity(self.degree());
                self.for_each_neighbor(v, |u| l.push(u));
                l.sort_unstable();
                l.dedup();
                l
            })
            .collect();
        GenericGraph::from_adjacency(adj, None)
    }
}
