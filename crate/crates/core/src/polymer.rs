//! The polymer model PM(G, I) and its cluster expansion.
//!
//! For an independent ground set I, a polymer is a nonempty independent
//! S ⊆ Ī such that G[S ∪ N(S, I)] is connected, weighted 2^{-|N(S, I)|}.
//! Two polymers are compatible when their union is independent but not
//! linked in that sense. Everything here is exact rational arithmetic.

use std::collections::{BTreeMap, HashMap, HashSet};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::caps::Caps;
use crate::count::independence_polynomial;
use crate::error::{domain, Error, Result};
use crate::graph::GenericGraph;
use crate::numeric::{dyadic, int, rat, rational_serde, BigCount, ExactRational};
use crate::torus::TorusGraph;
use crate::vertex_set::VertexSet;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polymer {
    pub cells: VertexSet,
    members: Vec<usize>,
    i_neighbors: Vec<usize>,
}

impl Polymer {
    pub fn size(&self) -> usize {
        self.members.len()
    }

    /// Vertices of S in increasing order.
    pub fn members(&self) -> &[usize] {
        &self.members
    }

    /// N(S, I) in increasing order.
    pub fn i_neighbors(&self) -> &[usize] {
        &self.i_neighbors
    }

    /// |N(S, I)|, so the weight is 2^{-weight_exponent}.
    pub fn weight_exponent(&self) -> usize {
        self.i_neighbors.len()
    }

    pub fn weight(&self) -> ExactRational {
        dyadic(self.i_neighbors.len() as u32)
    }
}

#[derive(Debug, Clone)]
pub struct PolymerModel {
    graph: GenericGraph,
    ground: VertexSet,
    complement: VertexSet,
    /// Residue classes and m, when the graph is a torus.
    classes: Option<(Vec<u32>, u32)>,
}

impl PolymerModel {
    pub fn new(graph: GenericGraph, ground: VertexSet) -> Result<Self> {
        if ground.universe() != graph.vertex_count() {
            return Err(domain("ground set and graph have different vertex counts"));
        }
        if ground.iter().any(|v| graph.neighbors(v).iter().any(|&u| ground.contains(u))) {
            return Err(domain("ground set is not independent"));
        }
        Ok(PolymerModel {
            complement: ground.complement(),
            graph,
            ground,
            classes: None,
        })
    }

    pub fn from_torus(g: &TorusGraph, ground: VertexSet) -> Result<Self> {
        let mut pm = Self::new(g.to_generic(), ground)?;
        let classes = (0..g.vertex_count()).map(|v| g.class_raw(v)).collect();
        pm.classes = Some((classes, g.m()));
        Ok(pm)
    }

    pub fn graph(&self) -> &GenericGraph {
        &self.graph
    }

    pub fn ground(&self) -> &VertexSet {
        &self.ground
    }

    pub fn complement(&self) -> &VertexSet {
        &self.complement
    }

    fn i_nbrs(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.graph
            .neighbors(v)
            .iter()
            .copied()
            .filter(|&u| self.ground.contains(u))
    }

    fn check_in_complement(&self, s: &VertexSet) -> Result<()> {
        if s.universe() != self.graph.vertex_count() {
            return Err(domain("vertex set does not belong to this graph"));
        }
        if !s.is_subset(&self.complement) {
            return Err(domain("set is not contained in the complement of I"));
        }
        Ok(())
    }

    fn is_independent(&self, s: &VertexSet) -> bool {
        s.iter()
            .all(|v| self.graph.neighbors(v).iter().all(|&u| !s.contains(u)))
    }

    /// N(S, I) as a set.
    pub fn i_neighborhood(&self, s: &VertexSet) -> VertexSet {
        let mut out = VertexSet::empty(self.graph.vertex_count());
        for v in s.iter() {
            for u in self.i_nbrs(v) {
                out.insert(u);
            }
        }
        out
    }

    /// Whether G[S ∪ N(S, I)] is connected, by search on the induced graph.
    /// The empty set is not linked.
    pub fn is_two_linked(&self, s: &VertexSet) -> Result<bool> {
        self.check_in_complement(s)?;
        let Some(start) = s.iter().next() else {
            return Ok(false);
        };
        let zone = s.union(&self.i_neighborhood(s));
        let mut seen = VertexSet::empty(zone.universe());
        seen.insert(start);
        let mut stack = vec![start];
        while let Some(v) = stack.pop() {
            for &u in self.graph.neighbors(v) {
                if zone.contains(u) && !seen.contains(u) {
                    seen.insert(u);
                    stack.push(u);
                }
            }
        }
        Ok(seen.len() == zone.len())
    }

    /// Validates S as a polymer.
    pub fn polymer(&self, s: &VertexSet) -> Result<Polymer> {
        if !self.is_two_linked(s)? {
            return Err(domain("set is empty or not (2,I)-linked"));
        }
        if !self.is_independent(s) {
            return Err(domain("set is not independent"));
        }
        Ok(self.make_polymer(s.iter().collect()))
    }

    fn make_polymer(&self, members: Vec<usize>) -> Polymer {
        let cells = VertexSet::from_indices(self.graph.vertex_count(), members.iter().copied())
            .expect("members are vertices");
        let i_neighbors = self.i_neighborhood(&cells).iter().collect();
        Polymer {
            cells,
            members,
            i_neighbors,
        }
    }

    /// The compatibility relation evaluated from its definition: S ∪ T
    /// independent and not (2,I)-linked.
    pub fn compatible(&self, s: &Polymer, t: &Polymer) -> bool {
        let u = s.cells.union(&t.cells);
        self.is_independent(&u) && !self.is_two_linked(&u).expect("polymers lie in Ī")
    }

    /// Incompatibility for polymers: they share a vertex, are joined by an
    /// edge, or share an I-neighbour. Equivalent to `!compatible`.
    pub fn incompatible(&self, s: &Polymer, t: &Polymer) -> bool {
        !s.cells.is_disjoint(&t.cells)
            || s.members
                .iter()
                .any(|&v| self.graph.neighbors(v).iter().any(|&u| t.cells.contains(u)))
            || sorted_intersect(&s.i_neighbors, &t.i_neighbors)
    }

    /// Vertices of Ī joined to v by an I-vertex, other than v.
    fn linked_partners(&self, v: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .i_nbrs(v)
            .flat_map(|x| self.graph.neighbors(x).iter().copied())
            .filter(|&u| u != v)
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Every polymer with at most `smax` vertices, ordered by size and then
    /// by member list.
    ///
    /// A polymer is an independent set of Ī that is connected in the graph
    /// "shares an I-neighbour", so polymers are grown from each seed vertex
    /// through that graph, using only vertices above the seed.
    pub fn polymers_up_to(&self, smax: usize, caps: &Caps) -> Result<Vec<Polymer>> {
        if smax == 0 {
            return Err(domain("smax must be at least 1"));
        }
        let partners: Vec<Vec<usize>> = (0..self.graph.vertex_count())
            .map(|v| {
                if self.complement.contains(v) {
                    self.linked_partners(v)
                } else {
                    Vec::new()
                }
            })
            .collect();
        let seeds: Vec<usize> = self.complement.iter().collect();
        let per_seed: Vec<Vec<Vec<usize>>> = seeds
            .par_iter()
            .map(|&seed| {
                let mut found: HashSet<Vec<usize>> = HashSet::new();
                let mut stack = vec![vec![seed]];
                while let Some(set) = stack.pop() {
                    if !found.insert(set.clone()) || set.len() == smax {
                        continue;
                    }
                    let mut ext: Vec<usize> = set
                        .iter()
                        .flat_map(|&v| partners[v].iter().copied())
                        .filter(|&u| u > seed && !set.contains(&u))
                        .filter(|&u| {
                            set.iter().all(|&v| !self.graph.has_edge(u, v))
                        })
                        .collect();
                    ext.sort_unstable();
                    ext.dedup();
                    for u in ext {
                        let mut next = set.clone();
                        next.push(u);
                        next.sort_unstable();
                        if !found.contains(&next) {
                            stack.push(next);
                        }
                    }
                }
                found.into_iter().collect()
            })
            .collect();
        let total: usize = per_seed.iter().map(Vec::len).sum();
        if total > caps.output {
            return Err(Error::CapExceeded {
                what: "polymer enumeration",
                value: total as u128,
                limit: caps.output as u128,
                hint: format!("{total} polymers found; lower smax"),
            });
        }
        let mut all: Vec<Vec<usize>> = per_seed.into_iter().flatten().collect();
        all.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        Ok(all.into_iter().map(|m| self.make_polymer(m)).collect())
    }

    /// Φ: splits an independent A ⊆ Ī into the polymer parts of the
    /// components of G[A ∪ N(A, I)], ordered by smallest vertex.
    pub fn decompose(&self, a: &VertexSet) -> Result<Vec<Polymer>> {
        self.check_in_complement(a)?;
        if !self.is_independent(a) {
            return Err(domain("set is not independent"));
        }
        let zone = a.union(&self.i_neighborhood(a));
        let mut seen = VertexSet::empty(zone.universe());
        let mut parts = Vec::new();
        for start in a.iter() {
            if seen.contains(start) {
                continue;
            }
            seen.insert(start);
            let mut stack = vec![start];
            let mut part = Vec::new();
            while let Some(v) = stack.pop() {
                if a.contains(v) {
                    part.push(v);
                }
                for &u in self.graph.neighbors(v) {
                    if zone.contains(u) && !seen.contains(u) {
                        seen.insert(u);
                        stack.push(u);
                    }
                }
            }
            part.sort_unstable();
            parts.push(self.make_polymer(part));
        }
        Ok(parts)
    }

    /// Ψ: the union of a family of polymers.
    pub fn unite(&self, family: &[Polymer]) -> VertexSet {
        let mut out = VertexSet::empty(self.graph.vertex_count());
        for p in family {
            out.union_with(&p.cells);
        }
        out
    }

    fn class_gap(&self, v: usize, w: usize) -> Option<u32> {
        self.classes.as_ref().map(|(c, m)| {
            let d = (c[v] + m - c[w]) % m;
            d.min(m - d)
        })
    }
}

fn sorted_intersect(a: &[usize], b: &[usize]) -> bool {
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => return true,
        }
    }
    false
}

fn factorial(k: usize) -> BigInt {
    (1..=k).fold(BigInt::one(), |a, i| a * i)
}

/// The Ursell function: (1/k!) times the signed count of spanning connected
/// edge subsets. Disconnected graphs have no such subset and give 0.
/// Limited to k <= 5 vertices.
pub fn ursell(h: &GenericGraph) -> Result<ExactRational> {
    let k = h.vertex_count();
    if k == 0 || k > 5 {
        return Err(Error::Unsupported(format!(
            "Ursell function needs 1..=5 vertices, got {k}"
        )));
    }
    let edges: Vec<(usize, usize)> = h.edges().collect();
    Ok(ursell_edges(k, &edges))
}

fn ursell_edges(k: usize, edges: &[(usize, usize)]) -> ExactRational {
    let mut signed = 0i64;
    for mask in 0u32..1 << edges.len() {
        // Union-find over the chosen edges.
        let mut parent: Vec<usize> = (0..k).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            p[x] = r;
            r
        }
        let mut comps = k;
        for (i, &(a, b)) in edges.iter().enumerate() {
            if mask >> i & 1 == 1 {
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                if ra != rb {
                    parent[ra] = rb;
                    comps -= 1;
                }
            }
        }
        if comps == 1 {
            signed += if mask.count_ones() % 2 == 0 { 1 } else { -1 };
        }
    }
    BigRational::new(BigInt::from(signed), factorial(k))
}

/// An unordered cluster: a multiset of polymers (indices into the polymer
/// list, sorted, repeats allowed) with connected incompatibility graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cluster {
    pub members: Vec<usize>,
    /// Number of ordered tuples with this multiset: k! / Π mult!.
    pub multiplicity: u64,
    pub ursell: ExactRational,
    /// Product of the polymer weights.
    pub weight: ExactRational,
}

impl Cluster {
    /// multiplicity * φ * Π w: the contribution of all its orderings to L_r.
    pub fn contribution(&self) -> ExactRational {
        &self.ursell * &self.weight * int(self.multiplicity as i64)
    }
}

/// Polymers of size at most r together with their pairwise incompatibility
/// lists, the input to cluster enumeration.
pub struct ClusterSpace {
    pub polymers: Vec<Polymer>,
    incompat: Vec<Vec<usize>>,
}

impl ClusterSpace {
    pub fn new(pm: &PolymerModel, r: usize, caps: &Caps) -> Result<Self> {
        let polymers = pm.polymers_up_to(r, caps)?;
        let mut by_vertex: HashMap<usize, Vec<usize>> = HashMap::new();
        for (i, p) in polymers.iter().enumerate() {
            for &v in &p.members {
                by_vertex.entry(v).or_default().push(i);
            }
        }
        let incompat = polymers
            .par_iter()
            .map(|p| {
                // Anything incompatible with p contains a vertex of p, a
                // neighbour of p, or a vertex sharing an I-neighbour with p.
                let mut zone: Vec<usize> = p.members.clone();
                for &v in &p.members {
                    zone.extend(pm.graph.neighbors(v));
                    zone.extend(pm.linked_partners(v));
                }
                zone.sort_unstable();
                zone.dedup();
                let mut out: Vec<usize> = zone
                    .iter()
                    .filter_map(|v| by_vertex.get(v))
                    .flatten()
                    .copied()
                    .filter(|&j| pm.incompatible(p, &polymers[j]))
                    .collect();
                out.sort_unstable();
                out.dedup();
                out
            })
            .collect();
        Ok(ClusterSpace { polymers, incompat })
    }

    fn incompatible(&self, i: usize, j: usize) -> bool {
        self.incompat[i].binary_search(&j).is_ok()
    }

    /// All clusters of total size r, ordered by member list.
    pub fn clusters_of_size(&self, r: usize, caps: &Caps) -> Result<Vec<Cluster>> {
        if r == 0 || r > 5 {
            return Err(Error::Unsupported(format!("cluster size {r} outside 1..=5")));
        }
        if r > caps.cluster {
            return Err(Error::CapExceeded {
                what: "cluster size",
                value: r as u128,
                limit: caps.cluster as u128,
                hint: "raise the cluster cap".into(),
            });
        }
        let seeds: Vec<usize> = (0..self.polymers.len())
            .filter(|&i| self.polymers[i].size() <= r)
            .collect();
        let sizes: Vec<usize> = self.polymers.iter().map(Polymer::size).collect();
        let per_seed: Vec<Vec<Vec<usize>>> = seeds
            .par_iter()
            .map(|&seed| {
                let mut found: HashSet<Vec<usize>> = HashSet::new();
                let mut stack = vec![(vec![seed], sizes[seed])];
                let mut out = Vec::new();
                while let Some((set, size)) = stack.pop() {
                    if !found.insert(set.clone()) {
                        continue;
                    }
                    if size == r {
                        out.push(set);
                        continue;
                    }
                    let mut ext: Vec<usize> = set
                        .iter()
                        .flat_map(|&i| self.incompat[i].iter().copied())
                        .filter(|&j| j >= seed && size + sizes[j] <= r)
                        .collect();
                    ext.sort_unstable();
                    ext.dedup();
                    for j in ext {
                        let mut next = set.clone();
                        next.push(j);
                        next.sort_unstable();
                        stack.push((next, size + sizes[j]));
                    }
                }
                out
            })
            .collect();
        let total: usize = per_seed.iter().map(Vec::len).sum();
        if total > caps.output {
            return Err(Error::CapExceeded {
                what: "cluster enumeration",
                value: total as u128,
                limit: caps.output as u128,
                hint: format!("{total} clusters of size {r}"),
            });
        }
        let mut all: Vec<Vec<usize>> = per_seed.into_iter().flatten().collect();
        all.sort();
        let mut ursell_cache: HashMap<(usize, Vec<(usize, usize)>), ExactRational> = HashMap::new();
        Ok(all
            .into_iter()
            .map(|members| {
                let k = members.len();
                let mut edges = Vec::new();
                for a in 0..k {
                    for b in a + 1..k {
                        if self.incompatible(members[a], members[b]) {
                            edges.push((a, b));
                        }
                    }
                }
                let ursell = ursell_cache
                    .entry((k, edges.clone()))
                    .or_insert_with(|| ursell_edges(k, &edges))
                    .clone();
                let mut mult = factorial(k);
                let mut i = 0;
                while i < k {
                    let j = (i..k).take_while(|&j| members[j] == members[i]).count();
                    mult /= factorial(j);
                    i += j;
                }
                let exp: usize = members.iter().map(|&i| self.polymers[i].weight_exponent()).sum();
                Cluster {
                    multiplicity: u64::try_from(mult).expect("small multiplicity"),
                    ursell,
                    weight: dyadic(exp as u32),
                    members,
                }
            })
            .collect())
    }
}

/// L_r: the sum of φ(H_Γ) Π w(S_i) over ordered clusters of size r.
pub fn l_r(pm: &PolymerModel, r: usize, caps: &Caps) -> Result<ExactRational> {
    let space = ClusterSpace::new(pm, r, caps)?;
    Ok(space
        .clusters_of_size(r, caps)?
        .iter()
        .map(Cluster::contribution)
        .fold(BigRational::zero(), |a, b| a + b))
}

fn check_closed_form_domain(m: u32, n: u32) -> Result<()> {
    if m == 3 {
        return Err(Error::Unsupported(
            "no closed form for m = 3; use the enumerated L_r".into(),
        ));
    }
    if m < 5 || m.is_multiple_of(2) || n == 0 {
        return Err(domain(format!("closed forms need odd m >= 5 and n >= 1, got m={m}, n={n}")));
    }
    Ok(())
}

fn pow_m(m: u32, n: u32) -> ExactRational {
    int(m as i64).pow(n as i32 - 1)
}

/// m^{n-1} (2·2^{-n} + (m-3)/2 · 2^{-2n}).
pub fn closed_form_l1(m: u32, n: u32) -> Result<ExactRational> {
    check_closed_form_domain(m, n)?;
    let m_ = m as i64;
    Ok(pow_m(m, n) * (int(2) * dyadic(n) + rat(m_ - 3, 2) * dyadic(2 * n)))
}

/// m^{n-1} ((n²-2n-1) 2^{-2n} + (3n²-n) 2^{-3n}
///          + ((3m-12)/2 n² + (7-2m)/2 n - (m-3)/4) 2^{-4n}).
pub fn closed_form_l2(m: u32, n: u32) -> Result<ExactRational> {
    check_closed_form_domain(m, n)?;
    let (m_, n_) = (m as i64, n as i64);
    let a = int(n_ * n_ - 2 * n_ - 1);
    let b = int(3 * n_ * n_ - n_);
    let c = rat(3 * m_ - 12, 2) * int(n_ * n_) + rat(7 - 2 * m_, 2) * int(n_) - rat(m_ - 3, 4);
    Ok(pow_m(m, n) * (a * dyadic(2 * n) + b * dyadic(3 * n) + c * dyadic(4 * n)))
}

/// Result of the partition-function identity check.
#[derive(Debug, Clone, Serialize)]
pub struct ZCheck {
    #[serde(with = "rational_serde")]
    pub z: ExactRational,
    pub ground_size: usize,
    pub independent_sets: BigCount,
    /// 2^{|I|} Z = |I(G)|.
    pub holds: bool,
}

/// Z_PM as a sum over all families of pairwise compatible polymers, and
/// the identity 2^{|I|} Z = |I(G)| against an independent count of I(G).
pub fn z_polymer(pm: &PolymerModel, caps: &Caps) -> Result<ZCheck> {
    let nv = pm.graph.vertex_count();
    if nv > caps.brute.min(127) {
        return Err(Error::CapExceeded {
            what: "vertex count for the polymer partition function",
            value: nv as u128,
            limit: caps.brute.min(127) as u128,
            hint: "use a smaller graph".into(),
        });
    }
    let smax = pm.complement.len().max(1);
    let polymers = pm.polymers_up_to(smax, caps)?;
    let mask = |l: &[usize]| l.iter().fold(0u128, |m, &v| m | 1 << v);
    let table: Vec<(u128, u128, u128, usize)> = polymers
        .iter()
        .map(|p| {
            let nbr = p
                .members
                .iter()
                .fold(0u128, |m, &v| m | mask(pm.graph.neighbors(v)));
            (mask(&p.members), nbr, mask(&p.i_neighbors), p.weight_exponent())
        })
        .collect();
    let ground = pm.ground.len();

    // Scaled by 2^{|I|}: compatible polymers have disjoint I-neighbourhoods,
    // so every family contributes the integer 2^{|I| - Σ|N(S,I)|}.
    fn rec(
        table: &[(u128, u128, u128, usize)],
        from: usize,
        cells: u128,
        inbrs: u128,
        used: usize,
        ground: usize,
    ) -> BigUint {
        let mut total = BigUint::one() << (ground - used);
        for (i, &(c, nb, ib, e)) in table.iter().enumerate().skip(from) {
            if c & cells == 0 && nb & cells == 0 && ib & inbrs == 0 {
                total += rec(table, i + 1, cells | c, inbrs | ib, used + e, ground);
            }
        }
        total
    }
    let first: Vec<usize> = (0..table.len()).collect();
    let scaled = (BigUint::one() << ground)
        + first
            .par_iter()
            .map(|&i| {
                let (c, _, ib, e) = table[i];
                rec(&table, i + 1, c, ib, e, ground)
            })
            .reduce(BigUint::zero, |a, b| a + b);
    let count: BigCount = independence_polynomial(&pm.graph, caps)?.into_iter().sum();
    Ok(ZCheck {
        z: BigRational::new(BigInt::from(scaled.clone()), BigInt::one() << ground),
        ground_size: ground,
        holds: scaled == count.0,
        independent_sets: count,
    })
}

/// Predicted log2 |I(Z_m^n)| for m ∈ {5, 7} with the (1 ± o(1)) factor
/// dropped. Not a proven value.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ConjectureValue {
    pub log2: f64,
    /// At n = 1 every correction term is a zeroth power; the value is
    /// reported but meaningless.
    pub degenerate: bool,
}

pub fn conjecture_value(m: u32, n: u32) -> Result<ConjectureValue> {
    let c = match m {
        5 => (n as f64 * n as f64 - 2.0 * n as f64) / 4.0,
        7 => (n as f64 - 1.0).powi(2) / 4.0,
        _ => return Err(Error::Unsupported(format!("conjectured value only for m = 5, 7, got {m}"))),
    };
    if n == 0 {
        return Err(domain("n must be at least 1"));
    }
    let mf = m as f64;
    let k = n as i32 - 1;
    let ell = (m / 2) as f64;
    let exponent = (mf / 2.0).powi(k) + c * (mf / 4.0).powi(k);
    Ok(ConjectureValue {
        log2: mf.log2() + k as f64 + ell * mf.powi(k) + exponent / std::f64::consts::LN_2,
        degenerate: n == 1,
    })
}

/// Label-agnostic description of a cluster of size at most 2.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct ClusterType {
    pub r: usize,
    /// `single` ({v}), `repeated` ({v},{v}), `pair` ({v},{w}), `polymer`
    /// ({v,w}); larger clusters are `k<number of polymers>`.
    pub kind: String,
    /// For two distinct vertices: `adjacent`, or `class_gap_<d>` on a torus.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub relation: Option<String>,
    /// |N(v, I)| of the vertices involved, sorted.
    pub i_degrees: Vec<usize>,
    /// Number of shared I-neighbours of the two vertices.
    pub shared_i_neighbors: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct TypeCount {
    #[serde(flatten)]
    pub key: ClusterType,
    /// Ordered clusters of this type.
    pub count: u64,
    #[serde(with = "rational_serde")]
    pub contribution: ExactRational,
}

/// Groups clusters by [`ClusterType`], counting ordered clusters.
pub fn cluster_census(pm: &PolymerModel, space: &ClusterSpace, clusters: &[Cluster], r: usize) -> Vec<TypeCount> {
    let mut map: BTreeMap<ClusterType, (u64, ExactRational)> = BTreeMap::new();
    for c in clusters {
        let verts: Vec<usize> = c
            .members
            .iter()
            .flat_map(|&i| space.polymers[i].members.iter().copied())
            .collect();
        let kind = match (c.members.len(), verts.len()) {
            (1, 1) => "single".to_string(),
            (2, 2) if c.members[0] == c.members[1] => "repeated".to_string(),
            (2, 2) => "pair".to_string(),
            (1, 2) => "polymer".to_string(),
            (k, _) => format!("k{k}"),
        };
        let mut i_degrees: Vec<usize> = verts.iter().map(|&v| pm.i_nbrs(v).count()).collect();
        i_degrees.sort_unstable();
        let (relation, shared) = if verts.len() == 2 && verts[0] != verts[1] {
            let (v, w) = (verts[0], verts[1]);
            let rel = if pm.graph.has_edge(v, w) {
                "adjacent".to_string()
            } else {
                match pm.class_gap(v, w) {
                    Some(d) => format!("class_gap_{d}"),
                    None => "nonadjacent".to_string(),
                }
            };
            let nv: Vec<usize> = pm.i_nbrs(v).collect();
            let shared = pm.i_nbrs(w).filter(|u| nv.contains(u)).count();
            (Some(rel), shared)
        } else if verts.len() == 2 {
            (None, i_degrees[0])
        } else {
            (None, 0)
        };
        let key = ClusterType {
            r,
            kind,
            relation,
            i_degrees,
            shared_i_neighbors: shared,
        };
        let e = map.entry(key).or_insert((0, BigRational::zero()));
        e.0 += c.multiplicity;
        e.1 += c.contribution();
    }
    map.into_iter()
        .map(|(key, (count, contribution))| TypeCount {
            key,
            count,
            contribution,
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct LTerm {
    pub r: usize,
    #[serde(with = "rational_serde")]
    pub enumerated: ExactRational,
    #[serde(serialize_with = "opt_rational")]
    pub closed_form: Option<ExactRational>,
    #[serde(rename = "match")]
    pub matches: Option<bool>,
}

fn opt_rational<S: serde::Serializer>(r: &Option<ExactRational>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match r {
        Some(r) => rational_serde::serialize(r, s),
        None => s.serialize_none(),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PolymerReport {
    pub m: u32,
    pub n: u32,
    pub ground_label: String,
    #[serde(rename = "L")]
    pub terms: Vec<LTerm>,
    pub cluster_counts_by_type: Vec<TypeCount>,
}

impl PolymerReport {
    /// False when a closed form was compared and differed.
    pub fn all_match(&self) -> bool {
        self.terms.iter().all(|t| t.matches != Some(false))
    }
}

/// L_1..L_rmax for PM(Z_m^n, I) with I = iota(label), compared with the
/// closed forms for r <= 2 when `check_closed_form` and m >= 5.
pub fn polymer_report(
    g: &TorusGraph,
    label: &crate::maxset::MaxSetLabel,
    rmax: usize,
    check_closed_form: bool,
    caps: &Caps,
) -> Result<PolymerReport> {
    let ground = crate::maxset::iota(g, label)?;
    let pm = PolymerModel::from_torus(g, ground)?;
    let space = ClusterSpace::new(&pm, rmax, caps)?;
    let mut terms = Vec::new();
    let mut census = Vec::new();
    for r in 1..=rmax {
        let clusters = space.clusters_of_size(r, caps)?;
        let enumerated = clusters
            .iter()
            .map(Cluster::contribution)
            .fold(BigRational::zero(), |a, b| a + b);
        let closed_form = match (check_closed_form && g.m() >= 5, r) {
            (true, 1) => Some(closed_form_l1(g.m(), g.n())?),
            (true, 2) => Some(closed_form_l2(g.m(), g.n())?),
            _ => None,
        };
        census.extend(cluster_census(&pm, &space, &clusters, r));
        terms.push(LTerm {
            r,
            matches: closed_form.as_ref().map(|c| *c == enumerated),
            enumerated,
            closed_form,
        });
    }
    Ok(PolymerReport {
        m: g.m(),
        n: g.n(),
        ground_label: label.to_string(),
        terms,
        cluster_counts_by_type: census,
    })
}
