//! Exact counts of independent sets.
//!
//! Two independent routes: an exhaustive backtracking scan over vertex
//! subsets ([`count_brute`]) and a layered transfer matrix whose states are
//! the independent sets of one (n-1)-dimensional layer ([`count_transfer`]).

use std::collections::HashMap;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::caps::Caps;
use crate::error::{domain, Error, Result};
use crate::graph::GenericGraph;
use crate::numeric::{BigCount, ExactRational};
use crate::torus::TorusGraph;
use crate::vertex_set::VertexSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Brute,
    Transfer,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CountProfile {
    pub m: u32,
    pub n: u32,
    pub method: Method,
    pub total: BigCount,
    /// `by_size[k]` = number of independent sets of size k, k = 0..=ell*m^{n-1}.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub by_size: Option<Vec<BigCount>>,
}

impl CountProfile {
    /// The profile invariants: totals agree, one empty set, and the top
    /// size class (maximum independent sets) is populated.
    pub fn is_consistent(&self, g: &TorusGraph) -> bool {
        let Some(by) = &self.by_size else {
            return !self.total.is_zero();
        };
        let max = g.ell() as usize * g.class_size();
        by.len() == max + 1
            && by[0] == BigCount::from(1u64)
            && !by[max].is_zero()
            && by.iter().cloned().sum::<BigCount>() == self.total
    }
}

// ---------------------------------------------------------------------------
// Backtracking engine over u128 masks.

fn binomial_table(n: usize) -> Vec<Vec<u128>> {
    let mut t = vec![vec![1u128]];
    for i in 1..=n {
        let prev = &t[i - 1];
        let mut row = vec![1u128; i + 1];
        for j in 1..i {
            row[j] = prev[j - 1] + prev[j];
        }
        t.push(row);
    }
    t
}

/// Counts independent subsets of positions `0..nbr.len()`.
///
/// Branches on the lowest remaining candidate. Once only positions from
/// `indep_from` onwards remain (a suffix with no internal edges), every
/// subset of the candidates is independent and the branch is closed with a
/// binomial row.
struct Engine {
    nbr: Vec<u128>,
    indep_from: u32,
    by_size: bool,
    binom: Vec<Vec<u128>>,
}

impl Engine {
    fn new(nbr: Vec<u128>, by_size: bool) -> Self {
        let k = nbr.len();
        assert!(k <= 127);
        let mut suffix = 0u128;
        let mut indep_from = k;
        for p in (0..k).rev() {
            if nbr[p] & suffix != 0 {
                break;
            }
            suffix |= 1 << p;
            indep_from = p;
        }
        Engine {
            nbr,
            indep_from: indep_from as u32,
            by_size,
            binom: binomial_table(k),
        }
    }

    fn all(&self) -> u128 {
        if self.nbr.len() == 128 {
            !0
        } else {
            (1u128 << self.nbr.len()) - 1
        }
    }

    fn acc_len(&self) -> usize {
        if self.by_size {
            self.nbr.len() + 1
        } else {
            1
        }
    }

    fn rec(&self, cand: u128, size: usize, acc: &mut [u128]) {
        if cand == 0 {
            acc[if self.by_size { size } else { 0 }] += 1;
            return;
        }
        let pos = cand.trailing_zeros();
        if pos >= self.indep_from {
            let c = cand.count_ones() as usize;
            if self.by_size {
                for (j, b) in self.binom[c].iter().enumerate() {
                    acc[size + j] += b;
                }
            } else {
                acc[0] += 1u128 << c;
            }
            return;
        }
        let rest = cand & !(1u128 << pos);
        self.rec(rest, size, acc);
        self.rec(rest & !self.nbr[pos as usize], size + 1, acc);
    }

    fn split(&self, cand: u128, size: usize, depth: u32, out: &mut Vec<(u128, usize)>) {
        if depth == 0 || cand == 0 || cand.trailing_zeros() >= self.indep_from {
            out.push((cand, size));
            return;
        }
        let pos = cand.trailing_zeros();
        let rest = cand & !(1u128 << pos);
        self.split(rest, size, depth - 1, out);
        self.split(rest & !self.nbr[pos as usize], size + 1, depth - 1, out);
    }

    /// Parallel over a fixed set of prefix tasks; exact integer sums make the
    /// result independent of scheduling.
    fn count(&self) -> Vec<u128> {
        let mut tasks = Vec::new();
        self.split(self.all(), 0, 10, &mut tasks);
        let len = self.acc_len();
        tasks
            .par_iter()
            .map(|&(cand, size)| {
                let mut acc = vec![0u128; len];
                self.rec(cand, size, &mut acc);
                acc
            })
            .reduce(
                || vec![0u128; len],
                |mut a, b| {
                    for (x, y) in a.iter_mut().zip(b) {
                        *x += y;
                    }
                    a
                },
            )
    }
}

fn positioned_masks(order: &[usize], neighbors: impl Fn(usize) -> Vec<usize>) -> Vec<u128> {
    let mut pos = vec![0usize; order.len()];
    for (p, &v) in order.iter().enumerate() {
        pos[v] = p;
    }
    order
        .iter()
        .map(|&v| neighbors(v).into_iter().fold(0u128, |m, u| m | 1 << pos[u]))
        .collect()
}

fn to_profile(g: &TorusGraph, method: Method, raw: Vec<BigCount>, by_size: bool) -> CountProfile {
    if by_size {
        let max = g.ell() as usize * g.class_size();
        assert!(
            raw.iter().skip(max + 1).all(BigCount::is_zero),
            "independent set larger than ell*m^(n-1)"
        );
        let mut by = raw;
        by.resize(max + 1, BigCount::zero());
        CountProfile {
            m: g.m(),
            n: g.n(),
            method,
            total: by.iter().cloned().sum(),
            by_size: Some(by),
        }
    } else {
        CountProfile {
            m: g.m(),
            n: g.n(),
            method,
            total: raw.into_iter().sum(),
            by_size: None,
        }
    }
}

/// Exhaustive scan over vertex subsets of Z_m^n, refused above `caps.brute`
/// vertices.
///
/// Vertices are visited class by class, so the last class (an independent
/// set) is always closed in one binomial step.
pub fn count_brute(g: &TorusGraph, by_size: bool, caps: &Caps) -> Result<CountProfile> {
    let nv = g.vertex_count();
    if nv > caps.brute || nv > 127 {
        return Err(Error::CapExceeded {
            what: "vertex count for the brute-force scan",
            value: nv as u128,
            limit: caps.brute.min(127) as u128,
            hint: "use the transfer method (count_transfer / --method transfer)".into(),
        });
    }
    let mut order: Vec<usize> = (0..nv).collect();
    order.sort_by_key(|&v| (g.class_raw(v), v));
    let nbr = positioned_masks(&order, |v| {
        let mut l = Vec::new();
        g.for_each_neighbor(v, |u| l.push(u));
        l
    });
    let raw = Engine::new(nbr, by_size).count();
    Ok(to_profile(
        g,
        Method::Brute,
        raw.into_iter().map(BigCount::from).collect(),
        by_size,
    ))
}

/// Coefficients of the independence polynomial of a small graph.
pub fn independence_polynomial(h: &GenericGraph, caps: &Caps) -> Result<Vec<BigCount>> {
    let k = h.vertex_count();
    if k > caps.brute {
        return Err(Error::CapExceeded {
            what: "vertex count for exact enumeration",
            value: k as u128,
            limit: caps.brute as u128,
            hint: "raise the brute cap".into(),
        });
    }
    let nbr = h.neighbor_masks()?;
    let raw = Engine::new(nbr, true).count();
    let mut out: Vec<BigCount> = raw.into_iter().map(BigCount::from).collect();
    while out.len() > 1 && out.last().is_some_and(BigCount::is_zero) {
        out.pop();
    }
    Ok(out)
}

/// Sum over independent sets A of h of lambda^|A|, exactly.
pub fn partition_function(h: &GenericGraph, lambda: &ExactRational, caps: &Caps) -> Result<ExactRational> {
    let poly = independence_polynomial(h, caps)?;
    let mut acc = BigRational::zero();
    for c in poly.iter().rev() {
        acc = acc * lambda + c.to_rational();
    }
    Ok(acc)
}

// ---------------------------------------------------------------------------
// Enumeration.

/// Lazy preorder enumeration of independent sets: sets come out in
/// lexicographic order of their sorted vertex lists (∅, {0}, {0,1}, ...).
pub struct IndependentSets {
    nbr: Vec<u128>,
    universe: usize,
    stack: Vec<(u128, u128, usize)>,
    started: bool,
    size_filter: Option<usize>,
    remaining: Option<usize>,
}

impl IndependentSets {
    fn emit_ok(&self, size: usize) -> bool {
        self.size_filter.is_none_or(|k| k == size)
    }

    fn can_grow(&self, size: usize, cand: u128) -> bool {
        match self.size_filter {
            Some(k) => size < k && size + cand.count_ones() as usize >= k,
            None => cand != 0,
        }
    }
}

impl Iterator for IndependentSets {
    type Item = VertexSet;

    fn next(&mut self) -> Option<VertexSet> {
        if self.remaining == Some(0) {
            return None;
        }
        if !self.started {
            self.started = true;
            let all = if self.universe == 0 {
                0
            } else {
                (1u128 << self.universe) - 1
            };
            if self.can_grow(0, all) {
                self.stack.push((0, all, 0));
            }
            if self.emit_ok(0) {
                self.remaining = self.remaining.map(|r| r - 1);
                return Some(VertexSet::empty(self.universe));
            }
        }
        loop {
            let top = self.stack.last_mut()?;
            if top.1 == 0 {
                self.stack.pop();
                continue;
            }
            let v = top.1.trailing_zeros() as usize;
            top.1 &= !(1u128 << v);
            let set = top.0 | 1u128 << v;
            let cand = top.1 & !self.nbr[v];
            let size = top.2 + 1;
            if self.can_grow(size, cand) {
                self.stack.push((set, cand, size));
            }
            if self.emit_ok(size) {
                self.remaining = self.remaining.map(|r| r - 1);
                return Some(VertexSet::from_mask(self.universe, set));
            }
        }
    }
}

/// Streams the independent sets of `h`, optionally only those of size k.
///
/// Graphs above `caps.brute` vertices need an explicit `limit`.
pub fn enumerate_independent(
    h: &GenericGraph,
    size_filter: Option<usize>,
    limit: Option<usize>,
    caps: &Caps,
) -> Result<IndependentSets> {
    if h.vertex_count() > caps.brute && limit.is_none() {
        return Err(Error::CapExceeded {
            what: "vertex count for unbounded enumeration",
            value: h.vertex_count() as u128,
            limit: caps.brute as u128,
            hint: "pass an output limit".into(),
        });
    }
    Ok(IndependentSets {
        nbr: h.neighbor_masks()?,
        universe: h.vertex_count(),
        stack: Vec::new(),
        started: false,
        size_filter,
        remaining: limit,
    })
}

// ---------------------------------------------------------------------------
// Transfer matrix.

/// Ring used by the transfer DP: either wrapping `u128` (exact whenever the
/// true counts are below 2^128) or `BigInt`.
trait Ring: Clone + Send + Sync {
    fn zero() -> Self;
    fn one() -> Self;
    fn add_assign(&mut self, o: &Self);
    fn neg(&mut self);
    fn is_zero(&self) -> bool;
    fn to_biguint(&self) -> BigUint;
}

impl Ring for u128 {
    fn zero() -> Self {
        0
    }
    fn one() -> Self {
        1
    }
    #[inline]
    fn add_assign(&mut self, o: &Self) {
        *self = self.wrapping_add(*o);
    }
    #[inline]
    fn neg(&mut self) {
        *self = self.wrapping_neg();
    }
    fn is_zero(&self) -> bool {
        *self == 0
    }
    fn to_biguint(&self) -> BigUint {
        BigUint::from(*self)
    }
}

impl Ring for BigInt {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn add_assign(&mut self, o: &Self) {
        *self += o;
    }
    fn neg(&mut self) {
        *self = -std::mem::take(self);
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn to_biguint(&self) -> BigUint {
        assert!(!self.is_negative());
        self.magnitude().clone()
    }
}

/// Layer states and the lookup tables the DP needs.
struct LayerStates {
    masks: Vec<u128>,
    sizes: Vec<u32>,
    /// `by_bit[i]` lists `(y, y \ {i})` for every state y containing bit i.
    by_bit: Vec<Vec<(u32, u32)>>,
}

impl LayerStates {
    fn build(nbr: &[u128], cap: usize) -> Result<Self> {
        let width = nbr.len();
        let mut masks = Vec::new();
        let mut stack = vec![(0u128, if width == 0 { 0 } else { (1u128 << width) - 1 })];
        // Every independent set is reached once: push children with the
        // candidate set restricted to higher bits.
        while let Some((set, cand)) = stack.pop() {
            masks.push(set);
            if masks.len() > cap {
                return Err(Error::CapExceeded {
                    what: "transfer-matrix layer states",
                    value: masks.len() as u128,
                    limit: cap as u128,
                    hint: "use a smaller n (the layer is Z_m^(n-1))".into(),
                });
            }
            let mut c = cand;
            while c != 0 {
                let v = c.trailing_zeros();
                c &= c - 1;
                stack.push((set | 1 << v, c & !nbr[v as usize]));
            }
        }
        masks.sort_unstable();
        let index: HashMap<u128, u32> = masks.iter().enumerate().map(|(i, &m)| (m, i as u32)).collect();
        let mut by_bit = vec![Vec::new(); width];
        for (i, &m) in masks.iter().enumerate() {
            let mut c = m;
            while c != 0 {
                let b = c.trailing_zeros();
                c &= c - 1;
                by_bit[b as usize].push((i as u32, index[&(m & !(1u128 << b))]));
            }
        }
        Ok(LayerStates {
            sizes: masks.iter().map(|m| m.count_ones()).collect(),
            masks,
            by_bit,
        })
    }

    fn len(&self) -> usize {
        self.masks.len()
    }
}

/// Automorphisms of the layer torus Z_m^k as vertex permutations:
/// coordinate permutations, reflections and translations.
fn layer_automorphisms(m: u32, k: u32) -> Vec<Vec<u8>> {
    if k == 0 {
        return vec![vec![0]];
    }
    let layer = TorusGraph::new(m, k).expect("layer torus");
    let nv = layer.vertex_count();
    let k = k as usize;
    let mut perms: Vec<Vec<usize>> = vec![vec![]];
    for _ in 0..k {
        let mut next = Vec::new();
        for p in &perms {
            for j in 0..k {
                if !p.contains(&j) {
                    let mut q = p.clone();
                    q.push(j);
                    next.push(q);
                }
            }
        }
        perms = next;
    }
    let full = perms.len() * (1 << k) * nv;
    let (perms, signs): (Vec<Vec<usize>>, usize) = if full > 100_000 {
        (vec![(0..k).collect()], 1)
    } else {
        (perms, 1 << k)
    };
    let mut out = Vec::with_capacity(perms.len() * signs * nv);
    let coords: Vec<Vec<u32>> = (0..nv)
        .map(|v| (0..k).map(|j| layer.coord(v, j)).collect())
        .collect();
    for p in &perms {
        for s in 0..signs {
            for t in 0..nv {
                let tc = &coords[t];
                let map = (0..nv)
                    .map(|v| {
                        let mut img = vec![0u32; k];
                        for j in 0..k {
                            let c = coords[v][j];
                            let c = if s >> j & 1 == 1 { (m - c) % m } else { c };
                            img[p[j]] = (c + tc[p[j]]) % m;
                        }
                        layer.encode(&img).unwrap().0 as u8
                    })
                    .collect();
                out.push(map);
            }
        }
    }
    out
}

fn permute_mask(mask: u128, perm: &[u8]) -> u128 {
    let mut out = 0u128;
    let mut c = mask;
    while c != 0 {
        let b = c.trailing_zeros();
        c &= c - 1;
        out |= 1u128 << perm[b as usize];
    }
    out
}

/// Machine-checks that inter-layer edges join vertices with identical
/// (n-1)-prefixes and that intra-layer edges are exactly the layer torus
/// edges, so layer compatibility is set disjointness.
fn check_layer_structure(g: &TorusGraph, layer_nbr: &[u128]) {
    let m = g.m() as usize;
    for v in 0..g.vertex_count().min(1 << 20) {
        let (w, q) = (v / m, v % m);
        let mut within = 0u128;
        let mut across = 0;
        g.for_each_neighbor(v, |u| {
            let (wu, qu) = (u / m, u % m);
            if wu == w {
                assert!(qu == (q + 1) % m || (qu + 1) % m == q, "bad inter-layer edge");
                across += 1;
            } else {
                assert_eq!(qu, q, "edge leaves the layer with a different prefix");
                within |= 1 << wu;
            }
        });
        assert_eq!(across, 2, "each vertex has two inter-layer neighbours");
        assert_eq!(within, layer_nbr[w], "intra-layer edges differ from the layer torus");
    }
}

/// Exact count by the layered transfer matrix.
///
/// Layers are `V_q = {v : v_n = q}`; a state is an independent set of the
/// layer torus Z_m^(n-1) and consecutive layers are compatible iff their
/// states are disjoint. The trace of the m-th power is a cyclic DP from each
/// start state; start states are grouped into orbits of the layer's
/// automorphism group since the diagonal entry is constant on orbits.
pub fn count_transfer(g: &TorusGraph, by_size: bool, caps: &Caps) -> Result<CountProfile> {
    count_transfer_with(g, by_size, caps, true)
}

/// [`count_transfer`] with orbit reduction optional (every start state is
/// then run separately).
pub fn count_transfer_with(
    g: &TorusGraph,
    by_size: bool,
    caps: &Caps,
    use_symmetry: bool,
) -> Result<CountProfile> {
    let m = g.m();
    let width = g.class_size();
    if width > 127 {
        return Err(Error::CapExceeded {
            what: "layer width m^(n-1)",
            value: width as u128,
            limit: 127,
            hint: "use a smaller n".into(),
        });
    }
    let layer_nbr: Vec<u128> = if g.n() == 1 {
        vec![0]
    } else {
        let layer = TorusGraph::new(m, g.n() - 1)?;
        (0..width)
            .map(|w| {
                let mut mask = 0u128;
                layer.for_each_neighbor(w, |u| mask |= 1 << u);
                mask
            })
            .collect()
    };
    check_layer_structure(g, &layer_nbr);
    let states = LayerStates::build(&layer_nbr, caps.states)?;

    let reps: Vec<(usize, u64)> = if use_symmetry {
        let group = layer_automorphisms(m, g.n() - 1);
        let index: HashMap<u128, usize> =
            states.masks.iter().enumerate().map(|(i, &s)| (s, i)).collect();
        let mut seen = vec![false; states.len()];
        let mut reps = Vec::new();
        for s in 0..states.len() {
            if seen[s] {
                continue;
            }
            let mut orbit = 0u64;
            for perm in &group {
                let img = index[&permute_mask(states.masks[s], perm)];
                if !seen[img] {
                    seen[img] = true;
                    orbit += 1;
                }
            }
            reps.push((s, orbit));
        }
        reps
    } else {
        (0..states.len()).map(|s| (s, 1)).collect()
    };

    let degree = g.ell() as usize * width;
    let raw = if g.vertex_count() <= 127 {
        transfer_sum::<u128>(&states, &reps, m, by_size, degree)
    } else {
        transfer_sum::<BigInt>(&states, &reps, m, by_size, degree)
    };
    Ok(to_profile(
        g,
        Method::Transfer,
        raw.into_iter().map(BigCount::from).collect(),
        by_size,
    ))
}

fn transfer_sum<R: Ring>(
    states: &LayerStates,
    reps: &[(usize, u64)],
    m: u32,
    by_size: bool,
    degree: usize,
) -> Vec<BigUint> {
    // Before the cyclic closure the last layer may still meet the start
    // state, so open paths can exceed the final degree by up to |s|.
    let widest = states.sizes.iter().copied().max().unwrap_or(0) as usize;
    let len = if by_size { degree + widest + 1 } else { 1 };
    let per_rep: Vec<Vec<BigUint>> = reps
        .par_iter()
        .map(|&(s, orbit)| {
            diagonal_entry::<R>(states, s, m, by_size, len)
                .into_iter()
                .map(|c| c.to_biguint() * orbit)
                .collect()
        })
        .collect();
    let mut total = vec![BigUint::zero(); len];
    for poly in per_rep {
        for (t, c) in total.iter_mut().zip(poly) {
            *t += c;
        }
    }
    total
}

/// (T^m)_{ss} as a polynomial in the set size (length `len`).
fn diagonal_entry<R: Ring>(
    states: &LayerStates,
    s: usize,
    m: u32,
    by_size: bool,
    len: usize,
) -> Vec<R> {
    let ns = states.len();
    let mut v = vec![R::zero(); ns * len];
    v[s * len + if by_size { states.sizes[s] as usize } else { 0 }] = R::one();
    for _ in 1..m {
        v = transfer_step(states, v, by_size, len);
    }
    let start = states.masks[s];
    let mut out = vec![R::zero(); len];
    for (u, &mask) in states.masks.iter().enumerate() {
        if mask & start == 0 {
            for k in 0..len {
                out[k].add_assign(&v[u * len + k]);
            }
        }
    }
    out
}

/// v'[t] = z^{|t|} * sum over states u disjoint from t of v[u].
///
/// Uses [u ∩ t = ∅] = Σ_{X ⊆ u ∩ t} (-1)^{|X|}: a superset-sum pass, a sign
/// flip, and a subset-sum pass, all over the down-closed state family.
fn transfer_step<R: Ring>(states: &LayerStates, mut w: Vec<R>, by_size: bool, len: usize) -> Vec<R> {
    for pairs in &states.by_bit {
        for &(y, c) in pairs {
            let (y, c) = (y as usize * len, c as usize * len);
            for k in 0..len {
                let val = w[y + k].clone();
                w[c + k].add_assign(&val);
            }
        }
    }
    for (x, &sz) in states.sizes.iter().enumerate() {
        if sz % 2 == 1 {
            for k in 0..len {
                w[x * len + k].neg();
            }
        }
    }
    for pairs in &states.by_bit {
        for &(y, c) in pairs {
            let (y, c) = (y as usize * len, c as usize * len);
            for k in 0..len {
                let val = w[c + k].clone();
                w[y + k].add_assign(&val);
            }
        }
    }
    if !by_size {
        return w;
    }
    let mut out = vec![R::zero(); w.len()];
    for (t, &sz) in states.sizes.iter().enumerate() {
        let sz = sz as usize;
        for k in 0..len {
            let c = &w[t * len + k];
            if k + sz < len {
                out[t * len + k + sz] = c.clone();
            } else {
                assert!(c.is_zero(), "size polynomial exceeded its degree bound");
            }
        }
    }
    out
}

/// Cross-checks a generic graph against the torus, used in tests of the
/// layer-axis symmetry: the count after permuting coordinates.
pub fn count_generic(h: &GenericGraph) -> Result<BigCount> {
    let k = h.vertex_count();
    if k > 127 {
        return Err(domain("graph too large for the bitmask counter"));
    }
    let raw = Engine::new(h.neighbor_masks()?, false).count();
    Ok(BigCount::from(raw[0]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{int, rat};

    fn caps() -> Caps {
        Caps::default()
    }

    /// Plain 2^N scan; the oracle for the engine itself.
    fn naive_count(nbr: &[u128]) -> Vec<u64> {
        let k = nbr.len();
        let mut out = vec![0u64; k + 1];
        for s in 0u64..(1 << k) {
            let ok = (0..k).all(|v| s >> v & 1 == 0 || nbr[v] as u64 & s == 0);
            if ok {
                out[s.count_ones() as usize] += 1;
            }
        }
        out
    }

    #[test]
    fn brute_examples() {
        let g = TorusGraph::new(3, 1).unwrap();
        assert_eq!(count_brute(&g, true, &caps()).unwrap().total, BigCount::from(4u64));
        let g = TorusGraph::new(5, 1).unwrap();
        assert_eq!(count_brute(&g, false, &caps()).unwrap().total, BigCount::from(11u64));
        let g = TorusGraph::new(3, 2).unwrap();
        let p = count_brute(&g, true, &caps()).unwrap();
        assert_eq!(p.total, BigCount::from(34u64));
        let by: Vec<String> = p.by_size.as_ref().unwrap().iter().map(|c| c.to_string()).collect();
        assert_eq!(by, ["1", "9", "18", "6"]);
        assert!(p.is_consistent(&g));
    }

    #[test]
    fn brute_cap_names_transfer() {
        let g = TorusGraph::new(3, 4).unwrap();
        let err = count_brute(&g, false, &caps()).unwrap_err();
        assert!(err.to_string().contains("transfer"));
    }

    #[test]
    fn engine_matches_naive_scan() {
        for (m, n) in [(3, 2), (5, 1), (7, 1)] {
            let g = TorusGraph::new(m, n).unwrap();
            let p = count_brute(&g, true, &caps()).unwrap();
            let nbr = g.to_generic().neighbor_masks().unwrap();
            let naive = naive_count(&nbr);
            let by = p.by_size.unwrap();
            for (k, c) in naive.iter().enumerate() {
                let got = by.get(k).cloned().unwrap_or_default();
                assert_eq!(got, BigCount::from(*c), "({m},{n}) size {k}");
            }
        }
    }

    #[test]
    fn transfer_examples() {
        for (m, n, expect) in [(3, 1, 4u64), (3, 2, 34), (5, 1, 11), (7, 1, 29), (5, 2, 25531), (3, 3, 11776)] {
            let g = TorusGraph::new(m, n).unwrap();
            let p = count_transfer(&g, true, &caps()).unwrap();
            assert_eq!(p.total, BigCount::from(expect), "({m},{n})");
            assert!(p.is_consistent(&g));
        }
    }

    #[test]
    fn transfer_with_and_without_symmetry_agree() {
        for (m, n) in [(3, 3), (5, 2), (7, 2)] {
            let g = TorusGraph::new(m, n).unwrap();
            let a = count_transfer_with(&g, true, &caps(), true).unwrap();
            let b = count_transfer_with(&g, true, &caps(), false).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn transfer_bigint_path_agrees() {
        let g = TorusGraph::new(3, 3).unwrap();
        let states = {
            let layer = TorusGraph::new(3, 2).unwrap();
            let nbr: Vec<u128> = (0..9)
                .map(|w| {
                    let mut m = 0u128;
                    layer.for_each_neighbor(w, |u| m |= 1 << u);
                    m
                })
                .collect();
            LayerStates::build(&nbr, 1000).unwrap()
        };
        let reps: Vec<_> = (0..states.len()).map(|s| (s, 1)).collect();
        let a = transfer_sum::<u128>(&states, &reps, 3, true, 9);
        let b = transfer_sum::<BigInt>(&states, &reps, 3, true, 9);
        assert_eq!(a, b);
        let total: BigUint = a.iter().sum();
        assert_eq!(BigCount(total), count_brute(&g, false, &Caps { brute: 27, ..caps() }).unwrap().total);
    }

    #[test]
    fn transfer_state_cap() {
        let g = TorusGraph::new(3, 3).unwrap();
        let err = count_transfer(&g, false, &Caps { states: 20, ..caps() }).unwrap_err();
        assert!(matches!(err, Error::CapExceeded { .. }));
    }

    #[test]
    fn partition_function_examples() {
        let c = caps();
        assert_eq!(
            partition_function(&GenericGraph::empty(4), &rat(1, 2), &c).unwrap(),
            rat(81, 16)
        );
        assert_eq!(
            partition_function(&GenericGraph::complete(2), &rat(1, 2), &c).unwrap(),
            int(2)
        );
        assert_eq!(
            partition_function(&GenericGraph::cycle(5), &int(1), &c).unwrap(),
            int(11)
        );
        assert!(partition_function(&GenericGraph::empty(31), &int(1), &c).is_err());
    }

    #[test]
    fn enumeration_examples() {
        let c = caps();
        let k3: Vec<_> = enumerate_independent(&GenericGraph::complete(3), Some(1), None, &c)
            .unwrap()
            .collect();
        assert_eq!(k3.len(), 3);
        let c5: Vec<_> = enumerate_independent(&GenericGraph::cycle(5), Some(2), None, &c)
            .unwrap()
            .map(|s| s.iter().collect::<Vec<_>>())
            .collect();
        assert_eq!(c5, vec![vec![0, 2], vec![0, 3], vec![1, 3], vec![1, 4], vec![2, 4]]);
        let empty: Vec<_> = enumerate_independent(&GenericGraph::cycle(6), Some(0), None, &c)
            .unwrap()
            .collect();
        assert_eq!(empty, vec![VertexSet::empty(6)]);
        let all: Vec<_> = enumerate_independent(&GenericGraph::path(3), None, None, &c)
            .unwrap()
            .map(|s| s.iter().collect::<Vec<_>>())
            .collect();
        assert_eq!(all, vec![vec![], vec![0], vec![0, 2], vec![1], vec![2]]);
        assert!(enumerate_independent(&GenericGraph::empty(40), None, None, &c).is_err());
        let limited = enumerate_independent(&GenericGraph::empty(40), None, Some(5), &c)
            .unwrap()
            .count();
        assert_eq!(limited, 5);
    }

    #[test]
    fn enumeration_count_matches_polynomial() {
        let h = TorusGraph::new(3, 2).unwrap().to_generic();
        let n = enumerate_independent(&h, None, None, &caps()).unwrap().count();
        assert_eq!(n, 34);
        assert_eq!(
            partition_function(&h, &int(1), &caps()).unwrap(),
            int(n as i64)
        );
    }
}
