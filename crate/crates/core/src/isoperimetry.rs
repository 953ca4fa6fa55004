//! Vertex-isoperimetry between consecutive residue classes of Z_m^n.
//!
//! For A ⊆ E(p) with α = |A| / m^{n-1} the inequality checked here is
//!
//! ```text
//! |N(A, E(p ± 1))| >= |A| (1 + (1 - α) / sqrt(ℓ³ m n))
//! ```
//!
//! Verdicts never take square roots: with M = m^{n-1} and a = |A| the
//! inequality is `N - a >= 0` and `(N - a)² M² ℓ³ m n >= a² (M - a)²`.

use num_bigint::BigUint;
use rand::seq::index::sample;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::caps::Caps;
use crate::count::enumerate_independent;
use crate::error::{domain, Error, Result};
use crate::maxset::{iota, MaxSetLabel};
use crate::numeric::{rat, rational_serde, ExactRational};
use crate::torus::{ClassIndex, TorusGraph};
use crate::vertex_set::VertexSet;

/// Logical worker count for sampled sweeps. Fixed so that a seed alone
/// determines the report, whatever the thread pool size.
pub const SAMPLE_WORKERS: usize = 8;

fn check_dir(dir: i32) -> Result<i64> {
    match dir {
        1 | -1 => Ok(dir as i64),
        _ => Err(domain(format!("direction must be +1 or -1, got {dir}"))),
    }
}

/// `a <= b * sqrt(c)` for non-negative integers, decided exactly.
fn le_sqrt(a: u128, b: u128, c: u128) -> bool {
    match (a.checked_mul(a), b.checked_mul(b).and_then(|bb| bb.checked_mul(c))) {
        (Some(lhs), Some(rhs)) => lhs <= rhs,
        _ => BigUint::from(a) * a <= BigUint::from(b) * b * c,
    }
}

/// Constants of the inequality for one torus.
#[derive(Debug, Clone, Copy)]
struct Shape {
    /// m^{n-1}
    big_m: u128,
    /// ℓ³ m n
    k: u128,
}

impl Shape {
    fn of(g: &TorusGraph) -> Self {
        let ell = g.ell() as u128;
        Shape {
            big_m: g.class_size() as u128,
            k: ell * ell * ell * g.m() as u128 * g.n() as u128,
        }
    }

    /// Exact verdict for |A| = a with |N(A, E(p±1))| = nb.
    fn holds(&self, a: u128, nb: u128) -> bool {
        // (nb - a) M sqrt(k) >= a (M - a)
        nb >= a && le_sqrt(a * (self.big_m - a), (nb - a) * self.big_m, self.k)
    }

    /// a (1 + (1 - α)/sqrt(k)), the right-hand side, as a float.
    fn rhs(&self, a: u128) -> f64 {
        let (a, m) = (a as f64, self.big_m as f64);
        a + a * (m - a) / (m * (self.k as f64).sqrt())
    }

    /// Smallest neighbourhood size that satisfies the inequality at each
    /// |A| = a, or M + 1 when none does.
    fn need_min(&self) -> Vec<u32> {
        (0..=self.big_m)
            .map(|a| {
                (a..=self.big_m)
                    .find(|&nb| self.holds(a, nb))
                    .unwrap_or(self.big_m + 1) as u32
            })
            .collect()
    }
}

/// |N(A) ∩ E(p + dir)| for A ⊆ E(p).
pub fn directed_boundary(g: &TorusGraph, a: &VertexSet, p: ClassIndex, dir: i32) -> Result<usize> {
    let dir = check_dir(dir)?;
    let class = g.class_set(p)?;
    if a.universe() != g.vertex_count() || !a.is_subset(&class) {
        return Err(domain(format!("set is not contained in E({p})")));
    }
    let target = g.class_set(g.class_index(p.0 as i64 + dir))?;
    Ok(g.neighborhood(a, Some(&target))?.len())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Slack {
    pub size: usize,
    pub boundary: usize,
    /// boundary - |A|(1 + (1-α)/sqrt(ℓ³mn)), for display.
    pub slack: f64,
    /// The exact verdict.
    pub holds: bool,
}

pub fn theorem3_check(g: &TorusGraph, a: &VertexSet, p: ClassIndex, dir: i32) -> Result<Slack> {
    let boundary = directed_boundary(g, a, p, dir)?;
    let shape = Shape::of(g);
    let size = a.len();
    Ok(Slack {
        size,
        boundary,
        slack: boundary as f64 - shape.rhs(size as u128),
        holds: shape.holds(size as u128, boundary as u128),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepMode {
    Exhaustive,
    Sampled,
}

#[derive(Debug, Clone, Serialize)]
pub struct IsoReport {
    pub m: u32,
    pub n: u32,
    pub p: u32,
    pub dir: i32,
    pub mode: SweepMode,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
    pub tested: u64,
    /// Minimum slack over tested A with 0 < |A| < m^{n-1}; the empty set
    /// and the full class have slack exactly 0.
    pub min_slack: Option<f64>,
    /// The same minimum for each size |A| = 0..=m^{n-1} (None if untested).
    pub min_slack_by_size: Vec<Option<f64>>,
    pub worst_witness: Option<VertexSet>,
    pub violations: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_violation: Option<VertexSet>,
}

impl IsoReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

/// Precomputed source/target layout for one (p, dir).
struct Layout {
    sources: Vec<usize>,
    /// Target-class indices adjacent to each source.
    adj: Vec<Vec<u32>>,
    targets: usize,
    shape: Shape,
    need_min: Vec<u32>,
}

impl Layout {
    fn new(g: &TorusGraph, p: ClassIndex, dir: i32) -> Result<Self> {
        let dir = check_dir(dir)?;
        let sources: Vec<usize> = g.class_set(p)?.iter().collect();
        let target_set = g.class_set(g.class_index(p.0 as i64 + dir))?;
        let mut index = vec![u32::MAX; g.vertex_count()];
        for (i, t) in target_set.iter().enumerate() {
            index[t] = i as u32;
        }
        let adj = sources
            .iter()
            .map(|&s| {
                let mut l = Vec::new();
                g.for_each_neighbor(s, |u| {
                    if index[u] != u32::MAX {
                        l.push(index[u]);
                    }
                });
                l
            })
            .collect();
        let shape = Shape::of(g);
        Ok(Layout {
            need_min: shape.need_min(),
            sources,
            adj,
            targets: target_set.len(),
            shape,
        })
    }

    fn witness(&self, g: &TorusGraph, picks: impl Iterator<Item = usize>) -> VertexSet {
        VertexSet::from_indices(g.vertex_count(), picks.map(|i| self.sources[i])).unwrap()
    }
}

/// Running minimum and violation tally; merged in a fixed order so the
/// earliest minimiser wins ties.
#[derive(Clone)]
struct Tally<W> {
    tested: u64,
    best: Option<(f64, W)>,
    by_size: Vec<Option<f64>>,
    violations: u64,
    first_violation: Option<W>,
}

impl<W: Clone> Tally<W> {
    fn new(sizes: usize) -> Self {
        Tally {
            tested: 0,
            best: None,
            by_size: vec![None; sizes],
            violations: 0,
            first_violation: None,
        }
    }

    #[inline]
    fn record(&mut self, lay: &Layout, a: usize, nb: u32, witness: impl FnOnce() -> W + Clone) {
        self.tested += 1;
        if nb < lay.need_min[a] {
            self.violations += 1;
            if self.first_violation.is_none() {
                self.first_violation = Some(witness.clone()());
            }
        }
        let slack = nb as f64 - lay.shape.rhs(a as u128);
        if self.by_size[a].is_none_or(|s| slack < s) {
            self.by_size[a] = Some(slack);
        }
        if a > 0 && a < lay.sources.len() && self.best.as_ref().is_none_or(|(s, _)| slack < *s) {
            self.best = Some((slack, witness()));
        }
    }

    fn merge(mut self, o: Self) -> Self {
        self.tested += o.tested;
        if let Some((s, w)) = o.best {
            if self.best.as_ref().is_none_or(|(b, _)| s < *b) {
                self.best = Some((s, w));
            }
        }
        for (x, y) in self.by_size.iter_mut().zip(o.by_size) {
            if let Some(y) = y {
                if x.is_none_or(|x| y < x) {
                    *x = Some(y);
                }
            }
        }
        self.violations += o.violations;
        if self.first_violation.is_none() {
            self.first_violation = o.first_violation;
        }
        self
    }
}

/// Every subset of E(p), visited in Gray-code order so each step toggles
/// one vertex and updates n target counters.
pub fn verify_theorem_exhaustive(g: &TorusGraph, p: ClassIndex, dir: i32, caps: &Caps) -> Result<IsoReport> {
    let lay = Layout::new(g, p, dir)?;
    let k = lay.sources.len();
    if k > caps.subset || k > 40 {
        return Err(Error::CapExceeded {
            what: "class size for the exhaustive subset sweep",
            value: k as u128,
            limit: caps.subset.min(40) as u128,
            hint: "use sampled mode (verify_theorem_sampled / --mode sampled)".into(),
        });
    }
    let total: u64 = 1 << k;
    let blocks: u64 = total.min(256);
    let per = total / blocks;
    let tally = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let (start, end) = (b * per, (b + 1) * per);
            let mut cnt = vec![0u8; lay.targets];
            let mut nb = 0u32;
            let mut a = 0usize;
            let toggle = |s: usize, add: bool, cnt: &mut [u8], nb: &mut u32| {
                for &t in &lay.adj[s] {
                    let c = &mut cnt[t as usize];
                    if add {
                        *c += 1;
                        if *c == 1 {
                            *nb += 1;
                        }
                    } else {
                        *c -= 1;
                        if *c == 0 {
                            *nb -= 1;
                        }
                    }
                }
            };
            let mut code = start ^ (start >> 1);
            for s in 0..k {
                if code >> s & 1 == 1 {
                    toggle(s, true, &mut cnt, &mut nb);
                    a += 1;
                }
            }
            let mut t: Tally<u64> = Tally::new(k + 1);
            t.record(&lay, a, nb, || code);
            for i in start + 1..end {
                let s = i.trailing_zeros() as usize;
                code ^= 1 << s;
                let add = code >> s & 1 == 1;
                toggle(s, add, &mut cnt, &mut nb);
                if add {
                    a += 1;
                } else {
                    a -= 1;
                }
                let c = code;
                t.record(&lay, a, nb, move || c);
            }
            t
        })
        .collect::<Vec<_>>()
        .into_iter()
        .reduce(Tally::merge)
        .expect("at least one block");
    let as_set = |code: u64| lay.witness(g, (0..k).filter(move |s| code >> s & 1 == 1));
    Ok(IsoReport {
        m: g.m(),
        n: g.n(),
        p: p.0,
        dir,
        mode: SweepMode::Exhaustive,
        samples: None,
        seed: None,
        workers: None,
        tested: tally.tested,
        min_slack: tally.best.as_ref().map(|b| b.0),
        min_slack_by_size: tally.by_size,
        worst_witness: tally.best.map(|b| as_set(b.1)),
        violations: tally.violations,
        first_violation: tally.first_violation.map(as_set),
    })
}

fn worker_rng(seed: u64, worker: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(worker as u64);
    rng
}

/// Seeded random subsets of E(p), stratified by size: sample i has size
/// `i mod (m^{n-1} + 1)`, so every density from α = 0 to α = 1 is covered
/// equally.
pub fn verify_theorem_sampled(
    g: &TorusGraph,
    p: ClassIndex,
    dir: i32,
    samples: u64,
    seed: u64,
) -> Result<IsoReport> {
    let lay = Layout::new(g, p, dir)?;
    let k = lay.sources.len();
    let chunk = samples.div_ceil(SAMPLE_WORKERS as u64);
    let tally = (0..SAMPLE_WORKERS)
        .into_par_iter()
        .map(|w| {
            let mut rng = worker_rng(seed, w);
            let start = w as u64 * chunk;
            let end = ((w as u64 + 1) * chunk).min(samples);
            let mut t: Tally<Vec<usize>> = Tally::new(k + 1);
            let mut cnt = vec![0u8; lay.targets];
            for i in start..end {
                let a = (i % (k as u64 + 1)) as usize;
                let picks = sample(&mut rng, k, a).into_vec();
                let mut nb = 0u32;
                for &s in &picks {
                    for &x in &lay.adj[s] {
                        if cnt[x as usize] == 0 {
                            nb += 1;
                        }
                        cnt[x as usize] += 1;
                    }
                }
                t.record(&lay, a, nb, || picks.clone());
                for &s in &picks {
                    for &x in &lay.adj[s] {
                        cnt[x as usize] = 0;
                    }
                }
            }
            t
        })
        .collect::<Vec<_>>()
        .into_iter()
        .reduce(Tally::merge)
        .expect("at least one worker");
    let as_set = |picks: Vec<usize>| lay.witness(g, picks.into_iter());
    Ok(IsoReport {
        m: g.m(),
        n: g.n(),
        p: p.0,
        dir,
        mode: SweepMode::Sampled,
        samples: Some(samples),
        seed: Some(seed),
        workers: Some(SAMPLE_WORKERS),
        tested: tally.tested,
        min_slack: tally.best.as_ref().map(|b| b.0),
        min_slack_by_size: tally.by_size,
        worst_witness: tally.best.map(|b| as_set(b.1)),
        violations: tally.violations,
        first_violation: tally.first_violation.map(as_set),
    })
}

/// The slices A_q = {w ∈ Z_m^{n-1} : (w, q) ∈ A} along the last coordinate.
#[derive(Debug, Clone, Serialize)]
pub struct SliceDecomposition {
    pub slices: Vec<VertexSet>,
    /// |A_q| / m^{n-2}.
    #[serde(serialize_with = "rationals")]
    pub alphas: Vec<ExactRational>,
}

fn rationals<S: serde::Serializer>(v: &[ExactRational], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(crate::numeric::rational_string))
}

pub fn slices(g: &TorusGraph, a: &VertexSet) -> Result<SliceDecomposition> {
    if g.n() < 2 {
        return Err(Error::Unsupported("slices need n >= 2".into()));
    }
    let m = g.m() as usize;
    let width = g.class_size();
    let mut slices = vec![VertexSet::empty(width); m];
    for v in a.iter() {
        slices[v % m].insert(v / m);
    }
    let alphas = slices
        .iter()
        .map(|s| rat(s.len() as i64, (width / m) as i64))
        .collect();
    Ok(SliceDecomposition { slices, alphas })
}

#[derive(Debug, Clone, Serialize)]
pub struct SliceVerdict {
    pub q: u32,
    /// |N(A, E(p+dir))_q|
    pub boundary: usize,
    /// |N_{n-1}(A_q, E^{n-1}(p - q + dir))|
    pub within_slice: usize,
    /// |A_{q - dir}|
    pub carried: usize,
    pub holds: bool,
}

/// Per-slice lower bounds: the q-th slice of N(A, E(p+dir)) contains both
/// the neighbourhood of A_q inside the slice and a copy of A_{q-dir}.
pub fn slice_bound_check(g: &TorusGraph, a: &VertexSet, p: ClassIndex, dir: i32) -> Result<Vec<SliceVerdict>> {
    let d = check_dir(dir)?;
    if g.n() < 2 {
        return Err(Error::Unsupported("slice bounds need n >= 2".into()));
    }
    let class = g.class_set(p)?;
    if !a.is_subset(&class) {
        return Err(domain(format!("set is not contained in E({p})")));
    }
    let target = g.class_set(g.class_index(p.0 as i64 + d))?;
    let boundary = slices(g, &g.neighborhood(a, Some(&target))?)?;
    let parts = slices(g, a)?;
    let layer = TorusGraph::new(g.m(), g.n() - 1)?;
    let m = g.m() as i64;
    (0..m)
        .map(|q| {
            let inner_class = layer.class_set(layer.class_index(p.0 as i64 - q + d))?;
            let within_slice = layer
                .neighborhood(&parts.slices[q as usize], Some(&inner_class))?
                .len();
            let carried = parts.slices[(q - d).rem_euclid(m) as usize].len();
            let b = boundary.slices[q as usize].len();
            Ok(SliceVerdict {
                q: q as u32,
                boundary: b,
                within_slice,
                carried,
                holds: b >= within_slice.max(carried),
            })
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct CorollaryVerdict {
    pub neighborhood: usize,
    pub size: usize,
    pub max_class_part: usize,
    /// Right-hand side as a float, for display.
    pub bound: f64,
    pub holds: bool,
}

/// |N(A)| >= |A| + max_p |A ∩ E(p)| + (m^{n-1}/sqrt(ℓ³mn)) Σ α_p(1-α_p) for
/// A inside the classes of an independent set P of the m-cycle.
pub fn corollary_check(g: &TorusGraph, classes: &[u32], a: &VertexSet) -> Result<CorollaryVerdict> {
    let m = g.m();
    if classes.is_empty() {
        return Err(domain("P must be nonempty"));
    }
    let mut sorted = classes.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != classes.len() || sorted.iter().any(|&p| p >= m) {
        return Err(domain("P must be distinct residues mod m"));
    }
    for &p in &sorted {
        if sorted.contains(&((p + 1) % m)) {
            return Err(domain(format!("P is not independent in C_{m}")));
        }
    }
    let sets = g.class_sets();
    let mut parts = Vec::new();
    let mut covered = VertexSet::empty(g.vertex_count());
    for &p in &sorted {
        parts.push(a.intersection_len(&sets[p as usize]));
        covered.union_with(&sets[p as usize]);
    }
    if !a.is_subset(&covered) {
        return Err(domain("set leaves the classes of P"));
    }
    let shape = Shape::of(g);
    let big_m = shape.big_m;
    let neighborhood = g.neighborhood(a, None)?.len();
    let max_class_part = parts.iter().copied().max().unwrap_or(0);
    let spread: u128 = parts.iter().map(|&x| x as u128 * (big_m - x as u128)).sum();
    // Σ α(1-α) M / sqrt(k) = spread / (M sqrt(k)).
    let base = a.len() + max_class_part;
    let holds = neighborhood >= base && le_sqrt(spread, (neighborhood - base) as u128 * big_m, shape.k);
    Ok(CorollaryVerdict {
        neighborhood,
        size: a.len(),
        max_class_part,
        bound: base as f64 + spread as f64 / (big_m as f64 * (shape.k as f64).sqrt()),
        holds,
    })
}

fn m3_pair(n: u32) -> Result<(TorusGraph, VertexSet, VertexSet)> {
    if n < 2 {
        return Err(domain("the construction needs n >= 2"));
    }
    let g = TorusGraph::new(3, n)?;
    let plus = |first: i8| {
        let mut eps = vec![1i8; n as usize - 1];
        eps[0] = first;
        MaxSetLabel::new(0, eps)
    };
    let i0 = iota(&g, &plus(1)?)?;
    let i1 = iota(&g, &plus(-1)?)?;
    Ok((g, i0, i1))
}

#[derive(Debug, Clone, Serialize)]
pub struct Counterexample {
    pub n: u32,
    pub set: VertexSet,
    pub size: usize,
    /// |A| / |Ī_0|
    #[serde(with = "rational_serde")]
    pub ratio: ExactRational,
    /// |N(A, I_0)|
    pub boundary: usize,
    /// |A| = 2·3^{n-2}, ratio 1/3 and |N(A, I_0)| = |A|.
    pub certified: bool,
}

/// A = Ī_0 ∩ I_1 in Z_3^n with I_0 = iota(0,+,..,+), I_1 = iota(0,-,+,..,+):
/// a third of Ī_0 whose I_0-neighbourhood is no larger than itself.
pub fn counterexample_construct(n: u32) -> Result<Counterexample> {
    let (g, i0, i1) = m3_pair(n)?;
    let comp = i0.complement();
    let set = comp.intersection(&i1);
    let boundary = g.neighborhood(&set, Some(&i0))?.len();
    let size = set.len();
    let ratio = rat(size as i64, comp.len() as i64);
    let expect = 2 * 3usize.pow(n - 2);
    Ok(Counterexample {
        n,
        certified: size == expect && ratio == rat(1, 3) && boundary == size,
        set,
        size,
        ratio,
        boundary,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ConjectureRow {
    pub c: f64,
    /// Sets A with |N(A, E(0))| < |A|(1 + (1 - 3|A|/|Ī_0|)/(C sqrt n)).
    pub violations: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConjectureProbe {
    pub n: u32,
    pub mode: SweepMode,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub sets_tested: u64,
    /// Sets with 1 - 3|A|/|Ī_0| > 0, the only ones that constrain C.
    pub sets_constraining: u64,
    /// Smallest C that works for every tested set (infinite if some set has
    /// no neighbourhood surplus at all).
    pub worst_c: f64,
    pub worst_witness: Option<VertexSet>,
    pub grid: Vec<ConjectureRow>,
}

/// Evidence for the conjectured inequality on independent A ⊆ Ī_0 in
/// Z_3^n. Exhaustive over all independent subsets when
/// |Ī_0| = 2·3^{n-1} <= 20, otherwise `samples` seeded random independent
/// sets stratified by size. Asserts nothing.
pub fn conjecture_probe(n: u32, c_grid: &[f64], samples: u64, seed: u64, caps: &Caps) -> Result<ConjectureProbe> {
    if n < 2 {
        return Err(domain("the probe needs n >= 2"));
    }
    let (g, i0, _) = m3_pair(n)?;
    let comp = i0.complement();
    let h = g.induced_subgraph(&comp)?;
    let back: Vec<usize> = h.back_map().unwrap().iter().map(|v| v.0).collect();
    let total = comp.len() as f64;
    let sqrt_n = (n as f64).sqrt();

    struct Acc {
        tested: u64,
        constraining: u64,
        worst: Option<(f64, Vec<usize>)>,
        grid: Vec<u64>,
    }
    let eval = |acc: &mut Acc, picks: &[usize]| {
        acc.tested += 1;
        let a = picks.len() as f64;
        let f = 1.0 - 3.0 * a / total;
        if picks.is_empty() || f <= 0.0 {
            return;
        }
        acc.constraining += 1;
        let set = VertexSet::from_indices(g.vertex_count(), picks.iter().map(|&i| back[i])).unwrap();
        let nb = g.neighborhood(&set, Some(&i0)).unwrap().len() as f64;
        let need = if nb <= a { f64::INFINITY } else { a * f / ((nb - a) * sqrt_n) };
        if acc.worst.as_ref().is_none_or(|(w, _)| need > *w) {
            acc.worst = Some((need, picks.to_vec()));
        }
        for (slot, &c) in acc.grid.iter_mut().zip(c_grid) {
            if nb < a * (1.0 + f / (c * sqrt_n)) {
                *slot += 1;
            }
        }
    };
    let new_acc = || Acc {
        tested: 0,
        constraining: 0,
        worst: None,
        grid: vec![0; c_grid.len()],
    };
    let merge = |mut x: Acc, y: Acc| {
        x.tested += y.tested;
        x.constraining += y.constraining;
        if let Some((w, p)) = y.worst {
            if x.worst.as_ref().is_none_or(|(b, _)| w > *b) {
                x.worst = Some((w, p));
            }
        }
        for (a, b) in x.grid.iter_mut().zip(y.grid) {
            *a += b;
        }
        x
    };

    let exhaustive = comp.len() <= 20;
    let acc = if exhaustive {
        let mut acc = new_acc();
        for s in enumerate_independent(&h, None, None, caps)? {
            let picks: Vec<usize> = s.iter().collect();
            eval(&mut acc, &picks);
        }
        acc
    } else {
        let k = comp.len();
        let chunk = samples.div_ceil(SAMPLE_WORKERS as u64);
        (0..SAMPLE_WORKERS)
            .into_par_iter()
            .map(|w| {
                let mut rng = worker_rng(seed, w);
                let mut acc = new_acc();
                let end = ((w as u64 + 1) * chunk).min(samples);
                for i in w as u64 * chunk..end {
                    // Random-order greedy fill up to a target size; the
                    // target sweeps 1..=|Ī_0|/3.
                    let target = 1 + (i % (k as u64 / 3)) as usize;
                    let mut order: Vec<usize> = (0..k).collect();
                    order.shuffle(&mut rng);
                    let mut picks = Vec::with_capacity(target);
                    for &v in &order {
                        if picks.len() == target {
                            break;
                        }
                        if picks.iter().all(|&u| !h.has_edge(u, v)) {
                            picks.push(v);
                        }
                    }
                    picks.sort_unstable();
                    eval(&mut acc, &picks);
                }
                acc
            })
            .collect::<Vec<_>>()
            .into_iter()
            .reduce(merge)
            .expect("workers")
    };
    Ok(ConjectureProbe {
        n,
        mode: if exhaustive { SweepMode::Exhaustive } else { SweepMode::Sampled },
        seed: (!exhaustive).then_some(seed),
        sets_tested: acc.tested,
        sets_constraining: acc.constraining,
        worst_c: acc.worst.as_ref().map_or(0.0, |w| w.0),
        worst_witness: acc
            .worst
            .map(|(_, p)| VertexSet::from_indices(g.vertex_count(), p.into_iter().map(|i| back[i])).unwrap()),
        grid: c_grid
            .iter()
            .zip(acc.grid)
            .map(|(&c, violations)| ConjectureRow { c, violations })
            .collect(),
    })
}

/// `samples` seeded subsets of `pool`, stratified by size like the
/// sampled sweep. Single stream, so the order is fixed by the seed.
pub fn sample_subsets(pool: &VertexSet, samples: u64, seed: u64) -> Vec<VertexSet> {
    let items: Vec<usize> = pool.iter().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..samples)
        .map(|i| {
            let a = (i % (items.len() as u64 + 1)) as usize;
            let picks = sample(&mut rng, items.len(), a);
            VertexSet::from_indices(pool.universe(), picks.iter().map(|j| items[j])).unwrap()
        })
        .collect()
}

/// Outcome of running a per-set check over seeded random sets.
#[derive(Debug, Clone, Serialize)]
pub struct SampledCheck {
    pub samples: u64,
    pub seed: u64,
    pub failures: u64,
    pub first_failure: Option<VertexSet>,
}

impl SampledCheck {
    fn run(sets: Vec<VertexSet>, seed: u64, check: impl Fn(&VertexSet) -> Result<bool> + Sync) -> Result<Self> {
        let verdicts: Vec<bool> = sets.par_iter().map(&check).collect::<Result<_>>()?;
        let first = verdicts.iter().position(|ok| !ok);
        Ok(SampledCheck {
            samples: sets.len() as u64,
            seed,
            failures: verdicts.iter().filter(|ok| !**ok).count() as u64,
            first_failure: first.map(|i| sets[i].clone()),
        })
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

/// [`slice_bound_check`] on seeded random subsets of E(p); a set fails if
/// any of its slices does.
pub fn slice_sweep(g: &TorusGraph, p: ClassIndex, dir: i32, samples: u64, seed: u64) -> Result<SampledCheck> {
    let sets = sample_subsets(&g.class_set(p)?, samples, seed);
    SampledCheck::run(sets, seed, |a| {
        Ok(slice_bound_check(g, a, p, dir)?.iter().all(|v| v.holds))
    })
}

/// [`corollary_check`] on seeded random subsets of the classes in P.
pub fn corollary_sweep(g: &TorusGraph, classes: &[u32], samples: u64, seed: u64) -> Result<SampledCheck> {
    let sets = g.class_sets();
    let mut pool = VertexSet::empty(g.vertex_count());
    for &p in classes {
        let s = sets
            .get(p as usize)
            .ok_or_else(|| domain(format!("class {p} not in Z_{}", g.m())))?;
        pool.union_with(s);
    }
    SampledCheck::run(sample_subsets(&pool, samples, seed), seed, |a| {
        Ok(corollary_check(g, classes, a)?.holds)
    })
}

/// If `alpha[q-1] <= alpha[q] + delta` for all q (cyclically), every term
/// lies within (m-1)/2 · delta of the mean. Returns whether the hypothesis
/// held; the conclusion is then checked by the caller.
pub fn circular_hypothesis(alpha: &[f64], delta: f64) -> bool {
    let m = alpha.len();
    (0..m).all(|q| alpha[(q + m - 1) % m] <= alpha[q] + delta)
}

/// Largest |alpha_q - mean|.
pub fn max_deviation(alpha: &[f64]) -> f64 {
    let mean = alpha.iter().sum::<f64>() / alpha.len() as f64;
    alpha.iter().map(|x| (x - mean).abs()).fold(0.0, f64::max)
}

/// ℓ copies of a, ℓ copies of b and (for odd m) one copy of (a+b)/2: the
/// claimed minimiser of Σ g(x) for concave g at fixed mean (a+b)/2.
pub fn concavity_minimizer(a: f64, b: f64, m: usize) -> Vec<f64> {
    let ell = m / 2;
    let mut out = vec![a; ell];
    out.extend(std::iter::repeat_n(b, ell));
    if m % 2 == 1 {
        out.push((a + b) / 2.0);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn set(g: &TorusGraph, pts: &[&[u32]]) -> VertexSet {
        VertexSet::from_indices(g.vertex_count(), pts.iter().map(|p| g.encode(p).unwrap().0)).unwrap()
    }

    #[test]
    fn boundary_examples() {
        let g = TorusGraph::new(3, 2).unwrap();
        let p0 = ClassIndex(0);
        assert_eq!(directed_boundary(&g, &VertexSet::empty(9), p0, 1).unwrap(), 0);
        let e0 = g.class_set(p0).unwrap();
        assert_eq!(directed_boundary(&g, &e0, p0, 1).unwrap(), 3);
        let a = set(&g, &[&[0, 0]]);
        assert_eq!(directed_boundary(&g, &a, p0, 1).unwrap(), 2);
        let c = theorem3_check(&g, &a, p0, 1).unwrap();
        assert!(c.holds);
        assert!((c.slack - (2.0 - (1.0 + (2.0 / 3.0) / 6f64.sqrt()))).abs() < 1e-12);
        let full = theorem3_check(&g, &e0, p0, -1).unwrap();
        assert!(full.holds && full.slack.abs() < 1e-12);
        assert!(directed_boundary(&g, &set(&g, &[&[0, 1]]), p0, 1).is_err());
        assert!(directed_boundary(&g, &a, p0, 2).is_err());
    }

    #[test]
    fn exact_verdict_matches_float_away_from_ties() {
        let g = TorusGraph::new(5, 3).unwrap();
        let shape = Shape::of(&g);
        for a in 0..=25u128 {
            for nb in 0..=25u128 {
                let f = nb as f64 - shape.rhs(a);
                if f.abs() > 1e-9 {
                    assert_eq!(shape.holds(a, nb), f > 0.0, "a={a} nb={nb}");
                }
            }
        }
    }

    #[test]
    fn exhaustive_small() {
        let caps = Caps::default();
        for (m, n, tested) in [(3, 2, 8u64), (3, 3, 512), (5, 2, 32)] {
            let g = TorusGraph::new(m, n).unwrap();
            for dir in [1, -1] {
                let r = verify_theorem_exhaustive(&g, ClassIndex(0), dir, &caps).unwrap();
                assert_eq!(r.tested, tested);
                assert_eq!(r.violations, 0);
                let w = r.worst_witness.unwrap();
                let again = theorem3_check(&g, &w, ClassIndex(0), dir).unwrap();
                assert_eq!(Some(again.slack), r.min_slack);
                assert_eq!(r.min_slack_by_size[0], Some(0.0));
            }
        }
        let g = TorusGraph::new(3, 4).unwrap();
        assert!(verify_theorem_exhaustive(&g, ClassIndex(0), 1, &caps).is_err());
    }

    #[test]
    fn exhaustive_matches_direct_evaluation() {
        let g = TorusGraph::new(3, 3).unwrap();
        let p = ClassIndex(1);
        let r = verify_theorem_exhaustive(&g, p, 1, &Caps::default()).unwrap();
        let class: Vec<usize> = g.class_set(p).unwrap().iter().collect();
        let mut best = f64::INFINITY;
        for mask in 1u32..(1 << 9) - 1 {
            let a = VertexSet::from_indices(27, (0..9).filter(|i| mask >> i & 1 == 1).map(|i| class[i])).unwrap();
            best = best.min(theorem3_check(&g, &a, p, 1).unwrap().slack);
        }
        assert_eq!(r.min_slack, Some(best));
    }

    #[test]
    fn sampled_is_deterministic() {
        let g = TorusGraph::new(3, 4).unwrap();
        let a = verify_theorem_sampled(&g, ClassIndex(2), 1, 3000, 7).unwrap();
        let b = verify_theorem_sampled(&g, ClassIndex(2), 1, 3000, 7).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        assert_eq!(a.violations, 0);
        assert_eq!(a.tested, 3000);
        // The full class is sampled in the top stratum with slack 0.
        assert_eq!(a.min_slack_by_size[27], Some(0.0));
    }

    #[test]
    fn slice_examples() {
        let g = TorusGraph::new(3, 3).unwrap();
        let p = ClassIndex(0);
        let e0 = g.class_set(p).unwrap();
        for v in slice_bound_check(&g, &e0, p, 1).unwrap() {
            assert!(v.holds);
            assert_eq!((v.boundary, v.carried), (3, 3));
        }
        let one = set(&g, &[&[0, 0, 0]]);
        let verdicts = slice_bound_check(&g, &one, p, 1).unwrap();
        assert_eq!(verdicts[1].carried, 1);
        assert!(verdicts.iter().all(|v| v.holds));
        let d = slices(&g, &e0).unwrap();
        assert_eq!(d.slices.iter().map(VertexSet::len).sum::<usize>(), 9);
        assert!(slice_bound_check(&TorusGraph::new(3, 1).unwrap(), &VertexSet::empty(3), p, 1).is_err());
    }

    #[test]
    fn corollary_examples() {
        let g = TorusGraph::new(5, 2).unwrap();
        let sets = g.class_sets();
        let a = sets[0].union(&sets[2]);
        let v = corollary_check(&g, &[0, 2], &a).unwrap();
        assert!(v.holds);
        assert_eq!(v.neighborhood, 15);
        assert!(corollary_check(&g, &[0, 1], &a).is_err());
        assert!(corollary_check(&g, &[], &a).is_err());
        assert!(corollary_check(&g, &[0], &a).is_err());
        let single = corollary_check(&g, &[3], &set(&g, &[&[1, 2]])).unwrap();
        assert!(single.holds);
    }

    #[test]
    fn sweeps() {
        let g = TorusGraph::new(5, 3).unwrap();
        let s = slice_sweep(&g, ClassIndex(1), 1, 500, 11).unwrap();
        assert!(s.passed() && s.samples == 500);
        let c = corollary_sweep(&g, &[0, 2], 300, 4).unwrap();
        assert!(c.passed());
        assert!(corollary_sweep(&g, &[0, 1], 10, 4).is_err());
        let a = sample_subsets(&g.class_set(ClassIndex(0)).unwrap(), 30, 9);
        assert_eq!(a, sample_subsets(&g.class_set(ClassIndex(0)).unwrap(), 30, 9));
        assert_eq!(a[25].len(), 25);
    }

    #[test]
    fn counterexamples() {
        for n in 2..=6 {
            let c = counterexample_construct(n).unwrap();
            assert!(c.certified, "n={n}");
            assert_eq!(c.size, 2 * 3usize.pow(n - 2));
        }
        assert!(counterexample_construct(1).is_err());
    }

    #[test]
    fn conjecture_probe_small() {
        let caps = Caps::default();
        let p2 = conjecture_probe(2, &[1.0, 10.0], 0, 0, &caps).unwrap();
        assert_eq!(p2.mode, SweepMode::Exhaustive);
        assert!(p2.worst_c.is_finite());
        assert_eq!(p2.grid[1].violations, 0);
        let p3 = conjecture_probe(3, &[1.0, 4.0], 0, 0, &caps).unwrap();
        assert!(p3.sets_tested > 100);
        let p4 = conjecture_probe(4, &[2.0], 500, 3, &caps).unwrap();
        assert_eq!(p4.mode, SweepMode::Sampled);
        assert_eq!(p4.sets_tested, 500);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn circular_averaging(alpha in prop::collection::vec(0.0f64..1.0, 3..12), delta in 0.01f64..0.5) {
            if circular_hypothesis(&alpha, delta) {
                let m = alpha.len() as f64;
                prop_assert!(max_deviation(&alpha) <= (m - 1.0) / 2.0 * delta + 1e-12);
            }
        }

        #[test]
        fn circular_averaging_tight_delta(alpha in prop::collection::vec(0.0f64..1.0, 3..12)) {
            // The smallest δ for which the hypothesis holds.
            let m = alpha.len();
            let delta = (0..m).map(|q| alpha[(q + m - 1) % m] - alpha[q]).fold(0.0, f64::max);
            prop_assert!(circular_hypothesis(&alpha, delta + 1e-12));
            prop_assert!(max_deviation(&alpha) <= (m as f64 - 1.0) / 2.0 * delta + 1e-12);
        }

        #[test]
        fn concavity(a in 0.0f64..0.9, width in 0.01f64..0.5, m in 2usize..10, seed in any::<u64>()) {
            use rand::Rng;
            let b = (a + width).min(1.0);
            let g = |x: f64| x * (1.0 - x);
            let best: f64 = concavity_minimizer(a, b, m).into_iter().map(g).sum();
            let mean = (a + b) / 2.0;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            // Random points of [a, b]^m rescaled towards a or b until their
            // mean is (a + b)/2.
            for _ in 0..10_000 {
                let xs: Vec<f64> = (0..m).map(|_| rng.gen_range(a..=b)).collect();
                let cur = xs.iter().sum::<f64>() / m as f64;
                let xs: Vec<f64> = if cur > mean {
                    let t = (mean - a) / (cur - a);
                    xs.iter().map(|x| a + (x - a) * t).collect()
                } else if cur < mean {
                    let t = (b - mean) / (b - cur);
                    xs.iter().map(|x| b - (b - x) * t).collect()
                } else {
                    xs
                };
                let total: f64 = xs.iter().copied().map(g).sum();
                prop_assert!(best <= total + 1e-12);
            }
        }
    }
}
