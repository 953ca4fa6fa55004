//! Maximum independent sets of Z_m^n through the labelling
//! `iota : Z_m x {+1,-1}^{n-1} -> I*(Z_m^n)`.
//!
//! `iota(q, eps)` keeps the vertices whose twisted sum
//! `v_1 + eps_1 v_2 + .. + eps_{n-1} v_n` lies in `{q, q+2, .., q+m-3}` mod m.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::caps::Caps;
use crate::count::enumerate_independent;
use crate::error::{domain, Error, Result};
use crate::torus::{ClassIndex, TorusGraph};
use crate::vertex_set::VertexSet;

/// A label `(q, eps_1, .., eps_{n-1})`. Orders by q, then by the sign
/// vector with -1 before +1.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MaxSetLabel {
    pub q: ClassIndex,
    pub eps: Vec<i8>,
}

impl MaxSetLabel {
    pub fn new(q: u32, eps: Vec<i8>) -> Result<Self> {
        if let Some(e) = eps.iter().find(|&&e| e != 1 && e != -1) {
            return Err(domain(format!("sign {e} is not +1 or -1")));
        }
        Ok(MaxSetLabel {
            q: ClassIndex(q),
            eps,
        })
    }

    fn check(&self, g: &TorusGraph) -> Result<()> {
        if self.q.0 >= g.m() {
            return Err(domain(format!("q = {} not in Z_{}", self.q.0, g.m())));
        }
        if self.eps.len() + 1 != g.n() as usize {
            return Err(domain(format!(
                "label has {} signs, Z_{}^{} needs {}",
                self.eps.len(),
                g.m(),
                g.n(),
                g.n() - 1
            )));
        }
        Ok(())
    }
}

/// `q:+-+..`, one sign character per eps entry.
impl fmt::Display for MaxSetLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:", self.q.0)?;
        for &e in &self.eps {
            f.write_str(if e > 0 { "+" } else { "-" })?;
        }
        Ok(())
    }
}

impl FromStr for MaxSetLabel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("label {s:?} is not of the form q:+-.."));
        let (q, signs) = s.split_once(':').ok_or_else(bad)?;
        let q: u32 = q.parse().map_err(|_| bad())?;
        let eps = signs
            .chars()
            .map(|c| match c {
                '+' => Ok(1),
                '-' => Ok(-1),
                _ => Err(bad()),
            })
            .collect::<Result<Vec<i8>>>()?;
        MaxSetLabel::new(q, eps)
    }
}

impl Serialize for MaxSetLabel {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// All m * 2^{n-1} labels in sorted order.
pub fn all_labels(g: &TorusGraph) -> Vec<MaxSetLabel> {
    let k = g.n() as usize - 1;
    let mut out = Vec::with_capacity((g.m() as usize) << k);
    for q in 0..g.m() {
        // Bit i set means eps_i = +1; iterating masks with the first sign as
        // the high bit keeps the sign vectors in lexicographic order.
        for mask in 0u64..1 << k {
            let eps = (0..k)
                .map(|i| if mask >> (k - 1 - i) & 1 == 1 { 1 } else { -1 })
                .collect();
            out.push(MaxSetLabel {
                q: ClassIndex(q),
                eps,
            });
        }
    }
    out
}

fn in_residue_window(t: i64, q: u32, m: u32) -> bool {
    let r = (t - q as i64).rem_euclid(m as i64);
    r % 2 == 0 && r <= m as i64 - 3
}

pub fn iota(g: &TorusGraph, label: &MaxSetLabel) -> Result<VertexSet> {
    label.check(g)?;
    let n = g.n() as usize;
    let mut out = VertexSet::empty(g.vertex_count());
    for v in 0..g.vertex_count() {
        let mut t = g.coord(v, 0) as i64;
        for i in 1..n {
            t += label.eps[i - 1] as i64 * g.coord(v, i) as i64;
        }
        if in_residue_window(t, label.q.0, g.m()) {
            out.insert(v);
        }
    }
    Ok(out)
}

fn not_maximum(g: &TorusGraph, why: &str) -> Error {
    Error::NotMaximum(format!("{why} (in Z_{}^{})", g.m(), g.n()))
}

/// Recovers the label of a maximum independent set from a few probe
/// vertices, then confirms it by regenerating the set.
///
/// On the axis `(x, 0, .., 0)` the twisted sum is x, so the members there
/// are `{q, q+2, .., q+m-3}` and q is the one whose predecessor-by-2 is
/// missing. The vertex with `q-1` in coordinate 1 and `1` in coordinate
/// i+1 has twisted sum `q-1+eps_i`, which is in the window iff eps_i = +1.
pub fn iota_inverse(g: &TorusGraph, set: &VertexSet) -> Result<MaxSetLabel> {
    if set.universe() != g.vertex_count() {
        return Err(domain("vertex set does not belong to this torus"));
    }
    let m = g.m() as usize;
    let n = g.n() as usize;
    let axis = |x: usize| set.contains(x * g.stride(0));
    let starts: Vec<usize> = (0..m)
        .filter(|&x| axis(x) && !axis((x + m - 2) % m))
        .collect();
    let [q] = starts[..] else {
        return Err(not_maximum(g, "axis pattern does not match any label"));
    };
    let eps = (1..n)
        .map(|i| {
            let probe = ((q + m - 1) % m) * g.stride(0) + g.stride(i);
            if set.contains(probe) {
                1
            } else {
                -1
            }
        })
        .collect();
    let label = MaxSetLabel {
        q: ClassIndex(q as u32),
        eps,
    };
    if iota(g, &label)? != *set {
        return Err(not_maximum(g, "probe label does not regenerate the set"));
    }
    Ok(label)
}

/// Tries every label; the oracle for [`iota_inverse`]. Limited to n <= 12.
pub fn iota_inverse_exhaustive(g: &TorusGraph, set: &VertexSet) -> Result<MaxSetLabel> {
    if g.n() > 12 {
        return Err(Error::Unsupported("exhaustive inverse needs n <= 12".into()));
    }
    all_labels(g)
        .into_iter()
        .find(|l| iota(g, l).is_ok_and(|s| s == *set))
        .ok_or_else(|| not_maximum(g, "no label generates the set"))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CrossCheck {
    /// Brute enumeration of the maximum-size independent sets matched the
    /// image of iota exactly.
    Confirmed,
    /// The torus exceeds the brute-force cap; only generation ran.
    Skipped,
    NotRequested,
}

#[derive(Debug, Clone)]
pub struct MaximumSets {
    pub labels: Vec<MaxSetLabel>,
    pub sets: Vec<VertexSet>,
    pub cross_check: CrossCheck,
}

/// All maximum independent sets via iota, in label order.
///
/// Panics if two labels give the same set or a generated set is not an
/// independent set of size ell*m^{n-1}. With `cross_check`, the size class
/// is brute-enumerated (when the torus fits `caps.brute`) and must equal the
/// generated family; a mismatch is returned as an error.
pub fn enumerate_maximum(g: &TorusGraph, cross_check: bool, caps: &Caps) -> Result<MaximumSets> {
    let labels = all_labels(g);
    let sets: Vec<VertexSet> = labels
        .par_iter()
        .map(|l| iota(g, l))
        .collect::<Result<_>>()?;
    let size = g.ell() as usize * g.class_size();
    for s in &sets {
        assert_eq!(s.len(), size, "iota produced a set of the wrong size");
        assert!(g.is_independent(s)?, "iota produced a dependent set");
    }
    let mut sorted = sets.clone();
    sorted.sort();
    sorted.dedup();
    assert_eq!(sorted.len(), sets.len(), "iota is not injective");

    let cross_check = if !cross_check {
        CrossCheck::NotRequested
    } else if g.vertex_count() > caps.brute.min(127) {
        CrossCheck::Skipped
    } else {
        let mut brute: Vec<VertexSet> =
            enumerate_independent(&g.to_generic(), Some(size), None, caps)?.collect();
        brute.sort();
        if brute != sorted {
            return Err(Error::NotMaximum(format!(
                "brute enumeration found {} maximum sets, iota gives {}",
                brute.len(),
                sorted.len()
            )));
        }
        CrossCheck::Confirmed
    };
    Ok(MaximumSets {
        labels,
        sets,
        cross_check,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct IntersectionProfile {
    /// `matrix[i][j] = |iota(l_i) ∩ iota(l_j)|` in label order.
    pub matrix: Vec<Vec<usize>>,
    pub max_off_diagonal: usize,
    /// 3^{n-2}, stated only for m = 3 and n >= 2.
    pub bound: Option<usize>,
    pub within_bound: Option<bool>,
    /// Pairs of disjoint sets whose labels are not `(q, eps)`, `(q±1, eps)`.
    pub disjoint_violations: Vec<(MaxSetLabel, MaxSetLabel)>,
}

pub fn intersection_profile(g: &TorusGraph, family: &MaximumSets) -> IntersectionProfile {
    let k = family.sets.len();
    let matrix: Vec<Vec<usize>> = (0..k)
        .into_par_iter()
        .map(|i| {
            (0..k)
                .map(|j| family.sets[i].intersection_len(&family.sets[j]))
                .collect()
        })
        .collect();
    let mut max_off_diagonal = 0;
    let mut disjoint_violations = Vec::new();
    let m = g.m();
    for i in 0..k {
        for j in i + 1..k {
            max_off_diagonal = max_off_diagonal.max(matrix[i][j]);
            if matrix[i][j] == 0 {
                let (a, b) = (&family.labels[i], &family.labels[j]);
                let shifted = a.eps == b.eps
                    && ((a.q.0 + 1) % m == b.q.0 || (b.q.0 + 1) % m == a.q.0);
                if !shifted {
                    disjoint_violations.push((a.clone(), b.clone()));
                }
            }
        }
    }
    let bound = (m == 3 && g.n() >= 2).then(|| 3usize.pow(g.n() - 2));
    IntersectionProfile {
        within_bound: bound.map(|b| max_off_diagonal <= b),
        matrix,
        max_off_diagonal,
        bound,
        disjoint_violations,
    }
}
