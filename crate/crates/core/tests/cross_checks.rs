//! Cross-module checks against small independent oracles.

use torus_indep::isoperimetry::slices;
use torus_indep::maxset::{all_labels, iota_inverse};
use torus_indep::numeric::int;
use torus_indep::polymer::PolymerModel;
use torus_indep::*;

/// Independent sets of a torus by scanning every subset.
fn scan_count(g: &TorusGraph) -> u64 {
    let n = g.vertex_count();
    let adj: Vec<u64> = (0..n)
        .map(|v| g.neighbors(VertexId(v)).unwrap().iter().fold(0u64, |a, u| a | 1 << u.0))
        .collect();
    (0u64..1 << n)
        .filter(|&s| (0..n).all(|v| s >> v & 1 == 0 || s & adj[v] == 0))
        .count() as u64
}

#[test]
fn counts_agree_with_subset_scan() {
    let caps = Caps::default();
    for (m, n) in [(3, 1), (3, 2), (5, 1), (7, 1), (5, 2)] {
        let g = TorusGraph::new(m, n).unwrap();
        if g.vertex_count() > 25 {
            continue;
        }
        let want = scan_count(&g);
        assert_eq!(count_brute(&g, false, &caps).unwrap().total.to_string(), want.to_string());
        assert_eq!(count_transfer(&g, false, &caps).unwrap().total.to_string(), want.to_string());
    }
}

#[test]
fn maximum_sets_round_trip() {
    let caps = Caps::default();
    for (m, n) in [(3, 3), (5, 2), (7, 2)] {
        let g = TorusGraph::new(m, n).unwrap();
        let family = enumerate_maximum(&g, false, &caps).unwrap();
        assert_eq!(family.sets.len(), (m as usize) << (n - 1));
        for (label, set) in family.labels.iter().zip(&family.sets) {
            assert_eq!(&iota_inverse(&g, set).unwrap(), label);
            assert_eq!(set.len(), (m as usize / 2) * g.class_size());
        }
        assert_eq!(all_labels(&g), family.labels);
    }
}

#[test]
fn polymer_identity_on_maximum_ground() {
    let caps = Caps::default();
    let g = TorusGraph::new(3, 2).unwrap();
    let ground = iota(&g, &"0:+".parse().unwrap()).unwrap();
    let check = z_polymer(&PolymerModel::from_torus(&g, ground).unwrap(), &caps).unwrap();
    assert!(check.holds);
    assert_eq!(check.independent_sets.to_string(), "34");
}

#[test]
fn slices_partition_sets() {
    let g = TorusGraph::new(5, 3).unwrap();
    let a = g.class_set(ClassIndex(2)).unwrap();
    let d = slices(&g, &a).unwrap();
    assert_eq!(d.slices.iter().map(VertexSet::len).sum::<usize>(), a.len());
    assert!(d.alphas.iter().all(|x| *x == int(1)));
    for v in slice_bound_check(&g, &a, ClassIndex(2), -1).unwrap() {
        assert!(v.holds);
    }
}

#[test]
fn bounds_table_rows_are_ordered() {
    let rows = compare_table(5, 1..=3, &Caps::default()).unwrap();
    assert_eq!(rows.iter().map(|r| r.n).collect::<Vec<_>>(), vec![1, 2, 3]);
    for r in &rows {
        if r.exact_log2.is_some() {
            assert_eq!(r.cores_below_exact, Some(true));
        }
    }
}
