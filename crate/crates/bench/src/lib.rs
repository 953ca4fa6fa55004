//! Inputs shared by the criterion benches in `benches/`.

use torus_indep::maxset::all_labels;
use torus_indep::polymer::PolymerModel;
use torus_indep::{iota, TorusGraph};

pub fn torus(m: u32, n: u32) -> TorusGraph {
    TorusGraph::new(m, n).expect("bench tori are valid")
}

/// The polymer model over the first maximum set of Z_m^n.
pub fn polymer_model(m: u32, n: u32) -> PolymerModel {
    let g = torus(m, n);
    let ground = iota(&g, &all_labels(&g)[0]).expect("label is valid");
    PolymerModel::from_torus(&g, ground).expect("ground is independent")
}
