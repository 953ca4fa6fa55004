use serde::Serialize;

use crate::error::{Error, Result};

/// Size caps shared by the enumeration routines.
///
/// Overrides use the `key=value,...` form accepted by [`Caps::apply_overrides`],
/// e.g. `subset=25,states=200000,cluster=3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Caps {
    /// Vertex cap for brute-force subset scans (`count_brute`, partition functions).
    pub brute: usize,
    /// Cap on log2 of the number of subsets in an exhaustive isoperimetry sweep.
    pub subset: usize,
    /// Cap on the number of layer states in the transfer matrix.
    pub states: usize,
    /// Largest cluster size the cluster expansion will enumerate.
    pub cluster: usize,
    /// Cap on the number of polymers or clusters produced by one enumeration.
    pub output: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            brute: 30,
            subset: 25,
            states: 200_000,
            cluster: 3,
            output: 20_000_000,
        }
    }
}

impl Caps {
    pub const ENV_VAR: &'static str = "TORUS_INDEP_CAPS";

    pub fn apply_overrides(mut self, spec: &str) -> Result<Self> {
        for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("cap override {item:?} is not key=value")))?;
            let value: usize = value
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("cap {key:?} needs a positive integer")))?;
            if value == 0 {
                return Err(Error::Parse(format!("cap {key:?} must be positive")));
            }
            match key.trim() {
                "brute" => self.brute = value,
                "subset" => self.subset = value,
                "states" => self.states = value,
                "cluster" => self.cluster = value,
                "output" => self.output = value,
                other => return Err(Error::Parse(format!("unknown cap {other:?}"))),
            }
        }
        Ok(self)
    }

    /// Defaults overridden by `TORUS_INDEP_CAPS` when it is set.
    pub fn from_env() -> Result<Self> {
        match std::env::var(Self::ENV_VAR) {
            Ok(spec) => Caps::default().apply_overrides(&spec),
            Err(_) => Ok(Caps::default()),
        }
    }
}
