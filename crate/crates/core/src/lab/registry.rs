//! Registry of computed threshold masses, keyed by kappa and grid.

use std::path::Path;
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::groundstate::GroundStateMeta;

pub const REGISTRY_FILE: &str = "registry.json";

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct Registry {
    pub entries: Vec<GroundStateMeta>,
}

// serializes read-modify-write cycles of concurrent scan rows in one process
static LOCK: Mutex<()> = Mutex::new(());

impl Registry {
    pub fn load(path: &Path) -> Result<Self> {
        if !path.exists() {
            return Ok(Self::default());
        }
        Ok(serde_json::from_slice(&std::fs::read(path)?)?)
    }

    pub fn lookup(&self, kappa: f64, grid: &crate::fields::GridSpec) -> Option<&GroundStateMeta> {
        self.entries.iter().find(|e| e.kappa == kappa && e.grid == *grid)
    }

    /// Threshold mass for kappa on any grid, preferring the finest.
    pub fn threshold(&self, kappa: f64) -> Option<f64> {
        self.entries.iter().filter(|e| e.kappa == kappa).max_by_key(|e| e.grid.n).map(|e| e.mass)
    }

    /// Inserts or replaces the entry for (kappa, grid, method) in the file at `path`.
    pub fn record(path: &Path, meta: &GroundStateMeta) -> Result<()> {
        let _g = LOCK.lock().unwrap_or_else(|e| e.into_inner());
        let mut reg = Self::load(path)?;
        reg.entries.retain(|e| !(e.kappa == meta.kappa && e.grid == meta.grid && e.method == meta.method));
        reg.entries.push(meta.clone());
        reg.entries.sort_by(|a, b| a.kappa.total_cmp(&b.kappa).then(a.grid.n.cmp(&b.grid.n)));
        let tmp = path.with_extension("json.tmp");
        std::fs::write(&tmp, serde_json::to_vec_pretty(&reg)?)?;
        std::fs::rename(tmp, path)?;
        Ok(())
    }
}
