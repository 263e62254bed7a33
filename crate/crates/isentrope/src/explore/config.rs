//! Flat key-value configuration. Values come from defaults, then the TOML
//! file named by `MODSPACE_CONFIG`, then command-line flags.

use crate::entropy::{DEFAULT_BUDGET, DEFAULT_N_MAX};
use crate::error::{Error, Result};
use crate::pcf::SeedStrategy;
use serde::{Deserialize, Serialize};
use std::path::Path;

pub const CONFIG_ENV: &str = "MODSPACE_CONFIG";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    /// Tolerance for algebraic identities.
    pub tol_identity: f64,
    /// Tolerance for geometric coincidences.
    pub tol_geometric: f64,
    pub lap_n_max: usize,
    /// Memoized recursion states allowed per lap count.
    pub lap_budget: usize,
    /// Iterations allowed when following critical orbits.
    pub orbit_budget: usize,
    /// Worker threads; 0 uses the global pool.
    pub threads: usize,
    pub blowup_threshold: f64,
    /// Center solver seed grid size (log|μ| values, a values).
    pub seed_grid: [usize; 2],
    /// Extra (μ, a) seeds for the center solver.
    pub seeds: Vec<[f64; 2]>,
    /// Probe target for the 1/q center.
    pub anchor_low: [f64; 2],
    /// Probe target for the p/q center.
    pub anchor_high: [f64; 2],
    pub probe_scan: usize,
    pub witness_tol: f64,
    pub barrier_tol: f64,
    pub barrier_samples: usize,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            tol_identity: 1e-9,
            tol_geometric: 1e-6,
            lap_n_max: DEFAULT_N_MAX,
            lap_budget: DEFAULT_BUDGET,
            orbit_budget: 2000,
            threads: 0,
            blowup_threshold: crate::moduli::DEFAULT_BLOWUP,
            seed_grid: [25, 20],
            seeds: Vec::new(),
            anchor_low: [-4.0, 12.0],
            anchor_high: [-7.0, 14.0],
            probe_scan: 80,
            witness_tol: 0.02,
            barrier_tol: 0.01,
            barrier_samples: 50,
        }
    }
}

impl Config {
    pub fn parse(text: &str) -> Result<Config> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Config> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Config::parse(&text)
    }

    /// Defaults, overridden by the file in `MODSPACE_CONFIG` when set.
    pub fn from_env() -> Result<Config> {
        match std::env::var_os(CONFIG_ENV) {
            Some(p) if !p.is_empty() => Config::load(Path::new(&p)),
            _ => Ok(Config::default()),
        }
    }

    pub fn seed_strategy(&self) -> SeedStrategy {
        SeedStrategy {
            n_log_mu: self.seed_grid[0],
            n_a: self.seed_grid[1],
            extra: self.seeds.iter().map(|s| (s[0], s[1])).collect(),
            ..SeedStrategy::default()
        }
    }

    /// Run `f` on a pool with `threads` workers (the global pool when 0).
    pub fn install<R: Send>(&self, f: impl FnOnce() -> R + Send) -> Result<R> {
        if self.threads == 0 {
            return Ok(f());
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(self.threads)
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
        Ok(pool.install(f))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partial_file_keeps_defaults() {
        let c = Config::parse("lap_n_max = 30\nseeds = [[-5.0, -0.5]]\n").unwrap();
        assert_eq!(c.lap_n_max, 30);
        assert_eq!(c.seeds, vec![[-5.0, -0.5]]);
        assert_eq!(c.orbit_budget, Config::default().orbit_budget);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(Config::parse("lap_nmax = 3").is_err());
    }
}
