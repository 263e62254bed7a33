//! Entropy of b + 1/z² along the line σ₁ = −6, where σ₂ = 4b³ + 12.

use super::{Config, Status};
use crate::entropy::lap_entropy;
use crate::error::{Error, Result};
use crate::ratmap::QuadMap;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt::Write;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfileRow {
    pub b: f64,
    pub sigma2: f64,
    pub entropy: f64,
    pub error: f64,
    pub status: Status,
}

/// `n` equally spaced b in [b_min, b_max], sorted by σ₂.
pub fn line_profile_sigma6(b_min: f64, b_max: f64, n: usize, cfg: &Config) -> Result<Vec<ProfileRow>> {
    if !(b_min < b_max) || n < 2 {
        return Err(Error::Argument("profile needs b_min < b_max and n >= 2".into()));
    }
    cfg.install(|| {
        (0..n)
            .into_par_iter()
            .map(|i| {
                let b = b_min + (b_max - b_min) * i as f64 / (n - 1) as f64;
                let sigma2 = 4.0 * b * b * b + 12.0;
                let est = QuadMap::new([b, 0.0, 1.0], [1.0, 0.0, 0.0])
                    .and_then(|m| lap_entropy(&m, cfg.lap_n_max, cfg.lap_budget));
                match est {
                    Ok(e) => ProfileRow {
                        b,
                        sigma2,
                        entropy: e.value,
                        error: e.error_bound,
                        status: if e.budget_exhausted { Status::Budget } else { Status::Ok },
                    },
                    Err(_) => ProfileRow { b, sigma2, entropy: f64::NAN, error: f64::NAN, status: Status::Degenerate },
                }
            })
            .collect()
    })
}

pub fn profile_csv(rows: &[ProfileRow]) -> String {
    let mut s = String::from("b,sigma2,entropy,error,status\n");
    for r in rows {
        let _ = writeln!(s, "{},{},{},{},{}", r.b, r.sigma2, r.entropy, r.error, r.status);
    }
    s
}

/// Pairs (i, j), i < j, where entropy rises with σ₂ by more than twice the
/// larger error bound plus `slack`.
pub fn profile_violations(rows: &[ProfileRow], slack: f64) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for i in 0..rows.len() {
        for j in i + 1..rows.len() {
            let allowed = 2.0 * rows[i].error.max(rows[j].error) + slack;
            if rows[j].entropy - rows[i].entropy > allowed {
                out.push((i, j));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nonnegative_offsets_have_zero_entropy() {
        let rows = line_profile_sigma6(0.0, 2.0, 9, &Config::default()).unwrap();
        assert!(rows.iter().all(|r| r.entropy < 1e-3 && r.status == Status::Ok));
        assert!(rows.windows(2).all(|w| w[0].sigma2 <= w[1].sigma2));
    }
}
