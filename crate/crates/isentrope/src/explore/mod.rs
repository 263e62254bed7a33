//! Parameter-plane experiments: sweeps, the σ₁ = −6 profile, the
//! disconnected-isentrope demonstration and the table of centers.

mod config;
mod demo;
mod profile;
mod sweep;
mod table;

pub use config::{Config, CONFIG_ENV};
pub use demo::{default_levels, nonmono_demo, DemoCenter, DemoReport, LevelWitness, Witness};
pub use profile::{line_profile_sigma6, profile_csv, profile_violations, ProfileRow};
pub use sweep::{gnuplot_script, sweep, Cell, Region, SweepGrid, SweepMode};
pub use table::{bundled_centers, centers_table, parse_table, table_csv, TableRow, BUNDLED_CENTERS_CSV};

use crate::entropy::{lap_entropy, EntropyEstimate};
use crate::error::{Error, Result};
use crate::ratmap::{MixedNormalForm, ModuliPoint, QuadMap};
use crate::sphere::real_monic_cubic;
use serde::{Deserialize, Serialize};
use std::fmt;

/// Per-item outcome in sweeps and profiles.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Status {
    #[serde(rename = "OK")]
    Ok,
    Budget,
    Degenerate,
    SymmetryLocus,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Ok => "OK",
            Status::Budget => "Budget",
            Status::Degenerate => "Degenerate",
            Status::SymmetryLocus => "SymmetryLocus",
        })
    }
}

/// Representative of a moduli point, with the a² the plus form would need.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Representative {
    pub form: MixedNormalForm,
    pub a_squared: f64,
}

/// Invert (σ₁, σ₂) through the mixed normal form: μ is the real root of
/// z³ − σ₁z² + σ₂z − (σ₁ − 2) of largest modulus, and
/// a² = 1 − (σ₁ + 2 − 4/μ)/μ. When a² < 0 the minus form with b² = −a² is
/// used instead.
pub fn invert_sigma(pt: &ModuliPoint) -> Result<Representative> {
    let roots = real_monic_cubic(-pt.sigma1, pt.sigma2, -(pt.sigma1 - 2.0));
    let mu = roots
        .iter()
        .filter(|z| z.im == 0.0)
        .map(|z| z.re)
        .max_by(|a, b| a.abs().total_cmp(&b.abs()))
        .ok_or_else(|| Error::Degenerate("multiplier cubic has no real root".into()))?;
    if mu.abs() < 1e-12 || !mu.is_finite() {
        return Err(Error::Degenerate(format!("multiplier {mu:e} too small for the normal form")));
    }
    let a2 = 1.0 - (pt.sigma1 + 2.0 - 4.0 / mu) / mu;
    let form = if a2 >= 0.0 { MixedNormalForm::plus(mu, a2.sqrt()) } else { MixedNormalForm::minus(mu, (-a2).sqrt()) };
    Ok(Representative { form, a_squared: a2 })
}

/// Lap entropy at a moduli point with the sweep status rules.
pub fn entropy_at(pt: &ModuliPoint, cfg: &Config) -> (Option<EntropyEstimate>, Status) {
    let Ok(rep) = invert_sigma(pt) else {
        return (None, Status::Degenerate);
    };
    let Ok(map) = rep.form.to_map() else {
        return (None, Status::Degenerate);
    };
    entropy_of(&map, rep.a_squared, cfg)
}

fn entropy_of(map: &QuadMap, a_squared: f64, cfg: &Config) -> (Option<EntropyEstimate>, Status) {
    match lap_entropy(map, cfg.lap_n_max, cfg.lap_budget) {
        Ok(e) => {
            let status = if a_squared < 0.0 && a_squared > -cfg.tol_geometric {
                Status::SymmetryLocus
            } else if e.budget_exhausted {
                Status::Budget
            } else {
                Status::Ok
            };
            (Some(e), status)
        }
        Err(_) => (None, Status::Degenerate),
    }
}

/// Point at parameter s ∈ [0, 1] of the segment from `a` to `b`.
pub fn lerp(a: &ModuliPoint, b: &ModuliPoint, s: f64) -> ModuliPoint {
    ModuliPoint { sigma1: a.sigma1 + s * (b.sigma1 - a.sigma1), sigma2: a.sigma2 + s * (b.sigma2 - a.sigma2) }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratmap::{moduli_point, Variant};

    #[test]
    fn inversion_examples() {
        let r = invert_sigma(&ModuliPoint { sigma1: -10.0, sigma2: 40.0 }).unwrap();
        assert_eq!(r.form.variant, Variant::Plus);
        let r = invert_sigma(&ModuliPoint { sigma1: -20.0, sigma2: 60.0 }).unwrap();
        assert_eq!(r.form.variant, Variant::Minus);
        let pt = ModuliPoint { sigma1: -7.3, sigma2: 3.1 };
        let r = invert_sigma(&pt).unwrap();
        assert!(moduli_point(&r.form.to_map().unwrap(), 1e-9).unwrap().dist(&pt) < 1e-8);
    }

    #[test]
    fn inverse_square_cell_is_ok() {
        let (e, s) = entropy_at(&ModuliPoint { sigma1: -6.0, sigma2: 12.0 }, &Config::default());
        assert_eq!(s, Status::Ok);
        assert!(e.unwrap().value < 1e-3);
    }
}
