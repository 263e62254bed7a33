//! Grids over a (σ₁, σ₂) rectangle, evaluated in parallel, written row-major.

use super::{entropy_at, invert_sigma, Config, Status};
use crate::error::{Error, Result};
use crate::pcf::{attracting_rotation_number, hyperbolic_type, HyperbolicType};
use crate::ratmap::ModuliPoint;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt::Write;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SweepMode {
    Entropy,
    HyperbolicType,
    RotationNumber,
}

/// Closed rectangle; a degenerate side is allowed for single rows or cells.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub sigma1: (f64, f64),
    pub sigma2: (f64, f64),
}

impl Region {
    fn node(range: (f64, f64), n: usize, i: usize) -> f64 {
        if n == 1 {
            0.5 * (range.0 + range.1)
        } else {
            range.0 + (range.1 - range.0) * i as f64 / (n - 1) as f64
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub sigma1: f64,
    pub sigma2: f64,
    pub value: f64,
    pub error: f64,
    pub status: Status,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepGrid {
    pub region: Region,
    pub nx: usize,
    pub ny: usize,
    pub mode: SweepMode,
    /// Row-major: σ₂ index outer, σ₁ index inner.
    pub cells: Vec<Cell>,
}

/// Hyperbolic types as numbers in the CSV value column.
pub fn type_code(t: HyperbolicType) -> f64 {
    match t {
        HyperbolicType::Unknown => 0.0,
        HyperbolicType::B => 1.0,
        HyperbolicType::C => 2.0,
        HyperbolicType::D => 3.0,
        HyperbolicType::E => 4.0,
    }
}

fn evaluate(pt: ModuliPoint, mode: SweepMode, cfg: &Config) -> Cell {
    let cell = |value: f64, error: f64, status: Status| Cell { sigma1: pt.sigma1, sigma2: pt.sigma2, value, error, status };
    match mode {
        SweepMode::Entropy => match entropy_at(&pt, cfg) {
            (Some(e), status) => cell(e.value, e.error_bound, status),
            (None, status) => cell(f64::NAN, f64::NAN, status),
        },
        SweepMode::HyperbolicType | SweepMode::RotationNumber => {
            let Ok(map) = invert_sigma(&pt).and_then(|r| r.form.to_map()) else {
                return cell(f64::NAN, f64::NAN, Status::Degenerate);
            };
            if mode == SweepMode::HyperbolicType {
                match hyperbolic_type(&map, cfg.orbit_budget) {
                    Ok(HyperbolicType::Unknown) => cell(0.0, 0.0, Status::Budget),
                    Ok(t) => cell(type_code(t), 0.0, Status::Ok),
                    Err(_) => cell(f64::NAN, f64::NAN, Status::Degenerate),
                }
            } else {
                match attracting_rotation_number(&map, cfg.orbit_budget) {
                    Ok(Some(r)) => cell(r.p as f64 / r.q as f64, 0.0, Status::Ok),
                    Ok(None) => cell(f64::NAN, 0.0, Status::Budget),
                    Err(_) => cell(f64::NAN, f64::NAN, Status::Degenerate),
                }
            }
        }
    }
}

/// Evaluate every node of an nx × ny grid. Cells are independent, so the
/// output does not depend on the thread count.
pub fn sweep(region: Region, nx: usize, ny: usize, mode: SweepMode, cfg: &Config) -> Result<SweepGrid> {
    let finite = [region.sigma1.0, region.sigma1.1, region.sigma2.0, region.sigma2.1].iter().all(|v| v.is_finite());
    if nx == 0 || ny == 0 || !finite {
        return Err(Error::Argument("sweep needs a finite region and nx, ny >= 1".into()));
    }
    let cells = cfg.install(|| {
        (0..nx * ny)
            .into_par_iter()
            .map(|k| {
                let (j, i) = (k / nx, k % nx);
                let pt = ModuliPoint {
                    sigma1: Region::node(region.sigma1, nx, i),
                    sigma2: Region::node(region.sigma2, ny, j),
                };
                evaluate(pt, mode, cfg)
            })
            .collect()
    })?;
    Ok(SweepGrid { region, nx, ny, mode, cells })
}

impl SweepGrid {
    pub const CSV_HEADER: &'static str = "sigma1,sigma2,value,error,status";

    pub fn to_csv(&self) -> String {
        let mut s = String::with_capacity(64 * self.cells.len());
        s.push_str(Self::CSV_HEADER);
        s.push('\n');
        for c in &self.cells {
            let _ = writeln!(s, "{},{},{},{},{}", c.sigma1, c.sigma2, c.value, c.error, c.status);
        }
        s
    }

    /// Cells whose status is not OK.
    pub fn failures(&self) -> usize {
        self.cells.iter().filter(|c| c.status != Status::Ok).count()
    }
}

/// Gnuplot script drawing the CSV as a heat map with contour bands.
pub fn gnuplot_script(csv_path: &str, grid: &SweepGrid, bands: usize) -> String {
    let title = match grid.mode {
        SweepMode::Entropy => "real entropy",
        SweepMode::HyperbolicType => "hyperbolic type (1=B 2=C 3=D 4=E)",
        SweepMode::RotationNumber => "rotation number",
    };
    format!(
        "set datafile separator ','\n\
         set title '{title}'\n\
         set xlabel 'sigma1'\nset ylabel 'sigma2'\n\
         set palette maxcolors {bands}\n\
         set view map\n\
         set dgrid3d {ny},{nx}\n\
         splot '{csv_path}' every ::1 using 1:2:3 with pm3d notitle\n",
        nx = grid.nx,
        ny = grid.ny,
    )
}
