//! Numerical evidence that an isentrope is disconnected. The centers f_{1/q}
//! and f_{p/q} share the entropy h_q > h₃ but sit on opposite sides of a
//! barrier on which the entropy never exceeds h₃. Walking from each center
//! towards low entropy, the intermediate value theorem yields, for each level
//! h ∈ (h₃, h_q], a point of entropy h on each side.

use super::{entropy_at, lerp, Config, Status};
use crate::entropy::{lap_entropy, root_of_pq};
use crate::error::{Error, Result};
use crate::moduli::{choose_numerator, side_of_barrier, BarrierCurve, Side};
use crate::pcf::{find_center, PcfCenter};
use crate::ratmap::ModuliPoint;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DemoCenter {
    pub q: usize,
    pub p: usize,
    pub moduli: ModuliPoint,
    pub entropy: f64,
    pub error: f64,
    pub residual: f64,
    pub side: Side,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub point: ModuliPoint,
    /// Position along the probe segment, 0 at the center.
    pub s: f64,
    pub entropy: f64,
    pub error: f64,
    pub side: Side,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelWitness {
    pub level: f64,
    /// From the 1/q center and from the p/q center.
    pub witnesses: [Option<Witness>; 2],
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BarrierSample {
    pub point: ModuliPoint,
    pub entropy: f64,
    pub error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DemoReport {
    pub q: usize,
    pub p: usize,
    pub h3: f64,
    pub hq: f64,
    /// 1/q, p/q, 1/3 in that order.
    pub centers: Vec<DemoCenter>,
    pub barrier_vertices: usize,
    pub barrier_simple: bool,
    pub barrier_samples: Vec<BarrierSample>,
    pub levels: Vec<LevelWitness>,
    pub centers_match: bool,
    pub centers_opposite: bool,
    pub barrier_below_h3: bool,
    /// Always "numerical evidence": nothing here is a proof.
    pub note: String,
}

impl DemoReport {
    pub fn levels_passed(&self) -> usize {
        self.levels.iter().filter(|l| l.passed).count()
    }

    /// Every contract of the demonstration holds with at least `min_levels`
    /// successful levels.
    pub fn passed(&self, min_levels: usize) -> bool {
        self.centers_match && self.centers_opposite && self.barrier_below_h3 && self.barrier_simple && self.levels_passed() >= min_levels
    }

    pub fn barrier_max(&self) -> f64 {
        self.barrier_samples.iter().map(|s| s.entropy).fold(f64::NEG_INFINITY, f64::max)
    }
}

impl fmt::Display for DemoReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "demonstration q={} p={} ({})", self.q, self.p, self.note)?;
        writeln!(f, "h3={:.6} hq={:.6}", self.h3, self.hq)?;
        for c in &self.centers {
            writeln!(
                f,
                "center {}/{}: sigma=({:.6}, {:.6}) entropy={:.6}±{:.1e} side={:?}",
                c.p, c.q, c.moduli.sigma1, c.moduli.sigma2, c.entropy, c.error, c.side
            )?;
        }
        writeln!(f, "centers share entropy: {}; opposite sides: {}", self.centers_match, self.centers_opposite)?;
        writeln!(
            f,
            "barrier: {} vertices, simple={}, {} samples, max entropy {:.6} (<= h3 + tol: {})",
            self.barrier_vertices,
            self.barrier_simple,
            self.barrier_samples.len(),
            self.barrier_max(),
            self.barrier_below_h3
        )?;
        for l in &self.levels {
            write!(f, "level {:.6}: {}", l.level, if l.passed { "pass" } else { "FAIL" })?;
            for w in l.witnesses.iter().flatten() {
                write!(
                    f,
                    " [({:.6}, {:.6}) h={:.6} side={:?}]",
                    w.point.sigma1, w.point.sigma2, w.entropy, w.side
                )?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

fn demo_center(c: &PcfCenter, barrier: &BarrierCurve, cfg: &Config) -> Result<DemoCenter> {
    let h = lap_entropy(&c.map, cfg.lap_n_max, cfg.lap_budget)?;
    Ok(DemoCenter {
        q: c.q,
        p: c.p,
        moduli: c.moduli,
        entropy: h.value,
        error: h.error_bound,
        residual: c.residual,
        side: side_of_barrier(&c.moduli, barrier),
    })
}

fn entropy_value(pt: &ModuliPoint, cfg: &Config) -> Option<(f64, f64)> {
    match entropy_at(pt, cfg) {
        (Some(e), Status::Ok | Status::Budget) => Some((e.value, e.error_bound)),
        _ => None,
    }
}

/// Scan the segment `from` → `to`, then bisect the first bracket of `level`.
fn find_witness(
    from: &ModuliPoint,
    to: &ModuliPoint,
    level: f64,
    scan: &[(f64, Option<(f64, f64)>)],
    barrier: &BarrierCurve,
    cfg: &Config,
) -> Option<Witness> {
    let mut bracket = None;
    for w in scan.windows(2) {
        if let ((s0, Some((h0, _))), (s1, Some((h1, _)))) = (w[0], w[1]) {
            if (h0 - level) * (h1 - level) <= 0.0 {
                bracket = Some((s0, h0, s1));
                break;
            }
        }
    }
    let (mut lo, h_lo, mut hi) = bracket?;
    let above_at_lo = h_lo >= level;
    let mut best: Option<Witness> = None;
    let mut consider = |s: f64, h: f64, e: f64| {
        let point = lerp(from, to, s);
        let w = Witness { point, s, entropy: h, error: e, side: side_of_barrier(&point, barrier) };
        if best.map_or(true, |b| (b.entropy - level).abs() > (h - level).abs()) {
            best = Some(w);
        }
    };
    for &(s, v) in scan {
        if let Some((h, e)) = v {
            if s >= lo && s <= hi {
                consider(s, h, e);
            }
        }
    }
    for _ in 0..40 {
        let mid = 0.5 * (lo + hi);
        let Some((h, e)) = entropy_value(&lerp(from, to, mid), cfg) else { break };
        consider(mid, h, e);
        if (h - level).abs() < 0.1 * cfg.witness_tol {
            break;
        }
        if (h >= level) == above_at_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    best
}

/// Default levels: just above h₃, h₃ + 0.05, the midpoint, and h_q − 0.01.
pub fn default_levels(h3: f64, hq: f64) -> Vec<f64> {
    vec![h3 + 1e-3, h3 + 0.05, 0.5 * (h3 + hq), hq - 0.01]
}

/// Run the demonstration for q > 12. Empty `levels` uses [`default_levels`].
pub fn nonmono_demo(q: usize, levels: &[f64], cfg: &Config) -> Result<DemoReport> {
    let p = choose_numerator(q)?;
    let seeds = cfg.seed_strategy();
    let c1 = find_center(q, 1, &seeds)?;
    let cp = find_center(q, p, &seeds)?;
    let c3 = find_center(3, 1, &seeds)?;
    if c3.c0 != 1.0 {
        return Err(Error::Precondition("1/3 center not in the c0 = +1 labeling".into()));
    }
    let barrier = BarrierCurve::standard(&c3.params)?;
    let h3 = root_of_pq(3, 1e-15)?.value;
    let hq = root_of_pq(q, 1e-15)?.value;
    let centers = vec![demo_center(&c1, &barrier, cfg)?, demo_center(&cp, &barrier, cfg)?, demo_center(&c3, &barrier, cfg)?];
    let centers_match = (centers[0].entropy - centers[1].entropy).abs() <= cfg.witness_tol
        && centers[0].entropy.min(centers[1].entropy) > h3 + 0.05;
    let centers_opposite = centers[0].side != centers[1].side
        && centers[0].side != Side::OnBarrier
        && centers[1].side != Side::OnBarrier;

    let n = cfg.barrier_samples.max(2);
    let n_ray = n / 5;
    let samples = barrier.sample_maps(n_ray, n - n_ray, 2.0)?;
    let barrier_samples: Vec<BarrierSample> = cfg.install(|| {
        samples
            .par_iter()
            .map(|(pt, m)| {
                let (entropy, error) = lap_entropy(m, cfg.lap_n_max, cfg.lap_budget)
                    .map(|e| (e.value, e.error_bound))
                    .unwrap_or((f64::NAN, f64::NAN));
                BarrierSample { point: *pt, entropy, error }
            })
            .collect()
    })?;
    let barrier_below_h3 = barrier_samples.iter().all(|s| s.entropy <= h3 + cfg.barrier_tol);

    let anchors = [
        ModuliPoint::new(cfg.anchor_low[0], cfg.anchor_low[1])?,
        ModuliPoint::new(cfg.anchor_high[0], cfg.anchor_high[1])?,
    ];
    let starts = [centers[0].moduli, centers[1].moduli];
    let m = cfg.probe_scan.max(2);
    let scans: Vec<Vec<(f64, Option<(f64, f64)>)>> = cfg.install(|| {
        (0..2)
            .map(|k| {
                (0..=m)
                    .into_par_iter()
                    .map(|i| {
                        let s = i as f64 / m as f64;
                        (s, entropy_value(&lerp(&starts[k], &anchors[k], s), cfg))
                    })
                    .collect()
            })
            .collect()
    })?;
    let levels: Vec<f64> = if levels.is_empty() { default_levels(h3, hq) } else { levels.to_vec() };
    let level_reports: Vec<LevelWitness> = cfg.install(|| {
        levels
            .par_iter()
            .map(|&level| {
                let witnesses = [0, 1].map(|k| find_witness(&starts[k], &anchors[k], level, &scans[k], &barrier, cfg));
                let passed = level > h3
                    && level <= hq + 1e-12
                    && match witnesses {
                        [Some(a), Some(b)] => {
                            (a.entropy - level).abs() < cfg.witness_tol
                                && (b.entropy - level).abs() < cfg.witness_tol
                                && a.side != b.side
                                && a.side != Side::OnBarrier
                                && b.side != Side::OnBarrier
                        }
                        _ => false,
                    };
                LevelWitness { level, witnesses, passed }
            })
            .collect()
    })?;

    Ok(DemoReport {
        q,
        p,
        h3,
        hq,
        centers,
        barrier_vertices: barrier.vertices.len(),
        barrier_simple: barrier.is_simple(),
        barrier_samples,
        levels: level_reports,
        centers_match,
        centers_opposite,
        barrier_below_h3,
        note: "numerical evidence, not a proof".into(),
    })
}
