//! Quadratic Blaschke products B_a(w) = ((1−ā)/(1−a))·w(w − a)/(1 − āw),
//! which fix 0 and 1, and the return map G_t = B_t∘B_t for real a = t.

use crate::error::{Error, Result};
use crate::sphere::{quadratic_roots, real_monic_cubic};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

pub fn blaschke_apply(a: Complex64, w: Complex64) -> Result<Complex64> {
    if a.norm() >= 1.0 {
        return Err(Error::Domain(format!("|a| = {} is not below 1", a.norm())));
    }
    if w.norm() > 1.0 + 1e-12 {
        return Err(Error::Domain(format!("|w| = {} exceeds 1", w.norm())));
    }
    let one = Complex64::new(1.0, 0.0);
    Ok((one - a.conj()) / (one - a) * w * (w - a) / (one - a.conj() * w))
}

/// B_t(w) = w(w − t)/(1 − tw).
fn b(t: f64, w: Complex64) -> Complex64 {
    w * (w - t) / (1.0 - t * w)
}

/// B_t′(w) = (−tw² + 2w − t)/(1 − tw)².
fn db(t: f64, w: Complex64) -> Complex64 {
    let d = 1.0 - t * w;
    (-t * w * w + 2.0 * w - t) / (d * d)
}

/// λ(t) = 1 + (t − 1)(t − 3).
pub fn lambda_formula(t: f64) -> f64 {
    1.0 + (t - 1.0) * (t - 3.0)
}

fn check_t(t: f64) -> Result<()> {
    if (0.0..1.0).contains(&t) {
        Ok(())
    } else {
        Err(Error::Domain(format!("t = {t} is outside [0, 1)")))
    }
}

/// The critical point of B_t in the open disk, a root of −tw² + 2w − t.
pub fn disk_critical_point(t: f64) -> Result<f64> {
    check_t(t)?;
    if t == 0.0 {
        return Ok(0.0);
    }
    let roots = quadratic_roots(-t, 2.0, -t).ok_or_else(|| Error::Degenerate("zero derivative".into()))?;
    roots
        .iter()
        .filter_map(|p| p.as_real(1e-12))
        .find(|x| x.abs() < 1.0)
        .ok_or_else(|| Error::NoConvergence("no critical point inside the disk".into()))
}

/// Fixed points and multipliers of G_t. Flat so rows export directly to CSV.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReturnMapAnalysis {
    pub t: f64,
    pub multiplier_at_0: f64,
    pub multiplier_at_1: f64,
    pub rho_plus_re: f64,
    pub rho_plus_im: f64,
    pub rho_minus_re: f64,
    pub rho_minus_im: f64,
    pub lambda_numeric: f64,
    pub lambda_formula: f64,
    /// |2/(1−λ) + 2/(1−t²) + 1/(1−(2/(1−t))²) − 1| with the numeric values.
    pub fixed_point_residual: f64,
}

impl ReturnMapAnalysis {
    pub fn rho_plus(&self) -> Complex64 {
        Complex64::new(self.rho_plus_re, self.rho_plus_im)
    }

    pub fn rho_minus(&self) -> Complex64 {
        Complex64::new(self.rho_minus_re, self.rho_minus_im)
    }

    pub const CSV_HEADER: &'static str =
        "t,multiplier_at_0,multiplier_at_1,rho_plus_re,rho_plus_im,lambda_numeric,lambda_formula,fixed_point_residual";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            self.t,
            self.multiplier_at_0,
            self.multiplier_at_1,
            self.rho_plus_re,
            self.rho_plus_im,
            self.lambda_numeric,
            self.lambda_formula,
            self.fixed_point_residual
        )
    }
}

fn poly_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_add(a: &[f64], b: &[f64], s: f64) -> Vec<f64> {
    let n = a.len().max(b.len());
    (0..n).map(|i| a.get(i).copied().unwrap_or(0.0) + s * b.get(i).copied().unwrap_or(0.0)).collect()
}

/// Divide by (w − r) (coefficients low first), dropping the remainder.
fn deflate(c: &[f64], r: f64) -> Vec<f64> {
    let n = c.len() - 1;
    let mut q = vec![0.0; n];
    let mut acc = 0.0;
    for i in (0..n).rev() {
        acc = c[i + 1] + acc * r;
        q[i] = acc;
    }
    q
}

/// G_t(w) = w with denominators cleared: P² − tPQ − w(Q² − tPQ), where
/// B_t = P/Q. Roots 0 and 1 are known; ρ± are the other two.
pub fn return_map_analysis(t: f64, tol: f64) -> Result<ReturnMapAnalysis> {
    check_t(t)?;
    let p = [0.0, -t, 1.0];
    let q = [1.0, -t];
    let pq = poly_mul(&p, &q);
    let num = poly_add(&poly_mul(&p, &p), &pq, -t);
    let den = poly_add(&poly_mul(&q, &q), &pq, -t);
    let fixed = poly_add(&num, &poly_mul(&[0.0, 1.0], &den), -1.0);
    let cubic = deflate(&fixed, 1.0);
    let lead = cubic[3];
    let roots = real_monic_cubic(cubic[2] / lead, cubic[1] / lead, cubic[0] / lead);
    let mut pair: Vec<Complex64> = roots.iter().copied().filter(|z| z.norm() > 0.5).collect();
    if pair.len() != 2 || pair[0].im.abs() < 1e-9 {
        return Err(Error::NoConvergence(format!("could not isolate the non-real fixed points at t = {t}")));
    }
    pair.sort_by(|x, y| y.im.total_cmp(&x.im));
    let (rp, rm) = (pair[0], pair[1]);
    let g_prime = |w: Complex64| db(t, b(t, w)) * db(t, w);
    let lam = g_prime(rp);
    let lam_m = g_prime(rm);
    let m0 = db(t, Complex64::new(0.0, 0.0)).norm_sqr();
    let d1 = db(t, Complex64::new(1.0, 0.0)).re;
    let m1 = d1 * d1;
    let one = Complex64::new(1.0, 0.0);
    let identity = 2.0 * (one - lam).inv() + 2.0 / (1.0 - m0) + 1.0 / (1.0 - m1);
    let out = ReturnMapAnalysis {
        t,
        multiplier_at_0: m0,
        multiplier_at_1: m1,
        rho_plus_re: rp.re,
        rho_plus_im: rp.im,
        rho_minus_re: rm.re,
        rho_minus_im: rm.im,
        lambda_numeric: lam.re,
        lambda_formula: lambda_formula(t),
        fixed_point_residual: (identity - one).norm(),
    };
    let checks = [
        ("rho on the unit circle", (rp.norm() - 1.0).abs().max((rm.norm() - 1.0).abs())),
        ("rho pair conjugate", (rp - rm.conj()).norm()),
        ("lambda real and shared", lam.im.abs().max((lam - lam_m.conj()).norm())),
        ("lambda formula", (lam.re - out.lambda_formula).abs()),
        ("fixed point formula", out.fixed_point_residual),
    ];
    for (what, residual) in checks {
        if !(residual < tol) {
            return Err(Error::Tolerance { what, residual, tol });
        }
    }
    Ok(out)
}

/// The disk |M − 2πip/q| < log λ(t) containing the log-multipliers of the
/// non-real fixed points, with its image under exp.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PetersenDisk {
    pub center_im: f64,
    pub radius: f64,
    /// e^{2πip/q}, the limit as t ↑ 1.
    pub limit_multiplier: (f64, f64),
    /// exp of the disk lies in this modulus annulus ...
    pub modulus_range: (f64, f64),
    /// ... and in this argument window.
    pub angle_range: (f64, f64),
}

impl PetersenDisk {
    pub fn center(&self) -> Complex64 {
        Complex64::new(0.0, self.center_im)
    }

    pub fn contains_log(&self, m: Complex64) -> bool {
        (m - self.center()).norm() < self.radius
    }
}

pub fn petersen_disk(t: f64, p: usize, q: usize) -> Result<PetersenDisk> {
    if !(t > 0.0 && t < 1.0) {
        return Err(Error::Domain(format!("t = {t} is outside (0, 1)")));
    }
    if q < 2 || crate::entropy::gcd(p as u64, q as u64) != 1 {
        return Err(Error::Argument(format!("need q >= 2 and gcd(p, q) = 1, got {p}/{q}")));
    }
    let angle = 2.0 * PI * p as f64 / q as f64;
    let r = lambda_formula(t).ln();
    Ok(PetersenDisk {
        center_im: angle,
        radius: r,
        limit_multiplier: (angle.cos(), angle.sin()),
        modulus_range: ((-r).exp(), r.exp()),
        angle_range: (angle - r, angle + r),
    })
}
