//! Bitransitive post-critically finite centers f_{p/q}: location by Newton's
//! method in the mixed normal form, verification of their combinatorics, and
//! hyperbolic type and rotation number detection for arbitrary real maps.
//!
//! In the mixed normal form (1/μ)(z + 1/z) + a the critical points are ±1.
//! With c₀ = +1 and c₁ = −1 the critical orbit of f_{p/q} runs through
//! x_{kp} = f^k(c₀), all points other than c₀, c₁ lying in (−1, 1), and the
//! points are met in the order x₀, x₁, …, x_{q−1} going once around ℝ̂ in
//! the positive direction.

use crate::entropy::gcd;
use crate::error::{Error, Result};
use crate::ratmap::{MixedNormalForm, ModuliPoint, QuadMap};
use crate::sphere::{ccw, real_chordal, theta, wrap, Point};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt;

/// Accepted forward residual.
pub const CENTER_TOL: f64 = 1e-10;
/// Residual below which a backward solve counts as converged.
const BACKWARD_TOL: f64 = 1e-12;
const FD_STEP: f64 = 1e-7;
const MAX_NEWTON: usize = 60;
/// Orbit checks (e), (f), (d).
const ORBIT_TOL: f64 = 1e-8;

/// Multi-start seeds in (log(−μ), a).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeedStrategy {
    pub n_log_mu: usize,
    pub n_a: usize,
    pub log_mu_range: (f64, f64),
    pub a_range: (f64, f64),
    /// Extra (μ, a) seeds tried alongside the grid.
    #[serde(default)]
    pub extra: Vec<(f64, f64)>,
}

impl Default for SeedStrategy {
    fn default() -> Self {
        SeedStrategy {
            n_log_mu: 25,
            n_a: 20,
            log_mu_range: (2.1f64.ln(), 3000f64.ln()),
            a_range: (-0.95, 0.95),
            extra: Vec::new(),
        }
    }
}

impl SeedStrategy {
    fn seeds(&self) -> Vec<[f64; 2]> {
        let lin = |(lo, hi): (f64, f64), n: usize, i: usize| {
            if n <= 1 {
                0.5 * (lo + hi)
            } else {
                lo + (hi - lo) * i as f64 / (n - 1) as f64
            }
        };
        let mut out: Vec<[f64; 2]> = (0..self.n_log_mu)
            .flat_map(|i| (0..self.n_a).map(move |j| (i, j)))
            .map(|(i, j)| [lin(self.log_mu_range, self.n_log_mu, i), lin(self.a_range, self.n_a, j)])
            .collect();
        out.extend(self.extra.iter().filter(|(mu, _)| *mu < 0.0).map(|&(mu, a)| [(-mu).ln(), a]));
        out
    }
}

/// A located center.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PcfCenter {
    pub q: usize,
    pub p: usize,
    /// p·p′ ≡ 1 mod q.
    pub pprime: usize,
    pub params: MixedNormalForm,
    /// Value of c₀ (±1); c₁ = −c₀.
    pub c0: f64,
    pub map: QuadMap,
    /// x₀..x_{q−1}, with x_{kp} = f^k(c₀).
    pub orbit: Vec<f64>,
    pub moduli: ModuliPoint,
    pub residual: f64,
    /// Inverse condition estimate of the final Newton Jacobian.
    pub conditioning: f64,
    pub zeta_cycle: Option<Vec<f64>>,
}

/// Flat serialized form of a center.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CenterRecord {
    pub q: usize,
    pub p: usize,
    pub mu: f64,
    pub a: f64,
    pub sigma1: f64,
    pub sigma2: f64,
    pub residual: f64,
}

impl PcfCenter {
    pub fn record(&self) -> CenterRecord {
        CenterRecord {
            q: self.q,
            p: self.p,
            mu: self.params.mu,
            a: self.params.a,
            sigma1: self.moduli.sigma1,
            sigma2: self.moduli.sigma2,
            residual: self.residual,
        }
    }

    pub fn c1(&self) -> f64 {
        -self.c0
    }
}

pub fn mod_inverse(p: usize, q: usize) -> Option<usize> {
    (1..q.max(2)).find(|k| (k * p) % q == 1 % q)
}

fn mix(x: f64, mu: f64, a: f64) -> f64 {
    (x + 1.0 / x) / mu + a
}

/// Branch of f⁻¹ landing in [−1, 1]; `None` where y has no real preimage.
fn back(y: f64, mu: f64, a: f64) -> Option<f64> {
    let t = mu * (y - a);
    let d = t * t - 4.0;
    (d >= 0.0).then(|| 0.5 * (t - d.sqrt().copysign(t)))
}

/// (f(c₁) − g^{q−p′−1}(c₀), f(c₀) − g^{p′−1}(c₁)) with c₀ = +1, g the
/// backward branch into [−1, 1].
fn backward_residual(u: [f64; 2], q: usize, pp: usize) -> Option<[f64; 2]> {
    if !(0.0 < u[0] && u[0] < 12.0 && -1.5 < u[1] && u[1] < 1.5) {
        return None;
    }
    let (mu, a) = (-u[0].exp(), u[1]);
    let mut y = 1.0;
    for _ in 0..q - pp - 1 {
        y = back(y, mu, a)?;
    }
    let e1 = (-2.0 / mu + a) - y;
    let mut y = -1.0;
    for _ in 0..pp - 1 {
        y = back(y, mu, a)?;
    }
    Some([e1, (2.0 / mu + a) - y])
}

/// (f^{p′}(c₀) − c₁, f^{q−p′}(c₁) − c₀) with c₀ = +1.
fn forward_residual(u: [f64; 2], q: usize, pp: usize) -> Option<[f64; 2]> {
    if !(u[0] > 0.0 && u[0] < 12.0) {
        return None;
    }
    let (mu, a) = (-u[0].exp(), u[1]);
    let x = (0..pp).fold(1.0, |x, _| mix(x, mu, a));
    let y = (0..q - pp).fold(-1.0, |x, _| mix(x, mu, a));
    let r = [x + 1.0, y - 1.0];
    r.iter().all(|v| v.is_finite()).then_some(r)
}

fn norm(r: [f64; 2]) -> f64 {
    r[0].abs().max(r[1].abs())
}

struct NewtonOutcome {
    u: [f64; 2],
    residual: f64,
    conditioning: f64,
}

/// Damped Newton with a central-difference Jacobian.
fn newton(
    f: &dyn Fn([f64; 2]) -> Option<[f64; 2]>,
    mut u: [f64; 2],
    max_iter: usize,
    stop: f64,
) -> Option<NewtonOutcome> {
    let mut r = f(u)?;
    let mut conditioning = 0.0;
    for _ in 0..max_iter {
        let n0 = norm(r);
        if n0 < stop {
            break;
        }
        let mut jac = [[0.0; 2]; 2];
        for k in 0..2 {
            let (mut up, mut um) = (u, u);
            up[k] += FD_STEP;
            um[k] -= FD_STEP;
            let (rp, rm) = (f(up)?, f(um)?);
            for i in 0..2 {
                jac[i][k] = (rp[i] - rm[i]) / (2.0 * FD_STEP);
            }
        }
        let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
        let scale = jac.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
        if det == 0.0 || !det.is_finite() {
            return None;
        }
        conditioning = det.abs() / (scale * scale);
        let d = [(-r[0] * jac[1][1] + r[1] * jac[0][1]) / det, (-r[1] * jac[0][0] + r[0] * jac[1][0]) / det];
        let mut lam = 1.0;
        loop {
            let un = [u[0] + lam * d[0], u[1] + lam * d[1]];
            if let Some(rn) = f(un) {
                if norm(rn) < n0 * (1.0 - 1e-4 * lam) {
                    u = un;
                    r = rn;
                    break;
                }
            }
            lam *= 0.5;
            if lam < 1e-6 {
                return Some(NewtonOutcome { u, residual: n0, conditioning });
            }
        }
    }
    Some(NewtonOutcome { u, residual: norm(r), conditioning })
}

/// Candidate (μ, a) solutions for c₀ = +1, best first.
fn solve_plus(q: usize, p: usize, seeds: &SeedStrategy) -> Vec<NewtonOutcome> {
    let pp = mod_inverse(p, q).expect("p coprime to q");
    let mut found: Vec<NewtonOutcome> = seeds
        .seeds()
        .par_iter()
        .filter_map(|&s| newton(&|u| backward_residual(u, q, pp), s, 100, 1e-14))
        .filter(|o| o.residual < BACKWARD_TOL)
        .collect();
    found.sort_by(|x, y| {
        x.residual.total_cmp(&y.residual).then(x.u[0].total_cmp(&y.u[0])).then(x.u[1].total_cmp(&y.u[1]))
    });
    let mut uniq: Vec<NewtonOutcome> = Vec::new();
    for o in found {
        if uniq.iter().all(|v| (v.u[0] - o.u[0]).abs() > 1e-6 || (v.u[1] - o.u[1]).abs() > 1e-6) {
            uniq.push(o);
        }
    }
    uniq.sort_by(|x, y| x.u[0].total_cmp(&y.u[0]).then(x.u[1].total_cmp(&y.u[1])));
    uniq
}

fn polish(q: usize, p: usize, o: &NewtonOutcome) -> Option<NewtonOutcome> {
    let pp = mod_inverse(p, q)?;
    let r = newton(&|u| forward_residual(u, q, pp), o.u, MAX_NEWTON, 1e-15)?;
    (r.residual < CENTER_TOL).then_some(r)
}

fn build_center(q: usize, p: usize, mu: f64, a: f64, c0: f64, residual: f64, conditioning: f64) -> Result<PcfCenter> {
    let params = MixedNormalForm::plus(mu, a);
    let map = params.to_map()?;
    let mut orbit = vec![0.0; q];
    let mut x = c0;
    for k in 0..q {
        orbit[(k * p) % q] = x;
        x = mix(x, mu, a);
    }
    Ok(PcfCenter {
        q,
        p,
        pprime: mod_inverse(p, q).unwrap_or(1),
        params,
        c0,
        map,
        orbit,
        moduli: params.closed_form_sigma()?,
        residual,
        conditioning,
        zeta_cycle: None,
    })
}

/// Locate f_{p/q}. Both labelings of the critical points are tried; the
/// labeling c₀ = −1 is the mirror z ↦ −z of the (q, q−p) solution with
/// c₀ = +1. A candidate is accepted when its forward residual is below
/// [`CENTER_TOL`] and checks (d)–(g) pass.
pub fn find_center(q: usize, p: usize, seeds: &SeedStrategy) -> Result<PcfCenter> {
    if q < 2 || p == 0 || p >= q || gcd(q as u64, p as u64) != 1 {
        return Err(Error::Argument(format!("need q >= 2, 1 <= p < q coprime; got {p}/{q}")));
    }
    let mut diagnostics = Vec::new();
    for (pl, sign) in [(p, 1.0), (q - p, -1.0)] {
        let candidates = solve_plus(q, pl, seeds);
        diagnostics.push(format!("labeling c0={sign:+}: {} backward solutions", candidates.len()));
        for cand in &candidates {
            let Some(fine) = polish(q, pl, cand) else {
                diagnostics.push(format!("  polish failed at u={:?}", cand.u));
                continue;
            };
            let (mu, a) = (-fine.u[0].exp(), sign * fine.u[1]);
            let mut c = build_center(q, p, mu, a, sign, fine.residual, fine.conditioning)?;
            let report = verify_center(&mut c);
            if report.combinatorics_pass() {
                return Ok(c);
            }
            diagnostics.push(format!("  rejected (mu={mu:.6}, a={a:.6}): {}", report.failures().join(", ")));
        }
    }
    Err(Error::NoConvergence(format!("no center for {p}/{q}; {}", diagnostics.join("; "))))
}

/// The properties of a center that are checked numerically.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Property {
    /// Critical orbit has exact period q.
    Period,
    /// Circular order x₀ < … < x_{q−1} and f(x_j) = x_{j+p}.
    Rotation,
    /// c₁ = x₁ = f^{p′}(c₀).
    Bitransitive,
    /// Interval images and orientations of the Markov partition.
    Markov,
    /// Repelling cycle ζ interleaved with the critical orbit.
    RepellingCycle,
    /// f^q has local degree 4 at c₀.
    LocalDegree,
}

impl Property {
    pub const ALL: [Property; 6] = [
        Property::Period,
        Property::Rotation,
        Property::Bitransitive,
        Property::Markov,
        Property::RepellingCycle,
        Property::LocalDegree,
    ];

    /// Single-letter tag used in reports.
    pub fn tag(&self) -> char {
        match self {
            Property::Period => 'd',
            Property::Rotation => 'e',
            Property::Bitransitive => 'f',
            Property::Markov => 'g',
            Property::RepellingCycle => 'j',
            Property::LocalDegree => 'k',
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub property: Property,
    pub passed: bool,
    pub residual: f64,
    pub detail: String,
}

/// One entry per [`Property`], in [`Property::ALL`] order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub checks: Vec<Check>,
}

impl VerificationReport {
    pub fn get(&self, p: Property) -> &Check {
        self.checks.iter().find(|c| c.property == p).expect("every property is checked")
    }

    pub fn passed(&self, p: Property) -> bool {
        self.get(p).passed
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    /// (d), (e), (f), (g).
    pub fn combinatorics_pass(&self) -> bool {
        [Property::Period, Property::Rotation, Property::Bitransitive, Property::Markov].iter().all(|&p| self.passed(p))
    }

    pub fn failures(&self) -> Vec<String> {
        self.checks.iter().filter(|c| !c.passed).map(|c| format!("({}) {}", c.property.tag(), c.detail)).collect()
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let verdict = if c.passed { "pass" } else { "FAIL" };
            writeln!(f, "({}) {:?}: {verdict} residual={:.3e} {}", c.property.tag(), c.property, c.residual, c.detail)?;
        }
        Ok(())
    }
}

fn check(property: Property, passed: bool, residual: f64, detail: impl Into<String>) -> Check {
    Check { property, passed, residual, detail: detail.into() }
}

/// `a` precedes `b` along the shorter arc in the positive direction.
fn precedes(a: f64, b: f64) -> bool {
    let d = ccw(theta(a), theta(b));
    d > 0.0 && d < std::f64::consts::PI
}

/// Check (d), (e), (f), (g), (j), (k). Fills in `zeta_cycle` when found.
pub fn verify_center(c: &mut PcfCenter) -> VerificationReport {
    let (q, p, pp) = (c.q, c.p, c.pprime);
    let (mu, a) = (c.params.mu, c.params.a);
    let f = |x: f64| mix(x, mu, a);
    let x = c.orbit.clone();
    let mut checks = Vec::new();

    // (d)
    let back_home = real_chordal((0..q).fold(x[0], |y, _| f(y)), x[0]);
    let mut y = x[0];
    let mut min_sep = f64::INFINITY;
    for _ in 1..q {
        y = f(y);
        min_sep = min_sep.min(real_chordal(y, x[0]));
    }
    checks.push(check(
        Property::Period,
        back_home < ORBIT_TOL && min_sep > 1e-6,
        back_home,
        format!("min separation {min_sep:.2e}"),
    ));

    // (e)
    let th: Vec<f64> = x.iter().map(|&v| theta(v)).collect();
    let steps: Vec<f64> = (0..q).map(|j| ccw(th[j], th[(j + 1) % q])).collect();
    let winding = steps.iter().sum::<f64>() / (2.0 * std::f64::consts::PI);
    let ordered = steps.iter().all(|&s| s > 1e-9) && (winding - 1.0).abs() < 1e-6;
    let shift = (0..q).map(|j| real_chordal(f(x[j]), x[(j + p) % q])).fold(0.0, f64::max);
    checks.push(check(
        Property::Rotation,
        ordered && shift < ORBIT_TOL,
        shift,
        if ordered { "circular order ok".to_string() } else { format!("orbit winds {winding:.3} times") },
    ));

    // (f)
    let c1 = c.c1();
    let reach = (0..pp).fold(c.c0, |y, _| f(y));
    let r_f = real_chordal(x[1 % q], c1).max(real_chordal(reach, c1)).max(real_chordal(x[0], c.c0));
    checks.push(check(Property::Bitransitive, r_f < ORBIT_TOL, r_f, "c1 = x1 = f^p'(c0)"));

    // (g)
    let mut bad = 0usize;
    for j in 0..q {
        let (t0, len) = (th[j], steps[j]);
        for k in 1..=16 {
            let t = t0 + len * k as f64 / 17.0;
            let d = c.map.circle_derivative(wrap(t));
            if (j == 0 && d >= 0.0) || (j != 0 && d <= 0.0) {
                bad += 1;
            }
        }
        let img = theta(f(from_theta_mid(t0, len)));
        let target = (j + p) % q;
        let inside = ccw(th[target], img) < steps[target];
        if (j == 0 && inside) || (j != 0 && !inside) {
            bad += 1;
        }
    }
    checks.push(check(Property::Markov, bad == 0, bad as f64, format!("{bad} orientation/image violations")));

    // (j)
    let (j_check, zeta) = repelling_cycle(c, &x, &th, &steps);
    c.zeta_cycle = zeta;
    checks.push(j_check);

    // (k)
    let slope = local_degree_slope(c);
    checks.push(check(Property::LocalDegree, (slope - 4.0).abs() < 0.1, (slope - 4.0).abs(), format!("slope {slope:.4}")));

    VerificationReport { checks }
}

fn from_theta_mid(t0: f64, len: f64) -> f64 {
    crate::sphere::from_theta(t0 + 0.5 * len)
}

fn repelling_cycle(c: &PcfCenter, x: &[f64], th: &[f64], steps: &[f64]) -> (Check, Option<Vec<f64>>) {
    let (q, p) = (c.q, c.p);
    let (mu, a) = (c.params.mu, c.params.a);
    let fq = |t: f64| {
        let y = (0..q).fold(crate::sphere::from_theta(t), |y, _| mix(y, mu, a));
        wrap(theta(y) - t)
    };
    let fail = |d: &str| (check(Property::RepellingCycle, false, f64::INFINITY, d), None);
    const SCAN: usize = 2000;
    let (t0, len) = (th[0], steps[0]);
    let mut found = None;
    let mut prev = (t0, fq(t0));
    for k in 1..=SCAN {
        let t = t0 + len * k as f64 / SCAN as f64;
        let v = fq(t);
        if prev.1.signum() != v.signum() && prev.1.abs() < 0.5 * std::f64::consts::PI && v.abs() < 0.5 * std::f64::consts::PI
        {
            let (mut lo, mut hi) = (prev.0, t);
            let slo = prev.1.signum();
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if fq(mid).signum() == slo {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let z = crate::sphere::from_theta(0.5 * (lo + hi));
            if c.map.cycle_multiplier_real(z, q) > 1.0 {
                found = Some(z);
                break;
            }
        }
        prev = (t, v);
    }
    let Some(z0) = found else {
        return fail("no repelling fixed point of f^q above x0 in I0");
    };
    let mut zeta = vec![0.0; q];
    let mut z = z0;
    for k in 0..q {
        zeta[(k * p) % q] = z;
        z = mix(z, mu, a);
    }
    let closure = real_chordal(z, z0);
    let pp = c.pprime;
    let rule1 = precedes(x[0], zeta[0]) && precedes(zeta[0], zeta[1 % q]) && precedes(zeta[1 % q], x[1 % q]);
    let rule2 = (1..=pp).all(|j| precedes(zeta[(j * p) % q], x[(j * p) % q]));
    let rule3 = (1..=q - pp).all(|j| precedes(x[(1 + j * p) % q], zeta[(1 + j * p) % q]));
    let passed = rule1 && rule2 && rule3 && closure < 1e-6;
    let detail = format!(
        "zeta0={z0:.6} multiplier={:.3e} I:{rule1} II:{rule2} III:{rule3}",
        c.map.cycle_multiplier_real(z0, q)
    );
    (check(Property::RepellingCycle, passed, closure, detail), Some(zeta))
}

/// Log-log slope of |f^q(c₀ + ε) − c₀| over ε = 10⁻²..10⁻⁵. Differences are
/// carried exactly along the critical orbit:
/// f(x + δ) − f(x) = δ·(W(x) + δ(n₂D(x) − d₂N(x))) / (D(x + δ)D(x)).
pub fn local_degree_slope(c: &PcfCenter) -> f64 {
    let (n, d) = (c.map.num(), c.map.den());
    let w = c.map.wronskian();
    let ev = |k: &[f64; 3], x: f64| (k[0] * x + k[1]) * x + k[2];
    let pts: Vec<(f64, f64)> = [1e-2, 1e-3, 1e-4, 1e-5]
        .iter()
        .map(|&eps| {
            let mut xk = c.c0;
            let mut delta: f64 = eps;
            for _ in 0..c.q {
                let (nx, dx) = (ev(&n, xk), ev(&d, xk));
                delta = delta * (ev(&w, xk) + delta * (n[0] * dx - d[0] * nx)) / (ev(&d, xk + delta) * dx);
                xk = nx / dx;
            }
            (eps.ln(), delta.abs().ln())
        })
        .collect();
    let m = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let (mx, my) = (sx / m, sy / m);
    let num: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = pts.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
    num / den
}

/// Hyperbolic type of a real map.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum HyperbolicType {
    /// One attracting cycle, critical points in different immediate basins.
    B,
    /// One attracting cycle, exactly one critical point in an immediate basin.
    C,
    /// Two distinct attracting cycles.
    D,
    /// Both critical orbits tend to one attracting fixed point.
    E,
    Unknown,
}

const CYCLE_TOL: f64 = 1e-9;
const MAX_PERIOD: usize = 512;

/// Attracting cycle reached by the orbit of `c`, if any, as the list of cycle
/// points starting from the limit of f^{nk}(c).
fn attracting_cycle(m: &QuadMap, c: Point, budget: usize) -> Option<Vec<Point>> {
    let mut z = c;
    let transient = budget.max(1);
    for _ in 0..transient {
        z = m.eval(z);
    }
    let mut w = m.eval(z);
    let mut k = 1;
    while w.chordal(&z) > CYCLE_TOL {
        if k >= MAX_PERIOD.min(budget.max(1)) {
            return None;
        }
        w = m.eval(w);
        k += 1;
    }
    let mut pts = Vec::with_capacity(k);
    let mut y = z;
    let mut mult = 1.0;
    for _ in 0..k {
        pts.push(y);
        mult *= m.spherical_derivative(y);
        y = m.eval(y);
    }
    // pts[0] = f^T(c); the limit of f^{nk}(c) sits −T steps further
    pts.rotate_left((k - transient % k) % k);
    (mult < 1.0 - 1e-9).then_some(pts)
}

/// The iterate f^{nk}(c) converges to `z` (k = cycle length), tested after
/// about `budget` steps.
fn converges_to(m: &QuadMap, c: Point, z: Point, k: usize, budget: usize) -> bool {
    let rounds = (budget / k).max(4);
    let mut y = c;
    for _ in 0..rounds * k {
        y = m.eval(y);
    }
    y.chordal(&z) < 1e-6
}

/// Whether some path from c to z (either arc of ℝ̂ for real points, the
/// straight segment otherwise) converges to z under f^k at every sample.
fn in_immediate_basin(m: &QuadMap, c: Point, z: Point, k: usize, budget: usize) -> bool {
    const SAMPLES: usize = 32;
    if c.chordal(&z) < 1e-9 {
        return true;
    }
    let (cr, zr) = (c.as_real(1e-12), z.as_real(1e-12));
    if let (Some(cr), Some(zr)) = (cr, zr) {
        let (tc, tz) = (theta(cr), theta(zr));
        let up = ccw(tc, tz);
        return [up, up - 2.0 * std::f64::consts::PI].iter().any(|&span| {
            (0..SAMPLES).all(|i| {
                let t = tc + span * i as f64 / SAMPLES as f64;
                converges_to(m, Point::real(crate::sphere::from_theta(t)), z, k, budget)
            })
        });
    }
    let (cf, zf, flip) = match (c.finite(), z.finite()) {
        (Some(a), Some(b)) if a.norm() <= 1e8 && b.norm() <= 1e8 => (a, b, false),
        _ => match (c.inv().finite(), z.inv().finite()) {
            (Some(a), Some(b)) => (a, b, true),
            _ => return false,
        },
    };
    (0..SAMPLES).all(|i| {
        let s = cf + (zf - cf) * (i as f64 / SAMPLES as f64);
        let p = if flip { Point::Finite(s).inv() } else { Point::Finite(s) };
        converges_to(m, p, z, k, budget)
    })
}

fn same_cycle(a: &[Point], b: &[Point]) -> Option<usize> {
    if a.len() != b.len() {
        return None;
    }
    a.iter().position(|p| p.chordal(&b[0]) < 1e-6)
}

/// Classify by the attracting cycles met by the two critical orbits within
/// `budget` iterations.
pub fn hyperbolic_type(m: &QuadMap, budget: usize) -> Result<HyperbolicType> {
    let crit = m.critical_points()?;
    let cyc: Vec<Option<Vec<Point>>> = crit.iter().map(|&c| attracting_cycle(m, c, budget)).collect();
    let (Some(a), Some(b)) = (&cyc[0], &cyc[1]) else {
        return Ok(HyperbolicType::Unknown);
    };
    if same_cycle(a, b).is_none() {
        return Ok(HyperbolicType::D);
    }
    let k = a.len();
    if k == 1 {
        return Ok(HyperbolicType::E);
    }
    // a[0] is the limit of f^{nk}(c0); b[0] that of f^{nk}(c1).
    let in0 = in_immediate_basin(m, crit[0], a[0], k, budget);
    let in1 = in_immediate_basin(m, crit[1], b[0], k, budget);
    Ok(match (in0, in1) {
        (true, true) if a[0].chordal(&b[0]) > 1e-6 => HyperbolicType::B,
        (true, false) | (false, true) => HyperbolicType::C,
        _ => HyperbolicType::Unknown,
    })
}

/// Rotation number p/q in lowest terms, reduced to p ≤ q/2.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Rotation {
    pub p: usize,
    pub q: usize,
}

impl fmt::Display for Rotation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.p, self.q)
    }
}

/// Rotation number of a real attracting cycle of period ≥ 2 met by a
/// critical orbit: the cycle points are sorted around ℝ̂ and f must shift
/// every position by the same p.
pub fn attracting_rotation_number(m: &QuadMap, budget: usize) -> Result<Option<Rotation>> {
    let crit = m.critical_points()?;
    for &c in &crit {
        let Some(cyc) = attracting_cycle(m, c, budget) else { continue };
        let q = cyc.len();
        if q < 2 {
            continue;
        }
        let Some(mut xs) = cyc.iter().map(|p| p.as_real(1e-9)).collect::<Option<Vec<f64>>>() else {
            continue;
        };
        xs.sort_by(|u, v| theta(*u).total_cmp(&theta(*v)));
        let pos = |y: f64| xs.iter().position(|&x| real_chordal(x, y) < 1e-6);
        let Some(target) = pos(m.eval_real(xs[0])) else { continue };
        let consistent = (0..q).all(|i| pos(m.eval_real(xs[i])) == Some((i + target) % q));
        if !consistent || target == 0 {
            continue;
        }
        let p = target.min(q - target);
        if gcd(p as u64, q as u64) != 1 {
            continue;
        }
        return Ok(Some(Rotation { p, q }));
    }
    Ok(None)
}

/// Multiplier of the attracting cycle met by the first critical orbit, as a
/// complex number (product of derivatives in finite charts).
pub fn cycle_multiplier(m: &QuadMap, budget: usize) -> Option<Complex64> {
    let crit = m.critical_points().ok()?;
    let cyc = attracting_cycle(m, crit[0], budget)?;
    Some(Complex64::new(cyc.iter().map(|&z| m.spherical_derivative(z)).product(), 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn center_one_third() {
        let c = find_center(3, 1, &SeedStrategy::default()).unwrap();
        assert_abs_diff_eq!(c.params.mu, -4.649435914489481, epsilon = 1e-9);
        assert_abs_diff_eq!(c.params.a, -0.5698402909980533, epsilon = 1e-9);
        assert_abs_diff_eq!(c.moduli.sigma1, -6.0, epsilon = 1e-8);
        assert_abs_diff_eq!(c.moduli.sigma2, 8.0, epsilon = 1e-6);
        assert!(c.residual < CENTER_TOL);
    }

    #[test]
    fn center_one_half_is_inverse_square() {
        let c = find_center(2, 1, &SeedStrategy::default()).unwrap();
        assert_abs_diff_eq!(c.moduli.sigma1, -6.0, epsilon = 1e-8);
        assert_abs_diff_eq!(c.moduli.sigma2, 12.0, epsilon = 1e-8);
    }

    #[test]
    fn verification_of_ten_thirds() {
        let mut c = find_center(10, 3, &SeedStrategy::default()).unwrap();
        let r = verify_center(&mut c);
        assert!(r.all_passed(), "{r}");
        assert!(c.zeta_cycle.is_some());
    }

    #[test]
    fn mirror_numerators_share_moduli() {
        let a = find_center(5, 2, &SeedStrategy::default()).unwrap();
        let b = find_center(5, 3, &SeedStrategy::default()).unwrap();
        assert!(a.moduli.dist(&b.moduli) < 1e-6);
    }

    #[test]
    fn hyperbolic_types() {
        let c = find_center(3, 1, &SeedStrategy::default()).unwrap();
        assert_eq!(hyperbolic_type(&c.map, 2000).unwrap(), HyperbolicType::B);
        let esc = QuadMap::new([-10.0, 0.0, 1.0], [1.0, 0.0, 0.0]).unwrap();
        assert_eq!(hyperbolic_type(&esc, 2000).unwrap(), HyperbolicType::E);
        let inv = QuadMap::new([0.0, 0.0, 1.0], [1.0, 0.0, 0.0]).unwrap();
        assert_eq!(hyperbolic_type(&inv, 2000).unwrap(), HyperbolicType::B);
    }

    #[test]
    fn rotation_numbers() {
        let inv = QuadMap::new([0.0, 0.0, 1.0], [1.0, 0.0, 0.0]).unwrap();
        assert_eq!(attracting_rotation_number(&inv, 2000).unwrap(), Some(Rotation { p: 1, q: 2 }));
        let c = find_center(3, 1, &SeedStrategy::default()).unwrap();
        assert_eq!(attracting_rotation_number(&c.map, 2000).unwrap(), Some(Rotation { p: 1, q: 3 }));
    }

    #[test]
    fn rejects_non_coprime() {
        assert!(find_center(6, 2, &SeedStrategy::default()).is_err());
    }
}
