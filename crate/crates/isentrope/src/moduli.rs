//! Geometry of the real moduli plane: ideal boundary points, the lines
//! Per₁(μ), the numerator choice for large q, and the barrier L separating
//! the two h_q-centers.

use crate::entropy::gcd;
use crate::error::{Error, Result};
use crate::ratmap::{fixed_point_data, MixedNormalForm, ModuliPoint, QuadMap};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub const DEFAULT_BLOWUP: f64 = 1e3;

/// Point of the ideal circle [−1, 1] ∪ {e^{iθ} : θ ∈ [0, π]}.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", content = "value")]
pub enum IdealPoint {
    RealSegment(f64),
    UnitArc(f64),
}

/// μ or 1/μ, whichever lies in [−1, 1].
pub fn fold(mu: f64) -> f64 {
    if mu.abs() > 1.0 {
        1.0 / mu
    } else {
        mu
    }
}

/// Ideal coordinate of a multiplier triple with one entry blowing up.
pub fn ideal_point_from_multipliers(mults: [Complex64; 3], blowup_threshold: f64) -> Option<IdealPoint> {
    let big = (0..3).max_by(|&i, &j| mults[i].norm().total_cmp(&mults[j].norm()))?;
    if mults[big].norm() < blowup_threshold {
        return None;
    }
    let rest: Vec<Complex64> = (0..3).filter(|&i| i != big).map(|i| mults[i]).collect();
    let nonreal = rest.iter().any(|m| m.im.abs() > 1e-9 * (1.0 + m.norm()));
    if nonreal {
        return Some(IdealPoint::UnitArc(rest[0].arg().abs()));
    }
    // the two bounded multipliers are asymptotically reciprocal
    let pick = rest.iter().map(|m| m.re).min_by(|a, b| a.abs().total_cmp(&b.abs()))?;
    Some(IdealPoint::RealSegment(fold(pick)))
}

pub fn ideal_point(m: &QuadMap, blowup_threshold: f64) -> Option<IdealPoint> {
    ideal_point_from_multipliers(fixed_point_data(m, 1e-6).multipliers, blowup_threshold)
}

/// σ₂ = slope·σ₁ + intercept: the classes with a fixed point of multiplier μ.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Per1Line {
    pub mu: f64,
    pub slope: f64,
    pub intercept: f64,
}

impl Per1Line {
    pub fn sigma2_at(&self, sigma1: f64) -> f64 {
        self.slope * sigma1 + self.intercept
    }

    /// μ³ − σ₁μ² + σ₂μ − (σ₁ − 2) at `pt`.
    pub fn cubic_residual(&self, pt: &ModuliPoint) -> f64 {
        let mu = self.mu;
        mu * mu * mu - pt.sigma1 * mu * mu + pt.sigma2 * mu - (pt.sigma1 - 2.0)
    }
}

/// Substitute z = μ in z³ − σ₁z² + σ₂z − (σ₁ − 2) and solve for σ₂.
pub fn per1_line(mu: f64) -> Result<Per1Line> {
    if mu == 0.0 || !mu.is_finite() {
        return Err(Error::Domain("Per1 line needs a finite nonzero multiplier".into()));
    }
    Ok(Per1Line { mu, slope: (mu * mu + 1.0) / mu, intercept: -(mu * mu * mu + 2.0) / mu })
}

/// p coprime to q with 1/3 < p/q < 1/2.
pub fn choose_numerator(q: usize) -> Result<usize> {
    if q <= 12 {
        return Err(Error::Domain(format!("need q > 12, got {q}")));
    }
    let p = match q % 4 {
        1 | 3 => (q - 1) / 2,
        2 => q / 2 - 2,
        _ => q / 2 - 1,
    };
    debug_assert!(gcd(p as u64, q as u64) == 1 && 3 * p > q && 2 * p < q);
    Ok(p)
}

/// Which side of the barrier a point lies on. `Left` is the wedge between
/// the ray and the curve, which contains points just left of the ray.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    Left,
    Right,
    OnBarrier,
}

/// The ray {σ₁ = −6, σ₂ ≥ σ₂(base)} together with a polyline from the base
/// through classes where the critical point −1 of (1/μ)(z + 1/z) + a stays on
/// a superattracting 3-cycle. Along both parts the real entropy is at most h₃.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BarrierCurve {
    pub base: ModuliPoint,
    /// Vertices starting at `base`.
    pub vertices: Vec<ModuliPoint>,
    /// Normal-form parameters (μ, a) of each vertex.
    pub params: Vec<(f64, f64)>,
}

/// Far-away closing distance for the side test polygon.
const FAR: f64 = 1e8;
pub const ON_BARRIER_TOL: f64 = 1e-6;

fn third_iterate_gap(mu: f64, a: f64) -> f64 {
    let f = |x: f64| (x + 1.0 / x) / mu + a;
    f(f(f(-1.0))) + 1.0
}

/// Newton in a for f³(−1) = −1 at fixed μ, steps capped to stay on branch.
fn solve_offset(mu: f64, mut a: f64) -> Option<f64> {
    for _ in 0..80 {
        let r = third_iterate_gap(mu, a);
        if r.abs() < 1e-14 {
            return Some(a);
        }
        let h = 1e-9;
        let d = (third_iterate_gap(mu, a + h) - r) / h;
        if d == 0.0 || !d.is_finite() {
            return None;
        }
        let step = (r / d).clamp(-0.05, 0.05);
        a -= step;
    }
    (third_iterate_gap(mu, a).abs() < 1e-11).then_some(a)
}

impl BarrierCurve {
    /// Continue from the 1/3-center (`start`, c₀ = +1 labeling) in log|μ| to
    /// `mu_end`, taking `steps` continuation steps and keeping `n_vertices`.
    pub fn build(start: &MixedNormalForm, mu_end: f64, steps: usize, n_vertices: usize) -> Result<BarrierCurve> {
        if !(start.mu < 0.0 && mu_end < start.mu) || steps < 2 || n_vertices < 2 {
            return Err(Error::Argument("barrier needs mu_end < mu_start < 0 and at least two steps".into()));
        }
        let (l0, l1) = ((-start.mu).ln(), (-mu_end).ln());
        let base = start.closed_form_sigma()?;
        let mut vertices = vec![base];
        let mut params = vec![(start.mu, start.a)];
        let stride = (steps / (n_vertices - 1)).max(1);
        let mut a = start.a;
        for k in 1..=steps {
            let mu = -(l0 + (l1 - l0) * k as f64 / steps as f64).exp();
            let next = solve_offset(mu, a)
                .ok_or_else(|| Error::NoConvergence(format!("barrier continuation stalled at mu={mu}")))?;
            if (next - a).abs() > 0.05 {
                return Err(Error::NoConvergence(format!("barrier continuation jumped branch at mu={mu}")));
            }
            a = next;
            if k % stride == 0 || k == steps {
                vertices.push(MixedNormalForm::plus(mu, a).closed_form_sigma()?);
                params.push((mu, a));
            }
        }
        Ok(BarrierCurve { base, vertices, params })
    }

    /// The 1/3-center barrier used by the demonstration.
    pub fn standard(start: &MixedNormalForm) -> Result<BarrierCurve> {
        BarrierCurve::build(start, -2000.0, 4000, 400)
    }

    /// No two non-adjacent polyline segments meet.
    pub fn is_simple(&self) -> bool {
        let v = &self.vertices;
        let n = v.len();
        for i in 0..n.saturating_sub(1) {
            for j in i + 2..n - 1 {
                if segments_cross(v[i], v[i + 1], v[j], v[j + 1]) {
                    return false;
                }
            }
        }
        true
    }

    /// Vertices as `sigma1,sigma2` CSV with header.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("sigma1,sigma2\n");
        for v in &self.vertices {
            s.push_str(&format!("{},{}\n", v.sigma1, v.sigma2));
        }
        s
    }

    fn ray_top(&self) -> ModuliPoint {
        ModuliPoint { sigma1: self.base.sigma1, sigma2: FAR }
    }

    /// The barrier as segments: the ray (truncated far away) and the polyline.
    fn segments(&self) -> Vec<(ModuliPoint, ModuliPoint)> {
        let mut s = vec![(self.base, self.ray_top())];
        s.extend(self.vertices.windows(2).map(|w| (w[0], w[1])));
        s
    }

    /// Closed polygon bounding the `Left` region.
    fn polygon(&self) -> Vec<ModuliPoint> {
        let n = self.vertices.len();
        let (last, prev) = (self.vertices[n - 1], self.vertices[n - 2]);
        let (dx, dy) = (last.sigma1 - prev.sigma1, last.sigma2 - prev.sigma2);
        let len = dx.hypot(dy);
        let far_end = ModuliPoint { sigma1: last.sigma1 + FAR * dx / len, sigma2: last.sigma2 + FAR * dy / len };
        let corner = ModuliPoint { sigma1: far_end.sigma1.min(-FAR), sigma2: FAR.max(far_end.sigma2) };
        let mut poly = vec![self.ray_top()];
        poly.extend(self.vertices.iter().copied());
        poly.push(far_end);
        poly.push(corner);
        poly
    }

    /// Samples along the barrier for entropy checks: `n_ray` maps b + 1/z²
    /// on the ray (b from −1 to `b_max`) and `n_curve` normal forms on the
    /// polyline.
    pub fn sample_maps(&self, n_ray: usize, n_curve: usize, b_max: f64) -> Result<Vec<(ModuliPoint, QuadMap)>> {
        let mut out = Vec::with_capacity(n_ray + n_curve);
        for i in 0..n_ray {
            let b = if n_ray == 1 { -1.0 } else { -1.0 + (b_max + 1.0) * i as f64 / (n_ray - 1) as f64 };
            let m = QuadMap::new([b, 0.0, 1.0], [1.0, 0.0, 0.0])?;
            out.push((ModuliPoint::new(-6.0, 4.0 * b * b * b + 12.0)?, m));
        }
        let np = self.params.len();
        for i in 0..n_curve {
            let k = if n_curve == 1 { 0 } else { i * (np - 1) / (n_curve - 1) };
            let (mu, a) = self.params[k];
            out.push((self.vertices[k], MixedNormalForm::plus(mu, a).to_map()?));
        }
        Ok(out)
    }
}

fn orient(a: ModuliPoint, b: ModuliPoint, c: ModuliPoint) -> f64 {
    (b.sigma1 - a.sigma1) * (c.sigma2 - a.sigma2) - (b.sigma2 - a.sigma2) * (c.sigma1 - a.sigma1)
}

fn segments_cross(a: ModuliPoint, b: ModuliPoint, c: ModuliPoint, d: ModuliPoint) -> bool {
    let (o1, o2) = (orient(a, b, c), orient(a, b, d));
    let (o3, o4) = (orient(c, d, a), orient(c, d, b));
    o1 * o2 < 0.0 && o3 * o4 < 0.0
}

fn segment_distance(p: ModuliPoint, a: ModuliPoint, b: ModuliPoint) -> f64 {
    let (dx, dy) = (b.sigma1 - a.sigma1, b.sigma2 - a.sigma2);
    let len2 = dx * dx + dy * dy;
    let t = if len2 == 0.0 {
        0.0
    } else {
        (((p.sigma1 - a.sigma1) * dx + (p.sigma2 - a.sigma2) * dy) / len2).clamp(0.0, 1.0)
    };
    (p.sigma1 - a.sigma1 - t * dx).hypot(p.sigma2 - a.sigma2 - t * dy)
}

/// Distance from `pt` to the barrier.
pub fn barrier_distance(pt: &ModuliPoint, l: &BarrierCurve) -> f64 {
    l.segments().iter().map(|&(a, b)| segment_distance(*pt, a, b)).fold(f64::INFINITY, f64::min)
}

/// Crossing-number test against the polygon closed far away.
pub fn side_of_barrier(pt: &ModuliPoint, l: &BarrierCurve) -> Side {
    if barrier_distance(pt, l) < ON_BARRIER_TOL {
        return Side::OnBarrier;
    }
    let poly = l.polygon();
    let n = poly.len();
    let mut inside = false;
    for i in 0..n {
        let (a, b) = (poly[i], poly[(i + 1) % n]);
        if (a.sigma2 > pt.sigma2) != (b.sigma2 > pt.sigma2) {
            let o = orient(a, b, *pt);
            // crossing lies to the right of pt exactly when the turn matches the edge direction
            if (o > 0.0) == (b.sigma2 > a.sigma2) {
                inside = !inside;
            }
        }
    }
    if inside {
        Side::Left
    } else {
        Side::Right
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn one_third() -> MixedNormalForm {
        MixedNormalForm::plus(-4.649435914489481, -0.5698402909980533)
    }

    #[test]
    fn ideal_point_examples() {
        let c = |x: f64| Complex64::new(x, 0.0);
        assert_eq!(ideal_point_from_multipliers([c(0.5), c(2.0), c(1e6)], 1e3), Some(IdealPoint::RealSegment(0.5)));
        let w = Complex64::from_polar(1.0, 2.0 * PI / 5.0);
        match ideal_point_from_multipliers([w, w.conj(), c(1e6)], 1e3) {
            Some(IdealPoint::UnitArc(t)) => assert_abs_diff_eq!(t, 2.0 * PI / 5.0, epsilon = 1e-12),
            other => panic!("{other:?}"),
        }
        assert_eq!(ideal_point_from_multipliers([c(0.9), c(1.2), c(3.0)], 1e3), None);
    }

    #[test]
    fn per1_examples() {
        let l = per1_line(1.0).unwrap();
        assert_eq!((l.slope, l.intercept), (2.0, -3.0));
        let l = per1_line(-1.0).unwrap();
        assert_eq!((l.slope, l.intercept), (-2.0, 1.0));
        let l = per1_line(2.0).unwrap();
        assert_eq!((l.slope, l.intercept), (2.5, -5.0));
        assert!(per1_line(0.0).is_err());
    }

    #[test]
    fn numerator_examples() {
        assert_eq!(choose_numerator(13).unwrap(), 6);
        assert_eq!(choose_numerator(14).unwrap(), 5);
        assert_eq!(choose_numerator(16).unwrap(), 7);
        assert!(choose_numerator(12).is_err());
    }

    #[test]
    fn barrier_shape() {
        let l = BarrierCurve::standard(&one_third()).unwrap();
        assert_abs_diff_eq!(l.base.sigma1, -6.0, epsilon = 1e-9);
        assert_abs_diff_eq!(l.base.sigma2, 8.0, epsilon = 1e-9);
        assert!(l.is_simple());
        let last = l.vertices.last().unwrap();
        assert!(last.sigma1 < -1900.0);
        assert_abs_diff_eq!(last.sigma2 / last.sigma1, -1.0, epsilon = 0.05);
        assert_eq!(side_of_barrier(&l.base, &l), Side::OnBarrier);
        let eps = 1e-3;
        assert_eq!(side_of_barrier(&ModuliPoint { sigma1: -6.0 - eps, sigma2: 50.0 }, &l), Side::Left);
        assert_eq!(side_of_barrier(&ModuliPoint { sigma1: -6.0 + eps, sigma2: 50.0 }, &l), Side::Right);
        // the two 13-centers with h_13
        assert_eq!(side_of_barrier(&ModuliPoint { sigma1: -149.7675, sigma2: 291.7458 }, &l), Side::Left);
        assert_eq!(side_of_barrier(&ModuliPoint { sigma1: -6.0, sigma2: -12.941 }, &l), Side::Right);
    }

    #[test]
    fn serde_tags() {
        let s = serde_json::to_string(&IdealPoint::UnitArc(1.0)).unwrap();
        assert_eq!(s, r#"{"variant":"UnitArc","value":1.0}"#);
    }
}
