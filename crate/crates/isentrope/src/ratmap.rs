//! Real quadratic rational maps on the sphere and on the real circle ℝ̂.

use crate::error::{Error, Result};
use crate::sphere::{self, ccw, cubic_roots, quadratic_roots, theta, Point};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Resultants below this (on max-abs normalized coefficients) count as zero.
const RESULTANT_FLOOR: f64 = 1e-26;

/// Raw six-coefficient record, the serialized form of [`QuadMap`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Coeffs {
    pub num2: f64,
    pub num1: f64,
    pub num0: f64,
    pub den2: f64,
    pub den1: f64,
    pub den0: f64,
}

/// f(z) = (num2 z² + num1 z + num0)/(den2 z² + den1 z + den0), stored with
/// the largest-magnitude coefficient equal to +1.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Coeffs", into = "Coeffs")]
pub struct QuadMap {
    n: [f64; 3],
    d: [f64; 3],
}

impl TryFrom<Coeffs> for QuadMap {
    type Error = Error;
    fn try_from(c: Coeffs) -> Result<Self> {
        QuadMap::new([c.num2, c.num1, c.num0], [c.den2, c.den1, c.den0])
    }
}

impl From<QuadMap> for Coeffs {
    fn from(m: QuadMap) -> Coeffs {
        Coeffs { num2: m.n[0], num1: m.n[1], num0: m.n[2], den2: m.d[0], den1: m.d[1], den0: m.d[2] }
    }
}

/// Coefficients (A, B, C) of the Wronskian N′D − ND′ = A z² + B z + C.
fn wronskian(n: &[f64; 3], d: &[f64; 3]) -> [f64; 3] {
    [
        n[0] * d[1] - n[1] * d[0],
        2.0 * (n[0] * d[2] - n[2] * d[0]),
        n[1] * d[2] - n[2] * d[1],
    ]
}

fn horner(c: &[f64; 3], z: Complex64) -> Complex64 {
    (z * c[0] + c[1]) * z + c[2]
}

fn rev(c: &[f64; 3]) -> [f64; 3] {
    [c[2], c[1], c[0]]
}

/// Binary-form value c0 X² + c1 XY + c2 Y² at (X, Y).
fn form(c: &[f64; 3], x: f64, y: f64) -> f64 {
    c[0] * x * x + c[1] * x * y + c[2] * y * y
}

impl QuadMap {
    /// Build from numerator and denominator coefficients, leading first.
    pub fn new(num: [f64; 3], den: [f64; 3]) -> Result<QuadMap> {
        if num.iter().chain(den.iter()).any(|c| !c.is_finite()) {
            return Err(Error::Degenerate("non-finite coefficient".into()));
        }
        let scale = num.iter().chain(den.iter()).fold(0.0f64, |acc, c| if c.abs() > acc.abs() { *c } else { acc });
        if scale == 0.0 {
            return Err(Error::Degenerate("all coefficients zero".into()));
        }
        let m = QuadMap { n: num.map(|c| c / scale), d: den.map(|c| c / scale) };
        let res = m.resultant();
        if !(res.abs() > RESULTANT_FLOOR) {
            return Err(Error::Degenerate(format!("resultant {res:e} vanishes")));
        }
        Ok(m)
    }

    pub fn num(&self) -> [f64; 3] {
        self.n
    }

    pub fn den(&self) -> [f64; 3] {
        self.d
    }

    pub fn coeffs(&self) -> Coeffs {
        (*self).into()
    }

    /// Resultant of numerator and denominator as binary forms.
    pub fn resultant(&self) -> f64 {
        let (n, d) = (&self.n, &self.d);
        (n[0] * d[2] - n[2] * d[0]).powi(2) - (n[0] * d[1] - n[1] * d[0]) * (n[1] * d[2] - n[2] * d[1])
    }

    /// Wronskian coefficients; f′ = W/D².
    pub fn wronskian(&self) -> [f64; 3] {
        wronskian(&self.n, &self.d)
    }

    /// f on the sphere; the reciprocal chart is used for |z| > 1.
    pub fn eval(&self, z: Point) -> Point {
        let (num, den) = match z {
            Point::Infinity => (Complex64::new(self.n[0], 0.0), Complex64::new(self.d[0], 0.0)),
            Point::Finite(z) if z.norm() <= 1.0 => (horner(&self.n, z), horner(&self.d, z)),
            Point::Finite(z) => {
                let w = z.inv();
                (horner(&rev(&self.n), w), horner(&rev(&self.d), w))
            }
        };
        if den == Complex64::new(0.0, 0.0) {
            Point::Infinity
        } else {
            Point::Finite(num / den)
        }
    }

    /// f on ℝ̂, with ∞ represented by `f64::INFINITY`.
    pub fn eval_real(&self, x: f64) -> f64 {
        let (num, den) = if x.is_infinite() {
            (self.n[0], self.d[0])
        } else if x.abs() <= 1.0 {
            ((self.n[0] * x + self.n[1]) * x + self.n[2], (self.d[0] * x + self.d[1]) * x + self.d[2])
        } else {
            let w = 1.0 / x;
            ((self.n[2] * w + self.n[1]) * w + self.n[0], (self.d[2] * w + self.d[1]) * w + self.d[0])
        };
        if den == 0.0 {
            f64::INFINITY
        } else {
            let y = num / den;
            if y.is_infinite() {
                f64::INFINITY
            } else {
                y
            }
        }
    }

    /// n-th iterate on ℝ̂.
    pub fn iterate_real(&self, x: f64, n: usize) -> f64 {
        (0..n).fold(x, |x, _| self.eval_real(x))
    }

    /// Derivative at a finite point, chart-switched for |z| > 1. Returns `None`
    /// at poles.
    pub fn derivative(&self, z: Complex64) -> Option<Complex64> {
        if z.norm() <= 1.0 {
            let dz = horner(&self.d, z);
            if dz == Complex64::new(0.0, 0.0) {
                return None;
            }
            Some(horner(&self.wronskian(), z) / (dz * dz))
        } else {
            let w = z.inv();
            let (rn, rd) = (rev(&self.n), rev(&self.d));
            let dw = horner(&rd, w);
            if dw == Complex64::new(0.0, 0.0) {
                return None;
            }
            Some(-(w * w) * horner(&wronskian(&rn, &rd), w) / (dw * dw))
        }
    }

    /// Multiplier at a fixed point (chart independent).
    pub fn multiplier_at(&self, z: Point) -> Complex64 {
        match z {
            Point::Infinity => {
                // 1/f(1/w) at w = 0
                let (a2, a1, b2, b1) = (self.n[0], self.n[1], self.d[0], self.d[1]);
                Complex64::new((b1 * a2 - b2 * a1) / (a2 * a2), 0.0)
            }
            Point::Finite(z) => self.derivative(z).unwrap_or(Complex64::new(f64::INFINITY, 0.0)),
        }
    }

    /// The induced map on circle coordinates θ = 2·atan(x).
    pub fn circle_step(&self, t: f64) -> f64 {
        let (x, y) = ((t / 2.0).sin(), (t / 2.0).cos());
        let (nv, dv) = (form(&self.n, x, y), form(&self.d, x, y));
        sphere::wrap(2.0 * nv.atan2(dv))
    }

    /// dθ′/dθ of [`circle_step`](Self::circle_step); sign gives orientation.
    pub fn circle_derivative(&self, t: f64) -> f64 {
        let (x, y) = ((t / 2.0).sin(), (t / 2.0).cos());
        let (nv, dv) = (form(&self.n, x, y), form(&self.d, x, y));
        form(&self.wronskian(), x, y) / (nv * nv + dv * dv)
    }

    /// Multiplier of a real periodic orbit through `x`, as a product of
    /// circle derivatives (equal to the usual multiplier at a cycle).
    pub fn cycle_multiplier_real(&self, x: f64, period: usize) -> f64 {
        let mut t = theta(x);
        let mut m = 1.0;
        for _ in 0..period {
            m *= self.circle_derivative(t);
            t = self.circle_step(t);
        }
        m
    }

    /// Derivative in the spherical metric; its product along a cycle is the
    /// modulus of the cycle multiplier. Charts are switched at |z| > 1 and
    /// |f(z)| > 1.
    pub fn spherical_derivative(&self, z: Point) -> f64 {
        let (w, (mut a, mut b)) = match z {
            Point::Infinity => (Complex64::new(0.0, 0.0), (rev(&self.n), rev(&self.d))),
            Point::Finite(z) if z.norm() > 1.0 => (z.inv(), (rev(&self.n), rev(&self.d))),
            Point::Finite(z) => (z, (self.n, self.d)),
        };
        if horner(&a, w).norm() > horner(&b, w).norm() {
            std::mem::swap(&mut a, &mut b);
        }
        let bw = horner(&b, w);
        let g = horner(&a, w) / bw;
        let dg = horner(&wronskian(&a, &b), w) / (bw * bw);
        dg.norm() * (1.0 + w.norm_sqr()) / (1.0 + g.norm_sqr())
    }

    /// Both critical points: real ascending with ∞ last, or a non-real pair
    /// with positive imaginary part first.
    pub fn critical_points(&self) -> Result<[Point; 2]> {
        let w = self.wronskian();
        let mut r = quadratic_roots(w[0], w[1], w[2])
            .ok_or_else(|| Error::Degenerate("Wronskian vanishes identically".into()))?;
        let key = |p: &Point| match p {
            Point::Infinity => (0, f64::INFINITY),
            Point::Finite(z) if z.im == 0.0 => (0, z.re),
            Point::Finite(z) => (1, -z.im),
        };
        r.sort_by(|a, b| {
            let (ka, kb) = (key(a), key(b));
            ka.0.cmp(&kb.0).then(ka.1.total_cmp(&kb.1))
        });
        Ok(r)
    }

    /// Real critical points, if both are real.
    pub fn real_critical_points(&self) -> Result<Option<[f64; 2]>> {
        let c = self.critical_points()?;
        Ok(match (c[0].as_real(0.0), c[1].as_real(0.0)) {
            (Some(a), Some(b)) => Some([a, b]),
            _ => None,
        })
    }
}

/// Fixed points with their multipliers.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FixedPointSet {
    pub points: [Point; 3],
    pub multipliers: [Complex64; 3],
    /// Two fixed points closer than the geometric tolerance.
    pub parabolic: bool,
}

impl FixedPointSet {
    /// |Σ 1/(1−μᵢ) − 1|, or `None` if some μᵢ is within `eps` of 1.
    pub fn formula_residual(&self, eps: f64) -> Option<f64> {
        let one = Complex64::new(1.0, 0.0);
        if self.multipliers.iter().any(|m| (one - m).norm() <= eps) {
            return None;
        }
        let s: Complex64 = self.multipliers.iter().map(|m| (one - m).inv()).sum();
        Some((s - one).norm())
    }

    /// Elementary symmetric functions (σ₁, σ₂, σ₃) of the multipliers.
    pub fn sigmas(&self) -> [Complex64; 3] {
        let [a, b, c] = self.multipliers;
        [a + b + c, a * b + b * c + c * a, a * b * c]
    }
}

/// Fixed points as roots of z·D(z) − N(z), with multipliers.
pub fn fixed_point_data(m: &QuadMap, geom_tol: f64) -> FixedPointSet {
    let (n, d) = (m.n, m.d);
    let roots = cubic_roots(d[0], d[1] - n[0], d[2] - n[1], -n[2])
        .expect("valid map has a nonzero fixed-point cubic");
    let multipliers = roots.map(|p| m.multiplier_at(p));
    let parabolic = (0..3).any(|i| (i + 1..3).any(|j| roots[i].chordal(&roots[j]) < geom_tol));
    FixedPointSet { points: roots, multipliers, parabolic }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModuliPoint {
    pub sigma1: f64,
    pub sigma2: f64,
}

impl ModuliPoint {
    pub fn new(sigma1: f64, sigma2: f64) -> Result<ModuliPoint> {
        if sigma1.is_finite() && sigma2.is_finite() {
            Ok(ModuliPoint { sigma1, sigma2 })
        } else {
            Err(Error::Domain(format!("non-finite moduli point ({sigma1}, {sigma2})")))
        }
    }

    pub fn dist(&self, o: &ModuliPoint) -> f64 {
        (self.sigma1 - o.sigma1).hypot(self.sigma2 - o.sigma2)
    }
}

/// (σ₁, σ₂) of the conjugacy class. Fails if an imaginary part or the
/// σ₃ = σ₁ − 2 residual exceeds `tol` relative to the magnitudes involved.
pub fn moduli_point(m: &QuadMap, tol: f64) -> Result<ModuliPoint> {
    let fp = fixed_point_data(m, 1e-6);
    let [s1, s2, s3] = fp.sigmas();
    for (s, what) in [(s1, "imaginary part of sigma1"), (s2, "imaginary part of sigma2")] {
        if s.im.abs() > tol * (1.0 + s.norm()) {
            return Err(Error::Tolerance { what, residual: s.im.abs(), tol });
        }
    }
    let r3 = (s3 - (s1 - 2.0)).norm();
    let scale = 1.0 + s1.norm().max(s3.norm());
    if r3 > tol * scale {
        return Err(Error::Tolerance { what: "sigma3 = sigma1 - 2", residual: r3, tol });
    }
    ModuliPoint::new(s1.re, s2.re)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// (1/μ)(z + 1/z) + a: critical points ±1.
    Plus,
    /// (1/μ)(z − 1/z) + b: critical points ±i.
    Minus,
}

/// Mixed normal form; `a` is the offset b in the minus variant.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MixedNormalForm {
    pub variant: Variant,
    pub mu: f64,
    pub a: f64,
}

impl MixedNormalForm {
    pub fn plus(mu: f64, a: f64) -> MixedNormalForm {
        MixedNormalForm { variant: Variant::Plus, mu, a }
    }

    pub fn minus(mu: f64, b: f64) -> MixedNormalForm {
        MixedNormalForm { variant: Variant::Minus, mu, a: b }
    }

    pub fn to_map(&self) -> Result<QuadMap> {
        if self.mu == 0.0 || !self.mu.is_finite() {
            return Err(Error::Domain("normal form needs a finite nonzero mu".into()));
        }
        let c = match self.variant {
            Variant::Plus => 1.0,
            Variant::Minus => -1.0,
        };
        QuadMap::new([1.0, self.a * self.mu, c], [0.0, self.mu, 0.0])
    }

    /// Closed-form (σ₁, σ₂); the minus variant substitutes a² → −b².
    pub fn closed_form_sigma(&self) -> Result<ModuliPoint> {
        let mu = self.mu;
        if mu == 0.0 {
            return Err(Error::Domain("mu = 0".into()));
        }
        let a2 = match self.variant {
            Variant::Plus => self.a * self.a,
            Variant::Minus => -self.a * self.a,
        };
        let s1 = mu * (1.0 - a2) - 2.0 + 4.0 / mu;
        let s2 = (mu + 1.0 / mu) * s1 - (mu * mu + 2.0 / mu);
        ModuliPoint::new(s1, s2)
    }
}

/// Expanded map together with the closed-form moduli point.
pub fn from_mixed_normal(nf: &MixedNormalForm) -> Result<(QuadMap, ModuliPoint)> {
    Ok((nf.to_map()?, nf.closed_form_sigma()?))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RealClass {
    CoveringDegPlus2,
    CoveringDegMinus2,
    MonotoneIncreasing,
    MonotoneDecreasing,
    Unimodal,
    BimodalPlusMinusPlus,
    BimodalMinusPlusMinus,
}

impl RealClass {
    pub fn is_covering(&self) -> bool {
        matches!(self, RealClass::CoveringDegPlus2 | RealClass::CoveringDegMinus2)
    }

    pub fn is_monotone(&self) -> bool {
        matches!(self, RealClass::MonotoneIncreasing | RealClass::MonotoneDecreasing)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RealDynamicsClass {
    pub class: RealClass,
    /// Conjugate to a normal form with a = 0 or b = 0 (an extra real symmetry).
    pub symmetric: bool,
    /// A critical value coincides with a critical point.
    pub ambiguous: bool,
}

/// The image f(ℝ̂) as the counterclockwise arc of length `len` from `start`
/// (circle coordinates). Its endpoints are the two critical values.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ImageArc {
    pub start: f64,
    pub len: f64,
}

impl ImageArc {
    /// Offset of `t` along the arc when `t` lies in the closed arc (with snap).
    pub fn offset(&self, t: f64, snap: f64) -> Option<f64> {
        let s = ccw(self.start, t);
        if s <= self.len + snap {
            Some(s.min(self.len))
        } else if s >= 2.0 * PI - snap {
            Some(0.0)
        } else {
            None
        }
    }

    pub fn at(&self, s: f64) -> f64 {
        sphere::wrap(self.start + s)
    }
}

/// Image arc of a map with two real critical points.
pub fn image_arc(m: &QuadMap, crit: [f64; 2]) -> ImageArc {
    let (tc0, tc1) = (theta(crit[0]), theta(crit[1]));
    let t0 = m.circle_step(tc0);
    let t1 = m.circle_step(tc1);
    let probe = sphere::wrap(tc0 + 0.5 * ccw(tc0, tc1));
    let ty = m.circle_step(probe);
    if ccw(t0, ty) < ccw(t0, t1) {
        ImageArc { start: t0, len: ccw(t0, t1) }
    } else {
        ImageArc { start: t1, len: ccw(t1, t0) }
    }
}

const SNAP: f64 = 1e-9;

pub fn classify_real(m: &QuadMap) -> Result<RealDynamicsClass> {
    let symmetric = on_symmetry_locus(m);
    let Some(crit) = m.real_critical_points()? else {
        let w = m.wronskian();
        let sign = if w[2] != 0.0 { w[2] } else { w[0] };
        let class = if sign > 0.0 { RealClass::CoveringDegPlus2 } else { RealClass::CoveringDegMinus2 };
        return Ok(RealDynamicsClass { class, symmetric, ambiguous: false });
    };
    let arc = image_arc(m, crit);
    let values = crit.map(|c| m.eval_real(c));
    let ambiguous = values
        .iter()
        .any(|v| crit.iter().any(|c| sphere::real_chordal(*v, *c) < 1e-6));
    let mut inside: Vec<f64> = crit.iter().filter_map(|c| arc.offset(theta(*c), SNAP)).collect();
    inside.sort_by(f64::total_cmp);
    let sign_at = |s: f64| m.circle_derivative(arc.at(s)).signum();
    let class = match inside.len() {
        0 => {
            if sign_at(0.5 * arc.len) > 0.0 {
                RealClass::MonotoneIncreasing
            } else {
                RealClass::MonotoneDecreasing
            }
        }
        1 => RealClass::Unimodal,
        _ => {
            let first = if inside[0] > SNAP {
                sign_at(0.5 * inside[0])
            } else {
                // an empty lap sits before a critical point at the arc start
                -sign_at(0.5 * (inside[0] + inside[1]))
            };
            if first > 0.0 {
                RealClass::BimodalPlusMinusPlus
            } else {
                RealClass::BimodalMinusPlusMinus
            }
        }
    };
    Ok(RealDynamicsClass { class, symmetric, ambiguous })
}

/// True when some real fixed-point multiplier μ gives a normal form with
/// a² = 1 − (σ₁ + 2 − 4/μ)/μ ≈ 0.
pub fn on_symmetry_locus(m: &QuadMap) -> bool {
    let fp = fixed_point_data(m, 1e-6);
    let s1 = fp.sigmas()[0].re;
    fp.multipliers.iter().any(|mu| {
        mu.im.abs() <= 1e-9 * (1.0 + mu.re.abs())
            && mu.re.abs() > 1e-9
            && mu.re.is_finite()
            && (1.0 - (s1 + 2.0 - 4.0 / mu.re) / mu.re).abs() < 1e-6
    })
}

/// Real Möbius transformation z ↦ (p z + q)/(r z + s).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mobius {
    pub m: [[f64; 2]; 2],
}

impl Mobius {
    pub fn new(p: f64, q: f64, r: f64, s: f64) -> Result<Mobius> {
        let det = p * s - q * r;
        if det == 0.0 || !det.is_finite() {
            return Err(Error::Degenerate("singular Mobius matrix".into()));
        }
        Ok(Mobius { m: [[p, q], [r, s]] })
    }

    pub fn identity() -> Mobius {
        Mobius { m: [[1.0, 0.0], [0.0, 1.0]] }
    }

    pub fn det(&self) -> f64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn preserves_orientation(&self) -> bool {
        self.det() > 0.0
    }

    pub fn inverse(&self) -> Mobius {
        let [[p, q], [r, s]] = self.m;
        Mobius { m: [[s, -q], [-r, p]] }
    }

    /// self ∘ other
    pub fn compose(&self, other: &Mobius) -> Mobius {
        let a = self.m;
        let b = other.m;
        let mut m = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                m[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        Mobius { m }
    }

    pub fn apply(&self, z: Point) -> Point {
        let [[p, q], [r, s]] = self.m;
        match z {
            Point::Infinity => {
                if r == 0.0 {
                    Point::Infinity
                } else {
                    Point::Finite(Complex64::new(p / r, 0.0))
                }
            }
            Point::Finite(z) => {
                let den = z * r + s;
                if den == Complex64::new(0.0, 0.0) {
                    Point::Infinity
                } else {
                    Point::Finite((z * p + q) / den)
                }
            }
        }
    }

    pub fn apply_real(&self, x: f64) -> f64 {
        match self.apply(Point::real(x)) {
            Point::Infinity => f64::INFINITY,
            Point::Finite(z) => z.re,
        }
    }

    /// M ∘ f ∘ M⁻¹.
    pub fn conjugate(&self, f: &QuadMap) -> Result<QuadMap> {
        let [[p, q], [r, s]] = self.m;
        // z = M⁻¹(w) = X/Y with X = s w − q, Y = −r w + p
        let (x, y) = ([s, -q], [-r, p]);
        let sub = |c: [f64; 3]| -> [f64; 3] {
            [
                c[0] * x[0] * x[0] + c[1] * x[0] * y[0] + c[2] * y[0] * y[0],
                c[0] * 2.0 * x[0] * x[1] + c[1] * (x[0] * y[1] + x[1] * y[0]) + c[2] * 2.0 * y[0] * y[1],
                c[0] * x[1] * x[1] + c[1] * x[1] * y[1] + c[2] * y[1] * y[1],
            ]
        };
        let (n, d) = (sub(f.n), sub(f.d));
        let num = [0, 1, 2].map(|i| p * n[i] + q * d[i]);
        let den = [0, 1, 2].map(|i| r * n[i] + s * d[i]);
        QuadMap::new(num, den)
    }
}

/// Which real critical point (in [`QuadMap::critical_points`] order) is c₀.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CriticalLabel {
    First,
    Second,
}

/// The orientation-preserving real Möbius map M taking `m` to center form:
/// c₀ ↦ 0 and the non-real fixed points ↦ ±i.
pub fn center_form_transform(m: &QuadMap, label: CriticalLabel) -> Result<Mobius> {
    let crit = m
        .real_critical_points()?
        .ok_or_else(|| Error::Precondition("critical points are not real".into()))?;
    let c0 = match label {
        CriticalLabel::First => crit[0],
        CriticalLabel::Second => crit[1],
    };
    let fp = fixed_point_data(m, 1e-6);
    let upper: Vec<Complex64> = fp
        .points
        .iter()
        .filter_map(|p| p.finite())
        .filter(|z| z.im > 1e-9 * (1.0 + z.re.abs()))
        .collect();
    let lower = fp.points.iter().filter_map(|p| p.finite()).filter(|z| z.im < -1e-9 * (1.0 + z.re.abs())).count();
    if upper.len() != 1 || lower != 1 {
        return Err(Error::Precondition("need one real fixed point and a non-real pair".into()));
    }
    let s = if c0.is_infinite() { Mobius::new(0.0, -1.0, 1.0, 0.0)? } else { Mobius::new(1.0, -c0, 0.0, 1.0)? };
    let r = match s.apply(Point::Finite(upper[0])) {
        Point::Finite(z) => z,
        Point::Infinity => return Err(Error::Precondition("fixed point sent to infinity".into())),
    };
    let (u, v) = (-r.re / r.im, r.norm_sqr() / r.im);
    Ok(Mobius::new(1.0, 0.0, u, v)?.compose(&s))
}

/// Center-form representative: c₀ = 0, non-real fixed points ±i.
pub fn normalize_center_form(m: &QuadMap, label: CriticalLabel) -> Result<QuadMap> {
    center_form_transform(m, label)?.conjugate(m)
}

/// Max-norm distance between coefficient vectors, allowing a sign flip.
pub fn coeff_distance(a: &QuadMap, b: &QuadMap) -> f64 {
    let va: Vec<f64> = a.n.iter().chain(a.d.iter()).copied().collect();
    let vb: Vec<f64> = b.n.iter().chain(b.d.iter()).copied().collect();
    let d = |s: f64| va.iter().zip(&vb).map(|(x, y)| (x - s * y).abs()).fold(0.0, f64::max);
    d(1.0).min(d(-1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn inv_sq() -> QuadMap {
        QuadMap::new([0.0, 0.0, 1.0], [1.0, 0.0, 0.0]).unwrap()
    }

    fn b_plus_inv_sq(b: f64) -> QuadMap {
        QuadMap::new([b, 0.0, 1.0], [1.0, 0.0, 0.0]).unwrap()
    }

    #[test]
    fn eval_handles_poles_and_infinity() {
        let f = inv_sq();
        assert_abs_diff_eq!(f.eval_real(2.0), 0.25, epsilon = 1e-15);
        assert!(f.eval_real(0.0).is_infinite());
        assert_eq!(f.eval(Point::Infinity), Point::real(0.0));
        let g = MixedNormalForm::plus(2.0, 0.0).to_map().unwrap();
        assert_abs_diff_eq!(g.eval_real(1.0), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn rejects_degenerate_maps() {
        assert!(QuadMap::new([1.0, -1.0, 0.0], [1.0, 0.0, 0.0]).is_err());
        assert!(QuadMap::new([0.0, 1.0, 0.0], [0.0, 0.0, 1.0]).is_err());
        assert!(QuadMap::new([f64::NAN, 0.0, 1.0], [1.0, 0.0, 0.0]).is_err());
    }

    #[test]
    fn critical_points_examples() {
        let c = inv_sq().critical_points().unwrap();
        assert_eq!(c[0], Point::real(0.0));
        assert!(c[1].is_infinite());
        let c = MixedNormalForm::plus(3.0, 0.4).to_map().unwrap().critical_points().unwrap();
        assert_abs_diff_eq!(c[0].as_real(0.0).unwrap(), -1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(c[1].as_real(0.0).unwrap(), 1.0, epsilon = 1e-14);
        let c = b_plus_inv_sq(-2.5).critical_points().unwrap();
        assert_eq!(c[0], Point::real(0.0));
        assert!(c[1].is_infinite());
        let c = MixedNormalForm::minus(3.0, 0.0).to_map().unwrap().critical_points().unwrap();
        assert_abs_diff_eq!(c[0].finite().unwrap().im, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn inverse_square_fixed_points() {
        let fp = fixed_point_data(&inv_sq(), 1e-6);
        for (p, m) in fp.points.iter().zip(fp.multipliers) {
            let z = p.finite().unwrap();
            assert_abs_diff_eq!((z * z * z - 1.0).norm(), 0.0, epsilon = 1e-14);
            assert_abs_diff_eq!((m + 2.0).norm(), 0.0, epsilon = 1e-13);
        }
        assert!(fp.formula_residual(1e-6).unwrap() < 1e-14);
    }

    #[test]
    fn one_minus_inverse_square_fixed_points() {
        let f = QuadMap::new([1.0, 0.0, -1.0], [1.0, 0.0, 0.0]).unwrap();
        let fp = fixed_point_data(&f, 1e-6);
        for (p, m) in fp.points.iter().zip(fp.multipliers) {
            let z = p.finite().unwrap();
            assert!((z * z * z - z * z + 1.0).norm() < 1e-13);
            assert!((m - 2.0 / (z * z * z)).norm() < 1e-12);
        }
    }

    #[test]
    fn moduli_examples() {
        let m = moduli_point(&inv_sq(), 1e-9).unwrap();
        assert_abs_diff_eq!(m.sigma1, -6.0, epsilon = 1e-12);
        assert_abs_diff_eq!(m.sigma2, 12.0, epsilon = 1e-12);
        let f = QuadMap::new([1.0, 0.0, -1.0], [1.0, 0.0, 0.0]).unwrap();
        let m = moduli_point(&f, 1e-9).unwrap();
        assert_abs_diff_eq!(m.sigma1, -6.0, epsilon = 1e-12);
        assert_abs_diff_eq!(m.sigma2, 8.0, epsilon = 1e-12);
        for b in [-1.0, 0.0, 1.0] {
            let m = moduli_point(&b_plus_inv_sq(b), 1e-9).unwrap();
            assert_abs_diff_eq!(m.sigma1, -6.0, epsilon = 1e-12);
            assert_abs_diff_eq!(m.sigma2, 4.0 * b * b * b + 12.0, epsilon = 1e-11);
        }
    }

    #[test]
    fn mixed_normal_examples() {
        let (map, s) = from_mixed_normal(&MixedNormalForm::plus(2.0, 0.0)).unwrap();
        assert_abs_diff_eq!(s.sigma1, 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(s.sigma2, 0.0, epsilon = 1e-14);
        let m = moduli_point(&map, 1e-9).unwrap();
        assert!(m.dist(&s) < 1e-9);
        let (map, s) = from_mixed_normal(&MixedNormalForm::plus(4.0, 1.0)).unwrap();
        assert_abs_diff_eq!(s.sigma1, -1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(s.sigma2, -20.75, epsilon = 1e-14);
        assert!(moduli_point(&map, 1e-9).unwrap().dist(&s) < 1e-9);
        assert!(from_mixed_normal(&MixedNormalForm::plus(0.0, 1.0)).is_err());
    }

    #[test]
    fn classification_examples() {
        assert_eq!(classify_real(&b_plus_inv_sq(1.0)).unwrap().class, RealClass::Unimodal);
        let c = classify_real(&MixedNormalForm::minus(3.0, 0.0).to_map().unwrap()).unwrap();
        assert!(c.class.is_covering());
        assert!(c.symmetric);
        let c = classify_real(&inv_sq()).unwrap();
        assert_eq!(c.class, RealClass::BimodalPlusMinusPlus);
        assert!(c.symmetric && c.ambiguous);
        let f = QuadMap::new([1.0, 0.0, -1.0], [1.0, 0.0, 0.0]).unwrap();
        assert_eq!(classify_real(&f).unwrap().class, RealClass::BimodalPlusMinusPlus);
        for b in [-5.0, -1.0, -0.1] {
            assert_eq!(classify_real(&b_plus_inv_sq(b)).unwrap().class, RealClass::BimodalPlusMinusPlus);
        }
        for b in [0.1, 1.0, 5.0] {
            assert_eq!(classify_real(&b_plus_inv_sq(b)).unwrap().class, RealClass::Unimodal);
        }
    }

    #[test]
    fn center_form_of_inverse_square() {
        let g = normalize_center_form(&inv_sq(), CriticalLabel::First).unwrap();
        let r3 = 3f64.sqrt();
        let expect = QuadMap::new([r3, -6.0, 3.0 * r3], [9.0, -2.0 * r3, 3.0]).unwrap();
        assert!(coeff_distance(&g, &expect) < 1e-6, "{g:?}");
    }

    #[test]
    fn center_form_of_one_minus_inverse_square() {
        let f = QuadMap::new([1.0, 0.0, -1.0], [1.0, 0.0, 0.0]).unwrap();
        let g = normalize_center_form(&f, CriticalLabel::First).unwrap();
        let expect = QuadMap::new([1.7753, -2.3560, -1.0], [3.5339, 2.7753, 1.1780]).unwrap();
        assert!(coeff_distance(&g, &expect) < 1e-3, "{g:?}");
        let crit = g.real_critical_points().unwrap().unwrap();
        let label = if crit[0].abs() < 1e-12 { CriticalLabel::First } else { CriticalLabel::Second };
        let again = normalize_center_form(&g, label).unwrap();
        assert!(coeff_distance(&g, &again) < 1e-9);
    }

    #[test]
    fn conjugation_round_trip() {
        let f = MixedNormalForm::plus(-3.0, 0.2).to_map().unwrap();
        let m = Mobius::new(2.0, 1.0, -1.0, 3.0).unwrap();
        let g = m.conjugate(&f).unwrap();
        let back = m.inverse().conjugate(&g).unwrap();
        assert!(coeff_distance(&f, &back) < 1e-12);
        let x = 0.37;
        assert_abs_diff_eq!(g.eval_real(m.apply_real(x)), m.apply_real(f.eval_real(x)), epsilon = 1e-12);
    }

    #[test]
    fn circle_derivative_matches_multiplier() {
        let f = QuadMap::new([1.0, 0.0, -1.0], [1.0, 0.0, 0.0]).unwrap();
        let fp = fixed_point_data(&f, 1e-6);
        let x = fp.points.iter().find_map(|p| p.as_real(1e-12)).unwrap();
        let m = fp.multipliers.iter().find(|m| m.im == 0.0).unwrap().re;
        assert_abs_diff_eq!(f.cycle_multiplier_real(x, 1), m, epsilon = 1e-10);
    }

    #[test]
    fn serde_round_trip() {
        let f = MixedNormalForm::plus(-3.0, 0.2).to_map().unwrap();
        let s = serde_json::to_string(&f).unwrap();
        assert!(s.contains("\"num2\""));
        let g: QuadMap = serde_json::from_str(&s).unwrap();
        assert_eq!(f, g);
        let nf: MixedNormalForm = serde_json::from_str(r#"{"variant":"plus","mu":2.0,"a":0.5}"#).unwrap();
        assert_eq!(nf, MixedNormalForm::plus(2.0, 0.5));
    }
}
