//! Points of the Riemann sphere, the real circle, and root finding for
//! binary forms of degree two and three.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Point {
    Finite(Complex64),
    Infinity,
}

impl Point {
    pub fn real(x: f64) -> Point {
        if x.is_infinite() {
            Point::Infinity
        } else {
            Point::Finite(Complex64::new(x, 0.0))
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Point::Infinity)
    }

    /// Real value on ℝ̂ (∞ maps to `f64::INFINITY`), or `None` off the real circle.
    pub fn as_real(&self, tol: f64) -> Option<f64> {
        match *self {
            Point::Infinity => Some(f64::INFINITY),
            Point::Finite(z) if z.im.abs() <= tol * (1.0 + z.re.abs()) => Some(z.re),
            _ => None,
        }
    }

    pub fn finite(&self) -> Option<Complex64> {
        match *self {
            Point::Finite(z) => Some(z),
            Point::Infinity => None,
        }
    }

    pub fn inv(&self) -> Point {
        match *self {
            Point::Infinity => Point::Finite(Complex64::new(0.0, 0.0)),
            Point::Finite(z) if z == Complex64::new(0.0, 0.0) => Point::Infinity,
            Point::Finite(z) => Point::Finite(z.inv()),
        }
    }

    /// Chordal distance, bounded by 2.
    pub fn chordal(&self, other: &Point) -> f64 {
        match (*self, *other) {
            (Point::Infinity, Point::Infinity) => 0.0,
            (Point::Finite(z), Point::Infinity) | (Point::Infinity, Point::Finite(z)) => {
                2.0 / (1.0 + z.norm_sqr()).sqrt()
            }
            (Point::Finite(z), Point::Finite(w)) => {
                2.0 * (z - w).norm() / ((1.0 + z.norm_sqr()).sqrt() * (1.0 + w.norm_sqr()).sqrt())
            }
        }
    }
}

/// Circle coordinate θ = 2·atan(x) in (−π, π], with ∞ at π.
pub fn theta(x: f64) -> f64 {
    if x.is_infinite() {
        PI
    } else {
        2.0 * x.atan()
    }
}

/// Inverse of [`theta`]; θ = ±π gives ∞.
pub fn from_theta(t: f64) -> f64 {
    let t = wrap(t);
    if (t - PI).abs() < 1e-300 {
        f64::INFINITY
    } else {
        (t / 2.0).tan()
    }
}

/// Reduce an angle to (−π, π].
pub fn wrap(t: f64) -> f64 {
    let mut r = t % (2.0 * PI);
    if r <= -PI {
        r += 2.0 * PI
    } else if r > PI {
        r -= 2.0 * PI
    }
    r
}

/// Counterclockwise angular distance from `a` to `b`, in [0, 2π).
pub fn ccw(a: f64, b: f64) -> f64 {
    let d = (b - a).rem_euclid(2.0 * PI);
    if d >= 2.0 * PI {
        0.0
    } else {
        d
    }
}

/// Chordal distance between two points of ℝ̂.
pub fn real_chordal(x: f64, y: f64) -> f64 {
    Point::real(x).chordal(&Point::real(y))
}

/// Roots of A·X² + B·XY + C·Y² on the sphere (X/Y = z). The chart with the
/// larger end coefficient is used, so a vanishing `a` yields ∞ stably.
pub fn quadratic_roots(a: f64, b: f64, c: f64) -> Option<[Point; 2]> {
    if a == 0.0 && b == 0.0 && c == 0.0 {
        return None;
    }
    if a == 0.0 && c == 0.0 {
        return Some([Point::real(0.0), Point::Infinity]);
    }
    if a.abs() >= c.abs() {
        Some(monic_quadratic(b / a, c / a).map(Point::Finite))
    } else {
        let w = monic_quadratic(b / c, a / c);
        Some(w.map(|w| Point::Finite(w).inv()))
    }
}

/// Roots of z² + b z + c, computed without cancellation.
fn monic_quadratic(b: f64, c: f64) -> [Complex64; 2] {
    let disc = b * b - 4.0 * c;
    if disc >= 0.0 {
        let s = disc.sqrt();
        let q = -0.5 * (b + s.copysign(b));
        if q == 0.0 {
            [Complex64::new(0.0, 0.0); 2]
        } else {
            [Complex64::new(q, 0.0), Complex64::new(c / q, 0.0)]
        }
    } else {
        let s = (-disc).sqrt() / 2.0;
        [Complex64::new(-b / 2.0, s), Complex64::new(-b / 2.0, -s)]
    }
}

/// Roots of c3·X³ + c2·X²Y + c1·XY² + c0·Y³ on the sphere. Real input gives one
/// real root plus either two real roots or an exactly conjugate pair.
pub fn cubic_roots(c3: f64, c2: f64, c1: f64, c0: f64) -> Option<[Point; 3]> {
    if c3 == 0.0 {
        let q = quadratic_roots(c2, c1, c0)?;
        return Some([Point::Infinity, q[0], q[1]]);
    }
    if c3.abs() >= c0.abs() {
        let r = real_monic_cubic(c2 / c3, c1 / c3, c0 / c3);
        Some(r.map(Point::Finite))
    } else {
        let r = real_monic_cubic(c1 / c0, c2 / c0, c3 / c0);
        Some(r.map(|w| Point::Finite(w).inv()))
    }
}

/// Roots of z³ + a z² + b z + c by Cardano, then a real Newton polish of the
/// real root, deflation, and one complex Newton step per root.
pub fn real_monic_cubic(a: f64, b: f64, c: f64) -> [Complex64; 3] {
    let eval = |z: Complex64| ((z + a) * z + b) * z + c;
    let deriv = |z: Complex64| (3.0 * z + 2.0 * a) * z + b;
    let raw = cardano(a, b, c);
    let mut r = raw
        .iter()
        .min_by(|x, y| x.im.abs().total_cmp(&y.im.abs()))
        .map(|z| z.re)
        .unwrap_or(0.0);
    let real_eval = |x: f64| ((x + a) * x + b) * x + c;
    for _ in 0..4 {
        let f = real_eval(r);
        let d = (3.0 * r + 2.0 * a) * r + b;
        if f == 0.0 || d == 0.0 {
            break;
        }
        let next = r - f / d;
        if !next.is_finite() || real_eval(next).abs() >= f.abs() {
            break;
        }
        r = next;
    }
    // z³ + a z² + b z + c = (z − r)(z² + e1 z + e0)
    let e1 = a + r;
    let e0 = b + e1 * r;
    let q = monic_quadratic(e1, e0);
    let mut out = [Complex64::new(r, 0.0), q[0], q[1]];
    for z in out.iter_mut().skip(1) {
        let d = deriv(*z);
        if d.norm() > 0.0 {
            let next = *z - eval(*z) / d;
            if next.is_finite() && eval(next).norm() < eval(*z).norm() {
                *z = next;
            }
        }
    }
    if out[1].im != 0.0 {
        // keep the pair exactly conjugate
        let m = Complex64::new(0.5 * (out[1].re + out[2].re), 0.5 * (out[1].im - out[2].im));
        out[1] = m;
        out[2] = m.conj();
    }
    out
}

fn cardano(a: f64, b: f64, c: f64) -> [Complex64; 3] {
    let p = b - a * a / 3.0;
    let q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
    let shift = Complex64::new(-a / 3.0, 0.0);
    let disc = Complex64::new(q * q / 4.0 + p * p * p / 27.0, 0.0).sqrt();
    let h = Complex64::new(-q / 2.0, 0.0);
    let u3 = if (h + disc).norm() >= (h - disc).norm() { h + disc } else { h - disc };
    if u3.norm() == 0.0 {
        return [shift; 3];
    }
    let u = u3.powf(1.0 / 3.0);
    let omega = Complex64::from_polar(1.0, 2.0 * PI / 3.0);
    let mut out = [Complex64::new(0.0, 0.0); 3];
    let mut w = Complex64::new(1.0, 0.0);
    for slot in out.iter_mut() {
        let uk = u * w;
        *slot = uk - p / (3.0 * uk) + shift;
        w *= omega;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn contains(roots: &[Point], z: Complex64) -> bool {
        roots.iter().any(|r| r.chordal(&Point::Finite(z)) < 1e-12)
    }

    #[test]
    fn cubic_with_three_real_roots() {
        let r = cubic_roots(1.0, -6.0, 11.0, -6.0).unwrap();
        for x in [1.0, 2.0, 3.0] {
            assert!(contains(&r, Complex64::new(x, 0.0)));
        }
    }

    #[test]
    fn cubic_roots_of_unity() {
        let r = cubic_roots(1.0, 0.0, 0.0, -1.0).unwrap();
        for k in 0..3 {
            assert!(contains(&r, Complex64::from_polar(1.0, 2.0 * PI * k as f64 / 3.0)));
        }
        assert_eq!(r[1], Point::Finite(r[2].finite().unwrap().conj()));
    }

    #[test]
    fn degenerate_leading_coefficient_gives_infinity() {
        let r = cubic_roots(0.0, 1.0, 0.0, -4.0).unwrap();
        assert!(r[0].is_infinite());
        assert!(contains(&r, Complex64::new(2.0, 0.0)));
        assert!(contains(&r, Complex64::new(-2.0, 0.0)));
    }

    #[test]
    fn reversed_chart_for_tiny_leading_coefficient() {
        // 1e-12 z³ + z − 1: roots near 1 and two of modulus ~1e6
        let r = cubic_roots(1e-12, 0.0, 1.0, -1.0).unwrap();
        assert!(contains(&r, Complex64::new(1.0 - 1e-12, 0.0)));
        assert!(r.iter().filter_map(|p| p.finite()).any(|z| (z.norm() - 1e6).abs() < 1.0));
    }

    #[test]
    fn quadratic_root_at_infinity() {
        let r = quadratic_roots(0.0, 1.0, -3.0).unwrap();
        assert!(r.iter().any(|p| p.is_infinite()));
        assert!(contains(&r, Complex64::new(3.0, 0.0)));
    }

    #[test]
    fn theta_round_trip() {
        for x in [-5.0, -1.0, 0.0, 0.3, 7.0] {
            assert!((from_theta(theta(x)) - x).abs() < 1e-12);
        }
        assert!(from_theta(PI).is_infinite());
    }
}
