//! Lap counting on the image arc.
//!
//! After a real Möbius change of coordinates sending a point outside f(ℝ̂)
//! to ∞, the image arc is a finite interval J = [α, β] without poles. Every
//! interval met by the recursion has endpoints in the forward orbits of the
//! critical values, so endpoints are kept symbolically as indices into an
//! orbit table. With T_n(K) the number of turning points of fⁿ in int K,
//!
//!   T_n(K) = #(C ∩ int K) + Σᵢ T_{n−1}(f(Kᵢ)),
//!
//! where the Kᵢ are the pieces of K cut at interior critical points. Then
//! lap(fⁿ|J) = T_n(J) + 1.

use super::{EntropyEstimate, Method};
use crate::error::Result;
use crate::ratmap::{classify_real, image_arc, Mobius, QuadMap, RealClass};
use crate::sphere::{ccw, from_theta, theta};
use std::collections::HashMap;
use std::f64::consts::{LN_2, PI};

pub const DEFAULT_N_MAX: usize = 48;
pub const DEFAULT_BUDGET: usize = 2_000_000;
/// Orbit points closer than this fraction of |J| are identified.
const SNAP_REL: f64 = 1e-10;
/// u128 holds 3⁸⁰.
const N_CAP: usize = 80;

#[derive(Clone, Debug, PartialEq)]
pub struct LapCounts {
    /// laps[k] = lap(f^{k+1}) on the image arc.
    pub laps: Vec<u128>,
    pub collision: bool,
    pub budget_exhausted: bool,
    pub states: usize,
}

struct Orbits<'a> {
    g: &'a QuadMap,
    tol: f64,
    values: Vec<f64>,
    next: Vec<Option<usize>>,
    n_crit: usize,
    collision: bool,
}

impl Orbits<'_> {
    fn node(&mut self, x: f64) -> usize {
        if let Some(i) = self.values.iter().position(|y| (x - y).abs() <= self.tol) {
            return i;
        }
        self.values.push(x);
        self.next.push(None);
        self.values.len() - 1
    }

    fn succ(&mut self, i: usize) -> usize {
        if let Some(j) = self.next[i] {
            return j;
        }
        let j = self.node(self.g.eval_real(self.values[i]));
        if j < self.n_crit {
            self.collision = true;
        }
        self.next[i] = Some(j);
        j
    }
}

struct Counter<'a> {
    orbits: Orbits<'a>,
    inner: Vec<usize>,
    memo: HashMap<(u32, u32, u32), u128>,
}

impl Counter<'_> {
    fn turning(&mut self, n: usize, a: usize, b: usize) -> u128 {
        if n == 0 || a == b {
            return 0;
        }
        let (a, b) = if self.orbits.values[a] <= self.orbits.values[b] { (a, b) } else { (b, a) };
        let key = (n as u32, a as u32, b as u32);
        if let Some(&v) = self.memo.get(&key) {
            return v;
        }
        let (lo, hi, tol) = (self.orbits.values[a], self.orbits.values[b], self.orbits.tol);
        let mut cuts = vec![a];
        let mut inside: Vec<usize> =
            self.inner.iter().copied().filter(|&c| self.orbits.values[c] > lo + tol && self.orbits.values[c] < hi - tol).collect();
        inside.sort_by(|x, y| self.orbits.values[*x].total_cmp(&self.orbits.values[*y]));
        let mut total = inside.len() as u128;
        cuts.extend(inside);
        cuts.push(b);
        for w in cuts.windows(2) {
            let (u, v) = (self.orbits.succ(w[0]), self.orbits.succ(w[1]));
            total = total.saturating_add(self.turning(n - 1, u, v));
        }
        self.memo.insert(key, total);
        total
    }
}

/// Lap numbers of fⁿ restricted to f(ℝ̂), n = 1..=n_max. Requires two real
/// critical points; `budget` caps memoized states.
pub fn lap_counts(m: &QuadMap, n_max: usize, budget: usize) -> Result<Option<LapCounts>> {
    let Some(crit) = m.real_critical_points()? else {
        return Ok(None);
    };
    let arc = image_arc(m, crit);
    let gap = 2.0 * PI - arc.len;
    let crit_theta = crit.map(theta);
    let mut xi = arc.at(arc.len + 0.5 * gap);
    for frac in [1.0 / 3.0, 2.0 / 3.0, 0.25] {
        if crit_theta.iter().all(|t| ccw(*t, xi).min(ccw(xi, *t)) > 1e-3 * gap) {
            break;
        }
        xi = arc.at(arc.len + frac * gap);
    }
    let xi = from_theta(xi);
    let h = if xi.is_infinite() { Mobius::identity() } else { Mobius::new(0.0, 1.0, 1.0, -xi)? };
    let g = h.conjugate(m)?;
    let c = crit.map(|x| h.apply_real(x));
    let v = [m.eval_real(crit[0]), m.eval_real(crit[1])].map(|x| h.apply_real(x));
    let (lo, hi) = (v[0].min(v[1]), v[0].max(v[1]));
    let tol = SNAP_REL * (hi - lo).max(f64::MIN_POSITIVE);
    let mut orbits = Orbits { g: &g, tol, values: Vec::new(), next: Vec::new(), n_crit: 0, collision: false };
    let cn = [orbits.node(c[0]), orbits.node(c[1])];
    orbits.n_crit = orbits.values.len();
    let inner: Vec<usize> = cn.iter().copied().filter(|&i| {
        let x = orbits.values[i];
        x.is_finite() && x > lo + tol && x < hi - tol
    })
    .collect();
    let (ja, jb) = (orbits.node(v[0]), orbits.node(v[1]));
    let mut counter = Counter { orbits, inner, memo: HashMap::new() };
    let mut laps = Vec::new();
    let mut budget_exhausted = false;
    for n in 1..=n_max.min(N_CAP) {
        if counter.memo.len() > budget {
            budget_exhausted = true;
            break;
        }
        laps.push(counter.turning(n, ja, jb).saturating_add(1));
    }
    Ok(Some(LapCounts {
        laps,
        collision: counter.orbits.collision,
        budget_exhausted,
        states: counter.memo.len(),
    }))
}

/// Entropy from lap growth. Covering classes give log 2 and monotone classes
/// give 0 without counting.
pub fn lap_entropy(m: &QuadMap, n_max: usize, budget: usize) -> Result<EntropyEstimate> {
    let class = classify_real(m)?.class;
    if class.is_covering() {
        return Ok(EntropyEstimate::exact(LN_2, Method::LapCount));
    }
    if matches!(class, RealClass::MonotoneIncreasing | RealClass::MonotoneDecreasing) {
        return Ok(EntropyEstimate::exact(0.0, Method::LapCount));
    }
    let counts = lap_counts(m, n_max, budget)?.expect("non-covering class has real critical points");
    let (value, mut error_bound) = growth_rate(&counts.laps);
    if counts.budget_exhausted {
        error_bound = (4.0 * error_bound).max(1e-2);
    }
    Ok(EntropyEstimate {
        value,
        method: Method::LapCount,
        error_bound,
        iterations: counts.laps.len(),
        budget_exhausted: counts.budget_exhausted,
        collision: counts.collision,
    })
}

/// Fit log lap_n = h·n + d·log n + c over the last half of the sequence;
/// the error is the spread of the last-quarter increments of log lap_n.
pub fn growth_rate(laps: &[u128]) -> (f64, f64) {
    let n = laps.len();
    if n == 0 {
        return (0.0, LN_2);
    }
    let ls: Vec<f64> = laps.iter().map(|&l| (l as f64).ln()).collect();
    if n < 4 {
        let h = ls[n - 1] / n as f64;
        return (h.clamp(0.0, LN_2), LN_2);
    }
    let half = n / 2;
    if laps[n - 1] == laps[half - 1] {
        return (0.0, 0.0);
    }
    let fit = |lo: usize, hi: usize| {
        let rows: Vec<([f64; 3], f64)> =
            (lo..hi).map(|i| { let k = (i + 1) as f64; ([k, k.ln(), 1.0], ls[i]) }).collect();
        least_squares3(&rows).map(|c| c[0]).unwrap_or_else(|| (ls[hi - 1] - ls[lo - 1]) / (hi - lo) as f64)
    };
    let h = fit(half, n);
    let quarter = (n / 4).max(2);
    let inc: Vec<f64> = (n - quarter..n).map(|i| ls[i] - ls[i - 1]).collect();
    let spread = inc.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - inc.iter().cloned().fold(f64::INFINITY, f64::min);
    // Finite-n bias shows up as drift between the last half and the window one quarter earlier.
    let drift = if n >= 8 { (h - fit(half - n / 4, n - n / 4)).abs() } else { 0.0 };
    (h.clamp(0.0, LN_2), spread.max(drift).max(1e-12))
}

/// Normal equations for a three-column least-squares fit.
fn least_squares3(rows: &[([f64; 3], f64)]) -> Option<[f64; 3]> {
    let mut a = [[0.0f64; 4]; 3];
    for (x, y) in rows {
        for i in 0..3 {
            for j in 0..3 {
                a[i][j] += x[i] * x[j];
            }
            a[i][3] += x[i] * y;
        }
    }
    for col in 0..3 {
        let piv = (col..3).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, piv);
        for r in 0..3 {
            if r != col {
                let f = a[r][col] / a[col][col];
                for k in col..4 {
                    a[r][k] -= f * a[col][k];
                }
            }
        }
    }
    Some([a[0][3] / a[0][0], a[1][3] / a[1][1], a[2][3] / a[2][2]])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratmap::MixedNormalForm;
    use approx::assert_abs_diff_eq;

    fn b_plus_inv_sq(b: f64) -> QuadMap {
        QuadMap::new([b, 0.0, 1.0], [1.0, 0.0, 0.0]).unwrap()
    }

    #[test]
    fn zero_for_positive_offset() {
        let e = lap_entropy(&b_plus_inv_sq(1.0), DEFAULT_N_MAX, DEFAULT_BUDGET).unwrap();
        assert_abs_diff_eq!(e.value, 0.0, epsilon = 1e-3);
    }

    #[test]
    fn full_entropy_deep_in_escape_region() {
        let e = lap_entropy(&b_plus_inv_sq(-10.0), DEFAULT_N_MAX, DEFAULT_BUDGET).unwrap();
        assert_abs_diff_eq!(e.value, LN_2, epsilon = 1e-2);
    }

    #[test]
    fn golden_mean_map() {
        // 1 − 1/z² has the critical orbit 0 → ∞ → 1 → 0
        let f = QuadMap::new([1.0, 0.0, -1.0], [1.0, 0.0, 0.0]).unwrap();
        let e = lap_entropy(&f, DEFAULT_N_MAX, DEFAULT_BUDGET).unwrap();
        let golden = (1.0 + 5f64.sqrt()) / 2.0;
        assert_abs_diff_eq!(e.value, golden.ln(), epsilon = 1e-9);
        let c = lap_counts(&f, 8, DEFAULT_BUDGET).unwrap().unwrap();
        assert_eq!(c.laps, vec![2, 3, 5, 8, 13, 21, 34, 55]);
        assert!(c.collision);
    }

    #[test]
    fn covering_short_circuits() {
        let f = MixedNormalForm::minus(3.0, 0.0).to_map().unwrap();
        let e = lap_entropy(&f, DEFAULT_N_MAX, DEFAULT_BUDGET).unwrap();
        assert_eq!(e.value, LN_2);
        assert_eq!(e.iterations, 0);
    }

    #[test]
    fn linear_lap_growth_reads_as_zero() {
        let laps: Vec<u128> = (1..=48).map(|n| n as u128 + 1).collect();
        let (h, err) = growth_rate(&laps);
        assert!(h < 2e-3, "{h}");
        assert!(err < 1e-2);
    }

    #[test]
    fn tight_budget_widens_error() {
        let f = b_plus_inv_sq(-1.7);
        let e = lap_entropy(&f, 48, 50).unwrap();
        assert!(e.budget_exhausted);
        assert!(e.error_bound >= 1e-2);
    }
}
