//! Topological entropy: Markov transition matrices, the roots r_q, and lap
//! counting for piecewise-monotone restrictions to the real circle.

mod lap;

pub use lap::{lap_counts, lap_entropy, LapCounts, DEFAULT_BUDGET, DEFAULT_N_MAX};

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

pub fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Transition matrix of the Markov partition I_j = [x_j, x_{j+1}] of a
/// center with rotation number p/q. Entry (i, j) is 1 iff f(I_j) ⊇ I_i.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MarkovData {
    pub q: usize,
    pub p: usize,
    pub matrix: Vec<Vec<u8>>,
}

impl MarkovData {
    /// Matrix as CSV integer rows.
    pub fn to_csv(&self) -> String {
        self.matrix
            .iter()
            .map(|r| r.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(","))
            .collect::<Vec<_>>()
            .join("\n")
            + "\n"
    }
}

/// I₀ covers every interval except I_p; I_j maps onto I_{j+p} otherwise.
pub fn markov_matrix(q: usize, p: usize) -> Result<MarkovData> {
    if q < 2 || p == 0 || p >= q {
        return Err(Error::Argument(format!("need q >= 2 and 1 <= p < q, got q={q}, p={p}")));
    }
    if gcd(q as u64, p as u64) != 1 {
        return Err(Error::Argument(format!("gcd({p}, {q}) != 1")));
    }
    let mut matrix = vec![vec![0u8; q]; q];
    for (i, row) in matrix.iter_mut().enumerate() {
        if i != p {
            row[0] = 1;
        }
    }
    for j in 1..q {
        matrix[(j + p) % q][j] = 1;
    }
    Ok(MarkovData { q, p, matrix })
}

/// Exact coefficients of det(tI − A), leading first (Berkowitz, division free).
pub fn char_poly(md: &MarkovData) -> Result<Vec<i128>> {
    let a: Vec<Vec<i128>> = md.matrix.iter().map(|r| r.iter().map(|&v| v as i128).collect()).collect();
    berkowitz(&a)
}

fn overflow() -> Error {
    Error::Domain("integer overflow in characteristic polynomial".into())
}

/// Characteristic polynomial of an integer matrix, leading coefficient first.
pub fn berkowitz(a: &[Vec<i128>]) -> Result<Vec<i128>> {
    let n = a.len();
    if n == 0 {
        return Ok(vec![1]);
    }
    let mut v = vec![1, -a[0][0]];
    for r in 1..n {
        // leading (r+1)x(r+1) block: [[M, C], [R, a_rr]]
        let col: Vec<i128> = (0..r).map(|i| a[i][r]).collect();
        let mut t = vec![1, -a[r][r]];
        let mut mc = col.clone();
        for _ in 0..r {
            let rc = (0..r).try_fold(0i128, |s, j| s.checked_add(a[r][j].checked_mul(mc[j])?)).ok_or_else(overflow)?;
            t.push(rc.checked_neg().ok_or_else(overflow)?);
            let next: Option<Vec<i128>> = (0..r)
                .map(|i| (0..r).try_fold(0i128, |s, j| s.checked_add(a[i][j].checked_mul(mc[j])?)))
                .collect();
            mc = next.ok_or_else(overflow)?;
        }
        let mut nv = vec![0i128; r + 2];
        for (i, slot) in nv.iter_mut().enumerate() {
            for j in 0..=i.min(r) {
                if i - j < t.len() {
                    *slot = slot.checked_add(t[i - j].checked_mul(v[j]).ok_or_else(overflow)?).ok_or_else(overflow)?;
                }
            }
        }
        v = nv;
    }
    Ok(v)
}

/// t^q − t^{q−1} − … − t, leading first.
pub fn expected_char_poly(q: usize) -> Vec<i128> {
    let mut c = vec![1i128];
    c.extend(std::iter::repeat(-1).take(q - 1));
    c.push(0);
    c
}

/// Leading eigenvalue by power iteration from the all-ones vector. Stops when
/// the Collatz–Wielandt bounds over the positive components are within
/// `tol` of each other.
pub fn spectral_radius(md: &MarkovData, tol: f64) -> Result<f64> {
    const CAP: usize = 10_000;
    let q = md.q;
    let mut x = vec![1.0f64; q];
    let mut spread = f64::INFINITY;
    for _ in 0..CAP {
        let y: Vec<f64> = md
            .matrix
            .iter()
            .map(|row| row.iter().zip(&x).map(|(&a, &xi)| a as f64 * xi).sum())
            .collect();
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        for (yi, xi) in y.iter().zip(&x) {
            if *xi > 0.0 {
                let r = yi / xi;
                lo = lo.min(r);
                hi = hi.max(r);
            }
        }
        spread = hi - lo;
        if spread <= tol {
            return Ok(0.5 * (hi + lo));
        }
        let norm = y.iter().cloned().fold(0.0, f64::max);
        if norm == 0.0 {
            return Ok(0.0);
        }
        x = y.into_iter().map(|v| v / norm).collect();
    }
    Err(Error::NoConvergence(format!("power iteration spread {spread:e} after {CAP} steps")))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    MarkovEigen,
    PolyRoot,
    LapCount,
}

/// Entropy in natural-log units.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntropyEstimate {
    pub value: f64,
    pub method: Method,
    pub error_bound: f64,
    pub iterations: usize,
    /// Lap counting stopped at the state budget before `n_max`.
    #[serde(default)]
    pub budget_exhausted: bool,
    /// An orbit point snapped onto a critical point.
    #[serde(default)]
    pub collision: bool,
}

impl EntropyEstimate {
    pub fn exact(value: f64, method: Method) -> EntropyEstimate {
        EntropyEstimate { value, method, error_bound: 0.0, iterations: 0, budget_exhausted: false, collision: false }
    }
}

/// log of the spectral radius of the transition matrix.
pub fn markov_entropy(md: &MarkovData, tol: f64) -> Result<EntropyEstimate> {
    let r = spectral_radius(md, tol)?;
    Ok(EntropyEstimate { error_bound: tol / r, ..EntropyEstimate::exact(r.ln(), Method::MarkovEigen) })
}

/// P_q(t) = t^{q−1}(t − 2) + 1.
pub fn pq_product(q: usize, t: f64) -> f64 {
    t.powi(q as i32 - 1) * (t - 2.0) + 1.0
}

/// P_q(t) = t^q − 2t^{q−1} + 1 by Horner.
pub fn pq_horner(q: usize, t: f64) -> f64 {
    let mut acc = 1.0;
    acc = acc * t - 2.0;
    for _ in 0..q - 1 {
        acc *= t;
    }
    acc + 1.0
}

/// log r_q, where r_q is the root of P_q in (2(q−1)/q, 2), by bisection.
pub fn root_of_pq(q: usize, tol: f64) -> Result<EntropyEstimate> {
    if q < 3 {
        return Err(Error::Argument(format!("need q >= 3, got {q}")));
    }
    let (mut lo, mut hi) = (2.0 * (q as f64 - 1.0) / q as f64, 2.0);
    let mut iterations = 0;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if pq_product(q, mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        iterations += 1;
    }
    let r = 0.5 * (lo + hi);
    Ok(EntropyEstimate {
        value: r.ln(),
        method: Method::PolyRoot,
        error_bound: (hi - lo) / lo,
        iterations,
        budget_exhausted: false,
        collision: false,
    })
}

/// The root r_q itself.
pub fn r_q(q: usize) -> Result<f64> {
    Ok(root_of_pq(q, 1e-15)?.value.exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn markov_examples() {
        let md = markov_matrix(3, 1).unwrap();
        assert_eq!(md.matrix, vec![vec![1, 0, 1], vec![0, 0, 0], vec![1, 1, 0]]);
        let md = markov_matrix(5, 2).unwrap();
        assert!(md.matrix[2].iter().all(|&v| v == 0));
        for j in 1..5 {
            let col: Vec<u8> = (0..5).map(|i| md.matrix[i][j]).collect();
            assert_eq!(col.iter().map(|&v| v as u32).sum::<u32>(), 1);
            assert_eq!(col[(j + 2) % 5], 1);
        }
        assert!(markov_matrix(6, 2).is_err());
    }

    #[test]
    fn char_poly_examples() {
        assert_eq!(char_poly(&markov_matrix(3, 1).unwrap()).unwrap(), vec![1, -1, -1, 0]);
        assert_eq!(char_poly(&markov_matrix(4, 3).unwrap()).unwrap(), vec![1, -1, -1, -1, 0]);
        assert_eq!(
            char_poly(&markov_matrix(7, 2).unwrap()).unwrap(),
            char_poly(&markov_matrix(7, 3).unwrap()).unwrap()
        );
    }

    #[test]
    fn berkowitz_small_matrices() {
        // [[2,1],[1,3]]: t² − 5t + 5
        assert_eq!(berkowitz(&[vec![2, 1], vec![1, 3]]).unwrap(), vec![1, -5, 5]);
        // upper triangular diag(1,2,3)
        let a = vec![vec![1, 4, 5], vec![0, 2, 6], vec![0, 0, 3]];
        assert_eq!(berkowitz(&a).unwrap(), vec![1, -6, 11, -6]);
    }

    #[test]
    fn spectral_examples() {
        let golden = (1.0 + 5f64.sqrt()) / 2.0;
        assert_abs_diff_eq!(spectral_radius(&markov_matrix(3, 1).unwrap(), 1e-12).unwrap(), golden, epsilon = 1e-9);
        assert_abs_diff_eq!(
            spectral_radius(&markov_matrix(4, 1).unwrap(), 1e-12).unwrap(),
            1.8392867552,
            epsilon = 1e-9
        );
    }

    #[test]
    fn root_examples() {
        let golden = (1.0 + 5f64.sqrt()) / 2.0;
        assert_abs_diff_eq!(root_of_pq(3, 1e-15).unwrap().value, golden.ln(), epsilon = 1e-12);
        assert_abs_diff_eq!(r_q(4).unwrap(), 1.8392867552, epsilon = 1e-9);
        assert!(root_of_pq(2, 1e-12).is_err());
    }
}
