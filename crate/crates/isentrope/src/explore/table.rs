//! Table of centers p/q ∈ (0, 1/2) with both entropy routes.

use super::Config;
use crate::entropy::{gcd, lap_entropy, root_of_pq};
use crate::error::{Error, Result};
use crate::pcf::find_center;
use serde::{Deserialize, Serialize};
use std::fmt::Write;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub q: usize,
    pub p: usize,
    pub mu: f64,
    pub a: f64,
    pub sigma1: f64,
    pub sigma2: f64,
    pub h_lap: f64,
    pub h_root: f64,
    pub residual: f64,
    pub status: String,
}

/// Shipped table for q ≤ 13, regenerated by `centers-table --q-max 13`.
pub const BUNDLED_CENTERS_CSV: &str = include_str!("../../data/centers_q13.csv");

fn pairs(q_max: usize) -> Vec<(usize, usize)> {
    (3..=q_max).flat_map(|q| (1..q).filter(move |&p| 2 * p < q && gcd(p as u64, q as u64) == 1).map(move |p| (q, p))).collect()
}

/// Rows in (q, p) order; a failed row carries its error in `status`.
pub fn centers_table(q_max: usize, cfg: &Config) -> Result<Vec<TableRow>> {
    if q_max < 3 {
        return Err(Error::Argument(format!("q_max must be at least 3, got {q_max}")));
    }
    let seeds = cfg.seed_strategy();
    Ok(pairs(q_max)
        .into_iter()
        .map(|(q, p)| {
            let h_root = root_of_pq(q, 1e-15).map(|e| e.value).unwrap_or(f64::NAN);
            let located = find_center(q, p, &seeds).and_then(|c| {
                let h = lap_entropy(&c.map, cfg.lap_n_max, cfg.lap_budget)?;
                Ok((c, h.value))
            });
            match located {
                Ok((c, h_lap)) => TableRow {
                    q,
                    p,
                    mu: c.params.mu,
                    a: c.params.a,
                    sigma1: c.moduli.sigma1,
                    sigma2: c.moduli.sigma2,
                    h_lap,
                    h_root,
                    residual: c.residual,
                    status: "OK".into(),
                },
                Err(e) => TableRow {
                    q,
                    p,
                    mu: f64::NAN,
                    a: f64::NAN,
                    sigma1: f64::NAN,
                    sigma2: f64::NAN,
                    h_lap: f64::NAN,
                    h_root,
                    residual: f64::NAN,
                    status: e.to_string().replace(',', ";"),
                },
            }
        })
        .collect())
}

pub const TABLE_HEADER: &str = "q,p,mu,a,sigma1,sigma2,h_lap,h_root,residual,status";

pub fn table_csv(rows: &[TableRow]) -> String {
    let mut s = format!("{TABLE_HEADER}\n");
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{:e},{}",
            r.q, r.p, r.mu, r.a, r.sigma1, r.sigma2, r.h_lap, r.h_root, r.residual, r.status
        );
    }
    s
}

pub fn parse_table(csv: &str) -> Result<Vec<TableRow>> {
    let bad = |line: &str| Error::Argument(format!("malformed table row: {line}"));
    csv.lines()
        .skip(1)
        .filter(|l| !l.trim().is_empty())
        .map(|line| {
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 10 {
                return Err(bad(line));
            }
            let num = |i: usize| f[i].trim().parse::<f64>().map_err(|_| bad(line));
            let int = |i: usize| f[i].trim().parse::<usize>().map_err(|_| bad(line));
            Ok(TableRow {
                q: int(0)?,
                p: int(1)?,
                mu: num(2)?,
                a: num(3)?,
                sigma1: num(4)?,
                sigma2: num(5)?,
                h_lap: num(6)?,
                h_root: num(7)?,
                residual: num(8)?,
                status: f[9].trim().to_string(),
            })
        })
        .collect()
}

pub fn bundled_centers() -> Result<Vec<TableRow>> {
    parse_table(BUNDLED_CENTERS_CSV)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_table_rows() {
        let rows = centers_table(5, &Config::default()).unwrap();
        let qp: Vec<(usize, usize)> = rows.iter().map(|r| (r.q, r.p)).collect();
        assert_eq!(qp, vec![(3, 1), (4, 1), (5, 1), (5, 2)]);
        for r in &rows {
            assert!((r.h_lap - r.h_root).abs() <= 0.01);
        }
        assert_eq!(rows[2].h_root, rows[3].h_root);
        assert!((rows[2].sigma1 - rows[3].sigma1).abs() > 1.0);
    }

    #[test]
    fn bundled_table_round_trips() {
        let rows = bundled_centers().unwrap();
        assert_eq!(rows.len(), pairs(13).len());
        assert_eq!(parse_table(&table_csv(&rows)).unwrap(), rows);
    }
}
