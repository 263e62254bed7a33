//! Command-line front end. Exit codes: 0 success, 2 when some item failed,
//! 1 on usage or input errors.

use clap::{Args, Parser, Subcommand, ValueEnum};
use isentrope::blaschke::{petersen_disk, return_map_analysis, ReturnMapAnalysis};
use isentrope::entropy::{lap_entropy, markov_entropy, markov_matrix, root_of_pq};
use isentrope::explore::{
    centers_table, gnuplot_script, line_profile_sigma6, nonmono_demo, profile_csv, profile_violations, sweep, table_csv,
    Config, Region, Status, SweepMode,
};
use isentrope::moduli::ideal_point;
use isentrope::pcf::{attracting_rotation_number, find_center, hyperbolic_type, verify_center};
use isentrope::ratmap::{classify_real, fixed_point_data, moduli_point, MixedNormalForm, QuadMap};
use isentrope::Error;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "isentrope", version, about = "Real entropy of real quadratic rational maps")]
struct Cli {
    #[command(flatten)]
    overrides: Overrides,
    #[command(subcommand)]
    command: Command,
}

/// Flags layered over the configuration file.
#[derive(Args)]
struct Overrides {
    /// Configuration file (default: $MODSPACE_CONFIG).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true)]
    lap_n_max: Option<usize>,
    #[arg(long, global = true)]
    lap_budget: Option<usize>,
    #[arg(long, global = true)]
    orbit_budget: Option<usize>,
}

impl Overrides {
    fn config(&self) -> Result<Config, Error> {
        let mut c = match &self.config {
            Some(p) => Config::load(p)?,
            None => Config::from_env()?,
        };
        if let Some(v) = self.threads {
            c.threads = v;
        }
        if let Some(v) = self.lap_n_max {
            c.lap_n_max = v;
        }
        if let Some(v) = self.lap_budget {
            c.lap_budget = v;
        }
        if let Some(v) = self.orbit_budget {
            c.orbit_budget = v;
        }
        Ok(c)
    }
}

/// One of the three ways to give a map.
#[derive(Args)]
#[group(multiple = false)]
struct MapArg {
    /// num2,num1,num0,den2,den1,den0
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, num_args = 1)]
    coeffs: Option<Vec<f64>>,
    /// mu,a for (1/mu)(z + 1/z) + a
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, num_args = 1)]
    plus: Option<Vec<f64>>,
    /// mu,b for (1/mu)(z - 1/z) + b
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, num_args = 1)]
    minus: Option<Vec<f64>>,
}

impl MapArg {
    fn map(&self) -> Result<QuadMap, Error> {
        let pair = |v: &[f64]| -> Result<(f64, f64), Error> {
            match v {
                [x, y] => Ok((*x, *y)),
                _ => Err(Error::Argument("normal form needs exactly two values".into())),
            }
        };
        if let Some(c) = &self.coeffs {
            let [n2, n1, n0, d2, d1, d0] = c[..] else {
                return Err(Error::Argument("--coeffs needs six values".into()));
            };
            return QuadMap::new([n2, n1, n0], [d2, d1, d0]);
        }
        if let Some(v) = &self.plus {
            let (mu, a) = pair(v)?;
            return MixedNormalForm::plus(mu, a).to_map();
        }
        if let Some(v) = &self.minus {
            let (mu, b) = pair(v)?;
            return MixedNormalForm::minus(mu, b).to_map();
        }
        Err(Error::Argument("give a map with --coeffs, --plus or --minus".into()))
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Entropy,
    Type,
    Rotation,
}

#[derive(Subcommand)]
enum Command {
    /// Real-dynamics class, moduli point, multipliers and hyperbolic type.
    Classify {
        #[command(flatten)]
        map: MapArg,
    },
    /// Entropy of a map by lap counting, or of a center by its Markov matrix or P_q.
    Entropy {
        #[command(flatten)]
        map: Option<MapArg>,
        /// Transition matrix for rotation number p/q, given as q,p.
        #[arg(long, value_delimiter = ',', num_args = 1, conflicts_with = "root")]
        markov: Option<Vec<usize>>,
        /// log of the root r_q of t^q - 2t^(q-1) + 1.
        #[arg(long)]
        root: Option<usize>,
    },
    /// Locate the center f_{p/q}.
    Center {
        #[arg(long)]
        q: usize,
        #[arg(long)]
        p: usize,
    },
    /// Locate f_{p/q} and check its combinatorial properties.
    Verify {
        #[arg(long)]
        q: usize,
        #[arg(long)]
        p: usize,
    },
    /// Return-map fixed points and multipliers; with --p/--q also the multiplier disk.
    Blaschke {
        #[arg(long, value_delimiter = ',', num_args = 1)]
        t: Vec<f64>,
        #[arg(long, requires = "q")]
        p: Option<usize>,
        #[arg(long, requires = "p")]
        q: Option<usize>,
    },
    /// Evaluate a grid over a (sigma1, sigma2) rectangle and write CSV.
    Sweep {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, num_args = 1)]
        sigma1: Vec<f64>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, num_args = 1)]
        sigma2: Vec<f64>,
        #[arg(long, default_value_t = 64)]
        nx: usize,
        #[arg(long, default_value_t = 64)]
        ny: usize,
        #[arg(long, value_enum, default_value = "entropy")]
        mode: ModeArg,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write a gnuplot script rendering the CSV.
        #[arg(long, requires = "out")]
        gnuplot: Option<PathBuf>,
        #[arg(long, default_value_t = 16)]
        bands: usize,
    },
    /// Entropy of b + 1/z^2 along sigma1 = -6.
    ProfileSigma6 {
        #[arg(long, allow_hyphen_values = true, default_value_t = -3.0)]
        b_min: f64,
        #[arg(long, allow_hyphen_values = true, default_value_t = 1.0)]
        b_max: f64,
        #[arg(long, default_value_t = 200)]
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Demonstrate a disconnected isentrope for q > 12.
    Demo {
        #[arg(long, default_value_t = 13)]
        q: usize,
        /// Entropy levels in (h3, h_q]; defaults are chosen from h3 and h_q.
        #[arg(long, value_delimiter = ',', num_args = 1)]
        levels: Vec<f64>,
        #[arg(long)]
        json: bool,
    },
    /// Table of centers p/q in (0, 1/2) for q <= q_max.
    CentersTable {
        #[arg(long, default_value_t = 13)]
        q_max: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

enum Outcome {
    Done,
    SomeFailed,
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), Error> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::Argument(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn json<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("records serialize")
}

fn run(cli: Cli) -> Result<Outcome, Error> {
    let cfg = cli.overrides.config()?;
    match cli.command {
        Command::Classify { map } => {
            let m = map.map()?;
            let class = classify_real(&m)?;
            let fp = fixed_point_data(&m, cfg.tol_geometric);
            let report = serde_json::json!({
                "map": m,
                "class": format!("{:?}", class.class),
                "symmetry_locus": class.symmetric,
                "boundary_ambiguity": class.ambiguous,
                "critical_points": m.critical_points()?,
                "fixed_points": fp.points,
                "multipliers": fp.multipliers,
                "moduli": moduli_point(&m, cfg.tol_identity).ok(),
                "ideal_point": ideal_point(&m, cfg.blowup_threshold),
                "hyperbolic_type": hyperbolic_type(&m, cfg.orbit_budget)?,
                "rotation_number": attracting_rotation_number(&m, cfg.orbit_budget)?.map(|r| r.to_string()),
            });
            println!("{}", json(&report));
            Ok(Outcome::Done)
        }
        Command::Entropy { map, markov, root } => {
            let est = if let Some(qp) = markov {
                let [q, p] = qp[..] else {
                    return Err(Error::Argument("--markov needs q,p".into()));
                };
                markov_entropy(&markov_matrix(q, p)?, 1e-12)?
            } else if let Some(q) = root {
                root_of_pq(q, 1e-15)?
            } else {
                let m = map.ok_or_else(|| Error::Argument("give a map, --markov or --root".into()))?.map()?;
                lap_entropy(&m, cfg.lap_n_max, cfg.lap_budget)?
            };
            println!("{}", json(&est));
            Ok(if est.budget_exhausted { Outcome::SomeFailed } else { Outcome::Done })
        }
        Command::Center { q, p } => {
            let c = find_center(q, p, &cfg.seed_strategy())?;
            println!("{}", json(&c.record()));
            Ok(Outcome::Done)
        }
        Command::Verify { q, p } => {
            let mut c = find_center(q, p, &cfg.seed_strategy())?;
            let report = verify_center(&mut c);
            println!("{}/{}: mu={} a={} residual={:e}", p, q, c.params.mu, c.params.a, c.residual);
            print!("{report}");
            Ok(if report.all_passed() { Outcome::Done } else { Outcome::SomeFailed })
        }
        Command::Blaschke { t, p, q } => {
            if t.is_empty() {
                return Err(Error::Argument("give at least one --t".into()));
            }
            println!("{}", ReturnMapAnalysis::CSV_HEADER);
            let mut failed = false;
            for &ti in &t {
                match return_map_analysis(ti, 1e-8) {
                    Ok(r) => println!("{}", r.csv_row()),
                    Err(e) => {
                        eprintln!("t={ti}: {e}");
                        failed = true;
                    }
                }
            }
            if let (Some(p), Some(q)) = (p, q) {
                for &ti in &t {
                    match petersen_disk(ti, p, q) {
                        Ok(d) => println!("{}", serde_json::to_string(&d).expect("serializes")),
                        Err(e) => {
                            eprintln!("t={ti}: {e}");
                            failed = true;
                        }
                    }
                }
            }
            Ok(if failed { Outcome::SomeFailed } else { Outcome::Done })
        }
        Command::Sweep { sigma1, sigma2, nx, ny, mode, out, gnuplot, bands } => {
            let range = |v: &[f64], name: &str| match v {
                [lo, hi] => Ok((*lo, *hi)),
                [x] => Ok((*x, *x)),
                _ => Err(Error::Argument(format!("--{name} needs lo,hi"))),
            };
            let region = Region { sigma1: range(&sigma1, "sigma1")?, sigma2: range(&sigma2, "sigma2")? };
            let mode = match mode {
                ModeArg::Entropy => SweepMode::Entropy,
                ModeArg::Type => SweepMode::HyperbolicType,
                ModeArg::Rotation => SweepMode::RotationNumber,
            };
            let grid = sweep(region, nx, ny, mode, &cfg)?;
            emit(&out, &grid.to_csv())?;
            if let (Some(g), Some(o)) = (&gnuplot, &out) {
                emit(&Some(g.clone()), &gnuplot_script(&o.display().to_string(), &grid, bands))?;
            }
            Ok(if grid.failures() > 0 { Outcome::SomeFailed } else { Outcome::Done })
        }
        Command::ProfileSigma6 { b_min, b_max, n, out } => {
            let rows = line_profile_sigma6(b_min, b_max, n, &cfg)?;
            emit(&out, &profile_csv(&rows))?;
            let bad = rows.iter().any(|r| r.status != Status::Ok) || !profile_violations(&rows, 0.0).is_empty();
            Ok(if bad { Outcome::SomeFailed } else { Outcome::Done })
        }
        Command::Demo { q, levels, json: as_json } => {
            let report = nonmono_demo(q, &levels, &cfg)?;
            if as_json {
                println!("{}", json(&report));
            } else {
                print!("{report}");
            }
            Ok(if report.passed(3.min(report.levels.len())) { Outcome::Done } else { Outcome::SomeFailed })
        }
        Command::CentersTable { q_max, out } => {
            let rows = centers_table(q_max, &cfg)?;
            emit(&out, &table_csv(&rows))?;
            Ok(if rows.iter().all(|r| r.status == "OK") { Outcome::Done } else { Outcome::SomeFailed })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(Outcome::Done) => ExitCode::SUCCESS,
        Ok(Outcome::SomeFailed) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::NoConvergence(_) | Error::Tolerance { .. } | Error::Precondition(_) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}
