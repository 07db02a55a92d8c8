//! `virial` command-line front end.
//!
//! Output goes to stdout as CSV (or JSON with `--json`); diagnostics go to
//! stderr. Exit codes: 0 success, 1 domain or convergence failure (and any
//! failed `verify` check), 2 usage error.

pub mod format;
pub mod verify;

use std::ffi::OsString;
use std::io::Write;
use std::str::FromStr;

use clap::{Parser, Subcommand};
use num_rational::BigRational;

use crate::balance::hs_b3_mc;
use crate::cluster_expansion::{virial_from_clusters, ClusterIntegralVector};
use crate::error::{Error, Result};
use crate::lj_virial::{
    b2_integral, b2_series, db2_dt, ReducedTemperature, DEFAULT_ABS_TOL, DEFAULT_MAX_TERMS,
    DEFAULT_TERM_TOL, SERIES_MIN_T,
};
use crate::scaling_map::ScalingMap;
use crate::selfsim::{find_boyle, find_selfsim_fixpoint, localized_energy, FixedPointResult};
use format::{write_json, Field, Report, Table};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "virial", version, about = "Lennard-Jones B2 fixed point, fugacity scaling map and virial checks")]
pub struct Cli {
    /// Emit a JSON object instead of CSV.
    #[arg(long, global = true)]
    pub json: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tabulate B2, dB2/dT, B2/T and the self-similarity residual on a grid.
    Scan {
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        t_min: f64,
        #[arg(long, default_value_t = 50.0, allow_negative_numbers = true)]
        t_max: f64,
        #[arg(long, default_value_t = 0.1, allow_negative_numbers = true)]
        step: f64,
        /// Absolute quadrature tolerance.
        #[arg(long, default_value_t = DEFAULT_ABS_TOL, allow_negative_numbers = true)]
        tol: f64,
    },
    /// Locate the self-similar point dB2/dT = B2/T.
    Fixpoint {
        #[arg(long, default_value_t = 4.0, allow_negative_numbers = true)]
        t_min: f64,
        #[arg(long, default_value_t = 12.0, allow_negative_numbers = true)]
        t_max: f64,
        #[arg(long, default_value_t = 1e-10, allow_negative_numbers = true)]
        tol: f64,
    },
    /// Locate the Boyle temperature B2 = 0.
    Boyle {
        #[arg(long, default_value_t = 2.0, allow_negative_numbers = true)]
        t_min: f64,
        #[arg(long, default_value_t = 5.0, allow_negative_numbers = true)]
        t_max: f64,
        #[arg(long, default_value_t = 1e-10, allow_negative_numbers = true)]
        tol: f64,
    },
    /// Fixed points, multipliers and B2* of the fugacity scaling map.
    Scaling,
    /// Virial coefficients from cluster integrals b1 (= 1), b2, ... given
    /// as integers or fractions p/q. Values may start with '-', so put
    /// --json before the subcommand.
    Clusters {
        #[arg(required = true, num_args = 2.., allow_hyphen_values = true)]
        values: Vec<String>,
    },
    /// Monte Carlo estimate of the hard-sphere B3 / b0^2.
    #[command(name = "b3-hs")]
    B3Hs {
        #[arg(long, default_value_t = 10_000_000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run the identity and cross-route checks.
    Verify {
        /// Monte Carlo samples for the hard-sphere B3 check.
        #[arg(long, default_value_t = verify::DEFAULT_SAMPLES)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Replace alpha_1 in the series table (fault injection).
        #[arg(long, hide = true, allow_negative_numbers = true)]
        fault_alpha1: Option<f64>,
    },
}

/// Parse arguments and run; returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{}", e.render());
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{}", e.render());
                    EXIT_USAGE
                }
            };
        }
    };
    match execute(&cli, out, err) {
        Ok(code) => code,
        Err(CliError::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
        Err(CliError::Domain(e)) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_FAILURE
        }
        Err(CliError::Io(e)) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_FAILURE
        }
    }
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Domain(Error),
    Io(std::io::Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        Self::Domain(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::Io(e)
    }
}

fn emit_report(report: &Report, json: bool, out: &mut dyn Write) -> std::io::Result<()> {
    if json {
        write_json(&report.to_json(), out)
    } else {
        report.write_csv(out)
    }
}

fn emit_table(table: &Table, json: bool, out: &mut dyn Write) -> std::io::Result<()> {
    if json {
        write_json(&table.to_json(), out)
    } else {
        table.write_csv(out)
    }
}

fn execute(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    match &cli.command {
        Command::Scan { t_min, t_max, step, tol } => {
            let rows = scan(*t_min, *t_max, *step, *tol)?;
            emit_table(&scan_table(&rows), cli.json, out)?;
        }
        Command::Fixpoint { t_min, t_max, tol } => {
            let fp = find_selfsim_fixpoint((*t_min, *t_max), *tol)?;
            let mut r = fixpoint_report(&fp);
            r.push("localized_energy", localized_energy(1.0, &fp)?);
            emit_report(&r, cli.json, out)?;
        }
        Command::Boyle { t_min, t_max, tol } => {
            let fp = find_boyle((*t_min, *t_max), *tol)?;
            let mut r = fixpoint_report(&fp);
            r.push("db2_dt", db2_dt(fp.t_star)?);
            emit_report(&r, cli.json, out)?;
        }
        Command::Scaling => emit_report(&scaling_report()?, cli.json, out)?,
        Command::Clusters { values } => {
            let table = clusters_table(values)?;
            emit_table(&table, cli.json, out)?;
        }
        Command::B3Hs { samples, seed } => {
            let e = hs_b3_mc(*samples, *seed)?;
            let mut r = Report::default();
            r.push("estimate", e.estimate);
            r.push("std_error", e.std_error);
            r.push("samples", e.samples as i64);
            r.push("seed", e.seed as i64);
            r.push("target", 0.625);
            r.push("z_score", e.z_score(0.625));
            emit_report(&r, cli.json, out)?;
        }
        Command::Verify { samples, seed, fault_alpha1 } => {
            let config = verify::VerifyConfig {
                samples: *samples,
                seed: *seed,
                fault_alpha1: *fault_alpha1,
            };
            let report = verify::verify(&config);
            emit_table(&report.table(), cli.json, out)?;
            if !report.passed() {
                let failed: Vec<&str> = report.failures().map(|c| c.name).collect();
                writeln!(err, "verify: {} check(s) failed: {}", failed.len(), failed.join(", "))?;
                return Ok(EXIT_FAILURE);
            }
        }
    }
    Ok(EXIT_OK)
}

/// One row of the `scan` table. `b2_series` is absent below the series
/// region.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanRow {
    pub t_star: f64,
    pub b2_integral: f64,
    pub b2_series: Option<f64>,
    pub db2_dt: f64,
    pub b2_over_t: f64,
    pub residual: f64,
}

/// Grid t_min, t_min + step, … up to t_max (inclusive within 1e-9 steps).
pub fn scan_grid(t_min: f64, t_max: f64, step: f64) -> Result<Vec<f64>> {
    ReducedTemperature::new(t_min)?;
    if !(step > 0.0 && step.is_finite()) || !(t_max >= t_min) || !t_max.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "scan needs 0 < t_min <= t_max and step > 0, got t_min={t_min}, t_max={t_max}, step={step}"
        )));
    }
    let n = ((t_max - t_min) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|i| t_min + i as f64 * step).collect())
}

pub fn scan_row(t_star: f64, abs_tol: f64) -> Result<ScanRow> {
    let t = ReducedTemperature::new(t_star)?;
    let b2 = b2_integral(t, abs_tol)?.value;
    let series = if t_star >= SERIES_MIN_T {
        Some(b2_series(t, DEFAULT_TERM_TOL, DEFAULT_MAX_TERMS)?.value)
    } else {
        None
    };
    let d = db2_dt(t)?;
    let b2_over_t = b2 / t_star;
    Ok(ScanRow {
        t_star,
        b2_integral: b2,
        b2_series: series,
        db2_dt: d,
        b2_over_t,
        residual: d - b2_over_t,
    })
}

pub fn scan(t_min: f64, t_max: f64, step: f64, abs_tol: f64) -> Result<Vec<ScanRow>> {
    scan_grid(t_min, t_max, step)?
        .into_iter()
        .map(|t| scan_row(t, abs_tol))
        .collect()
}

pub const SCAN_HEADER: [&str; 6] = ["t_star", "b2_integral", "b2_series", "db2_dt", "b2_over_t", "residual"];

pub fn scan_table(rows: &[ScanRow]) -> Table {
    let mut table = Table::new(SCAN_HEADER.to_vec());
    for r in rows {
        table.push(vec![
            r.t_star.into(),
            r.b2_integral.into(),
            r.b2_series.into(),
            r.db2_dt.into(),
            r.b2_over_t.into(),
            r.residual.into(),
        ]);
    }
    table
}

fn fixpoint_report(fp: &FixedPointResult) -> Report {
    let mut r = Report::default();
    r.push("t_star", fp.t_star.get());
    r.push("b2", fp.b2_at_t);
    r.push("residual", fp.residual);
    r.push("bracket_low", fp.bracket.0);
    r.push("bracket_high", fp.bracket.1);
    r.push("iterations", fp.iterations as i64);
    r.push("converged", fp.converged);
    r
}

pub fn scaling_report() -> Result<Report> {
    let map = ScalingMap::default();
    let fps = map.fixed_points()?;
    let b2 = map.b2_star()?;
    let kc = map.critical_fugacity()?;
    let mut r = Report::default();
    r.push("map", map.to_string());
    r.push("fixed_points", Field::List(fps.iter().map(|p| p.location.to_string()).collect()));
    r.push(
        "multipliers",
        Field::List(
            fps.iter()
                .map(|p| p.multiplier.as_ref().map_or(String::new(), ToString::to_string))
                .collect(),
        ),
    );
    r.push(
        "stabilities",
        Field::List(fps.iter().map(|p| p.stability.as_str().to_string()).collect()),
    );
    r.push("critical_fugacity", kc.to_string());
    r.push("multiplier_at_critical", map.derivative(&kc)?.to_string());
    r.push("chemical_potential_over_kt", map.chemical_potential_over_kt()?);
    r.push("b2_star", b2.to_string());
    r.push("b2_star_decimal", 0.375);
    r.push("b3_hard_sphere", crate::balance::hs_b3().to_string());
    r.push("b2_plus_b3", (b2 + crate::balance::hs_b3()).to_string());
    Ok(r)
}

fn clusters_table(values: &[String]) -> Result<Table, CliError> {
    let parsed = values
        .iter()
        .map(|v| {
            BigRational::from_str(v.trim())
                .map_err(|_| CliError::Usage(format!("not an integer or fraction p/q: {v:?}")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let b = ClusterIntegralVector::new(parsed)?;
    let virial = virial_from_clusters(&b)?;
    let mut table = Table::new(vec!["l", "b_bar", "virial"]);
    for (l, (bl, vl)) in b.values().iter().zip(virial.values()).enumerate() {
        table.push(vec![
            Field::Int(l as i64 + 1),
            Field::Text(bl.to_string()),
            Field::Text(vl.to_string()),
        ]);
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_str(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let mut argv = vec!["virial"];
        argv.extend_from_slice(args);
        let code = run(argv, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn grid_row_count() {
        assert_eq!(scan_grid(1.0, 50.0, 0.1).unwrap().len(), 491);
        assert_eq!(scan_grid(2.0, 2.0, 0.5).unwrap(), vec![2.0]);
        assert!(scan_grid(0.0, 5.0, 0.1).is_err());
        assert!(scan_grid(5.0, 1.0, 0.1).is_err());
        assert!(scan_grid(1.0, 5.0, 0.0).is_err());
    }

    #[test]
    fn scan_row_is_consistent() {
        for t in [1.0, 1.4, 1.5, 20.0 / 3.0, 30.0] {
            let r = scan_row(t, DEFAULT_ABS_TOL).unwrap();
            assert!((r.residual - (r.db2_dt - r.b2_over_t)).abs() <= 1e-12);
            assert_eq!(r.b2_series.is_some(), t >= SERIES_MIN_T);
        }
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(run_str(&["bogus"]).0, EXIT_USAGE);
        assert_eq!(run_str(&["scan", "--nope"]).0, EXIT_USAGE);
        assert_eq!(run_str(&[]).0, EXIT_USAGE);
        assert_eq!(run_str(&["clusters", "1", "x/y"]).0, EXIT_USAGE);
        assert_eq!(run_str(&["--help"]).0, EXIT_OK);
    }

    #[test]
    fn domain_errors_exit_one() {
        let (code, out, err) = run_str(&["fixpoint", "--t-min", "8", "--t-max", "12"]);
        assert_eq!(code, EXIT_FAILURE);
        assert!(out.is_empty());
        assert!(err.contains("no sign change"));
        assert_eq!(run_str(&["clusters", "2", "1"]).0, EXIT_FAILURE);
        assert_eq!(run_str(&["b3-hs", "--samples", "10"]).0, EXIT_FAILURE);
        assert_eq!(run_str(&["scan", "--t-min", "-1"]).0, EXIT_FAILURE);
    }

    #[test]
    fn clusters_output() {
        let (code, out, _) = run_str(&["clusters", "1", "3/4", "2/9"]);
        assert_eq!(code, EXIT_OK);
        assert_eq!(out, "l,b_bar,virial\n1,1,1\n2,3/4,-3/4\n3,2/9,65/36\n");
        let (code, out, _) = run_str(&["--json", "clusters", "1", "-1/2"]);
        assert_eq!(code, EXIT_OK);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["rows"][1]["virial"], "1/2");
    }

    #[test]
    fn scaling_output() {
        let (code, out, _) = run_str(&["scaling"]);
        assert_eq!(code, EXIT_OK);
        assert!(out.contains("fixed_points,0;1;inf\n"));
        assert!(out.contains("multipliers,0;8/3;\n"));
        assert!(out.contains("b2_star,3/8\n"));
        assert!(out.contains("b2_plus_b3,1\n"));
    }

    #[test]
    fn b3_hs_output() {
        let (code, out, _) = run_str(&["b3-hs", "--samples", "100000", "--seed", "3", "--json"]);
        assert_eq!(code, EXIT_OK);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["samples"], 100000);
        assert!((v["estimate"].as_f64().unwrap() - 0.625).abs() < 0.01);
    }
}
