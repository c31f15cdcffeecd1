// Copyright 2026 The commhash Authors
// SPDX-License-Identifier: Apache-2.0

//! Session timing and linear fits.
//!
//! A timed trial is one full basic session over the in-process router:
//! nonce issue, share upload, echo checks and finalize. Participant key
//! generation happens before the clock starts.

use std::io::{Read, Write};
use std::sync::Arc;
use std::time::Instant;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{Backend, GroupParams, ModpMode};
use crate::hash::{reference_digest, ParticipantKeys};
use crate::net::{run_basic_session, BasicRun, FaultPlan};
use crate::protocol::basic::Phase;

/// Mean and spread of `trials` timed sessions with `n` participants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchPoint {
    pub backend: String,
    #[serde(rename = "N")]
    pub n: u32,
    pub trials: u32,
    pub mean_s: f64,
    pub stddev_s: f64,
}

/// Parameters a backend is benchmarked with: 2048-bit MODP in SUBGROUP
/// mode, or secp256k1.
pub fn bench_params(backend: Backend) -> GroupParams {
    match backend {
        Backend::Modp => GroupParams::modp_2048(ModpMode::Subgroup),
        Backend::Ec => GroupParams::secp256k1(),
    }
}

pub fn backend_name(backend: Backend) -> &'static str {
    match backend {
        Backend::Modp => "modp",
        Backend::Ec => "ec",
    }
}

/// Time sessions for each size in `sizes` on the backend's standard group.
pub fn run_bench(backend: Backend, sizes: &[u32], trials: u32, seed: u64) -> Result<Vec<BenchPoint>> {
    run_bench_with(Arc::new(bench_params(backend)), sizes, trials, seed)
}

/// [`run_bench`] on explicit parameters. Any failed session aborts.
pub fn run_bench_with(params: Arc<GroupParams>, sizes: &[u32], trials: u32, seed: u64) -> Result<Vec<BenchPoint>> {
    if trials == 0 {
        return Err(Error::Bench("trials must be at least 1".into()));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let name = backend_name(params.backend()).to_string();
    let mut points = Vec::with_capacity(sizes.len());
    for &n in sizes {
        if n == 0 || n > u16::MAX as u32 {
            return Err(Error::Bench(format!("participant count {n} out of range")));
        }
        let mut samples = Vec::with_capacity(trials as usize);
        for _ in 0..trials {
            let keys: Vec<ParticipantKeys> = (0..n).map(|_| ParticipantKeys::random(&params, &mut rng)).collect();
            let m = params.random_key(&mut rng);
            let owner = rng.gen_range(1..=n) as u16;
            let expected = reference_digest(&params, &m, &keys)?;
            let run = BasicRun::new(Arc::clone(&params), keys, owner, m, rng.gen());

            let start = Instant::now();
            let out = run_basic_session(&run, FaultPlan::new())?;
            let elapsed = start.elapsed().as_secs_f64();

            if out.phase != Some(Phase::Done) || out.digest.as_ref() != Some(&expected) {
                return Err(Error::Bench(format!("session with N={n} ended in {:?}", out.phase)));
            }
            samples.push(elapsed);
        }
        let (mean, sd) = mean_stddev(&samples);
        points.push(BenchPoint {
            backend: name.clone(),
            n,
            trials,
            mean_s: mean,
            stddev_s: sd,
        });
    }
    Ok(points)
}

/// Sample mean and (n-1) standard deviation; 0 for a single sample.
fn mean_stddev(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    #[serde(rename = "r2")]
    pub r_squared: f64,
}

impl LinearFit {
    pub fn predict(&self, x: f64) -> f64 {
        self.slope * x + self.intercept
    }
}

/// Ordinary least squares `y = slope·x + intercept`. For a linear model this
/// is also the fixed point of Levenberg–Marquardt.
pub fn linear_fit(points: &[(f64, f64)]) -> Result<LinearFit> {
    if points.len() < 2 {
        return Err(Error::SingularFit);
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(Error::SingularFit);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = points.iter().map(|p| (p.1 - slope * p.0 - intercept).powi(2)).sum();
    let ss_tot: f64 = points.iter().map(|p| (p.1 - my).powi(2)).sum();
    let r_squared = if ss_tot == 0.0 { 1.0 } else { (1.0 - ss_res / ss_tot).clamp(0.0, 1.0) };
    Ok(LinearFit {
        slope,
        intercept,
        r_squared,
    })
}

/// Fit mean time against N.
pub fn fit_points(points: &[BenchPoint]) -> Result<LinearFit> {
    let xy: Vec<(f64, f64)> = points.iter().map(|p| (p.n as f64, p.mean_s)).collect();
    linear_fit(&xy)
}

pub fn write_csv<W: Write>(out: W, points: &[BenchPoint]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for p in points {
        w.serialize(p).map_err(|e| Error::Bench(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<BenchPoint>> {
    csv::Reader::from_reader(input)
        .deserialize()
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| Error::Bench(e.to_string()))
}

/// One row of published timings: N, elliptic-curve seconds, MODP seconds.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
pub struct TableRow {
    #[serde(rename = "N")]
    pub n: u32,
    pub ec_s: f64,
    pub zp_s: f64,
}

/// Published timings shipped with the crate.
pub const TABLE1_CSV: &str = include_str!("../data/table1.csv");

pub fn read_table<R: Read>(input: R) -> Result<Vec<TableRow>> {
    csv::Reader::from_reader(input)
        .deserialize()
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| Error::Bench(e.to_string()))
}

/// Fits of the EC and MODP columns.
pub fn fit_table(rows: &[TableRow]) -> Result<(LinearFit, LinearFit)> {
    let ec: Vec<_> = rows.iter().map(|r| (r.n as f64, r.ec_s)).collect();
    let zp: Vec<_> = rows.iter().map(|r| (r.n as f64, r.zp_s)).collect();
    Ok((linear_fit(&ec)?, linear_fit(&zp)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line() {
        let fit = linear_fit(&[(1.0, 3.0), (2.0, 5.0), (4.0, 9.0)]).unwrap();
        assert!((fit.slope - 2.0).abs() < 1e-12);
        assert!((fit.intercept - 1.0).abs() < 1e-12);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
    }

    #[test]
    fn singular() {
        assert!(matches!(linear_fit(&[(2.0, 1.0), (2.0, 3.0)]), Err(Error::SingularFit)));
        assert!(matches!(linear_fit(&[(2.0, 1.0)]), Err(Error::SingularFit)));
    }

    #[test]
    fn published_table_fit() {
        let rows = read_table(TABLE1_CSV.as_bytes()).unwrap();
        assert_eq!(rows.len(), 13);
        let (ec, zp) = fit_table(&rows).unwrap();
        assert!((ec.slope - 0.00796675228276824).abs() < 1e-12);
        assert!((ec.intercept + 0.7334362917398928).abs() < 1e-9);
        assert!((zp.slope - 0.1309222424256744).abs() < 1e-12);
        assert!((zp.intercept + 42.06310391036907).abs() < 1e-9);
        assert!((ec.r_squared - 0.9984174277223707).abs() < 1e-9);
    }

    #[test]
    fn csv_round_trip() {
        let pts = vec![BenchPoint {
            backend: "ec".into(),
            n: 4,
            trials: 2,
            mean_s: 0.5,
            stddev_s: 0.01,
        }];
        let mut buf = Vec::new();
        write_csv(&mut buf, &pts).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("backend,N,trials,mean_s,stddev_s\n"));
        assert_eq!(read_csv(buf.as_slice()).unwrap(), pts);
    }

    #[test]
    fn single_trial_point() {
        let params = Arc::new(GroupParams::toy_ec());
        let pts = run_bench_with(params, &[4], 1, 9).unwrap();
        assert_eq!(pts.len(), 1);
        assert_eq!(pts[0].stddev_s, 0.0);
        assert!(pts[0].mean_s > 0.0);
    }
}
