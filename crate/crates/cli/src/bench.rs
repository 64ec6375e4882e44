//! Wall-clock timing of distances and means on seeded inputs.
//!
//! Every operation is run once to warm up and then `reps` times; rows report the
//! median and the 10th/90th percentiles. Timing runs on the calling thread.

use std::fmt;
use std::hint::black_box;
use std::io::Write;
use std::str::FromStr;
use std::time::Instant;

use serde::Serialize;
use spdkit::divergences::{log_euclidean, riemannian, s_div};
use spdkit::means::{karcher_mean, le_mean, s_mean, MeanProblem, SolverConfig};
use spdkit::pd::random_spd;
use spdkit::{Error, Result, SpdMatrix};

/// Condition-number target of benchmark inputs.
pub const BENCH_COND: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BenchOp {
    DistSdiv,
    DistRiem,
    DistLogeuclid,
    MeanSdiv,
    MeanKarcher,
    MeanLogeuclid,
}

impl BenchOp {
    pub const ALL: [BenchOp; 6] = [
        BenchOp::DistSdiv,
        BenchOp::DistRiem,
        BenchOp::DistLogeuclid,
        BenchOp::MeanSdiv,
        BenchOp::MeanKarcher,
        BenchOp::MeanLogeuclid,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BenchOp::DistSdiv => "dist_sdiv",
            BenchOp::DistRiem => "dist_riem",
            BenchOp::DistLogeuclid => "dist_logeuclid",
            BenchOp::MeanSdiv => "mean_sdiv",
            BenchOp::MeanKarcher => "mean_karcher",
            BenchOp::MeanLogeuclid => "mean_logeuclid",
        }
    }

    pub fn is_mean(self) -> bool {
        matches!(self, BenchOp::MeanSdiv | BenchOp::MeanKarcher | BenchOp::MeanLogeuclid)
    }
}

impl fmt::Display for BenchOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BenchOp {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BenchOp::ALL
            .into_iter()
            .find(|op| op.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown benchmark operation `{s}`")))
    }
}

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub ops: Vec<BenchOp>,
    pub dims: Vec<usize>,
    /// Bundle sizes for the mean operations.
    pub ms: Vec<usize>,
    pub reps: usize,
    pub seed: u64,
}

/// One CSV row. `m` is empty for distance operations.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchResult {
    pub op: &'static str,
    pub n: usize,
    pub m: Option<usize>,
    pub median_s: f64,
    pub p10_s: f64,
    pub p90_s: f64,
    pub reps: usize,
}

/// Linear-interpolation quantile of sorted samples.
pub fn quantile(sorted: &[f64], p: f64) -> f64 {
    let pos = p * (sorted.len() - 1) as f64;
    let (lo, hi) = (pos.floor() as usize, pos.ceil() as usize);
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

fn time_reps(reps: usize, mut op: impl FnMut() -> Result<()>) -> Result<Vec<f64>> {
    op()?;
    let mut times = Vec::with_capacity(reps);
    for _ in 0..reps {
        let start = Instant::now();
        op()?;
        times.push(start.elapsed().as_secs_f64());
    }
    times.sort_by(f64::total_cmp);
    Ok(times)
}

fn bench_one(op: BenchOp, n: usize, m: Option<usize>, reps: usize, seed: u64) -> Result<BenchResult> {
    let times = match m {
        None => {
            let a = random_spd(n, seed, BENCH_COND)?;
            let b = random_spd(n, seed.wrapping_add(1), BENCH_COND)?;
            let dist = match op {
                BenchOp::DistSdiv => s_div,
                BenchOp::DistRiem => riemannian,
                _ => log_euclidean,
            };
            time_reps(reps, || dist(black_box(&a), black_box(&b)).map(|d| {
                black_box(d);
            }))?
        }
        Some(m) => {
            let matrices = (0..m as u64)
                .map(|k| random_spd(n, seed.wrapping_add(k), BENCH_COND))
                .collect::<Result<Vec<SpdMatrix>>>()?;
            let problem = MeanProblem::uniform(matrices)?;
            let config = SolverConfig::default();
            time_reps(reps, || {
                let mean = match op {
                    BenchOp::MeanSdiv => s_mean(black_box(&problem), &config)?.mean,
                    BenchOp::MeanKarcher => karcher_mean(black_box(&problem), &config)?.mean,
                    _ => le_mean(black_box(&problem))?,
                };
                black_box(mean);
                Ok(())
            })?
        }
    };
    Ok(BenchResult {
        op: op.name(),
        n,
        m,
        median_s: quantile(&times, 0.5),
        p10_s: quantile(&times, 0.1),
        p90_s: quantile(&times, 0.9),
        reps,
    })
}

/// Times every requested operation; distances once per dimension, means once per
/// dimension and bundle size.
pub fn run_bench(config: &BenchConfig) -> Result<Vec<BenchResult>> {
    if config.reps == 0 {
        return Err(Error::InvalidParameter("reps must be at least 1".into()));
    }
    if config.ops.is_empty() || config.dims.is_empty() || config.dims.contains(&0) {
        return Err(Error::InvalidParameter("need at least one operation and positive dimensions".into()));
    }
    if config.ops.iter().any(|op| op.is_mean()) && (config.ms.is_empty() || config.ms.contains(&0)) {
        return Err(Error::InvalidParameter("mean operations need positive bundle sizes".into()));
    }
    let mut rows = Vec::new();
    for &op in &config.ops {
        for &n in &config.dims {
            if op.is_mean() {
                for &m in &config.ms {
                    rows.push(bench_one(op, n, Some(m), config.reps, config.seed)?);
                }
            } else {
                rows.push(bench_one(op, n, None, config.reps, config.seed)?);
            }
        }
    }
    Ok(rows)
}

/// Writes rows under the header `op,n,m,median_s,p10_s,p90_s,reps`.
pub fn write_csv<W: Write>(rows: &[BenchResult], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    if rows.is_empty() {
        w.write_record(["op", "n", "m", "median_s", "p10_s", "p90_s", "reps"])?;
    }
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantiles_interpolate() {
        let xs = [1.0, 2.0, 3.0, 4.0, 5.0];
        assert_eq!(quantile(&xs, 0.5), 3.0);
        assert_eq!(quantile(&xs, 0.1), 1.4);
        assert_eq!(quantile(&[7.0], 0.9), 7.0);
    }

    #[test]
    fn single_rep_collapses_statistics() {
        let rows = run_bench(&BenchConfig {
            ops: vec![BenchOp::DistSdiv, BenchOp::MeanLogeuclid],
            dims: vec![3],
            ms: vec![4],
            reps: 1,
            seed: 0,
        })
        .unwrap();
        assert_eq!(rows.len(), 2);
        for r in &rows {
            assert_eq!(r.p10_s, r.median_s);
            assert_eq!(r.median_s, r.p90_s);
        }
        assert_eq!(rows[0].m, None);
        assert_eq!(rows[1].m, Some(4));
    }

    #[test]
    fn csv_header_is_fixed() {
        let mut buf = Vec::new();
        write_csv(&[], &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "op,n,m,median_s,p10_s,p90_s,reps\n");
        let row = BenchResult {
            op: "dist_riem",
            n: 8,
            m: None,
            median_s: 0.5,
            p10_s: 0.25,
            p90_s: 1.0,
            reps: 3,
        };
        let mut buf = Vec::new();
        write_csv(&[row], &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "op,n,m,median_s,p10_s,p90_s,reps\ndist_riem,8,,0.5,0.25,1.0,3\n"
        );
    }
}
