use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::{estimate_cm, EstimatorSpec, Method};
use crate::spikedata::BinaryRaster;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimingRow {
    pub method: Method,
    pub channels: usize,
    pub duration_min: f64,
    /// Worker threads; 0 is the default pool size.
    pub threads: usize,
    pub seconds: f64,
    pub pairs_per_second: f64,
}

/// One timed input: a raster and the recording length it represents.
#[derive(Debug, Clone, Copy)]
pub struct BenchCase<'a> {
    pub raster: &'a BinaryRaster,
    pub duration_min: f64,
}

/// Wall time of `estimate_cm` for every spec × case × thread setting. Per
/// spec and thread setting, one untimed warm-up run on the first case is
/// discarded.
pub fn benchmark_estimators(cases: &[BenchCase<'_>], specs: &[EstimatorSpec], threads: &[usize]) -> Result<Vec<TimingRow>> {
    let mut rows = Vec::new();
    if specs.is_empty() || cases.is_empty() {
        return Ok(rows);
    }
    for &t in threads {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| Error::param("threads", e.to_string()))?;
        for spec in specs {
            pool.install(|| estimate_cm::<f64>(cases[0].raster, spec))?;
            for case in cases {
                let start = Instant::now();
                pool.install(|| estimate_cm::<f64>(case.raster, spec))?;
                let seconds = start.elapsed().as_secs_f64();
                let k = case.raster.channel_count();
                log::info!("bench {} k={k} {:.1} min threads={t}: {seconds:.3} s", spec.method, case.duration_min);
                rows.push(TimingRow {
                    method: spec.method,
                    channels: k,
                    duration_min: case.duration_min,
                    threads: t,
                    seconds,
                    pairs_per_second: (k * k.saturating_sub(1)) as f64 / seconds.max(1e-12),
                });
            }
        }
    }
    Ok(rows)
}
