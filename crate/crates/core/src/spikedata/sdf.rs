//! Spike Data Format files.
//!
//! The canonical form is JSON:
//!
//! ```json
//! {"sampling_rate_hz": 1000.0, "duration_samples": 60000, "channel_count": 2,
//!  "trains": [[12, 40, 977], []]}
//! ```
//!
//! A CSV raster (`channel,time_sample`, one row per spike, 1-based channels)
//! is accepted as an interchange alternative.

use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::train::{SpikeTrain, SpikeTrainSet};
use crate::error::{Error, Result};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SdfJson {
    sampling_rate_hz: f64,
    duration_samples: u64,
    channel_count: u64,
    trains: Vec<Vec<i64>>,
}

pub fn sdf_to_json_string(set: &SpikeTrainSet) -> Result<String> {
    let doc = SdfJson {
        sampling_rate_hz: set.sampling_rate_hz(),
        duration_samples: set.duration_samples() as u64,
        channel_count: set.channel_count() as u64,
        trains: set
            .trains()
            .iter()
            .map(|t| t.times().iter().map(|&s| s as i64).collect())
            .collect(),
    };
    Ok(serde_json::to_string(&doc)?)
}

pub fn sdf_from_json_str(text: &str) -> Result<SpikeTrainSet> {
    let doc: SdfJson = serde_json::from_str(text)
        .map_err(|e| Error::format("sdf", e.to_string()))?;
    if doc.channel_count as usize != doc.trains.len() {
        return Err(Error::format(
            "channel_count",
            format!(
                "declares {} channels but {} train arrays are present",
                doc.channel_count,
                doc.trains.len()
            ),
        ));
    }
    if doc.duration_samples == 0 || doc.duration_samples > u32::MAX as u64 {
        return Err(Error::format(
            "duration_samples",
            format!("must lie in [1, {}], got {}", u32::MAX, doc.duration_samples),
        ));
    }
    let duration = doc.duration_samples as u32;
    let mut trains = Vec::with_capacity(doc.trains.len());
    for (i, raw) in doc.trains.into_iter().enumerate() {
        let mut times = Vec::with_capacity(raw.len());
        for s in raw {
            if s < 1 || s > duration as i64 {
                return Err(Error::format(
                    format!("trains[{}]", i + 1),
                    format!("sample {s} outside [1, {duration}]"),
                ));
            }
            times.push(s as u32);
        }
        trains.push(SpikeTrain::new(i as u32 + 1, times)?);
    }
    SpikeTrainSet::new(trains, doc.sampling_rate_hz, duration)
}

pub fn write_sdf_json(set: &SpikeTrainSet, path: &Path) -> Result<()> {
    let text = sdf_to_json_string(set)?;
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn read_sdf_json(path: &Path) -> Result<SpikeTrainSet> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    sdf_from_json_str(&text)
}

pub fn write_raster_csv(set: &SpikeTrainSet, path: &Path) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    let mut write = || -> std::io::Result<()> {
        writeln!(out, "channel,time_sample")?;
        for t in set.trains() {
            for &s in t.times() {
                writeln!(out, "{},{}", t.channel_id, s)?;
            }
        }
        out.flush()
    };
    write().map_err(|e| Error::io(path, e))
}

/// Reads a CSV raster. Channel count and duration default to the largest
/// channel id and spike time present.
pub fn read_raster_csv(
    path: &Path,
    sampling_rate_hz: f64,
    channel_count: Option<usize>,
    duration_samples: Option<u32>,
) -> Result<SpikeTrainSet> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut rows: Vec<(usize, u32)> = Vec::new();
    for (lineno, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let line = line.trim();
        if line.is_empty() || (lineno == 0 && line.starts_with("channel")) {
            continue;
        }
        let mut parts = line.split(',');
        let parse = |field: Option<&str>, name: &str| -> Result<u64> {
            field
                .and_then(|f| f.trim().parse::<u64>().ok())
                .ok_or_else(|| Error::format(format!("line {}: {name}", lineno + 1), "expected a positive integer"))
        };
        let ch = parse(parts.next(), "channel")? as usize;
        let t = parse(parts.next(), "time_sample")?;
        if ch == 0 || t == 0 || t > u32::MAX as u64 {
            return Err(Error::format(format!("line {}", lineno + 1), "channel and time are 1-based"));
        }
        rows.push((ch, t as u32));
    }
    let k = channel_count.unwrap_or_else(|| rows.iter().map(|r| r.0).max().unwrap_or(0));
    let duration = duration_samples.unwrap_or_else(|| rows.iter().map(|r| r.1).max().unwrap_or(1));
    let mut times = vec![Vec::new(); k];
    for (ch, t) in rows {
        if ch > k {
            return Err(Error::format("channel", format!("channel {ch} exceeds channel_count {k}")));
        }
        times[ch - 1].push(t);
    }
    let trains = times
        .into_iter()
        .enumerate()
        .map(|(i, mut t)| {
            t.sort_unstable();
            SpikeTrain::new(i as u32 + 1, t)
        })
        .collect::<Result<Vec<_>>>()?;
    SpikeTrainSet::new(trains, sampling_rate_hz, duration)
}
