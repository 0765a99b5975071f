use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spikedata::SpikeTrainSet;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BurstReport {
    /// `[start, end]` sample intervals, inclusive, one per burst.
    pub bursts: Vec<(u32, u32)>,
    pub bursts_per_minute: f64,
}

impl BurstReport {
    pub fn count(&self) -> usize {
        self.bursts.len()
    }
}

/// Split the recording into `window` samples; a window is active when at
/// least `fraction` of the channels spike inside it. Each maximal run of
/// active windows is one burst.
pub fn detect_network_bursts(set: &SpikeTrainSet, window: u32, fraction: f64) -> Result<BurstReport> {
    if set.channel_count() == 0 {
        return Err(Error::param("set", "no channels"));
    }
    if window == 0 {
        return Err(Error::param("window", "must be positive"));
    }
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::param("fraction", "must lie in (0, 1]"));
    }
    let duration = set.duration_samples();
    let windows = duration.div_ceil(window) as usize;
    let mut active_channels = vec![0u32; windows];
    let mut last_window = vec![u32::MAX; set.channel_count()];
    for (c, train) in set.trains().iter().enumerate() {
        for &t in train.times() {
            let w = (t - 1) / window;
            if last_window[c] != w {
                last_window[c] = w;
                active_channels[w as usize] += 1;
            }
        }
    }
    let needed = fraction * set.channel_count() as f64;
    let mut bursts = Vec::new();
    let mut open: Option<usize> = None;
    for w in 0..=windows {
        let active = w < windows && active_channels[w] as f64 >= needed;
        match (active, open) {
            (true, None) => open = Some(w),
            (false, Some(start)) => {
                let s = start as u32 * window + 1;
                let e = (w as u32 * window).min(duration);
                bursts.push((s, e));
                open = None;
            }
            _ => {}
        }
    }
    let minutes = set.duration_seconds() / 60.0;
    Ok(BurstReport {
        bursts_per_minute: bursts.len() as f64 / minutes,
        bursts,
    })
}
