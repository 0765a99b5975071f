use super::delay::DelayFunction;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoincidenceIndex<S = f64> {
    pub value: S,
    /// Delay of the peak the window is centred on.
    pub peak_delay: i32,
    /// Total mass was zero; `value` is 0.
    pub degenerate: bool,
}

/// Fraction of the (rectified) mass of `f` inside a window of `τ` around its peak.
///
/// The window spans `2·⌊τ/2⌋ + 1` delays centred on the first peak; near the
/// ends of the delay range it is shifted inward so that it keeps its width.
pub fn coincidence_index<S: Scalar>(f: &DelayFunction<S>, tau: usize, rectify: bool) -> Result<CoincidenceIndex<S>> {
    if tau > f.len() {
        return Err(Error::param("tau", format!("{tau} exceeds the delay range width {}", f.len())));
    }
    if !rectify && f.values.iter().any(|&v| v < S::zero()) {
        return Err(Error::param("rectify", "delay function has negative values"));
    }
    let (peak_delay, _) = f.peak(rectify);
    let g = |v: S| if rectify { v.abs() } else { v };
    let total: S = f.values.iter().map(|&v| g(v)).sum();
    if total <= S::zero() {
        return Ok(CoincidenceIndex {
            value: S::zero(),
            peak_delay,
            degenerate: true,
        });
    }
    let (start, width) = ci_window(f.len(), (peak_delay - f.d_min) as usize, tau);
    let inside: S = f.values[start..start + width].iter().map(|&v| g(v)).sum();
    Ok(CoincidenceIndex {
        value: inside / total,
        peak_delay,
        degenerate: false,
    })
}

/// Start index and width of the integration window within a range of `len`.
pub(crate) fn ci_window(len: usize, peak: usize, tau: usize) -> (usize, usize) {
    let half = tau / 2;
    let width = (2 * half + 1).min(len);
    let start = peak.saturating_sub(half).min(len - width);
    (start, width)
}
