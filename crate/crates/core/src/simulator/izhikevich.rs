use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;

pub const SPIKE_THRESHOLD_MV: f64 = 30.0;

/// Izhikevich parameters `a, b, c, d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IzhikevichParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Preset {
    /// Regular spiking.
    Rs,
    /// Intrinsically bursting.
    Ib,
    /// Chattering.
    Ch,
    /// Fast spiking.
    Fs,
    /// Low-threshold spiking.
    Lts,
    /// Thalamo-cortical.
    Tc,
}

impl Preset {
    pub const ALL: [Preset; 6] = [Preset::Rs, Preset::Ib, Preset::Ch, Preset::Fs, Preset::Lts, Preset::Tc];

    pub fn params(self) -> IzhikevichParams {
        let (a, b, c, d) = match self {
            Preset::Rs => (0.02, 0.20, -65.0, 8.00),
            Preset::Ib => (0.02, 0.20, -55.0, 4.00),
            Preset::Ch => (0.02, 0.20, -50.0, 2.00),
            Preset::Fs => (0.10, 0.20, -65.0, 2.00),
            Preset::Lts => (0.02, 0.25, -65.0, 2.00),
            Preset::Tc => (0.02, 0.25, -65.0, 0.05),
        };
        IzhikevichParams { a, b, c, d }
    }
}

impl IzhikevichParams {
    /// Resting initial state `(c, b·c)`.
    pub fn initial_state(&self) -> (f64, f64) {
        (self.c, self.b * self.c)
    }
}

/// Parameters converted once into the working scalar type.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Coeffs<S> {
    pub a: S,
    pub b: S,
    pub c: S,
    pub d: S,
}

impl<S: Scalar> From<IzhikevichParams> for Coeffs<S> {
    fn from(p: IzhikevichParams) -> Self {
        Self {
            a: S::of(p.a),
            b: S::of(p.b),
            c: S::of(p.c),
            d: S::of(p.d),
        }
    }
}

/// One 1 ms tick: two half-millisecond Euler steps of `v`, one step of `u`
/// with the updated `v`. A crossing caps `v` at the spike peak and skips the
/// remaining substep, so the overshoot never leaks into `u`. Returns true on
/// a crossing; the caller resets the neuron.
#[inline]
pub(crate) fn step<S: Scalar>(v: &mut S, u: &mut S, current: S, k: &Coeffs<S>) -> bool {
    let half = S::of(0.5);
    let c04 = S::of(0.04);
    let c5 = S::of(5.0);
    let c140 = S::of(140.0);
    let peak = S::of(SPIKE_THRESHOLD_MV);
    let mut spiked = false;
    for _ in 0..2 {
        *v += half * ((c04 * *v + c5) * *v + c140 - *u + current);
        if !v.is_finite() {
            break;
        }
        if *v >= peak {
            *v = peak;
            spiked = true;
            break;
        }
    }
    *u += k.a * (k.b * *v - *u);
    spiked
}
