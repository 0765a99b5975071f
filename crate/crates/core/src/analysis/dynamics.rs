use serde::{Deserialize, Serialize};

use super::ks::{ks_two_sample, KsResult};
use crate::error::{Error, Result};
use crate::inference::ThresholdedConnectivityMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Change {
    Gained,
    Stronger,
    Same,
    Weaker,
    Lost,
}

impl Change {
    pub const ALL: [Change; 5] = [Change::Gained, Change::Stronger, Change::Same, Change::Weaker, Change::Lost];

    #[cfg(test)]
    fn swapped(self) -> Self {
        match self {
            Change::Gained => Change::Lost,
            Change::Lost => Change::Gained,
            Change::Stronger => Change::Weaker,
            Change::Weaker => Change::Stronger,
            Change::Same => Change::Same,
        }
    }
}

/// Change counts of one effect group.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ChangeCounts {
    pub gained: usize,
    pub stronger: usize,
    pub same: usize,
    pub weaker: usize,
    pub lost: usize,
}

impl ChangeCounts {
    fn add(&mut self, change: Change) {
        *self.slot(change) += 1;
    }

    fn slot(&mut self, change: Change) -> &mut usize {
        match change {
            Change::Gained => &mut self.gained,
            Change::Stronger => &mut self.stronger,
            Change::Same => &mut self.same,
            Change::Weaker => &mut self.weaker,
            Change::Lost => &mut self.lost,
        }
    }

    pub fn get(&self, change: Change) -> usize {
        let mut copy = *self;
        *copy.slot(change)
    }

    pub fn total(&self) -> usize {
        self.gained + self.stronger + self.same + self.weaker + self.lost
    }

    /// Fractions in [`Change::ALL`] order; all zero for an empty group.
    pub fn fractions(&self) -> [f64; 5] {
        let total = self.total();
        Change::ALL.map(|c| if total == 0 { 0.0 } else { self.get(c) as f64 / total as f64 })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DynamicsReport {
    pub strong_quantile: f64,
    pub same_tol: f64,
    /// |strength| splitting strong from weak inhibitory effects.
    pub inhibitory_cut: f64,
    pub excitatory_cut: f64,
    pub strong_inhibitory: ChangeCounts,
    pub weak_inhibitory: ChangeCounts,
    pub strong_excitatory: ChangeCounts,
    pub weak_excitatory: ChangeCounts,
    /// K–S test of the |strength| distributions before and after, per sign
    /// (absent when a side has no effects of that sign).
    pub ks_inhibitory: Option<KsResult>,
    pub ks_excitatory: Option<KsResult>,
}

/// Linearly interpolated quantile of unsorted values (0 for none).
pub fn quantile(values: &[f64], q: f64) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let pos = q.clamp(0.0, 1.0) * (v.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    v[lo] + (v[hi] - v[lo]) * (pos - lo as f64)
}

/// Change of one effect. Two present strengths count as the same when they
/// differ by at most `same_tol` of the larger one, which keeps the rule
/// symmetric under swapping the snapshots.
fn change(before: Option<f64>, after: Option<f64>, same_tol: f64) -> Option<Change> {
    match (before, after) {
        (None, None) => None,
        (None, Some(_)) => Some(Change::Gained),
        (Some(_), None) => Some(Change::Lost),
        (Some(b), Some(a)) => Some(if (a - b).abs() <= same_tol * a.max(b) {
            Change::Same
        } else if a > b {
            Change::Stronger
        } else {
            Change::Weaker
        }),
    }
}

/// Compare two signed snapshots of the same channels. Effects are
/// `(source, target, sign)`; an effect is strong when its larger |strength|
/// over the two snapshots reaches the `strong_quantile` of all |strengths|
/// of that sign in either snapshot.
pub fn classify_effect_changes(
    before: &ThresholdedConnectivityMatrix,
    after: &ThresholdedConnectivityMatrix,
    strong_quantile: f64,
    same_tol: f64,
) -> Result<DynamicsReport> {
    if before.classes.dim() != after.classes.dim() {
        return Err(Error::param("tcm", format!("{:?} against {:?}", before.classes.dim(), after.classes.dim())));
    }
    if !(0.0..=1.0).contains(&strong_quantile) || !(same_tol >= 0.0) {
        return Err(Error::param("strong_quantile", "quantile must lie in [0, 1] and the tolerance be non-negative"));
    }
    let effect = |t: &ThresholdedConnectivityMatrix, cell: (usize, usize), sign: i8| (t.classes[cell] == sign).then(|| t.strengths[cell].abs());
    let strengths = |t: &ThresholdedConnectivityMatrix, sign: i8| -> Vec<f64> {
        t.classes.indexed_iter().filter(|(_, &c)| c == sign).map(|(cell, _)| t.strengths[cell].abs()).collect()
    };
    let mut groups = [[ChangeCounts::default(); 2]; 2];
    let mut cuts = [0.0; 2];
    let mut ks = [None, None];
    for (s, sign) in [-1i8, 1].into_iter().enumerate() {
        let (b, a) = (strengths(before, sign), strengths(after, sign));
        cuts[s] = quantile(&[b.as_slice(), a.as_slice()].concat(), strong_quantile);
        if !b.is_empty() && !a.is_empty() {
            ks[s] = Some(ks_two_sample(&b, &a, 0.05)?);
        }
        for (cell, _) in before.classes.indexed_iter() {
            let (x, y) = (effect(before, cell, sign), effect(after, cell, sign));
            if let Some(c) = change(x, y, same_tol) {
                let strong = x.unwrap_or(0.0).max(y.unwrap_or(0.0)) >= cuts[s];
                groups[s][strong as usize].add(c);
            }
        }
    }
    Ok(DynamicsReport {
        strong_quantile,
        same_tol,
        inhibitory_cut: cuts[0],
        excitatory_cut: cuts[1],
        strong_inhibitory: groups[0][1],
        weak_inhibitory: groups[0][0],
        strong_excitatory: groups[1][1],
        weak_excitatory: groups[1][0],
        ks_inhibitory: ks[0],
        ks_excitatory: ks[1],
    })
}

impl DynamicsReport {
    pub fn groups(&self) -> [(&'static str, &ChangeCounts); 4] {
        [
            ("strong_inhibitory", &self.strong_inhibitory),
            ("weak_inhibitory", &self.weak_inhibitory),
            ("strong_excitatory", &self.strong_excitatory),
            ("weak_excitatory", &self.weak_excitatory),
        ]
    }
}
