//! Trigger counting over harmful-extreme spacing.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Counts windows of roughly one second that hold more than three harmful
/// extremes.
///
/// Gaps are summed into a window while the running total is below `fps`.
/// The first gap seen once the total has reached `fps` closes the window
/// without being added to it, and the window scores when it held more than
/// three gaps. A final window that never reaches `fps` is not scored.
pub fn possible_triggers(ep_frm: &[usize], fps: f64) -> usize {
    let mut triggers = 0;
    let mut score = 0usize;
    let mut hits = 0usize;
    for &gap in ep_frm {
        if (score as f64) < fps {
            score += gap;
            hits += 1;
        } else {
            if hits > 3 {
                triggers += 1;
            }
            score = 0;
            hits = 0;
        }
    }
    triggers
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TriggerSummary {
    pub num_triggers: usize,
    pub harmful_frames: Vec<usize>,
    /// `harmful_frames[i] / fps`, unrounded.
    pub timestamps_s: Vec<f64>,
}

pub fn summarize(rem_frm: &[usize], ep_frm: &[usize], fps: f64) -> Result<TriggerSummary> {
    if rem_frm.len() != ep_frm.len() {
        return Err(Error::LengthMismatch {
            left: rem_frm.len(),
            right: ep_frm.len(),
        });
    }
    if !(fps > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "fps must be positive, got {fps}"
        )));
    }
    Ok(TriggerSummary {
        num_triggers: possible_triggers(ep_frm, fps),
        harmful_frames: rem_frm.to_vec(),
        timestamps_s: rem_frm.iter().map(|&f| f as f64 / fps).collect(),
    })
}
