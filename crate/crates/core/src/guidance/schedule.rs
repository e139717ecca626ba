use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Scribble thickness over training steps: exponential decay from
/// `t_start` to `t_end` across `decay_steps`, then held at `t_end`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThicknessSchedule {
    pub t_start: f64,
    pub t_end: f64,
    pub decay_steps: u64,
    /// Steps trained at `t_end` after the decay; informational.
    pub hold_steps: u64,
}

impl Default for ThicknessSchedule {
    fn default() -> Self {
        ThicknessSchedule {
            t_start: 800.0,
            t_end: 40.0,
            decay_steps: 530_000,
            hold_steps: 70_000,
        }
    }
}

impl ThicknessSchedule {
    pub fn validate(&self) -> Result<()> {
        if !(self.t_end > 0.0 && self.t_start >= self.t_end && self.t_start.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "schedule needs t_start >= t_end > 0, got {} and {}",
                self.t_start, self.t_end
            )));
        }
        if self.decay_steps == 0 {
            return Err(Error::InvalidParameter(
                "decay_steps must be positive".into(),
            ));
        }
        Ok(())
    }

    pub fn total_steps(&self) -> u64 {
        self.decay_steps + self.hold_steps
    }

    /// Thickness in pixels at `step`, rounded half away from zero.
    pub fn thickness_at(&self, step: u64) -> u32 {
        if step >= self.decay_steps {
            return self.t_end.round() as u32;
        }
        let frac = step as f64 / self.decay_steps as f64;
        (self.t_start * (self.t_end / self.t_start).powf(frac)).round() as u32
    }
}

pub fn thickness_at(step: u64, sched: &ThicknessSchedule) -> u32 {
    sched.thickness_at(step)
}
