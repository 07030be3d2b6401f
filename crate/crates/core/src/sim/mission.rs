use serde::{Deserialize, Serialize};

use super::SimError;
use crate::defaults::MSG_RATE_HZ;

/// UAV hover point in the local planar frame of the walk path.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UavPosition {
    pub x_m: f64,
    pub y_m: f64,
}

/// A walk under a hovering UAV, repeated at every flying height.
///
/// Without `duration_s` each height covers the path once. With it, the
/// wearer walks the path back and forth for that long.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MissionSpec {
    #[serde(default)]
    pub uav: UavPosition,
    pub heights_m: Vec<f64>,
    /// Waypoints `[x, y]` in meters.
    pub path: Vec<[f64; 2]>,
    pub speed_mps: f64,
    #[serde(default = "default_rate")]
    pub msg_rate_hz: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub duration_s: Option<f64>,
    /// Receiver antenna height; the crate default when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h_rx_m: Option<f64>,
}

fn default_rate() -> f64 {
    MSG_RATE_HZ
}

impl MissionSpec {
    pub fn validate(&self) -> Result<(), SimError> {
        let bad = |m: String| Err(SimError::InvalidMission(m));
        if self.heights_m.is_empty() {
            return bad("no flying heights".into());
        }
        if let Some(h) = self.heights_m.iter().find(|h| !(h.is_finite() && **h > 0.0)) {
            return bad(format!("flying height {h} must be positive"));
        }
        if self.path.is_empty() {
            return bad("empty walk path".into());
        }
        if self.path.iter().flatten().any(|v| !v.is_finite()) || !self.uav.x_m.is_finite() || !self.uav.y_m.is_finite() {
            return bad("non-finite coordinate".into());
        }
        if !(self.speed_mps.is_finite() && self.speed_mps > 0.0) {
            return bad(format!("walking speed {} must be positive", self.speed_mps));
        }
        if !(self.msg_rate_hz.is_finite() && self.msg_rate_hz > 0.0) {
            return bad(format!("message rate {} must be positive", self.msg_rate_hz));
        }
        match self.duration_s {
            Some(d) if !(d.is_finite() && d >= 0.0) => return bad(format!("duration {d} must be non-negative")),
            None if self.path_length() == 0.0 => return bad("a stationary path needs duration_s".into()),
            _ => {}
        }
        if let Some(h) = self.h_rx_m {
            if !(h.is_finite() && h >= 0.0) {
                return bad(format!("receiver height {h} must be non-negative"));
            }
        }
        Ok(())
    }

    pub fn h_rx(&self) -> f64 {
        self.h_rx_m.unwrap_or(crate::defaults::RX_HEIGHT_M)
    }

    pub fn path_length(&self) -> f64 {
        self.path
            .windows(2)
            .map(|w| (w[1][0] - w[0][0]).hypot(w[1][1] - w[0][1]))
            .sum()
    }

    /// Time spent at each height, seconds.
    pub fn leg_duration_s(&self) -> f64 {
        self.duration_s.unwrap_or_else(|| self.path_length() / self.speed_mps)
    }

    /// Messages sent at each height: epochs `k / rate` for `k / rate <= T`.
    pub fn messages_per_height(&self) -> usize {
        (self.leg_duration_s() * self.msg_rate_hz + 1e-9).floor() as usize + 1
    }

    /// Wearer position `t` seconds into a leg.
    pub fn position_at(&self, t: f64) -> [f64; 2] {
        let total = self.path_length();
        if total == 0.0 {
            return self.path[0];
        }
        let mut s = self.speed_mps * t;
        if self.duration_s.is_some() {
            s %= 2.0 * total;
            if s > total {
                s = 2.0 * total - s;
            }
        }
        let s = s.clamp(0.0, total);
        let mut walked = 0.0;
        for w in self.path.windows(2) {
            let len = (w[1][0] - w[0][0]).hypot(w[1][1] - w[0][1]);
            if len > 0.0 && s <= walked + len {
                let f = (s - walked) / len;
                return [w[0][0] + f * (w[1][0] - w[0][0]), w[0][1] + f * (w[1][1] - w[0][1])];
            }
            walked += len;
        }
        *self.path.last().expect("non-empty path")
    }

    /// Horizontal wearer-UAV distance at `t`.
    pub fn d2d_at(&self, t: f64) -> f64 {
        let p = self.position_at(t);
        (p[0] - self.uav.x_m).hypot(p[1] - self.uav.y_m)
    }
}
