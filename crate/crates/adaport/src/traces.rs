//! Trace pipeline: head-pose prediction by linear regression, viewport
//! coverage geometry, the bandwidth-delay delivery rule, and assembly of
//! per-timeslot feedback matrices. Everything here is deterministic.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::core::ObservationRound;
use crate::error::{Error, Result};

/// The user's viewport: 100° yaw × 90° pitch, centered at the actual pose.
pub const VIEWPORT_YAW_DEG: f64 = 100.0;
pub const VIEWPORT_PITCH_DEG: f64 = 90.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeadPoseSample {
    pub t: usize,
    /// Degrees in [−180, 180).
    pub yaw: f64,
    /// Degrees in [−90, 90].
    pub pitch: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandwidthSample {
    pub t: usize,
    pub throughput_mbps: f64,
}

/// One candidate delivery portion: its angular extents and payload size.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PortionSpec {
    pub yaw_extent: f64,
    pub pitch_extent: f64,
    pub size_megabits: f64,
}

impl PortionSpec {
    pub fn new(yaw_extent: f64, pitch_extent: f64, size_megabits: f64) -> Result<Self> {
        if yaw_extent < VIEWPORT_YAW_DEG || pitch_extent < VIEWPORT_PITCH_DEG {
            return Err(Error::Trace(format!(
                "portion {yaw_extent}°×{pitch_extent}° cannot contain the \
                 {VIEWPORT_YAW_DEG}°×{VIEWPORT_PITCH_DEG}° viewport"
            )));
        }
        if size_megabits <= 0.0 || size_megabits.is_nan() {
            return Err(Error::Trace(format!("portion size {size_megabits} must be > 0")));
        }
        Ok(Self { yaw_extent, pitch_extent, size_megabits })
    }
}

/// The four portion geometries used throughout: 100°×90° (minimum viewport),
/// 102°×91°, 108°×94°, 120°×100°. Payloads scale `base_size_megabits` by
/// angular-area ratio relative to the minimum viewport.
pub fn default_portions(base_size_megabits: f64) -> Result<Vec<PortionSpec>> {
    let geometries = [(100.0, 90.0), (102.0, 91.0), (108.0, 94.0), (120.0, 100.0)];
    let base_area = 100.0 * 90.0;
    geometries
        .iter()
        .map(|&(yw, pt)| PortionSpec::new(yw, pt, base_size_megabits * yw * pt / base_area))
        .collect()
}

/// Checks the total size order required of a portion list: both extents
/// nondecreasing.
pub fn validate_portion_order(portions: &[PortionSpec]) -> Result<()> {
    if portions.is_empty() {
        return Err(Error::Trace("empty portion list".into()));
    }
    for w in portions.windows(2) {
        if w[1].yaw_extent < w[0].yaw_extent || w[1].pitch_extent < w[0].pitch_extent {
            return Err(Error::Trace("portion list not size-ordered".into()));
        }
    }
    Ok(())
}

/// Precomputed T×N prediction (x) and transmission (y) outcome matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct FeedbackMatrices {
    /// Row-major T×N; rows nondecreasing across size-ordered portions.
    pub x: Vec<Vec<u8>>,
    /// Row-major T×N; rows nonincreasing across size-ordered portions.
    pub y: Vec<Vec<u8>>,
    pub t_count: usize,
    pub n_arms: usize,
}

impl FeedbackMatrices {
    pub fn row(&self, t: usize) -> ObservationRound {
        ObservationRound {
            t: t + 1,
            x_all: self.x[t].clone(),
            y_all: self.y[t].clone(),
        }
    }

    /// Arm maximizing total achieved reward Σ_t X_i(t)·Y_i(t), lowest index
    /// on ties.
    pub fn oracle_arm(&self) -> usize {
        let mut best = 0usize;
        let mut best_sum = 0u64;
        for i in 0..self.n_arms {
            let s: u64 = (0..self.t_count)
                .map(|t| (self.x[t][i] * self.y[t][i]) as u64)
                .sum();
            if i == 0 || s > best_sum {
                best = i;
                best_sum = s;
            }
        }
        best
    }

    pub fn write_csv(&self, mut out: impl Write) -> Result<()> {
        let xs: Vec<String> = (1..=self.n_arms).map(|i| format!("x_{i}")).collect();
        let ys: Vec<String> = (1..=self.n_arms).map(|i| format!("y_{i}")).collect();
        writeln!(out, "t,{},{}", xs.join(","), ys.join(","))?;
        for t in 0..self.t_count {
            let xr: Vec<String> = self.x[t].iter().map(|v| v.to_string()).collect();
            let yr: Vec<String> = self.y[t].iter().map(|v| v.to_string()).collect();
            writeln!(out, "{},{},{}", t + 1, xr.join(","), yr.join(","))?;
        }
        Ok(())
    }
}

fn wrap_deg(mut a: f64) -> f64 {
    // into [−180, 180)
    a = a.rem_euclid(360.0);
    if a >= 180.0 {
        a -= 360.0;
    }
    a
}

/// Minimal-magnitude angular difference a − b in degrees, in [−180, 180).
pub fn wrapped_yaw_error(a: f64, b: f64) -> f64 {
    wrap_deg(a - b)
}

/// OLS line through the last 3 pose samples evaluated one slot ahead. Yaw is
/// unwrapped before fitting so consecutive deltas have magnitude ≤ 180°.
/// With fewer than 3 samples, falls back to the last observed pose.
pub fn predict_pose(history: &[HeadPoseSample]) -> Result<(f64, f64)> {
    let last = history.last().ok_or_else(|| Error::Trace("empty pose history".into()))?;
    if history.len() < 3 {
        return Ok((last.yaw, last.pitch));
    }
    let h = &history[history.len() - 3..];

    // unwrap yaw across the ±180° seam
    let mut yaws = [h[0].yaw, 0.0, 0.0];
    for k in 1..3 {
        yaws[k] = yaws[k - 1] + wrap_deg(h[k].yaw - h[k - 1].yaw);
    }
    let pitches = [h[0].pitch, h[1].pitch, h[2].pitch];

    // OLS over abscissae 0,1,2 evaluated at 3: mean + 2·slope, with
    // slope = (y₂ − y₀)/2 for equally spaced points
    let extrapolate = |v: [f64; 3]| -> f64 {
        let mean = (v[0] + v[1] + v[2]) / 3.0;
        let slope = (v[2] - v[0]) / 2.0;
        mean + 2.0 * slope
    };
    let yaw = wrap_deg(extrapolate(yaws));
    let pitch = extrapolate(pitches).clamp(-90.0, 90.0);
    Ok((yaw, pitch))
}

/// 1 iff the portion, centered on the predicted pose, contains the 100°×90°
/// viewport centered on the actual pose. Per-axis slack comparison.
pub fn coverage(actual: (f64, f64), predicted: (f64, f64), portion: &PortionSpec) -> u8 {
    let yaw_err = wrapped_yaw_error(actual.0, predicted.0).abs();
    let pitch_err = (actual.1 - predicted.1).abs();
    let yaw_slack = (portion.yaw_extent - VIEWPORT_YAW_DEG) / 2.0;
    let pitch_slack = (portion.pitch_extent - VIEWPORT_PITCH_DEG) / 2.0;
    (yaw_err <= yaw_slack && pitch_err <= pitch_slack) as u8
}

/// 1 iff the portion's transmission delay fits in the frame interval.
pub fn delivery(portion: &PortionSpec, bw: &BandwidthSample, interval_s: f64) -> u8 {
    if bw.throughput_mbps <= 0.0 {
        return 0;
    }
    (portion.size_megabits / bw.throughput_mbps <= interval_s) as u8
}

/// Builds the T×N feedback matrices by cycling the pose and bandwidth traces
/// independently up to `target_t` timeslots.
pub fn build_matrices(
    poses: &[HeadPoseSample],
    bandwidth: &[BandwidthSample],
    portions: &[PortionSpec],
    target_t: usize,
    interval_s: f64,
) -> Result<FeedbackMatrices> {
    if poses.is_empty() || bandwidth.is_empty() {
        return Err(Error::Trace("empty trace".into()));
    }
    validate_portion_order(portions)?;
    if interval_s <= 0.0 || interval_s.is_nan() {
        return Err(Error::Trace(format!("interval {interval_s} must be > 0")));
    }
    let n = portions.len();
    let mut x = Vec::with_capacity(target_t);
    let mut y = Vec::with_capacity(target_t);
    let pose_at = |t: usize| poses[t % poses.len()];
    for t in 0..target_t {
        let actual = pose_at(t);
        let history: Vec<HeadPoseSample> = (t.saturating_sub(3)..t).map(pose_at).collect();
        let predicted = if history.is_empty() {
            (actual.yaw, actual.pitch)
        } else {
            predict_pose(&history)?
        };
        let bw = bandwidth[t % bandwidth.len()];
        x.push(
            portions
                .iter()
                .map(|p| coverage((actual.yaw, actual.pitch), predicted, p))
                .collect(),
        );
        y.push(portions.iter().map(|p| delivery(p, &bw, interval_s)).collect());
    }
    Ok(FeedbackMatrices { x, y, t_count: target_t, n_arms: n })
}

pub fn read_pose_csv(path: impl AsRef<Path>) -> Result<Vec<HeadPoseSample>> {
    #[derive(Deserialize)]
    struct Row {
        t: usize,
        yaw_deg: f64,
        pitch_deg: f64,
    }
    let mut rdr = csv::Reader::from_path(path)?;
    let mut out = Vec::new();
    for rec in rdr.deserialize::<Row>() {
        let r = rec?;
        if let Some(prev) = out.last() {
            let prev: &HeadPoseSample = prev;
            if r.t <= prev.t {
                return Err(Error::Trace(format!("pose timestamps not increasing at t={}", r.t)));
            }
        }
        if !(-90.0..=90.0).contains(&r.pitch_deg) {
            return Err(Error::Trace(format!("pitch {} outside [−90, 90]", r.pitch_deg)));
        }
        out.push(HeadPoseSample { t: r.t, yaw: wrap_deg(r.yaw_deg), pitch: r.pitch_deg });
    }
    if out.is_empty() {
        return Err(Error::Trace("empty pose trace".into()));
    }
    Ok(out)
}

pub fn read_bandwidth_csv(path: impl AsRef<Path>) -> Result<Vec<BandwidthSample>> {
    #[derive(Deserialize)]
    struct Row {
        t: usize,
        throughput_mbps: f64,
    }
    let mut rdr = csv::Reader::from_path(path)?;
    let mut out = Vec::new();
    for rec in rdr.deserialize::<Row>() {
        let r = rec?;
        if r.throughput_mbps < 0.0 {
            return Err(Error::Trace(format!("negative throughput at t={}", r.t)));
        }
        out.push(BandwidthSample { t: r.t, throughput_mbps: r.throughput_mbps });
    }
    if out.is_empty() {
        return Err(Error::Trace("empty bandwidth trace".into()));
    }
    Ok(out)
}
