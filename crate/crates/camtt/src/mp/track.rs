//! Track lifecycle: two-point spawning from unassociated measurements,
//! 3-of-5 confirmation, and termination on sustained invisibility or
//! missed-detection streaks.

use nalgebra::{Matrix3, Vector2, Vector3};

use super::gaussian::KinematicBelief;
use super::visibility::VisibilityBelief;
use super::TrackerConfig;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrackStatus {
    Tentative,
    Confirmed,
    Terminated,
}

impl TrackStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            TrackStatus::Tentative => "tentative",
            TrackStatus::Confirmed => "confirmed",
            TrackStatus::Terminated => "terminated",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "tentative" => Ok(TrackStatus::Tentative),
            "confirmed" => Ok(TrackStatus::Confirmed),
            "terminated" => Ok(TrackStatus::Terminated),
            other => Err(Error::Serde(format!("unknown track status {other:?}"))),
        }
    }
}

const CONFIRM_WINDOW: usize = 5;
const CONFIRM_HITS: usize = 3;
const TERMINATE_LOW_VIS: usize = 3;

#[derive(Debug, Clone)]
pub struct Track {
    pub id: u64,
    pub kinematic: KinematicBelief,
    pub visibility: VisibilityBelief,
    pub status: TrackStatus,
    pub miss_streak: usize,
    /// Ring of the last five per-scan visibility decisions.
    pub confirm_window: Vec<bool>,
    pub low_visibility_streak: usize,
    pub born_scan: usize,
}

impl Track {
    fn push_decision(&mut self, visible: bool) {
        self.confirm_window.push(visible);
        if self.confirm_window.len() > CONFIRM_WINDOW {
            self.confirm_window.remove(0);
        }
    }

    fn confirm_hits(&self) -> usize {
        self.confirm_window.iter().filter(|&&v| v).count()
    }
}

/// Spawn a tentative track from a single (range, Doppler) measurement.
/// Doppler observes range-rate directly, so no second point is needed.
pub fn spawn_track(
    id: u64,
    measurement: &Vector2<f64>,
    wavelength: f64,
    cfg: &TrackerConfig,
    scan: usize,
) -> Track {
    let range = measurement[0];
    let range_rate = -wavelength * measurement[1] / 2.0;
    let vel_var = (wavelength / 2.0 * cfg.doppler_sigma).powi(2)
        + cfg.spawn_velocity_sigma * cfg.spawn_velocity_sigma;
    let cov = Matrix3::from_diagonal(&Vector3::new(
        cfg.range_sigma * cfg.range_sigma,
        vel_var,
        cfg.accel_sigma * cfg.accel_sigma,
    ));
    Track {
        id,
        kinematic: KinematicBelief::new(Vector3::new(range, range_rate, 0.0), cov),
        visibility: VisibilityBelief::new(cfg.initial_visibility),
        status: TrackStatus::Tentative,
        miss_streak: 0,
        confirm_window: Vec::new(),
        low_visibility_streak: 0,
        born_scan: scan,
    }
}

/// Apply confirmation/termination rules and spawn tentative tracks from
/// unassociated measurements. `missed_marginals[i]` is b(a_{i,0}=1) for
/// track i this scan; `unassociated` lists measurements whose total
/// track-association mass fell below one half. Terminated tracks are
/// removed and returned separately.
pub fn manage_tracks(
    mut tracks: Vec<Track>,
    missed_marginals: &[f64],
    unassociated: &[Vector2<f64>],
    wavelength: f64,
    cfg: &TrackerConfig,
    scan: usize,
    next_id: &mut u64,
) -> (Vec<Track>, Vec<Track>) {
    debug_assert_eq!(tracks.len(), missed_marginals.len());
    for (track, &p_missed) in tracks.iter_mut().zip(missed_marginals) {
        if p_missed > 0.5 {
            track.miss_streak += 1;
        } else {
            track.miss_streak = 0;
        }
        let visible = track.visibility.p_visible > cfg.confirm_threshold;
        track.push_decision(visible);
        if track.visibility.p_visible < cfg.confirm_threshold {
            track.low_visibility_streak += 1;
        } else {
            track.low_visibility_streak = 0;
        }
        if track.status == TrackStatus::Tentative && track.confirm_hits() >= CONFIRM_HITS {
            track.status = TrackStatus::Confirmed;
        }
        if track.low_visibility_streak >= TERMINATE_LOW_VIS
            || track.miss_streak > cfg.max_miss_streak
        {
            track.status = TrackStatus::Terminated;
        }
    }

    let mut terminated: Vec<Track> = Vec::new();
    tracks.retain_mut(|t| {
        if t.status == TrackStatus::Terminated {
            terminated.push(t.clone());
            false
        } else {
            true
        }
    });

    for z in unassociated {
        let track = spawn_track(*next_id, z, wavelength, cfg, scan);
        *next_id += 1;
        tracks.push(track);
    }

    // Capacity: drop lowest-visibility tentative tracks first.
    while tracks.len() > cfg.max_tracks {
        let victim = tracks
            .iter()
            .enumerate()
            .filter(|(_, t)| t.status == TrackStatus::Tentative)
            .min_by(|a, b| {
                a.1.visibility
                    .p_visible
                    .partial_cmp(&b.1.visibility.p_visible)
                    .unwrap()
                    .then(b.0.cmp(&a.0))
            })
            .map(|(idx, _)| idx);
        match victim {
            Some(idx) => {
                tracks.remove(idx);
            }
            None => break, // all confirmed; keep them
        }
    }

    (tracks, terminated)
}

/// One row of the exported track history CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct TrackRecord {
    pub scan: usize,
    pub track_id: u64,
    pub status: TrackStatus,
    pub range: f64,
    pub range_rate: f64,
    pub range_accel: f64,
    pub p_visible: f64,
}

pub const TRACK_CSV_HEADER: &str = "scan,track_id,status,range,range_rate,range_accel,p_visible";

impl TrackRecord {
    pub fn from_track(track: &Track, scan: usize) -> Self {
        TrackRecord {
            scan,
            track_id: track.id,
            status: track.status,
            range: track.kinematic.mean[0],
            range_rate: track.kinematic.mean[1],
            range_accel: track.kinematic.mean[2],
            p_visible: track.visibility.p_visible,
        }
    }

    pub fn to_csv_row(&self) -> String {
        format!(
            "{},{},{},{:.6},{:.6},{:.6},{:.6}",
            self.scan,
            self.track_id,
            self.status.as_str(),
            self.range,
            self.range_rate,
            self.range_accel,
            self.p_visible
        )
    }

    pub fn parse_csv_row(row: &str) -> Result<Self> {
        let fields: Vec<&str> = row.split(',').collect();
        if fields.len() != 7 {
            return Err(Error::Serde(format!("expected 7 fields, got {}", fields.len())));
        }
        let num = |s: &str| -> Result<f64> {
            s.parse()
                .map_err(|e| Error::Serde(format!("bad number {s:?}: {e}")))
        };
        Ok(TrackRecord {
            scan: fields[0]
                .parse()
                .map_err(|e| Error::Serde(format!("bad scan: {e}")))?,
            track_id: fields[1]
                .parse()
                .map_err(|e| Error::Serde(format!("bad id: {e}")))?,
            status: TrackStatus::parse(fields[2])?,
            range: num(fields[3])?,
            range_rate: num(fields[4])?,
            range_accel: num(fields[5])?,
            p_visible: num(fields[6])?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> TrackerConfig {
        TrackerConfig::default()
    }

    fn track_with_visibility(id: u64, p: f64) -> Track {
        let mut t = spawn_track(id, &Vector2::new(100.0, 0.0), 0.03, &cfg(), 0);
        t.visibility = VisibilityBelief::new(p);
        t
    }

    #[test]
    fn three_of_five_confirms() {
        let c = cfg();
        let mut tracks = vec![track_with_visibility(1, 0.9)];
        let mut next_id = 2;
        // decisions: 1,1,1 over three scans -> confirmed
        for scan in 0..3 {
            let (t, _) = manage_tracks(tracks, &[0.0], &[], 0.03, &c, scan, &mut next_id);
            tracks = t;
        }
        assert_eq!(tracks[0].status, TrackStatus::Confirmed);
    }

    #[test]
    fn low_visibility_three_scans_terminates() {
        let c = cfg();
        let mut tracks = vec![track_with_visibility(1, 0.2)];
        let mut next_id = 2;
        for scan in 0..2 {
            let (t, dead) = manage_tracks(tracks, &[0.0], &[], 0.03, &c, scan, &mut next_id);
            tracks = t;
            assert!(dead.is_empty());
        }
        let (tracks, dead) = manage_tracks(tracks, &[0.0], &[], 0.03, &c, 2, &mut next_id);
        assert!(tracks.is_empty());
        assert_eq!(dead.len(), 1);
        assert_eq!(dead[0].status, TrackStatus::Terminated);
    }

    #[test]
    fn miss_streak_terminates() {
        let c = cfg();
        let mut tracks = vec![track_with_visibility(1, 0.9)];
        let mut next_id = 2;
        for scan in 0..c.max_miss_streak {
            let (t, _) = manage_tracks(tracks, &[1.0], &[], 0.03, &c, scan, &mut next_id);
            tracks = t;
            assert_eq!(tracks.len(), 1);
        }
        let (tracks, dead) = manage_tracks(tracks, &[1.0], &[], 0.03, &c, 9, &mut next_id);
        assert!(tracks.is_empty());
        assert_eq!(dead.len(), 1);
    }

    #[test]
    fn spawn_from_unassociated_measurement() {
        let c = cfg();
        let z = Vector2::new(500.0, -100.0);
        let mut next_id = 1;
        let (tracks, _) = manage_tracks(vec![], &[], &[z], 0.03, &c, 4, &mut next_id);
        assert_eq!(tracks.len(), 1);
        let t = &tracks[0];
        assert_eq!(t.status, TrackStatus::Tentative);
        assert_eq!(t.visibility.p_visible, c.initial_visibility);
        assert_eq!(t.kinematic.mean[0], 500.0);
        // Doppler -100 Hz, lambda 0.03 -> range rate +1.5 m/s
        approx::assert_abs_diff_eq!(t.kinematic.mean[1], 1.5, epsilon = 1e-12);
    }

    #[test]
    fn capacity_drops_lowest_visibility_tentative() {
        let mut c = cfg();
        c.max_tracks = 2;
        let tracks = vec![
            track_with_visibility(1, 0.9),
            track_with_visibility(2, 0.3),
            track_with_visibility(3, 0.6),
        ];
        let mut next_id = 4;
        let (tracks, _) = manage_tracks(tracks, &[0.0, 0.0, 0.0], &[], 0.03, &c, 0, &mut next_id);
        assert_eq!(tracks.len(), 2);
        assert!(tracks.iter().all(|t| t.id != 2));
    }

    #[test]
    fn csv_round_trip() {
        let t = track_with_visibility(7, 0.75);
        let rec = TrackRecord::from_track(&t, 3);
        let parsed = TrackRecord::parse_csv_row(&rec.to_csv_row()).unwrap();
        assert_eq!(parsed.scan, 3);
        assert_eq!(parsed.track_id, 7);
        assert_eq!(parsed.status, TrackStatus::Tentative);
    }
}
