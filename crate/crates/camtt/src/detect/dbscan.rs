//! DBSCAN over primitive detections with a scaled Chebyshev metric:
//! neighbors satisfy max(|dr|/R_th, |df|/D_th) <= 1. Noise points are
//! discarded.

use super::{DetectorConfig, PrimitiveDetection};
use crate::scenario::RdMap;

fn neighbors(
    points: &[(f64, f64)],
    idx: usize,
    r_th: f64,
    d_th: f64,
) -> Vec<usize> {
    let (r0, f0) = points[idx];
    points
        .iter()
        .enumerate()
        .filter(|(j, (r, f))| {
            *j != idx && ((r - r0).abs() / r_th).max((f - f0).abs() / d_th) <= 1.0
        })
        .map(|(j, _)| j)
        .collect()
}

pub fn cluster(
    detections: &[PrimitiveDetection],
    map: &RdMap,
    cfg: &DetectorConfig,
) -> Vec<Vec<PrimitiveDetection>> {
    let points: Vec<(f64, f64)> = detections
        .iter()
        .map(|d| (map.range_axis[d.range_bin], map.doppler_axis[d.doppler_bin]))
        .collect();

    const UNVISITED: i64 = -2;
    const NOISE: i64 = -1;
    let mut label = vec![UNVISITED; detections.len()];
    let mut cluster_id: i64 = 0;

    for i in 0..detections.len() {
        if label[i] != UNVISITED {
            continue;
        }
        let nbrs = neighbors(&points, i, cfg.r_th, cfg.d_th);
        // Core point: neighborhood including itself reaches minPts.
        if nbrs.len() + 1 < cfg.min_cluster_size {
            label[i] = NOISE;
            continue;
        }
        label[i] = cluster_id;
        let mut queue = nbrs;
        while let Some(j) = queue.pop() {
            if label[j] == NOISE {
                label[j] = cluster_id; // border point
            }
            if label[j] != UNVISITED {
                continue;
            }
            label[j] = cluster_id;
            let nbrs_j = neighbors(&points, j, cfg.r_th, cfg.d_th);
            if nbrs_j.len() + 1 >= cfg.min_cluster_size {
                queue.extend(nbrs_j);
            }
        }
        cluster_id += 1;
    }

    let mut clusters = vec![Vec::new(); cluster_id as usize];
    for (i, &l) in label.iter().enumerate() {
        if l >= 0 {
            clusters[l as usize].push(detections[i]);
        }
    }
    clusters
}
