use super::spectrum::RangeAngleSpectrum;
use crate::geom::{Pose, Vec2};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DetectionConfig {
    /// Cells more than this far below the global peak are ignored.
    pub threshold_db: f64,
    pub cluster_eps_m: f64,
    pub min_points: usize,
    /// Cells beyond this range are ignored; the periodogram axis wraps
    /// negative delays onto its far end.
    pub max_range_m: Option<f64>,
}

impl Default for DetectionConfig {
    fn default() -> Self {
        DetectionConfig {
            threshold_db: 25.0,
            cluster_eps_m: 0.5,
            min_points: 1,
            max_range_m: Some(60.0),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Detection {
    pub range_m: f64,
    pub angle_rad: f64,
    /// Strongest cell of the cluster.
    pub power_db: f64,
    pub position_xy: Vec2,
    pub num_cells: usize,
}

/// Density clustering: `Some(cluster)` per point, `None` for noise.
///
/// Clusters are numbered in order of their first core point.
pub fn dbscan(points: &[Vec2], eps: f64, min_points: usize) -> Vec<Option<usize>> {
    let key = |p: Vec2| ((p.x / eps).floor() as i64, (p.y / eps).floor() as i64);
    let mut buckets: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    for (i, p) in points.iter().enumerate() {
        buckets.entry(key(*p)).or_default().push(i);
    }
    let eps2 = eps * eps;
    let neighbours = |i: usize| -> Vec<usize> {
        let (kx, ky) = key(points[i]);
        let mut out = Vec::new();
        for dx in -1..=1 {
            for dy in -1..=1 {
                if let Some(b) = buckets.get(&(kx + dx, ky + dy)) {
                    out.extend(b.iter().copied().filter(|&j| {
                        let d = points[j] - points[i];
                        d.dot(d) <= eps2
                    }));
                }
            }
        }
        out.sort_unstable();
        out
    };

    let mut label: Vec<Option<usize>> = vec![None; points.len()];
    let mut visited = vec![false; points.len()];
    let mut next = 0;
    for i in 0..points.len() {
        if visited[i] {
            continue;
        }
        visited[i] = true;
        let seeds = neighbours(i);
        if seeds.len() < min_points {
            continue;
        }
        let c = next;
        next += 1;
        label[i] = Some(c);
        let mut queue = seeds;
        while let Some(j) = queue.pop() {
            if label[j].is_none() {
                label[j] = Some(c);
            }
            if visited[j] {
                continue;
            }
            visited[j] = true;
            let nb = neighbours(j);
            if nb.len() >= min_points {
                queue.extend(nb.into_iter().filter(|&k| !visited[k] || label[k].is_none()));
            }
        }
    }
    label
}

/// Threshold, map to the plane, cluster, and reduce each cluster to its
/// power-weighted centroid in (range, angle). Sorted by descending power.
pub fn extract_detections(p: &RangeAngleSpectrum, cfg: &DetectionConfig, pose: &Pose) -> Vec<Detection> {
    let max_r = cfg.max_range_m.unwrap_or(f64::INFINITY);
    let eligible = |i: usize| {
        let r = p.range(i);
        r > 0.0 && r <= max_r
    };
    let peak = p
        .power
        .indexed_iter()
        .filter(|((i, _), _)| eligible(*i))
        .fold(0.0f64, |m, (_, &v)| m.max(v));
    if !(peak > 0.0) {
        return Vec::new();
    }
    let floor = peak * 10f64.powf(-cfg.threshold_db / 10.0);
    let mut cells = Vec::new();
    for ((i, q), &v) in p.power.indexed_iter() {
        if v >= floor && v > 0.0 && eligible(i) {
            cells.push((p.range(i), p.angles_rad[q], v));
        }
    }
    let points: Vec<Vec2> = cells.iter().map(|&(r, th, _)| pose.point_at(r, th)).collect();
    let labels = dbscan(&points, cfg.cluster_eps_m, cfg.min_points);
    let n_clusters = labels.iter().flatten().max().map_or(0, |m| m + 1);
    // (Σw, Σw·r, Σw·θ, max w, count)
    let mut acc = vec![(0.0, 0.0, 0.0, 0.0f64, 0usize); n_clusters];
    for (&(r, th, w), l) in cells.iter().zip(&labels) {
        if let Some(c) = *l {
            let a = &mut acc[c];
            a.0 += w;
            a.1 += w * r;
            a.2 += w * th;
            a.3 = a.3.max(w);
            a.4 += 1;
        }
    }
    let mut out: Vec<Detection> = acc
        .into_iter()
        .map(|(sw, sr, st, mx, n)| {
            let (range_m, angle_rad) = (sr / sw, st / sw);
            Detection {
                range_m,
                angle_rad,
                power_db: 10.0 * mx.log10(),
                position_xy: pose.point_at(range_m, angle_rad),
                num_cells: n,
            }
        })
        .collect();
    out.sort_by(|a, b| b.power_db.total_cmp(&a.power_db));
    out
}
