//! Channel knowledge map: per-cell beam index map and per-beam gain map.

mod store;

pub use store::{ckm_from_json, ckm_load, ckm_save, ckm_to_json};

use crate::channel::ChannelObservation;
use crate::geom::Vec2;
use crate::{Error, Result};
use std::collections::BTreeMap;

/// Storage floor for zero-energy beams.
pub const RSS_FLOOR_DB: f64 = -300.0;

/// Resolution at which maps store RSS values and geometry, so the
/// six-decimal file format round-trips exactly.
const QUANTUM: f64 = 1e6;

fn quantize(v: f64) -> f64 {
    (v * QUANTUM).round() / QUANTUM
}

/// Per-beam RSS `a_q = 10·lg(‖Y_q‖²_F / M_q)` of a downlink sensing frame;
/// zero-energy beams map to `-∞`.
pub fn ue_measure_rss_per_beam(obs: &ChannelObservation, mq: usize, q: usize) -> Result<Vec<f64>> {
    let m = &obs.matrix;
    if mq == 0 || q * mq > m.ncols() {
        return Err(Error::param(format!(
            "{q} beams of {mq} symbols exceed {} columns",
            m.ncols()
        )));
    }
    Ok((0..q)
        .map(|b| {
            let e: f64 = (b * mq..(b + 1) * mq)
                .map(|c| m.column(c).iter().map(|z| z.norm_sqr()).sum::<f64>())
                .sum();
            if e > 0.0 {
                10.0 * (e / mq as f64).log10()
            } else {
                f64::NEG_INFINITY
            }
        })
        .collect())
}

/// Indices of the `n_max` largest entries, descending, ties to the lower index.
pub fn top_beams(a: &[f64], n_max: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..a.len()).collect();
    idx.sort_by(|&i, &j| a[j].total_cmp(&a[i]).then(i.cmp(&j)));
    idx.truncate(n_max.min(a.len()));
    idx
}

#[derive(Clone, Debug, PartialEq)]
pub struct CkmCell {
    pub center_xy: Vec2,
    /// Strongest beams, descending RSS.
    pub beam_indices: Vec<usize>,
    /// Full per-beam RSS in dB.
    pub rss_db: Vec<f64>,
    pub sample_count: u64,
}

impl CkmCell {
    pub fn best_beam(&self) -> usize {
        self.beam_indices[0]
    }

    pub fn best_rss_db(&self) -> f64 {
        self.rss_db[self.best_beam()]
    }
}

/// Regular grid of cells; cell `(ix, iy)` is centred at `origin + cell·(ix, iy)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CkmGrid {
    origin_xy: Vec2,
    cell_size_m: f64,
    extent: (usize, usize),
    num_beams: usize,
    n_max: usize,
    /// Keyed by `(iy, ix)` so iteration follows the file order.
    cells: BTreeMap<(usize, usize), CkmCell>,
}

impl CkmGrid {
    /// Geometry is quantized to 1e-6 m.
    pub fn new(
        origin_xy: Vec2,
        cell_size_m: f64,
        extent: (usize, usize),
        num_beams: usize,
        n_max: usize,
    ) -> Result<Self> {
        let cell = quantize(cell_size_m);
        if !(cell > 0.0) || !cell.is_finite() {
            return Err(Error::param(format!("cell size {cell_size_m} must be positive")));
        }
        if num_beams == 0 || n_max == 0 {
            return Err(Error::param("codebook size and n_max must be positive"));
        }
        Ok(CkmGrid {
            origin_xy: Vec2::new(quantize(origin_xy.x), quantize(origin_xy.y)),
            cell_size_m: cell,
            extent,
            num_beams,
            n_max: n_max.min(num_beams),
            cells: BTreeMap::new(),
        })
    }

    pub fn origin_xy(&self) -> Vec2 {
        self.origin_xy
    }

    pub fn cell_size_m(&self) -> f64 {
        self.cell_size_m
    }

    pub fn extent(&self) -> (usize, usize) {
        self.extent
    }

    pub fn num_beams(&self) -> usize {
        self.num_beams
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn center(&self, ix: usize, iy: usize) -> Vec2 {
        self.origin_xy + Vec2::new(ix as f64, iy as f64) * self.cell_size_m
    }

    /// Cell index by round-half-up on each axis; may lie outside the extent.
    pub fn index_of(&self, p: Vec2) -> (i64, i64) {
        let f = |v: f64, o: f64| ((v - o) / self.cell_size_m + 0.5).floor() as i64;
        (f(p.x, self.origin_xy.x), f(p.y, self.origin_xy.y))
    }

    pub fn in_extent(&self, ix: i64, iy: i64) -> bool {
        ix >= 0 && iy >= 0 && (ix as usize) < self.extent.0 && (iy as usize) < self.extent.1
    }

    pub fn cell(&self, ix: usize, iy: usize) -> Option<&CkmCell> {
        self.cells.get(&(iy, ix))
    }

    /// Populated cells as `((ix, iy), cell)` in `(iy, ix)` order.
    pub fn cells(&self) -> impl Iterator<Item = ((usize, usize), &CkmCell)> {
        self.cells.iter().map(|(&(iy, ix), c)| ((ix, iy), c))
    }

    /// Stores `a` in the cell nearest `position`, replacing earlier contents.
    pub fn insert(&mut self, position: Vec2, a: &[f64]) -> Result<(usize, usize)> {
        let (ix, iy) = self.index_of(position);
        if !self.in_extent(ix, iy) {
            return Err(Error::Range(format!(
                "position ({:.3}, {:.3}) outside the map",
                position.x, position.y
            )));
        }
        let (ix, iy) = (ix as usize, iy as usize);
        self.insert_at(ix, iy, a)?;
        Ok((ix, iy))
    }

    fn insert_at(&mut self, ix: usize, iy: usize, a: &[f64]) -> Result<()> {
        if a.len() != self.num_beams {
            return Err(Error::param(format!(
                "rss vector of {} beams, map has {}",
                a.len(),
                self.num_beams
            )));
        }
        if a.iter().any(|v| v.is_nan() || *v == f64::INFINITY) {
            return Err(Error::param("rss must be finite or -inf"));
        }
        let rss: Vec<f64> = a.iter().map(|&v| quantize(v.max(RSS_FLOOR_DB))).collect();
        let beams = top_beams(&rss, self.n_max);
        let center = self.center(ix, iy);
        let entry = self.cells.entry((iy, ix)).or_insert_with(|| CkmCell {
            center_xy: center,
            beam_indices: Vec::new(),
            rss_db: Vec::new(),
            sample_count: 0,
        });
        entry.beam_indices = beams;
        entry.rss_db = rss;
        entry.sample_count += 1;
        Ok(())
    }

    pub(crate) fn set_cell(&mut self, ix: usize, iy: usize, cell: CkmCell) {
        self.cells.insert((iy, ix), cell);
    }

    /// Cell nearest `position`, else the nearest populated cell whose centre
    /// lies within 1.5 cells of `position`.
    pub fn query(&self, position: Vec2) -> Result<&CkmCell> {
        let (ix, iy) = self.index_of(position);
        if self.in_extent(ix, iy) {
            if let Some(c) = self.cell(ix as usize, iy as usize) {
                return Ok(c);
            }
        }
        let radius = 1.5 * self.cell_size_m;
        let mut best: Option<(f64, &CkmCell)> = None;
        for dy in -2..=2 {
            for dx in -2..=2 {
                let (jx, jy) = (ix + dx, iy + dy);
                if !self.in_extent(jx, jy) {
                    continue;
                }
                if let Some(c) = self.cell(jx as usize, jy as usize) {
                    let d = c.center_xy.distance(position);
                    if d <= radius && best.is_none_or(|(bd, _)| d < bd) {
                        best = Some((d, c));
                    }
                }
            }
        }
        best.map(|(_, c)| c)
            .ok_or_else(|| Error::NotFound(format!("no map entry near ({:.3}, {:.3})", position.x, position.y)))
    }
}
