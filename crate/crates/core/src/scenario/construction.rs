use super::sensing::{associate, streams, ue_target, EchoSimulator, Localizer};
use super::{cell_occupied, los_blocked, ScenarioConfig};
use crate::channel::{compute_paths, downlink_observation};
use crate::ckm::{ue_measure_rss_per_beam, CkmGrid};
use crate::geom::Vec2;
use crate::par::map_indexed;
use crate::Result;

/// Where the position used for map insertion came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PositionSource {
    /// Localized from the echo of a line-of-sight UE.
    Sensed,
    /// Reported by a non-line-of-sight UE.
    Reported,
    /// Line-of-sight UE that sensing missed; the reported position stands in.
    ReportedFallback,
    /// Cell overlaps an obstacle and was not visited.
    Skipped,
}

impl PositionSource {
    pub fn name(self) -> &'static str {
        match self {
            PositionSource::Sensed => "sensed",
            PositionSource::Reported => "reported",
            PositionSource::ReportedFallback => "reported_fallback",
            PositionSource::Skipped => "skipped",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CellRecord {
    pub ix: usize,
    pub iy: usize,
    pub true_xy: Vec2,
    pub los: bool,
    pub source: PositionSource,
    pub est_xy: Option<Vec2>,
    /// Cell the sample was stored in.
    pub stored_in: Option<(usize, usize)>,
    pub best_beam: Option<usize>,
    pub best_rss_db: Option<f64>,
}

pub struct ConstructionOutcome {
    pub grid: CkmGrid,
    pub records: Vec<CellRecord>,
}

struct Visit {
    est: Option<Vec2>,
    rss: Vec<f64>,
}

/// Walks a UE over every free cell centre, rows bottom to top and each row
/// left to right, and stores the measured per-beam RSS at the sensed
/// (line of sight) or reported (otherwise) position.
pub fn run_ckm_construction(cfg: &ScenarioConfig) -> Result<ConstructionOutcome> {
    let mut grid = cfg.empty_grid()?;
    let (nx, ny) = grid.extent();
    let scene = &cfg.scene;
    let bs = scene.bs_position;
    let cell = grid.cell_size_m();
    let occupied = |p: Vec2| cell_occupied(scene, p, cell) || (p - bs).norm() <= cell / 2.0;
    let sim = EchoSimulator::new(cfg)?;
    let loc = Localizer::new(
        cfg,
        &sim,
        cfg.estimator,
        cfg.localization.clutter,
        cfg.localization.screen_margin_db,
    )?;
    let lambda = cfg.waveform.wavelength();
    let (mq, q) = (cfg.frame.symbols_per_subframe, cfg.frame.num_beams);

    let visits = map_indexed(cfg.exec, nx * ny, |k| -> Result<Option<Visit>> {
        let p = grid.center(k % nx, k / nx);
        if occupied(p) {
            return Ok(None);
        }
        let ue = ue_target(cfg, p, Vec2::default());
        let est = if los_blocked(scene, bs, p) {
            None
        } else {
            let slices = sim.beam_slices(std::slice::from_ref(&ue), streams::CELL_ECHO + k as u64)?;
            let dets = loc.detect(&slices)?;
            associate(&dets, p, cfg.association_gate_m).map(|d| d.position_xy)
        };
        let paths = compute_paths(scene, &ue, lambda)?;
        let obs = downlink_observation(
            sim.frame(),
            &paths,
            &cfg.waveform,
            &cfg.noise.spec(streams::CELL_DOWNLINK + k as u64),
        )?;
        Ok(Some(Visit {
            est,
            rss: ue_measure_rss_per_beam(&obs, mq, q)?,
        }))
    });

    let mut records = Vec::with_capacity(nx * ny);
    for (k, visit) in visits.into_iter().enumerate() {
        let (ix, iy) = (k % nx, k / nx);
        let p = grid.center(ix, iy);
        let los = !los_blocked(scene, bs, p);
        let Some(v) = visit? else {
            records.push(CellRecord {
                ix,
                iy,
                true_xy: p,
                los,
                source: PositionSource::Skipped,
                est_xy: None,
                stored_in: None,
                best_beam: None,
                best_rss_db: None,
            });
            continue;
        };
        let mut source = match (los, v.est) {
            (false, _) => PositionSource::Reported,
            (true, Some(_)) => PositionSource::Sensed,
            (true, None) => PositionSource::ReportedFallback,
        };
        let stored = match (source, v.est) {
            (PositionSource::Sensed, Some(e)) => match grid.insert(e, &v.rss) {
                Ok(c) => c,
                Err(_) => {
                    source = PositionSource::ReportedFallback;
                    grid.insert(p, &v.rss)?
                }
            },
            _ => grid.insert(p, &v.rss)?,
        };
        let c = grid.cell(stored.0, stored.1).expect("just inserted");
        records.push(CellRecord {
            ix,
            iy,
            true_xy: p,
            los,
            source,
            est_xy: v.est,
            stored_in: Some(stored),
            best_beam: Some(c.best_beam()),
            best_rss_db: Some(c.best_rss_db()),
        });
    }
    Ok(ConstructionOutcome { grid, records })
}
