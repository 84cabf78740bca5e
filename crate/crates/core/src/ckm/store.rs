//! JSON persistence with fixed six-decimal numbers.

use super::{top_beams, CkmCell, CkmGrid};
use crate::geom::Vec2;
use crate::{Error, Result};
use serde::Deserialize;
use std::fmt::Write;
use std::path::Path;

const VERSION: u32 = 1;

fn f6(v: f64) -> String {
    format!("{v:.6}")
}

pub fn ckm_to_json(g: &CkmGrid) -> String {
    let mut s = String::new();
    let o = g.origin_xy();
    let (x, y) = g.extent();
    let _ = writeln!(s, "{{");
    let _ = writeln!(s, "  \"version\": {VERSION},");
    let _ = writeln!(s, "  \"cell_size_m\": {},", f6(g.cell_size_m()));
    let _ = writeln!(s, "  \"origin_xy\": [{}, {}],", f6(o.x), f6(o.y));
    let _ = writeln!(s, "  \"extent\": [{x}, {y}],");
    let _ = writeln!(s, "  \"Q\": {},", g.num_beams());
    let _ = writeln!(s, "  \"n_max\": {},", g.n_max());
    let cells: Vec<String> = g
        .cells()
        .map(|((ix, iy), c)| {
            let beams: Vec<String> = c
                .beam_indices
                .iter()
                .map(|&q| format!("{{\"q\": {q}, \"rss_db\": {}}}", f6(c.rss_db[q])))
                .collect();
            let rss: Vec<String> = c.rss_db.iter().map(|&v| f6(v)).collect();
            format!(
                "    {{\"ix\": {ix}, \"iy\": {iy}, \"center\": [{}, {}], \"beams\": [{}], \"rss_db\": [{}], \"samples\": {}}}",
                f6(c.center_xy.x),
                f6(c.center_xy.y),
                beams.join(", "),
                rss.join(", "),
                c.sample_count
            )
        })
        .collect();
    if cells.is_empty() {
        let _ = writeln!(s, "  \"cells\": []");
    } else {
        let _ = writeln!(s, "  \"cells\": [\n{}\n  ]", cells.join(",\n"));
    }
    s.push_str("}\n");
    s
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBeam {
    q: usize,
    rss_db: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCell {
    ix: usize,
    iy: usize,
    center: [f64; 2],
    beams: Vec<RawBeam>,
    rss_db: Vec<f64>,
    samples: u64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    version: u32,
    cell_size_m: f64,
    origin_xy: [f64; 2],
    extent: [usize; 2],
    #[serde(rename = "Q")]
    q: usize,
    n_max: usize,
    cells: Vec<serde_json::Value>,
}

fn parse_err(location: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Parse {
        location: location.into(),
        message: message.into(),
    }
}

pub fn ckm_from_json(text: &str) -> Result<CkmGrid> {
    let raw: RawGrid = serde_json::from_str(text)
        .map_err(|e| parse_err(format!("line {} column {}", e.line(), e.column()), e.to_string()))?;
    if raw.version != VERSION {
        return Err(parse_err("version", format!("unsupported version {}", raw.version)));
    }
    let mut g = CkmGrid::new(
        Vec2::from(raw.origin_xy),
        raw.cell_size_m,
        (raw.extent[0], raw.extent[1]),
        raw.q,
        raw.n_max,
    )
    .map_err(|e| parse_err("header", e.to_string()))?;
    if g.n_max() != raw.n_max {
        return Err(parse_err("n_max", "exceeds Q"));
    }
    let mut last: Option<(usize, usize)> = None;
    for (k, value) in raw.cells.into_iter().enumerate() {
        let loc = format!("cells[{k}]");
        let c: RawCell = serde_json::from_value(value).map_err(|e| parse_err(&loc, e.to_string()))?;
        let key = (c.iy, c.ix);
        let loc = format!("cells[{k}] (ix={}, iy={})", c.ix, c.iy);
        match last {
            Some(prev) if prev == key => return Err(parse_err(loc, "duplicate cell")),
            Some(prev) if prev > key => return Err(parse_err(loc, "cells not sorted by (iy, ix)")),
            _ => {}
        }
        last = Some(key);
        if c.ix >= raw.extent[0] || c.iy >= raw.extent[1] {
            return Err(parse_err(loc, "index outside extent"));
        }
        if c.rss_db.len() != raw.q || c.rss_db.iter().any(|v| !v.is_finite()) {
            return Err(parse_err(loc, format!("rss_db must hold {} finite values", raw.q)));
        }
        let center = g.center(c.ix, c.iy);
        if (center.x - c.center[0]).abs() > 1e-6 || (center.y - c.center[1]).abs() > 1e-6 {
            return Err(parse_err(loc, "center inconsistent with index"));
        }
        if c.samples == 0 {
            return Err(parse_err(loc, "samples must be positive"));
        }
        let beams: Vec<usize> = c.beams.iter().map(|b| b.q).collect();
        if beams != top_beams(&c.rss_db, raw.n_max) || c.beams.iter().any(|b| b.rss_db != c.rss_db[b.q]) {
            return Err(parse_err(loc, "beam list disagrees with rss_db"));
        }
        g.set_cell(
            c.ix,
            c.iy,
            CkmCell {
                center_xy: center,
                beam_indices: beams,
                rss_db: c.rss_db,
                sample_count: c.samples,
            },
        );
    }
    Ok(g)
}

pub fn ckm_save(g: &CkmGrid, path: &Path) -> Result<()> {
    std::fs::write(path, ckm_to_json(g)).map_err(|e| Error::io(path, e))
}

pub fn ckm_load(path: &Path) -> Result<CkmGrid> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    ckm_from_json(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> CkmGrid {
        CkmGrid::new(Vec2::new(0.0, 0.5), 0.5, (4, 3), 4, 3).unwrap()
    }

    #[test]
    fn empty_and_single_cell_round_trip() {
        let g = grid();
        assert_eq!(ckm_from_json(&ckm_to_json(&g)).unwrap(), g);
        let mut g = grid();
        g.insert(Vec2::new(1.0, 1.0), &[-61.123456789, -70.0, -55.5, -300.0])
            .unwrap();
        g.insert(Vec2::new(1.0, 1.0), &[-61.1, -70.0, -55.25, -80.0]).unwrap();
        let text = ckm_to_json(&g);
        assert!(text.contains("\"samples\": 2"));
        assert_eq!(ckm_from_json(&text).unwrap(), g);
    }

    #[test]
    fn duplicate_record_is_named() {
        let mut g = grid();
        g.insert(Vec2::new(0.0, 0.5), &[0.0, 1.0, 2.0, 3.0]).unwrap();
        let text = ckm_to_json(&g);
        let line = text.lines().find(|l| l.contains("\"ix\"")).unwrap();
        let dup = text.replace(line, &format!("{line},\n{line}"));
        match ckm_from_json(&dup) {
            Err(Error::Parse { location, message }) => {
                assert_eq!(location, "cells[1] (ix=0, iy=0)");
                assert_eq!(message, "duplicate cell");
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn malformed_documents() {
        assert!(matches!(ckm_from_json("{"), Err(Error::Parse { .. })));
        let mut g = grid();
        g.insert(Vec2::new(0.0, 0.5), &[0.0, 1.0, 2.0, 3.0]).unwrap();
        let bad = ckm_to_json(&g).replace("\"samples\": 1", "\"samples\": 1, \"extra\": 0");
        match ckm_from_json(&bad) {
            Err(Error::Parse { location, .. }) => assert_eq!(location, "cells[0]"),
            other => panic!("{other:?}"),
        }
    }
}
