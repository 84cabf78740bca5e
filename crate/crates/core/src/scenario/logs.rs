//! CSV logs: numbers with six decimals, missing values as empty fields.

use super::{AlignMethod, CellRecord, RunRecord};
use crate::geom::Vec2;
use crate::{Error, Result};
use std::fmt::Write;

pub const RUN_LOG_HEADER: &str = "t_s,ue_true_x,ue_true_y,ue_est_x,ue_est_y,los,method,beam_index,ue_rss_db";
pub const CONSTRUCTION_LOG_HEADER: &str =
    "ix,iy,true_x,true_y,los,source,est_x,est_y,cell_ix,cell_iy,best_beam,best_rss_db";

fn f6(v: f64) -> String {
    format!("{v:.6}")
}

fn opt<T>(v: Option<T>, f: impl Fn(T) -> String) -> String {
    v.map(f).unwrap_or_default()
}

pub fn run_log_csv(records: &[RunRecord]) -> String {
    let mut s = String::from(RUN_LOG_HEADER);
    s.push('\n');
    for r in records {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{}",
            f6(r.t_s),
            f6(r.ue_true.x),
            f6(r.ue_true.y),
            opt(r.ue_est, |p| f6(p.x)),
            opt(r.ue_est, |p| f6(p.y)),
            r.los,
            r.method.name(),
            r.beam_index,
            f6(r.ue_rss_db)
        );
    }
    s
}

/// Parses a run log; `ckm_fallback` is not part of the format and reads as false.
pub fn parse_run_log(text: &str) -> Result<Vec<RunRecord>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h == RUN_LOG_HEADER => {}
        _ => {
            return Err(Error::Parse {
                location: "line 1".into(),
                message: "unexpected header".into(),
            })
        }
    }
    lines
        .filter(|(_, l)| !l.is_empty())
        .map(|(i, line)| {
            let err = |m: &str| Error::Parse {
                location: format!("line {}", i + 1),
                message: m.into(),
            };
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 9 {
                return Err(err("expected 9 fields"));
            }
            let num = |s: &str| s.parse::<f64>().map_err(|_| err("bad number"));
            let ue_est = match (f[3], f[4]) {
                ("", "") => None,
                (x, y) => Some(Vec2::new(num(x)?, num(y)?)),
            };
            Ok(RunRecord {
                t_s: num(f[0])?,
                ue_true: Vec2::new(num(f[1])?, num(f[2])?),
                ue_est,
                los: f[5].parse().map_err(|_| err("bad boolean"))?,
                method: AlignMethod::from_name(f[6]).ok_or_else(|| err("unknown method"))?,
                beam_index: f[7].parse().map_err(|_| err("bad beam index"))?,
                ue_rss_db: num(f[8])?,
                ckm_fallback: false,
            })
        })
        .collect()
}

pub fn construction_log_csv(records: &[CellRecord]) -> String {
    let mut s = String::from(CONSTRUCTION_LOG_HEADER);
    s.push('\n');
    for r in records {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            r.ix,
            r.iy,
            f6(r.true_xy.x),
            f6(r.true_xy.y),
            r.los,
            r.source.name(),
            opt(r.est_xy, |p| f6(p.x)),
            opt(r.est_xy, |p| f6(p.y)),
            opt(r.stored_in, |c| c.0.to_string()),
            opt(r.stored_in, |c| c.1.to_string()),
            opt(r.best_beam, |b| b.to_string()),
            opt(r.best_rss_db, f6)
        );
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn run_log_round_trip() {
        let recs = vec![
            RunRecord {
                t_s: 0.1,
                ue_true: Vec2::new(0.05, 5.6),
                ue_est: Some(Vec2::new(0.1, 5.55)),
                los: true,
                method: AlignMethod::LocationBased,
                beam_index: 3,
                ue_rss_db: -78.25,
                ckm_fallback: false,
            },
            RunRecord {
                t_s: 0.2,
                ue_true: Vec2::new(0.1, 5.6),
                ue_est: None,
                los: false,
                method: AlignMethod::CkmBased,
                beam_index: 60,
                ue_rss_db: -90.5,
                ckm_fallback: false,
            },
        ];
        let text = run_log_csv(&recs);
        assert!(text.contains("\n0.200000,0.100000,5.600000,,,false,ckm_based,60,-90.500000\n"));
        assert_eq!(parse_run_log(&text).unwrap(), recs);
        assert!(parse_run_log("t_s\n").is_err());
    }
}
