use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::geometry::RateRegion;
use super::types::{ChannelConfig, Snr};
use crate::error::Result;

/// The four SNRs of a configuration in dB.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SnrDb {
    pub snr_r1: f64,
    pub snr_r2: f64,
    pub snr_1r: f64,
    pub snr_2r: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstraintRecord {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

/// JSON form of a region:
/// `{kind, p, snr_db: {...}, constraints: [{a, b, c}], vertices: [[r1, r2], ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionRecord {
    pub kind: String,
    pub p: f64,
    pub snr_db: SnrDb,
    pub constraints: Vec<ConstraintRecord>,
    pub vertices: Vec<[f64; 2]>,
}

fn db(x: f64) -> f64 {
    Snr::new(x).map(Snr::db).unwrap_or(f64::NAN)
}

impl RegionRecord {
    pub fn new(cfg: &ChannelConfig, region: &RateRegion) -> Result<Self> {
        Ok(Self {
            kind: region.kind().label(),
            p: cfg.p(),
            snr_db: SnrDb {
                snr_r1: db(cfg.snr_r1()),
                snr_r2: db(cfg.snr_r2()),
                snr_1r: db(cfg.snr_1r()),
                snr_2r: db(cfg.snr_2r()),
            },
            constraints: region
                .constraints()
                .iter()
                .map(|h| ConstraintRecord {
                    a: h.a(),
                    b: h.b(),
                    c: h.c(),
                })
                .collect(),
            vertices: region
                .vertices()?
                .into_iter()
                .map(|v| [v.r1, v.r2])
                .collect(),
        })
    }
}

/// Two-column `r1,r2` CSV of the vertices, with a header row.
pub fn vertices_csv(region: &RateRegion) -> Result<String> {
    let mut out = String::from("r1,r2\n");
    for v in region.vertices()? {
        writeln!(out, "{},{}", v.r1, v.r2).expect("writing to a String");
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::regions::{dl_outer_delayed, ChannelConfig};

    #[test]
    fn record_shape() {
        let cfg = ChannelConfig::reference();
        let rec = RegionRecord::new(&cfg, &dl_outer_delayed(&cfg)).unwrap();
        let json = serde_json::to_value(&rec).unwrap();
        assert_eq!(json["kind"], "dl_out_d");
        assert_eq!(json["constraints"].as_array().unwrap().len(), 3);
        assert!((json["snr_db"]["snr_2r"].as_f64().unwrap() - 30.0).abs() < 1e-9);
        assert_eq!(json["vertices"][0].as_array().unwrap().len(), 2);
        let back: RegionRecord = serde_json::from_value(json).unwrap();
        assert_eq!(back, rec);
    }

    #[test]
    fn csv_is_two_numeric_columns() {
        let cfg = ChannelConfig::reference();
        let csv = vertices_csv(&dl_outer_delayed(&cfg)).unwrap();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("r1,r2"));
        let rows: Vec<Vec<f64>> = lines
            .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
            .collect();
        assert_eq!(rows.len(), 5);
        assert!(rows.iter().all(|r| r.len() == 2));
    }
}
