use std::io::Read;

use serde::{Deserialize, Serialize};

use super::{compose_d3d, geodesic_distance, PipelineError};
use crate::channel::{noise_term_db, LinkGeometry, RadioConfig};
use crate::defaults;

/// Input log layouts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LogSchema {
    /// `timestamp_s,d3d_m,h_m,rssi_dbm,snr_db`
    Range,
    /// `timestamp_s,lat_deg,lon_deg,rssi_dbm,snr_db` plus a [`GeoSidecar`].
    Geo,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Position {
    Range { d3d_m: f64 },
    Geo { lat_deg: f64, lon_deg: f64 },
}

/// Hover point of the UAV for geo-schema logs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeoSidecar {
    pub uav_lat_deg: f64,
    pub uav_lon_deg: f64,
    pub h_m: f64,
    #[serde(default = "default_rx_height")]
    pub h_rx_m: f64,
}

fn default_rx_height() -> f64 {
    defaults::RX_HEIGHT_M
}

/// One line of a receiver log.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RawLogRecord {
    pub timestamp_s: f64,
    pub position: Position,
    pub h_m: f64,
    pub rssi_dbm: f64,
    pub snr_db: f64,
}

impl RawLogRecord {
    /// Geometry of the observation; geo records need the UAV anchor.
    pub fn geometry(&self, anchor: Option<&GeoSidecar>) -> Result<LinkGeometry, PipelineError> {
        let d3d = match self.position {
            Position::Range { d3d_m } => d3d_m,
            Position::Geo { lat_deg, lon_deg } => {
                let a = anchor.ok_or(PipelineError::MissingAnchor)?;
                let d2d = geodesic_distance(a.uav_lat_deg, a.uav_lon_deg, lat_deg, lon_deg)?;
                compose_d3d(d2d, self.h_m, a.h_rx_m)
            }
        };
        Ok(LinkGeometry::new(d3d, self.h_m)?)
    }
}

/// Instantaneous path loss from a logged RSSI/SNR pair:
/// `P_Tx + G_Tx + G_Rx + chi + 10 log10(1 + 1/SNR) - RSSI`, SNR taken from dB
/// to linear inside the noise term.
pub fn experimental_pl(record: &RawLogRecord, radio: &RadioConfig) -> Result<f64, PipelineError> {
    if record.rssi_dbm == 0.0 {
        return Err(PipelineError::SuspiciousRssi {
            timestamp_s: record.timestamp_s,
        });
    }
    Ok(radio.budget_db() + noise_term_db(record.snr_db) - record.rssi_dbm)
}

pub fn read_range_log<R: Read>(reader: R) -> Result<Vec<RawLogRecord>, PipelineError> {
    read_log(reader, &["timestamp_s", "d3d_m", "h_m", "rssi_dbm", "snr_db"], |v| {
        (Position::Range { d3d_m: v[1] }, v[2], v[3], v[4])
    })
}

/// Geo-schema log; every record takes its flying height from the sidecar.
pub fn read_geo_log<R: Read>(
    reader: R,
    sidecar: &GeoSidecar,
) -> Result<Vec<RawLogRecord>, PipelineError> {
    read_log(reader, &["timestamp_s", "lat_deg", "lon_deg", "rssi_dbm", "snr_db"], |v| {
        (
            Position::Geo {
                lat_deg: v[1],
                lon_deg: v[2],
            },
            sidecar.h_m,
            v[3],
            v[4],
        )
    })
}

fn read_log<R: Read>(
    reader: R,
    columns: &[&str; 5],
    build: impl Fn(&[f64; 5]) -> (Position, f64, f64, f64),
) -> Result<Vec<RawLogRecord>, PipelineError> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| PipelineError::Ingest { line: 1, reason: e.to_string() })?
        .clone();
    if headers.is_empty() {
        return Err(PipelineError::Empty);
    }
    // The reader sits at the start of the line after the header.
    let header_line = rdr.position().line().saturating_sub(1).max(1);
    let index: Vec<usize> = columns
        .iter()
        .map(|c| {
            headers.iter().position(|h| h == *c).ok_or_else(|| PipelineError::Ingest {
                line: header_line,
                reason: format!("missing column `{c}` (header: `{}`)", headers.iter().collect::<Vec<_>>().join(",")),
            })
        })
        .collect::<Result<_, _>>()?;

    let mut out = Vec::new();
    let mut last_t = f64::NEG_INFINITY;
    for rec in rdr.records() {
        let rec = rec.map_err(|e| PipelineError::Ingest {
            line: e.position().map_or(0, |p| p.line()),
            reason: e.to_string(),
        })?;
        let line = rec.position().map_or(0, |p| p.line());
        let mut v = [0.0; 5];
        for (k, (slot, &col)) in v.iter_mut().zip(&index).enumerate() {
            let field = rec.get(col).unwrap_or("");
            let parsed: f64 = field.parse().map_err(|_| PipelineError::Ingest {
                line,
                reason: format!("`{}`: cannot parse `{field}` as a number", columns[k]),
            })?;
            if !parsed.is_finite() {
                return Err(PipelineError::Ingest {
                    line,
                    reason: format!("`{}` is not finite", columns[k]),
                });
            }
            *slot = parsed;
        }
        let (position, h_m, rssi_dbm, snr_db) = build(&v);
        if !(-160.0..=0.0).contains(&rssi_dbm) {
            return Err(PipelineError::Ingest {
                line,
                reason: format!("rssi {rssi_dbm} dBm outside [-160, 0] dBm"),
            });
        }
        if v[0] < last_t {
            return Err(PipelineError::Ingest {
                line,
                reason: format!("timestamp {} s goes backwards (previous {last_t} s)", v[0]),
            });
        }
        last_t = v[0];
        out.push(RawLogRecord {
            timestamp_s: v[0],
            position,
            h_m,
            rssi_dbm,
            snr_db,
        });
    }
    if out.is_empty() {
        return Err(PipelineError::Empty);
    }
    Ok(out)
}
