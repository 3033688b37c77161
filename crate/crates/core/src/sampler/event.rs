//! Detection events and their text file format.
//!
//! ```text
//! # tr-boson events v1
//! # config_hash = 3f0c…
//! event_id,batch_id,port1,t1_ns,port2,t2_ns,port3,t3_ns,flags
//! 0,0,1,41.625,2,17.0625,3,88.5,0
//! ```
//!
//! Records are written in port order. `flags` is a bit set; bit 0 marks an
//! event that contains at least one contamination photon.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

const MAGIC: &str = "# tr-boson events v1";
const COLUMNS: &str = "event_id,batch_id,port1,t1_ns,port2,t2_ns,port3,t3_ns,flags";
pub const FLAG_CONTAMINATED: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Record {
    /// 1-based output port.
    pub port: usize,
    /// ns
    pub time: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DetectionEvent {
    /// Position in the emitted sequence.
    pub event_id: u64,
    /// Preparation trial that produced the event.
    pub batch_id: u64,
    pub records: Vec<Record>,
    /// Truth tag: a contamination photon was detected.
    pub contaminated: bool,
}

impl DetectionEvent {
    pub fn new(event_id: u64, batch_id: u64, mut records: Vec<Record>, contaminated: bool) -> Self {
        records.sort_by(|a, b| a.port.cmp(&b.port).then(a.time.total_cmp(&b.time)));
        Self { event_id, batch_id, records, contaminated }
    }

    /// Convenience constructor for a one-per-port threefold event.
    pub fn threefold(event_id: u64, times: [f64; 3]) -> Self {
        let records = times.iter().enumerate().map(|(k, &time)| Record { port: k + 1, time }).collect();
        Self::new(event_id, event_id, records, false)
    }

    /// Exactly one record on each of ports 1, 2 and 3.
    pub fn is_threefold(&self) -> bool {
        self.records.len() == 3 && self.records.iter().enumerate().all(|(k, r)| r.port == k + 1)
    }

    /// `(t₁, t₂, t₃)` of a threefold event.
    pub fn times(&self) -> Option<[f64; 3]> {
        self.is_threefold().then(|| [self.records[0].time, self.records[1].time, self.records[2].time])
    }

    /// Landscape coordinates `(t₁ − t₃, t₂ − t₃)`.
    pub fn differences(&self) -> Option<(f64, f64)> {
        self.times().map(|t| (t[0] - t[2], t[1] - t[2]))
    }

    pub fn flags(&self) -> u32 {
        if self.contaminated {
            FLAG_CONTAMINATED
        } else {
            0
        }
    }
}

pub fn events_to_text(events: &[DetectionEvent], config_hash: Option<&str>) -> Result<String> {
    let mut out = String::new();
    writeln!(out, "{MAGIC}").unwrap();
    writeln!(out, "# config_hash = {}", config_hash.unwrap_or("none")).unwrap();
    writeln!(out, "{COLUMNS}").unwrap();
    for e in events {
        let t = e.times().ok_or_else(|| {
            Error::Sampler(format!("event {} is not a one-per-port threefold event", e.event_id))
        })?;
        writeln!(out, "{},{},1,{},2,{},3,{},{}", e.event_id, e.batch_id, t[0], t[1], t[2], e.flags()).unwrap();
    }
    Ok(out)
}

pub fn write_events(path: &Path, events: &[DetectionEvent], config_hash: Option<&str>) -> Result<()> {
    let text = events_to_text(events, config_hash)?;
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Parses an event file; returns the events and the recorded config hash.
pub fn parse_events(text: &str, origin: &str) -> Result<(Vec<DetectionEvent>, Option<String>)> {
    let err = |line: usize, msg: String| Error::Parse { path: origin.to_string(), line, msg };
    let mut hash = None;
    let mut events = Vec::new();
    let mut seen_magic = false;
    for (k, line) in text.lines().enumerate() {
        let line_no = k + 1;
        let trimmed = line.trim();
        if k == 0 {
            if trimmed != MAGIC {
                return Err(err(1, "missing event file header".into()));
            }
            seen_magic = true;
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix('#') {
            if let Some((key, value)) = rest.split_once('=') {
                if key.trim() == "config_hash" && value.trim() != "none" {
                    hash = Some(value.trim().to_string());
                }
            }
            continue;
        }
        if trimmed.is_empty() || trimmed == COLUMNS {
            continue;
        }
        let f: Vec<&str> = trimmed.split(',').map(str::trim).collect();
        if f.len() != 9 {
            return Err(err(line_no, format!("expected 9 fields, found {}", f.len())));
        }
        let int = |s: &str, what: &str| s.parse::<u64>().map_err(|_| err(line_no, format!("bad {what} {s:?}")));
        let time = |s: &str| -> Result<f64> {
            let t: f64 = s.parse().map_err(|_| err(line_no, format!("bad time {s:?}")))?;
            if t.is_finite() {
                Ok(t)
            } else {
                Err(err(line_no, format!("non-finite time {s:?}")))
            }
        };
        let mut records = Vec::with_capacity(3);
        for c in 0..3 {
            let port = int(f[2 + 2 * c], "port")? as usize;
            if port == 0 {
                return Err(err(line_no, "ports are 1-based".into()));
            }
            records.push(Record { port, time: time(f[3 + 2 * c])? });
        }
        let flags = int(f[8], "flags")?;
        events.push(DetectionEvent::new(
            int(f[0], "event_id")?,
            int(f[1], "batch_id")?,
            records,
            flags & u64::from(FLAG_CONTAMINATED) != 0,
        ));
    }
    if !seen_magic {
        return Err(err(1, "empty event file".into()));
    }
    Ok((events, hash))
}

pub fn read_events(path: &Path) -> Result<(Vec<DetectionEvent>, Option<String>)> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_events(&text, &path.display().to_string())
}
