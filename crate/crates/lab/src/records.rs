//! Per-call CSV rows. Optional columns are empty on blocked calls.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::simulator::{Algorithm, CallRecord, Outcome};
use crate::LabError;

pub const COLUMNS: [&str; 16] = [
    "topology",
    "vertices",
    "edges",
    "units",
    "mean_demand",
    "seed",
    "call_index",
    "utilization",
    "algorithm",
    "outcome",
    "cost",
    "level",
    "window_start",
    "window_width",
    "hops",
    "time_ns",
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CallRow {
    pub topology: String,
    pub vertices: u32,
    pub edges: u32,
    pub units: u32,
    /// Mean demand in units.
    pub mean_demand: u32,
    pub seed: u64,
    pub call_index: u64,
    pub utilization: f64,
    pub algorithm: Algorithm,
    pub outcome: Outcome,
    pub cost: Option<f64>,
    pub level: Option<u8>,
    pub window_start: Option<u32>,
    pub window_width: Option<u32>,
    pub hops: Option<u32>,
    pub time_ns: u64,
}

/// The columns shared by every row of one simulation.
#[derive(Clone, Debug, PartialEq)]
pub struct SimMeta {
    pub topology: String,
    pub vertices: u32,
    pub edges: u32,
    pub units: u32,
    pub mean_demand: u32,
    pub seed: u64,
}

impl SimMeta {
    pub fn row(&self, r: &CallRecord) -> CallRow {
        CallRow {
            topology: self.topology.clone(),
            vertices: self.vertices,
            edges: self.edges,
            units: self.units,
            mean_demand: self.mean_demand,
            seed: self.seed,
            call_index: r.call_index,
            utilization: r.utilization,
            algorithm: r.algorithm,
            outcome: r.outcome,
            cost: r.cost,
            level: r.level,
            window_start: r.window.map(|w| w.start),
            window_width: r.window.map(|w| w.width),
            hops: r.hops,
            time_ns: r.elapsed_ns,
        }
    }
}

pub fn write_rows<W: Write>(out: W, rows: &[CallRow]) -> Result<(), LabError> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(out);
    w.write_record(COLUMNS)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn read_rows<R: Read>(input: R) -> Result<Vec<CallRow>, LabError> {
    let mut rd = csv::Reader::from_reader(input);
    let headers = rd.headers()?.clone();
    if headers.iter().ne(COLUMNS) {
        return Err(LabError::Config(format!(
            "unexpected CSV header {:?}",
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    rd.deserialize()
        .map(|r| r.map_err(LabError::from))
        .collect()
}

pub fn save(path: &Path, rows: &[CallRow]) -> Result<(), LabError> {
    let f = File::create(path).map_err(LabError::io(path))?;
    write_rows(std::io::BufWriter::new(f), rows)
}

pub fn load(path: &Path) -> Result<Vec<CallRow>, LabError> {
    let f = File::open(path).map_err(LabError::io(path))?;
    read_rows(std::io::BufReader::new(f)).map_err(|e| match e {
        LabError::Csv(c) => LabError::Config(format!("{}: {c}", path.display())),
        other => other,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Vec<CallRow> {
        let meta = SimMeta {
            topology: "g25_0".into(),
            vertices: 25,
            edges: 40,
            units: 100,
            mean_demand: 10,
            seed: 3,
        };
        let accepted = CallRecord {
            call_index: 0,
            utilization: 0.1 + 0.2,
            algorithm: Algorithm::Generic,
            outcome: Outcome::Accepted,
            cost: Some(0.1234567890123456),
            level: Some(2),
            window: Some(eonpath::Window::new(4, 6)),
            hops: Some(3),
            elapsed_ns: 12345,
        };
        let blocked = CallRecord {
            call_index: 1,
            algorithm: Algorithm::Filtered,
            outcome: Outcome::Blocked,
            cost: None,
            level: None,
            window: None,
            hops: None,
            ..accepted.clone()
        };
        vec![meta.row(&accepted), meta.row(&blocked)]
    }

    #[test]
    fn header_and_blank_fields() {
        let mut buf = Vec::new();
        write_rows(&mut buf, &sample()).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), COLUMNS.join(","));
        lines.next();
        assert_eq!(
            lines.next().unwrap(),
            "g25_0,25,40,100,10,3,1,0.30000000000000004,filtered,blocked,,,,,,12345"
        );
    }

    #[test]
    fn round_trip_is_exact() {
        let rows = sample();
        let mut buf = Vec::new();
        write_rows(&mut buf, &rows).unwrap();
        assert_eq!(read_rows(buf.as_slice()).unwrap(), rows);
    }

    #[test]
    fn header_only_file_is_empty() {
        let mut buf = Vec::new();
        write_rows(&mut buf, &[]).unwrap();
        assert!(read_rows(buf.as_slice()).unwrap().is_empty());
    }

    #[test]
    fn wrong_header_is_rejected() {
        assert!(read_rows("a,b\n1,2\n".as_bytes()).is_err());
    }
}
