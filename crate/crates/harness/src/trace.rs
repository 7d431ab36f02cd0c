//! Trace CSV files: one header row, then one 30-column row per logged sample.
//!
//! Values are written with Rust's shortest round-trip `f64` formatting, so
//! reading a file back reproduces every value bit for bit.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use geo_smc_core::sim::{Metrics, SimRecord};
use geo_smc_core::Vector4;
use nalgebra::Vector3;
use thiserror::Error;

pub const COLUMNS: [&str; 30] = [
    "t", "q0", "q1", "q2", "q3", "omega_x", "omega_y", "omega_z", "qd0", "qd1", "qd2", "qd3",
    "omegad_x", "omegad_y", "omegad_z", "qe0", "qe1", "qe2", "qe3", "s0", "s1", "s2", "s3",
    "tau_x", "tau_y", "tau_z", "err_norm", "s_norm", "tau_norm", "energy",
];

#[derive(Debug, Error)]
pub enum TraceError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}: {source}", path.display())]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
    #[error("{}: {message}", path.display())]
    Schema { path: PathBuf, message: String },
}

/// `trace_<scenario>_<controller>.csv`.
pub fn trace_file_name(scenario: &str, controller: &str) -> String {
    format!("trace_{scenario}_{controller}.csv")
}

fn row(r: &SimRecord) -> [f64; 30] {
    let mut out = [0.0; 30];
    let mut it = out.iter_mut();
    let mut put = |vals: &[f64]| {
        for v in vals {
            *it.next().expect("30 columns") = *v;
        }
    };
    put(&[r.t]);
    put(r.q.as_slice());
    put(r.omega.as_slice());
    put(r.qd.as_slice());
    put(r.omegad.as_slice());
    put(r.qe.as_slice());
    put(r.s.as_slice());
    put(r.tau.as_slice());
    put(&[r.metrics.err_norm, r.metrics.s_norm, r.metrics.tau_norm, r.metrics.energy]);
    out
}

fn record(v: &[f64; 30]) -> SimRecord {
    let v4 = |i: usize| Vector4::from_column_slice(&v[i..i + 4]);
    let v3 = |i: usize| Vector3::from_column_slice(&v[i..i + 3]);
    SimRecord {
        t: v[0],
        q: v4(1),
        omega: v3(5),
        qd: v4(8),
        omegad: v3(12),
        qe: v4(15),
        s: v4(19),
        tau: v3(23),
        metrics: Metrics {
            err_norm: v[26],
            s_norm: v[27],
            tau_norm: v[28],
            energy: v[29],
        },
    }
}

/// Writes the trace as CSV to any sink.
pub fn write_trace<W: Write>(records: &[SimRecord], sink: W) -> csv::Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(sink);
    w.write_record(COLUMNS)?;
    let mut fields = Vec::with_capacity(30);
    for r in records {
        fields.clear();
        fields.extend(row(r).iter().map(|v| v.to_string()));
        w.write_record(&fields)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_trace_csv(records: &[SimRecord], path: &Path) -> Result<(), TraceError> {
    let file = File::create(path).map_err(|source| TraceError::Io {
        path: path.to_owned(),
        source,
    })?;
    write_trace(records, BufWriter::new(file)).map_err(|source| TraceError::Csv {
        path: path.to_owned(),
        source,
    })
}

/// Parses a trace, checking the header and the column count of every row.
pub fn read_trace<R: Read>(source: R) -> Result<Vec<SimRecord>, String> {
    let mut rd = csv::ReaderBuilder::new().flexible(true).from_reader(source);
    let header = rd.headers().map_err(|e| e.to_string())?;
    if header.iter().ne(COLUMNS.iter().copied()) {
        return Err(format!("unexpected header: {}", header.iter().collect::<Vec<_>>().join(",")));
    }
    let mut out = Vec::new();
    for (i, rec) in rd.records().enumerate() {
        let rec = rec.map_err(|e| e.to_string())?;
        if rec.len() != COLUMNS.len() {
            return Err(format!("row {} has {} columns, expected 30", i + 1, rec.len()));
        }
        let mut v = [0.0; 30];
        for (slot, field) in v.iter_mut().zip(rec.iter()) {
            *slot = field
                .parse()
                .map_err(|_| format!("row {}: `{field}` is not a number", i + 1))?;
        }
        out.push(record(&v));
    }
    Ok(out)
}

pub fn read_trace_csv(path: &Path) -> Result<Vec<SimRecord>, TraceError> {
    let file = File::open(path).map_err(|source| TraceError::Io {
        path: path.to_owned(),
        source,
    })?;
    read_trace(file).map_err(|message| TraceError::Schema {
        path: path.to_owned(),
        message,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use geo_smc_core::control::ControllerRegistry;
    use geo_smc_core::sim::{run_scenario, Scenario, SimConfig};

    fn sample_trace() -> Vec<SimRecord> {
        let cfg = SimConfig {
            t_end: 0.5,
            ..SimConfig::for_scenario(Scenario::Noisy, "geometric")
        };
        run_scenario(&cfg, &ControllerRegistry::builtin()).unwrap().records
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let records = sample_trace();
        let mut buf = Vec::new();
        write_trace(&records, &mut buf).unwrap();
        let back = read_trace(buf.as_slice()).unwrap();
        assert_eq!(back.len(), records.len());
        for (a, b) in records.iter().zip(&back) {
            for (x, y) in row(a).iter().zip(row(b).iter()) {
                assert_eq!(x.to_bits(), y.to_bits());
            }
        }
    }

    #[test]
    fn layout() {
        let records = sample_trace();
        let mut buf = Vec::new();
        write_trace(&records, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(!text.contains('\r'));
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), records.len() + 1);
        assert_eq!(lines[0], COLUMNS.join(","));
        for l in &lines {
            assert_eq!(l.split(',').count(), 30);
        }
        // first row carries the initial conditions
        let first = read_trace(text.as_bytes()).unwrap()[0];
        assert_eq!(first.t, 0.0);
        assert_eq!(first.q, records[0].q);
        assert_eq!(first.omega, Vector3::zeros());
    }

    #[test]
    fn schema_errors() {
        assert!(read_trace("a,b\n1,2\n".as_bytes()).is_err());
        let mut bad = COLUMNS.join(",");
        bad.push_str("\n1,2,3\n");
        assert!(read_trace(bad.as_bytes()).unwrap_err().contains("columns"));
        let mut nan = COLUMNS.join(",");
        nan.push('\n');
        nan.push_str(&["x"; 30].join(","));
        assert!(read_trace(nan.as_bytes()).unwrap_err().contains("not a number"));
    }

    #[test]
    fn file_name() {
        assert_eq!(trace_file_name("ideal", "geometric"), "trace_ideal_geometric.csv");
    }
}
