//! CSV tables with fixed column order.
//!
//! Floats use the shortest representation that parses back to the same bits,
//! so a table read back and rewritten is byte-identical.

use std::path::Path;

use csv::{ReaderBuilder, StringRecord, WriterBuilder};

use crate::error::{Error, Result};
use crate::lp::checks::CheckRow;
use crate::simulate::SimulationRecord;
use crate::twin::TwinRecord;
use crate::wavenumbers::DeterminingShell;

/// A row type with a fixed header.
pub trait CsvRow {
    fn header() -> &'static [&'static str];
    fn fields(&self) -> Vec<String>;
}

fn shell(q: DeterminingShell) -> String {
    q.to_string()
}

fn flag(ok: Option<bool>) -> String {
    match ok {
        Some(b) => b.to_string(),
        None => String::new(),
    }
}

/// Columns shared by every table that reports wavenumbers.
pub const WAVENUMBER_COLUMNS: &[&str] = &[
    "t",
    "Q_u",
    "Q_v",
    "Q_b",
    "Q_h",
    "Lambda_uv",
    "Lambda_bh",
    "linf_grad_b",
    "pointwise_ok",
    "margin",
];

impl CsvRow for TwinRecord {
    fn header() -> &'static [&'static str] {
        &[
            "t",
            "w_l2",
            "m_l2",
            "grad_w_l2",
            "grad_m_l2",
            "rate",
            "Q_u",
            "Q_v",
            "Q_b",
            "Q_h",
            "Lambda_uv",
            "Lambda_bh",
            "linf_grad_b",
            "pointwise_ok",
            "margin",
        ]
    }

    fn fields(&self) -> Vec<String> {
        vec![
            self.t.to_string(),
            self.w_l2.to_string(),
            self.m_l2.to_string(),
            self.grad_w_l2.to_string(),
            self.grad_m_l2.to_string(),
            self.rate.to_string(),
            shell(self.q_u),
            shell(self.q_v),
            shell(self.q_b),
            shell(self.q_h),
            self.lambda_uv.to_string(),
            self.lambda_bh.to_string(),
            self.linf_grad_b.to_string(),
            flag(self.pointwise_ok),
            self.margin.to_string(),
        ]
    }
}

impl CsvRow for SimulationRecord {
    fn header() -> &'static [&'static str] {
        &[
            "t",
            "E_u",
            "E_b",
            "D_u",
            "D_b",
            "Q_u",
            "Q_b",
            "Lambda_u",
            "Lambda_b",
            "linf_grad_b",
            "pointwise_ok",
            "margin",
        ]
    }

    fn fields(&self) -> Vec<String> {
        let e = &self.energy;
        vec![
            e.t.to_string(),
            e.e_u.to_string(),
            e.e_b.to_string(),
            e.d_u.to_string(),
            e.d_b.to_string(),
            shell(self.q_u),
            shell(self.q_b),
            self.q_u.lambda().to_string(),
            self.q_b.lambda().to_string(),
            e.linf_grad_b.to_string(),
            flag(self.pointwise_ok),
            self.margin.to_string(),
        ]
    }
}

impl CsvRow for CheckRow {
    fn header() -> &'static [&'static str] {
        &["name", "measured", "threshold", "pass"]
    }

    fn fields(&self) -> Vec<String> {
        vec![
            self.name.clone(),
            self.measured.to_string(),
            self.threshold.to_string(),
            self.pass.to_string(),
        ]
    }
}

/// Writes `prefix` (raw rows kept from an earlier run) followed by `rows`.
pub fn write_csv<R: CsvRow>(path: impl AsRef<Path>, prefix: &[StringRecord], rows: &[R]) -> Result<()> {
    let path = path.as_ref();
    let mut w = WriterBuilder::new()
        .from_path(path)
        .map_err(|e| map_open(path, e))?;
    w.write_record(R::header())?;
    for r in prefix {
        w.write_record(r)?;
    }
    for r in rows {
        w.write_record(r.fields())?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Data rows of a table written by [`write_csv`]; the header must match `R`.
pub fn read_csv_rows<R: CsvRow>(path: impl AsRef<Path>) -> Result<Vec<StringRecord>> {
    let path = path.as_ref();
    let mut r = ReaderBuilder::new()
        .from_path(path)
        .map_err(|e| map_open(path, e))?;
    let header = r.headers()?.clone();
    if header.iter().ne(R::header().iter().copied()) {
        return Err(Error::Snapshot(format!("{} has an unexpected header", path.display())));
    }
    r.records().map(|rec| rec.map_err(Error::from)).collect()
}

fn map_open(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::Snapshot(format!("{}: {other:?}", path.display())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn check_rows_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.csv");
        let rows = vec![
            CheckRow {
                name: "a".into(),
                measured: 0.1 + 0.2,
                threshold: 1e-12,
                pass: false,
            },
            CheckRow {
                name: "b".into(),
                measured: f64::INFINITY,
                threshold: 2.0,
                pass: true,
            },
        ];
        write_csv(&path, &[], &rows).unwrap();
        let back = read_csv_rows::<CheckRow>(&path).unwrap();
        assert_eq!(back.len(), 2);
        assert_eq!(back[0][1].parse::<f64>().unwrap(), 0.1 + 0.2);
        assert_eq!(&back[1][1], "inf");
        let first = std::fs::read(&path).unwrap();
        write_csv::<CheckRow>(&path, &back, &[]).unwrap();
        assert_eq!(std::fs::read(&path).unwrap(), first);
    }
}
