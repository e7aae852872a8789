//! Spectrum CSV files.
//!
//! Numbers are written with 17 significant digits so a read-back is
//! bit-identical; missing envelope values are empty cells.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use super::{SpectraError, SpectrumRecord};

pub const CSV_HEADER: [&str; 6] = [
    "x",
    "p",
    "excess_loss",
    "sigma01_abs",
    "p_min_envelope",
    "sigma01_max_envelope",
];

fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt).unwrap_or_default()
}

pub fn write_csv_to<W: Write>(records: &[SpectrumRecord], out: W) -> Result<(), SpectraError> {
    if records.is_empty() {
        return Err(SpectraError::Empty);
    }
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    writer.write_record(CSV_HEADER)?;
    for r in records {
        writer.write_record([
            fmt(r.x),
            fmt(r.p),
            fmt(r.excess_loss),
            fmt(r.sigma01_abs),
            fmt_opt(r.p_min_envelope),
            fmt_opt(r.sigma01_max_envelope),
        ])?;
    }
    writer.flush()?;
    Ok(())
}

pub fn write_csv(records: &[SpectrumRecord], path: &Path) -> Result<(), SpectraError> {
    write_csv_to(records, File::create(path)?)
}

fn parse(cell: &str, line: u64) -> Result<f64, SpectraError> {
    cell.parse()
        .map_err(|_| SpectraError::Parse(format!("line {line}: '{cell}' is not a number")))
}

fn parse_opt(cell: &str, line: u64) -> Result<Option<f64>, SpectraError> {
    if cell.is_empty() {
        Ok(None)
    } else {
        parse(cell, line).map(Some)
    }
}

pub fn read_csv_from<R: Read>(input: R) -> Result<Vec<SpectrumRecord>, SpectraError> {
    let mut reader = csv::Reader::from_reader(input);
    let header = reader.headers()?.clone();
    if header.iter().ne(CSV_HEADER) {
        return Err(SpectraError::Parse(format!("unexpected header {header:?}")));
    }
    let mut records = Vec::new();
    for row in reader.records() {
        let row = row?;
        let line = row.position().map_or(0, |p| p.line());
        if row.len() != CSV_HEADER.len() {
            return Err(SpectraError::Parse(format!(
                "line {line}: expected {} cells, found {}",
                CSV_HEADER.len(),
                row.len()
            )));
        }
        records.push(SpectrumRecord {
            x: parse(&row[0], line)?,
            p: parse(&row[1], line)?,
            excess_loss: parse(&row[2], line)?,
            sigma01_abs: parse(&row[3], line)?,
            p_min_envelope: parse_opt(&row[4], line)?,
            sigma01_max_envelope: parse_opt(&row[5], line)?,
        });
    }
    Ok(records)
}

pub fn read_csv(path: &Path) -> Result<Vec<SpectrumRecord>, SpectraError> {
    read_csv_from(File::open(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(x: f64, env: bool) -> SpectrumRecord {
        SpectrumRecord {
            x,
            p: 0.1 + x / 3.0,
            excess_loss: 1e-17 * x,
            sigma01_abs: std::f64::consts::PI * x,
            p_min_envelope: env.then_some(x.sqrt()),
            sigma01_max_envelope: env.then_some(1.0 / 7.0),
        }
    }

    #[test]
    fn single_record_without_envelope() {
        let mut buf = Vec::new();
        write_csv_to(&[record(0.5, false)], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[0], "x,p,excess_loss,sigma01_abs,p_min_envelope,sigma01_max_envelope");
        assert!(lines[1].ends_with(",,"));
        assert!(!text.contains('\r'));
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let recs: Vec<_> = (0..50).map(|i| record(i as f64 * 0.037, i % 3 != 0)).collect();
        let mut buf = Vec::new();
        write_csv_to(&recs, &mut buf).unwrap();
        let back = read_csv_from(buf.as_slice()).unwrap();
        assert_eq!(back.len(), recs.len());
        for (a, b) in recs.iter().zip(&back) {
            assert_eq!(a.x.to_bits(), b.x.to_bits());
            assert_eq!(a.p.to_bits(), b.p.to_bits());
            assert_eq!(a.excess_loss.to_bits(), b.excess_loss.to_bits());
            assert_eq!(a.sigma01_abs.to_bits(), b.sigma01_abs.to_bits());
            assert_eq!(a.p_min_envelope.map(f64::to_bits), b.p_min_envelope.map(f64::to_bits));
        }
    }

    #[test]
    fn empty_input_is_rejected() {
        assert!(matches!(write_csv_to(&[], Vec::new()), Err(SpectraError::Empty)));
        assert!(read_csv_from("a,b\n1,2\n".as_bytes()).is_err());
    }
}
