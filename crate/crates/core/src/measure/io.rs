//! Measure files: one atom per record as `(y, phi, mass)`.
//!
//! CSV carries the header `y,phi,mass`; JSON is a bare array of
//! `[y, phi, mass]` triples. Readers reject non-finite values and
//! nonpositive masses.

use std::io::{Read, Write};

use super::{AtomicMeasure, LogPolarAtom};
use crate::fmt::float17;
use crate::{Error, Result};

pub fn write_measure_csv<W: Write>(mu: &AtomicMeasure, out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    let io = |e: csv::Error| Error::invalid(format!("write failed: {e}"));
    w.write_record(["y", "phi", "mass"]).map_err(io)?;
    for a in mu.atoms() {
        w.write_record([float17(a.y), float17(a.phi), float17(a.mass)])
            .map_err(io)?;
    }
    w.flush()
        .map_err(|e| Error::invalid(format!("write failed: {e}")))
}

pub fn read_measure_csv<R: Read>(input: R) -> Result<AtomicMeasure> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(input);
    let header = r.headers().map_err(|e| Error::parse(0, e.to_string()))?;
    if header.iter().map(str::trim).ne(["y", "phi", "mass"]) {
        return Err(Error::parse(0, "expected header y,phi,mass"));
    }
    let mut atoms = Vec::new();
    for (idx, rec) in r.records().enumerate() {
        let line = idx + 1;
        let rec = rec.map_err(|e| Error::parse(line, e.to_string()))?;
        if rec.len() != 3 {
            return Err(Error::parse(
                line,
                format!("expected 3 fields, got {}", rec.len()),
            ));
        }
        let mut v = [0.0; 3];
        for (slot, field) in v.iter_mut().zip(rec.iter()) {
            *slot = field
                .trim()
                .parse()
                .map_err(|_| Error::parse(line, format!("not a number: {field:?}")))?;
        }
        atoms.push(checked_atom(line, v)?);
    }
    Ok(AtomicMeasure::canonical(atoms))
}

pub fn write_measure_json<W: Write>(mu: &AtomicMeasure, mut out: W) -> Result<()> {
    let triples: Vec<[f64; 3]> = mu.atoms().iter().map(|a| [a.y, a.phi, a.mass]).collect();
    serde_json::to_writer(&mut out, &triples)
        .map_err(|e| Error::invalid(format!("write failed: {e}")))?;
    out.write_all(b"\n")
        .map_err(|e| Error::invalid(format!("write failed: {e}")))
}

pub fn read_measure_json<R: Read>(input: R) -> Result<AtomicMeasure> {
    let triples: Vec<[f64; 3]> =
        serde_json::from_reader(input).map_err(|e| Error::parse(0, e.to_string()))?;
    let atoms = triples
        .into_iter()
        .enumerate()
        .map(|(idx, v)| checked_atom(idx + 1, v))
        .collect::<Result<Vec<_>>>()?;
    Ok(AtomicMeasure::canonical(atoms))
}

fn checked_atom(record: usize, [y, phi, mass]: [f64; 3]) -> Result<LogPolarAtom> {
    LogPolarAtom::new(y, phi, mass).map_err(|e| match e {
        Error::InvalidInput(msg) => Error::parse(record, msg),
        other => other,
    })
}
