//! Cylinder measure files.
//!
//! JSON: `{"angles", "densities", "dy", "rho", "y_max", "y_min"}` with keys in
//! that (lexicographic) order and one density array per ray. CSV: long form
//! with header `ray_index,phi,y,h`, rays in order and y ascending within a
//! ray. The CSV carries neither `δy` nor `ρ`, so its reader takes both.

use std::io::{Read, Write};

use serde::Deserialize;
use serde_json::json;

use super::kernel::YGrid;
use super::CylinderMeasure;
use crate::fmt::float17;
use crate::{Error, Result};

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCylinder {
    angles: Vec<f64>,
    densities: Vec<Vec<f64>>,
    dy: f64,
    rho: f64,
    y_max: f64,
    y_min: f64,
}

fn write_failed(e: impl std::fmt::Display) -> Error {
    Error::invalid(format!("write failed: {e}"))
}

pub fn write_cylinder_json<W: Write>(nu: &CylinderMeasure, mut out: W) -> Result<()> {
    let g = nu.grid();
    let value = json!({
        "angles": nu.angles(),
        "densities": nu.densities(),
        "dy": g.dy(),
        "rho": nu.rho(),
        "y_max": g.y_max(),
        "y_min": g.y_min(),
    });
    serde_json::to_writer(&mut out, &value).map_err(write_failed)?;
    out.write_all(b"\n").map_err(write_failed)
}

pub fn read_cylinder_json<R: Read>(input: R) -> Result<CylinderMeasure> {
    let raw: RawCylinder =
        serde_json::from_reader(input).map_err(|e| Error::parse(0, e.to_string()))?;
    let grid = YGrid::new(raw.y_min, raw.y_max, raw.dy).map_err(as_parse(0))?;
    CylinderMeasure::new(raw.angles, grid, raw.densities, raw.rho).map_err(as_parse(0))
}

fn as_parse(record: usize) -> impl Fn(Error) -> Error {
    move |e| match e {
        Error::InvalidInput(msg) => Error::parse(record, msg),
        other => other,
    }
}

pub fn write_cylinder_csv<W: Write>(nu: &CylinderMeasure, out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(["ray_index", "phi", "y", "h"])
        .map_err(write_failed)?;
    let g = nu.grid();
    for (i, (phi, row)) in nu.angles().iter().zip(nu.densities()).enumerate() {
        for (j, h) in row.iter().enumerate() {
            w.write_record([i.to_string(), float17(*phi), float17(g.y(j)), float17(*h)])
                .map_err(write_failed)?;
        }
    }
    w.flush().map_err(write_failed)
}

pub fn read_cylinder_csv<R: Read>(input: R, dy: f64, rho: f64) -> Result<CylinderMeasure> {
    if !(dy > 0.0) || !dy.is_finite() {
        return Err(Error::invalid("dy must be positive"));
    }
    let mut r = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(input);
    let header = r.headers().map_err(|e| Error::parse(0, e.to_string()))?;
    if header
        .iter()
        .map(str::trim)
        .ne(["ray_index", "phi", "y", "h"])
    {
        return Err(Error::parse(0, "expected header ray_index,phi,y,h"));
    }
    let mut angles: Vec<f64> = Vec::new();
    let mut densities: Vec<Vec<f64>> = Vec::new();
    let mut starts: Vec<i64> = Vec::new();
    for (idx, rec) in r.records().enumerate() {
        let line = idx + 1;
        let rec = rec.map_err(|e| Error::parse(line, e.to_string()))?;
        if rec.len() != 4 {
            return Err(Error::parse(
                line,
                format!("expected 4 fields, got {}", rec.len()),
            ));
        }
        let ray: usize = rec[0]
            .trim()
            .parse()
            .map_err(|_| Error::parse(line, format!("bad ray index {:?}", &rec[0])))?;
        let mut v = [0.0; 3];
        for (slot, field) in v.iter_mut().zip(rec.iter().skip(1)) {
            *slot = field
                .trim()
                .parse()
                .map_err(|_| Error::parse(line, format!("not a number: {field:?}")))?;
        }
        let [phi, y, h] = v;
        let step = YGrid::new(y, y, dy).map_err(as_parse(line))?.start();
        if ray == densities.len() {
            angles.push(phi);
            densities.push(vec![h]);
            starts.push(step);
        } else if ray + 1 == densities.len() {
            if angles[ray] != phi {
                return Err(Error::parse(line, "phi changes within a ray"));
            }
            let expected = starts[ray] + densities[ray].len() as i64;
            if step != expected {
                return Err(Error::parse(line, "y values must step by dy within a ray"));
            }
            densities[ray].push(h);
        } else {
            return Err(Error::parse(line, "rays must appear in order 0, 1, 2, …"));
        }
    }
    let Some(&start) = starts.first() else {
        return Err(Error::parse(0, "no records"));
    };
    if starts.iter().any(|&s| s != start) {
        return Err(Error::parse(0, "rays use different y grids"));
    }
    let grid = YGrid::from_indices(start, densities[0].len(), dy).map_err(as_parse(0))?;
    CylinderMeasure::new(angles, grid, densities, rho).map_err(as_parse(0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> CylinderMeasure {
        let grid = YGrid::new(-0.1, 0.1, 0.05).unwrap();
        CylinderMeasure::new(
            vec![0.0, 2.5],
            grid,
            vec![
                vec![0.1, 0.2, 0.3, 0.2, 0.1],
                vec![0.0, 1e-20, 0.5, 1.0 / 3.0, 0.25],
            ],
            1.0,
        )
        .unwrap()
    }

    #[test]
    fn json_keys_sorted_and_round_trip() {
        let mut buf = Vec::new();
        write_cylinder_json(&sample(), &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        let keys = [
            "\"angles\"",
            "\"densities\"",
            "\"dy\"",
            "\"rho\"",
            "\"y_max\"",
            "\"y_min\"",
        ];
        let pos: Vec<usize> = keys.iter().map(|k| text.find(k).unwrap()).collect();
        assert!(pos.windows(2).all(|w| w[0] < w[1]), "{text}");
        assert_eq!(read_cylinder_json(buf.as_slice()).unwrap(), sample());
    }

    #[test]
    fn csv_round_trip() {
        let mut buf = Vec::new();
        write_cylinder_csv(&sample(), &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("ray_index,phi,y,h\n0,"));
        assert_eq!(text.lines().count(), 11);
        assert_eq!(
            read_cylinder_csv(buf.as_slice(), 0.05, 1.0).unwrap(),
            sample()
        );
    }

    #[test]
    fn readers_reject_malformed_input() {
        for body in [
            "{}",
            r#"{"angles":[0],"densities":[[1]],"dy":0.1,"rho":1,"y_max":0,"y_min":0,"x":1}"#,
            r#"{"angles":[0],"densities":[[1,2]],"dy":0.1,"rho":1,"y_max":0,"y_min":0}"#,
            r#"{"angles":[0],"densities":[[-1]],"dy":0.1,"rho":1,"y_max":0,"y_min":0}"#,
            r#"{"angles":[0],"densities":[[1]],"dy":0.1,"rho":1,"y_max":0,"y_min":0.05}"#,
        ] {
            assert!(read_cylinder_json(body.as_bytes()).is_err(), "{body}");
        }
        for body in [
            "ray_index,phi,y,h\n",
            "ray,phi,y,h\n0,0,0,1\n",
            "ray_index,phi,y,h\n1,0,0,1\n",
            "ray_index,phi,y,h\n0,0,0,1\n0,0,0.1,1\n",
            "ray_index,phi,y,h\n0,0,0,1\n0,1,0.05,1\n",
            "ray_index,phi,y,h\n0,0,0,1\n1,1,0.05,1\n",
        ] {
            assert!(
                read_cylinder_csv(body.as_bytes(), 0.05, 1.0).is_err(),
                "{body:?}"
            );
        }
    }
}
