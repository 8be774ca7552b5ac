//! Gridded wind samples stored as CSV with columns `x,y,z,wx,wy,wz`.
//!
//! Lines starting with `#` are comments. The samples must cover a full
//! regular grid; their order does not matter.

use std::io::{Read, Write};
use std::path::Path;

use wildfront_core::{Point3, Vec3, WindGrid};

use crate::Error;

pub const SCHEMA: &str = "wildfront.wind/1";

#[derive(Debug, serde::Deserialize, serde::Serialize)]
struct Row {
    x: f64,
    y: f64,
    z: f64,
    wx: f64,
    wy: f64,
    wz: f64,
}

pub fn parse_wind_grid(r: impl Read) -> Result<WindGrid, Error> {
    let mut rd = csv::ReaderBuilder::new().comment(Some(b'#')).trim(csv::Trim::All).from_reader(r);
    let mut rows = Vec::new();
    for rec in rd.deserialize() {
        let r: Row = rec?;
        rows.push((Point3::new(r.x, r.y, r.z), Vec3::new(r.wx, r.wy, r.wz)));
    }
    Ok(WindGrid::from_samples(&rows)?)
}

pub fn read_wind_grid(path: &Path) -> Result<WindGrid, Error> {
    let f = std::fs::File::open(path).map_err(|e| Error::Io { path: path.to_path_buf(), source: e })?;
    parse_wind_grid(std::io::BufReader::new(f))
}

/// Writes samples of `f` on the grid `origin + (i, j, k)·spacing`.
pub fn write_wind_grid(
    mut w: impl Write,
    origin: Point3,
    spacing: Vec3,
    dims: [usize; 3],
    f: impl Fn(Point3) -> Vec3,
) -> Result<(), Error> {
    writeln!(w, "# {SCHEMA}")?;
    let mut wr = csv::Writer::from_writer(w);
    for k in 0..dims[2] {
        for j in 0..dims[1] {
            for i in 0..dims[0] {
                let p = origin + Vec3::new(i as f64 * spacing.x, j as f64 * spacing.y, k as f64 * spacing.z);
                let v = f(p);
                wr.serialize(Row { x: p.x, y: p.y, z: p.z, wx: v.x, wy: v.y, wz: v.z })?;
            }
        }
    }
    wr.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn affine_field_round_trips_through_csv() {
        let f = |p: Point3| Vec3::new(0.1 * p.y, 0.0, 0.05 * p.x);
        let mut buf = Vec::new();
        write_wind_grid(&mut buf, Point3::new(-1.0, -1.0, -1.0), Vec3::new(0.5, 0.5, 1.0), [5, 5, 3], f).unwrap();
        let g = parse_wind_grid(buf.as_slice()).unwrap();
        let p = Point3::new(0.3, -0.7, 0.2);
        assert!((g.sample(p) - f(p)).norm() < 1e-12);
    }

    #[test]
    fn incomplete_grids_are_rejected() {
        let text = "x,y,z,wx,wy,wz\n0,0,0,1,0,0\n1,0,0,1,0,0\n0,1,0,1,0,0\n";
        assert!(parse_wind_grid(text.as_bytes()).is_err());
    }
}
