//! CSV and JSON writers.
//!
//! Every file starts with its schema id: CSV files with a `# <schema>` line,
//! JSON reports with a top-level `schema` field. Outputs depend only on the
//! run's results, so identical scenarios give byte-identical files.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::run::RunReport;
use crate::Error;

pub const FRONTS_SCHEMA: &str = "wildfront.fronts/1";
pub const RAYS_SCHEMA: &str = "wildfront.rays/1";

/// Front samples: `tau,sample_id,x,y,z,vx0,vy0,vz0`.
pub fn write_fronts_csv(report: &RunReport, mut w: impl Write) -> Result<(), Error> {
    writeln!(w, "# {FRONTS_SCHEMA}")?;
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(["tau", "sample_id", "x", "y", "z", "vx0", "vy0", "vz0"])?;
    for f in &report.fronts {
        for (i, (p, prov)) in f.points.iter().zip(&f.provenance).enumerate() {
            let v = prov.velocity0;
            wr.serialize((f.time, i, p.x, p.y, p.z, v.x, v.y, v.z))?;
        }
    }
    wr.flush()?;
    Ok(())
}

/// Strategic paths: `query,t,x,y,z`.
pub fn write_rays_csv(report: &RunReport, mut w: impl Write) -> Result<(), Error> {
    writeln!(w, "# {RAYS_SCHEMA}")?;
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(["query", "t", "x", "y", "z"])?;
    for (q, r) in report.strategies.iter().enumerate() {
        let (Some(tau), n) = (r.tau, r.path.len()) else { continue };
        for (i, p) in r.path.iter().enumerate() {
            let t = if n > 1 { tau * i as f64 / (n - 1) as f64 } else { 0.0 };
            wr.serialize((q, t, p.x, p.y, p.z))?;
        }
    }
    wr.flush()?;
    Ok(())
}

pub fn write_report_json(report: &RunReport, mut w: impl Write) -> Result<(), Error> {
    serde_json::to_writer_pretty(&mut w, report)?;
    writeln!(w)?;
    Ok(())
}

pub fn read_report_json(path: &Path) -> Result<RunReport, Error> {
    let f = File::open(path).map_err(|e| Error::Io { path: path.to_path_buf(), source: e })?;
    Ok(serde_json::from_reader(std::io::BufReader::new(f))?)
}

fn create(path: &Path) -> Result<BufWriter<File>, Error> {
    File::create(path).map(BufWriter::new).map_err(|e| Error::Io { path: path.to_path_buf(), source: e })
}

/// Writes `fronts.csv`, `rays.csv`, `report.json` and `slice.svg` into `dir`.
///
/// A slice that misses every front is recorded in the report instead of failing the run.
pub fn write_outputs(report: &mut RunReport, dir: &Path) -> Result<Vec<PathBuf>, Error> {
    std::fs::create_dir_all(dir).map_err(|e| Error::Io { path: dir.to_path_buf(), source: e })?;
    let mut written = Vec::new();
    let svg = dir.join("slice.svg");
    match crate::svg::render_slice(report, &report.plane, &svg) {
        Ok(_) => written.push(svg),
        Err(Error::EmptyIntersection) => report.errors.push("slice.svg: the slice plane does not meet any front".into()),
        Err(e) => return Err(e),
    }
    let path = dir.join("fronts.csv");
    let mut f = create(&path)?;
    write_fronts_csv(report, &mut f)?;
    f.flush()?;
    written.push(path);
    let path = dir.join("rays.csv");
    let mut f = create(&path)?;
    write_rays_csv(report, &mut f)?;
    f.flush()?;
    written.push(path);
    let path = dir.join("report.json");
    let mut f = create(&path)?;
    write_report_json(report, &mut f)?;
    f.flush()?;
    written.push(path);
    Ok(written)
}
