//! CSV ingestion and emission.
//!
//! Plain trajectories use the header `t,x,y`; filled trajectories add a
//! `source` column (`observed`, `bridge` or `linear`). Values are written in
//! the shortest decimal form that parses back to the identical `f64`.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::trajectory::{FilledTrajectory, Source, TimedPoint, Trajectory};

fn parse_field(raw: &str, row: usize, column: &str) -> Result<f64> {
    raw.trim()
        .parse::<f64>()
        .map_err(|_| Error::Parse(format!("row {row}: {column}={raw:?} is not a number")))
}

/// Reads `t,x,y[,source]` rows. A missing `source` column labels every point observed.
pub fn read_filled<R: Read>(reader: R) -> Result<FilledTrajectory> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    let column = |name: &str| headers.iter().position(|h| h == name);
    let (Some(ti), Some(xi), Some(yi)) = (column("t"), column("x"), column("y")) else {
        return Err(Error::Parse(format!(
            "expected header t,x,y[,source], found {}",
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    };
    let si = column("source");

    let mut points = Vec::new();
    let mut sources = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let record = record?;
        let row = i + 1;
        let get = |idx: usize, name: &str| {
            record
                .get(idx)
                .ok_or_else(|| Error::Parse(format!("row {row}: missing {name}")))
        };
        let t = parse_field(get(ti, "t")?, row, "t")?;
        let x = parse_field(get(xi, "x")?, row, "x")?;
        let y = parse_field(get(yi, "y")?, row, "y")?;
        points.push(TimedPoint::new(t, x, y));
        sources.push(match si {
            Some(idx) => get(idx, "source")?.parse()?,
            None => Source::Observed,
        });
    }
    FilledTrajectory::new(Trajectory::new(points)?, sources)
}

pub fn read_trajectory<R: Read>(reader: R) -> Result<Trajectory> {
    Ok(read_filled(reader)?.into_trajectory())
}

pub fn read_trajectory_file(path: impl AsRef<Path>) -> Result<Trajectory> {
    read_trajectory(File::open(path)?)
}

pub fn write_trajectory<W: Write>(writer: W, traj: &Trajectory) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.write_record(["t", "x", "y"])?;
    for p in traj.points() {
        wtr.write_record([p.t.to_string(), p.x.to_string(), p.y.to_string()])?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn write_filled<W: Write>(writer: W, filled: &FilledTrajectory) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.write_record(["t", "x", "y", "source"])?;
    for (p, source) in filled.iter() {
        wtr.write_record([
            p.t.to_string(),
            p.x.to_string(),
            p.y.to_string(),
            source.as_str().to_string(),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn write_trajectory_file(path: impl AsRef<Path>, traj: &Trajectory) -> Result<()> {
    write_trajectory(File::create(path)?, traj)
}
