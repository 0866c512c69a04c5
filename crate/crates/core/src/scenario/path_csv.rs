use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::geometry::{Direction, Pose};
use crate::path::{Path, PathPoint, Provenance};

const HEADER: [&str; 5] = ["x", "y", "theta", "direction", "provenance"];

struct Counting<W> {
    inner: W,
    written: usize,
}

impl<W: Write> Write for Counting<W> {
    fn write(&mut self, buf: &[u8]) -> std::io::Result<usize> {
        let n = self.inner.write(buf)?;
        self.written += n;
        Ok(n)
    }

    fn flush(&mut self) -> std::io::Result<()> {
        self.inner.flush()
    }
}

fn csv_error(e: csv::Error) -> Error {
    if e.is_io_error() {
        match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::Io(io),
            _ => unreachable!(),
        }
    } else {
        Error::Parse(format!("path CSV: {e}"))
    }
}

/// Writes one row per pose with six decimals; returns the bytes written.
pub fn write_path_csv(path: &Path, sink: impl Write) -> Result<usize> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Counting {
            inner: sink,
            written: 0,
        });
    w.write_record(HEADER).map_err(csv_error)?;
    for p in &path.points {
        w.write_record([
            format!("{:.6}", p.pose.x),
            format!("{:.6}", p.pose.y),
            format!("{:.6}", p.pose.theta),
            match p.dir {
                Direction::Forward => "F".to_string(),
                Direction::Reverse => "R".to_string(),
            },
            p.provenance.as_str().to_string(),
        ])
        .map_err(csv_error)?;
    }
    w.flush()?;
    let inner = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(inner.written)
}

pub fn read_path_csv(source: impl Read) -> Result<Path> {
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(source);
    let header = r.headers().map_err(csv_error)?.clone();
    if header.iter().ne(HEADER) {
        return Err(Error::Parse(format!(
            "path CSV: header must be {}",
            HEADER.join(",")
        )));
    }
    let mut points = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec.map_err(csv_error)?;
        let line = i + 2;
        let num = |k: usize| -> Result<f64> {
            rec[k]
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("path CSV line {line}: bad {} '{}'", HEADER[k], &rec[k])))
        };
        let dir = match rec[3].trim() {
            "F" => Direction::Forward,
            "R" => Direction::Reverse,
            other => return Err(Error::Parse(format!("path CSV line {line}: bad direction '{other}'"))),
        };
        let provenance = Provenance::parse(rec[4].trim()).ok_or_else(|| {
            Error::Parse(format!("path CSV line {line}: bad provenance '{}'", &rec[4]))
        })?;
        points.push(PathPoint {
            pose: Pose::try_new(num(0)?, num(1)?, num(2)?)?,
            dir,
            provenance,
        });
    }
    Ok(Path::new(points))
}
