//! CSV writers and the numeric-table reader used by the plotter.
//!
//! All files: comma separator, `.` decimals, one header row, LF line
//! endings. Floats use Rust's shortest round-trip formatting, so equal
//! values always produce equal bytes.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use qqcm_core::{CdfGrid, DensityMatrix, QueueTrace, TrajectoryRecord};

use crate::config::SweepAxis;
use crate::error::{Error, Result};
use crate::experiment::{CdfComparison, FixedPointReport, PointStats};

fn writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(w)
}

fn num(x: f64) -> String {
    format!("{x}")
}

/// Opens `path` for writing, reporting the path on failure.
pub fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Writes the finished buffer in one go so failed commands leave no file.
pub fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut f = create(path)?;
    f.write_all(bytes).and_then(|_| f.flush()).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn finish<W: Write>(mut w: csv::Writer<W>) -> Result<()> {
    w.flush().map_err(|e| Error::Csv(e.into()))
}

/// `n,t_depart,C,rho_re_00,rho_re_01,rho_im_01,rho_re_11`
pub fn write_trajectory<W: Write>(out: W, record: &TrajectoryRecord) -> Result<()> {
    let mut w = writer(out);
    w.write_record(["n", "t_depart", "C", "rho_re_00", "rho_re_01", "rho_im_01", "rho_re_11"])?;
    for s in &record.samples {
        let m = s.state.matrix();
        w.write_record([
            s.n.to_string(),
            num(s.departure),
            num(s.coherence),
            num(m[(0, 0)].re),
            num(m[(0, 1)].re),
            num(m[(0, 1)].im),
            num(m[(1, 1)].re),
        ])?;
    }
    finish(w)
}

/// `n,T,S,Wq,I,t_arrive,t_depart`
pub fn write_queue_trace<W: Write>(out: W, trace: &QueueTrace) -> Result<()> {
    let mut w = writer(out);
    w.write_record(["n", "T", "S", "Wq", "I", "t_arrive", "t_depart"])?;
    for k in 0..trace.len() {
        w.write_record([
            (k + 1).to_string(),
            num(trace.interarrival[k]),
            num(trace.service[k]),
            num(trace.waiting[k]),
            num(trace.idle[k]),
            num(trace.arrival[k]),
            num(trace.departure[k]),
        ])?;
    }
    finish(w)
}

/// Full state dump: `n` then the real parts and the imaginary parts of
/// every entry in row-major order.
pub fn write_states<W: Write>(out: W, states: impl IntoIterator<Item = (usize, DensityMatrix)>) -> Result<()> {
    let mut w = writer(out);
    let mut header_written = false;
    for (n, rho) in states {
        let d = rho.dim();
        if !header_written {
            let mut header = vec!["n".to_string()];
            for part in ["re", "im"] {
                for i in 0..d {
                    for j in 0..d {
                        header.push(format!("{part}_{i}{j}"));
                    }
                }
            }
            w.write_record(&header)?;
            header_written = true;
        }
        let m = rho.matrix();
        let mut row = vec![n.to_string()];
        row.extend((0..d * d).map(|k| num(m[(k / d, k % d)].re)));
        row.extend((0..d * d).map(|k| num(m[(k / d, k % d)].im)));
        w.write_record(&row)?;
    }
    finish(w)
}

/// `x,F`
pub fn write_cdf<W: Write>(out: W, cdf: &CdfGrid) -> Result<()> {
    let mut w = writer(out);
    w.write_record(["x", "F"])?;
    for (x, f) in cdf.grid().iter().zip(cdf.values()) {
        w.write_record([num(*x), num(*f)])?;
    }
    finish(w)
}

/// `x,F_numeric,F_empirical,abs_diff`
pub fn write_comparison<W: Write>(out: W, cmp: &CdfComparison) -> Result<()> {
    let mut w = writer(out);
    w.write_record(["x", "F_numeric", "F_empirical", "abs_diff"])?;
    let rows = cmp
        .numeric
        .grid()
        .iter()
        .zip(cmp.numeric.values())
        .zip(cmp.empirical.values());
    for ((x, a), b) in rows {
        w.write_record([num(*x), num(*a), num(*b), num((a - b).abs())])?;
    }
    finish(w)
}

/// `<axis>,E_C,Var_C,stderr`; `stderr` is the autocorrelation-naive
/// estimate `sqrt(Var_C / samples)`.
pub fn write_sweep<W: Write>(out: W, axis: SweepAxis, points: &[PointStats]) -> Result<()> {
    let mut w = writer(out);
    w.write_record([axis.column(), "E_C", "Var_C", "stderr"])?;
    for p in points {
        w.write_record([num(p.value), num(p.mean), num(p.variance), num(p.naive_stderr)])?;
    }
    finish(w)
}

/// `mode,rho_re_00,rho_re_01,rho_im_01,rho_re_11,C,residual`
pub fn write_fixed_point<W: Write>(out: W, report: &FixedPointReport) -> Result<()> {
    let mut w = writer(out);
    w.write_record([
        "mode",
        "rho_re_00",
        "rho_re_01",
        "rho_im_01",
        "rho_re_11",
        "C",
        "residual",
    ])?;
    let m = report.fixed_point.state.matrix();
    let mode = serde_json::to_value(report.mode)
        .ok()
        .and_then(|v| v.as_str().map(str::to_owned))
        .unwrap_or_default();
    w.write_record([
        mode,
        num(m[(0, 0)].re),
        num(m[(0, 1)].re),
        num(m[(0, 1)].im),
        num(m[(1, 1)].re),
        num(report.coherence),
        num(report.fixed_point.residual),
    ])?;
    finish(w)
}

/// Renders any of the writers above into memory.
pub fn to_bytes(f: impl FnOnce(&mut Vec<u8>) -> Result<()>) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    f(&mut buf)?;
    Ok(buf)
}

/// A CSV file of numbers with a header row.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.headers.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }
}

/// Reads a numeric CSV. Columns that hold text (such as `mode`) are
/// rejected.
pub fn read_table(path: &Path) -> Result<Table> {
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(file);
    let headers: Vec<String> = rdr.headers()?.iter().map(str::to_owned).collect();
    if headers.is_empty() || headers.iter().all(|h| h.is_empty()) {
        return Err(Error::Malformed(format!("{}: no header row", path.display())));
    }
    let mut rows = Vec::new();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let row = rec
            .iter()
            .map(|field| field.trim().parse::<f64>())
            .collect::<std::result::Result<Vec<f64>, _>>()
            .map_err(|_| {
                Error::Malformed(format!(
                    "{}: non-numeric value on data row {}",
                    path.display(),
                    line + 1
                ))
            })?;
        rows.push(row);
    }
    Ok(Table { headers, rows })
}
