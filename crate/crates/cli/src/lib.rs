//! Sampling, deformation frames and verification runs, with the CSV and
//! JSON file formats used by the `phasetrop` binary.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use phasetrop::harness::{run_suite_with, sample_line, Exec, Fault, SampleSet, Strategy, SuiteOptions, VerificationReport};
use phasetrop::line::{line_residual, ON_LINE_TOL};
use phasetrop::{psi_t, AmbientPoint, IsotopyParams, Major, RegionTag, Side, Sub, TagSet};

/// Failure classes, mapped onto the exit codes of the binary.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(String),
    Compute(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => 2,
            CliError::Compute(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage: {m}"),
            CliError::Io(m) => write!(f, "i/o: {m}"),
            CliError::Compute(m) => write!(f, "{m}"),
        }
    }
}

impl std::error::Error for CliError {}

fn io_err(path: &Path, e: impl fmt::Display) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

/// One CSV row: a point of the line at deformation time `t`, with the
/// region tags of the point it came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameRow {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub phi: f64,
    pub psi: f64,
    pub major: String,
    pub sub: String,
    pub side: String,
}

impl FrameRow {
    pub fn new(t: f64, p: &AmbientPoint, tag: &RegionTag) -> Self {
        FrameRow {
            t,
            x: p.x,
            y: p.y,
            phi: p.phi.radians(),
            psi: p.psi.radians(),
            major: tag.major.to_string(),
            sub: tag.sub.to_string(),
            side: tag.side.to_string(),
        }
    }

    pub fn point(&self) -> AmbientPoint {
        AmbientPoint::new(self.x, self.y, self.phi, self.psi)
    }

    pub fn tag(&self) -> Result<RegionTag, CliError> {
        let bad = |e: phasetrop::Error| CliError::Io(format!("bad tag column: {e}"));
        Ok(RegionTag {
            major: self.major.parse::<TagSet<Major>>().map_err(bad)?,
            sub: self.sub.parse::<TagSet<Sub>>().map_err(bad)?,
            side: self.side.parse::<TagSet<Side>>().map_err(bad)?,
        })
    }
}

const HEADER: [&str; 8] = ["t", "x", "y", "phi", "psi", "major", "sub", "side"];

// 17 significant digits, which round-trips every double.
fn float(v: f64) -> String {
    format!("{v:.16e}")
}

/// Writes `bytes` to a temporary file next to `path` and renames it over.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| io_err(path, e))?;
    tmp.write_all(bytes).map_err(|e| io_err(path, e))?;
    tmp.persist(path).map_err(|e| io_err(path, e.error))?;
    Ok(())
}

pub fn frames_to_csv(rows: &[FrameRow]) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let enc = |e: csv::Error| CliError::Io(e.to_string());
    w.write_record(HEADER).map_err(enc)?;
    for r in rows {
        w.write_record([
            float(r.t),
            float(r.x),
            float(r.y),
            float(r.phi),
            float(r.psi),
            r.major.clone(),
            r.sub.clone(),
            r.side.clone(),
        ])
        .map_err(enc)?;
    }
    w.into_inner().map_err(|e| CliError::Io(e.to_string()))
}

pub fn write_frames(path: &Path, rows: &[FrameRow]) -> Result<(), CliError> {
    write_atomic(path, &frames_to_csv(rows)?)
}

pub fn read_frames(path: &Path) -> Result<Vec<FrameRow>, CliError> {
    let mut r = csv::Reader::from_path(path).map_err(|e| io_err(path, e))?;
    let headers = r.headers().map_err(|e| io_err(path, e))?;
    if headers.iter().ne(HEADER) {
        return Err(io_err(path, format!("expected header {}", HEADER.join(","))));
    }
    r.deserialize().collect::<Result<_, _>>().map_err(|e| io_err(path, e))
}

pub fn sample_rows(samples: &SampleSet) -> Vec<FrameRow> {
    samples.points.iter().zip(&samples.tags).map(|(p, tag)| FrameRow::new(0.0, p, tag)).collect()
}

pub fn sample(strategy: Strategy, n: usize, seed: u64) -> Result<Vec<FrameRow>, CliError> {
    let samples = sample_line(strategy, n, seed).map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(sample_rows(&samples))
}

/// Deformed rows and the number of input rows skipped as off the line.
#[derive(Debug, Clone, PartialEq)]
pub struct Deformed {
    pub rows: Vec<FrameRow>,
    pub skipped: usize,
}

/// Maps every row on the line by `Ψₜ`; rows off the line are dropped and
/// counted. Tags are carried over from the input.
pub fn deform(rows: &[FrameRow], t: f64) -> Result<Deformed, CliError> {
    let params = IsotopyParams::at(t);
    params.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    let mapped = Exec::default().map(rows, |row| {
        let p = row.point();
        if !(line_residual(&p) < ON_LINE_TOL) {
            return Ok(None);
        }
        let img = psi_t(&p, &params).map_err(|e| format!("row at ({}, {}): {e}", row.x, row.y))?;
        Ok(Some(FrameRow { t, x: img.x, y: img.y, phi: img.phi.radians(), psi: img.psi.radians(), ..row.clone() }))
    });
    let mut out = Deformed { rows: Vec::with_capacity(rows.len()), skipped: 0 };
    for m in mapped {
        match m.map_err(CliError::Compute)? {
            Some(r) => out.rows.push(r),
            None => out.skipped += 1,
        }
    }
    Ok(out)
}

pub fn frame_path(dir: &Path, j: usize) -> PathBuf {
    dir.join(format!("frame_{j:04}.csv"))
}

/// Frames at `t = j / steps`; frame 0 is the sample set itself.
pub fn frames(samples: &[FrameRow], steps: usize, dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    if steps == 0 {
        return Err(CliError::Usage("--steps must be at least 1".into()));
    }
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    let mut paths = Vec::with_capacity(steps + 1);
    for j in 0..=steps {
        let path = frame_path(dir, j);
        if j == 0 {
            write_frames(&path, samples)?;
        } else {
            let d = deform(samples, j as f64 / steps as f64)?;
            write_frames(&path, &d.rows)?;
        }
        paths.push(path);
    }
    Ok(paths)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyOptions {
    pub n: usize,
    pub seed: u64,
    pub t_steps: usize,
    pub fault: Option<Fault>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { n: 100, seed: 0, t_steps: 4, fault: None }
    }
}

pub fn verify(opts: &VerifyOptions) -> Result<VerificationReport, CliError> {
    if opts.t_steps == 0 {
        return Err(CliError::Usage("--t-steps must be at least 1".into()));
    }
    let usage = |e: phasetrop::Error| CliError::Usage(e.to_string());
    let grid = sample_line(Strategy::CoamoebaGrid, opts.n, opts.seed).map_err(usage)?;
    let seams = sample_line(Strategy::SeamCurves, opts.n, opts.seed).map_err(usage)?;
    let t_grid: Vec<f64> = (0..=opts.t_steps).map(|j| j as f64 / opts.t_steps as f64).collect();
    let suite = SuiteOptions { fault: opts.fault, ..SuiteOptions::default() };
    Ok(run_suite_with(&grid.union(&seams), &IsotopyParams::default(), &t_grid, &suite))
}

pub fn report_json(report: &VerificationReport) -> Result<Vec<u8>, CliError> {
    let mut bytes = serde_json::to_vec_pretty(report).map_err(|e| CliError::Io(e.to_string()))?;
    bytes.push(b'\n');
    Ok(bytes)
}
