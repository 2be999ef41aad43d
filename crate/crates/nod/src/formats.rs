//! On-disk formats: CSV for fields, kernels and trajectories, JSON for reports.
//!
//! Floats are written in their shortest round-trip form so that identical
//! runs produce identical bytes.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use nod_core::dynamics::SimResult;
use nod_core::grid::{CircleGrid, RealField, SpectralField};
use nod_core::kernel::Kernel;
use serde::Serialize;

use crate::error::{CliError, CliResult};

fn num(v: f64) -> String {
    format!("{v:?}")
}

fn writer(path: &Path) -> CliResult<csv::Writer<BufWriter<File>>> {
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    Ok(csv::Writer::from_writer(BufWriter::new(file)))
}

fn csv_err(path: &Path, e: csv::Error) -> CliError {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => CliError::io(path, io),
        other => CliError::Config(format!("{}: {other:?}", path.display())),
    }
}

fn write_rows<I, R>(path: &Path, header: &[&str], rows: I) -> CliResult<()>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let mut w = writer(path)?;
    w.write_record(header).map_err(|e| csv_err(path, e))?;
    for row in rows {
        w.write_record(row).map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

/// `theta,value` rows.
pub fn write_real_field(path: &Path, f: &RealField) -> CliResult<()> {
    let grid = f.grid();
    write_rows(
        path,
        &["theta", "value"],
        f.values().iter().enumerate().map(|(j, v)| [num(grid.theta(j)), num(*v)]),
    )
}

pub fn read_real_field(path: &Path) -> CliResult<RealField> {
    let mut r = csv::Reader::from_path(path).map_err(|e| csv_err(path, e))?;
    let mut values = Vec::new();
    for rec in r.deserialize::<(f64, f64)>() {
        values.push(rec.map_err(|e| csv_err(path, e))?.1);
    }
    let grid = CircleGrid::new(values.len())?;
    Ok(RealField::new(grid, values)?)
}

/// `k,re,im` rows in increasing frequency.
pub fn write_spectral_field(path: &Path, f: &SpectralField) -> CliResult<()> {
    let grid = f.grid();
    write_rows(
        path,
        &["k", "re", "im"],
        grid.frequencies().map(|k| {
            let c = f.coeff(k);
            [k.to_string(), num(c.re), num(c.im)]
        }),
    )
}

/// `k,W_hat` rows for `k = 0..=N/2`.
pub fn write_kernel(path: &Path, kernel: &Kernel) -> CliResult<()> {
    write_rows(
        path,
        &["k", "W_hat"],
        kernel.half_spectrum().into_iter().map(|(k, v)| [k.to_string(), num(v)]),
    )
}

pub fn read_kernel_csv(path: &Path) -> CliResult<Vec<(i64, f64)>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| csv_err(path, e))?;
    r.deserialize::<(i64, f64)>()
        .map(|rec| rec.map_err(|e| csv_err(path, e)))
        .collect()
}

/// Long format `t,theta,z`, one row per recorded time and grid point.
pub fn write_trajectory(path: &Path, sim: &SimResult) -> CliResult<()> {
    let grid = sim.final_state.grid();
    let thetas: Vec<String> = grid.thetas().map(num).collect();
    write_rows(
        path,
        &["t", "theta", "z"],
        sim.times.iter().zip(&sim.snapshots).flat_map(|(t, s)| {
            let t = num(*t);
            s.values()
                .iter()
                .zip(&thetas)
                .map(move |(z, th)| [t.clone(), th.clone(), num(*z)])
        }),
    )
}

/// Pretty JSON with a trailing newline.
pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Config(e.to_string()))?;
    text.push('\n');
    let mut f = File::create(path).map_err(|e| CliError::io(path, e))?;
    f.write_all(text.as_bytes()).map_err(|e| CliError::io(path, e))
}
