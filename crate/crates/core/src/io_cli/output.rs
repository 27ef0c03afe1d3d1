//! CSV and JSON emitters. Floats are written with 17 significant digits.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::kirchhoff_static::SystemResidual;
use crate::quantum_transport::WaveField;
use crate::rod_geometry::FramePath;

pub const FRAME_PATH_HEADER: &str = "s1,x,y,z,d1x,d1y,d1z,d2x,d2y,d2z,d3x,d3y,d3z";
pub const RESIDUAL_HEADER: &str = "s1,r1,r2,r3,r4,r5,r6";
pub const SNAPSHOT_HEADER: &str = "u,s1,re_psi,im_psi,abs_psi";

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.display().to_string(),
        source,
    }
}

fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_lines(path: &Path, write: impl FnOnce(&mut dyn Write) -> std::io::Result<()>) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
    }
    let file = File::create(path).map_err(io_err(path))?;
    let mut w = BufWriter::new(file);
    write(&mut w).and_then(|_| w.flush()).map_err(io_err(path))
}

fn write_row(w: &mut dyn Write, values: &[f64]) -> std::io::Result<()> {
    let row: Vec<String> = values.iter().map(|&x| fmt(x)).collect();
    writeln!(w, "{}", row.join(","))
}

pub fn frame_path_csv(w: &mut dyn Write, path: &FramePath) -> std::io::Result<()> {
    writeln!(w, "{FRAME_PATH_HEADER}")?;
    for p in &path.samples {
        let f = &p.frame;
        write_row(
            w,
            &[
                p.s1,
                f.position.x,
                f.position.y,
                f.position.z,
                f.d1.x,
                f.d1.y,
                f.d1.z,
                f.d2.x,
                f.d2.y,
                f.d2.z,
                f.d3.x,
                f.d3.y,
                f.d3.z,
            ],
        )?;
    }
    Ok(())
}

pub fn write_frame_path(path: &Path, curve: &FramePath) -> Result<()> {
    write_lines(path, |w| frame_path_csv(w, curve))
}

/// Residual rows; `s1` holds the coordinates of the interior samples.
pub fn write_residuals(path: &Path, s1: &[f64], residual: &SystemResidual) -> Result<()> {
    if s1.len() != residual.len() {
        return Err(Error::LengthMismatch {
            what: "residual coordinates",
            expected: residual.len(),
            got: s1.len(),
        });
    }
    write_lines(path, |w| {
        writeln!(w, "{RESIDUAL_HEADER}")?;
        for (i, &s) in s1.iter().enumerate() {
            let mut row = [s, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0];
            for j in 0..6 {
                row[j + 1] = residual.equations[j][i];
            }
            write_row(w, &row)?;
        }
        Ok(())
    })
}

pub fn snapshot_rows(w: &mut dyn Write, u: f64, psi: &WaveField) -> std::io::Result<()> {
    for (s, z) in psi.grid.points().zip(&psi.values) {
        write_row(w, &[u, s, z.re, z.im, z.norm()])?;
    }
    Ok(())
}

pub fn write_snapshots(path: &Path, snapshots: &[(f64, WaveField)]) -> Result<()> {
    write_lines(path, |w| {
        writeln!(w, "{SNAPSHOT_HEADER}")?;
        for (u, psi) in snapshots {
            snapshot_rows(w, *u, psi)?;
        }
        Ok(())
    })
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    write_lines(path, |w| writeln!(w, "{text}"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::CurvatureProfile;
    use crate::rod_geometry::{reconstruct_curve, Frame, Vec3};

    #[test]
    fn frame_csv_round_trips_exactly() {
        let path = reconstruct_curve(
            &CurvatureProfile::sech(1.0).unwrap(),
            1.0,
            std::f64::consts::PI,
            (-1.0, 1.0),
            0.1,
            &Frame::identity_at(Vec3::zeros()),
        )
        .unwrap();
        let mut buf = Vec::new();
        frame_path_csv(&mut buf, &path).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), FRAME_PATH_HEADER);
        for (line, sample) in lines.zip(&path.samples) {
            let cols: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
            assert_eq!(cols.len(), 13);
            assert_eq!(cols[0], sample.s1);
            assert_eq!(cols[1], sample.frame.position.x);
            assert_eq!(cols[12], sample.frame.d3.z);
        }
    }
}
