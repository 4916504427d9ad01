//! CSV field dumps.
//!
//! ```text
//! # grid: dim=2 points=64,64 extent=1.6000000000000000e1,1.6000000000000000e1 boundary=periodic
//! 0,0,1.2000000000000000e-3,0.0000000000000000e0
//! ```
//!
//! Each row holds the multi-index followed by `re,im` (complex) or `value`
//! (real). Numbers carry 17 significant digits, so a dump re-reads to the
//! identical bit pattern.

use std::fmt::Write as _;
use std::io::{BufRead, Write};

use num_complex::Complex64;

use super::field::{ComplexField, RealField};
use super::grid::{Boundary, Grid};
use crate::error::{Error, Result};

/// Formats a float with 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn join<T>(items: &[T], f: impl Fn(&T) -> String) -> String {
    items.iter().map(f).collect::<Vec<_>>().join(",")
}

pub fn grid_header(grid: &Grid) -> String {
    format!(
        "# grid: dim={} points={} extent={} boundary={}",
        grid.dim(),
        join(grid.points(), |p| p.to_string()),
        join(grid.extent(), |e| fmt_f64(*e)),
        grid.boundary()
    )
}

pub fn parse_grid_header(line: &str) -> Result<Grid> {
    let body = line
        .trim()
        .strip_prefix("# grid:")
        .ok_or_else(|| Error::Parse("missing `# grid:` header".into()))?;
    let mut dim = None;
    let mut points = None;
    let mut extent = None;
    let mut boundary = None;
    for token in body.split_whitespace() {
        let (key, value) = token
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("malformed header token `{token}`")))?;
        match key {
            "dim" => {
                dim = Some(value.parse::<usize>().map_err(|e| Error::Parse(e.to_string()))?)
            }
            "points" => {
                points = Some(
                    value
                        .split(',')
                        .map(|s| s.parse::<usize>().map_err(|e| Error::Parse(e.to_string())))
                        .collect::<Result<Vec<_>>>()?,
                )
            }
            "extent" => {
                extent = Some(
                    value
                        .split(',')
                        .map(|s| s.parse::<f64>().map_err(|e| Error::Parse(e.to_string())))
                        .collect::<Result<Vec<_>>>()?,
                )
            }
            "boundary" => boundary = Some(value.parse::<Boundary>()?),
            other => return Err(Error::Parse(format!("unknown header key `{other}`"))),
        }
    }
    let (Some(dim), Some(points), Some(extent), Some(boundary)) = (dim, points, extent, boundary)
    else {
        return Err(Error::Parse("incomplete grid header".into()));
    };
    if points.len() != dim {
        return Err(Error::Parse(format!("dim={dim} but {} point counts", points.len())));
    }
    Grid::new(&points, &extent, boundary)
}

fn write_rows<W: Write>(
    out: &mut W,
    grid: &Grid,
    mut cols: impl FnMut(usize, &mut String),
) -> Result<()> {
    writeln!(out, "{}", grid_header(grid))?;
    let mut line = String::new();
    for flat in 0..grid.len() {
        line.clear();
        let idx = grid.multi_index(flat);
        for i in &idx[..grid.dim()] {
            let _ = write!(line, "{i},");
        }
        cols(flat, &mut line);
        writeln!(out, "{line}")?;
    }
    Ok(())
}

pub fn write_complex<W: Write>(out: &mut W, field: &ComplexField) -> Result<()> {
    let values = field.values();
    write_rows(out, field.grid(), |flat, line| {
        let v = values[flat];
        let _ = write!(line, "{},{}", fmt_f64(v.re), fmt_f64(v.im));
    })
}

pub fn write_real<W: Write>(out: &mut W, field: &RealField) -> Result<()> {
    let values = field.values();
    write_rows(out, field.grid(), |flat, line| {
        line.push_str(&fmt_f64(values[flat]));
    })
}

fn read_rows<R: BufRead>(input: R, ncols: usize) -> Result<(Grid, Vec<Vec<f64>>)> {
    let mut lines = input.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty field file".into()))??;
    let grid = parse_grid_header(&header)?;
    let mut slots: Vec<Option<Vec<f64>>> = vec![None; grid.len()];
    for (lineno, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split(',').collect();
        if parts.len() != grid.dim() + ncols {
            return Err(Error::Parse(format!(
                "line {}: expected {} columns, found {}",
                lineno + 2,
                grid.dim() + ncols,
                parts.len()
            )));
        }
        let mut idx = [0usize; 3];
        for (axis, p) in parts[..grid.dim()].iter().enumerate() {
            idx[axis] = p
                .trim()
                .parse()
                .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 2)))?;
            if idx[axis] >= grid.points()[axis] {
                return Err(Error::Parse(format!("line {}: index out of range", lineno + 2)));
            }
        }
        let vals = parts[grid.dim()..]
            .iter()
            .map(|p| {
                p.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 2)))
            })
            .collect::<Result<Vec<_>>>()?;
        slots[grid.flat_index(&idx)] = Some(vals);
    }
    let rows = slots
        .into_iter()
        .enumerate()
        .map(|(i, s)| s.ok_or_else(|| Error::Parse(format!("missing row for point {i}"))))
        .collect::<Result<Vec<_>>>()?;
    Ok((grid, rows))
}

pub fn read_complex<R: BufRead>(input: R) -> Result<ComplexField> {
    let (grid, rows) = read_rows(input, 2)?;
    ComplexField::from_values(
        &grid,
        rows.into_iter().map(|r| Complex64::new(r[0], r[1])).collect(),
    )
}

pub fn read_real<R: BufRead>(input: R) -> Result<RealField> {
    let (grid, rows) = read_rows(input, 1)?;
    RealField::from_values(&grid, rows.into_iter().map(|r| r[0]).collect())
}
