//! Frame files: OBJ meshes for surfaces, CSV point lists for curves, and
//! single-column CSV for scalar node fields.
//!
//! Vertices are written in row-major node order with the shortest decimal
//! representation that parses back to the same `f64`.

use std::fmt::Write as _;
use std::path::Path;

use crate::domain::Domain;
use crate::error::{Result, ShapeError};
use crate::immersion::Immersion;
use crate::scalar::Real;

fn io_err(path: &Path, e: impl std::fmt::Display) -> ShapeError {
    ShapeError::Io(format!("{}: {e}", path.display()))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| io_err(path, e))
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| io_err(path, e))
}

/// OBJ text: one `v` per node, triangles for surfaces, segments for curves.
pub fn obj_string<T: Real>(f: &Immersion<T>, t: f64) -> String {
    let mut s = format!("# t = {t:?}\n");
    for p in f.values() {
        let [x, y, z] = p.map(|c| c.to_f64_lossy());
        let _ = writeln!(s, "v {x:?} {y:?} {z:?}");
    }
    let dom = f.domain();
    for [c00, c10, c01, c11] in dom.cells() {
        if dom.dim() == 1 {
            let _ = writeln!(s, "l {} {}", c00 + 1, c10 + 1);
        } else {
            let _ = writeln!(s, "f {} {} {}", c00 + 1, c10 + 1, c11 + 1);
            let _ = writeln!(s, "f {} {} {}", c00 + 1, c11 + 1, c01 + 1);
        }
    }
    s
}

/// CSV text with columns `x,y` (planar) or `x,y,z`.
pub fn csv_string<T: Real>(f: &Immersion<T>) -> String {
    let n = f.ambient_dim();
    let mut s = ["x", "y", "z"][..n].join(",");
    s.push('\n');
    for p in f.values() {
        let row: Vec<String> = p[..n].iter().map(|c| format!("{:?}", c.to_f64_lossy())).collect();
        s.push_str(&row.join(","));
        s.push('\n');
    }
    s
}

pub fn write_obj<T: Real>(path: &Path, f: &Immersion<T>, t: f64) -> Result<()> {
    write_text(path, &obj_string(f, t))
}

pub fn write_csv<T: Real>(path: &Path, f: &Immersion<T>) -> Result<()> {
    write_text(path, &csv_string(f))
}

fn parse_f64(path: &Path, line: usize, tok: &str) -> Result<f64> {
    tok.trim()
        .parse::<f64>()
        .map_err(|e| io_err(path, format!("line {line}: {e} in {tok:?}")))
}

/// Vertex list of an OBJ file.
pub fn parse_obj(path: &Path, text: &str) -> Result<Vec<[f64; 3]>> {
    let mut out = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let mut it = line.split_whitespace();
        if it.next() != Some("v") {
            continue;
        }
        let mut p = [0.0; 3];
        for c in p.iter_mut() {
            let tok = it.next().ok_or_else(|| io_err(path, format!("line {}: short vertex", k + 1)))?;
            *c = parse_f64(path, k + 1, tok)?;
        }
        out.push(p);
    }
    Ok(out)
}

/// Point list of a curve CSV (header row required).
pub fn parse_csv_points(path: &Path, text: &str) -> Result<(usize, Vec<[f64; 3]>)> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines.next().ok_or_else(|| io_err(path, "empty file"))?;
    let n = header.split(',').count();
    if !(2..=3).contains(&n) {
        return Err(io_err(path, format!("expected 2 or 3 columns, header is {header:?}")));
    }
    let mut out = Vec::new();
    for (k, line) in lines {
        let toks: Vec<&str> = line.split(',').collect();
        if toks.len() != n {
            return Err(io_err(path, format!("line {}: expected {n} columns", k + 1)));
        }
        let mut p = [0.0; 3];
        for (c, tok) in p.iter_mut().zip(&toks) {
            *c = parse_f64(path, k + 1, tok)?;
        }
        out.push(p);
    }
    Ok((n, out))
}

/// Loads a frame written by [`write_obj`] or [`write_csv`] onto `domain`.
pub fn load_frame<T: Real>(path: &Path, domain: &Domain, ambient: usize) -> Result<Immersion<T>> {
    let text = read_text(path)?;
    let pts = match path.extension().and_then(|e| e.to_str()) {
        Some("obj") => parse_obj(path, &text)?,
        Some("csv") => parse_csv_points(path, &text)?.1,
        _ => return Err(io_err(path, "unknown frame extension (need .obj or .csv)")),
    };
    Immersion::new(domain.clone(), ambient, pts.into_iter().map(|p| p.map(T::lit)).collect())
}

/// Single-column CSV with a header.
pub fn write_scalar_csv(path: &Path, header: &str, values: &[f64]) -> Result<()> {
    let mut s = format!("{header}\n");
    for v in values {
        let _ = writeln!(s, "{v:?}");
    }
    write_text(path, &s)
}

pub fn read_scalar_csv(path: &Path) -> Result<Vec<f64>> {
    let text = read_text(path)?;
    text.lines()
        .enumerate()
        .skip(1)
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(k, l)| parse_f64(path, k + 1, l))
        .collect()
}

/// Comma-separated table with a header row.
pub fn write_table(path: &Path, header: &[String], rows: &[Vec<String>]) -> Result<()> {
    let mut s = header.join(",");
    s.push('\n');
    for r in rows {
        s.push_str(&r.join(","));
        s.push('\n');
    }
    write_text(path, &s)
}
