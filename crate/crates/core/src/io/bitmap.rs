//! Momentum density from a grayscale image.

use std::path::Path;

use image::imageops;

use crate::domain::Domain;
use crate::error::{Result, ShapeError};

/// Reads a grayscale image (PGM or any enabled format), blurs it with a
/// Gaussian of `sigma` pixels and samples it on `domain`.
///
/// Dark pixels give positive values. The result is mean-centred over the
/// interior nodes, zero on the boundary and scaled so that its largest
/// magnitude equals `amplitude`.
pub fn bitmap_momentum(path: &Path, sigma: f64, amplitude: f64, domain: &Domain) -> Result<Vec<f64>> {
    let img = image::open(path)
        .map_err(|e| ShapeError::Io(format!("{}: {e}", path.display())))?
        .to_luma32f();
    let img = if sigma > 0.0 { imageops::blur(&img, sigma as f32) } else { img };
    let (w, h) = img.dimensions();
    if w < 2 || h < 2 {
        return Err(ShapeError::Io(format!("{}: image too small", path.display())));
    }
    let pix = |x: u32, y: u32| 1.0 - img.get_pixel(x.min(w - 1), y.min(h - 1))[0] as f64;
    let ext = domain.extent();
    let mut vals: Vec<f64> = (0..domain.nodes())
        .map(|k| {
            let [u, v] = domain.param(k);
            // image rows run top to bottom, v runs bottom to top
            let x = u / ext[0] * (w - 1) as f64;
            let y = (1.0 - v / ext[1]) * (h - 1) as f64;
            let (x0, y0) = (x.floor(), y.floor());
            let (fx, fy) = (x - x0, y - y0);
            let (x0, y0) = (x0 as u32, y0 as u32);
            (1.0 - fx) * (1.0 - fy) * pix(x0, y0)
                + fx * (1.0 - fy) * pix(x0 + 1, y0)
                + (1.0 - fx) * fy * pix(x0, y0 + 1)
                + fx * fy * pix(x0 + 1, y0 + 1)
        })
        .collect();
    let interior: Vec<usize> = domain.free_nodes().collect();
    let mean = interior.iter().map(|&k| vals[k]).sum::<f64>() / interior.len() as f64;
    for (k, v) in vals.iter_mut().enumerate() {
        *v = if domain.is_boundary(k) { 0.0 } else { *v - mean };
    }
    let peak = vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if peak > 0.0 {
        for v in &mut vals {
            *v *= amplitude / peak;
        }
    }
    Ok(vals)
}
