use std::fs;
use std::io::Write;
use std::path::Path;

use arithdyn::family::{MapFamily, StartPoint};
use arithdyn::par::par_map;
use num_complex::Complex64;
use serde::Serialize;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Window {
    pub center_re: f64,
    pub center_im: f64,
    pub width: f64,
}

/// Row-major values, row 0 at the top (largest imaginary part).
#[derive(Clone, Debug, PartialEq)]
pub struct PlotGrid {
    pub window: Window,
    pub resolution: usize,
    pub values: Vec<f64>,
    /// Pixels whose escape rate could not be computed; stored as 0.
    pub failed: usize,
}

#[derive(Serialize)]
struct Sidecar<'a> {
    window: &'a Window,
    resolution: usize,
    v_max: f64,
    seed: u64,
    failed_pixels: usize,
    value: &'static str,
}

impl Window {
    pub fn pixel_center(&self, res: usize, row: usize, col: usize) -> Complex64 {
        let step = self.width / res as f64;
        let re = self.center_re - 0.5 * self.width + (col as f64 + 0.5) * step;
        let im = self.center_im + 0.5 * self.width - (row as f64 + 0.5) * step;
        Complex64::new(re, im)
    }
}

pub fn compute(fam: &MapFamily, start: &StartPoint, window: Window, resolution: usize, tol: f64) -> PlotGrid {
    let pixels: Vec<(usize, usize)> = (0..resolution).flat_map(|r| (0..resolution).map(move |c| (r, c))).collect();
    let out = par_map(&pixels, |&(r, c)| {
        fam.arch_escape_at(start, window.pixel_center(resolution, r, c), tol).ok().map(|(v, _)| v.max(0.0))
    });
    let failed = out.iter().filter(|v| v.is_none()).count();
    PlotGrid { window, resolution, values: out.into_iter().map(|v| v.unwrap_or(0.0)).collect(), failed }
}

pub fn v_max(values: &[f64]) -> f64 {
    values.iter().copied().filter(|v| v.is_finite()).fold(0.0, f64::max)
}

/// `clamp(round(255 v / v_max))`, all zero when `v_max = 0`.
pub fn to_bytes(values: &[f64]) -> Vec<u8> {
    let vmax = v_max(values);
    values
        .iter()
        .map(|&v| if vmax > 0.0 && v.is_finite() { (255.0 * v / vmax).round().clamp(0.0, 255.0) as u8 } else { 0 })
        .collect()
}

pub fn pgm(resolution: usize, bytes: &[u8]) -> Vec<u8> {
    let mut out = format!("P5\n{resolution} {resolution}\n255\n").into_bytes();
    out.extend_from_slice(bytes);
    out
}

/// Writes `<stem>.pgm` and the `<stem>.json` sidecar.
pub fn emit(grid: &PlotGrid, dir: &Path, stem: &str, seed: u64) -> std::io::Result<()> {
    fs::create_dir_all(dir)?;
    fs::File::create(dir.join(format!("{stem}.pgm")))?.write_all(&pgm(grid.resolution, &to_bytes(&grid.values)))?;
    let side = Sidecar {
        window: &grid.window,
        resolution: grid.resolution,
        v_max: v_max(&grid.values),
        seed,
        failed_pixels: grid.failed,
        value: "archimedean escape rate of the start point",
    };
    let mut f = fs::File::create(dir.join(format!("{stem}.json")))?;
    serde_json::to_writer_pretty(&mut f, &side)?;
    f.write_all(b"\n")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_grid_is_black() {
        assert!(to_bytes(&[0.0; 16]).iter().all(|&b| b == 0));
    }

    #[test]
    fn single_positive_pixel() {
        let mut v = vec![0.0; 9];
        v[4] = 0.3;
        let b = to_bytes(&v);
        assert_eq!(b.iter().filter(|&&x| x != 0).count(), 1);
        assert_eq!(b[4], 255);
    }

    #[test]
    fn proportional_bytes() {
        assert_eq!(to_bytes(&[0.0, 1.0, 1.0, 4.0]), vec![0, 64, 64, 255]);
        assert_eq!(to_bytes(&[0.0, 2.0, 2.0, 4.0]), vec![0, 128, 128, 255]);
    }

    #[test]
    fn header_and_geometry() {
        let out = pgm(2, &[0, 1, 2, 3]);
        assert_eq!(&out[..11], b"P5\n2 2\n255\n");
        assert_eq!(out.len(), 15);
        let w = Window { center_re: 0.0, center_im: 0.0, width: 4.0 };
        assert_eq!(w.pixel_center(2, 0, 0), Complex64::new(-1.0, 1.0));
        assert_eq!(w.pixel_center(2, 1, 1), Complex64::new(1.0, -1.0));
    }
}
