//! PNG rendering of phase diagrams.
//!
//! Colour maps are fixed so images from different runs compare directly:
//! - `pearson`: -1 blue (33, 102, 172), 0 white, +1 red (178, 24, 43),
//!   linear in between.
//! - `nm_*`: 0 black, 0.5 orange (230, 110, 20), 1 pale yellow
//!   (252, 253, 191), on values divided by the diagram maximum (or taken as
//!   is when the maximum is not positive).
//!
//! Missing cells are mid grey. Flagged cells get a grey centre dot. Low `y`
//! is at the bottom.

use crate::error::{Error, Result};
use crate::experiments::{Metric, PhaseDiagram};
use image::{Rgb, RgbImage};
use std::path::Path;

/// Pixels per cell edge.
const CELL: u32 = 16;
const MISSING: Rgb<u8> = Rgb([128, 128, 128]);

fn lerp(a: [u8; 3], b: [u8; 3], t: f64) -> Rgb<u8> {
    let t = t.clamp(0.0, 1.0);
    let c = |i: usize| (a[i] as f64 + (b[i] as f64 - a[i] as f64) * t).round() as u8;
    Rgb([c(0), c(1), c(2)])
}

/// Colour of a cell value; `scale` is the divisor for memory measures.
pub fn color_for(metric: Metric, v: f64, scale: f64) -> Rgb<u8> {
    match metric {
        Metric::Pearson => {
            const BLUE: [u8; 3] = [33, 102, 172];
            const WHITE: [u8; 3] = [255, 255, 255];
            const RED: [u8; 3] = [178, 24, 43];
            if v < 0.0 {
                lerp(WHITE, BLUE, -v)
            } else {
                lerp(WHITE, RED, v)
            }
        }
        Metric::NmTrace | Metric::NmEntanglement => {
            const BLACK: [u8; 3] = [0, 0, 0];
            const ORANGE: [u8; 3] = [230, 110, 20];
            const PALE: [u8; 3] = [252, 253, 191];
            let u = if scale > 0.0 { v / scale } else { v };
            if u < 0.5 {
                lerp(BLACK, ORANGE, 2.0 * u)
            } else {
                lerp(ORANGE, PALE, 2.0 * u - 1.0)
            }
        }
    }
}

pub fn render(d: &PhaseDiagram) -> RgbImage {
    let scale = d.values().fold(0.0, f64::max);
    let (nx, ny) = (d.nx() as u32, d.ny() as u32);
    let mut img = RgbImage::new(nx * CELL, ny * CELL);
    for iy in 0..ny {
        for ix in 0..nx {
            let c = match d.get(ix as usize, iy as usize) {
                Some(v) => color_for(d.metric, v, scale),
                None => MISSING,
            };
            let flagged = d.flagged.contains(&(ix as usize, iy as usize));
            let top = (ny - 1 - iy) * CELL;
            for py in 0..CELL {
                for px in 0..CELL {
                    let centre = (6..10).contains(&px) && (6..10).contains(&py);
                    let pix = if flagged && centre { MISSING } else { c };
                    img.put_pixel(ix * CELL + px, top + py, pix);
                }
            }
        }
    }
    img
}

pub fn write_heatmap(d: &PhaseDiagram, path: &Path) -> Result<()> {
    render(d).save(path).map_err(|e| match e {
        image::ImageError::IoError(io) => Error::io(path, io),
        other => Error::Format {
            path: path.display().to_string(),
            message: other.to_string(),
        },
    })
}
