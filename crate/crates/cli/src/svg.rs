//! SVG previews of image-count grids and curves. Data is always also written
//! as CSV; these files are for looking at.

use std::fmt::Write;

use lensfix_core::caustics::MASKED;
use lensfix_core::{Complex, MultiplicityGrid, Polyline, Window};

use crate::fmt::num;

const CANVAS: f64 = 600.0;
const LEGEND_HEIGHT: f64 = 40.0;

struct Frame {
    x0: f64,
    y0: f64,
    scale: f64,
    height: f64,
}

impl Frame {
    fn for_window(w: &Window) -> Self {
        let (width, height) = (2.0 * w.half_width, 2.0 * w.half_height);
        let scale = CANVAS / width.max(height);
        Frame {
            x0: w.center.re - w.half_width,
            y0: w.center.im - w.half_height,
            scale,
            height: height * scale,
        }
    }

    /// Plane to pixel, with y pointing up.
    fn px(&self, z: Complex) -> (f64, f64) {
        (
            (z.re - self.x0) * self.scale,
            self.height - (z.im - self.y0) * self.scale,
        )
    }
}

fn gray(count: i32, max_count: i32) -> String {
    let level = if max_count > 0 {
        235 - (count as f64 / max_count as f64 * 200.0).round() as i32
    } else {
        235
    };
    format!("rgb({level},{level},{level})")
}

fn header(out: &mut String, width: f64, height: f64) {
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">",
        num(width),
        num(height),
        num(width),
        num(height)
    );
}

fn polylines(out: &mut String, frame: &Frame, lines: &[Polyline], color: &str) {
    for line in lines {
        let pts: Vec<String> = line
            .iter()
            .map(|&z| {
                let (x, y) = frame.px(z);
                format!("{},{}", num(x), num(y))
            })
            .collect();
        let _ = writeln!(
            out,
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"/>",
            pts.join(" ")
        );
    }
}

/// Count grid as grayscale cells (darker is more images; masked nodes left
/// blank), caustics overlaid in red, legend along the bottom.
pub fn scan(grid: &MultiplicityGrid) -> String {
    let w = &grid.window;
    let frame = Frame::for_window(w);
    let width = 2.0 * w.half_width * frame.scale;
    let mut out = String::new();
    header(&mut out, width, frame.height + LEGEND_HEIGHT);
    let (cw, ch) = (w.dx() * frame.scale, w.dy() * frame.scale);
    for j in 0..w.ny {
        for i in 0..w.nx {
            let count = grid.count(i, j);
            if count == MASKED {
                continue;
            }
            let (x, y) = frame.px(w.node(i, j));
            let _ = writeln!(
                out,
                "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{}\"/>",
                num(x - cw / 2.0),
                num(y - ch / 2.0),
                num(cw),
                num(ch),
                gray(count, grid.max_count)
            );
        }
    }
    polylines(&mut out, &frame, &grid.caustic_polylines, "red");
    let top = frame.height + 10.0;
    for k in 0..=grid.max_count.max(0) {
        let x = 10.0 + 60.0 * k as f64;
        let _ = writeln!(
            out,
            "<rect x=\"{}\" y=\"{}\" width=\"20\" height=\"20\" fill=\"{}\" stroke=\"black\"/>",
            num(x),
            num(top),
            gray(k, grid.max_count)
        );
        let _ = writeln!(
            out,
            "<text x=\"{}\" y=\"{}\" font-size=\"14\">{k}</text>",
            num(x + 25.0),
            num(top + 15.0)
        );
    }
    let _ = writeln!(
        out,
        "<text x=\"{}\" y=\"{}\" font-size=\"14\">max_count = {}</text>",
        num(width - 130.0),
        num(top + 15.0),
        grid.max_count
    );
    out.push_str("</svg>\n");
    out
}

/// Critical curves (blue) and caustics (red) in the frame of `window`.
pub fn curves(window: &Window, critical: &[Polyline], caustic: &[Polyline]) -> String {
    let frame = Frame::for_window(window);
    let width = 2.0 * window.half_width * frame.scale;
    let mut out = String::new();
    header(&mut out, width, frame.height);
    polylines(&mut out, &frame, critical, "blue");
    polylines(&mut out, &frame, caustic, "red");
    out.push_str("</svg>\n");
    out
}
