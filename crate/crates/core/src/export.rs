//! File emitters: JSON reports, histogram CSV and a minimal SVG polyline
//! writer for traces and profiles.

use std::fmt::Write as _;
use std::io::{self, Write};

use serde::Serialize;

use crate::walk::{EdgeProfile, WalkTrace};

/// Pretty JSON with a trailing newline.
pub fn write_json<T: Serialize, W: Write>(value: &T, mut out: W) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)
}

/// CSV with columns `bin_lo,bin_hi,count` for equal cells of `[lo, hi]`.
pub fn write_histogram_csv<W: Write>(
    counts: &[u64],
    lo: f64,
    hi: f64,
    mut out: W,
) -> io::Result<()> {
    writeln!(out, "bin_lo,bin_hi,count")?;
    let w = (hi - lo) / counts.len() as f64;
    for (i, c) in counts.iter().enumerate() {
        writeln!(
            out,
            "{},{},{}",
            lo + i as f64 * w,
            lo + (i + 1) as f64 * w,
            c
        )?;
    }
    Ok(())
}

/// A single polyline on a white canvas with the data range in the corner.
#[derive(Debug, Clone)]
pub struct Polyline<'a> {
    pub title: &'a str,
    pub x_label: &'a str,
    pub y_label: &'a str,
    pub points: Vec<(f64, f64)>,
    pub width: f64,
    pub height: f64,
}

impl<'a> Polyline<'a> {
    pub fn new(title: &'a str, points: Vec<(f64, f64)>) -> Self {
        Polyline {
            title,
            x_label: "",
            y_label: "",
            points,
            width: 800.0,
            height: 400.0,
        }
    }

    pub fn labels(mut self, x: &'a str, y: &'a str) -> Self {
        self.x_label = x;
        self.y_label = y;
        self
    }

    pub fn to_svg(&self) -> String {
        let margin = 40.0;
        let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
        for &(x, y) in &self.points {
            x0 = x0.min(x);
            x1 = x1.max(x);
            y0 = y0.min(y);
            y1 = y1.max(y);
        }
        if self.points.is_empty() {
            (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
        }
        let sx = (self.width - 2.0 * margin) / (x1 - x0).max(1e-12);
        let sy = (self.height - 2.0 * margin) / (y1 - y0).max(1e-12);
        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#,
            w = self.width,
            h = self.height
        );
        let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
        let _ = writeln!(
            s,
            r#"<text x="{margin}" y="24" font-size="14">{}</text>"#,
            escape(self.title)
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" font-size="11" text-anchor="end">{} [{}, {}]  {} [{}, {}]</text>"#,
            self.width - margin,
            self.height - 10.0,
            escape(self.x_label),
            x0,
            x1,
            escape(self.y_label),
            y0,
            y1
        );
        s.push_str(r#"<polyline fill="none" stroke="black" stroke-width="1" points=""#);
        for (i, &(x, y)) in self.points.iter().enumerate() {
            if i > 0 {
                s.push(' ');
            }
            let px = margin + (x - x0) * sx;
            let py = self.height - margin - (y - y0) * sy;
            let _ = write!(s, "{px:.2},{py:.2}");
        }
        s.push_str("\"/>\n</svg>\n");
        s
    }
}

fn escape(t: &str) -> String {
    t.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// `(n, X_n)` as a polyline.
pub fn trace_svg(trace: &WalkTrace) -> String {
    let pts = trace
        .positions
        .iter()
        .enumerate()
        .map(|(n, &x)| (n as f64, x as f64))
        .collect();
    Polyline::new("walk trace", pts).labels("n", "X").to_svg()
}

/// The local time profile `e ↦ ℓ(e)` over its support.
pub fn profile_svg(profile: &EdgeProfile) -> String {
    let pts = profile
        .rows()
        .map(|(e, l)| (e as f64 + 0.5, l as f64))
        .collect();
    Polyline::new("local time", pts)
        .labels("edge", "ell")
        .to_svg()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SeedSpec;

    #[test]
    fn svg_has_one_vertex_per_point() {
        let svg = Polyline::new("t", vec![(0.0, 0.0), (1.0, 2.0), (2.0, 1.0)]).to_svg();
        assert!(svg.starts_with("<svg"));
        let pts = svg
            .split("points=\"")
            .nth(1)
            .unwrap()
            .split('"')
            .next()
            .unwrap();
        assert_eq!(pts.split(' ').count(), 3);
    }

    #[test]
    fn empty_and_flat_series_render() {
        assert!(Polyline::new("e", vec![]).to_svg().contains("</svg>"));
        let flat = Polyline::new("f", vec![(0.0, 1.0), (1.0, 1.0)]).to_svg();
        assert!(!flat.contains("NaN") && !flat.contains("inf"));
    }

    #[test]
    fn title_is_escaped() {
        assert!(Polyline::new("a<b", vec![]).to_svg().contains("a&lt;b"));
    }

    #[test]
    fn trace_svg_covers_the_trace() {
        let t = crate::walk::run(50, SeedSpec::new(2));
        let svg = trace_svg(&t);
        let pts = svg
            .split("points=\"")
            .nth(1)
            .unwrap()
            .split('"')
            .next()
            .unwrap();
        assert_eq!(pts.split(' ').count(), 51);
    }

    #[test]
    fn histogram_csv_rows() {
        let mut buf = Vec::new();
        write_histogram_csv(&[1, 2], 0.0, 1.0, &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "bin_lo,bin_hi,count\n0,0.5,1\n0.5,1,2\n"
        );
    }
}
