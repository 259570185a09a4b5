//! Artifact writers: CSV tables with stable column order, pretty JSON, and
//! self-contained SVG line plots. Every file embeds the seed and a digest of
//! the resolved configuration through the run manifest; nothing here writes
//! timestamps, so reruns are byte identical.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::Result;

/// A CSV table: leading seed comment, one header row, stable column order.
pub struct CsvTable {
    buf: String,
    columns: usize,
}

impl CsvTable {
    pub fn new(seed: u64, header: &[&str]) -> Self {
        let mut buf = String::new();
        let _ = writeln!(buf, "# seed={seed}");
        let _ = writeln!(buf, "{}", header.join(","));
        CsvTable {
            buf,
            columns: header.len(),
        }
    }

    pub fn row(&mut self, cells: &[String]) {
        assert_eq!(cells.len(), self.columns, "column count mismatch");
        let _ = writeln!(self.buf, "{}", cells.join(","));
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        fs::write(path, self.buf.as_bytes())?;
        Ok(())
    }
}

pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else {
        format!("{v:.12e}")
    }
}

pub fn write_json(path: &Path, value: &serde_json::Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text.as_bytes())?;
    Ok(())
}

/// One line series for the SVG plot.
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    pub color: &'static str,
    pub dashed: bool,
}

/// Minimal self-contained SVG line plot; log-scale axes are handled by
/// transforming the data before plotting and labeling accordingly.
pub struct LinePlot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub log_x: bool,
    pub log_y: bool,
    pub series: Vec<Series>,
}

pub const PALETTE: [&str; 6] = ["#1f6fb2", "#c4452c", "#3a8c3f", "#8252a1", "#b07f26", "#3b3b3b"];

impl LinePlot {
    pub fn render(&self) -> String {
        let width = 760.0;
        let height = 480.0;
        let ml = 70.0;
        let mr = 170.0;
        let mt = 40.0;
        let mb = 55.0;

        let tx = |v: f64| if self.log_x { v.ln() } else { v };
        let ty = |v: f64| if self.log_y { v.ln() } else { v };
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for s in &self.series {
            for &(x, y) in &s.points {
                if (self.log_x && x <= 0.0) || (self.log_y && y <= 0.0) {
                    continue;
                }
                if x.is_finite() && y.is_finite() {
                    xs.push(tx(x));
                    ys.push(ty(y));
                }
            }
        }
        let (x0, x1) = span(&xs);
        let (y0, y1) = span(&ys);
        let px = |v: f64| ml + (v - x0) / (x1 - x0) * (width - ml - mr);
        let py = |v: f64| height - mb - (v - y0) / (y1 - y0) * (height - mt - mb);

        let mut svg = String::new();
        let _ = writeln!(
            svg,
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" viewBox=\"0 0 {width} {height}\">"
        );
        let _ = writeln!(svg, "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>");
        let _ = writeln!(
            svg,
            "<text x=\"{}\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\" text-anchor=\"middle\">{}</text>",
            (ml + width - mr) / 2.0,
            xml_escape(&self.title)
        );
        // frame
        let _ = writeln!(
            svg,
            "<rect x=\"{ml}\" y=\"{mt}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#444\"/>",
            width - ml - mr,
            height - mt - mb
        );
        // axis ticks: four per axis in the transformed scale
        for i in 0..=4 {
            let fx = x0 + (x1 - x0) * i as f64 / 4.0;
            let fy = y0 + (y1 - y0) * i as f64 / 4.0;
            let label_x = if self.log_x { fx.exp() } else { fx };
            let label_y = if self.log_y { fy.exp() } else { fy };
            let _ = writeln!(
                svg,
                "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">{}</text>",
                px(fx),
                height - mb + 18.0,
                short_num(label_x)
            );
            let _ = writeln!(
                svg,
                "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">{}</text>",
                ml - 6.0,
                py(fy) + 4.0,
                short_num(label_y)
            );
        }
        let _ = writeln!(
            svg,
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\">{}</text>",
            (ml + width - mr) / 2.0,
            height - 12.0,
            xml_escape(&self.x_label)
        );
        let _ = writeln!(
            svg,
            "<text x=\"18\" y=\"{}\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 18 {})\">{}</text>",
            (mt + height - mb) / 2.0,
            (mt + height - mb) / 2.0,
            xml_escape(&self.y_label)
        );

        for (i, s) in self.series.iter().enumerate() {
            let mut d = String::new();
            for &(x, y) in &s.points {
                if (self.log_x && x <= 0.0) || (self.log_y && y <= 0.0) {
                    continue;
                }
                if !(x.is_finite() && y.is_finite()) {
                    continue;
                }
                let cmd = if d.is_empty() { 'M' } else { 'L' };
                let _ = write!(d, "{cmd}{:.2},{:.2} ", px(tx(x)), py(ty(y)));
            }
            let dash = if s.dashed { " stroke-dasharray=\"6,4\"" } else { "" };
            let _ = writeln!(
                svg,
                "<path d=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1.8\"{dash}/>",
                d.trim_end(),
                s.color
            );
            for &(x, y) in &s.points {
                if (self.log_x && x <= 0.0) || (self.log_y && y <= 0.0) {
                    continue;
                }
                if !(x.is_finite() && y.is_finite()) {
                    continue;
                }
                let _ = writeln!(
                    svg,
                    "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"2.6\" fill=\"{}\"/>",
                    px(tx(x)),
                    py(ty(y)),
                    s.color
                );
            }
            let ly = mt + 16.0 * (i as f64 + 1.0);
            let _ = writeln!(
                svg,
                "<line x1=\"{:.1}\" y1=\"{ly}\" x2=\"{:.1}\" y2=\"{ly}\" stroke=\"{}\" stroke-width=\"2\"{dash}/>",
                width - mr + 10.0,
                width - mr + 34.0,
                s.color
            );
            let _ = writeln!(
                svg,
                "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"11\">{}</text>",
                width - mr + 40.0,
                ly + 4.0,
                xml_escape(&s.label)
            );
        }
        svg.push_str("</svg>\n");
        svg
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        fs::write(path, self.render().as_bytes())?;
        Ok(())
    }
}

fn span(vals: &[f64]) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &v in vals {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if !lo.is_finite() || !hi.is_finite() {
        return (0.0, 1.0);
    }
    if (hi - lo).abs() < 1e-12 {
        (lo - 0.5, hi + 0.5)
    } else {
        let pad = (hi - lo) * 0.05;
        (lo - pad, hi + pad)
    }
}

fn short_num(v: f64) -> String {
    let a = v.abs();
    if a != 0.0 && (a >= 1e4 || a < 1e-3) {
        format!("{v:.1e}")
    } else {
        format!("{v:.3}")
    }
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
