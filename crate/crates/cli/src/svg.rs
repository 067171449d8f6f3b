//! Static SVG renderings of interval unions on a shared real axis.

use std::fmt::Write;

use borg_spectra::Interval;

pub const WIDTH: f64 = 800.0;
pub const ROW_HEIGHT: f64 = 120.0;
const MARGIN: f64 = 40.0;

pub struct Row {
    pub label: String,
    pub intervals: Vec<Interval>,
    /// Draw each interval as the planar stadium `[lo, hi] + Δ_r`.
    pub stadium_radius: Option<f64>,
}

struct Axis {
    lo: f64,
    hi: f64,
}

impl Axis {
    /// The hull of all rows, widened by 10% on each side.
    fn covering(rows: &[Row]) -> Axis {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for row in rows {
            let r = row.stadium_radius.unwrap_or(0.0);
            for i in &row.intervals {
                lo = lo.min(i.lo - r);
                hi = hi.max(i.hi + r);
            }
        }
        if !lo.is_finite() {
            return Axis { lo: -1.0, hi: 1.0 };
        }
        let pad = if hi > lo { 0.1 * (hi - lo) } else { 1.0 };
        Axis { lo: lo - pad, hi: hi + pad }
    }

    fn scale(&self) -> f64 {
        (WIDTH - 2.0 * MARGIN) / (self.hi - self.lo)
    }

    fn x(&self, t: f64) -> f64 {
        MARGIN + (t - self.lo) * self.scale()
    }
}

fn fmt(x: f64) -> String {
    format!("{x:.3}")
}

pub fn render(rows: &[Row]) -> String {
    let axis = Axis::covering(rows);
    let height = ROW_HEIGHT * rows.len().max(1) as f64;
    let mut out = String::new();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#,
        w = WIDTH,
        h = height
    )
    .unwrap();
    writeln!(out, r#"<rect width="{WIDTH}" height="{height}" fill="white"/>"#).unwrap();
    for (k, row) in rows.iter().enumerate() {
        let top = k as f64 * ROW_HEIGHT;
        let mid = top + ROW_HEIGHT / 2.0;
        writeln!(out, r#"<g>"#).unwrap();
        writeln!(
            out,
            r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="gray" stroke-width="1"/>"#,
            fmt(MARGIN),
            fmt(mid),
            fmt(WIDTH - MARGIN),
            fmt(mid)
        )
        .unwrap();
        writeln!(
            out,
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="12">{}</text>"#,
            fmt(MARGIN),
            fmt(top + 16.0),
            escape(&row.label)
        )
        .unwrap();
        for (t, anchor) in [(axis.lo, "start"), (axis.hi, "end")] {
            writeln!(
                out,
                r#"<text x="{}" y="{}" font-family="sans-serif" font-size="10" text-anchor="{anchor}">{}</text>"#,
                fmt(axis.x(t)),
                fmt(top + ROW_HEIGHT - 8.0),
                fmt(t)
            )
            .unwrap();
        }
        for i in &row.intervals {
            match row.stadium_radius {
                Some(r) if r > 0.0 => {
                    let ry = (r * axis.scale()).min(ROW_HEIGHT / 2.0 - 4.0);
                    let rx = r * axis.scale();
                    let (x0, x1) = (axis.x(i.lo), axis.x(i.hi));
                    writeln!(
                        out,
                        r#"<path d="M {a} {t} L {b} {t} A {rx} {ry} 0 0 1 {b} {bt} L {a} {bt} A {rx} {ry} 0 0 1 {a} {t} Z" fill="steelblue" fill-opacity="0.35" stroke="steelblue"/>"#,
                        a = fmt(x0),
                        b = fmt(x1),
                        t = fmt(mid - ry),
                        bt = fmt(mid + ry),
                        rx = fmt(rx),
                        ry = fmt(ry)
                    )
                    .unwrap();
                    writeln!(
                        out,
                        r#"<line x1="{}" y1="{m}" x2="{}" y2="{m}" stroke="black" stroke-width="3"/>"#,
                        fmt(x0),
                        fmt(x1),
                        m = fmt(mid)
                    )
                    .unwrap();
                }
                _ => {
                    writeln!(
                        out,
                        r#"<rect class="segment" x="{}" y="{}" width="{}" height="8" fill="black"/>"#,
                        fmt(axis.x(i.lo)),
                        fmt(mid - 4.0),
                        fmt((axis.x(i.hi) - axis.x(i.lo)).max(0.5))
                    )
                    .unwrap();
                }
            }
        }
        writeln!(out, "</g>").unwrap();
    }
    out.push_str("</svg>\n");
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
