//! CSV emission and a small SVG line plot.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{io_error, Error, Result};
use crate::sweep::OutputRow;

pub const CSV_HEADER: &str =
    "tau,beta,y1,y2,y3,tau_d,abs_a,purity,qsl_ml,qsl_mt,qsl_unified,solver_used,est_error";

/// Writes rows to any `Write`. Floats use the shortest round-trip representation.
pub fn write_rows<W: std::io::Write>(rows: &[OutputRow], out: W) -> std::result::Result<(), csv::Error> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(CSV_HEADER.split(','))?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn rows_to_csv_string(rows: &[OutputRow]) -> String {
    let mut buf = Vec::new();
    write_rows(rows, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("csv output is utf-8")
}

pub fn write_csv(rows: &[OutputRow], path: &Path) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| io_error(path, e))?;
    write_rows(rows, std::io::BufWriter::new(file)).map_err(|e| io_error(path, e))
}

pub fn read_rows<R: std::io::Read>(input: R) -> std::result::Result<Vec<OutputRow>, csv::Error> {
    let mut r = csv::Reader::from_reader(input);
    r.deserialize().collect()
}

pub fn read_csv(path: &Path) -> Result<Vec<OutputRow>> {
    let file = fs::File::open(path).map_err(|e| io_error(path, e))?;
    let mut r = csv::Reader::from_reader(file);
    let header: Vec<String> = r
        .headers()
        .map_err(|e| io_error(path, e))?
        .iter()
        .map(str::to_string)
        .collect();
    if header.join(",") != CSV_HEADER {
        return Err(io_error(path, format!("unexpected header `{}`", header.join(","))));
    }
    r.deserialize().collect::<std::result::Result<_, _>>().map_err(|e| io_error(path, e))
}

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const MARGIN_L: f64 = 80.0;
const MARGIN_R: f64 = 170.0;
const MARGIN_T: f64 = 30.0;
const MARGIN_B: f64 = 60.0;
const COLORS: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf",
];

fn nice_ticks(lo: f64, hi: f64, target: usize) -> Vec<f64> {
    let span = (hi - lo).max(f64::MIN_POSITIVE);
    let raw = span / target as f64;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * mag);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last).map(|k| k as f64 * step).collect()
}

fn fmt_tick(v: f64) -> String {
    let s = format!("{:.4}", v);
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".into() } else { s.to_string() }
}

/// Renders `qsl_unified` against `tau`, one polyline per velocity.
pub fn render_svg(rows: &[OutputRow]) -> Result<String> {
    if rows.is_empty() {
        return Err(Error::InvalidParameter {
            name: "plot",
            reason: "no rows to plot".into(),
        });
    }
    let groups = crate::analysis::group_by_beta(rows);
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for r in rows {
        x0 = x0.min(r.tau);
        x1 = x1.max(r.tau);
        y0 = y0.min(r.qsl_unified);
        y1 = y1.max(r.qsl_unified);
    }
    if x1 <= x0 {
        x0 -= 0.5;
        x1 += 0.5;
    }
    if y1 <= y0 {
        let pad = y0.abs().max(1.0) * 0.05;
        y0 -= pad;
        y1 += pad;
    }
    let pw = WIDTH - MARGIN_L - MARGIN_R;
    let ph = HEIGHT - MARGIN_T - MARGIN_B;
    let sx = |x: f64| MARGIN_L + (x - x0) / (x1 - x0) * pw;
    let sy = |y: f64| MARGIN_T + (1.0 - (y - y0) / (y1 - y0)) * ph;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<rect x="{MARGIN_L}" y="{MARGIN_T}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    );
    for t in nice_ticks(x0, x1, 6) {
        let x = sx(t);
        let yb = MARGIN_T + ph;
        let _ = writeln!(s, r#"<line x1="{x:.2}" y1="{yb}" x2="{x:.2}" y2="{:.2}" stroke="black"/>"#, yb + 5.0);
        let _ = writeln!(s, r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"#, yb + 18.0, fmt_tick(t));
    }
    for t in nice_ticks(y0, y1, 6) {
        let y = sy(t);
        let _ = writeln!(s, r#"<line x1="{:.2}" y1="{y:.2}" x2="{MARGIN_L}" y2="{y:.2}" stroke="black"/>"#, MARGIN_L - 5.0);
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#, MARGIN_L - 8.0, y + 4.0, fmt_tick(t));
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">initial time τ (1/γ)</text>"#,
        MARGIN_L + pw / 2.0,
        HEIGHT - 15.0
    );
    let _ = writeln!(
        s,
        r#"<text x="20" y="{:.2}" text-anchor="middle" transform="rotate(-90 20 {:.2})">τ_QSL (1/γ)</text>"#,
        MARGIN_T + ph / 2.0,
        MARGIN_T + ph / 2.0
    );
    for (k, (beta, series)) in groups.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        let pts: Vec<String> = series
            .iter()
            .map(|r| format!("{:.2},{:.2}", sx(r.tau), sy(r.qsl_unified)))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            pts.join(" ")
        );
        let ly = MARGIN_T + 15.0 + 20.0 * k as f64;
        let lx = WIDTH - MARGIN_R + 15.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx}" y1="{ly}" x2="{:.2}" y2="{ly}" stroke="{color}" stroke-width="2"/>"#,
            lx + 25.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}">β = {}e-9</text>"#,
            lx + 32.0,
            ly + 4.0,
            fmt_tick(beta * 1e9)
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}

/// Writes the plot; nothing is created when `rows` is empty.
pub fn write_svg(rows: &[OutputRow], path: &Path) -> Result<()> {
    let svg = render_svg(rows)?;
    fs::write(path, svg).map_err(|e| io_error(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(tau: f64, beta: f64) -> OutputRow {
        OutputRow {
            tau,
            beta,
            y1: 3.0,
            y2: 1e9,
            y3: 0.0,
            tau_d: 1.0,
            abs_a: 0.1 + tau / 3.0,
            purity: 0.7,
            qsl_ml: 1.0 / 3.0,
            qsl_mt: 0.1,
            qsl_unified: 1.0 / 3.0 + tau,
            solver_used: "analytic".into(),
            est_error: 0.0,
        }
    }

    #[test]
    fn header_and_round_trip() {
        let rows = vec![row(0.0, 15e-9), row(0.1, 15e-9), row(0.0, 5e-8)];
        let text = rows_to_csv_string(&rows);
        assert!(text.starts_with(&format!("{CSV_HEADER}\n")));
        assert!(text.ends_with('\n'));
        assert_eq!(text.lines().count(), 4);
        assert_eq!(read_rows(text.as_bytes()).unwrap(), rows);
    }

    #[test]
    fn svg_has_series_and_legend() {
        let rows = vec![row(0.0, 15e-9), row(1.0, 15e-9), row(0.0, 5e-8), row(1.0, 5e-8)];
        let svg = render_svg(&rows).unwrap();
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.contains("β = 15e-9"));
        assert!(svg.contains("β = 50e-9"));
        assert!(svg.contains("τ_QSL"));
    }

    #[test]
    fn empty_plot_creates_nothing() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p.svg");
        assert!(write_svg(&[], &path).is_err());
        assert!(!path.exists());
    }
}
