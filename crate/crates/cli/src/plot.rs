//! Hand-emitted SVG of a sweep: median ratios to `sqrt(np)` against `c`.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{read_file, write_file, CliError};
use crate::median;
use crate::sweep::{parse_sweep_csv, SweepRow};

pub const WIDTH: f64 = 960.0;
pub const HEIGHT: f64 = 540.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 200.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;

struct Series {
    label: &'static str,
    color: &'static str,
    points: Vec<(f64, f64)>,
}

fn series(rows: &[SweepRow]) -> Vec<Series> {
    let mut cs: Vec<f64> = rows.iter().map(|r| r.c).collect();
    cs.sort_by(f64::total_cmp);
    cs.dedup();
    let med = |f: &dyn Fn(&SweepRow) -> f64| -> Vec<(f64, f64)> {
        cs.iter()
            .filter_map(|&c| {
                let mut v: Vec<f64> = rows.iter().filter(|r| r.c == c).map(|r| f(r)).filter(|x| x.is_finite()).collect();
                (!v.is_empty()).then(|| (c, median(&mut v)))
            })
            .collect()
    };
    let sq = |r: &SweepRow| r.two_sqrt_np / 2.0;
    vec![
        Series { label: "|lambda_(|k|)| / sqrt(np)", color: "#1f77b4", points: med(&|r| r.lambda_abs_k / sq(r)) },
        Series { label: "rho / sqrt(np)", color: "#d62728", points: med(&|r| r.rho / sq(r)) },
        Series { label: "rho_G / sqrt(np)", color: "#2ca02c", points: med(&|r| r.rho_g_pred / sq(r)) },
    ]
}

/// Tick step from `{1, 2, 5} x 10^j` giving at most 8 intervals.
fn tick_step(span: f64) -> f64 {
    let raw = span / 8.0;
    let mag = 10f64.powf(raw.log10().floor());
    [1.0, 2.0, 5.0, 10.0].into_iter().map(|m| m * mag).find(|s| *s >= raw).unwrap_or(10.0 * mag)
}

fn ticks(lo: f64, hi: f64) -> (f64, f64, Vec<f64>) {
    let span = if hi > lo { hi - lo } else { 1.0 };
    let step = tick_step(span);
    let start = (lo / step).floor() * step;
    let end = (hi / step).ceil() * step;
    let count = ((end - start) / step).round() as usize;
    let ts = (0..=count).map(|i| start + i as f64 * step).collect();
    (start, end.max(start + step), ts)
}

fn fmt_tick(v: f64) -> String {
    let s = format!("{:.3}", v);
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

/// SVG document for a parsed sweep; byte-identical for identical rows.
pub fn render_svg(rows: &[SweepRow]) -> Result<String, CliError> {
    let all = series(rows);
    let ys: Vec<f64> = all.iter().flat_map(|s| s.points.iter().map(|p| p.1)).collect();
    if ys.is_empty() {
        return Err(CliError::Config("sweep CSV has no finite values to plot".into()));
    }
    let xs: Vec<f64> = rows.iter().map(|r| r.c).collect();
    let (x0, x1, xt) = ticks(xs.iter().copied().fold(f64::INFINITY, f64::min), xs.iter().copied().fold(f64::NEG_INFINITY, f64::max));
    let (y0, y1, yt) = ticks(ys.iter().copied().fold(f64::INFINITY, f64::min), ys.iter().copied().fold(f64::NEG_INFINITY, f64::max));
    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let px = |x: f64| LEFT + (x - x0) / (x1 - x0) * pw;
    let py = |y: f64| TOP + (y1 - y) / (y1 - y0) * ph;

    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(s, r#"<g stroke="black" stroke-width="1">"#);
    let _ = writeln!(s, r#"<line x1="{LEFT}" y1="{:.2}" x2="{:.2}" y2="{:.2}"/>"#, TOP + ph, LEFT + pw, TOP + ph);
    let _ = writeln!(s, r#"<line x1="{LEFT}" y1="{TOP}" x2="{LEFT}" y2="{:.2}"/>"#, TOP + ph);
    for &t in &xt {
        let _ = writeln!(s, r#"<line x1="{0:.2}" y1="{1:.2}" x2="{0:.2}" y2="{2:.2}"/>"#, px(t), TOP + ph, TOP + ph + 5.0);
    }
    for &t in &yt {
        let _ = writeln!(s, r#"<line x1="{0:.2}" y1="{1:.2}" x2="{2:.2}" y2="{1:.2}"/>"#, LEFT - 5.0, py(t), LEFT);
    }
    let _ = writeln!(s, "</g>");
    let _ = writeln!(s, r#"<g fill="black">"#);
    for &t in &xt {
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#, px(t), TOP + ph + 20.0, fmt_tick(t));
    }
    for &t in &yt {
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#, LEFT - 8.0, py(t) + 4.0, fmt_tick(t));
    }
    let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">np / log n</text>"#, LEFT + pw / 2.0, HEIGHT - 15.0);
    let _ = writeln!(
        s,
        r#"<text x="20" y="{0:.2}" text-anchor="middle" transform="rotate(-90 20 {0:.2})">median ratio to sqrt(np)</text>"#,
        TOP + ph / 2.0
    );
    let _ = writeln!(s, "</g>");
    for (i, se) in all.iter().enumerate() {
        let pts: Vec<String> = se.points.iter().map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y))).collect();
        let _ = writeln!(s, r#"<polyline fill="none" stroke="{}" stroke-width="2" points="{}"/>"#, se.color, pts.join(" "));
        let ly = TOP + 20.0 + 22.0 * i as f64;
        let lx = LEFT + pw + 15.0;
        let _ = writeln!(s, r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{}" stroke-width="2"/>"#, lx + 25.0, se.color);
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}">{}</text>"#, lx + 32.0, ly + 4.0, se.label);
    }
    let _ = writeln!(s, "</svg>");
    Ok(s)
}

/// Reads a sweep CSV and writes the SVG; nothing is written on error.
pub fn emit_plot(csv_path: &Path, out_svg: &Path) -> Result<(), CliError> {
    let rows = parse_sweep_csv(&read_file(csv_path)?)?;
    let svg = render_svg(&rows)?;
    write_file(out_svg, &svg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ticks_are_round() {
        assert_eq!(tick_step(9.5), 2.0);
        let (lo, hi, t) = ticks(0.5, 10.0);
        assert_eq!((lo, hi), (0.0, 10.0));
        assert_eq!(t.len(), 6);
        assert_eq!(fmt_tick(1.250), "1.25");
        assert_eq!(fmt_tick(2.0), "2");
    }
}
