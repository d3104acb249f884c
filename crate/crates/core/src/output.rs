//! Result files: the sweep CSV, an SVG plot drawn from it, and a dump of
//! the user drop.

use std::fmt::Write as _;
use std::io::{Read, Write};
use std::path::Path;

use crate::channel::{LargeScaleProfile, UserGeometry};
use crate::constants::linear_to_db;
use crate::error::{Error, Result};
use crate::rates::{Scheme, System};
use crate::sweep::{Axis, SweepRow};

pub const CSV_HEADER: [&str; 8] = [
    "axis", "value", "system", "scheme", "rate_mc", "rate_lb", "ci", "err",
];

fn parse_system(s: &str) -> Result<System> {
    System::ALL
        .into_iter()
        .find(|x| x.label() == s)
        .ok_or_else(|| Error::invalid("system", format!("unknown system `{s}`")))
}

fn parse_scheme(s: &str) -> Result<Scheme> {
    Scheme::ALL
        .into_iter()
        .find(|x| x.label() == s)
        .ok_or_else(|| Error::invalid("scheme", format!("unknown scheme `{s}`")))
}

pub fn write_csv_to<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.write_record([
            r.axis.label().to_string(),
            r.value.to_string(),
            r.system.label().to_string(),
            r.scheme.label().to_string(),
            r.rate_mc.to_string(),
            r.rate_lb.to_string(),
            r.ci.to_string(),
            r.err.clone(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_csv(rows: &[SweepRow], path: impl AsRef<Path>) -> Result<()> {
    if rows.is_empty() {
        return Err(Error::invalid("table", "nothing to write"));
    }
    let file = std::fs::File::create(path)?;
    write_csv_to(rows, std::io::BufWriter::new(file))
}

pub fn read_csv_from<R: Read>(input: R) -> Result<Vec<SweepRow>> {
    let mut rd = csv::Reader::from_reader(input);
    let header = rd.headers()?.clone();
    if header.iter().ne(CSV_HEADER) {
        return Err(Error::invalid(
            "csv",
            format!(
                "unexpected header `{}`",
                header.iter().collect::<Vec<_>>().join(",")
            ),
        ));
    }
    let num = |s: &str, name: &'static str| {
        s.parse::<f64>()
            .map_err(|_| Error::invalid(name, format!("not a number: `{s}`")))
    };
    rd.records()
        .map(|rec| {
            let rec = rec?;
            Ok(SweepRow {
                axis: rec[0].parse::<Axis>()?,
                value: num(&rec[1], "value")?,
                system: parse_system(&rec[2])?,
                scheme: parse_scheme(&rec[3])?,
                rate_mc: num(&rec[4], "rate_mc")?,
                rate_lb: num(&rec[5], "rate_lb")?,
                ci: num(&rec[6], "ci")?,
                err: rec[7].to_string(),
            })
        })
        .collect()
}

pub fn read_csv(path: impl AsRef<Path>) -> Result<Vec<SweepRow>> {
    read_csv_from(std::fs::File::open(path)?)
}

/// Writes one line per user: position, distance and large-scale gain.
pub fn write_geometry(
    geometry: &UserGeometry,
    profile: &LargeScaleProfile,
    path: impl AsRef<Path>,
) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["user", "x_m", "y_m", "distance_m", "beta_db"])?;
    for (k, (p, d)) in geometry
        .positions
        .iter()
        .zip(geometry.distances())
        .enumerate()
    {
        w.write_record([
            (k + 1).to_string(),
            p[0].to_string(),
            p[1].to_string(),
            d.to_string(),
            linear_to_db(profile.beta[k]).to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 180.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 60.0;

fn curve_color(system: System, scheme: Scheme) -> &'static str {
    match (system, scheme) {
        (System::Raq, Scheme::Zf) => "#d62728",
        (System::Raq, Scheme::Mrc) => "#ff7f0e",
        (System::Mmimo, Scheme::Zf) => "#1f77b4",
        (System::Mmimo, Scheme::Mrc) => "#17becf",
    }
}

/// Round step of roughly `span/6`.
fn tick_step(span: f64) -> f64 {
    let raw = span / 6.0;
    let mag = 10f64.powf(raw.log10().floor());
    [1.0, 2.0, 5.0, 10.0]
        .into_iter()
        .map(|m| m * mag)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * mag)
}

fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    let step = tick_step(hi - lo);
    let mut t = (lo / step).ceil() * step;
    let mut out = Vec::new();
    while t <= hi + 1e-9 * step {
        out.push(if t.abs() < 1e-12 * step { 0.0 } else { t });
        t += step;
    }
    out
}

fn fmt_tick(v: f64) -> String {
    let s = format!("{v:.2}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

/// Renders the rows as an SVG line chart: Monte Carlo curves solid, lower
/// bounds dashed. The output is a pure function of `rows`.
pub fn render_svg(rows: &[SweepRow]) -> Result<String> {
    let axis = rows
        .first()
        .ok_or_else(|| Error::invalid("table", "nothing to plot"))?
        .axis;
    let finite: Vec<&SweepRow> = rows
        .iter()
        .filter(|r| r.rate_mc.is_finite() && r.rate_lb.is_finite())
        .collect();
    let (mut x0, mut x1) = (f64::INFINITY, f64::NEG_INFINITY);
    let mut y1: f64 = 0.0;
    for r in &finite {
        x0 = x0.min(r.value);
        x1 = x1.max(r.value);
        y1 = y1.max(r.rate_mc).max(r.rate_lb);
    }
    if !x0.is_finite() {
        x0 = 0.0;
        x1 = 1.0;
    }
    if x1 <= x0 {
        x1 = x0 + 1.0;
    }
    let y1 = if y1 > 0.0 { y1 * 1.05 } else { 1.0 };
    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * pw;
    let sy = |y: f64| TOP + ph - y / y1 * ph;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(
        s,
        r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );
    for t in ticks(x0, x1) {
        let x = sx(t);
        let _ = writeln!(
            s,
            r##"<line x1="{x:.2}" y1="{TOP:.2}" x2="{x:.2}" y2="{:.2}" stroke="#e0e0e0"/>"##,
            TOP + ph
        );
        let _ = writeln!(
            s,
            r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            TOP + ph + 16.0,
            fmt_tick(t)
        );
    }
    for t in ticks(0.0, y1) {
        let y = sy(t);
        let _ = writeln!(
            s,
            r##"<line x1="{LEFT:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#e0e0e0"/>"##,
            LEFT + pw
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            LEFT - 6.0,
            y + 4.0,
            fmt_tick(t)
        );
    }
    let _ = writeln!(
        s,
        r#"<rect x="{LEFT:.2}" y="{TOP:.2}" width="{pw:.2}" height="{ph:.2}" fill="none" stroke="black"/>"#
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        LEFT + pw / 2.0,
        HEIGHT - 18.0,
        axis.title()
    );
    let _ = writeln!(
        s,
        r#"<text x="18" y="{:.2}" text-anchor="middle" transform="rotate(-90 18 {:.2})">Average achievable rate (bit/s/Hz/user)</text>"#,
        TOP + ph / 2.0,
        TOP + ph / 2.0
    );

    let mut legend_y = TOP + 10.0;
    for system in System::ALL {
        for scheme in Scheme::ALL {
            let curve: Vec<&&SweepRow> = finite
                .iter()
                .filter(|r| r.system == system && r.scheme == scheme)
                .collect();
            if curve.is_empty() {
                continue;
            }
            let color = curve_color(system, scheme);
            for (dash, pick) in [("", true), (r#" stroke-dasharray="6 4""#, false)] {
                let pts: Vec<String> = curve
                    .iter()
                    .map(|r| {
                        format!(
                            "{:.2},{:.2}",
                            sx(r.value),
                            sy(if pick { r.rate_mc } else { r.rate_lb })
                        )
                    })
                    .collect();
                let _ = writeln!(
                    s,
                    r#"<polyline fill="none" stroke="{color}" stroke-width="1.8"{dash} points="{}"/>"#,
                    pts.join(" ")
                );
            }
            for r in &curve {
                let _ = writeln!(
                    s,
                    r#"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="{color}"/>"#,
                    sx(r.value),
                    sy(r.rate_mc)
                );
            }
            let lx = LEFT + pw + 14.0;
            for (dash, text) in [("", "MC"), (r#" stroke-dasharray="6 4""#, "LB")] {
                let _ = writeln!(
                    s,
                    r#"<line x1="{lx:.2}" y1="{legend_y:.2}" x2="{:.2}" y2="{legend_y:.2}" stroke="{color}" stroke-width="1.8"{dash}/>"#,
                    lx + 26.0
                );
                let _ = writeln!(
                    s,
                    r#"<text x="{:.2}" y="{:.2}">{} {} {text}</text>"#,
                    lx + 32.0,
                    legend_y + 4.0,
                    system.label(),
                    scheme.label()
                );
                legend_y += 18.0;
            }
        }
    }
    s.push_str("</svg>\n");
    Ok(s)
}

pub fn write_svg(rows: &[SweepRow], path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, render_svg(rows)?)?;
    Ok(())
}

/// Writes the CSV and, when `plot` is given, an SVG rendered from the CSV
/// contents just written.
pub fn emit_outputs(
    rows: &[SweepRow],
    csv_path: impl AsRef<Path>,
    plot: Option<&Path>,
) -> Result<()> {
    write_csv(rows, &csv_path)?;
    if let Some(p) = plot {
        write_svg(&read_csv(&csv_path)?, p)?;
    }
    Ok(())
}
