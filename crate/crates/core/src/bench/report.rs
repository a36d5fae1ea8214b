use std::fmt::Write as _;
use std::io::{Read, Write};
use std::path::Path;

use super::{Method, RunRecord};
use crate::error::{Error, Result};
use crate::propagate::Kernel;
use crate::theory::boundary_condition;

pub const CSV_HEADER: &str =
    "lambda,beta,delta_imbalance,gamma,unknown_rate,rep,realized_s,method,accuracy,rho_selected,seconds";

/// Writes records with the fixed header, even when `records` is empty.
pub fn emit_csv<W: Write>(records: &[RunRecord], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(CSV_HEADER.split(','))?;
    for r in records {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| Error::io("writing run records", e))?;
    Ok(())
}

pub fn write_csv(records: &[RunRecord], path: &Path) -> Result<()> {
    let file = std::fs::File::create(path)
        .map_err(|e| Error::io(format!("creating {}", path.display()), e))?;
    emit_csv(records, std::io::BufWriter::new(file))
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<RunRecord>> {
    let mut r = csv::Reader::from_reader(input);
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header.join(",") != CSV_HEADER {
        return Err(Error::Input(format!("unexpected header {:?}", header.join(","))));
    }
    r.deserialize().map(|rec| rec.map_err(Error::from)).collect()
}

/// Numeric column of a [`RunRecord`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Field {
    Lambda,
    Beta,
    DeltaImbalance,
    Gamma,
    UnknownRate,
    RealizedS,
    Accuracy,
    RhoSelected,
    Seconds,
}

impl Field {
    pub fn name(self) -> &'static str {
        match self {
            Field::Lambda => "lambda",
            Field::Beta => "beta",
            Field::DeltaImbalance => "delta_imbalance",
            Field::Gamma => "gamma",
            Field::UnknownRate => "unknown_rate",
            Field::RealizedS => "realized_s",
            Field::Accuracy => "accuracy",
            Field::RhoSelected => "rho_selected",
            Field::Seconds => "seconds",
        }
    }

    pub fn value(self, r: &RunRecord) -> Option<f64> {
        Some(match self {
            Field::Lambda => r.lambda,
            Field::Beta => r.beta,
            Field::DeltaImbalance => r.delta_imbalance,
            Field::Gamma => r.gamma,
            Field::UnknownRate => r.unknown_rate,
            Field::RealizedS => r.realized_s,
            Field::Accuracy => r.accuracy,
            Field::RhoSelected => return r.rho_selected,
            Field::Seconds => r.seconds,
        })
    }
}

const PALETTE: [&str; 6] = ["#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e", "#e6ab02"];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// A plain multi-series line chart.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LinePlot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<(String, Vec<(f64, f64)>)>,
}

impl LinePlot {
    pub fn to_svg(&self) -> String {
        const W: f64 = 640.0;
        const H: f64 = 420.0;
        const L: f64 = 70.0;
        const R: f64 = 170.0;
        const T: f64 = 40.0;
        const B: f64 = 60.0;
        let pts = self.series.iter().flat_map(|(_, p)| p.iter());
        let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
        for &(x, y) in pts {
            x0 = x0.min(x);
            x1 = x1.max(x);
            y0 = y0.min(y);
            y1 = y1.max(y);
        }
        if x0 > x1 {
            (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
        }
        if x1 - x0 < 1e-12 {
            x0 -= 0.5;
            x1 += 0.5;
        }
        if y1 - y0 < 1e-12 {
            y0 -= 0.5;
            y1 += 0.5;
        }
        let sx = |x: f64| L + (x - x0) / (x1 - x0) * (W - L - R);
        let sy = |y: f64| H - B - (y - y0) / (y1 - y0) * (H - T - B);

        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
        let _ = writeln!(
            s,
            r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
            (W - R + L) / 2.0,
            escape(&self.title)
        );
        let _ = writeln!(
            s,
            r#"<path d="M{L} {T} V{} H{}" fill="none" stroke="black"/>"#,
            H - B,
            W - R
        );
        for i in 0..=4 {
            let f = i as f64 / 4.0;
            let (xv, yv) = (x0 + f * (x1 - x0), y0 + f * (y1 - y0));
            let _ = writeln!(
                s,
                r#"<text x="{:.1}" y="{}" text-anchor="middle">{}</text>"#,
                sx(xv),
                H - B + 18.0,
                tick(xv)
            );
            let _ = writeln!(
                s,
                r#"<text x="{}" y="{:.1}" text-anchor="end">{}</text>"#,
                L - 6.0,
                sy(yv) + 4.0,
                tick(yv)
            );
        }
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
            (W - R + L) / 2.0,
            H - 18.0,
            escape(&self.x_label)
        );
        let _ = writeln!(
            s,
            r#"<text x="18" y="{}" text-anchor="middle" transform="rotate(-90 18 {})">{}</text>"#,
            (H - B + T) / 2.0,
            (H - B + T) / 2.0,
            escape(&self.y_label)
        );
        for (i, (name, points)) in self.series.iter().enumerate() {
            let color = PALETTE[i % PALETTE.len()];
            let coords: Vec<String> = points
                .iter()
                .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
                .collect();
            let _ = writeln!(
                s,
                r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="2"/>"#,
                coords.join(" ")
            );
            for &(x, y) in points {
                let _ = writeln!(
                    s,
                    r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{color}"/>"#,
                    sx(x),
                    sy(y)
                );
            }
            let ly = T + 10.0 + 18.0 * i as f64;
            let _ = writeln!(
                s,
                r#"<line x1="{}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/>"#,
                W - R + 15.0,
                W - R + 35.0
            );
            let _ = writeln!(
                s,
                r#"<text x="{}" y="{}">{}</text>"#,
                W - R + 40.0,
                ly + 4.0,
                escape(name)
            );
        }
        s.push_str("</svg>\n");
        s
    }
}

fn tick(v: f64) -> String {
    let s = format!("{v:.3}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

/// Mean of `y` per distinct `x`, one series per method, in method order.
pub fn emit_svg_lines(records: &[RunRecord], x: Field, y: Field) -> String {
    let mut methods: Vec<Method> = records.iter().map(|r| r.method).collect();
    methods.sort();
    methods.dedup();
    let series = methods
        .into_iter()
        .map(|m| {
            let mut acc: Vec<(f64, f64, usize)> = Vec::new();
            for r in records.iter().filter(|r| r.method == m) {
                let (Some(xv), Some(yv)) = (x.value(r), y.value(r)) else {
                    continue;
                };
                match acc.iter_mut().find(|a| a.0 == xv) {
                    Some(a) => {
                        a.1 += yv;
                        a.2 += 1;
                    }
                    None => acc.push((xv, yv, 1)),
                }
            }
            acc.sort_by(|a, b| a.0.total_cmp(&b.0));
            let points = acc.into_iter().map(|(xv, s, c)| (xv, s / c as f64)).collect();
            (m.name().to_string(), points)
        })
        .collect();
    LinePlot {
        title: format!("mean {} by {}", y.name(), x.name()),
        x_label: x.name().into(),
        y_label: y.name().into(),
        series,
    }
    .to_svg()
}

/// Map of the unit `(s, beta)` square shaded by how many kernels satisfy
/// their boundary condition, with an optional horizontal guide at `beta`.
pub fn region_svg(resolution: usize, guide_beta: Option<f64>) -> String {
    const SIZE: f64 = 400.0;
    const PAD: f64 = 50.0;
    const SHADES: [&str; 4] = ["#f2f2f2", "#fee391", "#9ecae1", "#74c476"];
    let res = resolution.max(2);
    let cell = SIZE / res as f64;
    let mut s = String::new();
    let total = SIZE + 2.0 * PAD + 170.0;
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{total}" height="{}" font-family="sans-serif" font-size="12">"#,
        SIZE + 2.0 * PAD
    );
    let _ = writeln!(s, r#"<rect width="{total}" height="{}" fill="white"/>"#, SIZE + 2.0 * PAD);
    for bi in 0..res {
        for si in 0..res {
            let sv = (si as f64 + 0.5) / res as f64;
            let bv = (bi as f64 + 0.5) / res as f64;
            let count = Kernel::ALL
                .iter()
                .filter(|&&k| boundary_condition(k, sv, bv))
                .count();
            let _ = writeln!(
                s,
                r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{}"/>"#,
                PAD + si as f64 * cell,
                PAD + SIZE - (bi + 1) as f64 * cell,
                cell + 0.1,
                cell + 0.1,
                SHADES[count]
            );
        }
    }
    let _ = writeln!(
        s,
        r#"<rect x="{PAD}" y="{PAD}" width="{SIZE}" height="{SIZE}" fill="none" stroke="black"/>"#
    );
    if let Some(b) = guide_beta.filter(|b| (0.0..=1.0).contains(b)) {
        let y = PAD + SIZE * (1.0 - b);
        let _ = writeln!(
            s,
            r#"<line x1="{PAD}" y1="{y:.2}" x2="{}" y2="{y:.2}" stroke="black" stroke-dasharray="4 3"/>"#,
            PAD + SIZE
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">s</text>"#,
        PAD + SIZE / 2.0,
        SIZE + PAD + 30.0
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">beta</text>"#,
        PAD - 25.0,
        PAD + SIZE / 2.0
    );
    for (i, label) in ["no kernel", "source-normalized", "+ normalized-laplacian", "all three"]
        .iter()
        .enumerate()
    {
        let y = PAD + 20.0 * i as f64;
        let _ = writeln!(
            s,
            r#"<rect x="{}" y="{y}" width="14" height="14" fill="{}" stroke="black"/>"#,
            SIZE + 2.0 * PAD - 20.0,
            SHADES[i]
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}">{label}</text>"#,
            SIZE + 2.0 * PAD,
            y + 11.0
        );
    }
    s.push_str("</svg>\n");
    s
}
