use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use super::{Method, ResultRow, ResultTable};
use crate::error::{Error, Result};

pub const CSV_HEADER: [&str; 7] = [
    "method",
    "variant",
    "fraction",
    "mean_nmi",
    "std_nmi",
    "constraints_before",
    "constraints_after",
];

/// Fixed precision keeps the file byte-stable across platforms.
pub fn write_csv<W: Write>(table: &ResultTable, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let csv_err = |e: csv::Error| Error::Io(e.into());
    w.write_record(CSV_HEADER).map_err(csv_err)?;
    for r in &table.rows {
        w.write_record([
            r.method.name().to_string(),
            r.variant.name().to_string(),
            r.fraction.to_string(),
            format!("{:.6}", r.mean_nmi),
            format!("{:.6}", r.std_nmi),
            format!("{:.2}", r.constraints_before),
            format!("{:.2}", r.constraints_after),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `results.csv` and one `<method>.svg` per method; returns the paths.
pub fn emit_results(table: &ResultTable, out_dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(out_dir)?;
    let csv_path = out_dir.join("results.csv");
    let mut file = BufWriter::new(File::create(&csv_path)?);
    write_csv(table, &mut file)?;
    file.flush()?;
    let mut written = vec![csv_path];

    let mut methods: Vec<Method> = table.rows.iter().map(|r| r.method).collect();
    methods.dedup();
    for method in methods {
        let path = out_dir.join(format!("{}.svg", method.name()));
        let rows: Vec<&ResultRow> = table.rows.iter().filter(|r| r.method == method).collect();
        fs::write(&path, write_svg(method.name(), &rows))?;
        written.push(path);
    }
    Ok(written)
}

const WIDTH: f64 = 480.0;
const HEIGHT: f64 = 360.0;
const MARGIN: f64 = 50.0;
const COLORS: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b",
];

/// Line chart of mean NMI against constraint fraction, one series per
/// variant, y fixed to `[0, 1]`.
pub fn write_svg(title: &str, rows: &[&ResultRow]) -> String {
    let mut series: Vec<(String, Vec<(f64, f64)>)> = Vec::new();
    for r in rows {
        let name = r.variant.name();
        match series.iter_mut().find(|(v, _)| v == name) {
            Some((_, pts)) => pts.push((r.fraction, r.mean_nmi)),
            None => series.push((name.to_string(), vec![(r.fraction, r.mean_nmi)])),
        }
    }
    let x_max = rows
        .iter()
        .map(|r| r.fraction)
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    let plot_w = WIDTH - 2.0 * MARGIN;
    let plot_h = HEIGHT - 2.0 * MARGIN;
    let px = |x: f64| MARGIN + plot_w * x / x_max;
    let py = |y: f64| HEIGHT - MARGIN - plot_h * y.clamp(0.0, 1.0);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="20" text-anchor="middle" font-size="14">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
    let _ = writeln!(
        s,
        r#"<path d="M{m} {t} V{b} H{r}" stroke="black" fill="none"/>"#,
        m = MARGIN,
        t = MARGIN,
        b = HEIGHT - MARGIN,
        r = WIDTH - MARGIN
    );
    for i in 0..=5 {
        let y = i as f64 / 5.0;
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{:.1}</text>"#,
            MARGIN - 6.0,
            py(y) + 4.0,
            y
        );
        let x = x_max * i as f64 / 5.0;
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
            px(x),
            HEIGHT - MARGIN + 16.0,
            trim_float(x)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">fraction of pairs constrained</text>"#,
        WIDTH / 2.0,
        HEIGHT - 12.0
    );
    let _ = writeln!(
        s,
        r#"<text x="14" y="{}" text-anchor="middle" transform="rotate(-90 14 {})">mean NMI</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0
    );
    for (i, (name, pts)) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let path: Vec<String> = pts
            .iter()
            .filter(|(_, y)| y.is_finite())
            .map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y)))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline points="{}" stroke="{color}" stroke-width="2" fill="none"/>"#,
            path.join(" ")
        );
        let ly = MARGIN + 14.0 * i as f64;
        let lx = WIDTH - MARGIN - 70.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/><text x="{}" y="{}">{}</text>"#,
            lx + 18.0,
            lx + 22.0,
            ly + 4.0,
            escape(name)
        );
    }
    s.push_str("</svg>\n");
    s
}

fn trim_float(x: f64) -> String {
    let s = format!("{x:.3}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}
