//! CSV tables with `#` metadata lines and dependency-free SVG plots.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::fit::{RateFit, Transform, MIN_FIT_RECORDS};
use super::HarnessError;

/// Numeric table with named columns and `key: value` metadata.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub metadata: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self { metadata: Vec::new(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn meta(mut self, key: &str, value: impl ToString) -> Self {
        self.metadata.push((key.to_string(), value.to_string()));
        self
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[idx]).collect())
    }

    /// `(first column, named column)` pairs.
    pub fn series(&self, name: &str) -> Option<Vec<(f64, f64)>> {
        let ys = self.column(name)?;
        Some(self.rows.iter().map(|r| r[0]).zip(ys).collect())
    }
}

/// Shortest decimal that parses back to the same `f64`.
pub fn format_f64(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 || (1e-5..1e16).contains(&a) || !v.is_finite() {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

pub fn to_csv(table: &Table) -> String {
    let mut out = String::new();
    for (k, v) in &table.metadata {
        let _ = writeln!(out, "# {k}: {}", v.replace('\n', " "));
    }
    let _ = writeln!(out, "{}", table.columns.join(","));
    for row in &table.rows {
        let cells: Vec<String> = row.iter().map(|&v| format_f64(v)).collect();
        let _ = writeln!(out, "{}", cells.join(","));
    }
    out
}

pub fn parse_csv(text: &str) -> Result<Table, HarnessError> {
    let mut table = Table::default();
    let mut header_seen = false;
    for (idx, line) in text.lines().enumerate() {
        let bad = |msg: String| HarnessError::Numerical(format!("csv line {}: {msg}", idx + 1));
        if let Some(meta) = line.strip_prefix('#') {
            let (k, v) = meta.trim_start().split_once(": ").ok_or_else(|| bad(format!("malformed metadata {line:?}")))?;
            table.metadata.push((k.to_string(), v.to_string()));
        } else if !header_seen {
            table.columns = line.split(',').map(str::to_string).collect();
            header_seen = true;
        } else if !line.is_empty() {
            let row = line
                .split(',')
                .map(|c| c.parse::<f64>().map_err(|_| bad(format!("not a number: {c:?}"))))
                .collect::<Result<Vec<_>, _>>()?;
            if row.len() != table.columns.len() {
                return Err(bad(format!("{} cells for {} columns", row.len(), table.columns.len())));
            }
            table.rows.push(row);
        }
    }
    if !header_seen {
        return Err(HarnessError::Numerical("csv has no header line".into()));
    }
    Ok(table)
}

pub fn emit_csv(table: &Table, path: &Path) -> Result<(), HarnessError> {
    fs::write(path, to_csv(table)).map_err(|source| HarnessError::Io { path: path.to_path_buf(), source })
}

/// Plot description for [`emit_svg`].
#[derive(Debug, Clone)]
pub struct Plot<'a> {
    pub title: &'a str,
    pub y_label: &'a str,
    pub transform: Transform,
    /// named `(t, error)` series
    pub series: Vec<(&'a str, Vec<(f64, f64)>)>,
    /// fits drawn for series with at least four records
    pub fits: Vec<Option<RateFit>>,
}

const COLORS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

pub fn render_svg(plot: &Plot) -> Result<String, HarnessError> {
    let pts: Vec<(f64, f64)> = plot.series.iter().flat_map(|(_, s)| s.iter().copied()).filter(|p| p.1 > 0.0).collect();
    if pts.is_empty() {
        return Err(HarnessError::Numerical("nothing to plot: no records with positive error".into()));
    }
    let tx = |t: f64| plot.transform.x(t);
    let (w, h, ml, mr, mt, mb) = (640.0, 420.0, 70.0, 20.0, 40.0, 50.0);
    let (mut x0, mut x1) = pts.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |a, p| (a.0.min(tx(p.0)), a.1.max(tx(p.0))));
    let (mut y0, mut y1) = pts.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |a, p| (a.0.min(p.1.log10()), a.1.max(p.1.log10())));
    if x1 - x0 < 1e-12 {
        x0 -= 0.5;
        x1 += 0.5;
    }
    y0 = y0.floor();
    y1 = y1.ceil().max(y0 + 1.0);
    let sx = |x: f64| ml + (x - x0) / (x1 - x0) * (w - ml - mr);
    let sy = |y: f64| mt + (y1 - y) / (y1 - y0) * (h - mt - mb);

    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#);
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="22" text-anchor="middle" font-size="15">{} ({})</text>"#, w / 2.0, escape(plot.title), plot.transform);
    let _ = writeln!(s, r#"<line x1="{ml}" y1="{}" x2="{}" y2="{}" stroke="black"/>"#, h - mb, w - mr, h - mb);
    let _ = writeln!(s, r#"<line x1="{ml}" y1="{mt}" x2="{ml}" y2="{}" stroke="black"/>"#, h - mb);
    let mut decade = y0;
    while decade <= y1 {
        let y = sy(decade);
        let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="end" font-size="11">1e{decade}</text>"#, ml - 6.0, y + 4.0);
        let _ = writeln!(s, r##"<line x1="{ml}" y1="{y}" x2="{}" y2="{y}" stroke="#ddd"/>"##, w - mr);
        decade += 1.0;
    }
    for x in [x0, (x0 + x1) / 2.0, x1] {
        let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle" font-size="11">{:.3}</text>"#, sx(x), h - mb + 16.0, x);
    }
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle" font-size="13">{}</text>"#, (ml + w - mr) / 2.0, h - 10.0, plot.transform.x_label());
    let _ = writeln!(
        s,
        r#"<text x="16" y="{}" text-anchor="middle" font-size="13" transform="rotate(-90 16 {})">{}</text>"#,
        (mt + h - mb) / 2.0,
        (mt + h - mb) / 2.0,
        escape(plot.y_label)
    );
    for (i, (name, series)) in plot.series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let coords: Vec<String> = series
            .iter()
            .filter(|p| p.1 > 0.0)
            .map(|&(t, e)| format!("{:.2},{:.2}", sx(tx(t)), sy(e.log10())))
            .collect();
        let _ = writeln!(s, r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#, coords.join(" "));
        let _ = writeln!(s, r#"<text x="{}" y="{}" font-size="12" fill="{color}">{}</text>"#, w - mr - 150.0, mt + 16.0 * (i as f64 + 1.0), escape(name));
        let fit = plot.fits.get(i).copied().flatten();
        if let (Some(fit), true) = (fit, series.len() >= MIN_FIT_RECORDS) {
            let (ta, tb) = (series.first().unwrap().0, series.last().unwrap().0);
            let _ = writeln!(
                s,
                r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{color}" stroke-dasharray="5,4"/>"#,
                sx(tx(ta)),
                sy(fit.predict(ta).log10()),
                sx(tx(tb)),
                sy(fit.predict(tb).log10())
            );
        }
    }
    s.push_str("</svg>\n");
    Ok(s)
}

pub fn emit_svg(plot: &Plot, path: &Path) -> Result<(), HarnessError> {
    let svg = render_svg(plot)?;
    fs::write(path, svg).map_err(|source| HarnessError::Io { path: path.to_path_buf(), source })
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::fit::fit_rate;
    use proptest::prelude::*;

    #[test]
    fn empty_and_short_tables() {
        let dir = tempfile::tempdir().unwrap();
        let table = Table::new(&["n", "error"]);
        let path = dir.path().join("e.csv");
        emit_csv(&table, &path).unwrap();
        assert_eq!(fs::read_to_string(&path).unwrap(), "n,error\n");
        let plot = Plot { title: "t", y_label: "e", transform: Transform::LogVsN, series: vec![("e", vec![])], fits: vec![] };
        assert!(emit_svg(&plot, &dir.path().join("e.svg")).is_err());

        let rec = vec![(2.0, 0.1), (3.0, 0.01)];
        let fit = fit_rate(&rec, Transform::LogVsN).ok();
        assert!(fit.is_none());
        let plot = Plot { title: "t", y_label: "e", transform: Transform::LogVsN, series: vec![("e", rec)], fits: vec![fit] };
        let svg = render_svg(&plot).unwrap();
        assert!(svg.contains("<polyline") && !svg.contains("stroke-dasharray"));
        assert!(svg.contains("log-vs-n"));
    }

    #[test]
    fn fit_overlay_drawn() {
        let rec: Vec<(f64, f64)> = (1..8).map(|n| (n as f64, (-(n as f64)).exp())).collect();
        let fit = fit_rate(&rec, Transform::LogVsN).ok();
        let plot = Plot { title: "a < b", y_label: "e", transform: Transform::LogVsN, series: vec![("e", rec)], fits: vec![fit] };
        let svg = render_svg(&plot).unwrap();
        assert!(svg.contains("stroke-dasharray") && svg.contains("a &lt; b"));
    }

    #[test]
    fn metadata_round_trip() {
        let mut t = Table::new(&["n", "rmse_qmc", "rmse_mc"]).meta("model", "qmc-analytic").meta("seed", 7);
        t.push(vec![16.0, 0.1, 1e-20]);
        t.push(vec![32.0, 3.3e-7, f64::MIN_POSITIVE]);
        let text = to_csv(&t);
        assert!(text.starts_with("# model: qmc-analytic\n# seed: 7\nn,rmse_qmc,rmse_mc\n16,0.1,1e-20\n"));
        assert_eq!(parse_csv(&text).unwrap(), t);
        assert!(parse_csv("n,e\n1,x\n").is_err());
        assert!(parse_csv("n,e\n1\n").is_err());
    }

    proptest! {
        #[test]
        fn csv_round_trip_is_bitwise(values in proptest::collection::vec(proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL | proptest::num::f64::ZERO, 1..40)) {
            let mut t = Table::new(&["n", "v"]);
            for (i, v) in values.iter().enumerate() {
                t.push(vec![i as f64, *v]);
            }
            let back = parse_csv(&to_csv(&t)).unwrap();
            for (a, b) in t.rows.iter().zip(&back.rows) {
                prop_assert_eq!(a[1].to_bits(), b[1].to_bits());
            }
        }
    }
}
