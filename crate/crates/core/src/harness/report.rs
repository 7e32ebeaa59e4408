//! Tabular experiment reports and plot-data files.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::scenario::GoodputInterval;

/// One scheme under one condition.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub scheme: String,
    pub condition: String,
    /// Mean over drops of the summed user goodput, bit/s.
    pub mean_system_goodput: f64,
    /// `mean_system_goodput · (1 − overhead)`.
    pub effective_goodput: f64,
    /// Raw goodput relative to the CSI scheme under the same condition.
    pub ratio_to_csi: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub mode: String,
    pub title: String,
    pub goodput_interval: GoodputInterval,
    pub rows: Vec<ReportRow>,
    pub notes: Vec<String>,
}

const CSV_HEADER: &str = "scheme,condition,mean_system_goodput,effective_goodput,ratio_to_csi";

impl Report {
    pub fn new(mode: &str, title: &str, goodput_interval: GoodputInterval) -> Self {
        Report {
            mode: mode.into(),
            title: title.into(),
            goodput_interval,
            rows: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn push(
        &mut self,
        scheme: &str,
        condition: impl ToString,
        raw: f64,
        effective: f64,
        csi_raw: f64,
    ) {
        self.rows.push(ReportRow {
            scheme: scheme.into(),
            condition: condition.to_string(),
            mean_system_goodput: raw,
            effective_goodput: effective,
            ratio_to_csi: if csi_raw > 0.0 { raw / csi_raw } else { 0.0 },
        });
    }

    pub fn row(&self, scheme: &str, condition: &str) -> Option<&ReportRow> {
        self.rows
            .iter()
            .find(|r| r.scheme == scheme && r.condition == condition)
    }

    /// Ratio of `scheme` under `condition`; NaN if absent.
    pub fn ratio(&self, scheme: &str, condition: &str) -> f64 {
        self.row(scheme, condition)
            .map_or(f64::NAN, |r| r.ratio_to_csi)
    }

    pub fn schemes(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for r in &self.rows {
            if !out.contains(&r.scheme) {
                out.push(r.scheme.clone());
            }
        }
        out
    }

    fn interval_name(&self) -> &'static str {
        match self.goodput_interval {
            GoodputInterval::Frame => "frame",
            GoodputInterval::Tti => "tti",
        }
    }

    /// Fixed-width table.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# {} ({})", self.title, self.mode);
        let _ = writeln!(out, "# goodput denominator: {}", self.interval_name());
        for n in &self.notes {
            let _ = writeln!(out, "# {n}");
        }
        let _ = writeln!(
            out,
            "{:<22} {:>12} {:>18} {:>18} {:>10}",
            "scheme", "condition", "goodput_mbps", "effective_mbps", "ratio"
        );
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{:<22} {:>12} {:>18.3} {:>18.3} {:>10.4}",
                r.scheme,
                r.condition,
                r.mean_system_goodput / 1e6,
                r.effective_goodput / 1e6,
                r.ratio_to_csi
            );
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                r.scheme, r.condition, r.mean_system_goodput, r.effective_goodput, r.ratio_to_csi
            );
        }
        out
    }

    pub fn from_csv(mode: &str, text: &str, source: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, h)) if h.trim() == CSV_HEADER => {}
            _ => {
                return Err(Error::parse(
                    format!("{source}:1"),
                    "unexpected report header",
                ))
            }
        }
        let mut report = Report::new(mode, mode, GoodputInterval::Frame);
        for (i, line) in lines {
            if line.trim().is_empty() {
                continue;
            }
            let loc = format!("{source}:{}", i + 1);
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 5 {
                return Err(Error::parse(loc, "expected 5 columns"));
            }
            let num = |s: &str| {
                s.parse::<f64>()
                    .map_err(|_| Error::parse(loc.clone(), format!("bad number '{s}'")))
            };
            report.rows.push(ReportRow {
                scheme: f[0].into(),
                condition: f[1].into(),
                mean_system_goodput: num(f[2])?,
                effective_goodput: num(f[3])?,
                ratio_to_csi: num(f[4])?,
            });
        }
        Ok(report)
    }

    /// Two-column series `condition ratio` for one scheme.
    pub fn plot_series(&self, scheme: &str) -> String {
        let mut out = format!("# {scheme}: condition ratio_to_csi\n");
        for r in self.rows.iter().filter(|r| r.scheme == scheme) {
            let _ = writeln!(out, "{} {}", r.condition, r.ratio_to_csi);
        }
        out
    }

    /// Writes `<mode>.txt`, `<mode>.csv` and one `<mode>_<scheme>.dat` per
    /// scheme into `dir`.
    pub fn write(&self, dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let mut files = vec![
            (dir.join(format!("{}.txt", self.mode)), self.to_table()),
            (dir.join(format!("{}.csv", self.mode)), self.to_csv()),
        ];
        for s in self.schemes() {
            files.push((
                dir.join(format!("{}_{s}.dat", self.mode)),
                self.plot_series(&s),
            ));
        }
        for (p, text) in &files {
            std::fs::write(p, text).map_err(|e| Error::io(p, e))?;
        }
        Ok(files.into_iter().map(|(p, _)| p).collect())
    }
}
