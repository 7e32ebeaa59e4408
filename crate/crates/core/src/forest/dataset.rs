//! Labelled samples and their comma-separated file format.

use std::path::Path;

use crate::error::{Error, Result};
use crate::link::CQI_LEVELS;

pub const LABEL_COLUMN: &str = "label";

/// Feature rows with CQI labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub feature_names: Vec<String>,
    pub features: Vec<Vec<f64>>,
    pub labels: Vec<u8>,
}

impl Dataset {
    pub fn new(feature_names: Vec<String>) -> Self {
        Dataset {
            feature_names,
            features: Vec::new(),
            labels: Vec::new(),
        }
    }

    pub fn arity(&self) -> usize {
        self.feature_names.len()
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn push(&mut self, x: Vec<f64>, label: u8) -> Result<()> {
        if x.len() != self.arity() {
            return Err(Error::Argument(format!(
                "sample has {} features, dataset has {}",
                x.len(),
                self.arity()
            )));
        }
        if label as usize > CQI_LEVELS {
            return Err(Error::Argument(format!("label {label} is not a CQI")));
        }
        self.features.push(x);
        self.labels.push(label);
        Ok(())
    }

    /// Samples per label `0..=15`.
    pub fn class_histogram(&self) -> [usize; CQI_LEVELS + 1] {
        let mut h = [0; CQI_LEVELS + 1];
        for &l in &self.labels {
            h[l as usize] += 1;
        }
        h
    }

    /// Logs the class histogram and warns about sparse present classes
    /// and about absent classes lying between present ones.
    pub fn log_class_support(&self, floor: f64) {
        let h = self.class_histogram();
        log::info!("class histogram {h:?} over {} samples", self.len());
        let present: Vec<usize> = (0..h.len()).filter(|&c| h[c] > 0).collect();
        let (Some(&lo), Some(&hi)) = (present.first(), present.last()) else {
            return;
        };
        for c in lo..=hi {
            let share = h[c] as f64 / self.len() as f64;
            if h[c] == 0 {
                log::warn!("CQI {c} absent from the training data");
            } else if share < floor {
                log::warn!("CQI {c} has only {} samples ({:.3}%)", h[c], share * 100.0);
            }
        }
    }

    /// First `fraction` of the rows, then the rest.
    pub fn split(&self, fraction: f64) -> (Dataset, Dataset) {
        let cut = ((self.len() as f64) * fraction).round() as usize;
        let head = Dataset {
            feature_names: self.feature_names.clone(),
            features: self.features[..cut].to_vec(),
            labels: self.labels[..cut].to_vec(),
        };
        let tail = Dataset {
            feature_names: self.feature_names.clone(),
            features: self.features[cut..].to_vec(),
            labels: self.labels[cut..].to_vec(),
        };
        (head, tail)
    }

    pub fn save_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let io = |e: csv::Error| Error::io(path, std::io::Error::other(e));
        let mut w = csv::Writer::from_path(path).map_err(io)?;
        let mut header = self.feature_names.clone();
        header.push(LABEL_COLUMN.into());
        w.write_record(&header).map_err(io)?;
        for (x, l) in self.features.iter().zip(&self.labels) {
            let mut row: Vec<String> = x.iter().map(|v| v.to_string()).collect();
            row.push(l.to_string());
            w.write_record(&row).map_err(io)?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }

    pub fn load_csv(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let mut r =
            csv::Reader::from_path(path).map_err(|e| Error::io(path, std::io::Error::other(e)))?;
        let loc = |line: u64| format!("{}:{line}", path.display());
        let header = r
            .headers()
            .map_err(|e| Error::parse(loc(1), e.to_string()))?
            .clone();
        let names: Vec<String> = header.iter().map(str::to_string).collect();
        if names.last().map(String::as_str) != Some(LABEL_COLUMN) {
            return Err(Error::parse(
                loc(1),
                format!("last column must be '{LABEL_COLUMN}'"),
            ));
        }
        let mut ds = Dataset::new(names[..names.len() - 1].to_vec());
        for (i, rec) in r.records().enumerate() {
            let line = i as u64 + 2;
            let rec = rec.map_err(|e| Error::parse(loc(line), e.to_string()))?;
            if rec.len() != names.len() {
                return Err(Error::parse(
                    loc(line),
                    format!("expected {} fields", names.len()),
                ));
            }
            let mut x = Vec::with_capacity(ds.arity());
            for f in rec.iter().take(ds.arity()) {
                x.push(
                    f.parse::<f64>()
                        .map_err(|_| Error::parse(loc(line), format!("bad number '{f}'")))?,
                );
            }
            let label: u8 = rec[ds.arity()]
                .parse()
                .map_err(|_| Error::parse(loc(line), "bad label"))?;
            ds.push(x, label)
                .map_err(|e| Error::parse(loc(line), e.to_string()))?;
        }
        Ok(ds)
    }
}
