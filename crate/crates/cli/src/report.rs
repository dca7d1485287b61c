//! Validation report rows and their CSV form.

use std::io::{Read, Write};

pub const HEADER: [&str; 11] = [
    "identity", "q", "alpha", "theta", "x0", "b", "analytic", "mc_mean", "mc_se", "z", "pass",
];

/// One identity compared against simulation. Query fields that do not apply
/// to the identity are `None` and written as empty cells.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub identity: String,
    pub q: Option<f64>,
    pub alpha: Option<f64>,
    pub theta: Option<f64>,
    pub x0: Option<f64>,
    pub b: Option<f64>,
    pub analytic: f64,
    pub mc_mean: f64,
    pub mc_se: f64,
    pub z: f64,
    pub pass: bool,
}

impl ReportRow {
    /// Builds a row; `pass` is `|z| <= 3`.
    pub fn new(
        identity: &str,
        query: [Option<f64>; 5],
        analytic: f64,
        mc_mean: f64,
        mc_se: f64,
    ) -> Self {
        let gap = mc_mean - analytic;
        let z = if mc_se > 0.0 {
            gap / mc_se
        } else if gap == 0.0 {
            0.0
        } else {
            gap.signum() * f64::INFINITY
        };
        let [q, alpha, theta, x0, b] = query;
        Self {
            identity: identity.to_string(),
            q,
            alpha,
            theta,
            x0,
            b,
            analytic,
            mc_mean,
            mc_se,
            z,
            pass: z.abs() <= 3.0,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub rows: Vec<ReportRow>,
}

fn cell(v: f64) -> String {
    format!("{v:.16e}")
}

fn opt_cell(v: Option<f64>) -> String {
    v.map(cell).unwrap_or_default()
}

#[derive(Debug, thiserror::Error)]
pub enum ReportError {
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("row {row}: {reason}")]
    Malformed { row: usize, reason: String },
}

impl ValidationReport {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    /// CSV with round-trip (17 significant digit) numbers, rows in order.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), ReportError> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(HEADER)?;
        for r in &self.rows {
            w.write_record([
                r.identity.clone(),
                opt_cell(r.q),
                opt_cell(r.alpha),
                opt_cell(r.theta),
                opt_cell(r.x0),
                opt_cell(r.b),
                cell(r.analytic),
                cell(r.mc_mean),
                cell(r.mc_se),
                cell(r.z),
                r.pass.to_string(),
            ])?;
        }
        w.flush().map_err(csv::Error::from)?;
        Ok(())
    }

    pub fn read_csv<R: Read>(input: R) -> Result<Self, ReportError> {
        let mut reader = csv::Reader::from_reader(input);
        let header = reader.headers()?.clone();
        if header.iter().ne(HEADER) {
            return Err(ReportError::Malformed {
                row: 0,
                reason: format!("unexpected header {header:?}"),
            });
        }
        let mut rows = Vec::new();
        for (i, record) in reader.records().enumerate() {
            let record = record?;
            let bad = |reason: String| ReportError::Malformed { row: i + 1, reason };
            let real = |k: usize| -> Result<f64, ReportError> {
                record[k]
                    .parse()
                    .map_err(|_| bad(format!("`{}` is not a number", &record[k])))
            };
            let opt = |k: usize| -> Result<Option<f64>, ReportError> {
                if record[k].is_empty() {
                    Ok(None)
                } else {
                    real(k).map(Some)
                }
            };
            rows.push(ReportRow {
                identity: record[0].to_string(),
                q: opt(1)?,
                alpha: opt(2)?,
                theta: opt(3)?,
                x0: opt(4)?,
                b: opt(5)?,
                analytic: real(6)?,
                mc_mean: real(7)?,
                mc_se: real(8)?,
                z: real(9)?,
                pass: record[10]
                    .parse()
                    .map_err(|_| bad(format!("`{}` is not a flag", &record[10])))?,
            });
        }
        Ok(Self { rows })
    }
}
