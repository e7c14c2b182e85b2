//! CSV export of audit results, aggregated over one or more models.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::{confidence, mean_and_stddev, AuditReport};

/// One feature set's results across models.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateSummary {
    /// Feature names joined with `+`.
    pub features: String,
    pub models: usize,
    /// Totals over all models.
    pub pairs_tested: usize,
    pub ips_found: usize,
    /// Mean and standard deviation of the per-model rates.
    pub rate: f64,
    pub stddev: f64,
}

/// Aggregates reports that all concern the same feature set.
pub fn summarize(reports: &[AuditReport]) -> Result<RateSummary> {
    let first = reports
        .first()
        .ok_or_else(|| Error::InvalidArgument("no reports to summarize".into()))?;
    if reports.iter().any(|r| r.features != first.features) {
        return Err(Error::InvalidArgument("reports cover different feature sets".into()));
    }
    let rates: Vec<f64> = reports.iter().map(|r| r.ip_rate).collect();
    let (rate, stddev) = mean_and_stddev(&rates);
    Ok(RateSummary {
        features: first.features.join("+"),
        models: reports.len(),
        pairs_tested: reports.iter().map(|r| r.pairs_tested).sum(),
        ips_found: reports.iter().map(|r| r.ips_found.len()).sum(),
        rate,
        stddev,
    })
}

/// `features,pairs_tested,ips_found,rate,stddev`, floats at 6 decimals.
pub fn write_report_csv<W: Write>(out: W, rows: &[RateSummary]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["features", "pairs_tested", "ips_found", "rate", "stddev"])?;
    for r in rows {
        w.write_record([
            r.features.clone(),
            r.pairs_tested.to_string(),
            r.ips_found.to_string(),
            format!("{:.6}", r.rate),
            format!("{:.6}", r.stddev),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// `features,rate,n,confidence` for every `n` in `ns`, one block per row.
pub fn write_confidence_csv<W: Write>(out: W, rows: &[RateSummary], ns: &[u64]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["features", "rate", "n", "confidence"])?;
    for r in rows {
        for &n in ns {
            w.write_record([
                r.features.clone(),
                format!("{:.6}", r.rate),
                n.to_string(),
                format!("{:.6}", confidence(r.rate, n)?),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}
