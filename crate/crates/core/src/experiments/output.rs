use std::io::Write;

use serde::Serialize;

use super::endgames::BlockingCurve;
use super::table::{summarize, OutcomeTable, ReportRow};
use super::ExperimentError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

named_enum!(Format { Csv => "csv", Json => "json" });

/// An outcome table labelled with its configuration, e.g. `[("opening", "uniform")]`.
#[derive(Debug, Clone, Serialize)]
pub struct TableReport {
    pub config: Vec<(String, String)>,
    pub counts: OutcomeTable,
    pub rows: Vec<ReportRow>,
}

impl TableReport {
    pub fn new(config: Vec<(String, String)>, counts: OutcomeTable) -> Result<TableReport, ExperimentError> {
        let rows = summarize(&counts)?;
        Ok(TableReport { config, counts, rows })
    }
}

fn pct(v: Option<f64>) -> String {
    v.map(|v| format!("{v:.4}")).unwrap_or_default()
}

/// `k,p1_pct,p2_pct`, preceded by one column per configuration key.
pub fn write_tables_csv<W: Write>(reports: &[TableReport], out: W) -> Result<(), ExperimentError> {
    let mut w = csv::Writer::from_writer(out);
    let keys: Vec<&str> = reports.first().map(|r| r.config.iter().map(|(k, _)| k.as_str()).collect()).unwrap_or_default();
    let mut header: Vec<&str> = keys.clone();
    header.extend(["k", "p1_pct", "p2_pct"]);
    w.write_record(&header)?;
    for r in reports {
        for row in &r.rows {
            let mut record: Vec<String> = r.config.iter().map(|(_, v)| v.clone()).collect();
            record.extend([row.k.clone(), pct(row.p1_pct), pct(row.p2_pct)]);
            w.write_record(&record)?;
        }
    }
    w.flush()?;
    Ok(())
}

/// A single report as an object, several as an array.
pub fn write_tables_json<W: Write>(reports: &[TableReport], mut out: W) -> Result<(), ExperimentError> {
    #[derive(Serialize)]
    struct Json<'a> {
        config: serde_json::Map<String, serde_json::Value>,
        counts: &'a OutcomeTable,
        rows: &'a [ReportRow],
    }
    let items: Vec<Json> = reports
        .iter()
        .map(|r| Json {
            config: r.config.iter().map(|(k, v)| (k.clone(), v.clone().into())).collect(),
            counts: &r.counts,
            rows: &r.rows,
        })
        .collect();
    if let [single] = items.as_slice() {
        serde_json::to_writer_pretty(&mut out, single)?;
    } else {
        serde_json::to_writer_pretty(&mut out, &items)?;
    }
    writeln!(out)?;
    Ok(())
}

/// `omega_lo,omega_hi,n,blocked,rate`, preceded by `mode` when there are
/// several curves.
pub fn write_curves_csv<W: Write>(curves: &[BlockingCurve], out: W) -> Result<(), ExperimentError> {
    let mut w = csv::Writer::from_writer(out);
    let with_mode = curves.len() > 1;
    let mut header = vec!["omega_lo", "omega_hi", "n", "blocked", "rate"];
    if with_mode {
        header.insert(0, "mode");
    }
    w.write_record(&header)?;
    for c in curves {
        for b in &c.bins {
            let mut record = vec![
                format!("{:.2}", b.omega_lo),
                format!("{:.2}", b.omega_hi),
                b.n.to_string(),
                b.blocked.to_string(),
                b.rate().map(|r| format!("{r:.6}")).unwrap_or_default(),
            ];
            if with_mode {
                record.insert(0, c.mode.name().to_string());
            }
            w.write_record(&record)?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_curves_json<W: Write>(curves: &[BlockingCurve], mut out: W) -> Result<(), ExperimentError> {
    #[derive(Serialize)]
    struct Json<'a> {
        #[serde(flatten)]
        curve: &'a BlockingCurve,
        overall_rate: Option<f64>,
    }
    let items: Vec<Json> = curves.iter().map(|c| Json { curve: c, overall_rate: c.overall_rate() }).collect();
    if let [single] = items.as_slice() {
        serde_json::to_writer_pretty(&mut out, single)?;
    } else {
        serde_json::to_writer_pretty(&mut out, &items)?;
    }
    writeln!(out)?;
    Ok(())
}
