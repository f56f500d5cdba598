//! CSV and JSON report writers.
//!
//! `summary.csv` has one row per solved point:
//!
//! | column | unit |
//! |---|---|
//! | case, scheme | |
//! | delta | |
//! | forward_fraction | empty without forward contracts |
//! | processing_cost_local, processing_cost_mdc, processing_cost_total | $ |
//! | emissions_local, emissions_mdc, emissions_workload_total, emissions_system | t |
//! | congestion_cost | $ |
//! | total_demand | MWh |
//! | fixed_point_iterations | empty under ex post |
//! | pivots | |
//! | mdc_count, leases | rows written to `mdc.csv` and `leasing.csv` |
//!
//! `mdc.csv` has one row per point and MDC: the point columns `case, scheme,
//! delta, forward_fraction` followed by `mdc_bus, leased, purchased, spilled,
//! intensity_kg_per_mwh, leasing_price, avg_procurement_cost`.
//!
//! `leasing.csv` has one row per point and lease: the point columns followed
//! by `batch, mdc_bus, period, alpha, quantity`.
//!
//! Numbers are written with six decimals so files diff cleanly.

use std::io::Write;

use crate::error::Result;
use crate::scenario::EquilibriumReport;

pub const SUMMARY_COLUMNS: [&str; 17] = [
    "case",
    "scheme",
    "delta",
    "forward_fraction",
    "processing_cost_local",
    "processing_cost_mdc",
    "processing_cost_total",
    "emissions_local",
    "emissions_mdc",
    "emissions_workload_total",
    "emissions_system",
    "congestion_cost",
    "total_demand",
    "fixed_point_iterations",
    "pivots",
    "mdc_count",
    "leases",
];

pub const MDC_COLUMNS: [&str; 11] = [
    "case",
    "scheme",
    "delta",
    "forward_fraction",
    "mdc_bus",
    "leased",
    "purchased",
    "spilled",
    "intensity_kg_per_mwh",
    "leasing_price",
    "avg_procurement_cost",
];

pub const LEASING_COLUMNS: [&str; 9] = [
    "case",
    "scheme",
    "delta",
    "forward_fraction",
    "batch",
    "mdc_bus",
    "period",
    "alpha",
    "quantity",
];

fn num(x: f64) -> String {
    // avoid "-0.000000"
    let s = format!("{x:.6}");
    if s.trim_start_matches('-').chars().all(|c| c == '0' || c == '.') {
        s.trim_start_matches('-').to_string()
    } else {
        s
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

fn point(r: &EquilibriumReport) -> Vec<String> {
    vec![
        r.case.clone(),
        r.scheme.to_string(),
        num(r.delta),
        opt(r.forward_fraction),
    ]
}

pub fn write_summary_csv<W: Write>(reports: &[EquilibriumReport], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SUMMARY_COLUMNS)?;
    for r in reports {
        let mut row = point(r);
        row.extend(
            [
                r.processing_cost_local,
                r.processing_cost_mdc,
                r.processing_cost_total,
                r.emissions_local,
                r.emissions_mdc,
                r.emissions_workload_total,
                r.emissions_system,
                r.congestion_cost,
                r.total_demand,
            ]
            .map(num),
        );
        row.push(r.fixed_point_iterations.map(|n| n.to_string()).unwrap_or_default());
        row.push(r.pivots.to_string());
        row.push(r.mdcs.len().to_string());
        row.push(r.leasing_prices.len().to_string());
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_mdc_csv<W: Write>(reports: &[EquilibriumReport], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(MDC_COLUMNS)?;
    for r in reports {
        for m in &r.mdcs {
            let mut row = point(r);
            row.push(m.bus.to_string());
            row.extend([m.leased, m.purchased, m.spilled, m.intensity, m.leasing_price].map(num));
            row.push(opt(m.avg_procurement_cost));
            w.write_record(&row)?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_leasing_csv<W: Write>(reports: &[EquilibriumReport], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(LEASING_COLUMNS)?;
    for r in reports {
        for l in &r.leasing_prices {
            let mut row = point(r);
            row.push(l.batch.to_string());
            row.push(l.mdc_bus.to_string());
            row.push(l.period.to_string());
            row.push(num(l.alpha));
            row.push(num(l.quantity));
            w.write_record(&row)?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Full reports as a pretty-printed JSON array.
pub fn write_json<W: Write>(reports: &[EquilibriumReport], out: W) -> Result<()> {
    serde_json::to_writer_pretty(out, reports)?;
    Ok(())
}

/// Writes `summary.csv`, `mdc.csv`, `leasing.csv` and `reports.json` into `dir`.
pub fn write_report_dir(reports: &[EquilibriumReport], dir: &std::path::Path) -> Result<()> {
    use std::fs::File;
    std::fs::create_dir_all(dir)?;
    write_summary_csv(reports, File::create(dir.join("summary.csv"))?)?;
    write_mdc_csv(reports, File::create(dir.join("mdc.csv"))?)?;
    write_leasing_csv(reports, File::create(dir.join("leasing.csv"))?)?;
    write_json(reports, File::create(dir.join("reports.json"))?)?;
    Ok(())
}
