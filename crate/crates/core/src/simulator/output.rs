//! File formats. All floats are written in Rust's shortest round-trip
//! decimal form with `.` as separator.

use std::io::{self, Write};

use serde::Serialize;

use super::engine::MetricsReport;
use super::sweep::{PlatformRow, SweepRow};

#[derive(Serialize)]
struct TaskRow<'a> {
    task_id: u64,
    gen_time_s: f64,
    source_lat_deg: f64,
    source_lon_deg: f64,
    destination: usize,
    data_in_bits: f64,
    compute_gflo: f64,
    data_out_bits: f64,
    scheme: &'a str,
    compute_node: usize,
    compute_site: String,
    num_edges: usize,
    overall_delay_s: f64,
    isl_tx_s: f64,
    sgl_tx_s: f64,
    compute_s: f64,
}

const TASK_HEADER: [&str; 16] = [
    "task_id",
    "gen_time_s",
    "source_lat_deg",
    "source_lon_deg",
    "destination",
    "data_in_bits",
    "compute_gflo",
    "data_out_bits",
    "scheme",
    "compute_node",
    "compute_site",
    "num_edges",
    "overall_delay_s",
    "isl_tx_s",
    "sgl_tx_s",
    "compute_s",
];

fn csv_writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().has_headers(false).from_writer(out)
}

fn flush<W: Write>(w: csv::Writer<W>) -> io::Result<()> {
    w.into_inner().map_err(|e| e.into_error())?.flush()
}

/// One row per served task.
pub fn write_tasks_csv<W: Write>(report: &MetricsReport, out: W) -> io::Result<()> {
    let mut w = csv_writer(out);
    w.write_record(TASK_HEADER)?;
    for r in &report.records {
        let (t, p) = (&r.task, &r.plan);
        w.serialize(TaskRow {
            task_id: t.id,
            gen_time_s: t.gen_time_s,
            source_lat_deg: t.source.lat_deg,
            source_lon_deg: t.source.lon_deg,
            destination: t.destination,
            data_in_bits: t.data_in_bits,
            compute_gflo: t.compute_gflo,
            data_out_bits: t.data_out_bits,
            scheme: p.scheme.as_str(),
            compute_node: p.compute_node,
            compute_site: p.compute_site.label(),
            num_edges: p.path.num_edges(),
            overall_delay_s: p.overall_delay_s,
            isl_tx_s: p.breakdown.isl_tx_s,
            sgl_tx_s: p.breakdown.sgl_tx_s,
            compute_s: p.breakdown.compute_s,
        })?;
    }
    flush(w)
}

pub const SUMMARY_HEADER: [&str; 8] = [
    "scheme",
    "num_tasks",
    "num_dropped",
    "mean_delay_s",
    "mean_isl_tx_s",
    "mean_sgl_tx_s",
    "mean_compute_s",
    "seed",
];

/// One row per report, for delay breakdowns across schemes.
pub fn write_summary_csv<W: Write>(reports: &[&MetricsReport], out: W) -> io::Result<()> {
    let mut w = csv_writer(out);
    w.write_record(SUMMARY_HEADER)?;
    for r in reports {
        let b = r.mean_breakdown;
        w.serialize((
            r.scheme.as_str(),
            r.records.len(),
            r.dropped.len(),
            r.mean_delay_s,
            b.isl_tx_s,
            b.sgl_tx_s,
            b.compute_s,
            r.seed,
        ))?;
    }
    flush(w)
}

pub const SWEEP_HEADER: [&str; 5] = ["N_bits", "C_gflo", "scheme", "mean_delay_s", "argmin_scheme"];

pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], out: W) -> io::Result<()> {
    let mut w = csv_writer(out);
    w.write_record(SWEEP_HEADER)?;
    for r in rows {
        w.serialize((r.n_bits, r.c_gflo, r.scheme.as_str(), r.mean_delay_s, r.argmin_scheme.as_str()))?;
    }
    flush(w)
}

pub const TABLE_HEADER: [&str; 6] = [
    "capability_gflops",
    "impr_vs_ground_pct",
    "impr_vs_onehop_pct",
    "adaptive_delay_s",
    "ground_delay_s",
    "onehop_delay_s",
];

pub fn write_table_csv<W: Write>(rows: &[PlatformRow], out: W) -> io::Result<()> {
    let mut w = csv_writer(out);
    w.write_record(TABLE_HEADER)?;
    for r in rows {
        w.serialize((
            r.capability_gflops,
            r.impr_vs_ground_pct,
            r.impr_vs_onehop_pct,
            r.adaptive_delay_s,
            r.ground_delay_s,
            r.onehop_delay_s,
        ))?;
    }
    flush(w)
}

/// The full report, including every plan's path and legs.
pub fn write_report_json<W: Write>(report: &MetricsReport, mut out: W) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut out, report)?;
    out.write_all(b"\n")
}
