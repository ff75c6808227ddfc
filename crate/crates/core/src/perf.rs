//! Analytic throughput models for CPU and FPGA deployments of the AND
//! round, plus measured throughput of local sessions.
//!
//! Every model parameter has a named default below and can be overridden.

use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use crate::engine::SessionReport;
use crate::transport::MsgType;

/// Secure AND operations per AES-128 block in the key-expanded circuit.
pub const ANDS_PER_AES: u64 = 5440;
/// TCP/IP framing overhead applied on top of the raw AND payload.
pub const TCP_OVERHEAD: f64 = 0.0274;
/// Bits processed by one hardware AND core per operation.
pub const FPGA_WIDTH: u64 = 128;
/// Cycles between successive operations of the unpipelined AND core.
pub const FPGA_INITIATION_INTERVAL: u64 = 6;
pub const FPGA_CLOCK_HZ: f64 = 125e6;
/// Fabric utilization of one AND core instance, in percent.
pub const FPGA_INSTANCE_UTILIZATION_PCT: f64 = 1.32;

/// Published multi-core CPU results: `(cores, AES/s, measured Gbps per server)`.
pub const CPU_REFERENCE: [(u32, f64, f64); 5] = [
    (1, 100103.0, 0.572),
    (5, 530408.0, 2.99),
    (10, 975237.0, 5.47),
    (16, 1242310.0, 6.95),
    (20, 1324117.0, 7.38),
];

/// Published verification columns for [`CPU_REFERENCE`]: predicted Gbps
/// with overhead, and error in percent.
pub const CPU_PUBLISHED: [(f64, f64); 5] = [(0.559, 2.19), (2.96, 0.85), (5.45, 0.35), (6.94, 0.10), (7.40, 0.28)];
pub const CPU_GBPS_TOLERANCE: f64 = 0.005;
pub const CPU_ERROR_TOLERANCE_PP: f64 = 0.1;

/// Published `(Gbps, AES/s)` for [`FPGA_CORE_SERIES`].
pub const FPGA_PUBLISHED: [(f64, f64); 6] =
    [(2.67, 0.490e6), (8.00, 1.47e6), (32.0, 5.89e6), (64.0, 11.8e6), (128.0, 23.5e6), (160.0, 29.4e6)];
pub const FPGA_GBPS_TOLERANCE: f64 = 0.05;
pub const FPGA_AES_RELATIVE_TOLERANCE: f64 = 0.01;

/// AND core counts of the FPGA build series.
pub const FPGA_CORE_SERIES: [u64; 6] = [1, 3, 12, 24, 48, 60];

/// Total fabric utilization (percent) against AND core count.
pub const FPGA_UTILIZATION_POINTS: [(f64, f64); 6] =
    [(0.0, 3.2), (3.0, 5.53), (12.0, 14.36), (24.0, 41.26), (48.0, 85.6), (60.0, 98.53)];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("{name} must be positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },
    #[error("{name} must lie in {range}, got {value}")]
    OutOfRange {
        name: &'static str,
        range: &'static str,
        value: f64,
    },
    #[error("need at least two points, got {0}")]
    TooFewPoints(usize),
    #[error("all x values are equal; the fit is undefined")]
    DegenerateX,
    #[error("session has zero duration")]
    ZeroDuration,
}

fn positive(name: &'static str, value: f64) -> Result<f64, ModelError> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(ModelError::NonPositive { name, value })
    }
}

/// Network rate implied by an AES rate: every AND sends one bit per party.
pub fn cpu_bandwidth(aes_per_sec: f64, ands_per_aes: u64, overhead: f64) -> Result<f64, ModelError> {
    positive("aes_per_sec", aes_per_sec)?;
    positive("ands_per_aes", ands_per_aes as f64)?;
    if !(0.0..1.0).contains(&overhead) {
        return Err(ModelError::OutOfRange {
            name: "overhead",
            range: "[0, 1)",
            value: overhead,
        });
    }
    Ok(aes_per_sec * ands_per_aes as f64 * (1.0 + overhead) / 1e9)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CpuModelRow {
    pub cores: u32,
    pub reported_aes_per_sec: f64,
    pub reported_gbps: f64,
    pub predicted_gbps_with_overhead: f64,
    pub error_percent: f64,
}

pub fn cpu_row(cores: u32, aes_per_sec: f64, reported_gbps: f64, ands_per_aes: u64, overhead: f64) -> Result<CpuModelRow, ModelError> {
    positive("reported_gbps", reported_gbps)?;
    let predicted = cpu_bandwidth(aes_per_sec, ands_per_aes, overhead)?;
    Ok(CpuModelRow {
        cores,
        reported_aes_per_sec: aes_per_sec,
        reported_gbps,
        predicted_gbps_with_overhead: predicted,
        error_percent: (reported_gbps - predicted).abs() / reported_gbps * 100.0,
    })
}

/// The CPU table with default model constants.
pub fn cpu_table() -> Vec<CpuModelRow> {
    CPU_REFERENCE
        .iter()
        .map(|&(c, aes, gbps)| cpu_row(c, aes, gbps, ANDS_PER_AES, TCP_OVERHEAD).expect("reference data is valid"))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FpgaModelRow {
    pub and_cores: u64,
    pub freq_hz: f64,
    pub initiation_interval: u64,
    pub bits_per_round: u64,
    pub gbps: f64,
    pub aes_per_sec: f64,
}

pub fn fpga_throughput(
    and_cores: u64,
    freq_hz: f64,
    width: u64,
    initiation_interval: u64,
    ands_per_aes: u64,
) -> Result<FpgaModelRow, ModelError> {
    positive("and_cores", and_cores as f64)?;
    positive("freq_hz", freq_hz)?;
    positive("width", width as f64)?;
    positive("initiation_interval", initiation_interval as f64)?;
    positive("ands_per_aes", ands_per_aes as f64)?;
    let bits = and_cores * width;
    let gbps = bits as f64 * freq_hz / initiation_interval as f64 / 1e9;
    Ok(FpgaModelRow {
        and_cores,
        freq_hz,
        initiation_interval,
        bits_per_round: bits,
        gbps,
        aes_per_sec: gbps * 1e9 / ands_per_aes as f64,
    })
}

/// The FPGA build series with default model constants.
pub fn fpga_table() -> Vec<FpgaModelRow> {
    FPGA_CORE_SERIES
        .iter()
        .map(|&n| {
            fpga_throughput(n, FPGA_CLOCK_HZ, FPGA_WIDTH, FPGA_INITIATION_INTERVAL, ANDS_PER_AES).expect("valid defaults")
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CapacityEstimate {
    pub instances: u64,
    pub ops_per_cycle: u64,
}

pub fn capacity_estimate(
    per_instance_pct: f64,
    usable_fraction: f64,
    initiation_interval: u64,
) -> Result<CapacityEstimate, ModelError> {
    if !(per_instance_pct > 0.0 && per_instance_pct <= 100.0) {
        return Err(ModelError::OutOfRange {
            name: "per_instance_pct",
            range: "(0, 100]",
            value: per_instance_pct,
        });
    }
    if !(usable_fraction > 0.0 && usable_fraction <= 1.0) {
        return Err(ModelError::OutOfRange {
            name: "usable_fraction",
            range: "(0, 1]",
            value: usable_fraction,
        });
    }
    positive("initiation_interval", initiation_interval as f64)?;
    let instances = (usable_fraction * 100.0 / per_instance_pct).floor() as u64;
    Ok(CapacityEstimate {
        instances,
        ops_per_cycle: ops_per_cycle(instances, initiation_interval),
    })
}

/// Operations issued per cycle by `instances` unpipelined cores.
pub fn ops_per_cycle(instances: u64, initiation_interval: u64) -> u64 {
    instances / initiation_interval
}

/// Link rate saturated by `ops_per_cycle` operations of `width` bits.
pub fn saturated_gbps(ops_per_cycle: u64, width: u64, freq_hz: f64) -> f64 {
    (ops_per_cycle * width) as f64 * freq_hz / 1e9
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FitResult {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Ordinary least squares `y = slope·x + intercept`.
pub fn utilization_fit(points: &[(f64, f64)]) -> Result<FitResult, ModelError> {
    if points.len() < 2 {
        return Err(ModelError::TooFewPoints(points.len()));
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = points.iter().map(|p| (p.1 - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(ModelError::DegenerateX);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = points.iter().map(|p| (p.1 - (slope * p.0 + intercept)).powi(2)).sum();
    // A flat y series is fitted perfectly.
    let r_squared = if syy == 0.0 { 1.0 } else { (1.0 - ss_res / syy).clamp(0.0, 1.0) };
    Ok(FitResult {
        slope,
        intercept,
        r_squared,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Throughput {
    /// AND gates evaluated, summed over lanes.
    pub and_ops: u64,
    pub seconds: f64,
    pub ands_per_sec: f64,
    pub equivalent_aes_per_sec: f64,
    /// `AND_ROUND` payload bits sent by one party, from its counters.
    pub payload_bits: u64,
    pub payload_gbps: f64,
}

/// Rates of a finished session, timed over its compute phase.
pub fn measure_throughput(report: &SessionReport) -> Result<Throughput, ModelError> {
    let and_ops = (report.and_gates * report.lanes) as u64;
    let payload_bits = report.counters[0].sent(MsgType::AndRound).payload_bytes * 8;
    throughput_from(and_ops, payload_bits, report.compute_elapsed.as_secs_f64(), ANDS_PER_AES)
}

pub fn throughput_from(and_ops: u64, payload_bits: u64, seconds: f64, ands_per_aes: u64) -> Result<Throughput, ModelError> {
    if seconds <= 0.0 {
        return Err(ModelError::ZeroDuration);
    }
    // AND/s is derived from AES/s so that `aes * ands_per_aes == ands`
    // holds bit for bit, not just to within rounding.
    let equivalent_aes_per_sec = and_ops as f64 / ands_per_aes as f64 / seconds;
    Ok(Throughput {
        and_ops,
        seconds,
        ands_per_sec: equivalent_aes_per_sec * ands_per_aes as f64,
        equivalent_aes_per_sec,
        payload_bits,
        payload_gbps: payload_bits as f64 / seconds / 1e9,
    })
}

/// Renders rows as a right-aligned text table.
pub fn aligned_table(headers: &[&str], rows: &[Vec<String>]) -> String {
    let widths: Vec<usize> = (0..headers.len())
        .map(|i| rows.iter().map(|r| r[i].len()).chain([headers[i].len()]).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    let line = |cells: &mut dyn Iterator<Item = &str>, out: &mut String| {
        let parts: Vec<String> = cells.zip(&widths).map(|(c, w)| format!("{c:>w$}")).collect();
        let _ = writeln!(out, "{}", parts.join("  ").trim_end());
    };
    line(&mut headers.iter().copied(), &mut out);
    let _ = writeln!(out, "{}", widths.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>().join("  "));
    for r in rows {
        line(&mut r.iter().map(String::as_str), &mut out);
    }
    out
}

pub fn cpu_table_text(rows: &[CpuModelRow]) -> String {
    let body: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.cores.to_string(),
                format!("{:.0}", r.reported_aes_per_sec),
                format!("{:.3}", r.reported_gbps),
                format!("{:.3}", r.predicted_gbps_with_overhead),
                format!("{:.2}%", r.error_percent),
            ]
        })
        .collect();
    aligned_table(&["cores", "aes/s", "gbps", "predicted gbps", "error"], &body)
}

pub fn fpga_table_text(rows: &[FpgaModelRow]) -> String {
    let body: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.and_cores.to_string(),
                r.bits_per_round.to_string(),
                format!("{:.2}", r.gbps),
                format!("{:.3}M", r.aes_per_sec / 1e6),
            ]
        })
        .collect();
    aligned_table(&["and cores", "bits", "gbps", "aes/s"], &body)
}
