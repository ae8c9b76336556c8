//! CSV tables. Floats use the shortest representation that parses back to
//! the same value, so identical runs give identical bytes.

use std::io::Write;

use sda_core::{AdaptHistory, IndicatorField};

use crate::error::CliResult;

/// One mesh of a uniform refinement study.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    pub level: usize,
    pub h: f64,
    pub ndof: usize,
    pub err_h_norm: f64,
    pub theta: f64,
    pub zeta: f64,
    /// `log(e_{l−1}/e_l) / log(h_{l−1}/h_l)`; absent on the first level or
    /// when an error vanishes.
    pub rate: Option<f64>,
}

pub fn float(v: f64) -> String {
    format!("{v:?}")
}

fn optional(v: Option<f64>) -> String {
    v.map(float).unwrap_or_default()
}

pub fn write_indicators<W: Write>(out: W, ind: &IndicatorField) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "element_id", "region", "theta_sq", "zeta_sq", "term_1", "term_2", "term_3", "term_4", "term_5",
    ])?;
    for t in 0..ind.len() {
        let mut row = vec![t.to_string(), ind.region(t).tag().to_string(), float(ind.theta_sq()[t]), float(ind.zeta_sq()[t])];
        row.extend(ind.terms()[t].iter().map(|&v| float(v)));
        w.write_record(&row)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn write_history<W: Write>(out: W, history: &AdaptHistory) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["iter", "ndof", "theta", "zeta", "err_h_norm", "effectivity"])?;
    for r in &history.records {
        w.write_record([
            r.iteration.to_string(),
            r.ndof.to_string(),
            float(r.theta),
            float(r.zeta),
            optional(r.err_h_norm),
            optional(r.effectivity),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn write_convergence<W: Write>(out: W, rows: &[ConvergenceRow]) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["level", "h", "ndof", "err_h_norm", "theta", "zeta", "rate"])?;
    for r in rows {
        w.write_record([
            r.level.to_string(),
            float(r.h),
            r.ndof.to_string(),
            float(r.err_h_norm),
            float(r.theta),
            float(r.zeta),
            optional(r.rate),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Fills in [`ConvergenceRow::rate`] from consecutive rows.
pub fn fill_rates(rows: &mut [ConvergenceRow]) {
    for i in 0..rows.len() {
        rows[i].rate = None;
        if i == 0 {
            continue;
        }
        let (a, b) = (rows[i - 1], rows[i]);
        if a.err_h_norm > 0.0 && b.err_h_norm > 0.0 && a.h != b.h {
            rows[i].rate = Some((a.err_h_norm / b.err_h_norm).ln() / (a.h / b.h).ln());
        }
    }
}
