use serde::Serialize;

use super::{expectation, DoubleScalingRow, Level, Observable, QuadratureGrid, ThreeLevelSystem};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExpectationRow {
    pub t: f64,
    pub state: Level,
    pub exp_u: f64,
    pub exp_v: f64,
    #[serde(rename = "exp_J")]
    pub exp_j: f64,
}

/// Quadrature expectations of every level at each time.
pub fn expectation_series(sys: &ThreeLevelSystem, times: &[f64], grid: &QuadratureGrid) -> Result<Vec<ExpectationRow>> {
    let mut rows = Vec::with_capacity(3 * times.len());
    for &t in times {
        for state in Level::ALL {
            let phi = sys.wavefunction(state, t, grid);
            let e = |op| expectation(op, &phi, grid);
            rows.push(ExpectationRow {
                t,
                state,
                exp_u: e(Observable::U)?,
                exp_v: e(Observable::V)?,
                exp_j: e(Observable::J)?,
            });
        }
    }
    Ok(rows)
}

fn to_csv<T: Serialize>(rows: &[T], header: &[&str]) -> Result<String> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    let io = |e: csv::Error| Error::InvalidArgument(format!("csv: {e}"));
    w.write_record(header).map_err(io)?;
    for r in rows {
        w.serialize(r).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::InvalidArgument(format!("csv: {e}")))?;
    String::from_utf8(bytes).map_err(|e| Error::InvalidArgument(format!("csv: {e}")))
}

/// Columns `t,state,exp_u,exp_v,exp_J`.
pub fn expectation_csv(rows: &[ExpectationRow]) -> Result<String> {
    to_csv(rows, &["t", "state", "exp_u", "exp_v", "exp_J"])
}

/// Columns `zeta,k,eig_H,eig_limit,deviation`.
pub fn double_scaling_csv(rows: &[DoubleScalingRow]) -> Result<String> {
    to_csv(rows, &["zeta", "k", "eig_H", "eig_limit", "deviation"])
}
