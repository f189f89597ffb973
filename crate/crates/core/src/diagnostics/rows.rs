use std::io::Write;

use crate::error::Result;

/// One measurement: `(experiment, time, ν, quantity, value)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticRow {
    pub experiment: String,
    pub time: f64,
    pub nu: f64,
    pub quantity: String,
    pub value: f64,
}

impl DiagnosticRow {
    pub fn new(experiment: &str, time: f64, nu: f64, quantity: &str, value: f64) -> Self {
        Self {
            experiment: experiment.to_owned(),
            time,
            nu,
            quantity: quantity.to_owned(),
            value,
        }
    }
}

pub const ROW_HEADER: [&str; 5] = ["experiment", "time", "nu", "quantity", "value"];

/// Writes rows as CSV with a header line.
pub fn write_rows<W: Write>(w: W, rows: &[DiagnosticRow]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(ROW_HEADER)?;
    for r in rows {
        out.write_record(&[
            r.experiment.clone(),
            format!("{:e}", r.time),
            format!("{:e}", r.nu),
            r.quantity.clone(),
            format!("{:e}", r.value),
        ])?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rows_round_trip_through_csv() {
        let rows = vec![
            DiagnosticRow::new("E1", 0.5, 1e-3, "l2_error", 0.125),
            DiagnosticRow::new("E1", 1.0, 1e-3, "l2_error", 0.25),
        ];
        let mut buf = Vec::new();
        write_rows(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("experiment,time,nu,quantity,value"));
        assert_eq!(lines.next(), Some("E1,5e-1,1e-3,l2_error,1.25e-1"));
    }
}
