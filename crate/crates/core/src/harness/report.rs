use std::io::Write;

use super::CaseReport;
use crate::error::Result;

pub const CSV_HEADER: &str = "case,n,log_exact,phase_exact,log_pred,ratio,stderr,seconds";

fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:e}")
    } else {
        String::new()
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

/// One row per (case, n). Missing values are empty fields.
pub fn write_csv<W: Write>(reports: &[CaseReport], mut w: W) -> Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for r in reports {
        for rec in &r.records {
            writeln!(
                w,
                "{},{},{},{},{},{},{},{}",
                r.id,
                rec.n,
                num(rec.log_exact),
                num(rec.phase_exact),
                opt(rec.log_pred),
                opt(rec.ratio),
                opt(rec.stderr),
                opt(rec.seconds)
            )?;
        }
    }
    Ok(())
}
