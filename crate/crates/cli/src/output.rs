//! CSV and manifest emission.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use linksim::harness::BerCurve;
use num_complex::Complex64;

use crate::error::CliError;

/// Format a float in plain decimal notation with at least six significant
/// digits (no exponent, so downstream tooling never needs to parse one).
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 {
        return "0.00000".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (5 - magnitude).max(0) as usize;
    format!("{x:.decimals$}")
}

/// Write one BER curve as CSV.
pub fn emit_csv(curve: &BerCurve, path: &Path) -> Result<(), CliError> {
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    let mut w = BufWriter::new(file);
    (|| -> std::io::Result<()> {
        writeln!(
            w,
            "ebn0_db,ber,bits_sent,bit_errors,std_error,upper_bound_flag"
        )?;
        for r in &curve.records {
            writeln!(
                w,
                "{},{},{},{},{},{}",
                fmt_sig(r.ebn0_db),
                fmt_sig(r.ber),
                r.bits_sent,
                r.bit_errors,
                fmt_sig(r.std_error),
                u8::from(r.upper_bound)
            )?;
        }
        w.flush()
    })()
    .map_err(|e| CliError::io(path, e))
}

/// Write captured constellation points as CSV (`re,im` rows).
pub fn emit_scatter(points: &[Complex64], path: &Path) -> Result<(), CliError> {
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    let mut w = BufWriter::new(file);
    (|| -> std::io::Result<()> {
        writeln!(w, "re,im")?;
        for p in points {
            writeln!(w, "{},{}", fmt_sig(p.re), fmt_sig(p.im))?;
        }
        w.flush()
    })()
    .map_err(|e| CliError::io(path, e))
}

/// Write manifest lines (already formatted `key=value` strings).
pub fn emit_manifest(lines: &[String], path: &Path) -> Result<(), CliError> {
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    let mut w = BufWriter::new(file);
    (|| -> std::io::Result<()> {
        for line in lines {
            writeln!(w, "{line}")?;
        }
        w.flush()
    })()
    .map_err(|e| CliError::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digit_formatting() {
        assert_eq!(fmt_sig(0.0), "0.00000");
        assert_eq!(fmt_sig(4.0), "4.00000");
        assert_eq!(fmt_sig(-4.0), "-4.00000");
        assert_eq!(fmt_sig(0.0125), "0.0125000");
        assert_eq!(fmt_sig(12500.0), "12500.0");
        assert_eq!(fmt_sig(0.5), "0.500000");
        assert_eq!(fmt_sig(1.0e-7), "0.000000100000");
        assert_eq!(fmt_sig(123456789.0), "123456789");
        // Every emitted value stays in plain decimal notation.
        for &x in &[1e-9, 3.7e-4, 2.0, 9.99e6] {
            assert!(!fmt_sig(x).contains('e'));
            assert!(fmt_sig(x).parse::<f64>().is_ok());
        }
    }
}
