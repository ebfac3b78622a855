//! Number formatting and CSV tables shared by the figure generator and the CLI.

use std::fmt::Write as _;

/// Significant digits in every printed number.
pub const SIG_DIGITS: usize = 9;

/// `x` with nine significant digits: fixed notation for moderate magnitudes,
/// scientific otherwise.
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() { "nan".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let mag = x.abs().log10().floor() as i32;
    if (-4..9).contains(&mag) {
        let decimals = (SIG_DIGITS as i32 - 1 - mag).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        format!("{x:.prec$e}", prec = SIG_DIGITS - 1)
    }
}

/// Header plus rows of numbers.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(columns: Vec<String>) -> Self {
        Self { columns, rows: Vec::new() }
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }

    /// Divides every column except the first (the grid) by `factor`.
    pub fn scale_values(&mut self, factor: f64) {
        for row in &mut self.rows {
            for v in row.iter_mut().skip(1) {
                *v /= factor;
            }
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|&v| fmt_sig(v)).collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nine_digits() {
        assert_eq!(fmt_sig(0.639_031_859_650_177), "0.639031860");
        assert_eq!(fmt_sig(4f64.ln()), "1.38629436");
        assert_eq!(fmt_sig(12_345.678_912_3), "12345.6789");
        assert_eq!(fmt_sig(1.5e-7), "1.50000000e-7");
        assert_eq!(fmt_sig(0.0), "0");
        assert_eq!(fmt_sig(3.0), "3.00000000");
    }

    #[test]
    fn csv_layout() {
        let mut t = Table::new(vec!["eps".into(), "v".into()]);
        t.rows.push(vec![0.5, 2.0]);
        t.scale_values(2.0);
        assert_eq!(t.to_csv(), "eps,v\n0.500000000,1.00000000\n");
        assert_eq!(t.column("v"), Some(vec![1.0]));
    }
}
