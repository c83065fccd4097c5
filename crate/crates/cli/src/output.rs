//! Number formatting shared by the report and file writers.

/// 12 significant digits, scientific; the stable CSV cell format.
pub fn sig12(x: f64) -> String {
    format!("{x:.11e}")
}

/// Fixed 12 decimals for the human-readable reports.
pub fn dec12(x: f64) -> String {
    format!("{x:.12}")
}

/// Optional cell: empty when absent.
pub fn opt_sig12(x: Option<f64>) -> String {
    x.map(sig12).unwrap_or_default()
}
