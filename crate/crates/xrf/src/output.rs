//! Deterministic text output.
//!
//! Every file is a plain-text table or key-value report: `#` header lines
//! name the columns and units, data lines use tab-separated values printed
//! with twelve significant digits. Nothing run-dependent (timestamps, paths,
//! thread counts) is ever written, so rerunning a command byte-identically
//! reproduces its files.

use std::fmt::Write as _;
use std::path::Path;

/// Twelve-significant-digit scientific notation, the one number format used
/// in all output files.
pub fn fmt_g(x: f64) -> String {
    format!("{x:.11e}")
}

/// A key-value report line.
pub fn kv(buf: &mut String, key: &str, value: f64) {
    let _ = writeln!(buf, "{key} = {}", fmt_g(value));
}

/// A tab-separated data row.
pub fn row(buf: &mut String, values: &[f64]) {
    let mut first = true;
    for v in values {
        if !first {
            buf.push('\t');
        }
        first = false;
        buf.push_str(&fmt_g(*v));
    }
    buf.push('\n');
}

/// Write a finished buffer to `dir/name`, creating the directory if needed.
pub fn write_file(dir: &Path, name: &str, content: &str) -> Result<(), String> {
    std::fs::create_dir_all(dir)
        .map_err(|e| format!("cannot create output directory {}: {e}", dir.display()))?;
    let path = dir.join(name);
    std::fs::write(&path, content).map_err(|e| format!("cannot write {}: {e}", path.display()))
}
