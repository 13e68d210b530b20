use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

/// Formats with nine significant digits, fixed notation for ordinary
/// magnitudes and scientific notation outside `1e-5 ..= 1e9`.
pub fn fmt_sig9(x: f64) -> String {
    if x == 0.0 {
        return "0.00000000".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.8e}");
    let exponent: i32 = sci
        .rsplit_once('e')
        .and_then(|(_, e)| e.parse().ok())
        .unwrap_or(0);
    if (-5..=8).contains(&exponent) {
        format!("{:.*}", (8 - exponent) as usize, x)
    } else {
        sci
    }
}

/// Writes `bytes` to a sibling temporary file and renames it over `path`, so
/// a failed run never leaves a truncated output behind.
pub(crate) fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let file_name = path
        .file_name()
        .ok_or_else(|| Error::io(path, std::io::Error::other("not a file path")))?;
    let tmp = dir.join(format!(".{}.partial", file_name.to_string_lossy()));
    let result = fs::File::create(&tmp)
        .and_then(|mut f| f.write_all(bytes).and_then(|_| f.sync_all()))
        .and_then(|_| fs::rename(&tmp, path));
    if let Err(source) = result {
        let _ = fs::remove_file(&tmp);
        return Err(Error::io(path, source));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nine_significant_digits() {
        assert_eq!(fmt_sig9(-2.0), "-2.00000000");
        assert_eq!(fmt_sig9(0.0), "0.00000000");
        assert_eq!(fmt_sig9(2.0), "2.00000000");
        assert_eq!(fmt_sig9(3.4), "3.40000000");
        assert_eq!(fmt_sig9(0.0123456789), "0.0123456789");
        assert_eq!(fmt_sig9(301.0), "301.000000");
        assert_eq!(fmt_sig9(9.9999999996), "10.0000000");
        assert_eq!(fmt_sig9(1.5e-7), "1.50000000e-7");
    }

    #[test]
    fn atomic_write_replaces_file() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("out.txt");
        write_atomic(&p, b"first").unwrap();
        write_atomic(&p, b"second").unwrap();
        assert_eq!(fs::read_to_string(&p).unwrap(), "second");
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
    }

    #[test]
    fn atomic_write_reports_path() {
        let err = write_atomic(Path::new("/nonexistent-dir/x.csv"), b"x").unwrap_err();
        assert!(err.to_string().contains("/nonexistent-dir/x.csv"));
    }
}
