use std::io::{self, Write};
use std::path::{Path, PathBuf};

use tempfile::NamedTempFile;

use crate::report::MuRecord;

pub const CSV_HEADER: [&str; 5] = ["mu", "lower_margin", "upper_margin", "c_hat", "classification"];

/// Writes through a temporary file in the same directory and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

pub fn csv_path(report: &Path) -> PathBuf {
    report.with_extension("csv")
}

fn cell(x: Option<crate::report::Real>) -> String {
    x.map(|r| r.0.to_string()).unwrap_or_default()
}

pub fn records_csv(records: &[MuRecord]) -> Result<Vec<u8>, csv::Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER)?;
    for r in records {
        w.write_record([
            r.mu.0.to_string(),
            cell(r.lower_margin),
            cell(r.upper_margin),
            cell(r.c_hat),
            r.classification.clone(),
        ])?;
    }
    w.into_inner().map_err(|e| e.into_error().into())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::Real;

    #[test]
    fn csv_layout() {
        let rows = [
            MuRecord {
                mu: Real(-0.5),
                sigma_min: Real(0.5),
                lower_margin: Some(Real(-3.0)),
                upper_margin: Some(Real(-1.0)),
                c_hat: Some(Real(3.0)),
                classification: "strong_negative".into(),
            },
            MuRecord {
                mu: Real(0.0),
                sigma_min: Real(0.0),
                lower_margin: None,
                upper_margin: None,
                c_hat: None,
                classification: "skipped_near_spectrum".into(),
            },
        ];
        let text = String::from_utf8(records_csv(&rows).unwrap()).unwrap();
        assert_eq!(
            text,
            "mu,lower_margin,upper_margin,c_hat,classification\n-0.5,-3,-1,3,strong_negative\n0,,,,skipped_near_spectrum\n"
        );
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("r.json");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(std::fs::read(&p).unwrap(), b"two");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
