//! Loading per-arm reward files (`arm_*.csv`) into empirical arms.

use std::fmt;
use std::path::{Path, PathBuf};

use crate::distributions::{DistributionSpec, QuantileLevel};
use crate::error::{Error, Result};
use crate::order_stats::ecdf_inverse;

/// Summary statistics of one ingested arm.
#[derive(Debug, Clone, PartialEq)]
pub struct ArmSummary {
    pub file: PathBuf,
    pub count: usize,
    /// Lower sample median, `inf{x : F_n(x) >= 1/2}`.
    pub median: f64,
    pub min: f64,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IngestReport {
    /// One empirical arm per file, ordered by filename.
    pub arms: Vec<DistributionSpec>,
    pub summaries: Vec<ArmSummary>,
}

impl fmt::Display for IngestReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} arms", self.arms.len())?;
        writeln!(
            f,
            "{:<4} {:<24} {:>8} {:>12} {:>12} {:>12}",
            "arm", "file", "count", "median", "min", "max"
        )?;
        for (i, s) in self.summaries.iter().enumerate() {
            let name = s
                .file
                .file_name()
                .map_or_else(String::new, |n| n.to_string_lossy().into_owned());
            writeln!(
                f,
                "{:<4} {:<24} {:>8} {:>12.4} {:>12.4} {:>12.4}",
                i, name, s.count, s.median, s.min, s.max
            )?;
        }
        Ok(())
    }
}

fn is_arm_file(path: &Path) -> bool {
    path.is_file()
        && path.file_name().and_then(|n| n.to_str()).is_some_and(|n| {
            n.len() > "arm_.csv".len() && n.starts_with("arm_") && n.ends_with(".csv")
        })
}

/// Load every `arm_*.csv` in `dir` as an empirical arm.
pub fn ingest_arm_data(dir: impl AsRef<Path>) -> Result<IngestReport> {
    let dir = dir.as_ref();
    let entries =
        std::fs::read_dir(dir).map_err(|e| Error::io(format!("listing {}", dir.display()), e))?;
    let mut files = Vec::new();
    for entry in entries {
        let path = entry
            .map_err(|e| Error::io(format!("listing {}", dir.display()), e))?
            .path();
        if is_arm_file(&path) {
            files.push(path);
        }
    }
    files.sort();
    if files.len() < 2 {
        return Err(Error::data(
            dir,
            format!("need at least 2 arm_*.csv files, found {}", files.len()),
        ));
    }

    let half = QuantileLevel::new(0.5).expect("valid level");
    let mut arms = Vec::with_capacity(files.len());
    let mut summaries = Vec::with_capacity(files.len());
    for file in files {
        let spec = DistributionSpec::from_csv(&file)?;
        let DistributionSpec::Empirical(data) = &spec else {
            unreachable!("from_csv yields empirical arms")
        };
        let mut ascending = data.samples().to_vec();
        ascending.sort_by(f64::total_cmp);
        summaries.push(ArmSummary {
            count: ascending.len(),
            median: ecdf_inverse(&ascending, half),
            min: ascending[0],
            max: ascending[ascending.len() - 1],
            file,
        });
        arms.push(spec);
    }
    Ok(IngestReport { arms, summaries })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write(dir: &Path, name: &str, body: &str) {
        std::fs::write(dir.join(name), body).unwrap();
    }

    #[test]
    fn two_arms_in_filename_order() {
        let dir = tempfile::tempdir().unwrap();
        write(dir.path(), "arm_b.csv", "4\n5\n6\n");
        write(dir.path(), "arm_a.csv", "reward\n3\n1\n2\n");
        write(dir.path(), "notes.txt", "ignored");
        let report = ingest_arm_data(dir.path()).unwrap();
        assert_eq!(report.arms.len(), 2);
        let medians: Vec<f64> = report.summaries.iter().map(|s| s.median).collect();
        assert_eq!(medians, vec![2.0, 5.0]);
        assert_eq!(report.summaries[0].min, 1.0);
        assert_eq!(report.summaries[1].max, 6.0);
        assert!(report.to_string().contains("arm_a.csv"));
    }

    #[test]
    fn negative_reward_names_file() {
        let dir = tempfile::tempdir().unwrap();
        write(dir.path(), "arm_0.csv", "1\n2\n");
        write(dir.path(), "arm_1.csv", "1\n-2\n");
        let err = ingest_arm_data(dir.path()).unwrap_err().to_string();
        assert!(err.contains("arm_1.csv"), "{err}");
    }

    #[test]
    fn too_few_or_empty_files() {
        let dir = tempfile::tempdir().unwrap();
        write(dir.path(), "arm_0.csv", "1\n");
        assert!(ingest_arm_data(dir.path()).is_err());
        write(dir.path(), "arm_1.csv", "\n");
        let err = ingest_arm_data(dir.path()).unwrap_err().to_string();
        assert!(err.contains("arm_1.csv"), "{err}");
    }
}
