//! Post-campaign reporting: summarize `stats.csv`, emit plot-ready TSV
//! series, and optionally re-execute the `pareto/` seeds to verify they
//! still sit on a mutual Pareto boundary.

use std::fs;
use std::path::{Path, PathBuf};

use finch_core::engine::StatsRow;
use finch_core::{dominates, BranchSiteId, ExecConfig, Outcome};
use thiserror::Error;

use crate::campaign::resolve_target;
use crate::config::{CampaignSpec, ConfigLayer};

#[derive(Debug, Error)]
pub enum ReportError {
    /// Exit 2: the directory is not a campaign output.
    #[error("no stats.csv in {0} (not a campaign output directory?)")]
    MissingStats(PathBuf),
    /// Exit 2: verification requires the resolved config.
    #[error("cannot verify: {0}")]
    VerifyUnavailable(String),
    /// Exit 1: a pareto/ seed failed re-execution checks.
    #[error("pareto verification failed: {0}")]
    VerifyFailed(String),
    /// Exit 3: plot files could not be written.
    #[error("cannot write {path}: {source}")]
    Unwritable {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl ReportError {
    pub fn exit_code(&self) -> i32 {
        match self {
            ReportError::MissingStats(_) | ReportError::VerifyUnavailable(_) => 2,
            ReportError::VerifyFailed(_) => 1,
            ReportError::Unwritable { .. } => 3,
        }
    }
}

/// Parses the stats series, skipping the header and (with a stderr warning)
/// any row that does not parse.
pub fn read_stats(path: &Path) -> Result<Vec<StatsRow>, ReportError> {
    let text =
        fs::read_to_string(path).map_err(|_| ReportError::MissingStats(path.to_path_buf()))?;
    let mut rows = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if idx == 0 && line == finch_core::STATS_HEADER {
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        match StatsRow::parse_csv_line(line) {
            Some(row) => rows.push(row),
            None => eprintln!("warning: skipping malformed stats row {}: '{line}'", idx + 1),
        }
    }
    Ok(rows)
}

fn write_tsv(path: &Path, rows: &[(f64, String)]) -> Result<(), ReportError> {
    let mut body = String::new();
    for (t, v) in rows {
        body.push_str(&format!("{t:.6}\t{v}\n"));
    }
    fs::write(path, body).map_err(|source| ReportError::Unwritable {
        path: path.to_path_buf(),
        source,
    })
}

/// Re-executes every `pareto/` file under the campaign's own configuration
/// and checks that no seed's all-site distance vector dominates another's.
fn verify_pareto(out_dir: &Path) -> Result<usize, ReportError> {
    let resolved = out_dir.join("config.resolved");
    let layer = ConfigLayer::from_file(&resolved)
        .map_err(|e| ReportError::VerifyUnavailable(e.to_string()))?;
    let spec = CampaignSpec::resolve(layer)
        .map_err(|e| ReportError::VerifyUnavailable(e.to_string()))?;
    let target =
        resolve_target(&spec.target).map_err(|e| ReportError::VerifyUnavailable(e.to_string()))?;

    let pareto_dir = out_dir.join("pareto");
    let entries = fs::read_dir(&pareto_dir)
        .map_err(|_| ReportError::VerifyUnavailable(format!("no pareto/ in {}", out_dir.display())))?;
    let mut files: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file())
        .collect();
    files.sort();

    let exec_cfg = ExecConfig {
        map_size: spec.map_size,
        k: spec.k,
        distance_mode: spec.distance,
        ..ExecConfig::default()
    };
    let all_sites: Vec<BranchSiteId> = (0..target.site_count()).map(BranchSiteId).collect();
    let mut vectors: Vec<(PathBuf, Vec<u64>)> = Vec::new();
    for path in files {
        let bytes = fs::read(&path).map_err(|e| ReportError::VerifyUnavailable(e.to_string()))?;
        let result = target.run(&bytes, &exec_cfg);
        if result.outcome != Outcome::Ok {
            return Err(ReportError::VerifyFailed(format!(
                "{} no longer executes cleanly ({:?})",
                path.display(),
                result.outcome
            )));
        }
        vectors.push((path, result.distances.project(&all_sites)));
    }
    for (pa, va) in &vectors {
        for (pb, vb) in &vectors {
            if dominates(va, vb) {
                return Err(ReportError::VerifyFailed(format!(
                    "{} dominates {}",
                    pa.display(),
                    pb.display()
                )));
            }
        }
    }
    Ok(vectors.len())
}

/// Prints the campaign summary, writes `coverage_over_time.tsv` and
/// `training_time.tsv`, and optionally verifies `pareto/`.
pub fn report(out_dir: &Path, verify: bool) -> Result<(), ReportError> {
    let rows = read_stats(&out_dir.join("stats.csv"))?;

    let coverage: Vec<(f64, String)> = rows
        .iter()
        .map(|r| (r.wall_seconds, r.edges_covered.to_string()))
        .collect();
    write_tsv(&out_dir.join("coverage_over_time.tsv"), &coverage)?;
    let training: Vec<(f64, String)> = rows
        .iter()
        .map(|r| (r.wall_seconds, format!("{:.6}", r.training_seconds_cum)))
        .collect();
    write_tsv(&out_dir.join("training_time.tsv"), &training)?;

    match rows.last() {
        Some(last) => {
            println!("total execs:              {}", last.execs);
            println!("edges covered:            {}", last.edges_covered);
            println!("unique bugs:              {}", last.crashes_unique);
            println!("final pool size:          {}", last.pool_size);
            println!("training seconds (cum):   {:.6}", last.training_seconds_cum);
        }
        None => println!("stats.csv holds no usable rows"),
    }

    if verify {
        let checked = verify_pareto(out_dir)?;
        println!("pareto/ verified:         {checked} seeds mutually non-dominated");
    }
    Ok(())
}
