//! Runs one campaign from a resolved spec: loads the corpus, streams
//! `stats.csv`, and lays down the output directory (`pareto/`, `crashes/`,
//! `config.resolved`, optionally `tmp/`).

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use finch_core::engine::{fuzz, Budget, CampaignResult, CampaignSink, GenerationTrace, StatsRow};
use finch_core::{find_target, EngineConfig, TargetHandle, STATS_HEADER};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::config::{CampaignSpec, SpecBudget};

#[derive(Debug, Error)]
pub enum CampaignError {
    /// Exit 2: the target name matches no built-in.
    #[error("unknown target '{name}'; available: {available}")]
    UnknownTarget { name: String, available: String },
    /// Exit 2: nothing to fuzz.
    #[error("seeds directory {0} contains no readable files")]
    EmptySeeds(PathBuf),
    /// Exit 2: the corpus cannot be read at all.
    #[error("cannot read seeds directory {path}: {source}")]
    SeedsUnreadable {
        path: PathBuf,
        source: std::io::Error,
    },
    /// Exit 3: the output directory cannot be created or written.
    #[error("cannot write output directory {path}: {source}")]
    OutUnwritable {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CampaignError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CampaignError::UnknownTarget { .. }
            | CampaignError::EmptySeeds(_)
            | CampaignError::SeedsUnreadable { .. } => 2,
            CampaignError::OutUnwritable { .. } => 3,
        }
    }
}

/// First 16 hex characters of the content's SHA-256 — the file-naming
/// convention for `pareto/` and `crashes/`.
pub fn content_hash(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    let mut hex = String::with_capacity(16);
    for byte in digest.iter().take(8) {
        hex.push_str(&format!("{byte:02x}"));
    }
    hex
}

/// Reads every regular file in `dir` as one corpus input, sorted by file
/// name so corpus order (and thus the campaign) is reproducible.
pub fn load_corpus(dir: &Path) -> Result<Vec<Vec<u8>>, CampaignError> {
    let entries = fs::read_dir(dir).map_err(|source| CampaignError::SeedsUnreadable {
        path: dir.to_path_buf(),
        source,
    })?;
    let mut files: Vec<PathBuf> = Vec::new();
    for entry in entries {
        let entry = entry.map_err(|source| CampaignError::SeedsUnreadable {
            path: dir.to_path_buf(),
            source,
        })?;
        let path = entry.path();
        if path.is_file() {
            files.push(path);
        }
    }
    files.sort();
    let mut corpus = Vec::with_capacity(files.len());
    for path in files {
        match fs::read(&path) {
            Ok(bytes) => corpus.push(bytes),
            Err(_) => continue, // unreadable entries are skipped, not fatal
        }
    }
    if corpus.is_empty() {
        return Err(CampaignError::EmptySeeds(dir.to_path_buf()));
    }
    Ok(corpus)
}

fn engine_config(spec: &CampaignSpec) -> EngineConfig {
    EngineConfig {
        mode: spec.mode,
        campaign_seed: spec.seed,
        map_size: spec.map_size,
        k: spec.k,
        distance_mode: spec.distance,
        normalization: spec.norm,
        hidden_width: spec.hidden,
        epochs: spec.epochs,
        havoc_ratio: spec.havoc_ratio,
        mutant_budget: spec.mutant_budget,
        per_objective_gradients: spec.per_objective_gradients,
        ..EngineConfig::default()
    }
}

/// Streams stats rows to `stats.csv` as they are produced, warns once on
/// stderr when a generation degrades, and optionally dumps every mutant
/// batch under `tmp/`.
struct FileSink {
    stats: BufWriter<File>,
    tmp_dir: Option<PathBuf>,
    degraded_warned: bool,
}

impl FileSink {
    fn new(out_dir: &Path, dump_tmp: bool) -> std::io::Result<FileSink> {
        let mut stats = BufWriter::new(File::create(out_dir.join("stats.csv"))?);
        writeln!(stats, "{STATS_HEADER}")?;
        stats.flush()?;
        let tmp_dir = if dump_tmp {
            let dir = out_dir.join("tmp");
            fs::create_dir_all(&dir)?;
            Some(dir)
        } else {
            None
        };
        Ok(FileSink {
            stats,
            tmp_dir,
            degraded_warned: false,
        })
    }
}

impl CampaignSink for FileSink {
    fn stats_row(&mut self, row: &StatsRow) {
        // Stats lines are flushed row by row so a watcher (or a crash of the
        // host process) still sees a valid prefix of the series.
        let _ = writeln!(self.stats, "{}", row.to_csv_line());
        let _ = self.stats.flush();
    }

    fn generation(&mut self, trace: &GenerationTrace) {
        if trace.degraded && !self.degraded_warned {
            self.degraded_warned = true;
            eprintln!(
                "warning: generation {} degraded to havoc-only mutation (no trainable objectives)",
                trace.generation
            );
        }
    }

    fn mutant_batch(&mut self, generation: u64, seed_index: usize, mutants: &[Vec<u8>]) {
        let Some(dir) = &self.tmp_dir else {
            return;
        };
        // One file per (generation, seed): u32-le length prefix per mutant.
        let path = dir.join(format!("g{generation:06}_s{seed_index:04}.mutants"));
        let Ok(file) = File::create(path) else {
            return;
        };
        let mut w = BufWriter::new(file);
        for m in mutants {
            let _ = w.write_all(&(m.len() as u32).to_le_bytes());
            let _ = w.write_all(m);
        }
    }
}

fn write_outputs(out_dir: &Path, result: &CampaignResult) -> std::io::Result<()> {
    let pareto = out_dir.join("pareto");
    fs::create_dir_all(&pareto)?;
    for seed in &result.pool {
        fs::write(pareto.join(content_hash(&seed.input)), &seed.input)?;
    }
    let crashes = out_dir.join("crashes");
    fs::create_dir_all(&crashes)?;
    for crash in &result.crashes {
        let name = format!("bug_{}_{}", crash.bug_id, content_hash(&crash.input));
        fs::write(crashes.join(name), &crash.input)?;
    }
    Ok(())
}

pub fn resolve_target(name: &str) -> Result<TargetHandle, CampaignError> {
    find_target(name).ok_or_else(|| CampaignError::UnknownTarget {
        name: name.to_string(),
        available: finch_core::builtin_targets()
            .iter()
            .map(|t| t.name())
            .collect::<Vec<_>>()
            .join(", "),
    })
}

/// Runs the campaign described by `spec`. On success the output directory
/// holds `stats.csv`, `config.resolved`, `pareto/`, and `crashes/`.
pub fn run_campaign(spec: &CampaignSpec, dump_tmp: bool) -> Result<(), CampaignError> {
    let target = resolve_target(&spec.target)?;
    // The corpus is validated before the output directory is touched, so a
    // bad invocation leaves no half-made out_dir behind.
    let corpus = load_corpus(&spec.seeds)?;

    let out_err = |source| CampaignError::OutUnwritable {
        path: spec.out.clone(),
        source,
    };
    fs::create_dir_all(&spec.out).map_err(out_err)?;
    fs::write(spec.out.join("config.resolved"), spec.to_string()).map_err(out_err)?;
    let mut sink = FileSink::new(&spec.out, dump_tmp).map_err(out_err)?;

    let budget = match spec.budget {
        SpecBudget::Execs(n) => Budget::Execs(n),
        SpecBudget::Seconds(s) => Budget::WallSeconds(s),
    };
    let result = fuzz(&target, &corpus, budget, &engine_config(spec), &mut sink);
    write_outputs(&spec.out, &result).map_err(out_err)?;

    println!(
        "campaign complete: {} execs, {} edges, {} unique bugs, pool of {}",
        result.execs,
        result.coverage.count_edges(),
        result.crashes.len(),
        result.pool.len()
    );
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn content_hashes_are_short_stable_hex() {
        let h = content_hash(b"abc");
        assert_eq!(h.len(), 16);
        assert_eq!(h, content_hash(b"abc"));
        assert_ne!(h, content_hash(b"abd"));
        assert!(h.chars().all(|c| c.is_ascii_hexdigit()));
        // SHA-256("abc") begins ba7816bf8f01cfea...
        assert_eq!(h, "ba7816bf8f01cfea");
    }

    #[test]
    fn corpora_load_in_file_name_order() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("b_second"), [2u8]).unwrap();
        fs::write(dir.path().join("a_first"), [1u8]).unwrap();
        fs::write(dir.path().join("c_third"), [3u8]).unwrap();
        let corpus = load_corpus(dir.path()).unwrap();
        assert_eq!(corpus, vec![vec![1], vec![2], vec![3]]);
    }

    #[test]
    fn empty_directories_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(
            load_corpus(dir.path()).unwrap_err(),
            CampaignError::EmptySeeds(_)
        ));
        assert!(matches!(
            load_corpus(&dir.path().join("nope")).unwrap_err(),
            CampaignError::SeedsUnreadable { .. }
        ));
    }

    #[test]
    fn unknown_targets_list_the_alternatives() {
        let err = resolve_target("no_such").unwrap_err();
        assert_eq!(err.exit_code(), 2);
        let msg = err.to_string();
        assert!(msg.contains("fig1") && msg.contains("lava8"));
    }
}
