//! The campaign loop: execute, score, schedule, mutate, repeat.
//!
//! Two modes share one chassis. The default mode seeds its pool with the
//! minimal Pareto set of the initial corpus, then each generation recomputes
//! the open objectives, trains a throwaway distance predictor on the pool,
//! walks every seed's hot bytes along the model's input gradients (plus a
//! havoc share), and keeps exactly the mutants that land on the Pareto
//! boundary of the distance vectors — new coverage is not required to earn a
//! pool slot. The baseline mode is the classic loop: havoc everything, keep
//! a mutant only when it covers a new edge.
//!
//! Campaigns with an execution budget run on a virtual clock (a fixed
//! microsecond price per execution and per training unit), so two runs with
//! the same configuration produce byte-identical statistics. Wall-clock
//! budgets use real time instead.

use std::collections::BTreeSet;
use std::time::Instant;

use crate::coverage::CoverageBitmap;
use crate::distance::{BranchSiteId, DistanceBitmap, DistanceMode, Normalization, DEFAULT_K};
use crate::model::{build_training_set, train, Model, TrainConfig, TrainReport};
use crate::mutator::{havoc, mutate_hot_bytes};
use crate::pareto::{dominates, just_missed, min_pareto_set, pareto_boundary};
use crate::target::{ExecConfig, ExecutionResult, Outcome, TargetHandle};

/// Virtual cost of one target execution, in microseconds. Only campaigns
/// with an execution budget use it; the fixed price keeps their statistics
/// reproducible down to the byte.
const EXEC_TICK_MICROS: u64 = 20;
/// Virtual cost of one training unit (one example visited for one epoch).
const TRAIN_UNIT_MICROS: u64 = 100;

const TAG_MODEL: u64 = 1;
const TAG_HAVOC: u64 = 2;

/// How long a campaign runs: a fixed number of target executions (counting
/// the initial corpus) or a wall-clock allowance in seconds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Budget {
    Execs(u64),
    WallSeconds(f64),
}

/// Which loop drives the campaign.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FuzzMode {
    /// Distance-guided: Pareto scheduling plus gradient mutation.
    #[default]
    Finch,
    /// Coverage-only control: havoc mutation, new-edge retention.
    Baseline,
}

/// Campaign-wide knobs. Defaults match the documented per-module defaults.
#[derive(Debug, Clone)]
pub struct EngineConfig {
    pub mode: FuzzMode,
    pub campaign_seed: u64,
    pub map_size: usize,
    /// Distance ceiling `K`.
    pub k: u64,
    pub distance_mode: DistanceMode,
    pub normalization: Normalization,
    pub hidden_width: usize,
    pub epochs: usize,
    /// Havoc mutants per seed as a fraction of its hot-byte emissions
    /// (at least one mutant always runs, so a flat gradient cannot stall a
    /// generation).
    pub havoc_ratio: f64,
    /// Hot-byte emission cap per seed per generation.
    pub mutant_budget: usize,
    /// Havoc mutants per seed in baseline mode, and in degraded generations
    /// that have no model to walk.
    pub baseline_havoc_count: usize,
    /// Reported events allowed per execution before it counts as a hang.
    pub event_budget: u64,
    /// Walk one gradient per minimized objective instead of one aggregate
    /// gradient per seed (experimental; reachable through the config file
    /// only).
    pub per_objective_gradients: bool,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            mode: FuzzMode::Finch,
            campaign_seed: 0,
            map_size: 65536,
            k: DEFAULT_K,
            distance_mode: DistanceMode::Abs,
            normalization: Normalization::Linear,
            hidden_width: 512,
            epochs: 200,
            havoc_ratio: 0.25,
            mutant_budget: 1 << 16,
            baseline_havoc_count: 512,
            event_budget: 1_000_000,
            per_objective_gradients: false,
        }
    }
}

/// One line of the campaign's time series. The CSV schema is frozen; see
/// [`STATS_HEADER`].
#[derive(Debug, Clone, PartialEq)]
pub struct StatsRow {
    pub wall_seconds: f64,
    pub execs: u64,
    pub edges_covered: u64,
    pub pool_size: usize,
    pub objective_count: usize,
    pub training_seconds_cum: f64,
    pub crashes_unique: usize,
}

/// Header of `stats.csv`, exactly as written.
pub const STATS_HEADER: &str =
    "wall_seconds,execs,edges_covered,pool_size,objective_count,training_seconds_cum,crashes_unique";

impl StatsRow {
    /// The row as a CSV line (no trailing newline). Seconds are printed with
    /// six decimals, so virtual-clock rows are byte-stable.
    pub fn to_csv_line(&self) -> String {
        format!(
            "{:.6},{},{},{},{},{:.6},{}",
            self.wall_seconds,
            self.execs,
            self.edges_covered,
            self.pool_size,
            self.objective_count,
            self.training_seconds_cum,
            self.crashes_unique
        )
    }

    /// Parses one CSV line; `None` for malformed rows (tolerant readers skip
    /// them).
    pub fn parse_csv_line(line: &str) -> Option<StatsRow> {
        let mut it = line.split(',');
        let row = StatsRow {
            wall_seconds: it.next()?.parse().ok()?,
            execs: it.next()?.parse().ok()?,
            edges_covered: it.next()?.parse().ok()?,
            pool_size: it.next()?.parse().ok()?,
            objective_count: it.next()?.parse().ok()?,
            training_seconds_cum: it.next()?.parse().ok()?,
            crashes_unique: it.next()?.parse().ok()?,
        };
        if it.next().is_some() {
            return None;
        }
        Some(row)
    }
}

/// A pool member: the bytes that ran and the distances they scored.
/// Distance bitmaps are kept from the original execution and re-projected
/// when objectives change — targets are deterministic, so re-running would
/// buy nothing.
#[derive(Debug, Clone, PartialEq)]
pub struct PoolSeed {
    pub input: Vec<u8>,
    pub distances: DistanceBitmap,
}

/// One deduplicated crash: the first input observed to trigger each bug id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrashRecord {
    pub input: Vec<u8>,
    pub bug_id: u32,
}

/// Appends the candidate iff its bug id is new; returns whether it entered.
/// Bugs are ground-truth labeled by the harness, so one exemplar per id is
/// enough.
pub fn dedup_crash(pool: &mut Vec<CrashRecord>, input: Vec<u8>, bug_id: u32) -> bool {
    if pool.iter().any(|c| c.bug_id == bug_id) {
        return false;
    }
    pool.push(CrashRecord { input, bug_id });
    true
}

/// What one generation did — the engine's mechanism log, kept in memory for
/// tests and debugging (the CSV time series carries only the frozen
/// columns).
#[derive(Debug, Clone, PartialEq)]
pub struct GenerationTrace {
    pub generation: u64,
    pub pool_before: usize,
    pub objective_count: usize,
    /// No model was available this generation (no objectives, or nothing to
    /// train on), so mutation fell back to havoc only.
    pub degraded: bool,
    pub train: Option<TrainReport>,
    pub mutants_executed: u64,
    /// Mutants that survived candidate filtering this generation: the
    /// streamed Pareto front in guided mode, direct pool admissions
    /// otherwise.
    pub candidates_retained: usize,
    /// Seeds entering the merge: previous pool plus retained candidates.
    pub merge_input: usize,
    pub boundary_size: usize,
    pub pool_after: usize,
    /// Retained candidates that covered no new edge yet strictly dominated a
    /// then-current pool member — progress invisible to coverage alone.
    pub no_new_edge_improvements: u64,
}

/// Receives campaign events as they happen. The CLI streams them to disk;
/// tests usually pass [`NullSink`].
pub trait CampaignSink {
    fn stats_row(&mut self, row: &StatsRow);
    fn generation(&mut self, _trace: &GenerationTrace) {}
    /// One seed's mutant batch, before execution (debug hook).
    fn mutant_batch(&mut self, _generation: u64, _seed_index: usize, _mutants: &[Vec<u8>]) {}
}

/// Sink that drops everything.
pub struct NullSink;

impl CampaignSink for NullSink {
    fn stats_row(&mut self, _row: &StatsRow) {}
}

/// Everything a finished campaign hands back.
#[derive(Debug)]
pub struct CampaignResult {
    pub pool: Vec<PoolSeed>,
    pub crashes: Vec<CrashRecord>,
    pub stats: Vec<StatsRow>,
    pub traces: Vec<GenerationTrace>,
    pub coverage: CoverageBitmap,
    pub execs: u64,
    pub hangs: u64,
}

/// Deterministic per-purpose RNG seeds: one stream per
/// (campaign, generation, pool member, purpose) tuple.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn stream_seed(campaign: u64, generation: u64, member: u64, tag: u64) -> u64 {
    let mut s = splitmix64(campaign);
    for v in [generation, member, tag] {
        s = splitmix64(s ^ v);
    }
    s
}

enum CampaignClock {
    Virtual { micros: u64 },
    Real { start: Instant },
}

impl CampaignClock {
    fn for_budget(budget: Budget) -> Self {
        match budget {
            Budget::Execs(_) => CampaignClock::Virtual { micros: 0 },
            Budget::WallSeconds(_) => CampaignClock::Real {
                start: Instant::now(),
            },
        }
    }

    fn tick(&mut self, micros: u64) {
        if let CampaignClock::Virtual { micros: m } = self {
            *m += micros;
        }
    }

    fn seconds(&self) -> f64 {
        match self {
            CampaignClock::Virtual { micros } => *micros as f64 / 1e6,
            CampaignClock::Real { start } => start.elapsed().as_secs_f64(),
        }
    }
}

/// Streaming Pareto front over this generation's candidate mutants. Keeping
/// only mutually non-dominated candidates (first exemplar per distinct
/// vector) is equivalent to boundary-filtering the full mutant list at merge
/// time: dominated candidates can never reach the merged boundary, and the
/// greedy minimizer never keeps a later duplicate.
struct CandidateFront {
    entries: Vec<(Vec<u8>, DistanceBitmap, Vec<u64>)>,
    k: u64,
}

impl CandidateFront {
    fn new(k: u64) -> Self {
        CandidateFront {
            entries: Vec::new(),
            k,
        }
    }

    fn insert(&mut self, input: Vec<u8>, distances: DistanceBitmap, fvec: Vec<u64>) -> bool {
        if fvec.iter().all(|&d| d >= self.k) {
            return false;
        }
        if self
            .entries
            .iter()
            .any(|(_, _, f)| f == &fvec || dominates(f, &fvec))
        {
            return false;
        }
        self.entries.retain(|(_, _, f)| !dominates(&fvec, f));
        self.entries.push((input, distances, fvec));
        true
    }
}

struct Campaign<'a> {
    target: &'a TargetHandle,
    cfg: &'a EngineConfig,
    exec_cfg: ExecConfig,
    budget: Budget,
    clock: CampaignClock,
    execs: u64,
    hangs: u64,
    coverage: CoverageBitmap,
    crashes: Vec<CrashRecord>,
    stats: Vec<StatsRow>,
    traces: Vec<GenerationTrace>,
    training_seconds_cum: f64,
    sink: &'a mut dyn CampaignSink,
}

impl<'a> Campaign<'a> {
    fn new(
        target: &'a TargetHandle,
        budget: Budget,
        cfg: &'a EngineConfig,
        sink: &'a mut dyn CampaignSink,
    ) -> Self {
        let exec_cfg = ExecConfig {
            map_size: cfg.map_size,
            k: cfg.k,
            distance_mode: cfg.distance_mode,
            event_budget: cfg.event_budget,
        };
        Campaign {
            target,
            cfg,
            exec_cfg,
            budget,
            clock: CampaignClock::for_budget(budget),
            execs: 0,
            hangs: 0,
            coverage: CoverageBitmap::new(cfg.map_size),
            crashes: Vec::new(),
            stats: Vec::new(),
            traces: Vec::new(),
            training_seconds_cum: 0.0,
            sink,
        }
    }

    fn exhausted(&self) -> bool {
        match self.budget {
            Budget::Execs(n) => self.execs >= n,
            Budget::WallSeconds(s) => self.clock.seconds() >= s,
        }
    }

    /// Runs one input: counts it, charges the clock, merges its coverage,
    /// pools crashes, counts hangs. Returns the result and whether it
    /// covered any new edge.
    fn execute(&mut self, input: &[u8]) -> (ExecutionResult, bool) {
        let result = self.target.run(input, &self.exec_cfg);
        self.execs += 1;
        self.clock.tick(EXEC_TICK_MICROS);
        let new_edges = !self.coverage.new_edges(&result.coverage).is_empty();
        self.coverage.merge(&result.coverage);
        match result.outcome {
            Outcome::Crash(bug) => {
                let effective = &input[..input.len().min(self.target.max_input_len())];
                dedup_crash(&mut self.crashes, effective.to_vec(), bug);
            }
            Outcome::Hang => self.hangs += 1,
            Outcome::Ok => {}
        }
        (result, new_edges)
    }

    fn train_model(&mut self, generation: u64, pool: &[PoolSeed], objectives: &[BranchSiteId]) -> (Option<Model>, Option<TrainReport>) {
        let inputs: Vec<&[u8]> = pool.iter().map(|s| s.input.as_slice()).collect();
        let bitmaps: Vec<&DistanceBitmap> = pool.iter().map(|s| &s.distances).collect();
        let Some(set) = build_training_set(&inputs, &bitmaps, objectives, self.cfg.normalization)
        else {
            return (None, None);
        };
        let train_cfg = TrainConfig {
            hidden: self.cfg.hidden_width,
            epochs: self.cfg.epochs,
            rng_seed: stream_seed(self.cfg.campaign_seed, generation, 0, TAG_MODEL),
            ..TrainConfig::default()
        };
        let started = Instant::now();
        let (model, report) = train(&set, &train_cfg);
        match &mut self.clock {
            CampaignClock::Virtual { .. } => {
                let micros = report.training_units * TRAIN_UNIT_MICROS;
                self.clock.tick(micros);
                self.training_seconds_cum += micros as f64 / 1e6;
            }
            CampaignClock::Real { .. } => {
                self.training_seconds_cum += started.elapsed().as_secs_f64();
            }
        }
        (Some(model), Some(report))
    }

    fn push_stats(&mut self, pool_size: usize, objective_count: usize) {
        let row = StatsRow {
            wall_seconds: self.clock.seconds(),
            execs: self.execs,
            edges_covered: self.coverage.count_edges(),
            pool_size,
            objective_count,
            training_seconds_cum: self.training_seconds_cum,
            crashes_unique: self.crashes.len(),
        };
        self.sink.stats_row(&row);
        self.stats.push(row);
    }

    fn open_objectives(&self, pool: &[PoolSeed]) -> Vec<BranchSiteId> {
        just_missed(pool.iter().map(|s| &s.distances), |site| {
            self.target.site_fully_covered(&self.coverage, site)
        })
    }

    /// Min-Pareto reduction of `seeds` over `objectives`. Returns the kept
    /// seeds plus (merge input, boundary size) for the trace. If the
    /// reduction would empty a nonempty pool (every vector at the ceiling),
    /// the seeds are kept unminimized — an empty pool has nothing left to
    /// mutate.
    fn minimize(
        seeds: Vec<PoolSeed>,
        objectives: &[BranchSiteId],
        k: u64,
    ) -> (Vec<PoolSeed>, usize, usize) {
        let merge_input = seeds.len();
        let fvecs: Vec<Vec<u64>> = seeds
            .iter()
            .map(|s| s.distances.project(objectives))
            .collect();
        let boundary = pareto_boundary(&fvecs, k);
        if boundary.is_empty() {
            let n = seeds.len();
            return (seeds, merge_input, n);
        }
        let boundary_fvecs: Vec<Vec<u64>> = boundary.iter().map(|&i| fvecs[i].clone()).collect();
        let reduced = min_pareto_set(&boundary_fvecs);
        let mut seeds: Vec<Option<PoolSeed>> = seeds.into_iter().map(Some).collect();
        let pool: Vec<PoolSeed> = reduced
            .kept
            .iter()
            .map(|&i| seeds[boundary[i]].take().expect("kept indices are unique"))
            .collect();
        (pool, merge_input, boundary.len())
    }

    fn result(self, pool: Vec<PoolSeed>) -> CampaignResult {
        CampaignResult {
            pool,
            crashes: self.crashes,
            stats: self.stats,
            traces: self.traces,
            coverage: self.coverage,
            execs: self.execs,
            hangs: self.hangs,
        }
    }
}

fn effective_input(target: &TargetHandle, input: &[u8]) -> Vec<u8> {
    input[..input.len().min(target.max_input_len())].to_vec()
}

/// The distance-guided campaign loop.
///
/// The initial corpus always executes in full (the pool cannot exist
/// otherwise) and counts against the budget; the budget gates the mutation
/// generations, so a zero budget returns exactly the minimized initial pool.
/// Each generation: recompute open objectives, train a model on the pool,
/// walk each seed's gradient groups plus a havoc share, execute everything,
/// stream candidates onto a Pareto front, then merge and re-minimize the
/// pool. Generations without objectives (or without a trainable set) fall
/// back to havoc with new-edge retention, flagged in the trace and visible
/// as `objective_count = 0` in the stats.
///
/// # Panics
/// Panics if `t0` is empty or the coverage map cannot hold the target.
pub fn hot_fuzz(
    target: &TargetHandle,
    t0: &[Vec<u8>],
    budget: Budget,
    cfg: &EngineConfig,
    sink: &mut dyn CampaignSink,
) -> CampaignResult {
    assert!(!t0.is_empty(), "the initial corpus must not be empty");
    let mut c = Campaign::new(target, budget, cfg, sink);

    let mut candidates: Vec<PoolSeed> = Vec::new();
    for input in t0 {
        let (result, _) = c.execute(input);
        if result.outcome == Outcome::Ok {
            candidates.push(PoolSeed {
                input: effective_input(target, input),
                distances: result.distances,
            });
        }
    }
    let objectives = c.open_objectives(&candidates);
    let (mut pool, _, _) = Campaign::minimize(candidates, &objectives, cfg.k);
    c.push_stats(pool.len(), objectives.len());

    let mut generation = 0u64;
    while !c.exhausted() && !pool.is_empty() {
        generation += 1;
        let objectives = c.open_objectives(&pool);
        let (model, report) = if objectives.is_empty() {
            (None, None)
        } else {
            c.train_model(generation, &pool, &objectives)
        };
        let degraded = model.is_none();

        // Per-seed gradient focus: the objectives each seed currently
        // minimizes (non-strictly), recomputed under this generation's
        // objective list; a seed minimizing nothing falls back to the
        // aggregate gradient over all outputs.
        let pool_fvecs: Vec<Vec<u64>> = pool
            .iter()
            .map(|s| s.distances.project(&objectives))
            .collect();
        let mut column_min = vec![u64::MAX; objectives.len()];
        for f in &pool_fvecs {
            for (lo, d) in column_min.iter_mut().zip(f) {
                *lo = (*lo).min(*d);
            }
        }
        let focus: Vec<Vec<usize>> = pool_fvecs
            .iter()
            .map(|f| {
                (0..f.len())
                    .filter(|&j| f[j] == column_min[j] && f[j] < cfg.k)
                    .collect()
            })
            .collect();

        let mut front = CandidateFront::new(cfg.k);
        let mut direct_adds = 0usize;
        let mut mutants_executed = 0u64;
        let mut no_new_edge_improvements = 0u64;
        let pool_before = pool.len();

        'seeds: for seed_idx in 0..pool_before {
            if c.exhausted() {
                break;
            }
            let seed_input = pool[seed_idx].input.clone();
            let mut mutants: Vec<Vec<u8>> = Vec::new();
            if let Some(model) = &model {
                // Model inputs are padded/scaled exactly like training rows.
                let mut x = ndarray::Array1::zeros(model.in_dim());
                for (i, b) in seed_input.iter().enumerate().take(model.in_dim()) {
                    x[i] = f64::from(*b) / 255.0;
                }
                let subsets: Vec<Vec<usize>> = if cfg.per_objective_gradients {
                    let cols = if focus[seed_idx].is_empty() {
                        (0..objectives.len()).collect()
                    } else {
                        focus[seed_idx].clone()
                    };
                    cols.into_iter().map(|j| vec![j]).collect()
                } else {
                    vec![focus[seed_idx].clone()]
                };
                let per_subset = (cfg.mutant_budget / subsets.len().max(1)).max(1);
                for subset in &subsets {
                    let g = model.input_gradients(x.view(), subset);
                    mutants.extend(mutate_hot_bytes(
                        &seed_input,
                        g.as_slice().expect("gradient vector is contiguous"),
                        per_subset,
                    ));
                }
                mutants.truncate(cfg.mutant_budget);
            }
            let havoc_count = if degraded {
                cfg.baseline_havoc_count
            } else {
                (((mutants.len() as f64) * cfg.havoc_ratio).round() as usize).max(1)
            };
            mutants.extend(havoc(
                &seed_input,
                target.max_input_len(),
                stream_seed(cfg.campaign_seed, generation, seed_idx as u64, TAG_HAVOC),
                havoc_count,
            ));
            c.sink.mutant_batch(generation, seed_idx, &mutants);

            for mutant in mutants {
                if c.exhausted() {
                    break 'seeds;
                }
                let (result, new_edges) = c.execute(&mutant);
                mutants_executed += 1;
                if result.outcome != Outcome::Ok {
                    continue;
                }
                if objectives.is_empty() {
                    if new_edges {
                        pool.push(PoolSeed {
                            input: effective_input(target, &mutant),
                            distances: result.distances,
                        });
                        direct_adds += 1;
                    }
                    continue;
                }
                let fvec = result.distances.project(&objectives);
                if !new_edges && pool_fvecs.iter().any(|p| dominates(&fvec, p)) {
                    no_new_edge_improvements += 1;
                }
                front.insert(
                    effective_input(target, &mutant),
                    result.distances,
                    fvec,
                );
            }
        }

        let candidates_retained = if objectives.is_empty() {
            direct_adds
        } else {
            front.entries.len()
        };
        let (merge_input, boundary_size) = if objectives.is_empty() {
            (pool.len(), pool.len())
        } else {
            let mut combined = pool;
            combined.extend(
                front
                    .entries
                    .into_iter()
                    .map(|(input, distances, _)| PoolSeed { input, distances }),
            );
            let (merged, merge_input, boundary_size) =
                Campaign::minimize(combined, &objectives, cfg.k);
            pool = merged;
            #[cfg(debug_assertions)]
            {
                let fvecs: Vec<Vec<u64>> = pool
                    .iter()
                    .map(|s| s.distances.project(&objectives))
                    .collect();
                let again = min_pareto_set(&fvecs);
                debug_assert_eq!(
                    again.kept.len(),
                    pool.len(),
                    "pool minimization must be idempotent"
                );
            }
            (merge_input, boundary_size)
        };

        let trace = GenerationTrace {
            generation,
            pool_before,
            objective_count: objectives.len(),
            degraded,
            train: report,
            mutants_executed,
            candidates_retained,
            merge_input,
            boundary_size,
            pool_after: pool.len(),
            no_new_edge_improvements,
        };
        c.sink.generation(&trace);
        c.traces.push(trace);
        c.push_stats(pool.len(), objectives.len());
    }

    c.result(pool)
}

/// The coverage-only control loop: havoc every pool seed, keep mutants that
/// cover a new edge, pool crashes the same way. The initial corpus is
/// deduplicated by coverage (a seed enters only if it covers something new).
///
/// # Panics
/// Panics if `t0` is empty or the coverage map cannot hold the target.
pub fn baseline_fuzz(
    target: &TargetHandle,
    t0: &[Vec<u8>],
    budget: Budget,
    cfg: &EngineConfig,
    sink: &mut dyn CampaignSink,
) -> CampaignResult {
    assert!(!t0.is_empty(), "the initial corpus must not be empty");
    let mut c = Campaign::new(target, budget, cfg, sink);

    let mut pool: Vec<PoolSeed> = Vec::new();
    for input in t0 {
        let (result, new_edges) = c.execute(input);
        if result.outcome == Outcome::Ok && new_edges {
            pool.push(PoolSeed {
                input: effective_input(target, input),
                distances: result.distances,
            });
        }
    }
    c.push_stats(pool.len(), 0);

    let mut generation = 0u64;
    while !c.exhausted() && !pool.is_empty() {
        generation += 1;
        let pool_before = pool.len();
        let mut mutants_executed = 0u64;
        let mut direct_adds = 0usize;

        'seeds: for seed_idx in 0..pool_before {
            if c.exhausted() {
                break;
            }
            let mutants = havoc(
                &pool[seed_idx].input,
                target.max_input_len(),
                stream_seed(cfg.campaign_seed, generation, seed_idx as u64, TAG_HAVOC),
                cfg.baseline_havoc_count,
            );
            c.sink.mutant_batch(generation, seed_idx, &mutants);
            for mutant in mutants {
                if c.exhausted() {
                    break 'seeds;
                }
                let (result, new_edges) = c.execute(&mutant);
                mutants_executed += 1;
                if result.outcome == Outcome::Ok && new_edges {
                    pool.push(PoolSeed {
                        input: effective_input(target, &mutant),
                        distances: result.distances,
                    });
                    direct_adds += 1;
                }
            }
        }

        let trace = GenerationTrace {
            generation,
            pool_before,
            objective_count: 0,
            degraded: false,
            train: None,
            mutants_executed,
            candidates_retained: direct_adds,
            merge_input: pool.len(),
            boundary_size: pool.len(),
            pool_after: pool.len(),
            no_new_edge_improvements: 0,
        };
        c.sink.generation(&trace);
        c.traces.push(trace);
        c.push_stats(pool.len(), 0);
    }

    c.result(pool)
}

/// Runs the campaign in the configured mode.
pub fn fuzz(
    target: &TargetHandle,
    t0: &[Vec<u8>],
    budget: Budget,
    cfg: &EngineConfig,
    sink: &mut dyn CampaignSink,
) -> CampaignResult {
    match cfg.mode {
        FuzzMode::Finch => hot_fuzz(target, t0, budget, cfg, sink),
        FuzzMode::Baseline => baseline_fuzz(target, t0, budget, cfg, sink),
    }
}

/// Per-seed minimized-objective sets of the final pool, recomputed the same
/// way the engine focuses gradients: non-strict column minimizers below the
/// ceiling.
pub fn pool_focus(pool: &[PoolSeed], objectives: &[BranchSiteId], k: u64) -> Vec<BTreeSet<usize>> {
    let fvecs: Vec<Vec<u64>> = pool
        .iter()
        .map(|s| s.distances.project(objectives))
        .collect();
    let mut column_min = vec![u64::MAX; objectives.len()];
    for f in &fvecs {
        for (lo, d) in column_min.iter_mut().zip(f) {
            *lo = (*lo).min(*d);
        }
    }
    fvecs
        .iter()
        .map(|f| {
            (0..f.len())
                .filter(|&j| f[j] == column_min[j] && f[j] < k)
                .collect()
        })
        .collect()
}
