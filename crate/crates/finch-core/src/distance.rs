//! Quantitative branch feedback: how far a conditional's operands were from
//! flipping its outcome.
//!
//! Every comparison a target reports is scored with a distance — zero when the
//! operands are equal, growing as they drift apart — and folded into a
//! per-execution [`DistanceBitmap`]. Sites the execution never reached are
//! *absent* from the bitmap and read back as the ceiling `K`, so "far away"
//! and "never got there" share one scale.

use std::collections::BTreeMap;

/// Default distance ceiling: `2^32 - 1`.
///
/// Comparisons wider than 32 bits can produce larger distances; those are
/// clamped to `K` on entry so the ceiling stays the unique "worst" value.
pub const DEFAULT_K: u64 = u32::MAX as u64;

/// Identifies one conditional in a target. Ids are dense per target,
/// `0..site_count`, and stable across executions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BranchSiteId(pub u32);

/// The comparison a branch site performs on its two operands.
///
/// `True` and `False` stand for unconditional outcomes (constant-folded
/// branches); they always score distance zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Relation {
    True,
    False,
    Gt,
    Ge,
    Le,
    Lt,
    Eq,
    Ne,
}

impl Relation {
    /// Evaluates the relation on unsigned operands, as the target's own
    /// branch would.
    pub fn evaluate(self, a: u64, b: u64) -> bool {
        match self {
            Relation::True => true,
            Relation::False => false,
            Relation::Gt => a > b,
            Relation::Ge => a >= b,
            Relation::Le => a <= b,
            Relation::Lt => a < b,
            Relation::Eq => a == b,
            Relation::Ne => a != b,
        }
    }
}

/// How raw operands are turned into a distance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum DistanceMode {
    /// `|a - b|`: the number line separation. The default.
    #[default]
    Abs,
    /// `a ^ b`: cheap single-op alternative that still hits zero exactly
    /// when the operands match.
    Xor,
}

/// How distances are squashed into `[0, 1]` training labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Normalization {
    /// `min(d, K) / K`.
    #[default]
    Linear,
    /// `log2(1 + d) / log2(1 + K)`: spreads resolution toward small
    /// distances, where the search actually happens.
    Log,
}

/// Distance between comparison operands under the given mode.
///
/// Unconditional relations score zero in both modes; everything else ignores
/// the relation kind — the score measures operand separation, not which way
/// the branch went.
pub fn branch_distance(rel: Relation, a: u64, b: u64, mode: DistanceMode) -> u64 {
    match rel {
        Relation::True | Relation::False => 0,
        _ => match mode {
            DistanceMode::Abs => a.abs_diff(b),
            DistanceMode::Xor => a ^ b,
        },
    }
}

/// Maps a signed operand to an unsigned value with the same ordering, so
/// signed comparisons can reuse the unsigned distance. Offsets by `2^63`:
/// `i64::MIN` maps to `0`, `-1` to `2^63 - 1`, `0` to `2^63`.
pub fn signed_operand(v: i64) -> u64 {
    (v as u64) ^ (1 << 63)
}

/// Per-execution record of the minimum distance observed at each visited
/// branch site.
///
/// Absent sites mean "not visited" and project as the ceiling `K`. Repeat
/// visits keep the minimum, so the bitmap is insensitive to visit order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceBitmap {
    entries: BTreeMap<BranchSiteId, u64>,
    k: u64,
}

impl DistanceBitmap {
    /// Empty bitmap with ceiling `k`. `k` must be at least 1.
    pub fn new(k: u64) -> Self {
        assert!(k >= 1, "distance ceiling K must be at least 1");
        DistanceBitmap {
            entries: BTreeMap::new(),
            k,
        }
    }

    /// The ceiling this bitmap clamps to.
    pub fn k(&self) -> u64 {
        self.k
    }

    /// Records one observation at `site`, clamping to `K` and keeping the
    /// minimum across repeat visits.
    pub fn record(&mut self, site: BranchSiteId, distance: u64) {
        let d = distance.min(self.k);
        self.entries
            .entry(site)
            .and_modify(|cur| *cur = (*cur).min(d))
            .or_insert(d);
    }

    /// Distance at `site`, or `None` if the execution never reached it.
    pub fn get(&self, site: BranchSiteId) -> Option<u64> {
        self.entries.get(&site).copied()
    }

    /// Visited sites in ascending id order.
    pub fn sites(&self) -> impl Iterator<Item = BranchSiteId> + '_ {
        self.entries.keys().copied()
    }

    /// Number of visited sites.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Raw distance vector over `objectives`, in their order. Absent sites
    /// read as `K`.
    pub fn project(&self, objectives: &[BranchSiteId]) -> Vec<u64> {
        objectives
            .iter()
            .map(|site| self.get(*site).unwrap_or(self.k))
            .collect()
    }

    /// Distance vector over `objectives` squashed into `[0, 1]`. Absent
    /// sites are exactly `1.0`; a distance of zero is exactly `0.0`.
    pub fn normalize(&self, objectives: &[BranchSiteId], norm: Normalization) -> Vec<f64> {
        objectives
            .iter()
            .map(|site| match self.get(*site) {
                None => 1.0,
                Some(d) => {
                    let d = d.min(self.k);
                    match norm {
                        Normalization::Linear => d as f64 / self.k as f64,
                        Normalization::Log => {
                            (1.0 + d as f64).log2() / (1.0 + self.k as f64).log2()
                        }
                    }
                }
            })
            .collect()
    }
}
