//! Seed scheduling as multi-objective minimization.
//!
//! Each open branch is an objective; each seed is its distance vector over
//! those objectives. The pool the engine carries forward is not "the best
//! seed" — it is a *minimal Pareto set*: the smallest selection of
//! non-dominated seeds that still achieves the best known distance on every
//! objective. Seeds that minimize nothing get dropped, including yesterday's
//! favorites.

use std::collections::BTreeSet;

use crate::distance::{BranchSiteId, DistanceBitmap};

/// Whether `a` Pareto-dominates `b`: no worse everywhere, strictly better
/// somewhere. Irreflexive and transitive; equal vectors dominate neither way.
///
/// # Panics
/// Panics if the vectors have different lengths — comparing distances over
/// different objective lists is meaningless.
pub fn dominates(a: &[u64], b: &[u64]) -> bool {
    assert_eq!(a.len(), b.len(), "distance vectors must be aligned");
    let mut strictly_better = false;
    for (x, y) in a.iter().zip(b.iter()) {
        if x > y {
            return false;
        }
        if x < y {
            strictly_better = true;
        }
    }
    strictly_better
}

/// Indices of the seeds on the Pareto boundary: those no other seed
/// dominates. Duplicates survive (neither dominates the other), but seeds
/// whose entire vector sits at the ceiling `k` — seeds that visited nothing
/// relevant — are excluded up front.
pub fn pareto_boundary(fvecs: &[Vec<u64>], k: u64) -> Vec<usize> {
    let live: Vec<usize> = (0..fvecs.len())
        .filter(|&i| fvecs[i].iter().any(|&d| d < k))
        .collect();
    live.iter()
        .copied()
        .filter(|&i| {
            !live
                .iter()
                .any(|&j| j != i && dominates(&fvecs[j], &fvecs[i]))
        })
        .collect()
}

/// Result of [`min_pareto_set`]: which seeds were kept and, for each, the
/// full set of objectives it minimizes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinParetoSet {
    /// Kept indices, ascending (i.e. in the seeds' discovery order).
    pub kept: Vec<usize>,
    /// For each kept seed, every objective index on which it achieves the
    /// column minimum. Aligned with `kept`.
    pub minimized: Vec<BTreeSet<usize>>,
    /// Element comparisons and set operations spent — the measured cost,
    /// quadratic in the seed count.
    pub comparisons: u64,
}

/// Greedy minimal cover of a Pareto boundary.
///
/// For every seed, `J` collects the objectives where it matches the column
/// minimum over the whole set. Seeds are then taken greedily by descending
/// `|J|` (ties to the earlier index), each keeping only if its residual `J`
/// still contains something no kept seed already covers. The result achieves
/// the column minimum on every objective with as few seeds as the greedy
/// heuristic finds.
///
/// Expects an aligned set of vectors (typically an output of
/// [`pareto_boundary`]); with zero objectives nothing can be minimized and
/// the result is empty.
pub fn min_pareto_set(fvecs: &[Vec<u64>]) -> MinParetoSet {
    let mut comparisons: u64 = 0;
    let n = fvecs.len();
    if n == 0 || fvecs[0].is_empty() {
        return MinParetoSet {
            kept: Vec::new(),
            minimized: Vec::new(),
            comparisons,
        };
    }
    let m = fvecs[0].len();
    debug_assert!(fvecs.iter().all(|v| v.len() == m));

    let mut column_min = vec![u64::MAX; m];
    for v in fvecs {
        for (lo, d) in column_min.iter_mut().zip(v.iter()) {
            comparisons += 1;
            *lo = (*lo).min(*d);
        }
    }

    let full: Vec<BTreeSet<usize>> = fvecs
        .iter()
        .map(|v| {
            (0..m)
                .filter(|&i| {
                    comparisons += 1;
                    v[i] == column_min[i]
                })
                .collect()
        })
        .collect();

    let mut residual = full.clone();
    let mut alive: Vec<usize> = (0..n).collect();
    let mut kept = Vec::new();
    while !alive.is_empty() {
        let mut best_pos = 0;
        for (pos, &idx) in alive.iter().enumerate() {
            comparisons += 1;
            if residual[idx].len() > residual[alive[best_pos]].len() {
                best_pos = pos;
            }
        }
        let idx = alive.remove(best_pos);
        if residual[idx].is_empty() {
            // The largest residual is empty, so every remaining one is too.
            break;
        }
        kept.push(idx);
        let covered = std::mem::take(&mut residual[idx]);
        for &other in &alive {
            for obj in &covered {
                comparisons += 1;
                residual[other].remove(obj);
            }
        }
    }

    kept.sort_unstable();
    let minimized = kept.iter().map(|&i| full[i].clone()).collect();
    MinParetoSet {
        kept,
        minimized,
        comparisons,
    }
}

/// The current objectives: sites some pool member has visited whose branch
/// still has an unobserved outcome, ascending by site id.
///
/// `fully_covered` answers whether both outcomes of a site have been seen
/// campaign-wide; targets know how to derive it from the global coverage
/// bitmap.
pub fn just_missed<'a, F>(
    pool: impl IntoIterator<Item = &'a DistanceBitmap>,
    mut fully_covered: F,
) -> Vec<BranchSiteId>
where
    F: FnMut(BranchSiteId) -> bool,
{
    let mut visited = BTreeSet::new();
    for bitmap in pool {
        visited.extend(bitmap.sites());
    }
    visited
        .into_iter()
        .filter(|site| !fully_covered(*site))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distance::DEFAULT_K;

    #[test]
    fn dominance_needs_a_strict_win() {
        assert!(dominates(&[0, 5], &[1, 5]));
        assert!(dominates(&[1, 1], &[9, 9]));
        assert!(!dominates(&[1, 5], &[1, 5]), "equal vectors tie");
        assert!(!dominates(&[0, 9], &[1, 5]), "trade-offs are incomparable");
        assert!(!dominates(&[1, 5], &[0, 5]));
    }

    #[test]
    #[should_panic(expected = "aligned")]
    fn dominance_rejects_misaligned_vectors() {
        dominates(&[1, 2], &[1, 2, 3]);
    }

    #[test]
    fn boundary_drops_dominated_and_keeps_tradeoffs() {
        let fvecs = vec![vec![1, 9], vec![8, 2], vec![9, 9]];
        assert_eq!(pareto_boundary(&fvecs, DEFAULT_K), vec![0, 1]);
    }

    #[test]
    fn boundary_retains_duplicates() {
        let fvecs = vec![vec![1, 1], vec![1, 1]];
        assert_eq!(pareto_boundary(&fvecs, DEFAULT_K), vec![0, 1]);
    }

    #[test]
    fn boundary_excludes_seeds_that_visited_nothing() {
        let k = DEFAULT_K;
        let fvecs = vec![vec![k, k], vec![3, k]];
        assert_eq!(pareto_boundary(&fvecs, k), vec![1]);
        assert!(pareto_boundary(&[vec![k, k]], k).is_empty());
    }

    #[test]
    fn minimal_set_keeps_one_seed_per_uncovered_strength() {
        // a minimizes objective 0, b objective 1, c neither.
        let fvecs = vec![vec![1, 9], vec![8, 2], vec![9, 9]];
        let r = min_pareto_set(&fvecs);
        assert_eq!(r.kept, vec![0, 1]);
        assert_eq!(r.minimized[0], BTreeSet::from([0]));
        assert_eq!(r.minimized[1], BTreeSet::from([1]));
    }

    #[test]
    fn minimal_set_prefers_broad_minimizers() {
        // One seed matches both column minima; the specialists are redundant.
        let fvecs = vec![vec![3, 9], vec![9, 4], vec![3, 4]];
        let r = min_pareto_set(&fvecs);
        assert_eq!(r.kept, vec![2]);
        assert_eq!(r.minimized[0], BTreeSet::from([0, 1]));
    }

    #[test]
    fn identical_vectors_keep_only_the_first() {
        let fvecs = vec![vec![2, 7], vec![2, 7]];
        let r = min_pareto_set(&fvecs);
        assert_eq!(r.kept, vec![0]);
    }

    #[test]
    fn mutant_wave_replaces_a_dominated_parent() {
        // A parent in the middle of the front, then a wave of mutants: two
        // trade-off points survive, the parent and the stragglers fall.
        let fvecs = vec![
            vec![5, 5], // parent
            vec![1, 4],
            vec![6, 3],
            vec![2, 6],
            vec![4, 1],
            vec![5, 2],
        ];
        assert_eq!(pareto_boundary(&fvecs, DEFAULT_K), vec![1, 4]);
        let boundary = vec![fvecs[1].clone(), fvecs[4].clone()];
        let r = min_pareto_set(&boundary);
        assert_eq!(r.kept, vec![0, 1]);
    }

    #[test]
    fn minimal_set_is_idempotent() {
        let fvecs = vec![vec![1, 9], vec![8, 2], vec![5, 5], vec![1, 9]];
        let first = min_pareto_set(&fvecs);
        let reduced: Vec<Vec<u64>> = first.kept.iter().map(|&i| fvecs[i].clone()).collect();
        let second = min_pareto_set(&reduced);
        assert_eq!(second.kept.len(), first.kept.len());
        let roundtrip: Vec<Vec<u64>> = second.kept.iter().map(|&i| reduced[i].clone()).collect();
        assert_eq!(roundtrip, reduced);
    }

    #[test]
    fn zero_objectives_minimize_to_nothing() {
        let r = min_pareto_set(&[vec![], vec![]]);
        assert!(r.kept.is_empty());
        assert!(min_pareto_set(&[]).kept.is_empty());
    }

    #[test]
    fn cost_stays_within_the_quadratic_bound() {
        use rand::{RngExt, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        let m = 5;
        for n in [32usize, 64, 128, 256] {
            let fvecs: Vec<Vec<u64>> = (0..n)
                .map(|_| (0..m).map(|_| rng.random_range(0..20u64)).collect())
                .collect();
            let r = min_pareto_set(&fvecs);
            let bound = 8 * (n as u64) * (n as u64) * (m as u64);
            assert!(
                r.comparisons <= bound,
                "n={n}: {} comparisons exceed quadratic bound {bound}",
                r.comparisons
            );
        }
    }

    #[test]
    fn just_missed_lists_open_sites_in_order() {
        let mut a = DistanceBitmap::new(DEFAULT_K);
        a.record(BranchSiteId(4), 10);
        a.record(BranchSiteId(0), 3);
        let mut b = DistanceBitmap::new(DEFAULT_K);
        b.record(BranchSiteId(2), 5);

        let open = just_missed([&a, &b], |site| site == BranchSiteId(2));
        assert_eq!(open, vec![BranchSiteId(0), BranchSiteId(4)]);
    }

    #[test]
    fn just_missed_is_empty_when_everything_is_covered_or_unvisited() {
        let mut a = DistanceBitmap::new(DEFAULT_K);
        a.record(BranchSiteId(1), 2);
        assert!(just_missed([&a], |_| true).is_empty());
        assert!(just_missed(std::iter::empty::<&DistanceBitmap>(), |_| false).is_empty());
    }
}
