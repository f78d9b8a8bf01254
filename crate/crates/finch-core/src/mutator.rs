//! Mutation strategies: gradient-walked hot bytes and stacked random havoc.
//!
//! The hot-byte walker treats a group of bytes as one dial. Bytes are ranked
//! by gradient magnitude, carved into doubling-size groups (the hottest pair
//! first), and each group is stepped unit by unit in both directions — every
//! byte moving with the sign of its own gradient — emitting a mutant after
//! every step until the group saturates. Havoc is the classic fallback: a
//! stack of random bit flips, arithmetic, interesting values, and block
//! edits.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Byte ranking derived from a gradient vector: a permutation of the byte
/// indices by descending magnitude, plus each byte's step direction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradientRanking {
    order: Vec<usize>,
    signs: Vec<i8>,
}

impl GradientRanking {
    /// Ranks the first `len` gradient entries (the model may be padded wider
    /// than the input; the tail is ignored).
    ///
    /// # Panics
    /// Panics if `g` is shorter than `len`.
    pub fn new(g: &[f64], len: usize) -> Self {
        assert!(g.len() >= len, "gradient vector shorter than the input");
        let mut order: Vec<usize> = (0..len).collect();
        // Descending |g|, ties to the lower index; zero gradients land last.
        order.sort_by(|&a, &b| {
            g[b].abs()
                .total_cmp(&g[a].abs())
                .then_with(|| a.cmp(&b))
        });
        let signs = g[..len]
            .iter()
            .map(|&v| {
                if v > 0.0 {
                    1
                } else if v < 0.0 {
                    -1
                } else {
                    0
                }
            })
            .collect();
        GradientRanking { order, signs }
    }

    /// The full magnitude-descending permutation.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// Per-byte step direction, indexed by byte position: `+1`, `-1`, or `0`
    /// for a flat gradient.
    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    /// Ranking positions `lo..hi` (clipped to the input length): the byte
    /// indices holding ranks `lo` through `hi - 1`.
    pub fn top(&self, lo: usize, hi: usize) -> &[usize] {
        let hi = hi.min(self.order.len());
        let lo = lo.min(hi);
        &self.order[lo..hi]
    }
}

/// Byte indices at ranking positions `lo..hi` of `g`'s magnitude-descending
/// order. Convenience form of [`GradientRanking::top`] ranked over all of
/// `g`.
pub fn top(g: &[f64], lo: usize, hi: usize) -> Vec<usize> {
    GradientRanking::new(g, g.len()).top(lo, hi).to_vec()
}

/// One group walk: steps every byte in `locs` by `dir * sign` per tick,
/// saturating at 0/255.
struct Trajectory<'a> {
    current: Vec<u8>,
    locs: &'a [usize],
    signs: &'a [i8],
    dir: i8,
}

impl Trajectory<'_> {
    /// A byte is live while it still has room to move in its own direction.
    /// Zero-sign bytes are never live, so they cannot block termination.
    fn live(&self) -> bool {
        self.locs.iter().any(|&i| {
            let step = self.dir * self.signs[i];
            (step > 0 && self.current[i] != u8::MAX) || (step < 0 && self.current[i] != 0)
        })
    }

    fn next_step(&mut self) -> Option<Vec<u8>> {
        if !self.live() {
            return None;
        }
        for &i in self.locs {
            match self.dir * self.signs[i] {
                1 => self.current[i] = self.current[i].saturating_add(1),
                -1 => self.current[i] = self.current[i].saturating_sub(1),
                _ => {}
            }
        }
        Some(self.current.clone())
    }
}

/// The full walk of one byte group in one direction: every intermediate
/// input, from the first unit step until each nonzero-sign byte in `locs`
/// has saturated. At most 255 steps.
///
/// `signs` is indexed by byte position (see [`GradientRanking::signs`]);
/// `dir` is `+1` or `-1`.
pub fn group_trajectory(t: &[u8], locs: &[usize], signs: &[i8], dir: i8) -> Vec<Vec<u8>> {
    assert!(dir == 1 || dir == -1, "direction must be +1 or -1");
    let mut walk = Trajectory {
        current: t.to_vec(),
        locs,
        signs,
        dir,
    };
    let mut out = Vec::new();
    while let Some(m) = walk.next_step() {
        out.push(m);
    }
    out
}

/// The doubling range schedule over a ranking of `len` bytes:
/// `(0,2), (2,4), (4,8), (8,16), …`, the final range clipped, covering every
/// ranked byte exactly once.
fn range_schedule(len: usize) -> Vec<(usize, usize)> {
    let mut ranges = Vec::new();
    let mut lo = 0;
    let mut hi = 2;
    while lo < len {
        ranges.push((lo, hi.min(len)));
        lo = hi;
        hi *= 2;
    }
    ranges
}

/// Gradient-guided mutation of one input: walks every byte group of the
/// doubling schedule in both directions, interleaving the walks round-robin
/// so the hottest groups still surface when `budget` cuts the stream short.
/// Returns at most `budget` mutants.
///
/// A flat (all-zero) gradient yields nothing — there is no direction to
/// walk; the engine's havoc share covers that case.
///
/// # Panics
/// Panics if `g` is shorter than `t`.
pub fn mutate_hot_bytes(t: &[u8], g: &[f64], budget: usize) -> Vec<Vec<u8>> {
    if t.is_empty() || budget == 0 {
        return Vec::new();
    }
    let ranking = GradientRanking::new(g, t.len());
    let mut walks: Vec<Trajectory<'_>> = Vec::new();
    for (lo, hi) in range_schedule(t.len()) {
        for dir in [-1, 1] {
            walks.push(Trajectory {
                current: t.to_vec(),
                locs: ranking.top(lo, hi),
                signs: ranking.signs(),
                dir,
            });
        }
    }

    let mut out = Vec::new();
    while !walks.is_empty() && out.len() < budget {
        walks.retain_mut(|walk| match walk.next_step() {
            Some(m) => {
                out.push(m);
                true
            }
            None => false,
        });
        // retain_mut keeps pushing past the budget within one sweep; trim.
        out.truncate(budget);
    }
    out
}

const INTERESTING_8: [u8; 5] = [0, 1, 0x7f, 0x80, 0xff];
const INTERESTING_16: [u16; 5] = [0, 1, 0x7fff, 0x8000, 0xffff];
const INTERESTING_32: [u32; 5] = [0, 1, 0x7fff_ffff, 0x8000_0000, 0xffff_ffff];

/// Stacked random mutation. Each of the `count` mutants applies 1–64
/// operators drawn from: bit flip, random byte, byte arithmetic ±(1..=35),
/// interesting-value substitution (8/16/32-bit, both endiannesses), block
/// delete, block duplicate, and block overwrite. Outputs always have between
/// 1 and `max_input_len` bytes. Deterministic for a given `rng_seed`.
pub fn havoc(t: &[u8], max_input_len: usize, rng_seed: u64, count: usize) -> Vec<Vec<u8>> {
    assert!(max_input_len >= 1, "targets accept at least one byte");
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let mut cur: Vec<u8> = if t.is_empty() {
            vec![rng.random()]
        } else {
            t[..t.len().min(max_input_len)].to_vec()
        };
        let stack = rng.random_range(1..=64);
        for _ in 0..stack {
            havoc_op(&mut cur, max_input_len, &mut rng);
        }
        out.push(cur);
    }
    out
}

fn havoc_op(cur: &mut Vec<u8>, max_input_len: usize, rng: &mut ChaCha8Rng) {
    let len = cur.len();
    debug_assert!(len >= 1);
    match rng.random_range(0..9u32) {
        // Flip one bit.
        0 => {
            let i = rng.random_range(0..len);
            cur[i] ^= 1 << rng.random_range(0..8u32);
        }
        // Replace a byte with a random value.
        1 => {
            let i = rng.random_range(0..len);
            cur[i] = rng.random();
        }
        // Wrapping add/subtract of 1..=35.
        2 => {
            let i = rng.random_range(0..len);
            let delta = rng.random_range(1..=35u8);
            cur[i] = if rng.random() {
                cur[i].wrapping_add(delta)
            } else {
                cur[i].wrapping_sub(delta)
            };
        }
        // Interesting values, 8/16/32-bit wide.
        3 => {
            let i = rng.random_range(0..len);
            cur[i] = INTERESTING_8[rng.random_range(0..INTERESTING_8.len())];
        }
        4 => {
            if len < 2 {
                cur[0] = INTERESTING_8[rng.random_range(0..INTERESTING_8.len())];
                return;
            }
            let i = rng.random_range(0..=len - 2);
            let v = INTERESTING_16[rng.random_range(0..INTERESTING_16.len())];
            let bytes = if rng.random() {
                v.to_be_bytes()
            } else {
                v.to_le_bytes()
            };
            cur[i..i + 2].copy_from_slice(&bytes);
        }
        5 => {
            if len < 4 {
                cur[0] = INTERESTING_8[rng.random_range(0..INTERESTING_8.len())];
                return;
            }
            let i = rng.random_range(0..=len - 4);
            let v = INTERESTING_32[rng.random_range(0..INTERESTING_32.len())];
            let bytes = if rng.random() {
                v.to_be_bytes()
            } else {
                v.to_le_bytes()
            };
            cur[i..i + 4].copy_from_slice(&bytes);
        }
        // Delete a block, keeping at least one byte.
        6 => {
            if len >= 2 {
                let del = rng.random_range(1..len);
                let start = rng.random_range(0..=len - del);
                cur.drain(start..start + del);
            }
        }
        // Duplicate a block into a random position, capped at the target's
        // maximum length.
        7 => {
            if len < max_input_len {
                let grow = rng.random_range(1..=len.min(max_input_len - len));
                let src = rng.random_range(0..=len - grow);
                let at = rng.random_range(0..=len);
                let block: Vec<u8> = cur[src..src + grow].to_vec();
                cur.splice(at..at, block);
            }
        }
        // Overwrite one block with another (possibly overlapping).
        _ => {
            if len >= 2 {
                let span = rng.random_range(1..len);
                let src = rng.random_range(0..=len - span);
                let dst = rng.random_range(0..=len - span);
                cur.copy_within(src..src + span, dst);
            }
        }
    }
}
