//! Edge coverage over a fixed-size bitmap, in the classic greybox style:
//! each basic-block transition `(x, y)` hashes to a key, keys set bits, and
//! "progress" is a bit nobody has set before.
//!
//! Coverage here is binary — an edge is covered or it is not. Hit counts
//! carry no signal for this engine, so none are kept.

/// Identifies one basic block of a target. Ids are assigned densely at
/// registration and stay below the campaign's `map_size`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BlockId(pub u32);

/// Reserved block every execution starts in, so the first real block of a
/// run forms an edge too.
pub const ENTRY_BLOCK: BlockId = BlockId(0);

/// Bitmap key for the transition `x -> y`: `((x >> 1) ^ y) mod map_size`.
///
/// The shift keeps `a -> b` and `b -> a` distinct. Distinct transitions may
/// still collide once hashed; the engine tolerates that, exactly like the
/// tools this scheme comes from.
pub fn edge_id(x: BlockId, y: BlockId, map_size: usize) -> usize {
    (((x.0 as usize) >> 1) ^ (y.0 as usize)) % map_size
}

/// Set of covered edges, plus the block the current path last visited.
///
/// One bitmap per execution records that run's edges; a long-lived bitmap
/// accumulates the campaign's union via [`CoverageBitmap::merge`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverageBitmap {
    bits: Vec<u64>,
    map_size: usize,
    last_block: BlockId,
}

impl CoverageBitmap {
    /// Empty bitmap with `map_size` buckets, positioned at the entry block.
    pub fn new(map_size: usize) -> Self {
        assert!(map_size >= 2, "coverage map needs at least 2 buckets");
        CoverageBitmap {
            bits: vec![0; map_size.div_ceil(64)],
            map_size,
            last_block: ENTRY_BLOCK,
        }
    }

    pub fn map_size(&self) -> usize {
        self.map_size
    }

    /// Records the transition from the previously visited block to `y` and
    /// moves the path position there.
    pub fn record_transition(&mut self, y: BlockId) {
        let key = edge_id(self.last_block, y, self.map_size);
        self.set_key(key);
        self.last_block = y;
    }

    /// Whether the bit for `key` is set.
    pub fn contains_key(&self, key: usize) -> bool {
        debug_assert!(key < self.map_size);
        self.bits[key / 64] & (1 << (key % 64)) != 0
    }

    pub(crate) fn set_key(&mut self, key: usize) {
        debug_assert!(key < self.map_size);
        self.bits[key / 64] |= 1 << (key % 64);
    }

    /// Ors another bitmap of the same size into this one.
    ///
    /// # Panics
    /// Panics if the map sizes differ — bitmaps from different configurations
    /// cannot be combined meaningfully.
    pub fn merge(&mut self, other: &CoverageBitmap) {
        assert_eq!(
            self.map_size, other.map_size,
            "cannot merge coverage bitmaps of different map sizes"
        );
        for (dst, src) in self.bits.iter_mut().zip(other.bits.iter()) {
            *dst |= src;
        }
    }

    /// Keys set in `run` but not in `self`, ascending. Empty means the run
    /// covered nothing new.
    ///
    /// # Panics
    /// Panics if the map sizes differ.
    pub fn new_edges(&self, run: &CoverageBitmap) -> Vec<usize> {
        assert_eq!(
            self.map_size, run.map_size,
            "cannot diff coverage bitmaps of different map sizes"
        );
        let mut keys = Vec::new();
        for (word_idx, (mine, theirs)) in self.bits.iter().zip(run.bits.iter()).enumerate() {
            let mut fresh = theirs & !mine;
            while fresh != 0 {
                let bit = fresh.trailing_zeros() as usize;
                keys.push(word_idx * 64 + bit);
                fresh &= fresh - 1;
            }
        }
        keys
    }

    /// Number of covered edges.
    pub fn count_edges(&self) -> u64 {
        self.bits.iter().map(|w| w.count_ones() as u64).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.iter().all(|w| *w == 0)
    }
}
