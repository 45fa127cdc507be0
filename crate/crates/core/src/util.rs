//! Small shared helpers: exact binomials, a self-contained deterministic
//! RNG, and seed derivation.
//!
//! All randomness in this crate flows through [`SplitMix64`] seeded via
//! [`derive_seed`], so identical inputs and seeds reproduce identical
//! artifacts byte for byte, independent of any external RNG crate.

/// Exact binomial coefficient.
///
/// Panics on u64 overflow; values used in this crate stay far below that.
pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    u64::try_from(acc).expect("binomial overflows u64")
}

/// Colexicographic rank of a strictly increasing subset.
///
/// Ranks run 0..C(n, |subset|) and do not depend on n itself.
pub fn colex_rank(subset: &[usize]) -> usize {
    subset
        .iter()
        .enumerate()
        .map(|(i, &x)| binomial(x as u64, i as u64 + 1) as usize)
        .sum()
}

/// Deterministic 64-bit generator (splitmix64).
///
/// Small, portable, and stable forever; statistical quality is more than
/// enough for shuffles and annealing moves.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    /// Uniform index in `0..n`. `n` must be positive.
    pub fn index(&mut self, n: usize) -> usize {
        debug_assert!(n > 0);
        // Multiply-shift; the bias at these range sizes is negligible for
        // search heuristics and keeps the generator branch-free.
        ((self.next_u64() as u128 * n as u128) >> 64) as usize
    }

    /// Uniform f64 in [0, 1).
    pub fn unit_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Fisher-Yates shuffle.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.index(i + 1);
            items.swap(i, j);
        }
    }
}

/// Derive a component seed from a root seed, a label, and an index.
///
/// FNV-1a over the label folded into the root, then finalized through one
/// splitmix64 step keyed by the index.
pub fn derive_seed(root: u64, label: &str, index: u64) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325 ^ root;
    for byte in label.bytes() {
        h ^= byte as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    SplitMix64::new(h ^ index.wrapping_mul(0x9e37_79b9_7f4a_7c15)).next_u64()
}

/// Write a file atomically: temp file in the same directory, then rename.
pub fn write_atomic(path: &std::path::Path, contents: &str) -> std::io::Result<()> {
    let dir = path.parent().unwrap_or_else(|| std::path::Path::new("."));
    let name = path
        .file_name()
        .ok_or_else(|| std::io::Error::new(std::io::ErrorKind::InvalidInput, "path has no file name"))?;
    let tmp = dir.join(format!(".{}.tmp-{}", name.to_string_lossy(), std::process::id()));
    std::fs::write(&tmp, contents)?;
    std::fs::rename(&tmp, path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomial_values() {
        assert_eq!(binomial(26, 3), 2600);
        assert_eq!(binomial(26, 2), 325);
        assert_eq!(binomial(4, 3), 4);
        assert_eq!(binomial(7, 0), 1);
        assert_eq!(binomial(3, 5), 0);
        assert_eq!(binomial(244, 6), 275_489_565_912);
    }

    #[test]
    fn colex_ranks_are_dense() {
        // All 2-subsets of 0..5 rank bijectively onto 0..C(5,2).
        let mut seen = vec![false; 10];
        for b in 0..5usize {
            for a in 0..b {
                let r = colex_rank(&[a, b]);
                assert!(!seen[r]);
                seen[r] = true;
            }
        }
        assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn derive_seed_separates_labels() {
        let a = derive_seed(42, "cyclic", 0);
        let b = derive_seed(42, "ordering", 0);
        let c = derive_seed(42, "cyclic", 1);
        assert_ne!(a, b);
        assert_ne!(a, c);
        assert_eq!(a, derive_seed(42, "cyclic", 0));
    }

    #[test]
    fn shuffle_is_deterministic() {
        let mut a: Vec<u32> = (0..20).collect();
        let mut b: Vec<u32> = (0..20).collect();
        SplitMix64::new(7).shuffle(&mut a);
        SplitMix64::new(7).shuffle(&mut b);
        assert_eq!(a, b);
        let mut c: Vec<u32> = (0..20).collect();
        SplitMix64::new(8).shuffle(&mut c);
        assert_ne!(a, c);
    }
}
