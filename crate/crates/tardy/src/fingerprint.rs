//! Randomized polynomial fingerprints for bit strings, modulo the Mersenne
//! prime 2^61 - 1.
//!
//! A fingerprint of a bit string `x[0..len)` under base `b` is
//! `sum(x[q] * b^(len-1-q)) mod (2^61 - 1)`. Fingerprints compose: the
//! fingerprint of a concatenation is `h(x) * b^|y| + h(y)`, which lets a tree
//! over bit blocks maintain subtree fingerprints in O(1) per node. Equality of
//! fingerprints is probabilistic evidence of string equality; with `k`
//! independent random bases the error per comparison is at most
//! `((len - 1) / 2^61)^k`, one-sided (distinct fingerprints prove distinct
//! strings).

use std::sync::{Arc, OnceLock};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Mersenne prime 2^61 - 1.
pub const MODULUS: u64 = (1 << 61) - 1;

/// Hard upper bound on the number of independent fingerprints. Two bases
/// already push the per-comparison error below 2^-80 for gigabit strings;
/// the cap keeps per-node digests small.
pub const MAX_FINGERPRINTS: usize = 2;

/// Bits held by one tree block; also the largest exponent needed by the
/// per-block power table.
pub(crate) const BLOCK_BITS: u32 = 256;

#[inline]
pub(crate) fn mul_mod(a: u64, b: u64) -> u64 {
    debug_assert!(a < MODULUS && b < MODULUS);
    let t = a as u128 * b as u128;
    // 2^61 = 1 (mod p), so fold the high part once; inputs < p keep the sum
    // below 2p and a single conditional subtraction suffices.
    let folded = (t >> 61) as u64 + (t as u64 & MODULUS);
    if folded >= MODULUS {
        folded - MODULUS
    } else {
        folded
    }
}

#[inline]
pub(crate) fn add_mod(a: u64, b: u64) -> u64 {
    debug_assert!(a < MODULUS && b < MODULUS);
    let s = a + b;
    if s >= MODULUS {
        s - MODULUS
    } else {
        s
    }
}

#[inline]
pub(crate) fn sub_mod(a: u64, b: u64) -> u64 {
    debug_assert!(a < MODULUS && b < MODULUS);
    if a >= b {
        a - b
    } else {
        a + MODULUS - b
    }
}

/// Shared hashing configuration: `k` independent random bases plus a power
/// table covering block-sized exponents.
///
/// Every rope that will ever be compared against another must be built from
/// the same `FingerprintParams` instance. The parameters are immutable after
/// creation and freely shareable across threads.
#[derive(Debug)]
pub struct FingerprintParams {
    bases: [u64; MAX_FINGERPRINTS],
    count: usize,
    // pow[i][e] = bases[i]^e, e in 0..=BLOCK_BITS
    pow: [[u64; BLOCK_BITS as usize + 1]; MAX_FINGERPRINTS],
    // pow_prefix[i][e] = sum of pow[i][0..e]: the hash of e one bits.
    pow_prefix: [[u64; BLOCK_BITS as usize + 1]; MAX_FINGERPRINTS],
    verify: bool,
}

impl FingerprintParams {
    /// Parameters with `k` bases drawn from a seeded generator.
    pub fn with_count(seed: u64, k: usize) -> Self {
        assert!(
            (1..=MAX_FINGERPRINTS).contains(&k),
            "fingerprint count {k} outside 1..={MAX_FINGERPRINTS}"
        );
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut bases = [0u64; MAX_FINGERPRINTS];
        let mut pow = [[0u64; BLOCK_BITS as usize + 1]; MAX_FINGERPRINTS];
        let mut pow_prefix = [[0u64; BLOCK_BITS as usize + 1]; MAX_FINGERPRINTS];
        for i in 0..k {
            bases[i] = rng.random_range(2..=MODULUS - 2);
            pow[i][0] = 1;
            for e in 1..=BLOCK_BITS as usize {
                pow[i][e] = mul_mod(pow[i][e - 1], bases[i]);
            }
            for e in 1..=BLOCK_BITS as usize {
                pow_prefix[i][e] = add_mod(pow_prefix[i][e - 1], pow[i][e - 1]);
            }
        }
        FingerprintParams {
            bases,
            count: k,
            pow,
            pow_prefix,
            verify: false,
        }
    }

    /// Default configuration: two independent bases.
    pub fn from_seed(seed: u64) -> Self {
        Self::with_count(seed, 2)
    }

    /// Parameters seeded from OS entropy.
    pub fn random() -> Self {
        Self::from_seed(rand::rng().random())
    }

    /// Process-wide default parameters, sampled once from OS entropy.
    pub fn global() -> &'static Arc<FingerprintParams> {
        static GLOBAL: OnceLock<Arc<FingerprintParams>> = OnceLock::new();
        GLOBAL.get_or_init(|| Arc::new(FingerprintParams::random()))
    }

    /// Enables exact rechecking of longest-common-extension boundaries.
    pub fn with_verify(mut self, verify: bool) -> Self {
        self.verify = verify;
        self
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn verify(&self) -> bool {
        self.verify
    }

    #[inline]
    pub(crate) fn pow(&self, i: usize, e: u32) -> u64 {
        self.pow[i][e as usize]
    }

    pub(crate) fn compatible(&self, other: &FingerprintParams) -> bool {
        self.count == other.count && self.bases[..self.count] == other.bases[..other.count]
    }
}

/// Fingerprint of a contiguous bit range: per-base hash and per-base
/// `base^len` for composition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Digest {
    pub h: [u64; MAX_FINGERPRINTS],
    pub pw: [u64; MAX_FINGERPRINTS],
}

impl Digest {
    #[inline]
    pub fn empty() -> Self {
        Digest {
            h: [0; MAX_FINGERPRINTS],
            pw: [1; MAX_FINGERPRINTS],
        }
    }

    /// Digest of up to 64 bits (bit `q` of the sequence is bit `q` of
    /// `bits`).
    #[cfg(test)]
    pub fn of_word(bits: u64, width: u32, params: &FingerprintParams) -> Self {
        debug_assert!((1..=64).contains(&width));
        debug_assert!(width == 64 || bits >> width == 0);
        let mut d = Digest::empty();
        for i in 0..params.count {
            let mut h = 0;
            let mut rest = bits;
            while rest != 0 {
                let q = rest.trailing_zeros();
                h = add_mod(h, params.pow(i, width - 1 - q));
                rest &= rest - 1;
            }
            d.h[i] = h;
            d.pw[i] = params.pow(i, width);
        }
        d
    }

    /// Digest of `width` bits packed into `words` least significant bit
    /// first. Iterates whichever of ones and zeros is sparser: the hash of
    /// an all-ones run comes from the prefix table, and each zero subtracts
    /// its power.
    pub fn of_words(words: &[u64], width: u32, params: &FingerprintParams) -> Self {
        debug_assert!((1..=BLOCK_BITS).contains(&width));
        debug_assert!(words.len() as u32 * 64 >= width);
        let whole = (width / 64) as usize;
        let ones: u32 = words[..whole].iter().map(|w| w.count_ones()).sum::<u32>()
            + if !width.is_multiple_of(64) {
                (words[whole] & ((1u64 << (width % 64)) - 1)).count_ones()
            } else {
                0
            };
        let mut d = Digest::empty();
        let flip = ones > width / 2;
        for i in 0..params.count {
            let mut h = if flip { params.pow_prefix[i][width as usize] } else { 0 };
            for (w, &word) in words.iter().enumerate() {
                let base = w as u32 * 64;
                if base >= width {
                    break;
                }
                let mut rest = if flip {
                    let live = width - base;
                    !word & if live >= 64 { !0 } else { (1u64 << live) - 1 }
                } else {
                    word
                };
                while rest != 0 {
                    let q = base + rest.trailing_zeros();
                    let pw = params.pow(i, width - 1 - q);
                    h = if flip { sub_mod(h, pw) } else { add_mod(h, pw) };
                    rest &= rest - 1;
                }
            }
            d.h[i] = h;
            d.pw[i] = params.pow(i, width);
        }
        d
    }

    /// Adjusts the digest for one bit flipped at `exponent` positions from
    /// the end of the range (`width - 1 - q` for bit `q`).
    #[inline]
    pub fn flip_bit(&mut self, exponent: u32, on: bool, params: &FingerprintParams) {
        for i in 0..params.count {
            let pw = params.pow(i, exponent);
            self.h[i] = if on {
                add_mod(self.h[i], pw)
            } else {
                sub_mod(self.h[i], pw)
            };
        }
    }

    /// Extends `self` with `next`, as if concatenating the underlying ranges.
    #[inline]
    pub fn append(&mut self, next: &Digest, params: &FingerprintParams) {
        for i in 0..params.count {
            self.h[i] = add_mod(mul_mod(self.h[i], next.pw[i]), next.h[i]);
            self.pw[i] = mul_mod(self.pw[i], next.pw[i]);
        }
    }

    /// Hash equality across all active bases. Only meaningful for digests of
    /// equal-length ranges under the same parameters.
    #[inline]
    pub fn same_hash(&self, other: &Digest, params: &FingerprintParams) -> bool {
        self.h[..params.count] == other.h[..params.count]
    }
}
