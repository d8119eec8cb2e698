//! A set of machine-load vectors under "sum" and "cap" updates.
//!
//! [`SumCapSet`] maintains `S`, a set of vectors in `[0, u)^m` (plain values
//! when `m = 1`), supporting:
//!
//! - `sum`: `S <- S + {0, p*e_0, ..., p*e_(m-1)}`, in time proportional to
//!   the number of elements actually inserted (times polylog factors), and
//! - `cap`: `S <- S` with every member having a coordinate above `d` removed.
//!
//! The set is stored as the indicator bit string of its flattened form: a
//! vector `s` maps to index `phi(s) = sum(s_i * u^i)`, so coordinate 0 is the
//! fastest-varying digit and the whole set is one string of `u^m` bits held
//! in a [`BitRope`]. Adding `p*e_i` to every member shifts the string right
//! by `p * u^i`; the positions where the shifted string differs from the
//! original are found output-sensitively by fingerprint-guided
//! divide-and-conquer, compared word-by-word only inside mismatching leaves.
//! Capping splices zeros over the affected stripes.
//!
//! Shifting is only sound while no member's coordinate overflows the
//! universe bound; a sum that would overflow is detected up front and
//! refused with [`Error::UniverseOverflow`].

use std::sync::Arc;

use crate::bitrope::BitRope;
use crate::error::Error;
use crate::fingerprint::FingerprintParams;

/// Default ceiling on `u^m`, the flattened indicator length in bits.
pub const DEFAULT_UNIVERSE_LIMIT: u64 = 1 << 31;

/// Window size below which the diff scan switches from fingerprint
/// comparison to direct word comparison.
const LEAF_SCAN_BITS: u64 = 512;

/// One element newly added by a sum operation: its flattened index and the
/// unit shift (machine) that produced it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Insertion {
    pub index: u64,
    pub machine: u32,
}

/// The exact set of elements a sum operation inserted, in increasing
/// flattened order. Elements that were already members are not reported.
#[derive(Debug, Clone, Default)]
pub struct DiffReport {
    pub inserted: Vec<Insertion>,
}

impl DiffReport {
    pub fn len(&self) -> usize {
        self.inserted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inserted.is_empty()
    }

    /// Flattened indices of the inserted elements, ascending.
    pub fn indices(&self) -> impl Iterator<Item = u64> + '_ {
        self.inserted.iter().map(|ins| ins.index)
    }
}

/// A dynamic set `S` of vectors in `[0, u)^m` backed by a rope indicator.
#[derive(Debug, Clone)]
pub struct SumCapSet {
    rope: BitRope,
    universe: u64,
    machines: u32,
    /// strides[i] = universe^i, the flattened weight of coordinate i.
    strides: Vec<u64>,
    total_bits: u64,
    /// Upper bound on coordinate i over all members. Lets most sums prove
    /// overflow-freedom in O(1); the exact stripe scan runs only when the
    /// bound is inconclusive.
    coord_bound: Vec<u64>,
}

impl SumCapSet {
    /// Builds the set over `[0, universe)^machines` containing `members`.
    ///
    /// Fails with [`Error::Capacity`] before any allocation if
    /// `universe^machines` exceeds `limit_bits`. Panics if a member
    /// coordinate lies outside `[0, universe)`.
    pub fn with_limit(
        universe: u64,
        machines: u32,
        members: &[Vec<u64>],
        params: &Arc<FingerprintParams>,
        limit_bits: u64,
    ) -> Result<SumCapSet, Error> {
        assert!(universe >= 1, "universe bound must be positive");
        assert!(machines >= 1, "machine count must be positive");
        let needed: u128 = (0..machines).try_fold(1u128, |acc, _| {
            let next = acc.checked_mul(universe as u128)?;
            (next <= limit_bits as u128).then_some(next)
        }).ok_or(Error::Capacity {
            needed: (universe as u128).saturating_pow(machines),
            limit: limit_bits,
        })?;
        let total_bits = needed as u64;
        let mut strides = Vec::with_capacity(machines as usize);
        let mut stride = 1u64;
        for _ in 0..machines {
            strides.push(stride);
            stride = stride.saturating_mul(universe);
        }
        let mut set = SumCapSet {
            rope: BitRope::zeros(total_bits, params),
            universe,
            machines,
            strides,
            total_bits,
            coord_bound: vec![0; machines as usize],
        };
        for member in members {
            let index = set.flatten(member);
            set.rope.set(index, true);
            for (bound, &coord) in set.coord_bound.iter_mut().zip(member) {
                *bound = (*bound).max(coord);
            }
        }
        Ok(set)
    }

    /// [`SumCapSet::with_limit`] with the default capacity guard.
    pub fn new(
        universe: u64,
        machines: u32,
        members: &[Vec<u64>],
        params: &Arc<FingerprintParams>,
    ) -> Result<SumCapSet, Error> {
        Self::with_limit(universe, machines, members, params, DEFAULT_UNIVERSE_LIMIT)
    }

    pub fn universe(&self) -> u64 {
        self.universe
    }

    pub fn machines(&self) -> u32 {
        self.machines
    }

    /// Number of members.
    pub fn count(&self) -> u64 {
        self.rope.count_ones()
    }

    pub fn rope(&self) -> &BitRope {
        &self.rope
    }

    /// Flattened index of a vector: `sum(s_i * universe^i)`.
    pub fn flatten(&self, member: &[u64]) -> u64 {
        assert_eq!(
            member.len(),
            self.machines as usize,
            "member has {} coordinates, set has {} machines",
            member.len(),
            self.machines
        );
        let mut index = 0u64;
        for (i, &coord) in member.iter().enumerate() {
            assert!(
                coord < self.universe,
                "coordinate {coord} outside [0, {})",
                self.universe
            );
            index += coord * self.strides[i];
        }
        index
    }

    /// Inverse of [`SumCapSet::flatten`].
    pub fn unflatten(&self, index: u64) -> Vec<u64> {
        assert!(index < self.total_bits, "index {index} out of range");
        let mut rest = index;
        (0..self.machines)
            .map(|_| {
                let coord = rest % self.universe;
                rest /= self.universe;
                coord
            })
            .collect()
    }

    /// Membership test.
    pub fn contains(&self, member: &[u64]) -> bool {
        self.rope.get(self.flatten(member))
    }

    /// Single-machine sum: `S <- S + {0, p}`. Returns exactly `(S+p) \ S`.
    pub fn sum_shift(&mut self, p: u64) -> Result<DiffReport, Error> {
        assert_eq!(self.machines, 1, "sum_shift requires a single-machine set");
        assert!(
            p >= 1 && p < self.universe,
            "offset {p} outside [1, {})",
            self.universe
        );
        self.sum_impl(p, 1)
    }

    /// Generalized sum: `S <- S + {0, p*e_0, ..., p*e_(m-1)}`. Returns the
    /// inserted elements, each tagged with the unit shift that produced it.
    pub fn sum_unit_shifts(&mut self, p: u64) -> Result<DiffReport, Error> {
        assert!(p >= 1, "offset must be positive");
        if p >= self.universe {
            // Every member would overflow; only the empty set survives this.
            return if self.count() == 0 {
                Ok(DiffReport::default())
            } else {
                Err(Error::UniverseOverflow {
                    shift: p,
                    universe: self.universe,
                })
            };
        }
        self.sum_impl(p, self.machines)
    }

    fn sum_impl(&mut self, p: u64, machine_count: u32) -> Result<DiffReport, Error> {
        debug_assert!(p >= 1 && p < self.universe);
        for machine in 0..machine_count {
            if self.coord_bound[machine as usize].saturating_add(p) >= self.universe {
                self.verify_no_overflow(p, machine)?;
                // The scan proved every coordinate fits; tighten the bound.
                self.coord_bound[machine as usize] = self.universe - 1 - p;
            }
        }
        // Collect every insertion against the pre-operation string before
        // writing anything; the scan compares the string against itself at
        // an offset, so writes must not interleave with it.
        let mut raw: Vec<Insertion> = Vec::new();
        for machine in 0..machine_count {
            let delta = p * self.strides[machine as usize];
            self.collect_insertions(delta, machine, &mut raw);
        }
        raw.sort_unstable_by_key(|ins| (ins.index, ins.machine));
        raw.dedup_by_key(|ins| ins.index);
        self.write_insertions(&raw);
        for machine in 0..machine_count {
            let bound = &mut self.coord_bound[machine as usize];
            *bound = (*bound + p).min(self.universe - 1);
        }
        Ok(DiffReport { inserted: raw })
    }

    /// Exact check: errors if any member has coordinate `machine` at or
    /// above `universe - p`, where flattened shifting would carry into the
    /// next digit.
    fn verify_no_overflow(&self, p: u64, machine: u32) -> Result<(), Error> {
        let stride = self.strides[machine as usize];
        let span = stride * self.universe;
        let from = (self.universe - p) * stride;
        let mut base = 0;
        while base < self.total_bits {
            if self.rope.count_ones_in(base + from, base + span) > 0 {
                return Err(Error::UniverseOverflow {
                    shift: p,
                    universe: self.universe,
                });
            }
            base += span;
        }
        Ok(())
    }

    /// Gathers positions that flip 0 -> 1 under `S | (S << delta)`, i.e.
    /// indices `q` with `rope[q] = 0` and `rope[q - delta] = 1`. Mismatch
    /// regions are located by comparing fingerprints of the string against
    /// itself at offset `delta`, recursing only into unequal halves. Once a
    /// range is known to differ, only its left half needs a probe: if that
    /// half is equal, the right half must hold the difference.
    fn collect_insertions(&self, delta: u64, machine: u32, out: &mut Vec<Insertion>) {
        struct Scan<'a> {
            rope: &'a BitRope,
            params: Arc<FingerprintParams>,
            delta: u64,
            machine: u32,
            cur_words: Vec<u64>,
            src_words: Vec<u64>,
        }
        impl Scan<'_> {
            fn differs(&self, lo: u64, hi: u64) -> bool {
                let cur = self.rope.digest_range(lo, hi);
                let src = self.rope.digest_range(lo - self.delta, hi - self.delta);
                !cur.same_hash(&src, &self.params)
            }

            /// Pre: `[lo, hi)` differs from its shifted source.
            fn walk(&mut self, lo: u64, hi: u64, out: &mut Vec<Insertion>) {
                if hi - lo <= LEAF_SCAN_BITS {
                    self.leaf(lo, hi, out);
                    return;
                }
                let mid = lo + (hi - lo) / 2;
                if self.differs(lo, mid) {
                    self.walk(lo, mid, out);
                    if self.differs(mid, hi) {
                        self.walk(mid, hi, out);
                    }
                } else {
                    self.walk(mid, hi, out);
                }
            }

            fn leaf(&mut self, lo: u64, hi: u64, out: &mut Vec<Insertion>) {
                self.cur_words.clear();
                self.src_words.clear();
                self.rope.read_words_into(lo, hi, &mut self.cur_words);
                self.rope
                    .read_words_into(lo - self.delta, hi - self.delta, &mut self.src_words);
                for (w, (&c, &s)) in self.cur_words.iter().zip(&self.src_words).enumerate() {
                    let mut inserted = s & !c;
                    while inserted != 0 {
                        let q = inserted.trailing_zeros() as u64;
                        out.push(Insertion {
                            index: lo + 64 * w as u64 + q,
                            machine: self.machine,
                        });
                        inserted &= inserted - 1;
                    }
                }
            }
        }
        let mut scan = Scan {
            rope: &self.rope,
            params: self.rope.params().clone(),
            delta,
            machine,
            cur_words: Vec::new(),
            src_words: Vec::new(),
        };
        if delta < self.total_bits && scan.differs(delta, self.total_bits) {
            scan.walk(delta, self.total_bits, out);
        }
    }

    /// Writes sorted deduplicated insertions in 64-bit batches.
    fn write_insertions(&mut self, inserted: &[Insertion]) {
        let mut i = 0;
        while i < inserted.len() {
            let base = inserted[i].index;
            let mut bits = 0u64;
            while i < inserted.len() && inserted[i].index - base < 64 {
                bits |= 1 << (inserted[i].index - base);
                i += 1;
            }
            let width = 64.min(self.total_bits - base) as u32;
            self.rope.or_word(base, bits, width);
        }
    }

    /// Removes every member with any coordinate above `d`.
    pub fn cap(&mut self, d: u64) {
        assert!(d < self.universe, "cap bound {d} outside [0, {})", self.universe);
        let u = self.universe;
        if self.machines == 1 {
            self.rope.clear_range(d + 1, self.total_bits);
            self.coord_bound[0] = self.coord_bound[0].min(d);
            return;
        }
        // One stripe of `u` consecutive indices per combination of the
        // higher coordinates: zero the whole stripe when a higher coordinate
        // exceeds d, otherwise just the suffix above d. Adjacent ranges are
        // coalesced before splicing.
        let mut ranges: Vec<(u64, u64)> = Vec::new();
        let push = |lo: u64, hi: u64, ranges: &mut Vec<(u64, u64)>| {
            if lo >= hi {
                return;
            }
            if let Some(last) = ranges.last_mut() {
                if last.1 == lo {
                    last.1 = hi;
                    return;
                }
            }
            ranges.push((lo, hi));
        };
        let stripe_count = self.total_bits / u;
        for stripe in 0..stripe_count {
            let mut rest = stripe;
            let mut keep = true;
            for _ in 1..self.machines {
                if rest % u > d {
                    keep = false;
                    break;
                }
                rest /= u;
            }
            let base = stripe * u;
            if keep {
                push(base + d + 1, base + u, &mut ranges);
            } else {
                push(base, base + u, &mut ranges);
            }
        }
        for (lo, hi) in ranges {
            self.rope.clear_range(lo, hi);
        }
        for bound in &mut self.coord_bound {
            *bound = (*bound).min(d);
        }
    }

    /// Largest total over members: the maximum member for `m = 1`, otherwise
    /// the maximum coordinate sum, by enumerating members once.
    pub fn max_total(&self) -> Option<u64> {
        if self.machines == 1 {
            return self.rope.last_one();
        }
        self.rope
            .iter_ones(0, self.total_bits)
            .map(|index| self.unflatten(index).iter().sum())
            .max()
    }

    /// Flattened indices of all members, ascending.
    pub fn members(&self) -> Vec<u64> {
        self.rope.iter_ones(0, self.total_bits).collect()
    }

    /// All members as coordinate vectors, in ascending flattened order.
    pub fn member_vectors(&self) -> Vec<Vec<u64>> {
        self.members().iter().map(|&i| self.unflatten(i)).collect()
    }
}
