//! A dynamic binary string on a balanced tree.
//!
//! [`BitRope`] stores bits in blocks of up to 256 per tree node, with nodes
//! arranged as a treap keyed by implicit position. Every node carries its
//! subtree bit count, ones count and fingerprint digest, which gives
//! O(log n) concatenation, splitting, point reads and writes, rank-style
//! ones counting, and fingerprint hashes of arbitrary ranges. On top of the
//! range hashes sits a longest-common-extension query running in
//! O(log^2 n) expected time.
//!
//! Blocks hold between `B/2` and `B` bits (B = 256) except when the whole
//! rope is shorter than `B/2`; split and concat re-balance the boundary
//! blocks to keep that fill invariant, so a rope of n bits always occupies
//! O(n/B) nodes and stays compact enough to traverse cheaply.
//!
//! Ropes are single-owner structures: they may be sent between threads but
//! concurrent mutation requires external synchronization. Structural
//! operations consume their operands.

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use crate::fingerprint::{Digest, FingerprintParams, BLOCK_BITS};

/// Words per block.
const WORDS: usize = (BLOCK_BITS / 64) as usize;

/// Minimum bits per block, except in ropes shorter than this.
const MIN_FILL: u32 = BLOCK_BITS / 2;

static PRIORITY_STATE: AtomicU64 = AtomicU64::new(0x243F_6A88_85A3_08D3);

fn next_priority() -> u64 {
    // splitmix64 over a shared counter; priorities only shape the treap.
    let mut z = PRIORITY_STATE.fetch_add(0x9E37_79B9_7F4A_7C15, Ordering::Relaxed);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[inline]
fn mask(width: u32) -> u64 {
    debug_assert!(width <= 64);
    if width == 64 {
        !0
    } else {
        (1u64 << width) - 1
    }
}

/// Up to [`BLOCK_BITS`] bits, least significant word and bit first. Bits at
/// positions at or above the owning node's block length are always zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
struct Block {
    words: [u64; WORDS],
}

impl Block {
    fn zero() -> Block {
        Block::default()
    }

    #[inline]
    fn get(&self, q: u32) -> bool {
        self.words[(q / 64) as usize] >> (q % 64) & 1 == 1
    }

    #[inline]
    fn set(&mut self, q: u32, value: bool) {
        if value {
            self.words[(q / 64) as usize] |= 1 << (q % 64);
        } else {
            self.words[(q / 64) as usize] &= !(1 << (q % 64));
        }
    }

    /// ORs `width` bits into positions `[offset, offset + width)`.
    #[inline]
    fn or_word(&mut self, offset: u32, bits: u64, width: u32) {
        debug_assert!((1..=64).contains(&width) && offset + width <= BLOCK_BITS);
        debug_assert!(width == 64 || bits >> width == 0);
        let w = (offset / 64) as usize;
        let shift = offset % 64;
        self.words[w] |= bits << shift;
        if shift != 0 && w + 1 < WORDS && shift + width > 64 {
            self.words[w + 1] |= bits >> (64 - shift);
        }
    }

    #[inline]
    fn count_ones(&self) -> u32 {
        self.words.iter().map(|w| w.count_ones()).sum()
    }

    /// Ones in `[a, b)`.
    fn count_range(&self, a: u32, b: u32) -> u32 {
        debug_assert!(a <= b && b <= BLOCK_BITS);
        let mut total = 0;
        let mut lo = a;
        while lo < b {
            let w = (lo / 64) as usize;
            let hi = b.min((lo / 64 + 1) * 64);
            total += ((self.words[w] >> (lo % 64)) & mask(hi - lo)).count_ones();
            lo = hi;
        }
        total
    }

    fn first_one_in(&self, a: u32, b: u32) -> Option<u32> {
        let mut lo = a;
        while lo < b {
            let w = (lo / 64) as usize;
            let hi = b.min((lo / 64 + 1) * 64);
            let bits = (self.words[w] >> (lo % 64)) & mask(hi - lo);
            if bits != 0 {
                return Some(lo + bits.trailing_zeros());
            }
            lo = hi;
        }
        None
    }

    fn last_one_in(&self, a: u32, b: u32) -> Option<u32> {
        let mut hi = b;
        while hi > a {
            let lo = a.max((hi - 1) / 64 * 64);
            let w = ((hi - 1) / 64) as usize;
            let bits = (self.words[w] >> (lo % 64)) & mask(hi - lo);
            if bits != 0 {
                return Some(lo + 63 - bits.leading_zeros());
            }
            hi = lo;
        }
        None
    }

    /// Keeps the first `width` bits, clearing the rest.
    fn low(&self, width: u32) -> Block {
        debug_assert!(width <= BLOCK_BITS);
        let mut out = *self;
        let w = (width / 64) as usize;
        if w < WORDS {
            out.words[w] &= mask(width % 64);
            for word in out.words.iter_mut().skip(w + 1) {
                *word = 0;
            }
        }
        out
    }

    /// Drops the first `cut` bits, shifting the rest down.
    fn shifted_down(&self, cut: u32) -> Block {
        debug_assert!(cut < BLOCK_BITS);
        let mut out = Block::zero();
        let ws = (cut / 64) as usize;
        let bs = cut % 64;
        for i in 0..WORDS - ws {
            out.words[i] = self.words[i + ws] >> bs;
            if bs != 0 && i + ws + 1 < WORDS {
                out.words[i] |= self.words[i + ws + 1] << (64 - bs);
            }
        }
        out
    }

    /// Bits `[a, b)` moved to the low positions.
    fn extract(&self, a: u32, b: u32) -> Block {
        self.shifted_down(a).low(b - a)
    }

    /// Up to 64 bits starting at `a`.
    #[inline]
    fn word(&self, a: u32, width: u32) -> u64 {
        debug_assert!(width <= 64 && a + width <= BLOCK_BITS);
        let w = (a / 64) as usize;
        let shift = a % 64;
        let mut out = self.words[w] >> shift;
        if shift != 0 && w + 1 < WORDS {
            out |= self.words[w + 1] << (64 - shift);
        }
        out & mask(width)
    }

    /// Emits bits `[a, b)` into the accumulator.
    fn push_range(&self, a: u32, b: u32, acc: &mut WordAcc) {
        let mut lo = a;
        while lo < b {
            let hi = b.min(lo + 64);
            acc.push(self.word(lo, hi - lo), hi - lo);
            lo = hi;
        }
    }

    fn digest(&self, blen: u32, params: &FingerprintParams) -> Digest {
        Digest::of_words(&self.words, blen, params)
    }
}

/// Concatenates two block fragments and re-splits the result into one or
/// two blocks; a two-way split halves the bits, so both sides respect the
/// fill invariant whenever the total does.
fn join_chunks(b0: &Block, l0: u32, b1: &Block, l1: u32) -> Vec<(Block, u32)> {
    let total = l0 + l1;
    debug_assert!((1..=2 * BLOCK_BITS - 1).contains(&total));
    let mut words: Vec<u64> = Vec::with_capacity(2 * WORDS);
    let mut acc = WordAcc {
        out: &mut words,
        cur: 0,
        fill: 0,
    };
    b0.push_range(0, l0, &mut acc);
    b1.push_range(0, l1, &mut acc);
    acc.flush();
    words.resize(2 * WORDS, 0);

    let take = |lo: u32, width: u32| -> Block {
        let mut out = Block::zero();
        let mut done = 0;
        while done < width {
            let step = (width - done).min(64);
            let pos = lo + done;
            let w = (pos / 64) as usize;
            let shift = pos % 64;
            let mut bits = words[w] >> shift;
            if shift != 0 && w + 1 < words.len() {
                bits |= words[w + 1] << (64 - shift);
            }
            out.or_word(done, bits & mask(step), step);
            done += step;
        }
        out
    };

    if total <= BLOCK_BITS {
        vec![(take(0, total), total)]
    } else {
        let left = total.div_ceil(2);
        vec![(take(0, left), left), (take(left, total - left), total - left)]
    }
}

#[derive(Debug, Clone)]
struct Node {
    left: Option<Box<Node>>,
    right: Option<Box<Node>>,
    pri: u64,
    /// This node's own bits; position `q` within the block is sequence
    /// position `q` of the chunk.
    block: Block,
    blen: u32,
    /// Digest of this node's own block, maintained incrementally so that
    /// aggregate refreshes never rescan block contents.
    block_fp: Digest,
    /// Subtree totals.
    len: u64,
    ones: u64,
    fp: Digest,
}

impl Node {
    fn leaf(block: Block, blen: u32, params: &FingerprintParams) -> Box<Node> {
        debug_assert!((1..=BLOCK_BITS).contains(&blen));
        debug_assert!(block == block.low(blen));
        let block_fp = block.digest(blen, params);
        Box::new(Node {
            left: None,
            right: None,
            pri: next_priority(),
            block,
            blen,
            block_fp,
            len: blen as u64,
            ones: block.count_ones() as u64,
            fp: block_fp,
        })
    }

    fn pull(&mut self, params: &FingerprintParams) {
        let mut len = self.blen as u64;
        let mut ones = self.block.count_ones() as u64;
        let mut fp = match &self.left {
            Some(l) => {
                len += l.len;
                ones += l.ones;
                l.fp
            }
            None => Digest::empty(),
        };
        fp.append(&self.block_fp, params);
        if let Some(r) = &self.right {
            len += r.len;
            ones += r.ones;
            fp.append(&r.fp, params);
        }
        self.len = len;
        self.ones = ones;
        self.fp = fp;
    }
}

fn subtree_len(t: &Option<Box<Node>>) -> u64 {
    t.as_ref().map_or(0, |n| n.len)
}

fn merge(a: Option<Box<Node>>, b: Option<Box<Node>>, params: &FingerprintParams) -> Option<Box<Node>> {
    match (a, b) {
        (None, b) => b,
        (a, None) => a,
        (Some(mut a), Some(mut b)) => {
            if a.pri >= b.pri {
                a.right = merge(a.right.take(), Some(b), params);
                a.pull(params);
                Some(a)
            } else {
                b.left = merge(Some(a), b.left.take(), params);
                b.pull(params);
                Some(b)
            }
        }
    }
}

/// Splits off the first `k` bits. May leave an underfull block at the cut;
/// callers re-establish the fill invariant.
fn split_tree(
    t: Option<Box<Node>>,
    k: u64,
    params: &FingerprintParams,
) -> (Option<Box<Node>>, Option<Box<Node>>) {
    let Some(mut t) = t else {
        debug_assert_eq!(k, 0);
        return (None, None);
    };
    if k == 0 {
        return (None, Some(t));
    }
    if k == t.len {
        return (Some(t), None);
    }
    let llen = subtree_len(&t.left);
    let blen = t.blen as u64;
    if k <= llen {
        let (a, b) = split_tree(t.left.take(), k, params);
        t.left = b;
        t.pull(params);
        (a, Some(t))
    } else if k >= llen + blen {
        let (a, b) = split_tree(t.right.take(), k - llen - blen, params);
        t.right = a;
        t.pull(params);
        (Some(t), b)
    } else {
        // Cut falls inside this node's block. The spun-off half inherits
        // this node's priority: a fresh one could outrank an ancestor once
        // the result is reattached deeper in the tree.
        let cut = (k - llen) as u32;
        let mut high = Node::leaf(t.block.shifted_down(cut), t.blen - cut, params);
        high.pri = t.pri;
        let right = t.right.take();
        t.block = t.block.low(cut);
        t.blen = cut;
        t.block_fp = t.block.digest(cut, params);
        t.pull(params);
        (Some(t), merge(Some(high), right, params))
    }
}

fn pop_back(t: Box<Node>, params: &FingerprintParams) -> (Option<Box<Node>>, Block, u32) {
    let mut t = t;
    match t.right.take() {
        Some(r) => {
            let (rest, block, blen) = pop_back(r, params);
            t.right = rest;
            t.pull(params);
            (Some(t), block, blen)
        }
        None => (t.left.take(), t.block, t.blen),
    }
}

fn pop_front(t: Box<Node>, params: &FingerprintParams) -> (Option<Box<Node>>, Block, u32) {
    let mut t = t;
    match t.left.take() {
        Some(l) => {
            let (rest, block, blen) = pop_front(l, params);
            t.left = rest;
            t.pull(params);
            (Some(t), block, blen)
        }
        None => (t.right.take(), t.block, t.blen),
    }
}

fn back_block_len(t: &Node) -> u32 {
    match &t.right {
        Some(r) => back_block_len(r),
        None => t.blen,
    }
}

fn front_block_len(t: &Node) -> u32 {
    match &t.left {
        Some(l) => front_block_len(l),
        None => t.blen,
    }
}

/// Re-balances an underfull block at the back after a split.
fn fix_back(t: Option<Box<Node>>, params: &FingerprintParams) -> Option<Box<Node>> {
    let root = t?;
    let tail = back_block_len(&root);
    if tail >= MIN_FILL || root.len == tail as u64 {
        return Some(root);
    }
    let (rest, b1, l1) = pop_back(root, params);
    let (rest, b0, l0) = pop_back(rest.expect("fill invariant: more blocks exist"), params);
    let mut out = rest;
    for (block, blen) in join_chunks(&b0, l0, &b1, l1) {
        out = merge(out, Some(Node::leaf(block, blen, params)), params);
    }
    out
}

/// Re-balances an underfull block at the front after a split.
fn fix_front(t: Option<Box<Node>>, params: &FingerprintParams) -> Option<Box<Node>> {
    let root = t?;
    let head = front_block_len(&root);
    if head >= MIN_FILL || root.len == head as u64 {
        return Some(root);
    }
    let (rest, b1, l1) = pop_front(root, params);
    let (rest, b0, l0) = pop_front(rest.expect("fill invariant: more blocks exist"), params);
    let mut out = rest;
    for (block, blen) in join_chunks(&b1, l1, &b0, l0).into_iter().rev() {
        out = merge(Some(Node::leaf(block, blen, params)), out, params);
    }
    out
}

/// Builds a treap from an in-order chunk sequence in O(#chunks) via a
/// right-spine stack (each node is finalized exactly once).
fn build_from_chunks<I>(chunks: I, params: &FingerprintParams) -> Option<Box<Node>>
where
    I: IntoIterator<Item = (Block, u32)>,
{
    let mut spine: Vec<Box<Node>> = Vec::new();
    for (block, blen) in chunks {
        let mut node = Node::leaf(block, blen, params);
        let mut carry: Option<Box<Node>> = None;
        while spine.last().is_some_and(|t| t.pri < node.pri) {
            let mut t = spine.pop().unwrap();
            t.right = carry.take();
            t.pull(params);
            carry = Some(t);
        }
        node.left = carry;
        spine.push(node);
    }
    let mut carry: Option<Box<Node>> = None;
    while let Some(mut t) = spine.pop() {
        t.right = carry.take();
        t.pull(params);
        carry = Some(t);
    }
    carry
}

/// Chunk layout for `n` fresh bits: full blocks, with the remainder folded
/// into the last two blocks when it would fall below MIN_FILL.
fn fresh_chunk_sizes(n: u64) -> impl Iterator<Item = u32> {
    let full = n / BLOCK_BITS as u64;
    let rem = (n % BLOCK_BITS as u64) as u32;
    let (whole, tail): (u64, Vec<u32>) = if rem == 0 {
        (full, vec![])
    } else if rem >= MIN_FILL || full == 0 {
        (full, vec![rem])
    } else {
        let joined = BLOCK_BITS + rem;
        (full - 1, vec![joined.div_ceil(2), joined / 2])
    };
    (0..whole).map(|_| BLOCK_BITS).chain(tail)
}

/// A dynamic binary string with ones counts and range fingerprints.
#[derive(Debug, Clone)]
pub struct BitRope {
    root: Option<Box<Node>>,
    params: Arc<FingerprintParams>,
}

impl BitRope {
    /// Rope of `n` zero bits.
    pub fn zeros(n: u64, params: &Arc<FingerprintParams>) -> BitRope {
        let root = build_from_chunks(fresh_chunk_sizes(n).map(|w| (Block::zero(), w)), params);
        BitRope {
            root,
            params: params.clone(),
        }
    }

    /// Rope whose i-th bit equals the i-th item of `bits`.
    pub fn from_bits<I>(bits: I, params: &Arc<FingerprintParams>) -> BitRope
    where
        I: IntoIterator<Item = bool>,
    {
        let bits: Vec<bool> = bits.into_iter().collect();
        let mut chunks: Vec<(Block, u32)> =
            Vec::with_capacity(bits.len() / BLOCK_BITS as usize + 2);
        let mut pos = 0usize;
        for width in fresh_chunk_sizes(bits.len() as u64) {
            let mut block = Block::zero();
            for q in 0..width {
                if bits[pos + q as usize] {
                    block.set(q, true);
                }
            }
            chunks.push((block, width));
            pos += width as usize;
        }
        BitRope {
            root: build_from_chunks(chunks, params),
            params: params.clone(),
        }
    }

    pub fn len(&self) -> u64 {
        subtree_len(&self.root)
    }

    pub fn is_empty(&self) -> bool {
        self.root.is_none()
    }

    pub fn count_ones(&self) -> u64 {
        self.root.as_ref().map_or(0, |n| n.ones)
    }

    pub fn params(&self) -> &Arc<FingerprintParams> {
        &self.params
    }

    /// The i-th bit.
    pub fn get(&self, i: u64) -> bool {
        assert!(i < self.len(), "bit index {i} out of range (len {})", self.len());
        let mut node = self.root.as_deref().unwrap();
        let mut i = i;
        loop {
            let llen = subtree_len(&node.left);
            if i < llen {
                node = node.left.as_deref().unwrap();
            } else if i < llen + node.blen as u64 {
                return node.block.get((i - llen) as u32);
            } else {
                i -= llen + node.blen as u64;
                node = node.right.as_deref().unwrap();
            }
        }
    }

    /// Writes the i-th bit. Idempotent writes skip the fingerprint refresh.
    pub fn set(&mut self, i: u64, value: bool) {
        assert!(i < self.len(), "bit index {i} out of range (len {})", self.len());
        fn rec(node: &mut Node, i: u64, value: bool, params: &FingerprintParams) -> bool {
            let llen = subtree_len(&node.left);
            let blen = node.blen as u64;
            let changed = if i < llen {
                rec(node.left.as_mut().unwrap(), i, value, params)
            } else if i < llen + blen {
                let q = (i - llen) as u32;
                let old = node.block.get(q);
                if old != value {
                    node.block.set(q, value);
                    node.block_fp.flip_bit(node.blen - 1 - q, value, params);
                }
                old != value
            } else {
                rec(node.right.as_mut().unwrap(), i - llen - blen, value, params)
            };
            if changed {
                node.pull(params);
            }
            changed
        }
        let params = self.params.clone();
        rec(self.root.as_mut().unwrap(), i, value, &params);
    }

    /// ORs `width` bits of `bits` into positions `[start, start + width)`.
    /// One tree path regardless of how many bits the mask sets.
    pub fn or_word(&mut self, start: u64, bits: u64, width: u32) {
        assert!((1..=64).contains(&width), "width {width} outside 1..=64");
        assert!(
            start + width as u64 <= self.len(),
            "range {start}+{width} out of range (len {})",
            self.len()
        );
        debug_assert!(width == 64 || bits >> width == 0);
        if bits == 0 {
            return;
        }
        fn rec(node: &mut Node, start: u64, bits: u64, width: u32, params: &FingerprintParams) {
            let llen = subtree_len(&node.left);
            let blen = node.blen as u64;
            let end = start + width as u64;
            if start < llen {
                let w = (llen.min(end) - start) as u32;
                rec(node.left.as_mut().unwrap(), start, bits & mask(w), w, params);
            }
            if end > llen && start < llen + blen {
                let lo = start.max(llen);
                let hi = end.min(llen + blen);
                let offset = (lo - llen) as u32;
                let w = (hi - lo) as u32;
                let sub = (bits >> (lo - start)) & mask(w);
                let mut added = sub & !node.block.word(offset, w);
                node.block.or_word(offset, sub, w);
                while added != 0 {
                    let q = offset + added.trailing_zeros();
                    node.block_fp.flip_bit(node.blen - 1 - q, true, params);
                    added &= added - 1;
                }
            }
            if end > llen + blen {
                let lo = start.max(llen + blen);
                rec(
                    node.right.as_mut().unwrap(),
                    lo - llen - blen,
                    bits >> (lo - start),
                    (end - lo) as u32,
                    params,
                );
            }
            node.pull(params);
        }
        let params = self.params.clone();
        rec(self.root.as_mut().unwrap(), start, bits, width, &params);
    }

    /// Concatenation; `self` supplies the leading bits.
    pub fn concat(self, other: BitRope) -> BitRope {
        assert!(
            self.params.compatible(&other.params),
            "ropes built from different fingerprint parameters"
        );
        let params = self.params.clone();
        if self.is_empty() {
            return other;
        }
        if other.is_empty() {
            return self;
        }
        let root = if self.len() < MIN_FILL as u64 {
            // A single short block: stitch it into the front of `other`.
            let (_, a_block, a_len) = pop_back(self.root.unwrap(), &params);
            let (rest, f_block, f_len) = pop_front(other.root.unwrap(), &params);
            let mut out = rest;
            for (block, blen) in join_chunks(&a_block, a_len, &f_block, f_len).into_iter().rev() {
                out = merge(Some(Node::leaf(block, blen, &params)), out, &params);
            }
            out
        } else if other.len() < MIN_FILL as u64 {
            let (_, b_block, b_len) = pop_front(other.root.unwrap(), &params);
            let (rest, t_block, t_len) = pop_back(self.root.unwrap(), &params);
            let mut out = rest;
            for (block, blen) in join_chunks(&t_block, t_len, &b_block, b_len) {
                out = merge(out, Some(Node::leaf(block, blen, &params)), &params);
            }
            out
        } else {
            merge(self.root, other.root, &params)
        };
        BitRope { root, params }
    }

    /// Splits into the first `k` bits and the remainder.
    pub fn split_at(self, k: u64) -> (BitRope, BitRope) {
        assert!(k <= self.len(), "split point {k} out of range (len {})", self.len());
        let params = self.params;
        let (a, b) = split_tree(self.root, k, &params);
        let a = fix_back(a, &params);
        let b = fix_front(b, &params);
        (
            BitRope {
                root: a,
                params: params.clone(),
            },
            BitRope { root: b, params },
        )
    }

    /// Replaces `[lo, hi)` with zeros. The splice is trimmed to the ones
    /// actually present, so clearing an already-zero range costs O(log n).
    pub fn clear_range(&mut self, lo: u64, hi: u64) {
        assert!(lo <= hi && hi <= self.len(), "range {lo}..{hi} out of range");
        let Some(first) = self.first_one_in(lo, hi) else {
            return;
        };
        let last = self.last_one_in(lo, hi).unwrap();
        let params = self.params.clone();
        let whole = std::mem::replace(
            self,
            BitRope {
                root: None,
                params: params.clone(),
            },
        );
        let (head, tail) = whole.split_at(last + 1);
        let (head, _dropped) = head.split_at(first);
        let filler = BitRope::zeros(last + 1 - first, &params);
        *self = head.concat(filler).concat(tail);
    }

    /// Largest index holding a one, if any.
    pub fn last_one(&self) -> Option<u64> {
        self.last_one_in(0, self.len())
    }

    /// Smallest one position in `[lo, hi)`.
    pub fn first_one_in(&self, lo: u64, hi: u64) -> Option<u64> {
        assert!(lo <= hi && hi <= self.len(), "range {lo}..{hi} out of range");
        fn rec(node: &Node, lo: u64, hi: u64) -> Option<u64> {
            if node.ones == 0 || lo >= hi {
                return None;
            }
            let llen = subtree_len(&node.left);
            let blen = node.blen as u64;
            if lo < llen {
                if let Some(i) = rec(node.left.as_deref().unwrap(), lo, hi.min(llen)) {
                    return Some(i);
                }
            }
            if hi > llen && lo < llen + blen {
                let a = (lo.max(llen) - llen) as u32;
                let b = (hi.min(llen + blen) - llen) as u32;
                if let Some(q) = node.block.first_one_in(a, b) {
                    return Some(llen + q as u64);
                }
            }
            if hi > llen + blen {
                let off = llen + blen;
                return rec(node.right.as_deref().unwrap(), lo.max(off) - off, hi - off)
                    .map(|i| i + off);
            }
            None
        }
        self.root.as_deref().and_then(|n| rec(n, lo, hi))
    }

    /// Largest one position in `[lo, hi)`.
    pub fn last_one_in(&self, lo: u64, hi: u64) -> Option<u64> {
        assert!(lo <= hi && hi <= self.len(), "range {lo}..{hi} out of range");
        fn rec(node: &Node, lo: u64, hi: u64) -> Option<u64> {
            if node.ones == 0 || lo >= hi {
                return None;
            }
            let llen = subtree_len(&node.left);
            let blen = node.blen as u64;
            if hi > llen + blen {
                let off = llen + blen;
                if let Some(i) = rec(node.right.as_deref().unwrap(), lo.max(off) - off, hi - off) {
                    return Some(i + off);
                }
            }
            if hi > llen && lo < llen + blen {
                let a = (lo.max(llen) - llen) as u32;
                let b = (hi.min(llen + blen) - llen) as u32;
                if let Some(q) = node.block.last_one_in(a, b) {
                    return Some(llen + q as u64);
                }
            }
            if lo < llen {
                return rec(node.left.as_deref().unwrap(), lo, hi.min(llen));
            }
            None
        }
        self.root.as_deref().and_then(|n| rec(n, lo, hi))
    }

    /// Number of ones in `[lo, hi)`.
    pub fn count_ones_in(&self, lo: u64, hi: u64) -> u64 {
        assert!(lo <= hi && hi <= self.len(), "range {lo}..{hi} out of range");
        fn rec(node: &Node, lo: u64, hi: u64) -> u64 {
            if node.ones == 0 || lo >= hi {
                return 0;
            }
            if lo == 0 && hi == node.len {
                return node.ones;
            }
            let llen = subtree_len(&node.left);
            let blen = node.blen as u64;
            let mut total = 0;
            if lo < llen {
                total += rec(node.left.as_deref().unwrap(), lo, hi.min(llen));
            }
            if hi > llen && lo < llen + blen {
                let a = (lo.max(llen) - llen) as u32;
                let b = (hi.min(llen + blen) - llen) as u32;
                total += node.block.count_range(a, b) as u64;
            }
            if hi > llen + blen {
                let off = llen + blen;
                total += rec(node.right.as_deref().unwrap(), lo.max(off) - off, hi - off);
            }
            total
        }
        self.root.as_deref().map_or(0, |n| rec(n, lo, hi))
    }

    /// Ascending iterator over one positions in `[lo, hi)`.
    pub fn iter_ones(&self, lo: u64, hi: u64) -> OnesIter<'_> {
        assert!(lo <= hi && hi <= self.len(), "range {lo}..{hi} out of range");
        let mut stack = Vec::new();
        if let Some(root) = self.root.as_deref() {
            stack.push(Frame::Tree(root, 0));
        }
        OnesIter { stack, lo, hi }
    }

    /// Reads `[lo, hi)` into 64-bit words, least significant bit first.
    pub fn read_words(&self, lo: u64, hi: u64) -> Vec<u64> {
        let mut out = Vec::with_capacity(((hi - lo) as usize).div_ceil(64));
        self.read_words_into(lo, hi, &mut out);
        out
    }

    /// [`BitRope::read_words`] appending into a caller-provided buffer.
    pub fn read_words_into(&self, lo: u64, hi: u64, out: &mut Vec<u64>) {
        assert!(lo <= hi && hi <= self.len(), "range {lo}..{hi} out of range");
        let mut acc = WordAcc { out, cur: 0, fill: 0 };
        fn rec(node: &Node, lo: u64, hi: u64, acc: &mut WordAcc) {
            if lo >= hi {
                return;
            }
            let llen = subtree_len(&node.left);
            let blen = node.blen as u64;
            if lo < llen {
                rec(node.left.as_deref().unwrap(), lo, hi.min(llen), acc);
            }
            if hi > llen && lo < llen + blen {
                let a = (lo.max(llen) - llen) as u32;
                let b = (hi.min(llen + blen) - llen) as u32;
                node.block.push_range(a, b, acc);
            }
            if hi > llen + blen {
                let off = llen + blen;
                rec(node.right.as_deref().unwrap(), lo.max(off) - off, hi - off, acc);
            }
        }
        if let Some(root) = self.root.as_deref() {
            rec(root, lo, hi, &mut acc);
        }
        acc.flush();
    }

    /// Up to 64 bits starting at `lo`, packed least significant bit first.
    pub fn word_at(&self, lo: u64, width: u32) -> u64 {
        assert!(width <= 64 && lo + width as u64 <= self.len());
        if width == 0 {
            return 0;
        }
        self.read_words(lo, lo + width as u64)[0]
    }

    /// All bits as booleans; intended for tests and debugging.
    pub fn to_bits(&self) -> Vec<bool> {
        let n = self.len();
        let words = self.read_words(0, n);
        (0..n).map(|i| words[(i / 64) as usize] >> (i % 64) & 1 == 1).collect()
    }

    pub(crate) fn digest_range(&self, lo: u64, hi: u64) -> Digest {
        debug_assert!(lo <= hi && hi <= self.len());
        fn rec(node: &Node, lo: u64, hi: u64, params: &FingerprintParams) -> Digest {
            if lo == 0 && hi == node.len {
                return node.fp;
            }
            let llen = subtree_len(&node.left);
            let blen = node.blen as u64;
            let mut out = Digest::empty();
            if lo < llen {
                out.append(&rec(node.left.as_deref().unwrap(), lo, hi.min(llen), params), params);
            }
            if hi > llen && lo < llen + blen {
                let a = (lo.max(llen) - llen) as u32;
                let b = (hi.min(llen + blen) - llen) as u32;
                if a == 0 && b == node.blen {
                    out.append(&node.block_fp, params);
                } else {
                    out.append(&node.block.extract(a, b).digest(b - a, params), params);
                }
            }
            if hi > llen + blen {
                let off = llen + blen;
                out.append(
                    &rec(node.right.as_deref().unwrap(), lo.max(off) - off, hi - off, params),
                    params,
                );
            }
            out
        }
        match self.root.as_deref() {
            Some(root) if lo < hi => rec(root, lo, hi, &self.params),
            _ => Digest::empty(),
        }
    }

    /// Length of the longest common extension of `a[i..]` and `b[j..]`,
    /// found by fingerprint-guided binary search in O(log^2 n) expected time.
    ///
    /// The answer is exact unless a fingerprint collision occurs, which for
    /// the default two bases happens with probability below 2^-80 per query.
    /// With [`FingerprintParams::with_verify`] enabled, the claimed mismatch
    /// boundary is rechecked against the actual bits and an exact scan is
    /// used as fallback if the recheck fails.
    pub fn lce(a: &BitRope, b: &BitRope, i: u64, j: u64) -> u64 {
        assert!(i <= a.len(), "offset {i} out of range (len {})", a.len());
        assert!(j <= b.len(), "offset {j} out of range (len {})", b.len());
        assert!(
            a.params.compatible(&b.params),
            "ropes built from different fingerprint parameters"
        );
        let cap = (a.len() - i).min(b.len() - j);
        if cap == 0 {
            return 0;
        }
        let params = &*a.params;
        let mut lo = 0u64;
        let mut hi = cap;
        while lo < hi {
            let mid = lo + (hi - lo).div_ceil(2);
            let da = a.digest_range(i, i + mid);
            let db = b.digest_range(j, j + mid);
            if da.same_hash(&db, params) {
                lo = mid;
            } else {
                hi = mid - 1;
            }
        }
        if params.verify() && lo < cap && a.get(i + lo) == b.get(j + lo) {
            // The claimed boundary does not actually mismatch: a collision
            // steered the search. Fall back to an exact scan.
            return Self::lce_exact(a, b, i, j, cap);
        }
        lo
    }

    fn lce_exact(a: &BitRope, b: &BitRope, i: u64, j: u64, cap: u64) -> u64 {
        let mut done = 0u64;
        while done < cap {
            let w = ((cap - done).min(64)) as u32;
            let wa = a.word_at(i + done, w);
            let wb = b.word_at(j + done, w);
            if wa != wb {
                return done + (wa ^ wb).trailing_zeros() as u64;
            }
            done += w as u64;
        }
        cap
    }

    /// Full-tree structural audit: recomputes every aggregate from scratch
    /// and checks the heap and block-fill invariants. Panics on violation.
    pub fn audit(&self) {
        struct Info {
            len: u64,
            ones: u64,
            fp: Digest,
            blocks: u64,
        }
        fn rec(node: &Node, params: &FingerprintParams) -> Info {
            assert!(node.blen >= 1 && node.blen <= BLOCK_BITS, "block length out of range");
            assert!(
                node.block == node.block.low(node.blen),
                "stray bits above block length"
            );
            assert_eq!(
                node.block_fp,
                node.block.digest(node.blen, params),
                "cached block digest diverged"
            );
            let mut len = node.blen as u64;
            let mut ones = node.block.count_ones() as u64;
            let mut blocks = 1;
            let mut fp = Digest::empty();
            if let Some(l) = node.left.as_deref() {
                assert!(l.pri <= node.pri, "heap order violated");
                let li = rec(l, params);
                len += li.len;
                ones += li.ones;
                blocks += li.blocks;
                fp = li.fp;
            }
            fp.append(&node.block.digest(node.blen, params), params);
            if let Some(r) = node.right.as_deref() {
                assert!(r.pri <= node.pri, "heap order violated");
                let ri = rec(r, params);
                len += ri.len;
                ones += ri.ones;
                blocks += ri.blocks;
                fp.append(&ri.fp, params);
            }
            assert_eq!(node.len, len, "cached length diverged");
            assert_eq!(node.ones, ones, "cached ones count diverged");
            assert_eq!(node.fp, fp, "cached fingerprint diverged");
            Info { len, ones, fp, blocks }
        }
        fn min_block(node: &Node) -> u32 {
            let mut m = node.blen;
            if let Some(l) = node.left.as_deref() {
                m = m.min(min_block(l));
            }
            if let Some(r) = node.right.as_deref() {
                m = m.min(min_block(r));
            }
            m
        }
        if let Some(root) = self.root.as_deref() {
            let info = rec(root, &self.params);
            if info.len >= MIN_FILL as u64 {
                assert!(
                    min_block(root) >= MIN_FILL,
                    "underfull block in a rope of {} bits",
                    info.len
                );
            } else {
                assert_eq!(info.blocks, 1, "short rope must be a single block");
            }
        }
    }
}

struct WordAcc<'a> {
    out: &'a mut Vec<u64>,
    cur: u64,
    fill: u32,
}

impl WordAcc<'_> {
    #[inline]
    fn push(&mut self, bits: u64, width: u32) {
        debug_assert!((1..=64).contains(&width));
        if self.fill == 0 {
            self.cur = bits;
            self.fill = width;
        } else {
            self.cur |= bits << self.fill;
            if self.fill + width >= 64 {
                self.out.push(self.cur);
                let consumed = 64 - self.fill;
                self.cur = if consumed == 64 { 0 } else { bits >> consumed };
                self.fill = self.fill + width - 64;
            } else {
                self.fill += width;
            }
        }
        if self.fill == 64 {
            self.out.push(self.cur);
            self.cur = 0;
            self.fill = 0;
        }
    }

    fn flush(&mut self) {
        if self.fill > 0 {
            self.out.push(self.cur);
            self.cur = 0;
            self.fill = 0;
        }
    }
}

enum Frame<'a> {
    Tree(&'a Node, u64),
    Bits(u64, u64),
}

/// Iterator over one positions; see [`BitRope::iter_ones`].
pub struct OnesIter<'a> {
    stack: Vec<Frame<'a>>,
    lo: u64,
    hi: u64,
}

impl Iterator for OnesIter<'_> {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        while let Some(frame) = self.stack.pop() {
            match frame {
                Frame::Tree(node, off) => {
                    if node.ones == 0 || off >= self.hi || off + node.len <= self.lo {
                        continue;
                    }
                    let llen = subtree_len(&node.left);
                    let block_off = off + llen;
                    if let Some(r) = node.right.as_deref() {
                        self.stack.push(Frame::Tree(r, block_off + node.blen as u64));
                    }
                    let a = self.lo.max(block_off).min(block_off + node.blen as u64) - block_off;
                    let b = self.hi.max(block_off).min(block_off + node.blen as u64) - block_off;
                    if a < b {
                        // Word-sized pieces, pushed high to low so the low
                        // piece pops first.
                        let mut pieces: Vec<(u64, u64)> = Vec::with_capacity(WORDS);
                        let mut lo = a as u32;
                        while (lo as u64) < b {
                            let hi = (b as u32).min(lo + 64 - lo % 64).min(lo + 64);
                            let bits = node.block.word(lo, hi - lo);
                            if bits != 0 {
                                pieces.push((bits, block_off + lo as u64));
                            }
                            lo = hi;
                        }
                        for piece in pieces.into_iter().rev() {
                            self.stack.push(Frame::Bits(piece.0, piece.1));
                        }
                    }
                    if let Some(l) = node.left.as_deref() {
                        self.stack.push(Frame::Tree(l, off));
                    }
                }
                Frame::Bits(bits, base) => {
                    let q = bits.trailing_zeros() as u64;
                    let rest = bits & (bits - 1);
                    if rest != 0 {
                        self.stack.push(Frame::Bits(rest, base));
                    }
                    return Some(base + q);
                }
            }
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn params() -> Arc<FingerprintParams> {
        Arc::new(FingerprintParams::from_seed(42))
    }

    fn rope_of(bits: &[bool]) -> BitRope {
        BitRope::from_bits(bits.iter().copied(), &params())
    }

    fn bits_of(s: &str) -> Vec<bool> {
        s.chars().map(|c| c == '1').collect()
    }

    #[test]
    fn block_primitives() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..500 {
            let width = rng.random_range(1..=BLOCK_BITS);
            let mut block = Block::zero();
            let bits: Vec<bool> = (0..width)
                .map(|q| {
                    let bit = rng.random_bool(0.4);
                    block.set(q, bit);
                    bit
                })
                .collect();
            assert_eq!(block.count_ones() as usize, bits.iter().filter(|&&b| b).count());
            let a = rng.random_range(0..=width);
            let b = rng.random_range(a..=width);
            let expect: Vec<u32> = (a..b).filter(|&q| bits[q as usize]).collect();
            assert_eq!(block.count_range(a, b) as usize, expect.len());
            assert_eq!(block.first_one_in(a, b), expect.first().copied());
            assert_eq!(block.last_one_in(a, b), expect.last().copied());
            if a < b {
                let ex = block.extract(a, b);
                for q in 0..b - a {
                    assert_eq!(ex.get(q), bits[(a + q) as usize], "extract({a},{b}) bit {q}");
                }
                assert_eq!(ex, ex.low(b - a));
                let w = rng.random_range(a..b);
                let take = (b - w).min(64);
                let word = block.word(w, take);
                for q in 0..take {
                    assert_eq!(word >> q & 1 == 1, bits[(w + q) as usize]);
                }
            }
            // cut/rejoin round trip
            if width >= 2 {
                let cut = rng.random_range(1..width);
                let low = block.low(cut);
                let high = block.shifted_down(cut);
                let rejoined = join_chunks(&low, cut, &high.low(width - cut), width - cut);
                let mut pos = 0u32;
                for (chunk, clen) in rejoined {
                    for q in 0..clen {
                        assert_eq!(chunk.get(q), bits[(pos + q) as usize]);
                    }
                    pos += clen;
                }
                assert_eq!(pos, width);
            }
        }
    }

    #[test]
    fn zeros_basic() {
        let p = params();
        let empty = BitRope::zeros(0, &p);
        assert_eq!(empty.len(), 0);
        assert!(empty.is_empty());

        let five = BitRope::zeros(5, &p);
        assert_eq!(five.len(), 5);
        assert_eq!(five.count_ones(), 0);
        five.audit();

        let big = BitRope::zeros(1_000_000, &p);
        assert_eq!(big.len(), 1_000_000);
        assert_eq!(big.count_ones(), 0);
        for i in [0u64, 1, 63, 64, 65, 999_999, 500_000] {
            assert!(!big.get(i));
        }
        big.audit();
    }

    #[test]
    fn from_bits_readback() {
        assert!(rope_of(&[]).is_empty());

        let r = rope_of(&bits_of("101"));
        assert_eq!(r.len(), 3);
        assert_eq!(r.count_ones(), 2);
        assert!(r.get(0));
        assert!(!r.get(1));
        assert!(r.get(2));

        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let bits: Vec<bool> = (0..1000).map(|_| rng.random()).collect();
        let r = rope_of(&bits);
        r.audit();
        for (i, &bit) in bits.iter().enumerate() {
            assert_eq!(r.get(i as u64), bit);
        }
    }

    #[test]
    fn concat_matches_sequence_concat() {
        let p = params();
        let empty = BitRope::zeros(0, &p);
        let r = empty.concat(rope_of(&bits_of("101")));
        assert_eq!(r.to_bits(), bits_of("101"));

        let r = rope_of(&bits_of("01")).concat(rope_of(&bits_of("10")));
        assert_eq!(r.to_bits(), bits_of("0110"));
        r.audit();

        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..30 {
            let a: Vec<bool> = (0..rng.random_range(0..1500)).map(|_| rng.random()).collect();
            let b: Vec<bool> = (0..rng.random_range(0..1500)).map(|_| rng.random()).collect();
            let joined = rope_of(&a).concat(rope_of(&b));
            joined.audit();
            let mut expect = a.clone();
            expect.extend_from_slice(&b);
            assert_eq!(joined.to_bits(), expect);
        }
    }

    #[test]
    fn split_round_trip() {
        let r = rope_of(&bits_of("0110"));
        let (a, b) = r.split_at(1);
        assert_eq!(a.to_bits(), bits_of("0"));
        assert_eq!(b.to_bits(), bits_of("110"));

        let (a, b) = rope_of(&bits_of("0110")).split_at(4);
        assert_eq!(a.to_bits(), bits_of("0110"));
        assert!(b.is_empty());

        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..60 {
            let n = rng.random_range(1..2000u64);
            let bits: Vec<bool> = (0..n).map(|_| rng.random()).collect();
            let k = rng.random_range(0..=n);
            let (a, b) = rope_of(&bits).split_at(k);
            a.audit();
            b.audit();
            assert_eq!(a.len(), k);
            let back = a.concat(b);
            back.audit();
            assert_eq!(back.to_bits(), bits);
        }
    }

    #[test]
    fn set_matches_mirror() {
        let mut r = rope_of(&bits_of("000"));
        r.set(1, true);
        assert_eq!(r.to_bits(), bits_of("010"));
        r.set(1, true);
        assert_eq!(r.to_bits(), bits_of("010"));

        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut mirror: Vec<bool> = (0..900).map(|_| rng.random()).collect();
        let mut r = rope_of(&mirror);
        for _ in 0..300 {
            let i = rng.random_range(0..900usize);
            let v: bool = rng.random();
            mirror[i] = v;
            r.set(i as u64, v);
        }
        r.audit();
        assert_eq!(r.to_bits(), mirror);
    }

    #[test]
    fn or_word_matches_mirror() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut mirror: Vec<bool> = (0..1100).map(|_| rng.random_bool(0.2)).collect();
        let mut r = rope_of(&mirror);
        for _ in 0..400 {
            let width = rng.random_range(1..=64u32);
            let start = rng.random_range(0..=(1100 - width as u64));
            let bits = rng.random::<u64>() & mask(width);
            r.or_word(start, bits, width);
            for q in 0..width {
                if bits >> q & 1 == 1 {
                    mirror[(start + q as u64) as usize] = true;
                }
            }
        }
        r.audit();
        assert_eq!(r.to_bits(), mirror);
    }

    #[test]
    fn clear_range_matches_mirror() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..40 {
            let n = rng.random_range(1..1600u64);
            let mut mirror: Vec<bool> = (0..n).map(|_| rng.random()).collect();
            let mut r = rope_of(&mirror);
            for _ in 0..5 {
                let lo = rng.random_range(0..=n);
                let hi = rng.random_range(lo..=n);
                r.clear_range(lo, hi);
                mirror[lo as usize..hi as usize].fill(false);
            }
            r.audit();
            assert_eq!(r.to_bits(), mirror);
        }
    }

    #[test]
    fn lce_small_cases() {
        let a = rope_of(&bits_of("0101"));
        let b = rope_of(&bits_of("0100"));
        assert_eq!(BitRope::lce(&a, &b, 0, 0), 3);
        assert_eq!(BitRope::lce(&a, &a, 0, 0), 4);
        assert_eq!(BitRope::lce(&a, &b, 4, 0), 0);
        assert_eq!(BitRope::lce(&a, &b, 1, 1), 2);
    }

    #[test]
    fn lce_matches_naive_scan() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        // Correlated strings so extensions are nontrivially long.
        let a_bits: Vec<bool> = (0..2048).map(|_| rng.random_bool(0.1)).collect();
        let mut b_bits = a_bits.clone();
        for _ in 0..40 {
            let i = rng.random_range(0..2048usize);
            b_bits[i] = !b_bits[i];
        }
        let a = rope_of(&a_bits);
        let b = rope_of(&b_bits);
        for _ in 0..10_000 {
            let i = rng.random_range(0..=2048u64);
            let j = rng.random_range(0..=2048u64);
            let mut expect = 0;
            while i + expect < 2048
                && j + expect < 2048
                && a_bits[(i + expect) as usize] == b_bits[(j + expect) as usize]
            {
                expect += 1;
            }
            assert_eq!(BitRope::lce(&a, &b, i, j), expect, "lce({i},{j})");
        }
    }

    #[test]
    fn lce_verify_mode() {
        let p = Arc::new(FingerprintParams::from_seed(42).with_verify(true));
        let a = BitRope::from_bits(bits_of("110100"), &p);
        let b = BitRope::from_bits(bits_of("110001"), &p);
        assert_eq!(BitRope::lce(&a, &b, 0, 0), 3);
        assert_eq!(BitRope::lce(&a, &a, 2, 2), 4);
    }

    #[test]
    fn last_one_cases() {
        assert_eq!(rope_of(&bits_of("000")).last_one(), None);
        assert_eq!(rope_of(&bits_of("0101")).last_one(), Some(3));

        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..50 {
            let bits: Vec<bool> = (0..700).map(|_| rng.random_bool(0.02)).collect();
            let expect = bits.iter().rposition(|&b| b).map(|i| i as u64);
            assert_eq!(rope_of(&bits).last_one(), expect);
        }
    }

    #[test]
    fn iter_ones_cases() {
        let r = rope_of(&bits_of("0110"));
        assert_eq!(r.iter_ones(0, 4).collect::<Vec<_>>(), vec![1, 2]);
        assert_eq!(r.iter_ones(2, 2).count(), 0);

        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..50 {
            let bits: Vec<bool> = (0..1000).map(|_| rng.random_bool(0.3)).collect();
            let r = rope_of(&bits);
            let lo = rng.random_range(0..=1000u64);
            let hi = rng.random_range(lo..=1000u64);
            let expect: Vec<u64> = (lo..hi).filter(|&i| bits[i as usize]).collect();
            assert_eq!(r.iter_ones(lo, hi).collect::<Vec<_>>(), expect);
            assert_eq!(r.count_ones_in(lo, hi), expect.len() as u64);
            assert_eq!(r.first_one_in(lo, hi), expect.first().copied());
            assert_eq!(r.last_one_in(lo, hi), expect.last().copied());
        }
    }

    #[test]
    fn read_words_packing() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for _ in 0..50 {
            let n = rng.random_range(1..1200u64);
            let bits: Vec<bool> = (0..n).map(|_| rng.random()).collect();
            let r = rope_of(&bits);
            let lo = rng.random_range(0..=n);
            let hi = rng.random_range(lo..=n);
            let words = r.read_words(lo, hi);
            assert_eq!(words.len(), ((hi - lo) as usize).div_ceil(64));
            for (q, i) in (lo..hi).enumerate() {
                let got = words[q / 64] >> (q % 64) & 1 == 1;
                assert_eq!(got, bits[i as usize]);
            }
        }
    }

    #[test]
    #[should_panic(expected = "out of range")]
    fn get_out_of_range_panics() {
        rope_of(&bits_of("101")).get(3);
    }

    #[test]
    #[should_panic(expected = "out of range")]
    fn split_out_of_range_panics() {
        let _ = rope_of(&bits_of("101")).split_at(4);
    }

    #[test]
    fn ropes_move_between_threads() {
        fn assert_send_sync<T: Send + Sync>() {}
        assert_send_sync::<BitRope>();
        assert_send_sync::<FingerprintParams>();
    }

    proptest::proptest! {
        #[test]
        fn split_concat_round_trip(bits in proptest::collection::vec(proptest::bool::ANY, 0..700), point in 0usize..700) {
            let point = point.min(bits.len()) as u64;
            let (a, b) = rope_of(&bits).split_at(point);
            a.audit();
            b.audit();
            let back = a.concat(b);
            back.audit();
            proptest::prop_assert_eq!(back.to_bits(), bits);
        }

        #[test]
        fn ones_counts_always_consistent(bits in proptest::collection::vec(proptest::bool::ANY, 0..700)) {
            let rope = rope_of(&bits);
            let expect = bits.iter().filter(|&&b| b).count() as u64;
            proptest::prop_assert_eq!(rope.count_ones(), expect);
            proptest::prop_assert_eq!(rope.count_ones_in(0, rope.len()), expect);
            proptest::prop_assert_eq!(rope.iter_ones(0, rope.len()).count() as u64, expect);
        }
    }
}
