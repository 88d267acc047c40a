//! History-independent skip lists with hashed levels.
//!
//! Every key's level is a pure hash of `(key, seed)` — trailing zeros of
//! the mixed key, geometric with ratio 1/2 — so the whole structure is a
//! function of the stored set, never the operation order. Links hold key
//! values, not addresses, with a distinguished nil key terminating each
//! layer. Canonical serialization of the links yields a 64-bit
//! fingerprint that materializes history independence as a testable
//! value.
//!
//! The layer-walking machinery is generic over [`SkipSpace`] so the
//! arrangement module can run the same algorithms over its one global
//! path-point store while [`SkipList`] keeps a private store per list.

use std::collections::HashMap;
use std::fmt::Debug;
use std::hash::Hash;

use thiserror::Error;

use crate::geom::mix64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SkipError {
    #[error("key already present")]
    DuplicateKey,
    #[error("key not present")]
    MissingKey,
    #[error("cut key not found in list")]
    KeyNotFound,
}

/// Key type storable in a skip list. `nil()` is a reserved sentinel that
/// terminates layers and doubles as the head's own key; real keys must
/// not encode to the nil encoding.
pub trait SkipKey: Copy + Eq + Hash + Debug {
    fn nil() -> Self;
    fn encode(&self) -> u64;

    fn is_nil(&self) -> bool {
        *self == Self::nil()
    }
}

impl SkipKey for u64 {
    fn nil() -> Self {
        u64::MAX
    }
    fn encode(&self) -> u64 {
        *self
    }
}

/// Pure level hash: `min(trailing_zeros(mix64(seed ⊕ key)), lmax)`.
pub fn level_of(encoded_key: u64, seed: u64, lmax: usize) -> usize {
    (mix64(seed ^ encoded_key).trailing_zeros() as usize).min(lmax)
}

/// Link storage the skip algorithms walk over. A "space" may hold one
/// list or many chains sharing a store; heads are ordinary keys whose
/// nodes carry `lmax + 1` links.
pub trait SkipSpace<K: SkipKey> {
    fn lmax(&self) -> usize;
    fn next(&self, k: &K, layer: usize) -> K;
    fn set_next(&mut self, k: &K, layer: usize, v: K);
}

/// Per-layer predecessors found by one search, plus the probe count.
pub struct SearchPath<K> {
    /// `preds[l]` = last key on layer `l` for which `before` held (the
    /// start key if none did).
    pub preds: Vec<K>,
    pub steps: u64,
}

/// Walk from `start` (a head key) and return, per layer, the last node
/// satisfying `before`. `before` must be monotone along the list: true
/// on a prefix, false afterwards. Steps count link probes.
pub fn search_path<K: SkipKey, S: SkipSpace<K> + ?Sized, F: FnMut(&K) -> bool>(
    space: &S,
    start: &K,
    mut before: F,
) -> SearchPath<K> {
    let lmax = space.lmax();
    let mut preds = vec![*start; lmax + 1];
    let mut u = *start;
    let mut steps = 0u64;
    for layer in (0..=lmax).rev() {
        loop {
            let nxt = space.next(&u, layer);
            steps += 1;
            if nxt.is_nil() || !before(&nxt) {
                break;
            }
            u = nxt;
        }
        preds[layer] = u;
    }
    SearchPath { preds, steps }
}

/// Link a fresh node (its record must already exist with `level + 1`
/// slots) behind the given predecessors.
pub fn splice_in<K: SkipKey, S: SkipSpace<K> + ?Sized>(
    space: &mut S,
    preds: &[K],
    key: K,
    level: usize,
) {
    for layer in 0..=level {
        let succ = space.next(&preds[layer], layer);
        space.set_next(&key, layer, succ);
        space.set_next(&preds[layer], layer, key);
    }
}

/// Unlink a node sitting right behind the given predecessors.
pub fn splice_out<K: SkipKey, S: SkipSpace<K> + ?Sized>(
    space: &mut S,
    preds: &[K],
    key: &K,
    level: usize,
) {
    for layer in 0..=level {
        debug_assert_eq!(space.next(&preds[layer], layer), *key);
        let succ = space.next(key, layer);
        space.set_next(&preds[layer], layer, succ);
    }
}

/// Exchange the layer tails behind two anchor paths living in one space.
/// `anchors_x[l]` must be the last node of its chain at layer `l` that
/// stays put (the cut element or an earlier node). Exactly
/// `2·(lmax + 1)` link writes.
pub fn swap_tails_links<K: SkipKey, S: SkipSpace<K> + ?Sized>(
    space: &mut S,
    anchors_a: &[K],
    anchors_b: &[K],
) -> u64 {
    let mut writes = 0u64;
    for layer in 0..=space.lmax() {
        let ta = space.next(&anchors_a[layer], layer);
        let tb = space.next(&anchors_b[layer], layer);
        space.set_next(&anchors_a[layer], layer, tb);
        space.set_next(&anchors_b[layer], layer, ta);
        writes += 2;
    }
    writes
}

struct Node<K> {
    level: usize,
    next: Vec<K>,
}

/// A single ordered skip list over keys from a universe of size `N`,
/// with `lmax = ⌈log2 N⌉`. The head is stored under the nil key and
/// carries one link per layer.
pub struct SkipList<K: SkipKey> {
    universe: u64,
    lmax: usize,
    seed: u64,
    nodes: HashMap<K, Node<K>>,
    len: usize,
}

/// Outcome of a key search.
pub struct SearchResult<K> {
    pub found: bool,
    pub preds: Vec<K>,
    pub steps: u64,
}

impl<K: SkipKey> SkipSpace<K> for SkipList<K> {
    fn lmax(&self) -> usize {
        self.lmax
    }

    fn next(&self, k: &K, layer: usize) -> K {
        let node = self.nodes.get(k).expect("key present in list");
        debug_assert!(layer <= node.level);
        node.next[layer]
    }

    fn set_next(&mut self, k: &K, layer: usize, v: K) {
        let node = self.nodes.get_mut(k).expect("key present in list");
        debug_assert!(layer <= node.level);
        node.next[layer] = v;
    }
}

impl<K: SkipKey> SkipList<K> {
    /// Empty list for a key universe of size `universe ≥ 1`.
    pub fn new(universe: u64, seed: u64) -> Self {
        assert!(universe >= 1);
        let lmax = (64 - (universe.saturating_sub(1)).leading_zeros()) as usize;
        Self::with_lmax(universe, seed, lmax)
    }

    /// Empty list with an explicit `lmax` (the arrangement pins one
    /// shared `lmax` across all of its chains).
    pub fn with_lmax(universe: u64, seed: u64, lmax: usize) -> Self {
        let mut nodes = HashMap::new();
        nodes.insert(
            K::nil(),
            Node {
                level: lmax,
                next: vec![K::nil(); lmax + 1],
            },
        );
        SkipList {
            universe,
            lmax,
            seed,
            nodes,
            len: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn max_level(&self) -> usize {
        self.lmax
    }

    pub fn level_of(&self, key: &K) -> usize {
        level_of(key.encode(), self.seed, self.lmax)
    }

    pub fn contains(&self, key: &K) -> bool {
        self.nodes.contains_key(key) && !key.is_nil()
    }

    /// Search for `key` under the total order `cmp`.
    pub fn search<F: FnMut(&K, &K) -> std::cmp::Ordering>(
        &self,
        key: &K,
        mut cmp: F,
    ) -> SearchResult<K> {
        let path = search_path(self, &K::nil(), |k| cmp(k, key) == std::cmp::Ordering::Less);
        let found = {
            let cand = self.next(&path.preds[0], 0);
            !cand.is_nil() && cand == *key
        };
        SearchResult {
            found,
            preds: path.preds,
            steps: path.steps,
        }
    }

    /// Partition search for a monotone predicate (false on a prefix,
    /// then true): returns per-layer last keys where the predicate is
    /// false. Used for comparator-predicate searches.
    pub fn search_partition<F: FnMut(&K) -> bool>(&self, mut pred: F) -> SearchPath<K> {
        search_path(self, &K::nil(), |k| !pred(k))
    }

    pub fn insert<F: FnMut(&K, &K) -> std::cmp::Ordering>(
        &mut self,
        key: K,
        mut cmp: F,
    ) -> Result<u64, SkipError> {
        assert!(!key.is_nil(), "cannot store the nil sentinel");
        let path = search_path(self, &K::nil(), |k| cmp(k, &key) == std::cmp::Ordering::Less);
        let cand = self.next(&path.preds[0], 0);
        if !cand.is_nil() && cand == key {
            return Err(SkipError::DuplicateKey);
        }
        let level = self.level_of(&key);
        self.nodes.insert(
            key,
            Node {
                level,
                next: vec![K::nil(); level + 1],
            },
        );
        splice_in(self, &path.preds, key, level);
        self.len += 1;
        Ok(path.steps)
    }

    pub fn remove<F: FnMut(&K, &K) -> std::cmp::Ordering>(
        &mut self,
        key: &K,
        mut cmp: F,
    ) -> Result<u64, SkipError> {
        let path = search_path(self, &K::nil(), |k| cmp(k, key) == std::cmp::Ordering::Less);
        let cand = self.next(&path.preds[0], 0);
        if cand.is_nil() || cand != *key {
            return Err(SkipError::MissingKey);
        }
        let level = self.nodes[key].level;
        splice_out(self, &path.preds, key, level);
        self.nodes.remove(key);
        self.len -= 1;
        Ok(path.steps)
    }

    /// Keys in layer-0 order.
    pub fn iter_keys(&self) -> impl Iterator<Item = K> + '_ {
        let mut cur = self.next(&K::nil(), 0);
        std::iter::from_fn(move || {
            if cur.is_nil() {
                None
            } else {
                let k = cur;
                cur = self.next(&k, 0);
                Some(k)
            }
        })
    }

    /// Swap the tails of two lists after the cut keys (`None` = cut at
    /// the head, moving the entire list). Both lists must share seed and
    /// lmax. At most `2·(lmax + 1)` link writes; node records migrate
    /// between the stores so each list stays self-contained.
    pub fn swap_tails<F: FnMut(&K, &K) -> std::cmp::Ordering>(
        a: &mut SkipList<K>,
        a_cut: Option<K>,
        b: &mut SkipList<K>,
        b_cut: Option<K>,
        mut cmp: F,
    ) -> Result<(u64, u64), SkipError> {
        assert_eq!(a.seed, b.seed, "tail swap requires a shared seed");
        assert_eq!(a.lmax, b.lmax, "tail swap requires a shared lmax");
        if let Some(k) = &a_cut {
            if !a.contains(k) {
                return Err(SkipError::KeyNotFound);
            }
        }
        if let Some(k) = &b_cut {
            if !b.contains(k) {
                return Err(SkipError::KeyNotFound);
            }
        }
        let anchors = |list: &SkipList<K>, cut: &Option<K>, cmp: &mut F| -> SearchPath<K> {
            match cut {
                None => SearchPath {
                    preds: vec![K::nil(); list.lmax + 1],
                    steps: 0,
                },
                Some(c) => {
                    search_path(list, &K::nil(), |k| cmp(k, c) != std::cmp::Ordering::Greater)
                }
            }
        };
        let pa = anchors(a, &a_cut, &mut cmp);
        let pb = anchors(b, &b_cut, &mut cmp);

        // Exchange layer links crosswise between the two stores.
        let mut writes = 0u64;
        for layer in 0..=a.lmax {
            let ta = a.next(&pa.preds[layer], layer);
            let tb = b.next(&pb.preds[layer], layer);
            a.set_next(&pa.preds[layer], layer, tb);
            b.set_next(&pb.preds[layer], layer, ta);
            writes += 2;
        }

        // Migrate node records so layer-0 walks stay local. The moved key
        // sets are read off the post-swap layer-0 chains.
        let tail_keys = |list: &SkipList<K>, from: K| -> Vec<K> {
            let mut v = Vec::new();
            let mut cur = from;
            while !cur.is_nil() {
                v.push(cur);
                cur = list
                    .nodes
                    .get(&cur)
                    .map(|n| n.next[0])
                    .unwrap_or_else(K::nil);
            }
            v
        };
        // After the link swap, a's chain continues into keys stored in b
        // and vice versa; walk each new tail in the *other* store.
        let a_new_tail = a.next(&pa.preds[0], 0);
        let b_new_tail = b.next(&pb.preds[0], 0);
        let from_b = tail_keys(b, a_new_tail);
        let from_a = tail_keys(a, b_new_tail);
        for k in from_b {
            if let Some(node) = b.nodes.remove(&k) {
                b.len -= 1;
                a.len += 1;
                a.nodes.insert(k, node);
            }
        }
        for k in from_a {
            if let Some(node) = a.nodes.remove(&k) {
                a.len -= 1;
                b.len += 1;
                b.nodes.insert(k, node);
            }
        }
        Ok((writes, pa.steps + pb.steps))
    }

    /// Canonical serialization: `(universe, seed, lmax)`, the head's
    /// links, then per key in comparator order its encoding, level, and
    /// all successor links. Equal sets produce equal words.
    pub fn canonical_words(&self) -> Vec<u64> {
        let mut words = vec![self.universe, self.seed, self.lmax as u64];
        let head = &self.nodes[&K::nil()];
        words.extend(head.next.iter().map(|k| k.encode()));
        let mut cur = head.next[0];
        while !cur.is_nil() {
            let node = &self.nodes[&cur];
            words.push(cur.encode());
            words.push(node.level as u64);
            words.extend(node.next.iter().map(|k| k.encode()));
            cur = node.next[0];
        }
        words
    }

    /// 64-bit digest of the canonical serialization.
    pub fn fingerprint(&self) -> u64 {
        digest_words(self.canonical_words())
    }

    /// Validate the layer invariant: layer `k` visits exactly the stored
    /// keys with level ≥ k, in strictly increasing comparator order.
    pub fn check_layers<F: FnMut(&K, &K) -> std::cmp::Ordering>(
        &self,
        mut cmp: F,
    ) -> Result<(), String> {
        let in_order: Vec<K> = self.iter_keys().collect();
        if in_order.len() != self.len {
            return Err(format!(
                "layer 0 visits {} keys, len says {}",
                in_order.len(),
                self.len
            ));
        }
        for w in in_order.windows(2) {
            if cmp(&w[0], &w[1]) != std::cmp::Ordering::Less {
                return Err(format!("layer 0 out of order at {:?} .. {:?}", w[0], w[1]));
            }
        }
        for layer in 0..=self.lmax {
            let expect: Vec<K> = in_order
                .iter()
                .copied()
                .filter(|k| self.nodes[k].level >= layer)
                .collect();
            let mut walked = Vec::new();
            let mut cur = self.nodes[&K::nil()].next[layer];
            while !cur.is_nil() {
                let node = self
                    .nodes
                    .get(&cur)
                    .ok_or_else(|| format!("dangling link to {:?} at layer {}", cur, layer))?;
                if node.level < layer {
                    return Err(format!("{:?} linked on layer {} above its level", cur, layer));
                }
                walked.push(cur);
                cur = node.next[layer];
            }
            if walked != expect {
                return Err(format!("layer {} walk mismatch", layer));
            }
        }
        Ok(())
    }
}

/// mix64 chain digest over 64-bit words.
pub fn digest_words<I: IntoIterator<Item = u64>>(words: I) -> u64 {
    let mut h = 0x9e3779b97f4a7c15u64;
    for w in words {
        h = mix64(h ^ w);
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;

    fn ord(a: &u64, b: &u64) -> std::cmp::Ordering {
        a.cmp(b)
    }

    #[test]
    fn level_is_pure_and_clamped() {
        for key in 0..200u64 {
            let l1 = level_of(key, 7, 10);
            let l2 = level_of(key, 7, 10);
            assert_eq!(l1, l2);
            assert!(l1 <= 10);
        }
    }

    #[test]
    fn level_fraction_half() {
        let lmax = 16;
        let seed = 0xdecafbad;
        let n = 1u64 << 16;
        let at_least_one = (0..n).filter(|&k| level_of(k, seed, lmax) >= 1).count();
        let frac = at_least_one as f64 / n as f64;
        assert!((frac - 0.5).abs() <= 0.01, "fraction {frac}");
    }

    #[test]
    fn empty_search() {
        let sl: SkipList<u64> = SkipList::new(1024, 3);
        let r = sl.search(&500, ord);
        assert!(!r.found);
        assert!(r.preds.iter().all(|k| k.is_nil()));
        assert!(r.steps <= sl.max_level() as u64 + 1);
    }

    #[test]
    fn insert_then_search() {
        let mut sl: SkipList<u64> = SkipList::new(1024, 3);
        sl.insert(5, ord).unwrap();
        assert!(sl.search(&5, ord).found);
        assert!(!sl.search(&6, ord).found);
        assert_eq!(sl.iter_keys().collect::<Vec<_>>(), vec![5]);
        assert_eq!(sl.insert(5, ord), Err(SkipError::DuplicateKey));
        assert_eq!(sl.remove(&6, ord), Err(SkipError::MissingKey));
    }

    #[test]
    fn history_independent_small() {
        let orders = [
            [3u64, 1, 2],
            [3, 2, 1],
            [1, 3, 2],
            [1, 2, 3],
            [2, 1, 3],
            [2, 3, 1],
        ];
        let fps: Vec<u64> = orders
            .iter()
            .map(|order| {
                let mut sl: SkipList<u64> = SkipList::new(16, 9);
                for &k in order {
                    sl.insert(k, ord).unwrap();
                }
                sl.check_layers(ord).unwrap();
                sl.fingerprint()
            })
            .collect();
        assert!(fps.windows(2).all(|w| w[0] == w[1]));
    }

    #[test]
    fn insert_remove_round_trip_fingerprints() {
        let mut rng = ChaCha12Rng::seed_from_u64(11);
        let mut sl: SkipList<u64> = SkipList::new(1 << 20, 5);
        let mut present = Vec::new();
        for k in 0..64u64 {
            let key = k * 97 + 13;
            sl.insert(key, ord).unwrap();
            present.push(key);
        }
        let initial = sl.fingerprint();
        for _ in 0..1000 {
            let fresh = loop {
                let cand = rng.random_range(0..1u64 << 20);
                if !sl.contains(&cand) {
                    break cand;
                }
            };
            sl.insert(fresh, ord).unwrap();
            sl.remove(&fresh, ord).unwrap();
            assert_eq!(sl.fingerprint(), initial);
        }
        sl.check_layers(ord).unwrap();
    }

    #[test]
    fn search_steps_bounded() {
        let n: u64 = 1024;
        let mut sl: SkipList<u64> = SkipList::new(n, 21);
        for k in 1..=1000u64 {
            sl.insert(k, ord).unwrap();
        }
        let mut total = 0u64;
        for k in 1..=1000u64 {
            let r = sl.search(&k, ord);
            assert!(r.found);
            total += r.steps;
        }
        let mean = total as f64 / 1000.0;
        let lg = (n as f64).log2();
        assert!(mean <= 4.0 * lg * lg, "mean {mean}");
    }

    #[test]
    fn tail_swap_example() {
        let mut a: SkipList<u64> = SkipList::new(16, 2);
        let mut b: SkipList<u64> = SkipList::new(16, 2);
        for k in [1u64, 3, 5] {
            a.insert(k, ord).unwrap();
        }
        for k in [2u64, 4, 6] {
            b.insert(k, ord).unwrap();
        }
        let fa = a.fingerprint();
        let fb = b.fingerprint();
        let (writes, _) = SkipList::swap_tails(&mut a, Some(3), &mut b, Some(4), ord).unwrap();
        assert!(writes <= 2 * (a.max_level() as u64 + 1));
        assert_eq!(a.iter_keys().collect::<Vec<_>>(), vec![1, 3, 6]);
        assert_eq!(b.iter_keys().collect::<Vec<_>>(), vec![2, 4, 5]);
        a.check_layers(ord).unwrap();
        b.check_layers(ord).unwrap();
        // Swapping again at the same cuts restores both lists.
        SkipList::swap_tails(&mut a, Some(3), &mut b, Some(4), ord).unwrap();
        assert_eq!(a.fingerprint(), fa);
        assert_eq!(b.fingerprint(), fb);
    }

    #[test]
    fn tail_swap_random_lists_keep_layers() {
        // A holds evens, B holds odds; cutting A at an even key and B at
        // the largest odd below it keeps both lists sorted after the swap.
        let mut rng = ChaCha12Rng::seed_from_u64(77);
        for trial in 0..20 {
            let mut a: SkipList<u64> = SkipList::new(1 << 10, 4);
            let mut b: SkipList<u64> = SkipList::new(1 << 10, 4);
            for i in 0..512u64 {
                a.insert(2 * i, ord).unwrap();
                b.insert(2 * i + 1, ord).unwrap();
            }
            let ca = 2 * rng.random_range(1..512u64);
            let cb = ca - 1;
            let (writes, _) =
                SkipList::swap_tails(&mut a, Some(ca), &mut b, Some(cb), ord).unwrap();
            assert!(writes <= 2 * (a.max_level() as u64 + 1), "trial {trial}");
            a.check_layers(ord).unwrap();
            b.check_layers(ord).unwrap();
            assert_eq!(a.len() + b.len(), 1024);
        }
    }

    #[test]
    fn fingerprint_distinguishes_sets() {
        let mut rng = ChaCha12Rng::seed_from_u64(5150);
        let mut seen = std::collections::HashSet::new();
        let mut fps = std::collections::HashSet::new();
        let mut trials = 0;
        while trials < 10_000 {
            let mut keys: Vec<u64> = (0..64).map(|_| rng.random_range(0..1u64 << 30)).collect();
            keys.sort_unstable();
            keys.dedup();
            if keys.len() != 64 || !seen.insert(keys.clone()) {
                continue;
            }
            trials += 1;
            let mut sl: SkipList<u64> = SkipList::new(1 << 30, 1234);
            for &k in &keys {
                sl.insert(k, ord).unwrap();
            }
            assert!(fps.insert(sl.fingerprint()), "collision at trial {trials}");
        }
    }

    #[test]
    fn empty_lists_same_universe_same_fingerprint() {
        let a: SkipList<u64> = SkipList::new(4096, 8);
        let b: SkipList<u64> = SkipList::new(4096, 8);
        assert_eq!(a.fingerprint(), b.fingerprint());
        let c: SkipList<u64> = SkipList::new(4096, 9);
        assert_ne!(a.fingerprint(), c.fingerprint());
    }
}
