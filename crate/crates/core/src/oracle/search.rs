//! Exhaustive search over multisets of group elements.
//!
//! A [`Rule`] describes which element may be appended to a partial sequence
//! and how the sequence is scored. Every rule's state depends only on the
//! multiset chosen so far, never on the order, which gives two exact ways to
//! search:
//!
//! * [`Memoized`] caches the optimum per state, so multisets with equal
//!   state are solved once.
//! * [`Canonical`] visits every multiset exactly once, as a nondecreasing
//!   index sequence, without any caching. It is the unpruned reference.

use std::hash::Hash;
use std::sync::atomic::{AtomicU32, Ordering as AtomicOrdering};

use dashmap::DashMap;
use smallvec::SmallVec;
use rayon::prelude::*;

use super::sumset::BitSet;
use super::table::GroupTable;

pub(crate) trait Rule: Sync {
    type State: Clone + Eq + Hash + Send + Sync;
    type Value: Copy + Ord + Send + Sync;

    fn root(&self) -> Self::State;
    fn universe(&self) -> &[usize];
    /// State after appending `g`, or `None` when `g` may not be appended.
    fn step(&self, state: &Self::State, g: usize) -> Option<Self::State>;
    /// Score of stopping here, if stopping is allowed.
    fn terminal(&self, state: &Self::State) -> Option<Self::Value>;
    /// Score of appending `g` and then continuing with score `rest`.
    fn gain(&self, g: usize, rest: Self::Value) -> Self::Value;
    /// A representative of the orbit of `state` under symmetries that
    /// preserve the rule; states in one orbit have equal optimal score.
    fn canonical(&self, state: &Self::State) -> Self::State {
        state.clone()
    }
}

/// A length-maximizing rule with a proven cap on how many more elements can
/// follow a state reached at `depth`.
pub(crate) trait LengthRule: Rule<Value = u32> {
    fn extension_bound(&self, state: &Self::State, depth: u32) -> u32;
}

pub(crate) struct Memoized<'r, R: Rule> {
    rule: &'r R,
    memo: DashMap<R::State, Option<R::Value>>,
}

impl<'r, R: Rule> Memoized<'r, R> {
    pub fn new(rule: &'r R) -> Self {
        Memoized {
            rule,
            memo: DashMap::new(),
        }
    }

    /// Best score reachable from `state`.
    pub fn value(&self, state: &R::State) -> Option<R::Value> {
        let key = self.rule.canonical(state);
        if let Some(v) = self.memo.get(&key) {
            return *v;
        }
        let mut best = self.rule.terminal(state);
        for &g in self.rule.universe() {
            if let Some(next) = self.rule.step(state, g) {
                if let Some(rest) = self.value(&next) {
                    best = best.max(Some(self.rule.gain(g, rest)));
                }
            }
        }
        self.memo.insert(key, best);
        best
    }

    /// Best score from the root; the first branching level runs on the
    /// current rayon pool when `parallel` is set.
    pub fn solve(&self, parallel: bool) -> Option<R::Value> {
        let root = self.rule.root();
        let child = |&g: &usize| {
            self.rule
                .step(&root, g)
                .and_then(|next| self.value(&next))
                .map(|rest| self.rule.gain(g, rest))
        };
        let first = if parallel {
            self.rule.universe().par_iter().map(child).max().flatten()
        } else {
            self.rule.universe().iter().map(child).max().flatten()
        };
        let best = first.max(self.rule.terminal(&root));
        self.memo.insert(self.rule.canonical(&root), best);
        best
    }

    /// All multisets (as sorted index lists) attaining the optimum.
    pub fn optimal_multisets(&self) -> Vec<Vec<usize>> {
        let root = self.rule.root();
        let mut out = Vec::new();
        if let Some(target) = self.value(&root) {
            self.collect(&root, target, 0, &mut Vec::new(), &mut out);
        }
        out
    }

    fn collect(
        &self,
        state: &R::State,
        target: R::Value,
        min_pos: usize,
        path: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if self.rule.terminal(state) == Some(target) {
            out.push(path.clone());
        }
        let universe = self.rule.universe();
        for (pos, &g) in universe.iter().enumerate().skip(min_pos) {
            let Some(next) = self.rule.step(state, g) else {
                continue;
            };
            let Some(rest) = self.value(&next) else {
                continue;
            };
            if self.rule.gain(g, rest) == target {
                path.push(g);
                self.collect(&next, rest, pos, path, out);
                path.pop();
            }
        }
    }
}

/// Depth-first branch and bound for [`LengthRule`]s. The memo holds a proven
/// upper bound on each state's value, marked exact when no branch below it
/// was cut.
pub(crate) struct BranchAndBound<'r, R: LengthRule> {
    rule: &'r R,
    memo: DashMap<R::State, (u32, bool)>,
    best: AtomicU32,
}

impl<'r, R: LengthRule> BranchAndBound<'r, R> {
    pub fn new(rule: &'r R) -> Self {
        BranchAndBound {
            rule,
            memo: DashMap::new(),
            best: AtomicU32::new(0),
        }
    }

    pub fn solve(&self, parallel: bool) -> u32 {
        let root = self.rule.root();
        let child = |&g: &usize| {
            if let Some(next) = self.rule.step(&root, g) {
                self.search(&next, 1);
            }
        };
        if parallel {
            self.rule.universe().par_iter().for_each(child);
        } else {
            self.rule.universe().iter().for_each(child);
        }
        self.best.load(AtomicOrdering::SeqCst)
    }

    /// Returns `(bound, exact)` for the value of `state`.
    fn search(&self, state: &R::State, depth: u32) -> (u32, bool) {
        self.best.fetch_max(depth, AtomicOrdering::SeqCst);
        let key = self.rule.canonical(state);
        let mut cap = self.rule.extension_bound(state, depth);
        if let Some(entry) = self.memo.get(&key) {
            let (bound, exact) = *entry;
            if exact {
                self.best.fetch_max(depth + bound, AtomicOrdering::SeqCst);
                return (bound, true);
            }
            cap = cap.min(bound);
        }
        if depth + cap <= self.best.load(AtomicOrdering::SeqCst) {
            return (cap, false);
        }
        let mut bound = 0;
        let mut exact = true;
        for &g in self.rule.universe() {
            if let Some(next) = self.rule.step(state, g) {
                let (b, e) = self.search(&next, depth + 1);
                bound = bound.max(b + 1);
                exact &= e;
            }
        }
        let bound = bound.min(cap);
        self.memo
            .entry(key)
            .and_modify(|v| {
                if exact || (!v.1 && bound < v.0) {
                    *v = (bound, exact);
                }
            })
            .or_insert((bound, exact));
        (bound, exact)
    }
}

/// Plain enumeration of every admissible multiset.
pub(crate) struct Canonical<'r, R: Rule> {
    rule: &'r R,
}

impl<'r, R: Rule> Canonical<'r, R> {
    pub fn new(rule: &'r R) -> Self {
        Canonical { rule }
    }

    pub fn solve(&self) -> Option<R::Value> {
        self.best(&self.rule.root(), 0)
    }

    fn best(&self, state: &R::State, min_pos: usize) -> Option<R::Value> {
        let mut best = self.rule.terminal(state);
        for (pos, &g) in self.rule.universe().iter().enumerate().skip(min_pos) {
            if let Some(next) = self.rule.step(state, g) {
                if let Some(rest) = self.best(&next, pos) {
                    best = best.max(Some(self.rule.gain(g, rest)));
                }
            }
        }
        best
    }

    /// Every admissible multiset whose score equals the optimum.
    pub fn optimal_multisets(&self) -> Vec<Vec<usize>> {
        let Some(target) = self.solve() else {
            return vec![];
        };
        let mut out = Vec::new();
        self.walk(&self.rule.root(), 0, &mut Vec::new(), &mut |path, score| {
            if score == target {
                out.push(path.to_vec());
            }
        });
        out
    }

    fn walk(
        &self,
        state: &R::State,
        min_pos: usize,
        path: &mut Vec<usize>,
        emit: &mut impl FnMut(&[usize], R::Value),
    ) {
        if let Some(mut score) = self.rule.terminal(state) {
            for &g in path.iter().rev() {
                score = self.rule.gain(g, score);
            }
            emit(path, score);
        }
        for (pos, &g) in self.rule.universe().iter().enumerate().skip(min_pos) {
            if let Some(next) = self.rule.step(state, g) {
                path.push(g);
                self.walk(&next, pos, path, emit);
                path.pop();
            }
        }
    }
}

/// Smallest image of a subsum set under the known automorphisms.
fn least_image(table: &GroupTable, set: &BitSet) -> BitSet {
    let mut best = set.clone();
    for perm in &table.automorphisms {
        let image = perm.apply(set);
        if image < best {
            best = image;
        }
    }
    best
}

/// Sequences with no nonempty subsum in `forbidden`. Scores length.
pub(crate) struct AvoidRule<'t> {
    pub table: &'t GroupTable,
    pub universe: Vec<usize>,
    pub forbidden: Vec<usize>,
}

impl AvoidRule<'_> {
    /// State is the set of subsums including the empty sum 0; appending `g`
    /// is allowed iff `t - g` is not already a subsum for any forbidden `t`.
    fn advance(&self, subsums: &BitSet, g: usize) -> Option<BitSet> {
        if self
            .forbidden
            .iter()
            .any(|&t| subsums.contains(self.table.sub(t, g)))
        {
            return None;
        }
        Some(subsums.extended_by(self.table, g))
    }

    fn origin(&self) -> BitSet {
        let mut b = BitSet::new(self.table.size);
        b.insert(0);
        b
    }
}

impl Rule for AvoidRule<'_> {
    type State = BitSet;
    type Value = u32;

    fn root(&self) -> BitSet {
        self.origin()
    }
    fn universe(&self) -> &[usize] {
        &self.universe
    }
    fn step(&self, state: &BitSet, g: usize) -> Option<BitSet> {
        self.advance(state, g)
    }
    fn terminal(&self, _: &BitSet) -> Option<u32> {
        Some(0)
    }
    fn gain(&self, _: usize, rest: u32) -> u32 {
        rest + 1
    }
    fn canonical(&self, state: &BitSet) -> BitSet {
        least_image(self.table, state)
    }
}

impl LengthRule for AvoidRule<'_> {
    /// Every appended element enlarges the set of subsums (with 0), which
    /// stays disjoint from the nonzero part of the forbidden subgroup.
    fn extension_bound(&self, state: &BitSet, _: u32) -> u32 {
        let room = self.table.size + 1 - self.forbidden.len();
        room.saturating_sub(state.count()) as u32
    }
}

/// Sequences with no subsequence of length `<= bound` summing into
/// `forbidden`. Scores length.
pub(crate) struct ShortAvoidRule<'t> {
    pub table: &'t GroupTable,
    pub universe: Vec<usize>,
    pub forbidden: Vec<usize>,
    pub bound: usize,
}

/// Layer `j` (from 1) is the set of sums of nonempty subsequences with at
/// most `j` terms, for `j < bound`. Layers are stored back to back, and a
/// missing trailing layer equals the last stored one.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) struct Layers {
    words: SmallVec<[u64; 8]>,
}

impl ShortAvoidRule<'_> {
    fn width(&self) -> usize {
        self.table.size.div_ceil(64)
    }

    fn layer_count(&self, state: &Layers) -> usize {
        state.words.len() / self.width()
    }

    fn layer<'a>(&self, state: &'a Layers, j: usize) -> &'a [u64] {
        let w = self.width();
        &state.words[(j - 1) * w..j * w]
    }

    fn top_contains(&self, state: &Layers, x: usize) -> bool {
        let count = self.layer_count(state);
        count > 0 && self.layer(state, count)[x / 64] >> (x % 64) & 1 == 1
    }
}

impl Rule for ShortAvoidRule<'_> {
    type State = Layers;
    type Value = u32;

    fn root(&self) -> Layers {
        Layers {
            words: SmallVec::new(),
        }
    }
    fn universe(&self) -> &[usize] {
        &self.universe
    }
    fn step(&self, state: &Layers, g: usize) -> Option<Layers> {
        // A forbidden short sum through g needs t - g as a sum of at most
        // bound - 1 earlier terms, or t = g itself.
        if self
            .forbidden
            .iter()
            .any(|&t| t == g || self.top_contains(state, self.table.sub(t, g)))
        {
            return None;
        }
        let w = self.width();
        let old = self.layer_count(state);
        let count = (old + 1).min(self.bound.saturating_sub(1));
        let shift = &self.table.translations[g];
        let mut words: SmallVec<[u64; 8]> = SmallVec::from_elem(0, count * w);
        for j in 1..=count {
            let dst = &mut words[(j - 1) * w..j * w];
            if old > 0 {
                dst.copy_from_slice(self.layer(state, j.min(old)));
            }
            // (L_{j-1} ∪ {0}) + g
            dst[g / 64] |= 1 << (g % 64);
            if j > 1 && old > 0 {
                shift.apply_into(self.layer(state, (j - 1).min(old)), dst);
            }
        }
        let mut count = count;
        while count >= 2 && words[(count - 1) * w..count * w] == words[(count - 2) * w..(count - 1) * w] {
            count -= 1;
        }
        words.truncate(count * w);
        Some(Layers { words })
    }
    fn terminal(&self, _: &Layers) -> Option<u32> {
        Some(0)
    }
    fn gain(&self, _: usize, rest: u32) -> u32 {
        rest + 1
    }
    fn canonical(&self, state: &Layers) -> Layers {
        let w = self.width();
        let count = self.layer_count(state);
        if count == 0 {
            return state.clone();
        }
        let mut best = state.clone();
        let mut image: SmallVec<[u64; 8]> = SmallVec::from_elem(0, count * w);
        for perm in &self.table.automorphisms {
            // Compare layer by layer, stopping as soon as the image loses.
            let mut ordering = std::cmp::Ordering::Equal;
            for j in 0..count {
                let dst = &mut image[j * w..(j + 1) * w];
                dst.fill(0);
                perm.apply_into(&state.words[j * w..(j + 1) * w], dst);
                ordering = image[j * w..(j + 1) * w].cmp(&best.words[j * w..(j + 1) * w]);
                if ordering != std::cmp::Ordering::Equal {
                    break;
                }
            }
            match ordering {
                std::cmp::Ordering::Less => {
                    for j in 0..count {
                        let dst = &mut image[j * w..(j + 1) * w];
                        dst.fill(0);
                        perm.apply_into(&state.words[j * w..(j + 1) * w], dst);
                    }
                    best.words.copy_from_slice(&image);
                }
                _ => continue,
            }
        }
        best
    }
}

impl LengthRule for ShortAvoidRule<'_> {
    /// Until the length limit is reached every subsequence is short, so the
    /// sequence avoids the forbidden subgroup outright and its subsums grow
    /// by at least one per element. If that growth cannot reach the limit,
    /// it caps the whole extension.
    fn extension_bound(&self, state: &Layers, depth: u32) -> u32 {
        let limit = self.bound as u32;
        if depth >= limit {
            return u32::MAX / 2;
        }
        let count = self.layer_count(state);
        let sums = if count == 0 {
            0
        } else {
            self.layer(state, count).iter().map(|w| w.count_ones()).sum::<u32>()
        };
        // subsums together with 0, all outside the forbidden subgroup but 0
        let room = (self.table.size + 1 - self.forbidden.len()) as u32;
        let growth = room.saturating_sub(sums + 1);
        if growth < limit - depth {
            growth
        } else {
            u32::MAX / 2
        }
    }
}

/// Zero-sumfree sequences scored by `(exp·k(S), -|S|)`: maximal cross
/// number first, then minimal length.
pub(crate) struct LittleCrossRule<'t> {
    pub inner: AvoidRule<'t>,
}

impl Rule for LittleCrossRule<'_> {
    type State = BitSet;
    type Value = (u32, std::cmp::Reverse<u32>);

    fn root(&self) -> BitSet {
        self.inner.origin()
    }
    fn universe(&self) -> &[usize] {
        &self.inner.universe
    }
    fn step(&self, state: &BitSet, g: usize) -> Option<BitSet> {
        self.inner.advance(state, g)
    }
    fn terminal(&self, _: &BitSet) -> Option<Self::Value> {
        Some((0, std::cmp::Reverse(0)))
    }
    fn gain(&self, g: usize, (w, len): Self::Value) -> Self::Value {
        (w + self.inner.table.weight(g), std::cmp::Reverse(len.0 + 1))
    }
    fn canonical(&self, state: &BitSet) -> BitSet {
        least_image(self.inner.table, state)
    }
}

/// Nonempty zero-sumfree `S` scored by `exp·(k(S) + 1/ord(σ(S)))`, i.e. the
/// cross number of the minimal zero-sum sequence `S·(-σ(S))`.
pub(crate) struct CrossRule<'t> {
    pub inner: AvoidRule<'t>,
}

impl Rule for CrossRule<'_> {
    /// Subsums and the running total `σ(S)`; `None` before the first element.
    type State = (BitSet, Option<u32>);
    type Value = u32;

    fn root(&self) -> Self::State {
        (self.inner.origin(), None)
    }
    fn universe(&self) -> &[usize] {
        &self.inner.universe
    }
    fn step(&self, (sums, total): &Self::State, g: usize) -> Option<Self::State> {
        let next = self.inner.advance(sums, g)?;
        let total = total.map_or(g, |t| self.inner.table.add(t as usize, g));
        Some((next, Some(total as u32)))
    }
    fn terminal(&self, (_, total): &Self::State) -> Option<u32> {
        // ord(-σ) = ord(σ)
        total.map(|t| self.inner.table.weight(t as usize))
    }
    fn gain(&self, g: usize, rest: u32) -> u32 {
        rest + self.inner.table.weight(g)
    }
    fn canonical(&self, (sums, total): &Self::State) -> Self::State {
        let mut best = (sums.clone(), *total);
        for perm in &self.inner.table.automorphisms {
            let image = (perm.apply(sums), total.map(|t| perm.map[t as usize]));
            if image < best {
                best = image;
            }
        }
        best
    }
}
