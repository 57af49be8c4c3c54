//! Subsum sets of sequences.

use smallvec::{smallvec, SmallVec};

use super::table::GroupTable;
use crate::group::{ElementSequence, GroupElement, GroupSpec};

/// Fixed-width bitset over element indices; inline up to 128 elements.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) struct BitSet {
    words: SmallVec<[u64; 2]>,
}

impl BitSet {
    pub fn new(size: usize) -> Self {
        BitSet {
            words: smallvec![0; size.div_ceil(64).max(1)],
        }
    }

    #[inline]
    pub fn contains(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    #[inline]
    pub fn insert(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn words_mut(&mut self) -> &mut [u64] {
        &mut self.words
    }

    #[cfg(test)]
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(k, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(k * 64 + b)
            })
        })
    }

    /// `self ∪ (self + g)`.
    pub fn extended_by(&self, table: &GroupTable, g: usize) -> BitSet {
        let mut out = self.clone();
        table.translations[g].apply_into(&self.words, &mut out.words);
        out
    }
}

/// Subsums of a sequence, with optional minimal subsequence lengths.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SumsetState {
    group: GroupSpec,
    /// `members[i]` is true iff element `i` is a nonempty subsum.
    members: Vec<bool>,
    /// Smallest length of a nonempty subsequence summing to each element;
    /// `None` for elements outside the sumset.
    min_length: Vec<Option<u32>>,
}

impl SumsetState {
    pub fn contains(&self, g: &GroupElement) -> bool {
        self.members[self.group.index_of(g)]
    }

    pub fn min_length(&self, g: &GroupElement) -> Option<u32> {
        self.min_length[self.group.index_of(g)]
    }

    pub fn is_zero_sumfree(&self) -> bool {
        !self.members[0]
    }

    /// Members in index order.
    pub fn elements(&self) -> Vec<GroupElement> {
        self.members
            .iter()
            .enumerate()
            .filter(|(_, &m)| m)
            .map(|(i, _)| self.group.element_at(i))
            .collect()
    }

    pub fn len(&self) -> usize {
        self.members.iter().filter(|&&m| m).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// `Σ(S)` by the incremental rule `new = old ∪ (old + g) ∪ {g}`, tracking the
/// minimal length of a subsequence reaching each subsum.
pub fn sumset(seq: &ElementSequence) -> SumsetState {
    let group = seq.group().clone();
    let size = group.order() as usize;
    let mut min_length: Vec<Option<u32>> = vec![None; size];
    for g in seq.elements() {
        let gi = group.index_of(g);
        let mut next = min_length.clone();
        for (s, len) in min_length.iter().enumerate() {
            if let Some(len) = len {
                let t = group.index_of(&group.add(&group.element_at(s), g));
                next[t] = Some(next[t].map_or(len + 1, |v| v.min(len + 1)));
            }
        }
        next[gi] = Some(1);
        min_length = next;
    }
    SumsetState {
        members: min_length.iter().map(Option::is_some).collect(),
        min_length,
        group,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::parse_group_spec;

    fn seq(group: &str, elems: &[&[i64]]) -> ElementSequence {
        let g = parse_group_spec(group).unwrap();
        let es = elems.iter().map(|c| g.element(c).unwrap()).collect();
        ElementSequence::new(&g, es).unwrap()
    }

    fn members(s: &SumsetState) -> Vec<u64> {
        s.elements().iter().map(|e| e.coords()[0]).collect()
    }

    #[test]
    fn examples() {
        let s = sumset(&seq("5", &[&[3]]));
        assert_eq!(members(&s), vec![3]);

        let s = sumset(&seq("3", &[&[1], &[1]]));
        assert_eq!(members(&s), vec![1, 2]);
        assert!(s.is_zero_sumfree());

        let s = sumset(&seq("4", &[&[1], &[2]]));
        assert_eq!(members(&s), vec![1, 2, 3]);
        let g = parse_group_spec("4").unwrap();
        assert_eq!(s.min_length(&g.element(&[3]).unwrap()), Some(2));
        assert_eq!(s.min_length(&g.element(&[0]).unwrap()), None);
    }

    #[test]
    fn detects_zero_sums() {
        let s = sumset(&seq("2,2", &[&[1, 0], &[0, 1], &[1, 1]]));
        assert!(!s.is_zero_sumfree());
        let g = parse_group_spec("2,2").unwrap();
        assert_eq!(s.min_length(&g.zero()), Some(3));
    }

    #[test]
    fn empty_sequence_has_empty_sumset() {
        let g = parse_group_spec("6").unwrap();
        let s = sumset(&ElementSequence::new(&g, vec![]).unwrap());
        assert!(s.is_empty());
        assert!(s.is_zero_sumfree());
    }

    #[test]
    fn bitset_basics() {
        let mut b = BitSet::new(70);
        b.insert(0);
        b.insert(65);
        assert!(b.contains(65) && !b.contains(64));
        assert_eq!(b.iter().collect::<Vec<_>>(), vec![0, 65]);
    }
}
