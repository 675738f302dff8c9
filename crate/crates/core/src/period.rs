//! Bitsets over the database's dense period indices.

use std::fmt;

use fixedbitset::FixedBitSet;

/// A set of periods, one bit per dense period index.
///
/// Period ids from input files are mapped to dense indices by
/// [`Database`](crate::Database); use [`Database::period_id`](crate::Database::period_id)
/// to translate back.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct PeriodSet {
    bits: FixedBitSet,
}

impl PeriodSet {
    pub fn empty(universe: usize) -> Self {
        PeriodSet { bits: FixedBitSet::with_capacity(universe) }
    }

    pub fn full(universe: usize) -> Self {
        let mut bits = FixedBitSet::with_capacity(universe);
        bits.insert_range(..);
        PeriodSet { bits }
    }

    pub fn from_indices(universe: usize, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut set = PeriodSet::empty(universe);
        for idx in indices {
            set.insert(idx);
        }
        set
    }

    pub fn universe(&self) -> usize {
        self.bits.len()
    }

    pub fn insert(&mut self, idx: usize) {
        if idx >= self.bits.len() {
            self.bits.grow(idx + 1);
        }
        self.bits.insert(idx);
    }

    pub fn contains(&self, idx: usize) -> bool {
        self.bits.contains(idx)
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_clear()
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones(..)
    }

    pub fn intersection(&self, other: &PeriodSet) -> PeriodSet {
        let mut bits = self.bits.clone();
        if bits.len() < other.bits.len() {
            bits.grow(other.bits.len());
        }
        bits.intersect_with(&other.bits);
        PeriodSet { bits }
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.ones()
    }
}

impl fmt::Debug for PeriodSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    #[test]
    fn grows_past_word_width() {
        let mut set = PeriodSet::empty(3);
        set.insert(200);
        assert!(set.contains(200));
        assert!(!set.contains(2));
        assert_eq!(set.len(), 1);
    }

    #[test]
    fn full_covers_universe() {
        let set = PeriodSet::full(70);
        assert_eq!(set.len(), 70);
        assert!(set.contains(69));
    }

    proptest! {
        #[test]
        fn intersection_is_bitwise_and(
            a in prop::collection::btree_set(0usize..150, 0..40),
            b in prop::collection::btree_set(0usize..150, 0..40),
        ) {
            let sa = PeriodSet::from_indices(10, a.iter().copied());
            let sb = PeriodSet::from_indices(140, b.iter().copied());
            let got: BTreeSet<usize> = sa.intersection(&sb).iter().collect();
            let want: BTreeSet<usize> = a.intersection(&b).copied().collect();
            prop_assert_eq!(got, want);
        }
    }
}
