//! Sorted-array set primitives.
//!
//! Relation sets and entity lists are kept as sorted, duplicate-free vectors so
//! that intersections run in linear time and iteration order is stable.

use std::borrow::Borrow;
use std::cmp::Ordering;
use std::fmt;

use crate::kg::RelationId;

/// Sorted, duplicate-free set of relation ids.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct RelationSet(Vec<RelationId>);

impl RelationSet {
    pub fn new() -> Self {
        RelationSet(Vec::new())
    }

    /// Wraps a vector that is already sorted and free of duplicates.
    pub(crate) fn from_sorted_unchecked(v: Vec<RelationId>) -> Self {
        debug_assert!(v.windows(2).all(|w| w[0] < w[1]));
        RelationSet(v)
    }

    pub fn singleton(r: RelationId) -> Self {
        RelationSet(vec![r])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[RelationId] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = RelationId> + '_ {
        self.0.iter().copied()
    }

    pub fn contains(&self, r: RelationId) -> bool {
        self.0.binary_search(&r).is_ok()
    }

    pub fn is_subset_of(&self, other: &RelationSet) -> bool {
        is_sorted_subset(&self.0, &other.0)
    }

    pub fn intersection(&self, other: &RelationSet) -> RelationSet {
        RelationSet(intersect_sorted(&self.0, &other.0))
    }

    pub fn intersection_len(&self, other: &RelationSet) -> usize {
        intersection_count(&self.0, &other.0)
    }

    pub fn union_len(&self, other: &RelationSet) -> usize {
        self.len() + other.len() - self.intersection_len(other)
    }

    /// Copy of the set with `r` inserted.
    pub fn with(&self, r: RelationId) -> RelationSet {
        match self.0.binary_search(&r) {
            Ok(_) => self.clone(),
            Err(pos) => {
                let mut v = self.0.clone();
                v.insert(pos, r);
                RelationSet(v)
            }
        }
    }

    /// Copy of the set with `r` removed.
    pub fn without(&self, r: RelationId) -> RelationSet {
        RelationSet(self.0.iter().copied().filter(|&x| x != r).collect())
    }

    pub fn into_vec(self) -> Vec<RelationId> {
        self.0
    }

    /// Canonical family order: larger sets first, then lexicographic by id.
    pub fn canonical_cmp(&self, other: &RelationSet) -> Ordering {
        other
            .len()
            .cmp(&self.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl Borrow<[RelationId]> for RelationSet {
    fn borrow(&self) -> &[RelationId] {
        &self.0
    }
}

impl FromIterator<RelationId> for RelationSet {
    fn from_iter<I: IntoIterator<Item = RelationId>>(iter: I) -> Self {
        let mut v: Vec<RelationId> = iter.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        RelationSet(v)
    }
}

impl fmt::Debug for RelationSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.0.iter().map(|r| r.0)).finish()
    }
}

pub fn is_sorted_subset<T: Ord>(small: &[T], big: &[T]) -> bool {
    if small.len() > big.len() {
        return false;
    }
    let mut j = 0;
    for x in small {
        loop {
            if j == big.len() {
                return false;
            }
            match big[j].cmp(x) {
                Ordering::Less => j += 1,
                Ordering::Equal => {
                    j += 1;
                    break;
                }
                Ordering::Greater => return false,
            }
        }
    }
    true
}

pub fn intersect_sorted<T: Ord + Copy>(a: &[T], b: &[T]) -> Vec<T> {
    let mut out = Vec::with_capacity(a.len().min(b.len()));
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            Ordering::Less => i += 1,
            Ordering::Greater => j += 1,
            Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

pub fn intersection_count<T: Ord>(a: &[T], b: &[T]) -> usize {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            Ordering::Less => i += 1,
            Ordering::Greater => j += 1,
            Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

/// Size of the intersection of several sorted lists.
///
/// Lists are intersected shortest-first so the running result shrinks as
/// fast as possible.
pub fn multi_intersection_count<T: Ord + Copy>(lists: &mut [&[T]]) -> usize {
    match lists.len() {
        0 => return 0,
        1 => return lists[0].len(),
        2 => return intersection_count(lists[0], lists[1]),
        _ => {}
    }
    lists.sort_unstable_by_key(|l| l.len());
    let mut acc = intersect_sorted(lists[0], lists[1]);
    for l in &lists[2..lists.len() - 1] {
        if acc.is_empty() {
            return 0;
        }
        acc = intersect_sorted(&acc, l);
    }
    intersection_count(&acc, lists[lists.len() - 1])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rs(ids: &[u32]) -> RelationSet {
        ids.iter().map(|&i| RelationId(i)).collect()
    }

    #[test]
    fn from_iter_sorts_and_dedups() {
        assert_eq!(rs(&[3, 1, 3, 2]).as_slice(), rs(&[1, 2, 3]).as_slice());
    }

    #[test]
    fn subset_and_intersection() {
        assert!(rs(&[1, 3]).is_subset_of(&rs(&[1, 2, 3])));
        assert!(!rs(&[1, 4]).is_subset_of(&rs(&[1, 2, 3])));
        assert!(rs(&[]).is_subset_of(&rs(&[])));
        assert_eq!(rs(&[1, 2, 5]).intersection(&rs(&[2, 5, 7])), rs(&[2, 5]));
        assert_eq!(rs(&[1, 2]).union_len(&rs(&[2, 3])), 3);
    }

    #[test]
    fn canonical_order_prefers_larger_sets() {
        let mut v = vec![rs(&[2]), rs(&[1, 2]), rs(&[1]), rs(&[0, 3])];
        v.sort_by(|a, b| a.canonical_cmp(b));
        assert_eq!(v, vec![rs(&[0, 3]), rs(&[1, 2]), rs(&[1]), rs(&[2])]);
    }

    #[test]
    fn multi_intersection() {
        let a = [1, 2, 3, 4, 5];
        let b = [2, 4, 5];
        let c = [0, 4, 5, 9];
        assert_eq!(
            multi_intersection_count::<i32>(&mut [&a[..], &b[..], &c[..]]),
            2
        );
        assert_eq!(multi_intersection_count::<i32>(&mut [&a[..]]), 5);
        assert_eq!(multi_intersection_count::<i32>(&mut []), 0);
    }
}
