//! Ordered, labeled finite sets and the matching algebra used by composition.
//!
//! An interface is a sequence of `(id, label)` entries; the sequence order is
//! the interface order. The *degree* of an entry is its 1-based rank among
//! the entries carrying the same label, and two entries of different
//! interfaces are matching partners when label and degree agree.

use std::collections::HashMap;
use std::hash::Hash;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::label::Label;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InterfaceError {
    #[error("element {0} is not a member of the interface")]
    NotAMember(String),
    #[error("element {0} occurs twice in the interface")]
    DuplicateEntry(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InterfaceView<Id> {
    entries: Vec<(Id, Label)>,
}

impl<Id> Default for InterfaceView<Id> {
    fn default() -> Self {
        InterfaceView { entries: Vec::new() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchPair<Id> {
    pub left_element: Id,
    pub right_element: Id,
    pub shared_label: Label,
    pub shared_degree: usize,
}

impl<Id: Clone + Eq + Hash + std::fmt::Debug> InterfaceView<Id> {
    pub fn new(entries: Vec<(Id, Label)>) -> Result<Self, InterfaceError> {
        let mut seen = std::collections::HashSet::new();
        for (id, _) in &entries {
            if !seen.insert(id.clone()) {
                return Err(InterfaceError::DuplicateEntry(format!("{id:?}")));
            }
        }
        Ok(InterfaceView { entries })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn entries(&self) -> &[(Id, Label)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = &Id> + '_ {
        self.entries.iter().map(|(id, _)| id)
    }

    pub fn position(&self, id: &Id) -> Option<usize> {
        self.entries.iter().position(|(x, _)| x == id)
    }

    pub fn contains(&self, id: &Id) -> bool {
        self.position(id).is_some()
    }

    /// 1-based rank of `id` among the equally labeled entries.
    pub fn degree(&self, id: &Id) -> Result<usize, InterfaceError> {
        let pos = self
            .position(id)
            .ok_or_else(|| InterfaceError::NotAMember(format!("{id:?}")))?;
        let label = &self.entries[pos].1;
        Ok(1 + self.entries[..pos].iter().filter(|(_, l)| l == label).count())
    }

    /// Degrees of all entries, in interface order.
    pub fn degrees(&self) -> Vec<usize> {
        let mut counts: HashMap<&Label, usize> = HashMap::new();
        self.entries
            .iter()
            .map(|(_, l)| {
                let c = counts.entry(l).or_insert(0);
                *c += 1;
                *c
            })
            .collect()
    }
}

/// All matching partners of `a` and `b`, ordered by the position of the
/// first component in `a`.
pub fn matches<Id>(a: &InterfaceView<Id>, b: &InterfaceView<Id>) -> Vec<MatchPair<Id>>
where
    Id: Clone + Eq + Hash + std::fmt::Debug,
{
    let mut index: HashMap<(&Label, usize), &Id> = HashMap::new();
    for ((id, label), deg) in b.entries.iter().zip(b.degrees()) {
        index.insert((label, deg), id);
    }
    a.entries
        .iter()
        .zip(a.degrees())
        .filter_map(|((id, label), deg)| {
            index.get(&(label, deg)).map(|partner| MatchPair {
                left_element: id.clone(),
                right_element: (*partner).clone(),
                shared_label: label.clone(),
                shared_degree: deg,
            })
        })
        .collect()
}

/// The entries of `a` without a matching partner in `b`, in `a`'s order.
pub fn matchfree<Id>(a: &InterfaceView<Id>, b: &InterfaceView<Id>) -> InterfaceView<Id>
where
    Id: Clone + Eq + Hash + std::fmt::Debug,
{
    let mut available: HashMap<&Label, usize> = HashMap::new();
    for (_, label) in &b.entries {
        *available.entry(label).or_insert(0) += 1;
    }
    let entries = a
        .entries
        .iter()
        .zip(a.degrees())
        .filter(|((_, label), deg)| available.get(label).copied().unwrap_or(0) < *deg)
        .map(|(e, _)| e.clone())
        .collect();
    InterfaceView { entries }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn iface(entries: &[(&'static str, &str)]) -> InterfaceView<&'static str> {
        InterfaceView::new(entries.iter().map(|(id, l)| (*id, Label::place(*l))).collect()).unwrap()
    }

    fn example_a() -> InterfaceView<&'static str> {
        iface(&[("a", "ready"), ("b", "aide busy"), ("c", "aide free"), ("d", "aide busy")])
    }

    fn example_b() -> InterfaceView<&'static str> {
        iface(&[("e", "shelf empty"), ("f", "aide busy"), ("g", "aide free"), ("h", "aide busy")])
    }

    #[test]
    fn degrees_of_worked_example() {
        let a = example_a();
        assert_eq!(a.degree(&"d").unwrap(), 2);
        for x in ["a", "b", "c"] {
            assert_eq!(a.degree(&x).unwrap(), 1);
        }
        let b = example_b();
        assert_eq!(b.degree(&"h").unwrap(), 2);
        assert_eq!(b.degrees(), vec![1, 1, 1, 2]);
    }

    #[test]
    fn degree_of_non_member() {
        assert!(matches!(example_a().degree(&"z"), Err(InterfaceError::NotAMember(_))));
        let single = iface(&[("x", "L")]);
        assert_eq!(single.degree(&"x").unwrap(), 1);
    }

    #[test]
    fn matches_of_worked_example() {
        let pairs: Vec<_> = matches(&example_a(), &example_b())
            .into_iter()
            .map(|p| (p.left_element, p.right_element, p.shared_degree))
            .collect();
        assert_eq!(pairs, vec![("b", "f", 1), ("c", "g", 1), ("d", "h", 2)]);
        assert!(matches(&example_a(), &InterfaceView::empty()).is_empty());
    }

    #[test]
    fn matchfree_of_worked_example() {
        let a = example_a();
        let b = example_b();
        assert_eq!(matchfree(&a, &b).ids().copied().collect::<Vec<_>>(), vec!["a"]);
        assert_eq!(matchfree(&b, &a).ids().copied().collect::<Vec<_>>(), vec!["e"]);
        assert!(matchfree(&a, &a).is_empty());
        assert!(matchfree(&InterfaceView::empty(), &b).is_empty());
    }

    #[test]
    fn higher_degree_left_unmatched() {
        let a = iface(&[("x", "L"), ("y", "L")]);
        let b = iface(&[("z", "L")]);
        let pairs = matches(&a, &b);
        assert_eq!(pairs.len(), 1);
        assert_eq!((pairs[0].left_element, pairs[0].right_element), ("x", "z"));
        assert_eq!(matchfree(&a, &b).ids().copied().collect::<Vec<_>>(), vec!["y"]);
    }

    #[test]
    fn duplicate_ids_rejected() {
        let r = InterfaceView::new(vec![("x", Label::place("a")), ("x", Label::place("b"))]);
        assert!(matches!(r, Err(InterfaceError::DuplicateEntry(_))));
    }

    fn arb_interface(tag: u32) -> impl Strategy<Value = InterfaceView<u32>> {
        prop::collection::vec(0..3u8, 0..7).prop_map(move |labels| {
            InterfaceView::new(
                labels
                    .into_iter()
                    .enumerate()
                    .map(|(i, l)| (tag * 100 + i as u32, Label::place(format!("l{l}"))))
                    .collect(),
            )
            .unwrap()
        })
    }

    /// Pairing under the "count strictly smaller" reading of degree.
    fn zero_based_pairs(a: &InterfaceView<u32>, b: &InterfaceView<u32>) -> Vec<(u32, u32)> {
        let deg0 = |v: &InterfaceView<u32>, i: usize| {
            v.entries()[..i].iter().filter(|(_, l)| *l == v.entries()[i].1).count()
        };
        let mut out = Vec::new();
        for i in 0..a.len() {
            for j in 0..b.len() {
                if a.entries()[i].1 == b.entries()[j].1 && deg0(a, i) == deg0(b, j) {
                    out.push((a.entries()[i].0, b.entries()[j].0));
                }
            }
        }
        out
    }

    proptest! {
        #[test]
        fn partition_and_partial_bijection(a in arb_interface(1), b in arb_interface(2)) {
            let pairs = matches(&a, &b);
            let free = matchfree(&a, &b);
            let mut lefts: Vec<u32> = pairs.iter().map(|p| p.left_element).collect();
            let rights: std::collections::HashSet<u32> = pairs.iter().map(|p| p.right_element).collect();
            prop_assert_eq!(rights.len(), pairs.len());
            lefts.extend(free.ids().copied());
            lefts.sort();
            let mut all: Vec<u32> = a.ids().copied().collect();
            all.sort();
            prop_assert_eq!(lefts, all);
            for p in &pairs {
                prop_assert_eq!(a.degree(&p.left_element).unwrap(), p.shared_degree);
                prop_assert_eq!(b.degree(&p.right_element).unwrap(), p.shared_degree);
            }
        }

        #[test]
        fn degree_convention_independent(a in arb_interface(1), b in arb_interface(2)) {
            let ours: Vec<(u32, u32)> = matches(&a, &b).iter().map(|p| (p.left_element, p.right_element)).collect();
            prop_assert_eq!(ours, zero_based_pairs(&a, &b));
        }

        #[test]
        fn matchfree_is_ordered_subsequence(a in arb_interface(1), b in arb_interface(2)) {
            let free = matchfree(&a, &b);
            let positions: Vec<usize> = free.ids().map(|id| a.position(id).unwrap()).collect();
            prop_assert!(positions.windows(2).all(|w| w[0] < w[1]));
            for (id, l) in free.entries() {
                prop_assert_eq!(&a.entries()[a.position(id).unwrap()].1, l);
            }
        }
    }
}
