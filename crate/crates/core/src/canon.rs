//! Canonical byte encodings of net modules.
//!
//! Interface positions and labels give the initial coloring; colors are
//! refined by the multisets of neighbor colors until stable. Remaining ties
//! are broken by individualizing each member of the first non-trivial cell
//! in turn, and the lexicographically smallest leaf encoding wins.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::label::Kind;
use crate::module::{NetModule, Violation};

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CanonicalForm(Vec<u8>);

impl CanonicalForm {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    /// Short hex digest for display (not collision-free, display only).
    pub fn short(&self) -> String {
        // FNV-1a, 64 bit
        let mut h: u64 = 0xcbf29ce484222325;
        for &b in &self.0 {
            h ^= b as u64;
            h = h.wrapping_mul(0x100000001b3);
        }
        format!("{h:016x}")
    }
}

impl fmt::Debug for CanonicalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CanonicalForm({}, {} bytes)", self.short(), self.0.len())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CanonError {
    #[error("validation failed: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    ValidationFailed(Vec<Violation>),
}

struct Graph {
    n: usize,
    succ: Vec<Vec<usize>>,
    pred: Vec<Vec<usize>>,
}

pub fn canonical_form(m: &NetModule) -> Result<CanonicalForm, CanonError> {
    m.validate().map_err(CanonError::ValidationFailed)?;
    Ok(canonical_form_unchecked(m))
}

pub(crate) fn canonical_form_unchecked(m: &NetModule) -> CanonicalForm {
    let n = m.len();
    let mut succ = vec![Vec::new(); n];
    let mut pred = vec![Vec::new(); n];
    for &(x, y) in m.arcs() {
        succ[x].push(y);
        pred[y].push(x);
    }
    let g = Graph { n, succ, pred };

    let keys: Vec<(Kind, &str, Option<usize>, Option<usize>)> = (0..n)
        .map(|i| {
            let e = m.element(i);
            (
                e.kind,
                e.label.name(),
                m.left().iter().position(|&x| x == i),
                m.right().iter().position(|&x| x == i),
            )
        })
        .collect();
    let colors = rank(&keys);
    let mut best: Option<Vec<u8>> = None;
    search(&g, m, colors, &mut best);
    CanonicalForm(best.unwrap_or_else(|| encode(m, &[])))
}

fn rank<T: Ord + Clone>(keys: &[T]) -> Vec<u32> {
    let mut distinct: Vec<T> = keys.to_vec();
    distinct.sort();
    distinct.dedup();
    keys.iter().map(|k| distinct.binary_search(k).expect("key present") as u32).collect()
}

fn refine(g: &Graph, mut colors: Vec<u32>) -> Vec<u32> {
    let mut cells = count_cells(&colors);
    loop {
        let sigs: Vec<(u32, Vec<u32>, Vec<u32>)> = (0..g.n)
            .map(|v| {
                let mut out: Vec<u32> = g.succ[v].iter().map(|&w| colors[w]).collect();
                let mut inc: Vec<u32> = g.pred[v].iter().map(|&w| colors[w]).collect();
                out.sort_unstable();
                inc.sort_unstable();
                (colors[v], out, inc)
            })
            .collect();
        colors = rank(&sigs);
        let next = count_cells(&colors);
        if next == cells {
            return colors;
        }
        cells = next;
    }
}

fn count_cells(colors: &[u32]) -> usize {
    let mut c = colors.to_vec();
    c.sort_unstable();
    c.dedup();
    c.len()
}

fn search(g: &Graph, m: &NetModule, colors: Vec<u32>, best: &mut Option<Vec<u8>>) {
    let colors = refine(g, colors);
    if count_cells(&colors) == g.n {
        let enc = encode(m, &colors);
        if best.as_ref().is_none_or(|b| enc < *b) {
            *best = Some(enc);
        }
        return;
    }
    // First (smallest-colored) non-singleton cell.
    let mut sizes = vec![0usize; g.n];
    for &c in &colors {
        sizes[c as usize] += 1;
    }
    let target = (0..g.n as u32).find(|&c| sizes[c as usize] > 1).expect("non-discrete coloring");
    let members: Vec<usize> = (0..g.n).filter(|&v| colors[v] == target).collect();
    let mut tried_twins: Vec<usize> = Vec::new();
    for &v in &members {
        // Structural twins of an already tried member give the same leaves.
        if tried_twins.iter().any(|&w| are_twins(g, v, w)) {
            continue;
        }
        tried_twins.push(v);
        let keys: Vec<(u32, bool)> = (0..g.n).map(|w| (colors[w], w != v)).collect();
        search(g, m, rank(&keys), best);
    }
}

/// Same color cell assumed; twins have identical in- and out-neighborhoods,
/// so swapping them is an automorphism.
fn are_twins(g: &Graph, a: usize, b: usize) -> bool {
    let norm = |xs: &[usize]| {
        let mut v: Vec<usize> = xs.iter().copied().filter(|&x| x != a && x != b).collect();
        v.sort_unstable();
        v
    };
    let self_a = g.succ[a].contains(&a);
    let self_b = g.succ[b].contains(&b);
    let ab = g.succ[a].contains(&b);
    let ba = g.succ[b].contains(&a);
    self_a == self_b
        && ab == ba
        && norm(&g.succ[a]) == norm(&g.succ[b])
        && norm(&g.pred[a]) == norm(&g.pred[b])
}

fn put_u32(out: &mut Vec<u8>, x: u32) {
    out.extend_from_slice(&x.to_be_bytes());
}

/// `colors` must be a discrete coloring (a permutation) or empty for `[∅]`.
fn encode(m: &NetModule, colors: &[u32]) -> Vec<u8> {
    let n = m.len();
    let mut order = vec![0usize; n];
    for (v, &c) in colors.iter().enumerate() {
        order[c as usize] = v;
    }
    let mut out = Vec::with_capacity(16 + n * 12);
    out.extend_from_slice(b"NMC1");
    put_u32(&mut out, n as u32);
    for &v in &order {
        let e = m.element(v);
        out.push(match e.kind {
            Kind::Place => b'P',
            Kind::Transition => b'T',
        });
        put_u32(&mut out, e.label.name().len() as u32);
        out.extend_from_slice(e.label.name().as_bytes());
    }
    let mut arcs: Vec<(u32, u32)> = m.arcs().iter().map(|&(x, y)| (colors[x], colors[y])).collect();
    arcs.sort_unstable();
    arcs.dedup();
    put_u32(&mut out, arcs.len() as u32);
    for (x, y) in arcs {
        put_u32(&mut out, x);
        put_u32(&mut out, y);
    }
    for side in [m.left(), m.right()] {
        put_u32(&mut out, side.len() as u32);
        for &i in side {
            put_u32(&mut out, colors[i]);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::iso::is_isomorphic;
    use crate::module::{Element, ModuleBuilder};

    #[test]
    fn empty_module_constant() {
        let c = canonical_form(&NetModule::empty()).unwrap();
        let mut expected = b"NMC1".to_vec();
        expected.extend_from_slice(&[0; 16]);
        assert_eq!(c.as_bytes(), expected.as_slice());
    }

    #[test]
    fn invalid_module_rejected() {
        let m = NetModule::from_parts(vec![Element::place("p", "a"), Element::place("q", "a")], vec![(0, 1)], vec![], vec![]);
        assert!(canonical_form(&m).is_err());
    }

    #[test]
    fn renamed_and_permuted_copies_agree() {
        let m = ModuleBuilder::new()
            .place("a", "x")
            .place("b", "x")
            .place("c", "x")
            .transition("t", "go")
            .transition("u", "go")
            .path(["a", "t", "b", "u", "c"])
            .build()
            .unwrap();
        let r = m.renamed(|s| format!("{s}9")).permuted(&[4, 3, 2, 1, 0]);
        assert_eq!(canonical_form(&m).unwrap(), canonical_form(&r).unwrap());
    }

    #[test]
    fn symmetric_structures_are_distinguished() {
        // Two 2-cycles vs. one 4-cycle: equal local neighborhoods everywhere.
        let two = ModuleBuilder::new()
            .place("p1", "x")
            .transition("t1", "go")
            .place("p2", "x")
            .transition("t2", "go")
            .path(["p1", "t1", "p1"])
            .path(["p2", "t2", "p2"])
            .build()
            .unwrap();
        let four = ModuleBuilder::new()
            .place("p1", "x")
            .transition("t1", "go")
            .place("p2", "x")
            .transition("t2", "go")
            .path(["p1", "t1", "p2", "t2", "p1"])
            .build()
            .unwrap();
        assert!(!is_isomorphic(&two, &four));
        assert_ne!(canonical_form(&two).unwrap(), canonical_form(&four).unwrap());
    }

    #[test]
    fn many_isolated_twins_stay_cheap() {
        let mut b = ModuleBuilder::new();
        let ids: Vec<String> = (0..40).map(|i| format!("p{i}")).collect();
        for id in &ids {
            b = b.place(id, "same");
        }
        let m = b.build().unwrap();
        let c = canonical_form(&m).unwrap();
        assert_eq!(c, canonical_form(&m.permuted(&(0..40).rev().collect::<Vec<_>>())).unwrap());
    }
}
