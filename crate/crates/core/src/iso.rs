//! Backtracking isomorphism search between net modules.
//!
//! A witness maps every element index of the first module to an element
//! index of the second, preserving kind, label, arcs, and the position of
//! each element in the left and right interfaces.

use std::collections::HashSet;

use crate::label::Kind;
use crate::module::{ElementIdx, NetModule};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct Anchor<'a> {
    kind: Kind,
    label: &'a str,
    left: Option<usize>,
    right: Option<usize>,
    indeg: usize,
    outdeg: usize,
}

fn anchors<'a>(m: &'a NetModule, arcs: &HashSet<(usize, usize)>) -> Vec<Anchor<'a>> {
    let n = m.len();
    let mut indeg = vec![0; n];
    let mut outdeg = vec![0; n];
    for &(x, y) in arcs {
        outdeg[x] += 1;
        indeg[y] += 1;
    }
    (0..n)
        .map(|i| Anchor {
            kind: m.element(i).kind,
            label: m.element(i).label.name(),
            left: m.left().iter().position(|&x| x == i),
            right: m.right().iter().position(|&x| x == i),
            indeg: indeg[i],
            outdeg: outdeg[i],
        })
        .collect()
}

pub fn is_isomorphic(m: &NetModule, n: &NetModule) -> bool {
    isomorphism(m, n).is_some()
}

/// Returns a witness bijection `m -> n` if one exists.
pub fn isomorphism(m: &NetModule, n: &NetModule) -> Option<Vec<ElementIdx>> {
    if m.len() != n.len() || m.left().len() != n.left().len() || m.right().len() != n.right().len() {
        return None;
    }
    let arcs_m: HashSet<_> = m.arcs().iter().copied().collect();
    let arcs_n: HashSet<_> = n.arcs().iter().copied().collect();
    if arcs_m.len() != arcs_n.len() {
        return None;
    }
    let am = anchors(m, &arcs_m);
    let an = anchors(n, &arcs_n);
    let mut sm = am.clone();
    let mut sn = an.clone();
    sm.sort();
    sn.sort();
    if sm != sn {
        return None;
    }

    let size = m.len();
    let candidates: Vec<Vec<usize>> =
        (0..size).map(|i| (0..size).filter(|&j| am[i] == an[j]).collect()).collect();

    // Visit the most constrained elements first, then grow along arcs.
    let mut order: Vec<usize> = Vec::with_capacity(size);
    let mut placed = vec![false; size];
    let mut adj = vec![Vec::new(); size];
    for &(x, y) in &arcs_m {
        adj[x].push(y);
        adj[y].push(x);
    }
    while order.len() < size {
        let next = (0..size)
            .filter(|&i| !placed[i])
            .min_by_key(|&i| {
                let linked = adj[i].iter().filter(|&&j| placed[j]).count();
                (std::cmp::Reverse(linked), candidates[i].len(), i)
            })
            .expect("unplaced element exists");
        placed[next] = true;
        order.push(next);
    }

    let mut map = vec![usize::MAX; size];
    let mut used = vec![false; size];
    if extend(0, &order, &candidates, &arcs_m, &arcs_n, &mut map, &mut used) {
        Some(map)
    } else {
        None
    }
}

fn extend(
    depth: usize,
    order: &[usize],
    candidates: &[Vec<usize>],
    arcs_m: &HashSet<(usize, usize)>,
    arcs_n: &HashSet<(usize, usize)>,
    map: &mut [usize],
    used: &mut [bool],
) -> bool {
    let Some(&u) = order.get(depth) else {
        return true;
    };
    for &v in &candidates[u] {
        if used[v] {
            continue;
        }
        let consistent = order[..depth].iter().all(|&w| {
            let wv = map[w];
            arcs_m.contains(&(u, w)) == arcs_n.contains(&(v, wv))
                && arcs_m.contains(&(w, u)) == arcs_n.contains(&(wv, v))
        }) && arcs_m.contains(&(u, u)) == arcs_n.contains(&(v, v));
        if !consistent {
            continue;
        }
        map[u] = v;
        used[v] = true;
        if extend(depth + 1, order, candidates, arcs_m, arcs_n, map, used) {
            return true;
        }
        used[v] = false;
        map[u] = usize::MAX;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::module::ModuleBuilder;

    fn chain() -> NetModule {
        ModuleBuilder::new()
            .place("a", "x")
            .transition("t", "go")
            .place("b", "x")
            .path(["a", "t", "b"])
            .left(["a"])
            .right(["b"])
            .build()
            .unwrap()
    }

    #[test]
    fn renamed_copy_is_isomorphic() {
        let m = chain();
        let r = m.renamed(|id| format!("z{id}")).permuted(&[2, 0, 1]);
        let w = isomorphism(&m, &r).unwrap();
        assert_eq!(w, vec![2, 0, 1]);
    }

    #[test]
    fn label_mismatch() {
        let a = ModuleBuilder::new().place("p", "ready").build().unwrap();
        let b = ModuleBuilder::new().place("p", "shelf empty").build().unwrap();
        assert!(!is_isomorphic(&a, &b));
    }

    #[test]
    fn interface_positions_matter() {
        let a = ModuleBuilder::new().place("p", "x").place("q", "y").left(["p", "q"]).build().unwrap();
        let b = ModuleBuilder::new().place("p", "x").place("q", "y").left(["q", "p"]).build().unwrap();
        assert!(!is_isomorphic(&a, &b));
        let c = ModuleBuilder::new().place("p", "x").place("q", "y").right(["p", "q"]).build().unwrap();
        assert!(!is_isomorphic(&a, &c));
    }

    #[test]
    fn arc_direction_matters() {
        let m = chain();
        let flipped = ModuleBuilder::new()
            .place("a", "x")
            .transition("t", "go")
            .place("b", "x")
            .path(["b", "t", "a"])
            .left(["a"])
            .right(["b"])
            .build()
            .unwrap();
        assert!(!is_isomorphic(&m, &flipped));
    }

    #[test]
    fn empty_modules() {
        assert_eq!(isomorphism(&NetModule::empty(), &NetModule::empty()), Some(vec![]));
    }
}
