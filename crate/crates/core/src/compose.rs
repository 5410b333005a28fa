//! The composition operator `M ∘ N`.
//!
//! Elements of `right(M)` and `left(N)` that are matching partners are fused
//! into one interior element inheriting the arcs of both. Everything else is
//! carried over; unmatched interface elements stay on their side, with the
//! outer module's interface ordered first.

use std::collections::{BTreeSet, HashMap, HashSet};

use thiserror::Error;

use crate::interface::{matches, matchfree};
use crate::module::{Element, ElementIdx, NetModule, Side, Violation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ComposeError {
    #[error("invalid operand ({position} of composition): {}", .violations.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    InvalidOperand { position: Operand, violations: Vec<Violation> },
    #[error("ambiguous interface overlap: matched element {id} of the {position} operand also lies in its {side} interface")]
    AmbiguousInterfaceOverlap { position: Operand, id: String, side: Side },
    #[error("compose_all needs at least one module")]
    EmptySequence,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Operand {
    First,
    Second,
}

impl std::fmt::Display for Operand {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Operand::First => "first",
            Operand::Second => "second",
        })
    }
}

/// A composed module together with where each operand element ended up.
#[derive(Debug, Clone)]
pub struct Composition {
    pub module: NetModule,
    /// `first[i]` is the result index of element `i` of the first operand.
    pub first: Vec<ElementIdx>,
    pub second: Vec<ElementIdx>,
    /// Fused elements as `(first operand idx, second operand idx, result idx)`.
    pub fused: Vec<(ElementIdx, ElementIdx, ElementIdx)>,
}

impl Composition {
    /// Result indices that are fused elements.
    pub fn fused_indices(&self) -> HashSet<ElementIdx> {
        self.fused.iter().map(|f| f.2).collect()
    }
}

pub fn compose(m: &NetModule, n: &NetModule) -> Result<NetModule, ComposeError> {
    compose_traced(m, n).map(|c| c.module)
}

pub fn compose_traced(m: &NetModule, n: &NetModule) -> Result<Composition, ComposeError> {
    m.validate()
        .map_err(|violations| ComposeError::InvalidOperand { position: Operand::First, violations })?;
    n.validate()
        .map_err(|violations| ComposeError::InvalidOperand { position: Operand::Second, violations })?;

    let m_right = m.right_view();
    let n_left = n.left_view();
    let pairs = matches(&m_right, &n_left);

    for p in &pairs {
        if m.in_left(p.left_element) {
            return Err(ComposeError::AmbiguousInterfaceOverlap {
                position: Operand::First,
                id: m.element(p.left_element).id.clone(),
                side: Side::Left,
            });
        }
        if n.in_right(p.right_element) {
            return Err(ComposeError::AmbiguousInterfaceOverlap {
                position: Operand::Second,
                id: n.element(p.right_element).id.clone(),
                side: Side::Right,
            });
        }
    }

    let partner_of_m: HashMap<ElementIdx, ElementIdx> =
        pairs.iter().map(|p| (p.left_element, p.right_element)).collect();
    let partner_of_n: HashMap<ElementIdx, ElementIdx> =
        pairs.iter().map(|p| (p.right_element, p.left_element)).collect();

    let mut names = NameAllocator::default();
    let mut elements = Vec::with_capacity(m.len() + n.len() - pairs.len());
    let mut first = Vec::with_capacity(m.len());
    let mut fused = Vec::with_capacity(pairs.len());
    for (i, e) in m.elements().iter().enumerate() {
        let idx = elements.len();
        first.push(idx);
        match partner_of_m.get(&i) {
            Some(&j) => {
                let id = names.fresh(&format!("{}_{}", e.id, n.element(j).id));
                elements.push(Element { id, kind: e.kind, label: e.label.clone() });
                fused.push((i, j, idx));
            }
            None => elements.push(Element { id: names.fresh(&e.id), ..e.clone() }),
        }
    }
    let mut second = Vec::with_capacity(n.len());
    for (j, e) in n.elements().iter().enumerate() {
        match partner_of_n.get(&j) {
            Some(&i) => second.push(first[i]),
            None => {
                second.push(elements.len());
                elements.push(Element { id: names.fresh(&e.id), ..e.clone() });
            }
        }
    }

    let arcs: BTreeSet<(ElementIdx, ElementIdx)> = m
        .arcs()
        .iter()
        .map(|&(x, y)| (first[x], first[y]))
        .chain(n.arcs().iter().map(|&(x, y)| (second[x], second[y])))
        .collect();

    let left: Vec<ElementIdx> = m
        .left()
        .iter()
        .map(|&i| first[i])
        .chain(matchfree(&n_left, &m_right).ids().map(|&j| second[j]))
        .collect();
    let right: Vec<ElementIdx> = n
        .right()
        .iter()
        .map(|&j| second[j])
        .chain(matchfree(&m_right, &n_left).ids().map(|&i| first[i]))
        .collect();

    Ok(Composition {
        module: NetModule::from_parts(elements, arcs.into_iter().collect(), left, right),
        first,
        second,
        fused,
    })
}

/// Left fold of [`compose`].
pub fn compose_all<'a>(ms: impl IntoIterator<Item = &'a NetModule>) -> Result<NetModule, ComposeError> {
    let mut it = ms.into_iter();
    let head = it.next().ok_or(ComposeError::EmptySequence)?;
    head.validate()
        .map_err(|violations| ComposeError::InvalidOperand { position: Operand::First, violations })?;
    it.try_fold(head.clone(), |acc, m| compose(&acc, m))
}

#[derive(Default)]
struct NameAllocator {
    used: HashSet<String>,
}

impl NameAllocator {
    fn fresh(&mut self, base: &str) -> String {
        if self.used.insert(base.to_owned()) {
            return base.to_owned();
        }
        let mut k = 2;
        loop {
            let candidate = format!("{base}_{k}");
            if self.used.insert(candidate.clone()) {
                return candidate;
            }
            k += 1;
        }
    }
}
