//! Net modules: bipartite net graphs with ordered, labeled left and right
//! interfaces.
//!
//! Elements are stored in a vector and referred to by index. Each element
//! also carries a textual id that is unique within its module; ids only
//! matter for I/O, all cross-module comparison goes through isomorphism.

use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::interface::InterfaceView;
use crate::label::{Kind, Label};

pub type ElementIdx = usize;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Element {
    pub id: String,
    pub kind: Kind,
    pub label: Label,
}

impl Element {
    pub fn place(id: impl Into<String>, label: impl Into<String>) -> Self {
        Element { id: id.into(), kind: Kind::Place, label: Label::place(label) }
    }

    pub fn transition(id: impl Into<String>, label: impl Into<String>) -> Self {
        Element { id: id.into(), kind: Kind::Transition, label: Label::transition(label) }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetModule {
    elements: Vec<Element>,
    arcs: Vec<(ElementIdx, ElementIdx)>,
    left: Vec<ElementIdx>,
    right: Vec<ElementIdx>,
}

/// A broken structural rule. `rule()` gives the short rule name.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    Bipartiteness { source: String, target: String },
    DuplicateArc { source: String, target: String },
    DanglingArc { index: usize },
    DanglingInterfaceReference { side: Side, index: ElementIdx },
    DuplicateInterfaceEntry { side: Side, id: String },
    DuplicateElementId { id: String },
    InvalidElementId { id: String },
    LabelKindMismatch { id: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    Left,
    Right,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Left => "left",
            Side::Right => "right",
        })
    }
}

impl Violation {
    pub fn rule(&self) -> &'static str {
        match self {
            Violation::Bipartiteness { .. } => "bipartiteness",
            Violation::DuplicateArc { .. } => "duplicate arc",
            Violation::DanglingArc { .. } => "dangling arc endpoint",
            Violation::DanglingInterfaceReference { .. } => "dangling interface reference",
            Violation::DuplicateInterfaceEntry { .. } => "duplicate interface entry",
            Violation::DuplicateElementId { .. } => "duplicate element id",
            Violation::InvalidElementId { .. } => "invalid element id",
            Violation::LabelKindMismatch { .. } => "label kind mismatch",
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: ", self.rule())?;
        match self {
            Violation::Bipartiteness { source, target } => {
                write!(f, "arc {source} -> {target} connects two elements of the same kind")
            }
            Violation::DuplicateArc { source, target } => write!(f, "arc {source} -> {target} occurs twice"),
            Violation::DanglingArc { index } => write!(f, "arc #{index} references a non-member element"),
            Violation::DanglingInterfaceReference { side, index } => {
                write!(f, "{side} interface cites non-member element #{index}")
            }
            Violation::DuplicateInterfaceEntry { side, id } => write!(f, "{id} listed twice in {side} interface"),
            Violation::DuplicateElementId { id } => write!(f, "id {id} declared twice"),
            Violation::InvalidElementId { id } => write!(f, "id {id:?} is not of the form [A-Za-z0-9_]+"),
            Violation::LabelKindMismatch { id } => write!(f, "{id} carries a label of the other kind"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Warning {
    InterfaceOverlap { id: String },
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Warning::InterfaceOverlap { id } => write!(f, "interface overlap: {id} is in both interfaces"),
        }
    }
}

pub(crate) fn is_valid_id(id: &str) -> bool {
    !id.is_empty() && id.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'_')
}

impl NetModule {
    /// The empty module `[∅]`.
    pub fn empty() -> Self {
        Self::default()
    }

    /// Assembles a module without checking it; see [`NetModule::validate`].
    pub fn from_parts(
        elements: Vec<Element>,
        arcs: Vec<(ElementIdx, ElementIdx)>,
        left: Vec<ElementIdx>,
        right: Vec<ElementIdx>,
    ) -> Self {
        NetModule { elements, arcs, left, right }
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn element(&self, idx: ElementIdx) -> &Element {
        &self.elements[idx]
    }

    pub fn arcs(&self) -> &[(ElementIdx, ElementIdx)] {
        &self.arcs
    }

    pub fn left(&self) -> &[ElementIdx] {
        &self.left
    }

    pub fn right(&self) -> &[ElementIdx] {
        &self.right
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn index_of(&self, id: &str) -> Option<ElementIdx> {
        self.elements.iter().position(|e| e.id == id)
    }

    pub fn interface(&self, side: Side) -> &[ElementIdx] {
        match side {
            Side::Left => &self.left,
            Side::Right => &self.right,
        }
    }

    pub fn interface_view(&self, side: Side) -> InterfaceView<ElementIdx> {
        let entries = self
            .interface(side)
            .iter()
            .map(|&i| (i, self.elements[i].label.clone()))
            .collect();
        InterfaceView::new(entries).expect("interface entries are distinct")
    }

    pub fn left_view(&self) -> InterfaceView<ElementIdx> {
        self.interface_view(Side::Left)
    }

    pub fn right_view(&self) -> InterfaceView<ElementIdx> {
        self.interface_view(Side::Right)
    }

    pub fn in_left(&self, idx: ElementIdx) -> bool {
        self.left.contains(&idx)
    }

    pub fn in_right(&self, idx: ElementIdx) -> bool {
        self.right.contains(&idx)
    }

    /// Elements in neither interface, in storage order.
    pub fn interior(&self) -> Vec<ElementIdx> {
        (0..self.elements.len()).filter(|&i| !self.in_left(i) && !self.in_right(i)).collect()
    }

    pub fn places(&self) -> impl Iterator<Item = ElementIdx> + '_ {
        (0..self.elements.len()).filter(|&i| self.elements[i].kind == Kind::Place)
    }

    pub fn transitions(&self) -> impl Iterator<Item = ElementIdx> + '_ {
        (0..self.elements.len()).filter(|&i| self.elements[i].kind == Kind::Transition)
    }

    pub fn transition_count(&self) -> usize {
        self.transitions().count()
    }

    pub fn has_arc(&self, from: ElementIdx, to: ElementIdx) -> bool {
        self.arcs.contains(&(from, to))
    }

    pub fn predecessors(&self, idx: ElementIdx) -> impl Iterator<Item = ElementIdx> + '_ {
        self.arcs.iter().filter(move |a| a.1 == idx).map(|a| a.0)
    }

    pub fn successors(&self, idx: ElementIdx) -> impl Iterator<Item = ElementIdx> + '_ {
        self.arcs.iter().filter(move |a| a.0 == idx).map(|a| a.1)
    }

    pub fn in_degree(&self, idx: ElementIdx) -> usize {
        self.predecessors(idx).count()
    }

    pub fn out_degree(&self, idx: ElementIdx) -> usize {
        self.successors(idx).count()
    }

    /// Label-level arc relation: `(λ(x), λ(y))` for every arc `(x, y)`.
    pub fn label_arcs(&self) -> HashSet<(Label, Label)> {
        self.arcs
            .iter()
            .map(|&(x, y)| (self.elements[x].label.clone(), self.elements[y].label.clone()))
            .collect()
    }

    pub fn validate(&self) -> Result<(), Vec<Violation>> {
        let n = self.elements.len();
        let mut out = Vec::new();
        let mut ids = HashSet::new();
        for e in &self.elements {
            if !is_valid_id(&e.id) {
                out.push(Violation::InvalidElementId { id: e.id.clone() });
            }
            if !ids.insert(e.id.as_str()) {
                out.push(Violation::DuplicateElementId { id: e.id.clone() });
            }
            if e.label.kind() != e.kind {
                out.push(Violation::LabelKindMismatch { id: e.id.clone() });
            }
        }
        let mut seen = HashSet::new();
        for (i, &(x, y)) in self.arcs.iter().enumerate() {
            if x >= n || y >= n {
                out.push(Violation::DanglingArc { index: i });
                continue;
            }
            let (source, target) = (self.elements[x].id.clone(), self.elements[y].id.clone());
            if self.elements[x].kind == self.elements[y].kind {
                out.push(Violation::Bipartiteness { source: source.clone(), target: target.clone() });
            }
            if !seen.insert((x, y)) {
                out.push(Violation::DuplicateArc { source, target });
            }
        }
        for side in [Side::Left, Side::Right] {
            let mut listed = HashSet::new();
            for &i in self.interface(side) {
                if i >= n {
                    out.push(Violation::DanglingInterfaceReference { side, index: i });
                } else if !listed.insert(i) {
                    out.push(Violation::DuplicateInterfaceEntry { side, id: self.elements[i].id.clone() });
                }
            }
        }
        if out.is_empty() {
            Ok(())
        } else {
            Err(out)
        }
    }

    pub fn warnings(&self) -> Vec<Warning> {
        self.left
            .iter()
            .filter(|i| self.right.contains(i))
            .filter_map(|&i| self.elements.get(i))
            .map(|e| Warning::InterfaceOverlap { id: e.id.clone() })
            .collect()
    }

    /// True if no directed cycle exists.
    pub fn is_acyclic(&self) -> bool {
        let n = self.elements.len();
        let mut indeg = vec![0usize; n];
        let mut succ = vec![Vec::new(); n];
        for &(x, y) in &self.arcs {
            indeg[y] += 1;
            succ[x].push(y);
        }
        let mut queue: Vec<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
        let mut visited = 0;
        while let Some(x) = queue.pop() {
            visited += 1;
            for &y in &succ[x] {
                indeg[y] -= 1;
                if indeg[y] == 0 {
                    queue.push(y);
                }
            }
        }
        visited == n
    }

    /// True if every place has at most one ingoing and one outgoing arc.
    pub fn has_unbranched_places(&self) -> bool {
        self.places().all(|p| self.in_degree(p) <= 1 && self.out_degree(p) <= 1)
    }

    /// Longest-path layering; `None` if the graph has a cycle.
    pub fn topological_levels(&self) -> Option<Vec<usize>> {
        if !self.is_acyclic() {
            return None;
        }
        let n = self.elements.len();
        let mut level = vec![0usize; n];
        // Bellman-style relaxation is enough at this scale.
        for _ in 0..n {
            let mut changed = false;
            for &(x, y) in &self.arcs {
                if level[y] < level[x] + 1 {
                    level[y] = level[x] + 1;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        Some(level)
    }

    /// Copy with every element id replaced by `f(old_id)`.
    pub fn renamed(&self, mut f: impl FnMut(&str) -> String) -> NetModule {
        let mut m = self.clone();
        for e in &mut m.elements {
            e.id = f(&e.id);
        }
        m
    }

    /// Copy whose element storage is permuted: element `i` moves to `perm[i]`.
    pub fn permuted(&self, perm: &[ElementIdx]) -> NetModule {
        assert_eq!(perm.len(), self.elements.len());
        let mut elements = vec![None; perm.len()];
        for (i, e) in self.elements.iter().enumerate() {
            elements[perm[i]] = Some(e.clone());
        }
        let mut arcs: Vec<_> = self.arcs.iter().map(|&(x, y)| (perm[x], perm[y])).collect();
        arcs.sort_unstable();
        NetModule {
            elements: elements.into_iter().map(|e| e.expect("perm is a bijection")).collect(),
            arcs,
            left: self.left.iter().map(|&i| perm[i]).collect(),
            right: self.right.iter().map(|&i| perm[i]).collect(),
        }
    }

    /// Copy without element `idx` and everything that references it.
    pub fn without_element(&self, idx: ElementIdx) -> NetModule {
        let shift = |i: ElementIdx| if i > idx { i - 1 } else { i };
        NetModule {
            elements: self
                .elements
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != idx)
                .map(|(_, e)| e.clone())
                .collect(),
            arcs: self
                .arcs
                .iter()
                .filter(|&&(x, y)| x != idx && y != idx)
                .map(|&(x, y)| (shift(x), shift(y)))
                .collect(),
            left: self.left.iter().filter(|&&i| i != idx).map(|&i| shift(i)).collect(),
            right: self.right.iter().filter(|&&i| i != idx).map(|&i| shift(i)).collect(),
        }
    }

    pub fn without_arc(&self, arc: usize) -> NetModule {
        let mut m = self.clone();
        m.arcs.remove(arc);
        m
    }

    pub fn without_interface_entry(&self, side: Side, pos: usize) -> NetModule {
        let mut m = self.clone();
        match side {
            Side::Left => m.left.remove(pos),
            Side::Right => m.right.remove(pos),
        };
        m
    }
}

/// Name-based construction helper.
///
/// ```
/// use netmod::ModuleBuilder;
/// let m = ModuleBuilder::new()
///     .place("p", "ready")
///     .transition("t", "bake")
///     .arc("p", "t")
///     .left(["p"])
///     .build()
///     .unwrap();
/// assert_eq!(m.len(), 2);
/// ```
#[derive(Clone, Debug, Default)]
pub struct ModuleBuilder {
    elements: Vec<Element>,
    arcs: Vec<(String, String)>,
    left: Vec<String>,
    right: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum BuildError {
    #[error("unknown element id {0}")]
    UnknownId(String),
    #[error("invalid module: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
}

impl ModuleBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn place(mut self, id: &str, label: &str) -> Self {
        self.elements.push(Element::place(id, label));
        self
    }

    pub fn transition(mut self, id: &str, label: &str) -> Self {
        self.elements.push(Element::transition(id, label));
        self
    }

    pub fn arc(mut self, from: &str, to: &str) -> Self {
        self.arcs.push((from.to_owned(), to.to_owned()));
        self
    }

    /// Adds a chain of arcs `ids[0] -> ids[1] -> ...`.
    pub fn path<'a>(mut self, ids: impl IntoIterator<Item = &'a str>) -> Self {
        let ids: Vec<&str> = ids.into_iter().collect();
        for w in ids.windows(2) {
            self.arcs.push((w[0].to_owned(), w[1].to_owned()));
        }
        self
    }

    pub fn left<'a>(mut self, ids: impl IntoIterator<Item = &'a str>) -> Self {
        self.left = ids.into_iter().map(str::to_owned).collect();
        self
    }

    pub fn right<'a>(mut self, ids: impl IntoIterator<Item = &'a str>) -> Self {
        self.right = ids.into_iter().map(str::to_owned).collect();
        self
    }

    /// Resolves ids without validating the result.
    pub fn build_unchecked(self) -> Result<NetModule, BuildError> {
        let index: HashMap<&str, usize> =
            self.elements.iter().enumerate().map(|(i, e)| (e.id.as_str(), i)).collect();
        let look = |id: &String| index.get(id.as_str()).copied().ok_or_else(|| BuildError::UnknownId(id.clone()));
        let arcs = self
            .arcs
            .iter()
            .map(|(x, y)| Ok((look(x)?, look(y)?)))
            .collect::<Result<Vec<_>, BuildError>>()?;
        let left = self.left.iter().map(look).collect::<Result<Vec<_>, _>>()?;
        let right = self.right.iter().map(look).collect::<Result<Vec<_>, _>>()?;
        Ok(NetModule::from_parts(self.elements, arcs, left, right))
    }

    pub fn build(self) -> Result<NetModule, BuildError> {
        let m = self.build_unchecked()?;
        m.validate().map_err(BuildError::Invalid)?;
        Ok(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_module_is_valid() {
        let m = NetModule::empty();
        assert!(m.validate().is_ok());
        assert_eq!(m.len(), 0);
        assert!(m.interior().is_empty());
    }

    #[test]
    fn place_to_place_arc_breaks_bipartiteness() {
        let m = ModuleBuilder::new().place("p", "a").place("q", "b").arc("p", "q").build_unchecked().unwrap();
        let errs = m.validate().unwrap_err();
        assert_eq!(errs.len(), 1);
        assert_eq!(errs[0].rule(), "bipartiteness");
        assert!(errs[0].to_string().contains("p -> q"));
    }

    #[test]
    fn dangling_interface_reference() {
        let m = NetModule::from_parts(vec![Element::place("p", "a")], vec![], vec![3], vec![]);
        let errs = m.validate().unwrap_err();
        assert_eq!(errs[0].rule(), "dangling interface reference");
    }

    #[test]
    fn duplicate_arcs_and_ids() {
        let m = NetModule::from_parts(
            vec![Element::place("p", "a"), Element::transition("p", "t")],
            vec![(0, 1), (0, 1)],
            vec![],
            vec![],
        );
        let rules: Vec<_> = m.validate().unwrap_err().iter().map(|v| v.rule()).collect();
        assert!(rules.contains(&"duplicate arc"));
        assert!(rules.contains(&"duplicate element id"));
    }

    #[test]
    fn kind_mismatch_detected() {
        let bad = Element { id: "x".into(), kind: Kind::Place, label: Label::transition("t") };
        let m = NetModule::from_parts(vec![bad], vec![], vec![], vec![]);
        assert_eq!(m.validate().unwrap_err()[0].rule(), "label kind mismatch");
    }

    #[test]
    fn overlap_is_a_warning_only() {
        let m = ModuleBuilder::new().place("p", "a").left(["p"]).right(["p"]).build().unwrap();
        assert_eq!(m.warnings().len(), 1);
    }

    #[test]
    fn interior_left_right_partition() {
        let m = ModuleBuilder::new()
            .place("a", "x")
            .transition("t", "t")
            .place("b", "y")
            .path(["a", "t", "b"])
            .left(["a"])
            .right(["b"])
            .build()
            .unwrap();
        assert_eq!(m.interior(), vec![1]);
        assert!(m.is_acyclic());
        assert!(m.has_unbranched_places());
        assert_eq!(m.topological_levels().unwrap(), vec![0, 1, 2]);
    }

    #[test]
    fn cycle_detection() {
        let m = ModuleBuilder::new()
            .place("a", "x")
            .transition("t", "t")
            .path(["a", "t", "a"])
            .build()
            .unwrap();
        assert!(!m.is_acyclic());
        assert!(m.topological_levels().is_none());
    }

    #[test]
    fn removing_an_element_drops_references() {
        let m = ModuleBuilder::new()
            .place("a", "x")
            .transition("t", "t")
            .place("b", "y")
            .path(["a", "t", "b"])
            .left(["a"])
            .right(["b"])
            .build()
            .unwrap();
        let r = m.without_element(1);
        assert!(r.validate().is_ok());
        assert!(r.arcs().is_empty());
        assert_eq!(r.right(), &[1]);
    }
}
