//! Runs: compositions of steps that stay acyclic with unbranched places.
//!
//! Runs are built inductively from the empty module by appending steps of
//! the host. [`runs_upto`] explores that induction breadth first and keeps
//! one representative per isomorphism class.

use std::collections::{BTreeMap, HashMap, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::canon::{canonical_form_unchecked, CanonicalForm};
use crate::compose::{compose, compose_traced, ComposeError};
use crate::label::Label;
use crate::module::{ElementIdx, NetModule};
use crate::step::{basic_steps, enumerate_all_steps, is_step_of, Step};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Run {
    net: NetModule,
    steps: Vec<NetModule>,
}

impl Default for Run {
    fn default() -> Self {
        Self::empty()
    }
}

impl Run {
    pub fn empty() -> Self {
        Run { net: NetModule::empty(), steps: Vec::new() }
    }

    pub fn net(&self) -> &NetModule {
        &self.net
    }

    pub fn into_net(self) -> NetModule {
        self.net
    }

    /// Step modules in composition order.
    pub fn steps(&self) -> &[NetModule] {
        &self.steps
    }

    pub fn provenance(&self) -> Vec<CanonicalForm> {
        self.steps.iter().map(canonical_form_unchecked).collect()
    }

    /// Left fold of the recorded steps.
    pub fn replay(&self) -> Result<NetModule, ComposeError> {
        self.steps.iter().try_fold(NetModule::empty(), |acc, s| compose(&acc, s))
    }

    pub fn canonical_form(&self) -> CanonicalForm {
        canonical_form_unchecked(&self.net)
    }

    pub fn is_basic(&self) -> bool {
        is_basic_run(&self.net)
    }

    /// Replays a sequence of steps, checking the run conditions after each one.
    pub fn from_steps<'a>(
        steps: impl IntoIterator<Item = &'a Step>,
        mode: RunMode,
    ) -> Result<Run, ExtendError> {
        steps.into_iter().try_fold(Run::empty(), |r, s| extend_run_with(&r, s.module(), mode))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum RunMode {
    /// Acyclic and unbranched places.
    #[default]
    Strict,
    /// Acyclicity only.
    OrderOnly,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExtendError {
    #[error("cycle introduced")]
    CycleIntroduced,
    #[error("place branching introduced")]
    PlaceBranchingIntroduced,
    #[error(transparent)]
    Compose(#[from] ComposeError),
}

/// Checks the run conditions on a module.
pub fn check_run_shape(m: &NetModule, mode: RunMode) -> Result<(), ExtendError> {
    if !m.is_acyclic() {
        return Err(ExtendError::CycleIntroduced);
    }
    if mode == RunMode::Strict && !m.has_unbranched_places() {
        return Err(ExtendError::PlaceBranchingIntroduced);
    }
    Ok(())
}

pub fn extend_run(r: &Run, step: &Step) -> Result<Run, ExtendError> {
    extend_run_with(r, step.module(), RunMode::Strict)
}

pub fn extend_run_with(r: &Run, step: &NetModule, mode: RunMode) -> Result<Run, ExtendError> {
    let net = compose(&r.net, step)?;
    check_run_shape(&net, mode)?;
    let mut steps = r.steps.clone();
    steps.push(step.clone());
    Ok(Run { net, steps })
}

/// Left interface = places without ingoing arcs, right interface = places
/// without outgoing arcs, no transitions in either; acyclic with
/// unbranched places.
pub fn is_basic_run(m: &NetModule) -> bool {
    if check_run_shape(m, RunMode::Strict).is_err() {
        return false;
    }
    if m.left().iter().chain(m.right()).any(|&i| m.element(i).kind != crate::Kind::Place) {
        return false;
    }
    let sources: HashSet<ElementIdx> = m.places().filter(|&p| m.in_degree(p) == 0).collect();
    let sinks: HashSet<ElementIdx> = m.places().filter(|&p| m.out_degree(p) == 0).collect();
    let left: HashSet<ElementIdx> = m.left().iter().copied().collect();
    let right: HashSet<ElementIdx> = m.right().iter().copied().collect();
    left == sources && right == sinks
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepUniverse {
    /// One basic step per transition label.
    Basic,
    /// Every interface designation of every step skeleton, up to `budget` steps.
    All { budget: usize },
}

impl StepUniverse {
    pub fn steps(&self, host: &NetModule) -> (Vec<Step>, bool) {
        match *self {
            StepUniverse::Basic => (basic_steps(host), false),
            StepUniverse::All { budget } => {
                let e = enumerate_all_steps(host, budget);
                (e.steps, e.truncated)
            }
        }
    }
}

/// A finite window onto the runs of a module: one representative per class.
#[derive(Clone, Debug, Default)]
pub struct RunClassSet {
    pub runs: BTreeMap<CanonicalForm, Run>,
    pub bound: usize,
    pub truncated: bool,
}

impl RunClassSet {
    pub fn len(&self) -> usize {
        self.runs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.runs.is_empty()
    }

    pub fn contains(&self, form: &CanonicalForm) -> bool {
        self.runs.contains_key(form)
    }

    pub fn contains_module(&self, m: &NetModule) -> bool {
        self.contains(&canonical_form_unchecked(m))
    }

    pub fn forms(&self) -> impl Iterator<Item = &CanonicalForm> {
        self.runs.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Run> {
        self.runs.values()
    }

    /// Classes whose net has at most `k` transitions.
    pub fn restricted(&self, k: usize) -> RunClassSet {
        RunClassSet {
            runs: self
                .runs
                .iter()
                .filter(|(_, r)| r.net.transition_count() <= k)
                .map(|(f, r)| (f.clone(), r.clone()))
                .collect(),
            bound: k.min(self.bound),
            truncated: self.truncated,
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct EnumerationLimits {
    pub mode: RunMode,
    /// Stop (and flag truncation) once this many classes are known.
    pub max_classes: usize,
}

impl Default for EnumerationLimits {
    fn default() -> Self {
        EnumerationLimits { mode: RunMode::Strict, max_classes: 250_000 }
    }
}

/// Runs reachable from `[∅]` by at most `k` extensions with steps from
/// `universe`. Every extension adds at most one transition, so all members
/// have at most `k` transitions.
pub fn runs_upto(host: &NetModule, k: usize, universe: StepUniverse) -> RunClassSet {
    runs_upto_with(host, k, universe, EnumerationLimits::default())
}

pub fn runs_upto_with(
    host: &NetModule,
    k: usize,
    universe: StepUniverse,
    limits: EnumerationLimits,
) -> RunClassSet {
    let (steps, mut truncated) = universe.steps(host);
    let mut runs = BTreeMap::new();
    let empty = Run::empty();
    runs.insert(empty.canonical_form(), empty.clone());
    let mut frontier = vec![empty];
    'levels: for _ in 0..k {
        let mut next = Vec::new();
        for r in &frontier {
            for s in &steps {
                let Ok(extended) = extend_run_with(r, s.module(), limits.mode) else {
                    continue;
                };
                let form = extended.canonical_form();
                if let std::collections::btree_map::Entry::Vacant(v) = runs.entry(form) {
                    v.insert(extended.clone());
                    next.push(extended);
                    if runs.len() >= limits.max_classes {
                        truncated = true;
                        break 'levels;
                    }
                }
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    RunClassSet { runs, bound: k, truncated }
}

/// All defined pairwise compositions that are again runs, deduplicated.
pub fn compose_run_sets(a: &RunClassSet, b: &RunClassSet) -> RunClassSet {
    compose_run_sets_with(a, b, RunMode::Strict, usize::MAX)
}

/// As [`compose_run_sets`], keeping only results with at most
/// `max_transitions` transitions.
pub fn compose_run_sets_with(
    a: &RunClassSet,
    b: &RunClassSet,
    mode: RunMode,
    max_transitions: usize,
) -> RunClassSet {
    let mut runs = BTreeMap::new();
    for ra in a.runs.values() {
        for rb in b.runs.values() {
            let Ok(net) = compose(&ra.net, &rb.net) else {
                continue;
            };
            if net.transition_count() > max_transitions || check_run_shape(&net, mode).is_err() {
                continue;
            }
            let form = canonical_form_unchecked(&net);
            runs.entry(form).or_insert_with(|| {
                let mut steps = ra.steps.clone();
                steps.extend(rb.steps.iter().cloned());
                Run { net, steps }
            });
        }
    }
    RunClassSet {
        runs,
        bound: a.bound.saturating_add(b.bound).min(max_transitions),
        truncated: a.truncated || b.truncated,
    }
}

/// Finds steps of `host` whose left fold is isomorphic to `target`.
///
/// Backtracking over extensions of the empty run. A prefix is kept only if
/// it can still grow into `target`: its left interface must map onto the
/// start of `target`'s left interface, and elements that later steps can no
/// longer touch (interior and left-only elements) must already carry all of
/// their arcs. Prefix classes that failed once are memoized.
pub fn recognize_run(host: &NetModule, target: &NetModule, universe: StepUniverse) -> Option<Vec<Step>> {
    target.validate().ok()?;
    if !target.is_acyclic() || !target.has_unbranched_places() {
        return None;
    }
    let goal = canonical_form_unchecked(target);
    if target.is_empty() {
        return Some(Vec::new());
    }
    if target.transition_count() == 0 {
        return None;
    }
    let (steps, _) = universe.steps(host);
    let mut search = Recognizer {
        steps: &steps,
        target,
        goal,
        target_labels: label_counts(target),
        failed: HashSet::new(),
        depth_limit: target.len(),
    };
    let mut chosen = Vec::new();
    if search.descend(&Run::empty(), &mut chosen) {
        Some(chosen.into_iter().map(|i| steps[i].clone()).collect())
    } else {
        None
    }
}

fn label_counts(m: &NetModule) -> HashMap<&Label, usize> {
    let mut counts = HashMap::new();
    for e in m.elements() {
        *counts.entry(&e.label).or_insert(0) += 1;
    }
    counts
}

struct Recognizer<'a> {
    steps: &'a [Step],
    target: &'a NetModule,
    goal: CanonicalForm,
    target_labels: HashMap<&'a Label, usize>,
    failed: HashSet<CanonicalForm>,
    depth_limit: usize,
}

impl Recognizer<'_> {
    fn descend(&mut self, run: &Run, chosen: &mut Vec<usize>) -> bool {
        if chosen.len() >= self.depth_limit {
            return false;
        }
        for (i, s) in self.steps.iter().enumerate() {
            let Ok(next) = extend_run_with(run, s.module(), RunMode::Strict) else {
                continue;
            };
            if next.net.len() > self.target.len() {
                continue;
            }
            let counts = label_counts(&next.net);
            if counts.iter().any(|(l, c)| self.target_labels.get(l).copied().unwrap_or(0) < *c) {
                continue;
            }
            let form = next.canonical_form();
            if form == self.goal {
                chosen.push(i);
                return true;
            }
            if self.failed.contains(&form) || !embeds_as_prefix(&next.net, self.target) {
                continue;
            }
            chosen.push(i);
            if self.descend(&next, chosen) {
                return true;
            }
            chosen.pop();
            self.failed.insert(form);
        }
        false
    }
}

/// Whether `prefix` can be the accumulated module of a fold that ends in
/// `target`.
fn embeds_as_prefix(prefix: &NetModule, target: &NetModule) -> bool {
    let n = prefix.len();
    if prefix.left().len() > target.left().len() {
        return false;
    }
    let t_arcs: HashSet<(usize, usize)> = target.arcs().iter().copied().collect();
    let p_arcs: HashSet<(usize, usize)> = prefix.arcs().iter().copied().collect();
    let t_interior: HashSet<usize> = target.interior().into_iter().collect();

    let mut candidates: Vec<Vec<usize>> = Vec::with_capacity(n);
    for x in 0..n {
        let e = prefix.element(x);
        let complete = !prefix.in_right(x);
        let list: Vec<usize> = if let Some(pos) = prefix.left().iter().position(|&y| y == x) {
            vec![target.left()[pos]]
        } else if prefix.in_right(x) {
            (0..target.len()).filter(|&y| target.in_right(y) || t_interior.contains(&y)).collect()
        } else {
            t_interior.iter().copied().collect()
        };
        let list: Vec<usize> = list
            .into_iter()
            .filter(|&y| {
                let f = target.element(y);
                f.kind == e.kind
                    && f.label == e.label
                    && (!complete
                        || (target.in_degree(y) == prefix.in_degree(x) && target.out_degree(y) == prefix.out_degree(x)))
                    && target.in_degree(y) >= prefix.in_degree(x)
                    && target.out_degree(y) >= prefix.out_degree(x)
            })
            .collect();
        if list.is_empty() {
            return false;
        }
        candidates.push(list);
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&x| candidates[x].len());
    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; target.len()];
    embed(0, &order, &candidates, &p_arcs, &t_arcs, &mut map, &mut used)
}

fn embed(
    depth: usize,
    order: &[usize],
    candidates: &[Vec<usize>],
    p_arcs: &HashSet<(usize, usize)>,
    t_arcs: &HashSet<(usize, usize)>,
    map: &mut [usize],
    used: &mut [bool],
) -> bool {
    let Some(&x) = order.get(depth) else {
        return true;
    };
    for &y in &candidates[x] {
        if used[y] {
            continue;
        }
        let ok = order[..depth].iter().all(|&w| {
            (!p_arcs.contains(&(x, w)) || t_arcs.contains(&(y, map[w])))
                && (!p_arcs.contains(&(w, x)) || t_arcs.contains(&(map[w], y)))
        });
        if !ok {
            continue;
        }
        map[x] = y;
        used[y] = true;
        if embed(depth + 1, order, candidates, p_arcs, t_arcs, map, used) {
            return true;
        }
        used[y] = false;
    }
    map[x] = usize::MAX;
    false
}

/// Result of composing two runs with origin tracking, used to check that no
/// arc leads from the second operand back into the first.
pub fn has_backward_arc(first: &NetModule, second: &NetModule) -> Result<bool, ComposeError> {
    let c = compose_traced(first, second)?;
    #[derive(PartialEq, Clone, Copy)]
    enum Region {
        First,
        Second,
        Fused,
    }
    let mut region = vec![Region::First; c.module.len()];
    for &i in &c.second {
        region[i] = Region::Second;
    }
    for &(_, _, i) in &c.fused {
        region[i] = Region::Fused;
    }
    Ok(c.module.arcs().iter().any(|&(x, y)| {
        matches!(
            (region[x], region[y]),
            (Region::Second, Region::First) | (Region::Second, Region::Fused) | (Region::Fused, Region::First)
        )
    }))
}

/// Checks that every provenance entry is a step of `host` and the replay
/// reproduces the run.
pub fn run_is_sound(host: &NetModule, run: &Run) -> bool {
    run.steps.iter().all(|s| is_step_of(host, s).is_ok())
        && run.replay().is_ok_and(|m| canonical_form_unchecked(&m) == run.canonical_form())
        && check_run_shape(&run.net, RunMode::Strict).is_ok()
        && run.net.validate().is_ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::iso::is_isomorphic;
    use crate::module::ModuleBuilder;
    use crate::step::basic_step;

    /// p -> t1 -> q -> t2 -> p
    fn ring() -> NetModule {
        ModuleBuilder::new()
            .place("p", "p")
            .transition("t1", "t1")
            .place("q", "q")
            .transition("t2", "t2")
            .path(["p", "t1", "q", "t2", "p"])
            .build()
            .unwrap()
    }

    #[test]
    fn empty_run_extended_by_basic_step() {
        let h = ring();
        let s = basic_step(&h, 1).unwrap();
        let r = extend_run(&Run::empty(), &s).unwrap();
        assert!(is_isomorphic(r.net(), s.module()));
        assert_eq!(r.steps().len(), 1);
        assert!(r.is_basic());
    }

    #[test]
    fn steps_closing_a_cycle_are_rejected() {
        let h = ring();
        // t1 consumes p and produces q; both places on the right.
        let a = ModuleBuilder::new()
            .place("p", "p")
            .transition("t1", "t1")
            .place("q", "q")
            .path(["p", "t1", "q"])
            .right(["p", "q"])
            .build()
            .unwrap();
        let b = ModuleBuilder::new()
            .place("p", "p")
            .transition("t2", "t2")
            .place("q", "q")
            .path(["q", "t2", "p"])
            .left(["p", "q"])
            .build()
            .unwrap();
        let sa = Step::checked(&h, a).unwrap();
        let sb = Step::checked(&h, b).unwrap();
        let r = extend_run(&Run::empty(), &sa).unwrap();
        assert_eq!(extend_run(&r, &sb), Err(ExtendError::CycleIntroduced));
    }

    #[test]
    fn zero_bound_has_only_the_empty_run() {
        let set = runs_upto(&ring(), 0, StepUniverse::Basic);
        assert_eq!(set.len(), 1);
        assert!(set.contains_module(&NetModule::empty()));
    }

    #[test]
    fn ring_runs_alternate() {
        let set = runs_upto(&ring(), 3, StepUniverse::Basic);
        // [∅], t1, t2, t1t2, t2t1, t1t2t1, t2t1t2, plus independent pairs
        for r in set.iter() {
            assert!(run_is_sound(&ring(), r));
            assert!(r.is_basic());
        }
        assert!(set.len() >= 7);
        let smaller = runs_upto(&ring(), 2, StepUniverse::Basic);
        assert!(smaller.forms().all(|f| set.contains(f)));
    }

    #[test]
    fn basic_run_predicate() {
        assert!(is_basic_run(&NetModule::empty()));
        let with_transition = ModuleBuilder::new().transition("t", "t").left(["t"]).build().unwrap();
        assert!(!is_basic_run(&with_transition));
        let missing_source = ModuleBuilder::new()
            .place("p", "p")
            .transition("t", "t")
            .arc("p", "t")
            .build()
            .unwrap();
        assert!(!is_basic_run(&missing_source));
    }

    #[test]
    fn composing_empty_run_sets() {
        let mut a = RunClassSet::default();
        a.runs.insert(Run::empty().canonical_form(), Run::empty());
        let c = compose_run_sets(&a, &a);
        assert_eq!(c.len(), 1);
        assert!(c.contains_module(&NetModule::empty()));
    }

    #[test]
    fn recognize_round_trip() {
        let h = ring();
        let steps: Vec<Step> = [1, 3, 1].iter().map(|&t| basic_step(&h, t).unwrap()).collect();
        let r = Run::from_steps(&steps, RunMode::Strict).unwrap();
        let found = recognize_run(&h, r.net(), StepUniverse::Basic).unwrap();
        let replay = Run::from_steps(&found, RunMode::Strict).unwrap();
        assert!(is_isomorphic(replay.net(), r.net()));
        assert_eq!(recognize_run(&h, &NetModule::empty(), StepUniverse::Basic), Some(vec![]));
    }

    #[test]
    fn order_only_mode_admits_branching() {
        // Two transitions both consuming the same place label through one fused place.
        let h = ModuleBuilder::new()
            .place("p", "p")
            .transition("t", "t")
            .place("q", "q")
            .path(["p", "t", "q"])
            .build()
            .unwrap();
        let a = ModuleBuilder::new()
            .place("p", "p")
            .transition("t", "t")
            .place("q", "q")
            .path(["p", "t", "q"])
            .right(["p"])
            .build()
            .unwrap();
        let b = ModuleBuilder::new()
            .place("p", "p")
            .transition("t", "t")
            .place("q", "q")
            .path(["p", "t", "q"])
            .left(["p"])
            .build()
            .unwrap();
        let sa = Step::checked(&h, a).unwrap();
        let sb = Step::checked(&h, b).unwrap();
        let r = extend_run(&Run::empty(), &sa).unwrap();
        assert_eq!(extend_run(&r, &sb), Err(ExtendError::PlaceBranchingIntroduced));
        assert!(extend_run_with(&r, sb.module(), RunMode::OrderOnly).is_ok());
    }
}
