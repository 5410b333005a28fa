//! Steps of a net module: single-transition modules whose place arcs mirror
//! the host's arcs around the transition's label.
//!
//! The arc condition is evaluated on labels: a step place `p` has an arc to
//! the step transition `u` exactly when the host has some arc from a place
//! labeled `λ(p)` to a transition labeled `λ(u)`, and symmetrically for arcs
//! out of `u`.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use thiserror::Error;

use crate::label::{Kind, Label};
use crate::module::{Element, ElementIdx, NetModule};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step {
    module: NetModule,
    host_transition_label: Label,
}

impl Step {
    pub fn module(&self) -> &NetModule {
        &self.module
    }

    pub fn into_module(self) -> NetModule {
        self.module
    }

    pub fn host_transition_label(&self) -> &Label {
        &self.host_transition_label
    }

    /// Wraps `module` after checking it against `host`.
    pub fn checked(host: &NetModule, module: NetModule) -> Result<Step, Vec<StepViolation>> {
        is_step_of(host, &module)?;
        let u = module.transitions().next().expect("checked: one transition");
        let host_transition_label = module.element(u).label.clone();
        Ok(Step { module, host_transition_label })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StepError {
    #[error("unknown element index {0}")]
    UnknownElement(ElementIdx),
    #[error("element {0} is not a transition")]
    NotATransition(String),
    #[error("no transition labeled {0:?} in the host")]
    UnknownTransitionLabel(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StepViolation {
    TransitionCount(usize),
    UnknownTransitionLabel(String),
    MissingPreArc { place: String },
    SpuriousPreArc { place: String },
    MissingPostArc { place: String },
    SpuriousPostArc { place: String },
}

impl StepViolation {
    pub fn rule(&self) -> &'static str {
        match self {
            StepViolation::TransitionCount(_) => "transition count",
            StepViolation::UnknownTransitionLabel(_) => "unknown transition label",
            StepViolation::MissingPreArc { .. } => "missing pre-arc",
            StepViolation::SpuriousPreArc { .. } => "spurious pre-arc",
            StepViolation::MissingPostArc { .. } => "missing post-arc",
            StepViolation::SpuriousPostArc { .. } => "spurious post-arc",
        }
    }
}

impl fmt::Display for StepViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StepViolation::TransitionCount(n) => write!(f, "transition count: expected 1, found {n}"),
            StepViolation::UnknownTransitionLabel(l) => write!(f, "unknown transition label: {l:?}"),
            StepViolation::MissingPreArc { place }
            | StepViolation::SpuriousPreArc { place }
            | StepViolation::MissingPostArc { place }
            | StepViolation::SpuriousPostArc { place } => write!(f, "{}: place {place}", self.rule()),
        }
    }
}

pub fn is_step_of(host: &NetModule, step: &NetModule) -> Result<(), Vec<StepViolation>> {
    let ts: Vec<ElementIdx> = step.transitions().collect();
    if ts.len() != 1 {
        return Err(vec![StepViolation::TransitionCount(ts.len())]);
    }
    let u = ts[0];
    let u_label = &step.element(u).label;
    if !host.transitions().any(|t| host.element(t).label == *u_label) {
        return Err(vec![StepViolation::UnknownTransitionLabel(u_label.name().to_owned())]);
    }
    let label_arcs = host.label_arcs();
    let mut out = Vec::new();
    for p in step.places() {
        let p_label = &step.element(p).label;
        let place = step.element(p).id.clone();
        let want_pre = label_arcs.contains(&(p_label.clone(), u_label.clone()));
        let want_post = label_arcs.contains(&(u_label.clone(), p_label.clone()));
        match (want_pre, step.has_arc(p, u)) {
            (true, false) => out.push(StepViolation::MissingPreArc { place: place.clone() }),
            (false, true) => out.push(StepViolation::SpuriousPreArc { place: place.clone() }),
            _ => {}
        }
        match (want_post, step.has_arc(u, p)) {
            (true, false) => out.push(StepViolation::MissingPostArc { place }),
            (false, true) => out.push(StepViolation::SpuriousPostArc { place }),
            _ => {}
        }
    }
    if out.is_empty() {
        Ok(())
    } else {
        Err(out)
    }
}

/// Where an element of a step skeleton goes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Designation {
    Neither,
    Left,
    Right,
}

/// One place per host place label adjacent to the transition label, sorted
/// by label name, followed by the transition.
#[derive(Clone, Debug)]
struct Skeleton {
    elements: Vec<Element>,
    arcs: Vec<(ElementIdx, ElementIdx)>,
    pre: Vec<bool>,
    post: Vec<bool>,
    label: Label,
}

impl Skeleton {
    fn for_label(host: &NetModule, label: &Label) -> Result<Skeleton, StepError> {
        let t = host
            .transitions()
            .find(|&t| host.element(t).label == *label)
            .ok_or_else(|| StepError::UnknownTransitionLabel(label.name().to_owned()))?;
        let instances: Vec<ElementIdx> = host.transitions().filter(|&x| host.element(x).label == *label).collect();
        let mut pre_labels = BTreeSet::new();
        let mut post_labels = BTreeSet::new();
        for &(x, y) in host.arcs() {
            if instances.contains(&y) {
                pre_labels.insert(host.element(x).label.name().to_owned());
            }
            if instances.contains(&x) {
                post_labels.insert(host.element(y).label.name().to_owned());
            }
        }
        let place_labels: BTreeSet<&String> = pre_labels.iter().chain(post_labels.iter()).collect();

        let mut elements = Vec::new();
        let mut pre = Vec::new();
        let mut post = Vec::new();
        let mut used_ids = HashSet::new();
        for name in place_labels {
            let host_id = host
                .places()
                .find(|&p| host.element(p).label.name() == name.as_str())
                .map(|p| host.element(p).id.clone())
                .expect("label comes from a host place");
            let id = if used_ids.insert(host_id.clone()) { host_id } else { format!("p{}", elements.len()) };
            elements.push(Element { id, kind: Kind::Place, label: Label::place(name.as_str()) });
            pre.push(pre_labels.contains(name));
            post.push(post_labels.contains(name));
        }
        let u = elements.len();
        let mut t_id = host.element(t).id.clone();
        if used_ids.contains(&t_id) {
            t_id = format!("t{u}");
        }
        elements.push(Element { id: t_id, kind: Kind::Transition, label: label.clone() });
        let mut arcs = Vec::new();
        for p in 0..u {
            if pre[p] {
                arcs.push((p, u));
            }
            if post[p] {
                arcs.push((u, p));
            }
        }
        pre.push(false);
        post.push(false);
        Ok(Skeleton { elements, arcs, pre, post, label: label.clone() })
    }

    fn len(&self) -> usize {
        self.elements.len()
    }

    fn basic_designation(&self) -> Vec<Designation> {
        (0..self.len())
            .map(|i| match (self.pre[i], self.post[i]) {
                (true, false) => Designation::Left,
                (false, true) => Designation::Right,
                _ => Designation::Neither,
            })
            .collect()
    }

    fn instantiate(&self, designation: &[Designation]) -> Step {
        let pick = |d: Designation| (0..self.len()).filter(|&i| designation[i] == d).collect::<Vec<_>>();
        let module =
            NetModule::from_parts(self.elements.clone(), self.arcs.clone(), pick(Designation::Left), pick(Designation::Right));
        Step { module, host_transition_label: self.label.clone() }
    }
}

fn transition_label(host: &NetModule, t: ElementIdx) -> Result<&Label, StepError> {
    let e = host.elements().get(t).ok_or(StepError::UnknownElement(t))?;
    if e.kind != Kind::Transition {
        return Err(StepError::NotATransition(e.id.clone()));
    }
    Ok(&e.label)
}

/// The step of `t` whose pre-places form the left interface and whose
/// post-places form the right interface. Places that are both pre and post
/// appear once, in neither interface.
pub fn basic_step(host: &NetModule, t: ElementIdx) -> Result<Step, StepError> {
    let label = transition_label(host, t)?;
    let sk = Skeleton::for_label(host, label)?;
    Ok(sk.instantiate(&sk.basic_designation()))
}

/// Distinct transition labels of `host`, sorted by name.
pub fn transition_labels(host: &NetModule) -> Vec<Label> {
    let set: BTreeSet<Label> = host.transitions().map(|t| host.element(t).label.clone()).collect();
    set.into_iter().collect()
}

/// One basic step per distinct transition label.
pub fn basic_steps(host: &NetModule) -> Vec<Step> {
    transition_labels(host)
        .iter()
        .map(|l| {
            let sk = Skeleton::for_label(host, l).expect("label taken from host");
            sk.instantiate(&sk.basic_designation())
        })
        .collect()
}

#[derive(Clone, Debug)]
pub struct StepEnumeration {
    pub steps: Vec<Step>,
    pub truncated: bool,
}

/// Every way of placing each skeleton element in the left interface, the
/// right interface, or neither, in base-3 counting order (first skeleton
/// element most significant). Stops after `budget` steps.
pub fn enumerate_steps(host: &NetModule, t: ElementIdx, budget: usize) -> Result<StepEnumeration, StepError> {
    let label = transition_label(host, t)?;
    let sk = Skeleton::for_label(host, label)?;
    Ok(enumerate_skeleton(&sk, budget))
}

fn enumerate_skeleton(sk: &Skeleton, budget: usize) -> StepEnumeration {
    let k = sk.len() as u32;
    let total = 3usize.checked_pow(k);
    let mut steps = Vec::new();
    let mut truncated = false;
    let mut code = 0usize;
    loop {
        if total.is_some_and(|t| code >= t) {
            break;
        }
        if steps.len() >= budget {
            truncated = true;
            break;
        }
        let mut rest = code;
        let mut designation = vec![Designation::Neither; sk.len()];
        for i in (0..sk.len()).rev() {
            designation[i] = match rest % 3 {
                0 => Designation::Neither,
                1 => Designation::Left,
                _ => Designation::Right,
            };
            rest /= 3;
        }
        steps.push(sk.instantiate(&designation));
        code += 1;
    }
    StepEnumeration { steps, truncated }
}

/// [`enumerate_steps`] for every distinct transition label, sharing one budget.
pub fn enumerate_all_steps(host: &NetModule, budget: usize) -> StepEnumeration {
    let mut steps = Vec::new();
    let mut truncated = false;
    for l in transition_labels(host) {
        let sk = Skeleton::for_label(host, &l).expect("label taken from host");
        let e = enumerate_skeleton(&sk, budget.saturating_sub(steps.len()));
        steps.extend(e.steps);
        if e.truncated {
            truncated = true;
            break;
        }
    }
    StepEnumeration { steps, truncated }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canon::canonical_form;
    use crate::module::ModuleBuilder;

    fn host() -> NetModule {
        ModuleBuilder::new()
            .place("busy", "aide busy")
            .place("free", "aide free")
            .place("empty", "shelf empty")
            .place("ready", "ready")
            .transition("move", "move to shop")
            .transition("idle", "idle")
            .arc("busy", "move")
            .arc("move", "free")
            .arc("move", "empty")
            .build()
            .unwrap()
    }

    fn ids(m: &NetModule, xs: &[usize]) -> Vec<String> {
        xs.iter().map(|&i| m.element(i).label.name().to_owned()).collect()
    }

    #[test]
    fn basic_step_shape() {
        let h = host();
        let s = basic_step(&h, h.index_of("move").unwrap()).unwrap();
        let m = s.module();
        assert_eq!(ids(m, m.left()), ["aide busy"]);
        assert_eq!(ids(m, m.right()), ["aide free", "shelf empty"]);
        assert_eq!(m.transition_count(), 1);
        let u = m.transitions().next().unwrap();
        assert!(m.interior().contains(&u));
        assert!(is_step_of(&h, m).is_ok());
        assert_eq!(s.host_transition_label(), &Label::transition("move to shop"));
    }

    #[test]
    fn isolated_transition_gives_bare_step() {
        let h = host();
        let s = basic_step(&h, h.index_of("idle").unwrap()).unwrap();
        assert_eq!(s.module().len(), 1);
        assert!(s.module().left().is_empty() && s.module().right().is_empty());
    }

    #[test]
    fn non_transition_rejected() {
        let h = host();
        assert!(matches!(basic_step(&h, h.index_of("busy").unwrap()), Err(StepError::NotATransition(_))));
        assert!(matches!(basic_step(&h, 99), Err(StepError::UnknownElement(99))));
    }

    #[test]
    fn missing_pre_arc_detected() {
        let h = host();
        let s = ModuleBuilder::new()
            .place("b", "aide busy")
            .place("f", "aide free")
            .place("e", "shelf empty")
            .transition("u", "move to shop")
            .arc("u", "f")
            .arc("u", "e")
            .build()
            .unwrap();
        let errs = is_step_of(&h, &s).unwrap_err();
        assert_eq!(errs.len(), 1);
        assert_eq!(errs[0].rule(), "missing pre-arc");
    }

    #[test]
    fn unrelated_place_is_vacuously_fine() {
        let h = host();
        let s = ModuleBuilder::new()
            .place("b", "aide busy")
            .place("r", "ready")
            .transition("u", "move to shop")
            .arc("b", "u")
            .build()
            .unwrap();
        assert!(is_step_of(&h, &s).is_ok());
    }

    #[test]
    fn transition_count_checked() {
        let h = host();
        let s = ModuleBuilder::new().place("b", "aide busy").build().unwrap();
        assert_eq!(is_step_of(&h, &s).unwrap_err()[0].rule(), "transition count");
    }

    #[test]
    fn enumeration_counts() {
        let h = host();
        let t = h.index_of("move").unwrap();
        // skeleton: 3 places + transition
        let all = enumerate_steps(&h, t, usize::MAX).unwrap();
        assert_eq!(all.steps.len(), 81);
        assert!(!all.truncated);
        let some = enumerate_steps(&h, t, 10).unwrap();
        assert_eq!(some.steps.len(), 10);
        assert!(some.truncated);
        let idle = enumerate_steps(&h, h.index_of("idle").unwrap(), 100).unwrap();
        assert_eq!(idle.steps.len(), 3);
    }

    #[test]
    fn enumeration_is_sound_and_duplicate_free() {
        let h = host();
        let all = enumerate_steps(&h, h.index_of("move").unwrap(), usize::MAX).unwrap();
        let mut forms = HashSet::new();
        for s in &all.steps {
            assert!(is_step_of(&h, s.module()).is_ok());
            assert!(forms.insert(canonical_form(s.module()).unwrap()));
        }
        let basic = basic_step(&h, h.index_of("move").unwrap()).unwrap();
        assert!(all.steps.contains(&basic));
    }

    #[test]
    fn transition_in_interface_is_enumerated() {
        let h = host();
        let all = enumerate_steps(&h, h.index_of("move").unwrap(), usize::MAX).unwrap();
        assert!(all.steps.iter().any(|s| {
            let m = s.module();
            m.transitions().any(|u| m.in_left(u) || m.in_right(u))
        }));
        // pre-place on the right interface
        assert!(all.steps.iter().any(|s| {
            let m = s.module();
            m.right().iter().any(|&p| m.element(p).label.name() == "aide busy")
        }));
    }

    #[test]
    fn self_loop_place_in_neither_interface() {
        let h = ModuleBuilder::new()
            .place("p", "x")
            .transition("t", "t")
            .path(["p", "t", "p"])
            .build()
            .unwrap();
        let s = basic_step(&h, 1).unwrap();
        assert_eq!(s.module().arcs().len(), 2);
        assert!(s.module().left().is_empty() && s.module().right().is_empty());
    }
}
