//! Machine checks of the calculus' laws on concrete operands and seeded
//! random batches.
//!
//! A failed check is a finding, reported as a [`Verdict`] carrying a
//! [`Witness`] that can be replayed from its operands or regenerated from
//! its seed.

pub mod gen;
pub mod shrink;

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::canon::{canonical_form_unchecked, CanonicalForm};
use crate::compose::compose;
use crate::io::format::{parse_module, serialize_module};
use crate::iso::is_isomorphic;
use crate::module::NetModule;
use crate::run::{compose_run_sets_with, has_backward_arc, is_basic_run, runs_upto, RunMode, StepUniverse};

pub use gen::{case_seed, random_basic_run, random_module, GenParams};
pub use shrink::{shrink, shrink_with, ShrinkError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Claim {
    Theorem1,
    #[serde(rename = "composition")]
    CompositionTheorem,
    Associativity,
    Identity,
}

impl fmt::Display for Claim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Claim::Theorem1 => "theorem1",
            Claim::CompositionTheorem => "composition",
            Claim::Associativity => "associativity",
            Claim::Identity => "identity",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Holds,
    Fails,
    /// An enumeration hit its budget; nothing can be concluded.
    Inconclusive,
    /// The claim's precondition does not hold for these operands.
    NotApplicable,
}

/// Counterexample bundle.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub claim: Claim,
    /// Operands in `.netmod` text.
    pub operands: Vec<String>,
    /// Seed the operands were generated from, if they were generated.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub params: Option<GenParams>,
    /// Step-count bound, for the composition theorem.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub universe: Option<StepUniverse>,
    /// Short digests of the canonical forms that differ.
    pub forms: Vec<String>,
    /// A few differing modules in `.netmod` text.
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub examples: Vec<String>,
    pub detail: String,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub cases: usize,
    pub holds: usize,
    pub fails: usize,
    pub inconclusive: usize,
    pub not_applicable: usize,
}

impl Counts {
    fn add(&mut self, o: Outcome) {
        self.cases += 1;
        match o {
            Outcome::Holds => self.holds += 1,
            Outcome::Fails => self.fails += 1,
            Outcome::Inconclusive => self.inconclusive += 1,
            Outcome::NotApplicable => self.not_applicable += 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub claim: Claim,
    pub holds: bool,
    pub outcome: Outcome,
    /// Integer bounds the check used.
    pub bound: BTreeMap<String, usize>,
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<Witness>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub counts: Option<Counts>,
    #[serde(skip_serializing_if = "String::is_empty", default)]
    pub detail: String,
}

impl Verdict {
    fn new(claim: Claim, outcome: Outcome) -> Self {
        Verdict {
            claim,
            holds: outcome == Outcome::Holds,
            outcome,
            bound: BTreeMap::new(),
            seed: None,
            witness: None,
            counts: None,
            detail: String::new(),
        }
    }

    fn with_bound(mut self, key: &str, v: usize) -> Self {
        self.bound.insert(key.to_owned(), v);
        self
    }

    fn with_detail(mut self, d: impl Into<String>) -> Self {
        self.detail = d.into();
        self
    }

    pub fn fails(&self) -> bool {
        self.outcome == Outcome::Fails
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HarnessError {
    #[error("operands not basic runs")]
    NotBasicRuns,
    #[error("witness operand {0} does not parse: {1}")]
    BadOperand(usize, String),
    #[error("witness for {claim} needs {expected} operands, has {found}")]
    OperandCount { claim: Claim, expected: usize, found: usize },
    #[error("witness has no seed and parameters to regenerate from")]
    NotGenerated,
}

fn text(name: &str, m: &NetModule) -> String {
    serialize_module(name, m).expect("harness operands are valid modules")
}

const NAMES: [&str; 3] = ["A", "B", "C"];

fn witness(claim: Claim, ops: &[&NetModule], detail: String) -> Witness {
    Witness {
        claim,
        operands: ops.iter().zip(NAMES).map(|(m, n)| text(n, m)).collect(),
        seed: None,
        params: None,
        k: None,
        universe: None,
        forms: Vec::new(),
        examples: Vec::new(),
        detail,
    }
}

fn fail(claim: Claim, ops: &[&NetModule], detail: String) -> Verdict {
    let w = witness(claim, ops, detail.clone());
    let mut v = Verdict::new(claim, Outcome::Fails).with_detail(detail);
    v.witness = Some(w);
    v
}

/// Checks that `r ∘ s` is a basic run for basic runs `r` and `s`, one proof
/// obligation at a time, and that no arc leads from `s` back into `r`.
pub fn check_theorem1(r: &NetModule, s: &NetModule) -> Result<Verdict, HarnessError> {
    if !is_basic_run(r) || !is_basic_run(s) {
        return Err(HarnessError::NotBasicRuns);
    }
    let c = match compose(r, s) {
        Ok(c) => c,
        Err(e) => return Ok(Verdict::new(Claim::Theorem1, Outcome::NotApplicable).with_detail(e.to_string())),
    };
    let sources: HashSet<_> = c.places().filter(|&p| c.in_degree(p) == 0).collect();
    let sinks: HashSet<_> = c.places().filter(|&p| c.out_degree(p) == 0).collect();
    let mut broken = Vec::new();
    if !c.is_acyclic() {
        broken.push("composition has a cycle");
    }
    if !c.has_unbranched_places() {
        broken.push("composition has a branched place");
    }
    if c.left().iter().copied().collect::<HashSet<_>>() != sources {
        broken.push("left interface differs from the places without ingoing arcs");
    }
    if c.right().iter().copied().collect::<HashSet<_>>() != sinks {
        broken.push("right interface differs from the places without outgoing arcs");
    }
    if has_backward_arc(r, s).unwrap_or(false) {
        broken.push("arc from the second operand back into the first");
    }
    let v = if broken.is_empty() {
        Verdict::new(Claim::Theorem1, Outcome::Holds)
    } else {
        fail(Claim::Theorem1, &[r, s], broken.join("; "))
    };
    Ok(v.with_bound("transitions", c.transition_count()))
}

/// Compares the run classes of `m ∘ n` with the compositions of run classes
/// of `m` and `n`, all bounded by `k` transitions.
///
/// The right-hand side only composes factors with at most `k` steps each.
/// That suffices: a run of `m ∘ n` with at most `k` transitions splits into
/// a run of `m` and a run of `n`, each using at most as many steps as it has
/// transitions. Results with more than `k` transitions are dropped so both
/// sides cover the same window.
pub fn check_composition_theorem(m: &NetModule, n: &NetModule, k: usize, universe: StepUniverse) -> Verdict {
    let claim = Claim::CompositionTheorem;
    let mn = match compose(m, n) {
        Ok(c) => c,
        Err(e) => return Verdict::new(claim, Outcome::NotApplicable).with_bound("k", k).with_detail(e.to_string()),
    };
    let lhs = runs_upto(&mn, k, universe);
    let rm = runs_upto(m, k, universe);
    let rn = runs_upto(n, k, universe);
    let rhs = compose_run_sets_with(&rm, &rn, RunMode::Strict, k);
    let base = |o: Outcome| Verdict::new(claim, o).with_bound("k", k);
    if lhs.truncated || rhs.truncated {
        return base(Outcome::Inconclusive).with_detail("run enumeration truncated");
    }
    let l: BTreeSet<&CanonicalForm> = lhs.forms().collect();
    let r: BTreeSet<&CanonicalForm> = rhs.forms().collect();
    let summary = format!("lhs {} classes, rhs {} classes", l.len(), r.len());
    if l == r {
        return base(Outcome::Holds).with_detail(summary);
    }
    let only_l: Vec<&CanonicalForm> = l.difference(&r).copied().collect();
    let only_r: Vec<&CanonicalForm> = r.difference(&l).copied().collect();
    let detail = format!("{summary}; {} only in lhs, {} only in rhs", only_l.len(), only_r.len());
    let mut w = witness(claim, &[m, n], detail.clone());
    w.k = Some(k);
    w.universe = Some(universe);
    w.forms = only_l.iter().map(|f| format!("lhs:{}", f.short())).collect();
    w.forms.extend(only_r.iter().map(|f| format!("rhs:{}", f.short())));
    for (tag, set, forms) in [("LhsOnly", &lhs, &only_l), ("RhsOnly", &rhs, &only_r)] {
        for (i, f) in forms.iter().take(3).enumerate() {
            w.examples.push(text(&format!("{tag}{i}"), set.runs[*f].net()));
        }
    }
    let mut v = base(Outcome::Fails).with_detail(detail);
    v.bound.insert("lhs_classes".into(), l.len());
    v.bound.insert("rhs_classes".into(), r.len());
    v.witness = Some(w);
    v
}

pub fn check_associativity(a: &NetModule, b: &NetModule, c: &NetModule) -> Verdict {
    check_associativity_with(a, b, c, compose)
}

/// As [`check_associativity`] with a caller-supplied operator, for testing
/// the harness against broken implementations.
pub fn check_associativity_with<E: fmt::Display>(
    a: &NetModule,
    b: &NetModule,
    c: &NetModule,
    op: impl Fn(&NetModule, &NetModule) -> Result<NetModule, E>,
) -> Verdict {
    let claim = Claim::Associativity;
    let left = op(a, b).and_then(|ab| op(&ab, c));
    let right = op(b, c).and_then(|bc| op(a, &bc));
    match (left, right) {
        (Ok(x), Ok(y)) => {
            if is_isomorphic(&x, &y) {
                Verdict::new(claim, Outcome::Holds)
            } else {
                let mut v = fail(claim, &[a, b, c], "(A∘B)∘C and A∘(B∘C) are not isomorphic".into());
                let w = v.witness.as_mut().unwrap();
                w.forms = vec![canonical_form_unchecked(&x).short(), canonical_form_unchecked(&y).short()];
                w.examples = vec![text("LeftGrouping", &x), text("RightGrouping", &y)];
                v
            }
        }
        (Err(e), _) | (_, Err(e)) => Verdict::new(claim, Outcome::NotApplicable).with_detail(e.to_string()),
    }
}

/// `m ∘ [∅] ≅ m ≅ [∅] ∘ m`.
pub fn check_identity(m: &NetModule) -> Verdict {
    let claim = Claim::Identity;
    let e = NetModule::empty();
    let mut broken = Vec::new();
    match compose(m, &e) {
        Ok(x) if is_isomorphic(&x, m) => {}
        Ok(_) => broken.push("M∘[∅] differs from M".to_owned()),
        Err(err) => broken.push(format!("M∘[∅] undefined: {err}")),
    }
    match compose(&e, m) {
        Ok(x) if is_isomorphic(&x, m) => {}
        Ok(_) => broken.push("[∅]∘M differs from M".to_owned()),
        Err(err) => broken.push(format!("[∅]∘M undefined: {err}")),
    }
    if broken.is_empty() {
        Verdict::new(claim, Outcome::Holds)
    } else {
        fail(claim, &[m], broken.join("; "))
    }
}

fn operand_count(claim: Claim) -> usize {
    match claim {
        Claim::Identity => 1,
        Claim::Theorem1 | Claim::CompositionTheorem => 2,
        Claim::Associativity => 3,
    }
}

/// Re-runs a check on explicit operands.
pub fn check_claim(
    claim: Claim,
    ops: &[NetModule],
    k: usize,
    universe: StepUniverse,
) -> Result<Verdict, HarnessError> {
    let expected = operand_count(claim);
    if ops.len() != expected {
        return Err(HarnessError::OperandCount { claim, expected, found: ops.len() });
    }
    Ok(match claim {
        Claim::Identity => check_identity(&ops[0]),
        Claim::Associativity => check_associativity(&ops[0], &ops[1], &ops[2]),
        Claim::Theorem1 => check_theorem1(&ops[0], &ops[1])?,
        Claim::CompositionTheorem => check_composition_theorem(&ops[0], &ops[1], k, universe),
    })
}

impl Witness {
    pub fn modules(&self) -> Result<Vec<NetModule>, HarnessError> {
        self.operands
            .iter()
            .enumerate()
            .map(|(i, t)| parse_module(t).map(|d| d.module).map_err(|e| HarnessError::BadOperand(i, e.to_string())))
            .collect()
    }

    /// Re-checks the recorded operands.
    pub fn replay(&self) -> Result<Verdict, HarnessError> {
        let k = self.k.unwrap_or(DEFAULT_K);
        check_claim(self.claim, &self.modules()?, k, self.universe.unwrap_or(StepUniverse::Basic))
    }

    /// Regenerates the original operands from seed and parameters and
    /// re-checks them.
    pub fn replay_from_seed(&self) -> Result<Verdict, HarnessError> {
        let (Some(seed), Some(params)) = (self.seed, self.params) else {
            return Err(HarnessError::NotGenerated);
        };
        let ops = generate(self.claim, params, seed);
        let k = self.k.unwrap_or(DEFAULT_K);
        check_claim(self.claim, &ops, k, self.universe.unwrap_or(StepUniverse::Basic))
    }
}

pub const DEFAULT_K: usize = 4;
/// Steps per random basic run.
pub const RUN_LENGTH: usize = 4;

/// The operands of one random case.
pub fn generate(claim: Claim, params: GenParams, seed: u64) -> Vec<NetModule> {
    let module = |i: u64| random_module(params.with_seed(case_seed(seed, i)));
    match claim {
        Claim::Identity => vec![module(0)],
        Claim::Associativity => vec![module(0), module(1), module(2)],
        Claim::CompositionTheorem => vec![module(0), module(1)],
        Claim::Theorem1 => {
            let host = module(0);
            vec![
                random_basic_run(&host, case_seed(seed, 1), RUN_LENGTH).into_net(),
                random_basic_run(&host, case_seed(seed, 2), RUN_LENGTH).into_net(),
            ]
        }
    }
}

/// Settings for a seeded batch.
#[derive(Clone, Copy, Debug)]
pub struct Batch {
    pub claim: Claim,
    pub seed: u64,
    pub cases: usize,
    pub params: GenParams,
    pub k: usize,
    pub universe: StepUniverse,
    /// Shrink the first failing case before reporting it.
    pub shrink: bool,
}

impl Batch {
    /// The default sizes per claim.
    pub fn new(claim: Claim, seed: u64) -> Self {
        let (cases, params) = match claim {
            Claim::Identity => (100, GenParams { max_places: 5, max_transitions: 3, max_arcs: 10, max_interface: 4, ..GenParams::small(0) }),
            Claim::Associativity => (200, GenParams::small(0)),
            Claim::Theorem1 => (200, GenParams { max_places: 5, max_transitions: 3, max_arcs: 9, max_interface: 0, label_alphabet_size: 6, seed: 0 }),
            Claim::CompositionTheorem => (20, GenParams { max_places: 5, max_transitions: 3, max_arcs: 8, max_interface: 3, label_alphabet_size: 4, seed: 0 }),
        };
        Batch { claim, seed, cases, params, k: DEFAULT_K, universe: StepUniverse::Basic, shrink: true }
    }
}

/// Runs `b.cases` generated cases and summarizes them in one verdict. The
/// first failing case, shrunk if requested, becomes the witness.
pub fn run_batch(b: &Batch) -> Verdict {
    let mut counts = Counts::default();
    let mut first: Option<Witness> = None;
    for i in 0..b.cases {
        let seed = case_seed(b.seed, i as u64);
        let ops = generate(b.claim, b.params, seed);
        let v = match check_claim(b.claim, &ops, b.k, b.universe) {
            Ok(v) => v,
            Err(e) => Verdict::new(b.claim, Outcome::NotApplicable).with_detail(e.to_string()),
        };
        counts.add(v.outcome);
        if first.is_none() {
            if let Some(mut w) = v.witness {
                w.seed = Some(seed);
                w.params = Some(b.params);
                if b.shrink {
                    if let Ok(s) = shrink(&w) {
                        w = s;
                    }
                }
                first = Some(w);
            }
        }
    }
    let outcome = if counts.fails > 0 {
        Outcome::Fails
    } else if counts.inconclusive > 0 {
        Outcome::Inconclusive
    } else {
        Outcome::Holds
    };
    let mut v = Verdict::new(b.claim, outcome)
        .with_bound("cases", b.cases)
        .with_bound("max_places", b.params.max_places)
        .with_bound("max_transitions", b.params.max_transitions)
        .with_bound("max_arcs", b.params.max_arcs)
        .with_bound("max_interface", b.params.max_interface)
        .with_bound("label_alphabet_size", b.params.label_alphabet_size);
    if matches!(b.claim, Claim::CompositionTheorem) {
        v.bound.insert("k".into(), b.k);
    }
    if matches!(b.claim, Claim::Theorem1) {
        v.bound.insert("run_length".into(), RUN_LENGTH);
    }
    v.seed = Some(b.seed);
    v.detail = format!(
        "{} cases: {} hold, {} fail, {} inconclusive, {} not applicable",
        counts.cases, counts.holds, counts.fails, counts.inconclusive, counts.not_applicable
    );
    v.counts = Some(counts);
    v.witness = first;
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::load;

    #[test]
    fn theorem1_on_r1() {
        let r1 = load("r1");
        let v = check_theorem1(&r1, &r1).unwrap();
        assert!(v.holds, "{v:?}");
        assert!(check_theorem1(&NetModule::empty(), &r1).unwrap().holds);
        assert_eq!(check_theorem1(&load("global"), &r1), Err(HarnessError::NotBasicRuns));
    }

    #[test]
    fn associativity_on_three_parts() {
        let v = check_associativity(&load("take_supply"), &load("supply_move"), &load("move_sell"));
        assert!(v.holds);
        let e = NetModule::empty();
        assert!(check_associativity(&load("baker"), &e, &e).holds);
    }

    #[test]
    fn composition_with_empty_left() {
        let v = check_composition_theorem(&NetModule::empty(), &load("vendor"), 3, StepUniverse::Basic);
        assert!(v.holds, "{v:?}");
    }

    #[test]
    fn verdict_json_fields() {
        let v = check_identity(&load("baker"));
        let j: serde_json::Value = serde_json::to_value(&v).unwrap();
        for f in ["claim", "holds", "bound", "seed"] {
            assert!(j.get(f).is_some(), "{f}");
        }
        assert_eq!(j["claim"], "identity");
    }

    #[test]
    fn small_batches_hold() {
        for claim in [Claim::Identity, Claim::Associativity, Claim::Theorem1] {
            let mut b = Batch::new(claim, 1);
            b.cases = 20;
            let v = run_batch(&b);
            assert!(v.holds, "{claim}: {v:?}");
        }
    }
}
