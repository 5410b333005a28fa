//! Greedy counterexample shrinking.

use thiserror::Error;

use crate::module::{NetModule, Side};

use super::{check_claim, HarnessError, Outcome, Witness, DEFAULT_K};
use crate::io::format::serialize_module;
use crate::run::StepUniverse;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ShrinkError {
    #[error("stale witness: it no longer replays to a failing verdict")]
    StaleWitness,
    #[error(transparent)]
    Harness(#[from] HarnessError),
}

/// Every module one removal away from `m`: an element (with its arcs and
/// interface entries), a single arc, or a single interface entry.
fn reductions(m: &NetModule) -> Vec<NetModule> {
    let mut out = Vec::new();
    for i in (0..m.len()).rev() {
        out.push(m.without_element(i));
    }
    for a in (0..m.arcs().len()).rev() {
        out.push(m.without_arc(a));
    }
    for side in [Side::Left, Side::Right] {
        for p in (0..m.interface(side).len()).rev() {
            out.push(m.without_interface_entry(side, p));
        }
    }
    out
}

/// Removes pieces of the operands one at a time for as long as
/// `still_fails` keeps returning true. The result is locally minimal.
pub fn shrink_with(mut ops: Vec<NetModule>, still_fails: impl Fn(&[NetModule]) -> bool) -> Vec<NetModule> {
    'outer: loop {
        for i in 0..ops.len() {
            for cand in reductions(&ops[i]) {
                let prev = std::mem::replace(&mut ops[i], cand);
                if still_fails(&ops) {
                    continue 'outer;
                }
                ops[i] = prev;
            }
        }
        return ops;
    }
}

/// Shrinks a failing witness. The shrunk witness keeps seed and parameters
/// of the original so the unshrunk case stays reproducible.
pub fn shrink(w: &Witness) -> Result<Witness, ShrinkError> {
    let k = w.k.unwrap_or(DEFAULT_K);
    let universe = w.universe.unwrap_or(StepUniverse::Basic);
    let first = w.replay()?;
    if first.outcome != Outcome::Fails {
        return Err(ShrinkError::StaleWitness);
    }
    let fails = |ops: &[NetModule]| {
        check_claim(w.claim, ops, k, universe).is_ok_and(|v| v.outcome == Outcome::Fails)
    };
    let ops = shrink_with(w.modules()?, fails);
    let v = check_claim(w.claim, &ops, k, universe)?;
    let mut out = v.witness.expect("failing verdicts carry a witness");
    out.seed = w.seed;
    out.params = w.params;
    Ok(out)
}

/// Total element count over the operands of a witness.
pub fn witness_size(w: &Witness) -> Result<usize, HarnessError> {
    Ok(w.modules()?.iter().map(NetModule::len).sum())
}

/// Serialized operands, for reports.
pub fn operand_texts(ops: &[NetModule]) -> Vec<String> {
    ops.iter()
        .enumerate()
        .map(|(i, m)| serialize_module(&format!("Op{i}"), m).expect("valid operand"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compose::compose;
    use crate::harness::{check_associativity_with, check_identity, Claim};
    use crate::module::ModuleBuilder;

    #[test]
    fn stale_witness_rejected() {
        let v = check_identity(&NetModule::empty());
        assert!(v.holds);
        let w = Witness {
            claim: Claim::Identity,
            operands: operand_texts(&[NetModule::empty()]),
            seed: None,
            params: None,
            k: None,
            universe: None,
            forms: vec![],
            examples: vec![],
            detail: String::new(),
        };
        assert_eq!(shrink(&w), Err(ShrinkError::StaleWitness));
    }

    #[test]
    fn removable_isolated_place_goes() {
        // "fails" whenever a transition labeled go is present
        let m = ModuleBuilder::new().transition("t", "go").place("p", "x").build().unwrap();
        let has_go = |ops: &[NetModule]| ops[0].transitions().any(|t| ops[0].element(t).label.name() == "go");
        let out = shrink_with(vec![m], has_go);
        assert_eq!(out[0].len(), 1);
        // already minimal
        let again = shrink_with(out.clone(), has_go);
        assert_eq!(again, out);
    }

    #[test]
    fn injected_bug_shrinks_small() {
        // Reverses the left interface whenever something was fused.
        let buggy = |a: &NetModule, b: &NetModule| {
            let c = compose(a, b)?;
            if a.right().is_empty() || b.left().is_empty() {
                return Ok(c);
            }
            let mut left = c.left().to_vec();
            left.reverse();
            Ok::<_, crate::ComposeError>(NetModule::from_parts(
                c.elements().to_vec(),
                c.arcs().to_vec(),
                left,
                c.right().to_vec(),
            ))
        };
        let fails = |ops: &[NetModule]| check_associativity_with(&ops[0], &ops[1], &ops[2], buggy).fails();
        let mut found = None;
        for seed in 0..500 {
            let ops = crate::harness::generate(Claim::Associativity, crate::harness::GenParams::small(0), seed);
            if fails(&ops) {
                found = Some(ops);
                break;
            }
        }
        let ops = found.expect("mutation is caught");
        let small = shrink_with(ops, fails);
        let size: usize = small.iter().map(NetModule::len).sum();
        assert!(size <= 6, "{size}");
    }
}
