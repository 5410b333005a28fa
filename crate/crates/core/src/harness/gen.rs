//! Seeded random modules.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::module::{Element, NetModule};
use crate::run::{extend_run, Run};
use crate::step::basic_steps;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenParams {
    pub seed: u64,
    pub max_places: usize,
    pub max_transitions: usize,
    pub max_arcs: usize,
    pub max_interface: usize,
    /// Distinct labels in use, split between place and transition labels.
    pub label_alphabet_size: usize,
}

impl GenParams {
    pub fn zero(seed: u64) -> Self {
        GenParams { seed, max_places: 0, max_transitions: 0, max_arcs: 0, max_interface: 0, label_alphabet_size: 1 }
    }

    /// Modules of at most six elements over four labels.
    pub fn small(seed: u64) -> Self {
        GenParams { seed, max_places: 4, max_transitions: 2, max_arcs: 6, max_interface: 3, label_alphabet_size: 4 }
    }

    pub fn with_seed(self, seed: u64) -> Self {
        GenParams { seed, ..self }
    }
}

const PLACE_NAMES: [&str; 8] = ["a", "b", "c", "d", "e", "f", "g", "h"];
const TRANS_NAMES: [&str; 8] = ["s", "t", "u", "v", "w", "x", "y", "z"];

fn label_split(alphabet: usize) -> (usize, usize) {
    let a = alphabet.clamp(1, 16);
    let trans = (a / 2).max(1);
    let places = (a - a / 2).max(1);
    (places.min(8), trans.min(8))
}

/// A valid module within the bounds of `p`, determined by `p` alone.
///
/// About one module in four may list an element in both interfaces; the
/// rest are overlap-free.
pub fn random_module(p: GenParams) -> NetModule {
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    random_module_from(&mut rng, &p)
}

fn random_module_from(rng: &mut ChaCha8Rng, p: &GenParams) -> NetModule {
    let (np_labels, nt_labels) = label_split(p.label_alphabet_size);
    let np = rng.gen_range(0..=p.max_places);
    let nt = rng.gen_range(0..=p.max_transitions);
    let mut elements = Vec::with_capacity(np + nt);
    for i in 0..np {
        elements.push(Element::place(format!("p{i}"), PLACE_NAMES[rng.gen_range(0..np_labels)]));
    }
    for i in 0..nt {
        elements.push(Element::transition(format!("t{i}"), TRANS_NAMES[rng.gen_range(0..nt_labels)]));
    }

    let mut arcs = Vec::new();
    if np > 0 && nt > 0 {
        let tries = rng.gen_range(0..=p.max_arcs);
        for _ in 0..tries {
            let pl = rng.gen_range(0..np);
            let tr = np + rng.gen_range(0..nt);
            let arc = if rng.gen_bool(0.5) { (pl, tr) } else { (tr, pl) };
            if !arcs.contains(&arc) {
                arcs.push(arc);
            }
        }
    }

    let n = elements.len();
    let allow_overlap = rng.gen_ratio(1, 4);
    let mut pool: Vec<usize> = (0..n).collect();
    pool.shuffle(rng);
    let nl = rng.gen_range(0..=p.max_interface.min(n));
    let left: Vec<usize> = pool[..nl].to_vec();
    let mut rest: Vec<usize> = if allow_overlap { (0..n).collect() } else { pool[nl..].to_vec() };
    rest.shuffle(rng);
    let nr = rng.gen_range(0..=p.max_interface.min(rest.len()));
    let right: Vec<usize> = rest[..nr].to_vec();

    let m = NetModule::from_parts(elements, arcs, left, right);
    debug_assert!(m.validate().is_ok());
    m
}

/// A basic run of `host` built from up to `max_len` random basic steps.
/// Extensions that would break the run conditions are skipped.
pub fn random_basic_run(host: &NetModule, seed: u64, max_len: usize) -> Run {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let steps = basic_steps(host);
    let mut run = Run::empty();
    if steps.is_empty() {
        return run;
    }
    let len = rng.gen_range(0..=max_len);
    for _ in 0..len {
        let s = &steps[rng.gen_range(0..steps.len())];
        if let Ok(r) = extend_run(&run, s) {
            run = r;
        }
    }
    run
}

/// Derives the seed of case `i` in a batch started from `seed`.
pub fn case_seed(seed: u64, i: u64) -> u64 {
    // splitmix64 step
    let mut z = seed.wrapping_add(i.wrapping_add(1).wrapping_mul(0x9e3779b97f4a7c15));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic() {
        let p = GenParams::small(42);
        assert_eq!(random_module(p), random_module(p));
    }

    #[test]
    fn zero_bounds_give_empty() {
        assert_eq!(random_module(GenParams::zero(7)), NetModule::empty());
    }

    #[test]
    fn samples_validate() {
        let base = GenParams { seed: 0, max_places: 5, max_transitions: 3, max_arcs: 10, max_interface: 4, label_alphabet_size: 4 };
        let mut overlap = 0;
        let mut transition_in_interface = 0;
        let mut branching = 0;
        for i in 0..1000 {
            let m = random_module(base.with_seed(i));
            assert!(m.validate().is_ok(), "seed {i}");
            assert!(m.places().count() <= 5 && m.transition_count() <= 3);
            overlap += m.left().iter().any(|&x| m.in_right(x)) as usize;
            transition_in_interface +=
                m.left().iter().chain(m.right()).any(|&x| m.element(x).kind == crate::Kind::Transition) as usize;
            branching += (!m.has_unbranched_places()) as usize;
        }
        assert!(overlap > 0 && transition_in_interface > 0 && branching > 0);
    }
}
