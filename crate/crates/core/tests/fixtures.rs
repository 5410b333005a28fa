use netmod::fixtures::{all, load};
use netmod::run::{has_backward_arc, RunMode};
use netmod::{
    basic_step, compose, compose_all, is_basic_run, is_isomorphic, is_step_of, recognize_run, Run, Step,
    StepUniverse,
};

fn step(host: &netmod::NetModule, name: &str) -> Step {
    Step::checked(host, load(name)).unwrap_or_else(|v| panic!("{name}: {v:?}"))
}

#[test]
fn every_fixture_parses_and_validates() {
    for f in all() {
        let m = load(f.name);
        assert!(m.validate().is_ok(), "{}", f.name);
    }
}

#[test]
fn baker_and_vendor_compose_to_global() {
    let g = compose(&load("baker"), &load("vendor")).unwrap();
    assert!(is_isomorphic(&g, &load("global")));
}

#[test]
fn three_part_decomposition_is_global() {
    let parts = [load("take_supply"), load("supply_move"), load("move_sell")];
    let g = compose_all(&parts).unwrap();
    assert!(is_isomorphic(&g, &load("global")));
}

#[test]
fn step_fixtures_are_the_basic_steps() {
    let g = load("global");
    for (name, id) in [("step_a", "bake"), ("step_b", "supply"), ("step_c", "move"), ("step_d", "sell")] {
        let t = g.index_of(id).unwrap_or_else(|| panic!("global has no {id}"));
        let b = basic_step(&g, t).unwrap();
        assert!(is_isomorphic(b.module(), &load(name)), "{name}");
        assert!(is_step_of(&g, &load(name)).is_ok());
    }
}

#[test]
fn one_cycle_is_the_fold_of_the_basic_steps() {
    let g = load("global");
    let steps: Vec<Step> = ["step_a", "step_b", "step_c", "step_d"].iter().map(|n| step(&g, n)).collect();
    let r = Run::from_steps(&steps, RunMode::Strict).unwrap();
    assert!(is_isomorphic(r.net(), &load("r1")));
    assert!(is_basic_run(&load("r1")));
}

#[test]
fn two_cycles() {
    let r1 = load("r1");
    assert!(is_isomorphic(&compose(&r1, &r1).unwrap(), &load("r2")));
    let split = compose(&load("baker_run2"), &load("vendor_run2")).unwrap();
    assert!(is_isomorphic(&split, &load("r2")));
    assert!(!has_backward_arc(&r1, &r1).unwrap());
}

#[test]
fn cycle_pair_closes_a_cycle() {
    let g = load("global");
    let (a, b) = (load("cycle_first"), load("cycle_second"));
    assert!(is_step_of(&g, &a).is_ok() && is_step_of(&g, &b).is_ok());
    let c = compose(&a, &b).unwrap();
    assert!(!c.is_acyclic());
}

#[test]
fn misordered_is_a_net_shape_but_not_a_run() {
    let g = load("global");
    let m = load("misordered");
    assert!(m.is_acyclic() && m.has_unbranched_places());
    assert!(recognize_run(&g, &m, StepUniverse::All { budget: 10_000 }).is_none());
    assert!(recognize_run(&g, &load("r1"), StepUniverse::Basic).is_some());
}
