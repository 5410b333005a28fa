//! Bundled example modules.
//!
//! The bakery system and its parts, its basic steps, a few runs, and two
//! negative controls.

use crate::io::format::{parse_module, ModuleDocument};
use crate::module::NetModule;

pub struct Fixture {
    pub name: &'static str,
    pub text: &'static str,
}

macro_rules! fixtures {
    ($($name:literal),* $(,)?) => {
        pub const ALL: &[Fixture] = &[
            $(Fixture { name: $name, text: include_str!(concat!("../fixtures/", $name, ".netmod")) },)*
        ];
    };
}

fixtures!(
    "baker",
    "vendor",
    "global",
    "take_supply",
    "supply_move",
    "move_sell",
    "step_a",
    "step_b",
    "step_c",
    "step_d",
    "r1",
    "r2",
    "baker_run2",
    "vendor_run2",
    "cycle_first",
    "cycle_second",
    "misordered",
);

pub fn all() -> &'static [Fixture] {
    ALL
}

pub fn document(name: &str) -> Option<ModuleDocument> {
    let f = ALL.iter().find(|f| f.name == name)?;
    Some(parse_module(f.text).unwrap_or_else(|e| panic!("bundled fixture {name} is broken: {e}")))
}

/// Parsed fixture. Panics on an unknown name.
pub fn load(name: &str) -> NetModule {
    document(name).unwrap_or_else(|| panic!("no fixture named {name}")).module
}
