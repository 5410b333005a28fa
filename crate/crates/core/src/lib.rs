//! Composition calculus for Petri net modules and their partially ordered
//! runs.
//!
//! A [`NetModule`] is a net graph with ordered, labeled left and right
//! interfaces. Modules compose with [`compose`], which fuses matching
//! interface elements. Steps and runs are modules as well; [`run`] builds
//! and enumerates runs, and [`harness`] machine-checks the algebraic laws of
//! the calculus on fixtures and seeded random modules.

pub mod canon;
pub mod compose;
pub mod fixtures;
pub mod harness;
pub mod interface;
pub mod io;
pub mod iso;
pub mod label;
pub mod module;
pub mod run;
pub mod step;

pub use canon::{canonical_form, CanonicalForm};
pub use compose::{compose, compose_all, compose_traced, ComposeError, Composition};
pub use interface::{matches, matchfree, InterfaceView, MatchPair};
pub use iso::{is_isomorphic, isomorphism};
pub use label::{Kind, Label};
pub use module::{Element, ElementIdx, ModuleBuilder, NetModule, Side, Violation};
pub use run::{
    compose_run_sets, extend_run, is_basic_run, recognize_run, runs_upto, ExtendError, Run, RunClassSet, RunMode,
    StepUniverse,
};
pub use step::{basic_step, enumerate_steps, is_step_of, Step};
