use std::fmt;

use serde::{Deserialize, Serialize};

/// Whether an element (or the label attached to it) belongs to the place or
/// the transition alphabet.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Kind {
    Place,
    Transition,
}

impl Kind {
    pub fn keyword(self) -> &'static str {
        match self {
            Kind::Place => "place",
            Kind::Transition => "trans",
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Kind::Place => f.write_str("place"),
            Kind::Transition => f.write_str("transition"),
        }
    }
}

/// A kind-tagged label. Place labels and transition labels live in disjoint
/// alphabets, so `Label::place("x") != Label::transition("x")`.
///
/// Names are compared byte for byte; no case or whitespace folding happens.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Label {
    kind: Kind,
    name: String,
}

impl Label {
    /// Panics if `name` is empty.
    pub fn new(kind: Kind, name: impl Into<String>) -> Self {
        let name = name.into();
        assert!(!name.is_empty(), "label names must be nonempty");
        Label { kind, name }
    }

    pub fn try_new(kind: Kind, name: impl Into<String>) -> Option<Self> {
        let name = name.into();
        (!name.is_empty()).then_some(Label { kind, name })
    }

    pub fn place(name: impl Into<String>) -> Self {
        Self::new(Kind::Place, name)
    }

    pub fn transition(name: impl Into<String>) -> Self {
        Self::new(Kind::Transition, name)
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn name(&self) -> &str {
        &self.name
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{:?}", self.kind, self.name)
    }
}
