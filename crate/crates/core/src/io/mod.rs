//! Text I/O: the `.netmod` format and DOT export.

pub mod dot;
pub mod format;

pub use dot::{to_dot, DotStyle};
pub use format::{parse_module, serialize_module, ModuleDocument, ParseError, ParseErrorKind, SerializeError, Span};
