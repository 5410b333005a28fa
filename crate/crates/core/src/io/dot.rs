//! Graphviz DOT export.

use std::fmt::Write;

use crate::io::format::SerializeError;
use crate::label::Kind;
use crate::module::{NetModule, Violation};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DotStyle {
    /// Left-to-right layout with the interfaces in side clusters.
    System,
    /// Additionally ranks nodes by causal depth.
    Run,
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

pub fn to_dot(name: &str, m: &NetModule, style: DotStyle) -> Result<String, SerializeError> {
    if let Err(v) = m.validate() {
        return Err(SerializeError(v.iter().map(Violation::to_string).collect::<Vec<_>>().join("; ")));
    }
    let mut out = String::new();
    let w = &mut out;
    writeln!(w, "digraph \"{}\" {{", escape(name)).unwrap();
    writeln!(w, "  rankdir=LR;").unwrap();
    writeln!(w, "  node [fontsize=10];").unwrap();

    let node = |i: usize| format!("\"{}\"", escape(&m.element(i).id));
    // An element in both interfaces is drawn in the left cluster only.
    for (side, title, members) in [
        ("left", "left interface", m.left().to_vec()),
        ("right", "right interface", m.right().iter().copied().filter(|i| !m.in_left(*i)).collect()),
    ] {
        if members.is_empty() {
            continue;
        }
        writeln!(w, "  subgraph cluster_{side} {{").unwrap();
        writeln!(w, "    label=\"{title}\";").unwrap();
        writeln!(w, "    style=dashed;").unwrap();
        for &i in &members {
            writeln!(w, "    {};", node(i)).unwrap();
        }
        writeln!(w, "  }}").unwrap();
    }

    for (i, e) in m.elements().iter().enumerate() {
        let shape = match e.kind {
            Kind::Place => "circle",
            Kind::Transition => "box",
        };
        let mut marks = Vec::new();
        if let Some(p) = m.left().iter().position(|&x| x == i) {
            marks.push(format!("L{}", p + 1));
        }
        if let Some(p) = m.right().iter().position(|&x| x == i) {
            marks.push(format!("R{}", p + 1));
        }
        write!(w, "  {} [shape={shape}, label=\"{}\"", node(i), escape(e.label.name())).unwrap();
        if !marks.is_empty() {
            write!(w, ", xlabel=\"{}\"", marks.join(" ")).unwrap();
        }
        if e.kind == Kind::Transition {
            write!(w, ", width=0.4, height=0.4").unwrap();
        }
        writeln!(w, "];").unwrap();
    }

    let mut arcs: Vec<(usize, usize)> = m.arcs().to_vec();
    arcs.sort_by(|a, b| (&m.element(a.0).id, &m.element(a.1).id).cmp(&(&m.element(b.0).id, &m.element(b.1).id)));
    for (x, y) in arcs {
        writeln!(w, "  {} -> {};", node(x), node(y)).unwrap();
    }
    for side in [m.left(), m.right()] {
        for pair in side.windows(2) {
            writeln!(w, "  {} -> {} [style=invis];", node(pair[0]), node(pair[1])).unwrap();
        }
    }

    if style == DotStyle::Run {
        if let Some(levels) = m.topological_levels() {
            let depth = levels.iter().copied().max().unwrap_or(0);
            for l in 0..=depth {
                let members: Vec<String> = (0..m.len()).filter(|&i| levels[i] == l).map(node).collect();
                if !members.is_empty() {
                    writeln!(w, "  {{ rank=same; {}; }}", members.join("; ")).unwrap();
                }
            }
        }
    }
    writeln!(w, "}}").unwrap();
    Ok(out)
}
