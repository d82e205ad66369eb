//! Graphviz export. Weight-1 arrows carry no label; weight-2 arrows are drawn
//! as double arrows with label 0/1.

use crate::quiver::Quiver;
use std::fmt::Write;

pub fn to_dot(q: &Quiver, name: &str) -> String {
    let mut out = String::new();
    let id: String = name.chars().map(|c| if c.is_ascii_alphanumeric() { c } else { '_' }).collect();
    writeln!(out, "digraph \"{}\" {{", if id.is_empty() { "quiver".into() } else { id }).unwrap();
    for v in 0..q.rank() {
        writeln!(out, "  {};", v + 1).unwrap();
    }
    for (i, j) in q.arrows() {
        let w = q.entry(i, j);
        let attrs = match w.to_label() {
            Some(l) if l.num() == 1 && l.den() == 3 => String::new(),
            Some(l) if l.num() == 0 => format!(" [label=\"{l}\", color=\"black:invis:black\"]"),
            Some(l) => format!(" [label=\"{l}\"]"),
            None => format!(" [label=\"{:.6}\"]", w.approx()),
        };
        writeln!(out, "  {} -> {}{};", i + 1, j + 1, attrs).unwrap();
    }
    out.push_str("}\n");
    out
}
