use std::fmt::Write;

use crate::grammar::{Component, GrammarSystem, Payload, ScatteredRule, Symbol};

/// Canonical text for `s`: components in declaration order, rules sorted by
/// label, tuples in declaration order, two-space indentation, one item per line.
pub fn print_system(s: &GrammarSystem) -> String {
    let mut out = String::new();
    writeln!(out, "system {} {{", s.name).unwrap();
    for c in &s.components {
        print_component(&mut out, c);
    }
    out.push_str("  sync {\n");
    for q in &s.sync {
        let labels: Vec<String> = q.0.iter().map(u32::to_string).collect();
        writeln!(out, "    ({})", labels.join(", ")).unwrap();
    }
    out.push_str("  }\n}\n");
    out
}

fn print_component(out: &mut String, c: &Component) {
    writeln!(out, "  component {} {{", c.name).unwrap();
    writeln!(out, "    start {}", c.start).unwrap();
    writeln!(out, "    nonterminals {};", join(&c.nonterminals)).unwrap();
    writeln!(out, "    program {};", c.program).unwrap();
    writeln!(out, "    octave_offset {};", c.octave_offset).unwrap();
    if !c.tokens.is_empty() {
        out.push_str("    tokens {\n");
        for t in &c.tokens {
            let payload = match &t.payload {
                Payload::Note(p) => format!("note {p}"),
                Payload::Rest => "rest".to_string(),
                Payload::Chord(tones) => {
                    let tones: Vec<String> = tones.iter().map(ToString::to_string).collect();
                    format!("chord {}", tones.join("+"))
                }
            };
            writeln!(out, "      {} = {} {};", t.name, payload, t.attrs).unwrap();
        }
        out.push_str("    }\n");
    }
    let mut rules: Vec<&ScatteredRule> = c.rules.iter().collect();
    rules.sort_by_key(|r| r.label);
    for r in rules {
        writeln!(out, "    rule {}: {};", r.label, rule_body(r)).unwrap();
    }
    out.push_str("  }\n");
}

fn rule_body(r: &ScatteredRule) -> String {
    let part = |p: &Vec<Symbol>| if p.is_empty() { "%empty".to_string() } else { join(p) };
    if r.lhs.len() == 1 && r.rhs.len() == 1 {
        return format!("{} -> {}", r.lhs[0], part(&r.rhs[0]));
    }
    let lhs: Vec<&str> = r.lhs.iter().map(Symbol::as_str).collect();
    let lhs = if r.lhs.len() == 1 { lhs[0].to_string() } else { format!("({})", lhs.join(", ")) };
    let rhs: Vec<String> = r.rhs.iter().map(part).collect();
    format!("{} -> ({})", lhs, rhs.join(", "))
}

fn join(symbols: &[Symbol]) -> String {
    let names: Vec<&str> = symbols.iter().map(Symbol::as_str).collect();
    names.join(" ")
}
