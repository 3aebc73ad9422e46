use std::fmt::Write;

use crate::ast::*;

/// Renders a program in canonical layout: two-space indentation, one member
/// per line. Parsing the output yields a structurally equal program.
pub fn pretty_print(p: &Program) -> String {
    let mut out = String::new();
    for pragma in &p.pragmas {
        let _ = writeln!(out, "#pragma {}={}", pragma.key, pragma.value);
    }
    for m in &p.members {
        member(&mut out, m, 0);
    }
    out
}

fn indent(out: &mut String, depth: usize) {
    out.extend(std::iter::repeat_n("  ", depth));
}

fn member(out: &mut String, m: &Member, depth: usize) {
    match m {
        Member::Module(md) => {
            indent(out, depth);
            if md.members.is_empty() {
                let _ = writeln!(out, "module {} {{ }}", md.name.name);
                return;
            }
            let _ = writeln!(out, "module {} {{", md.name.name);
            for inner in &md.members {
                member(out, inner, depth + 1);
            }
            indent(out, depth);
            out.push_str("}\n");
        }
        Member::Import(i) => {
            indent(out, depth);
            let _ = writeln!(out, "import {}", i.target);
        }
        Member::Class(c) => class(out, c, depth),
    }
}

fn class(out: &mut String, c: &ClassDef, depth: usize) {
    indent(out, depth);
    let _ = write!(out, "class {}", c.name.name);
    if let Some(e) = &c.extends {
        let _ = write!(out, " : {} {}", e.acc.as_str(), e.name.name);
    }
    if c.members.is_empty() {
        out.push_str(" { }\n");
        return;
    }
    out.push_str(" {\n");
    for m in &c.members {
        match m {
            ClassMember::Field(f) => {
                indent(out, depth + 1);
                let _ = writeln!(
                    out,
                    "{} var {} = {}",
                    modifier_text(&f.modifier),
                    f.name.name,
                    expr_text(&f.init)
                );
            }
            ClassMember::Class(inner) => class(out, inner, depth + 1),
        }
    }
    indent(out, depth);
    out.push_str("}\n");
}

pub fn modifier_text(m: &Modifier) -> String {
    match &m.keyword {
        Some(k) => k.to_string(),
        None => "?".to_string(),
    }
}

pub fn expr_text(e: &Expr) -> String {
    match &e.kind {
        ExprKind::Int(n) => n.to_string(),
        ExprKind::Ref(x) => x.name.clone(),
        ExprKind::New(x) => format!("new {}()", x.name),
        ExprKind::Field(inner, x) => match inner.kind {
            ExprKind::Add(..) => format!("({}).{}", expr_text(inner), x.name),
            _ => format!("{}.{}", expr_text(inner), x.name),
        },
        ExprKind::Add(a, b) => match b.kind {
            ExprKind::Add(..) => format!("{} + ({})", expr_text(a), expr_text(b)),
            _ => format!("{} + {}", expr_text(a), expr_text(b)),
        },
    }
}
