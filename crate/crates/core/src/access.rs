//! Access permission (the AP rules) and path access (the P rules).

use std::collections::BTreeSet;
use std::sync::OnceLock;

use scopegraph::{resolve, CandidateOrder, Label, LabelOrder, LabelRegex, ScopeId};

use crate::config::{ReferenceRule, VariantConfig};
use crate::decl::{AmlGraph, AmlPath, Decl};
use crate::policy::{Policy, ScopeSet};

struct Regexes {
    enc_m: LabelRegex<Label>,
    enc_c: LabelRegex<Label>,
    lex_only: LabelRegex<Label>,
    plain_inheritance: LabelRegex<Label>,
    hidden_suffix: LabelRegex<Label>,
}

fn regexes() -> &'static Regexes {
    static R: OnceLock<Regexes> = OnceLock::new();
    R.get_or_init(|| {
        let p = |t: &str| scopegraph::parse_regex(t).expect("built-in regex");
        Regexes {
            enc_m: p("LEX* THIS_M"),
            enc_c: p("LEX* THIS_C"),
            lex_only: p("LEX*"),
            plain_inheritance: p("LEX* EXT*"),
            hidden_suffix: p("EXT_PRV? (EXT|EXT_PRT)*"),
        }
    })
}

fn enclosing(g: &AmlGraph, s: ScopeId, regex: &LabelRegex<Label>, innermost: Option<Label>) -> Vec<ScopeId> {
    let order = match innermost {
        Some(this) => CandidateOrder::Labels(LabelOrder::chain(&[this, Label::Lex]).expect("order")),
        None => CandidateOrder::None,
    };
    resolve(g, s, regex, &|_: &Decl| true, &order)
        .into_iter()
        .filter_map(|c| c.data.body())
        .collect()
}

pub fn enclosing_modules(g: &AmlGraph, s: ScopeId) -> ScopeSet {
    enclosing(g, s, &regexes().enc_m, None).into_iter().collect()
}

pub fn enclosing_module_innermost(g: &AmlGraph, s: ScopeId) -> Option<ScopeId> {
    enclosing(g, s, &regexes().enc_m, Some(Label::ThisM)).into_iter().next()
}

pub fn enclosing_classes(g: &AmlGraph, s: ScopeId) -> ScopeSet {
    enclosing(g, s, &regexes().enc_c, None).into_iter().collect()
}

pub fn enclosing_class_innermost(g: &AmlGraph, s: ScopeId) -> Option<ScopeId> {
    enclosing(g, s, &regexes().enc_c, Some(Label::ThisC)).into_iter().next()
}

/// Whether `s` lies inside one of `mods` under the configured rule.
fn module_ok(g: &AmlGraph, s: ScopeId, mods: &ScopeSet, cfg: &VariantConfig) -> bool {
    match cfg.internal_reference_rule {
        ReferenceRule::AnyEnclosing => !enclosing_modules(g, s).is_disjoint(mods),
        ReferenceRule::Innermost => enclosing_module_innermost(g, s).is_some_and(|m| mods.contains(&m)),
    }
}

fn mod_check(g: &AmlGraph, s: ScopeId, p: &AmlPath, mods: &ScopeSet, cfg: &VariantConfig, whole_path: bool) -> bool {
    if !module_ok(g, s, mods, cfg) {
        return false;
    }
    if !whole_path {
        return true;
    }
    let tgt = p.tgt();
    p.scopes()
        .into_iter()
        .filter(|&x| x != tgt)
        .all(|x| module_ok(g, x, mods, cfg))
}

fn prt_check(g: &AmlGraph, s: ScopeId, p: &AmlPath) -> bool {
    let scopes: BTreeSet<ScopeId> = p.scopes().into_iter().collect();
    !enclosing_classes(g, s).is_disjoint(&scopes)
}

/// The universal private fallback, shaped by the Java/C# switches.
fn private_check(g: &AmlGraph, s: ScopeId, p: &AmlPath, cfg: &VariantConfig) -> bool {
    if cfg.private_path_must_be_lexical && !regexes().lex_only.matches(&p.labels()) {
        return false;
    }
    let encl = enclosing_classes(g, s);
    encl.contains(&p.tgt())
        || (cfg.private_shared_enclosing && !encl.is_disjoint(&enclosing_classes(g, p.tgt())))
}

/// Whether policy `a` grants access from reference scope `s` along `p`.
pub fn permits(g: &AmlGraph, s: ScopeId, p: &AmlPath, a: &Policy, cfg: &VariantConfig) -> bool {
    let head = match a {
        Policy::Pub => true,
        Policy::Prv => false,
        Policy::Prt => prt_check(g, s, p),
        Policy::Mod(m) => mod_check(g, s, p, m, cfg, cfg.internal_whole_path),
        Policy::Smc(m) => mod_check(g, s, p, m, cfg, cfg.internal_whole_path) && prt_check(g, s, p),
        Policy::Smd(m) => prt_check(g, s, p) || mod_check(g, s, p, m, cfg, false),
    };
    head || private_check(g, s, p, cfg)
}

/// Whether the inheritance labels on `p` leave the target visible from `s`.
pub fn path_permits(g: &AmlGraph, s: ScopeId, p: &AmlPath, cfg: &VariantConfig) -> bool {
    if !cfg.inheritance_modifiers {
        return true;
    }
    let r = regexes();
    if r.plain_inheritance.matches(&p.labels()) {
        return true;
    }
    enclosing_classes(g, s).into_iter().any(|c| match p.split_at(c) {
        Some((p1, p2)) => r.plain_inheritance.matches(&p1.labels()) && r.hidden_suffix.matches(&p2.labels()),
        None => false,
    })
}
