use super::{Component, GrammarSystem, ScatteredRule};

/// Structural class of a single rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RuleClass {
    /// Exactly one rewritten nonterminal.
    pub is_context_free: bool,
    /// Every right-hand part has at most one symbol.
    pub is_simple: bool,
    /// Context-free with at most one nonterminal on the right.
    pub is_linear: bool,
    /// Some right-hand part is empty.
    pub is_erasing: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentClass {
    pub rules: Vec<(u32, RuleClass)>,
    pub context_free: bool,
    pub linear: bool,
    pub non_erasing: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SystemClass {
    pub components: Vec<ComponentClass>,
    pub context_free_restricted: bool,
    pub linear_restricted: bool,
    pub non_erasing: bool,
}

/// Classifies `rule` as it appears in `component`; the component decides
/// which right-hand symbols count as nonterminals.
pub fn classify_rule(rule: &ScatteredRule, component: &Component) -> RuleClass {
    let is_context_free = rule.lhs.len() == 1;
    let rhs_nonterminals = rule
        .rhs
        .iter()
        .flatten()
        .filter(|s| component.is_nonterminal(s))
        .count();
    RuleClass {
        is_context_free,
        is_simple: rule.rhs.iter().all(|part| part.len() <= 1),
        is_linear: is_context_free && rhs_nonterminals <= 1,
        is_erasing: rule.rhs.iter().any(Vec::is_empty),
    }
}

pub fn classify_component(component: &Component) -> ComponentClass {
    let mut rules: Vec<_> = component
        .rules
        .iter()
        .map(|r| (r.label, classify_rule(r, component)))
        .collect();
    rules.sort_by_key(|(label, _)| *label);
    ComponentClass {
        context_free: rules.iter().all(|(_, c)| c.is_context_free),
        linear: rules.iter().all(|(_, c)| c.is_linear),
        non_erasing: rules.iter().all(|(_, c)| !c.is_erasing),
        rules,
    }
}

pub fn classify_system(system: &GrammarSystem) -> SystemClass {
    let components: Vec<_> = system.components.iter().map(classify_component).collect();
    SystemClass {
        context_free_restricted: components.iter().all(|c| c.context_free),
        linear_restricted: components.iter().all(|c| c.linear),
        non_erasing: components.iter().all(|c| c.non_erasing),
        components,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::Symbol;

    fn component(nts: &str) -> Component {
        let mut c = Component::new("G", "S");
        c.nonterminals = crate::grammar::symbols(nts);
        c
    }

    #[test]
    fn form_rule_is_context_free_not_linear() {
        let c = component("S A B");
        let class = classify_rule(&ScatteredRule::context_free(1, "S", "A A B A"), &c);
        assert_eq!(
            class,
            RuleClass { is_context_free: true, is_simple: false, is_linear: false, is_erasing: false }
        );
    }

    #[test]
    fn two_part_simple_rule() {
        let c = component("A B");
        let class = classify_rule(&ScatteredRule::scattered(2, "A B", &["a", "b"]), &c);
        assert!(!class.is_context_free);
        assert!(class.is_simple);
        assert!(!class.is_linear);
        assert!(!class.is_erasing);
    }

    #[test]
    fn right_linear_rule() {
        let c = component("A B");
        let class = classify_rule(&ScatteredRule::context_free(3, "A", "a B"), &c);
        assert!(class.is_context_free && class.is_linear);
        assert!(!class.is_simple);
    }

    #[test]
    fn erasing_flag() {
        let c = component("A");
        let rule = ScatteredRule::new(4, vec![Symbol::new("A")], vec![vec![]]);
        let class = classify_rule(&rule, &c);
        assert!(class.is_erasing && class.is_simple && class.is_linear);
    }

    #[test]
    fn system_aggregates() {
        let mut c = component("S A");
        c.rules.push(ScatteredRule::context_free(1, "S", "a A"));
        c.rules.push(ScatteredRule::context_free(2, "A", "a"));
        let mut s = GrammarSystem { name: "t".into(), components: vec![c.clone(), c], sync: vec![] };
        let class = classify_system(&s);
        assert!(class.context_free_restricted && class.linear_restricted && class.non_erasing);

        s.components[1].rules.push(ScatteredRule::new(3, vec![Symbol::new("A")], vec![vec![]]));
        let class = classify_system(&s);
        assert!(class.context_free_restricted);
        assert!(!class.non_erasing);
        assert!(!class.components[1].non_erasing);
        assert!(class.components[0].non_erasing);
    }
}
