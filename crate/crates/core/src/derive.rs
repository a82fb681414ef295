//! Rule application and synchronized derivation.
//!
//! A single rule `(A1, ..., An) -> (x1, ..., xn)` rewrites one chosen
//! occurrence of each `Ai`, left to right, anywhere in the form. A system
//! step rewrites all `m` components at once with the rules named by one
//! tuple of `Q`. Which occurrences get rewritten is left open by the
//! formalism; [`OccurrencePolicy`] makes that choice explicit.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::grammar::{GrammarSystem, ScatteredRule, Symbol, SyncTuple};

/// A sentential form of one component.
pub type SententialForm = Vec<Symbol>;

/// Strictly increasing positions of the rewritten occurrences, one per lhs symbol.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Embedding(pub Vec<usize>);

impl Embedding {
    pub fn positions(&self) -> &[usize] {
        &self.0
    }
}

impl fmt::Display for Embedding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{p}")?;
        }
        f.write_str(")")
    }
}

/// One sentential form per component.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MForm(pub Vec<SententialForm>);

impl MForm {
    pub fn forms(&self) -> &[SententialForm] {
        &self.0
    }

    pub fn arity(&self) -> usize {
        self.0.len()
    }

    /// Per-component lengths.
    pub fn lengths(&self) -> Vec<usize> {
        self.0.iter().map(Vec::len).collect()
    }

    /// Builds an m-form from space-separated component strings.
    pub fn parse(components: &[&str]) -> Self {
        MForm(components.iter().map(|c| crate::grammar::symbols(c)).collect())
    }
}

impl fmt::Display for MForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, form) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" | ")?;
            }
            write_form(f, form)?;
        }
        f.write_str(")")
    }
}

pub(crate) fn write_form(f: &mut impl fmt::Write, form: &[Symbol]) -> fmt::Result {
    for (i, symbol) in form.iter().enumerate() {
        if i > 0 {
            f.write_str(" ")?;
        }
        f.write_str(symbol.as_str())?;
    }
    Ok(())
}

/// Which occurrences a step rewrites.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OccurrencePolicy {
    /// Lexicographically least embedding in every component.
    Leftmost,
    /// Uniform choice among all embeddings, from a seeded generator.
    Random(u64),
    /// Caller-supplied embeddings, one per component.
    Explicit(Vec<Embedding>),
}

/// How [`Engine::derive_random_with`] picks occurrences once a tuple is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EmbeddingChoice {
    Leftmost,
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DerivationStatus {
    Terminal,
    /// Nonterminals remain but no tuple applies (or a script ran out).
    Stuck,
    BudgetExhausted,
}

impl fmt::Display for DerivationStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DerivationStatus::Terminal => "terminal",
            DerivationStatus::Stuck => "stuck",
            DerivationStatus::BudgetExhausted => "budget_exhausted",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceStep {
    pub tuple: SyncTuple,
    pub embeddings: Vec<Embedding>,
    pub form: MForm,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DerivationTrace {
    pub start: MForm,
    pub steps: Vec<TraceStep>,
    pub status: DerivationStatus,
}

impl DerivationTrace {
    /// The m-form reached by the last step.
    pub fn last_form(&self) -> &MForm {
        self.steps.last().map_or(&self.start, |s| &s.form)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EngineError {
    #[error("embedding {embedding} does not match the left-hand side of rule {label}")]
    InvalidEmbedding { label: u32, embedding: Embedding },
    #[error("m-form has {found} component(s), system has {expected}")]
    ArityMismatch { expected: usize, found: usize },
    #[error("tuple {tuple} is not in the synchronization set")]
    NotInSync { tuple: SyncTuple },
    #[error("tuple {tuple} is not applicable: component {} cannot apply rule {label}", .component + 1)]
    TupleInapplicable { tuple: SyncTuple, component: usize, label: u32 },
    #[error("explicit embeddings do not fit component {}", .component + 1)]
    PolicyMismatch { component: usize },
    #[error("script step {step} failed: {source}")]
    ScriptStepFailed { step: usize, source: Box<EngineError> },
}

/// All embeddings of `rule`'s left-hand side in `form`, in lexicographic order.
pub fn find_embeddings(form: &[Symbol], rule: &ScatteredRule) -> Vec<Embedding> {
    let lhs = &rule.lhs;
    let mut out = Vec::new();
    if lhs.is_empty() || lhs.len() > form.len() {
        return out;
    }
    // Depth-first over positions; `chosen[j]` is the position matched to lhs[j].
    let mut chosen: Vec<usize> = Vec::with_capacity(lhs.len());
    let mut next = 0usize;
    loop {
        let j = chosen.len();
        // Leave room for the remaining lhs symbols.
        let limit = form.len() - (lhs.len() - j);
        match (next..=limit).find(|&i| form[i] == lhs[j]) {
            Some(i) => {
                chosen.push(i);
                if chosen.len() == lhs.len() {
                    out.push(Embedding(chosen.clone()));
                    next = chosen.pop().unwrap() + 1;
                } else {
                    next = i + 1;
                }
            }
            None => match chosen.pop() {
                Some(prev) => next = prev + 1,
                None => break,
            },
        }
    }
    out
}

/// The lexicographically least embedding, found greedily.
pub fn leftmost_embedding(form: &[Symbol], rule: &ScatteredRule) -> Option<Embedding> {
    if rule.lhs.is_empty() {
        return None;
    }
    let mut positions = Vec::with_capacity(rule.lhs.len());
    let mut from = 0;
    for symbol in &rule.lhs {
        let offset = form[from..].iter().position(|s| s == symbol)?;
        positions.push(from + offset);
        from += offset + 1;
    }
    Some(Embedding(positions))
}

fn embedding_matches(form: &[Symbol], rule: &ScatteredRule, e: &Embedding) -> bool {
    let p = &e.0;
    p.len() == rule.lhs.len()
        && !p.is_empty()
        && p.windows(2).all(|w| w[0] < w[1])
        && p.iter().zip(&rule.lhs).all(|(&i, a)| form.get(i) == Some(a))
}

/// Rewrites the occurrences at `e` with the corresponding right-hand parts.
pub fn apply_at(
    form: &[Symbol],
    rule: &ScatteredRule,
    e: &Embedding,
) -> Result<SententialForm, EngineError> {
    if !embedding_matches(form, rule, e) || rule.rhs.len() != rule.lhs.len() {
        return Err(EngineError::InvalidEmbedding { label: rule.label, embedding: e.clone() });
    }
    let grown: usize = rule.rhs.iter().map(Vec::len).sum();
    let mut out = Vec::with_capacity(form.len() + grown - rule.lhs.len());
    let mut from = 0;
    for (&pos, part) in e.0.iter().zip(&rule.rhs) {
        out.extend_from_slice(&form[from..pos]);
        out.extend_from_slice(part);
        from = pos + 1;
    }
    out.extend_from_slice(&form[from..]);
    Ok(out)
}

/// Bounds for [`Engine::enumerate_with`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnumerateOptions {
    pub max_steps: usize,
    /// Stop after this many distinct terminal m-strings. `None` is unbounded.
    pub max_results: Option<usize>,
    /// Drop m-forms in which some component grows beyond this length.
    pub max_form_len: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Enumeration {
    pub strings: BTreeSet<MForm>,
    /// More terminal m-strings were reachable than `max_results`.
    pub truncated: bool,
}

enum Chooser<'p> {
    Leftmost,
    Random(ChaCha8Rng),
    Explicit(&'p [Embedding]),
}

impl<'p> Chooser<'p> {
    fn from_policy(policy: &'p OccurrencePolicy) -> Self {
        match policy {
            OccurrencePolicy::Leftmost => Chooser::Leftmost,
            OccurrencePolicy::Random(seed) => Chooser::Random(ChaCha8Rng::seed_from_u64(*seed)),
            OccurrencePolicy::Explicit(list) => Chooser::Explicit(list),
        }
    }
}

/// Derivation machinery bound to one system.
///
/// The system is assumed to validate; tuples naming undefined rules are
/// simply never applicable.
pub struct Engine<'s> {
    system: &'s GrammarSystem,
    nonterminals: Vec<HashSet<Symbol>>,
    rules: Vec<HashMap<u32, &'s ScatteredRule>>,
    /// Largest lhs length per component.
    max_arity: Vec<usize>,
}

impl<'s> Engine<'s> {
    pub fn new(system: &'s GrammarSystem) -> Self {
        let nonterminals = system
            .components
            .iter()
            .map(|c| c.nonterminals.iter().cloned().collect())
            .collect();
        let rules = system
            .components
            .iter()
            .map(|c| {
                let mut map = HashMap::new();
                for r in &c.rules {
                    map.entry(r.label).or_insert(r);
                }
                map
            })
            .collect();
        let max_arity = system
            .components
            .iter()
            .map(|c| c.rules.iter().map(ScatteredRule::arity).max().unwrap_or(0))
            .collect();
        Engine { system, nonterminals, rules, max_arity }
    }

    pub fn system(&self) -> &'s GrammarSystem {
        self.system
    }

    /// `(S1, ..., Sm)`.
    pub fn start_form(&self) -> MForm {
        MForm(self.system.components.iter().map(|c| vec![c.start.clone()]).collect())
    }

    /// True iff no component form contains a nonterminal.
    pub fn is_terminal(&self, mf: &MForm) -> bool {
        mf.0.iter()
            .zip(&self.nonterminals)
            .all(|(form, nts)| !form.iter().any(|s| nts.contains(s)))
    }

    /// Whether `mf` could still become terminal in `steps` more steps: each
    /// step rewrites at most `max_arity` occurrences per component.
    fn can_finish_within(&self, mf: &MForm, steps: usize) -> bool {
        mf.0.iter().enumerate().all(|(i, form)| {
            let pending = form.iter().filter(|s| self.nonterminals[i].contains(*s)).count();
            pending <= steps.saturating_mul(self.max_arity[i])
        })
    }

    fn rule(&self, component: usize, label: u32) -> Option<&'s ScatteredRule> {
        self.rules.get(component)?.get(&label).copied()
    }

    fn check_arity(&self, mf: &MForm) -> Result<(), EngineError> {
        if mf.arity() != self.system.arity() {
            return Err(EngineError::ArityMismatch { expected: self.system.arity(), found: mf.arity() });
        }
        Ok(())
    }

    fn tuple_applies(&self, mf: &MForm, q: &SyncTuple) -> bool {
        q.arity() == mf.arity()
            && q.0.iter().enumerate().all(|(i, &label)| {
                self.rule(i, label)
                    .is_some_and(|r| leftmost_embedding(&mf.0[i], r).is_some())
            })
    }

    /// Tuples of `Q` whose rules all have an embedding, in declaration order.
    pub fn applicable_tuples(&self, mf: &MForm) -> Vec<&'s SyncTuple> {
        if mf.arity() != self.system.arity() {
            return Vec::new();
        }
        self.system.sync.iter().filter(|q| self.tuple_applies(mf, q)).collect()
    }

    /// One synchronized step: every component applies its rule from `q`.
    pub fn sync_step(
        &self,
        mf: &MForm,
        q: &SyncTuple,
        policy: &OccurrencePolicy,
    ) -> Result<(MForm, Vec<Embedding>), EngineError> {
        self.step_with(mf, q, &mut Chooser::from_policy(policy))
    }

    fn step_with(
        &self,
        mf: &MForm,
        q: &SyncTuple,
        chooser: &mut Chooser<'_>,
    ) -> Result<(MForm, Vec<Embedding>), EngineError> {
        self.check_arity(mf)?;
        if !self.system.sync.contains(q) {
            return Err(EngineError::NotInSync { tuple: q.clone() });
        }
        let mut rules = Vec::with_capacity(q.arity());
        for (component, &label) in q.0.iter().enumerate() {
            let inapplicable = || EngineError::TupleInapplicable { tuple: q.clone(), component, label };
            let rule = self.rule(component, label).ok_or_else(inapplicable)?;
            if leftmost_embedding(&mf.0[component], rule).is_none() {
                return Err(inapplicable());
            }
            rules.push(rule);
        }
        if let Chooser::Explicit(list) = chooser {
            if list.len() != q.arity() {
                return Err(EngineError::PolicyMismatch { component: list.len().min(q.arity()) });
            }
        }

        let mut forms = Vec::with_capacity(q.arity());
        let mut embeddings = Vec::with_capacity(q.arity());
        for (component, rule) in rules.into_iter().enumerate() {
            let form = &mf.0[component];
            let e = match chooser {
                Chooser::Leftmost => leftmost_embedding(form, rule).expect("checked above"),
                Chooser::Random(rng) => {
                    let mut all = find_embeddings(form, rule);
                    let pick = rng.gen_range(0..all.len());
                    all.swap_remove(pick)
                }
                Chooser::Explicit(list) => {
                    let e = list[component].clone();
                    if !embedding_matches(form, rule, &e) {
                        return Err(EngineError::PolicyMismatch { component });
                    }
                    e
                }
            };
            forms.push(apply_at(form, rule, &e)?);
            embeddings.push(e);
        }
        Ok((MForm(forms), embeddings))
    }

    /// Applies `script` from the start form. Ends `Terminal` if the final form
    /// is all-terminal and `Stuck` otherwise.
    pub fn derive_scripted(
        &self,
        script: &[SyncTuple],
        policy: &OccurrencePolicy,
    ) -> Result<DerivationTrace, EngineError> {
        let start = self.start_form();
        let mut chooser = Chooser::from_policy(policy);
        let mut steps: Vec<TraceStep> = Vec::with_capacity(script.len());
        for (step, q) in script.iter().enumerate() {
            let current = steps.last().map_or(&start, |s| &s.form);
            let (form, embeddings) = self
                .step_with(current, q, &mut chooser)
                .map_err(|e| EngineError::ScriptStepFailed { step, source: Box::new(e) })?;
            steps.push(TraceStep { tuple: q.clone(), embeddings, form });
        }
        let last = steps.last().map_or(&start, |s| &s.form);
        let status = if self.is_terminal(last) {
            DerivationStatus::Terminal
        } else {
            DerivationStatus::Stuck
        };
        Ok(DerivationTrace { start, steps, status })
    }

    /// Random controller: uniform over applicable tuples, uniform over embeddings.
    pub fn derive_random(&self, seed: u64, max_steps: usize) -> DerivationTrace {
        self.derive_random_with(seed, max_steps, EmbeddingChoice::Random)
    }

    pub fn derive_random_with(
        &self,
        seed: u64,
        max_steps: usize,
        embeddings: EmbeddingChoice,
    ) -> DerivationTrace {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let start = self.start_form();
        let mut steps: Vec<TraceStep> = Vec::new();
        let status = loop {
            let current = steps.last().map_or(&start, |s| &s.form);
            if self.is_terminal(current) {
                break DerivationStatus::Terminal;
            }
            let tuples = self.applicable_tuples(current);
            if tuples.is_empty() {
                break DerivationStatus::Stuck;
            }
            if steps.len() >= max_steps {
                break DerivationStatus::BudgetExhausted;
            }
            let q = tuples[rng.gen_range(0..tuples.len())];
            let mut chooser = match embeddings {
                EmbeddingChoice::Leftmost => Chooser::Leftmost,
                EmbeddingChoice::Random => Chooser::Random(ChaCha8Rng::seed_from_u64(rng.gen())),
            };
            let (form, embeddings) = self
                .step_with(current, q, &mut chooser)
                .expect("tuple was reported applicable");
            steps.push(TraceStep { tuple: q.clone(), embeddings, form });
        };
        DerivationTrace { start, steps, status }
    }

    /// Every m-form reachable in one step, over all tuples and all embeddings.
    pub fn successors(&self, mf: &MForm) -> Vec<MForm> {
        let mut out = Vec::new();
        for q in self.applicable_tuples(mf) {
            // Rewritten forms per component; the step is their cartesian product.
            let per_component: Vec<Vec<SententialForm>> = q
                .0
                .iter()
                .enumerate()
                .map(|(i, &label)| {
                    let rule = self.rule(i, label).expect("applicable tuple");
                    find_embeddings(&mf.0[i], rule)
                        .iter()
                        .map(|e| apply_at(&mf.0[i], rule, e).expect("found embedding"))
                        .collect()
                })
                .collect();
            let mut odometer = vec![0usize; per_component.len()];
            'product: loop {
                out.push(MForm(
                    odometer.iter().zip(&per_component).map(|(&k, forms)| forms[k].clone()).collect(),
                ));
                for i in (0..odometer.len()).rev() {
                    odometer[i] += 1;
                    if odometer[i] < per_component[i].len() {
                        continue 'product;
                    }
                    odometer[i] = 0;
                }
                break;
            }
        }
        out
    }

    /// Terminal m-strings reachable within `max_steps` steps.
    pub fn enumerate(&self, max_steps: usize, max_results: usize) -> Enumeration {
        self.enumerate_with(&EnumerateOptions {
            max_steps,
            max_results: Some(max_results),
            max_form_len: None,
        })
    }

    pub fn enumerate_with(&self, options: &EnumerateOptions) -> Enumeration {
        let cap = options.max_form_len;
        self.search(options.max_steps, options.max_results, |mf| {
            cap.is_none_or(|n| mf.0.iter().all(|f| f.len() <= n))
        }, None)
    }

    /// Breadth-first closure deduplicated on whole m-forms.
    fn search(
        &self,
        max_steps: usize,
        max_results: Option<usize>,
        keep: impl Fn(&MForm) -> bool,
        target: Option<&MForm>,
    ) -> Enumeration {
        let mut result = Enumeration::default();
        let start = self.start_form();
        if !keep(&start) {
            return result;
        }
        let mut visited: HashSet<MForm> = HashSet::new();
        visited.insert(start.clone());
        let mut frontier = vec![start];
        for depth in 0..=max_steps {
            let mut next = Vec::new();
            for mf in frontier {
                if self.is_terminal(&mf) {
                    if max_results.is_some_and(|limit| result.strings.len() >= limit) {
                        result.truncated = true;
                        return result;
                    }
                    let hit = target == Some(&mf);
                    result.strings.insert(mf);
                    if hit {
                        return result;
                    }
                    continue;
                }
                if depth == max_steps {
                    continue;
                }
                for succ in self.successors(&mf) {
                    if self.can_finish_within(&succ, max_steps - depth - 1)
                        && keep(&succ)
                        && !visited.contains(&succ)
                    {
                        visited.insert(succ.clone());
                        next.push(succ);
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            frontier = next;
        }
        result
    }

    /// Bounded membership: is `candidate` derivable within `max_steps` steps?
    ///
    /// This is a semi-decision restricted to the step bound; `false` only
    /// means "not within the bound".
    pub fn membership(&self, candidate: &MForm, max_steps: usize) -> bool {
        if candidate.arity() != self.system.arity() || !self.is_terminal(candidate) {
            return false;
        }
        let non_erasing = self
            .system
            .components
            .iter()
            .all(|c| c.rules.iter().all(|r| r.rhs.iter().all(|p| !p.is_empty())));
        let caps = candidate.lengths();
        // Terminals are never rewritten, so they must already appear in order.
        let fits = |mf: &MForm| {
            mf.0.iter().enumerate().all(|(i, form)| {
                let mut target = candidate.0[i].iter();
                form.iter()
                    .filter(|s| !self.nonterminals[i].contains(*s))
                    .all(|s| target.any(|t| t == s))
            })
        };
        let found = self.search(
            max_steps,
            None,
            |mf| (!non_erasing || mf.0.iter().zip(&caps).all(|(f, &cap)| f.len() <= cap)) && fits(mf),
            Some(candidate),
        );
        found.strings.contains(candidate)
    }

    /// Re-applies every step of `trace` at its recorded embeddings and checks
    /// that each recorded m-form is reproduced.
    pub fn replay(&self, trace: &DerivationTrace) -> Result<bool, EngineError> {
        if trace.start != self.start_form() {
            return Ok(false);
        }
        let mut current = &trace.start;
        for step in &trace.steps {
            let policy = OccurrencePolicy::Explicit(step.embeddings.clone());
            let (form, _) = self.sync_step(current, &step.tuple, &policy)?;
            if form != step.form {
                return Ok(false);
            }
            current = &step.form;
        }
        Ok(true)
    }
}
