//! Naive reference derivation: every increasing tuple of positions is tried,
//! level by level, with plain strings for symbols.

use std::collections::BTreeSet;

use scatterscore::grammar::GrammarSystem;

pub type Form = Vec<String>;
pub type MString = Vec<Form>;

struct Rule {
    label: u32,
    lhs: Vec<String>,
    rhs: Vec<Vec<String>>,
}

struct Comp {
    nonterminals: BTreeSet<String>,
    rules: Vec<Rule>,
    start: String,
}

pub struct Oracle {
    comps: Vec<Comp>,
    sync: Vec<Vec<u32>>,
}

impl Oracle {
    pub fn new(s: &GrammarSystem) -> Self {
        let comps = s
            .components
            .iter()
            .map(|c| Comp {
                nonterminals: c.nonterminals.iter().map(|n| n.as_str().to_string()).collect(),
                rules: c
                    .rules
                    .iter()
                    .map(|r| Rule {
                        label: r.label,
                        lhs: r.lhs.iter().map(|x| x.as_str().to_string()).collect(),
                        rhs: r
                            .rhs
                            .iter()
                            .map(|p| p.iter().map(|x| x.as_str().to_string()).collect())
                            .collect(),
                    })
                    .collect(),
                start: c.start.as_str().to_string(),
            })
            .collect();
        Oracle { comps, sync: s.sync.iter().map(|q| q.0.clone()).collect() }
    }

    fn terminal(&self, mf: &MString) -> bool {
        mf.iter().zip(&self.comps).all(|(f, c)| f.iter().all(|x| !c.nonterminals.contains(x)))
    }

    /// Every way to rewrite `form` with `rule`, trying every increasing
    /// choice of positions.
    pub fn rewrites(form: &[String], lhs: &[String], rhs: &[Vec<String>]) -> Vec<Form> {
        let mut out = Vec::new();
        for picked in combinations(form.len(), lhs.len()) {
            if picked.iter().zip(lhs).any(|(&i, a)| &form[i] != a) {
                continue;
            }
            let mut w = Vec::new();
            let mut j = 0;
            for (i, x) in form.iter().enumerate() {
                if j < picked.len() && picked[j] == i {
                    w.extend(rhs[j].iter().cloned());
                    j += 1;
                } else {
                    w.push(x.clone());
                }
            }
            out.push(w);
        }
        out
    }

    fn step(&self, mf: &MString) -> Vec<MString> {
        let mut out = Vec::new();
        for q in &self.sync {
            if q.len() != self.comps.len() {
                continue;
            }
            let mut partial: Vec<MString> = vec![Vec::new()];
            for (i, label) in q.iter().enumerate() {
                let mut options = Vec::new();
                for r in self.comps[i].rules.iter().filter(|r| r.label == *label).take(1) {
                    options = Self::rewrites(&mf[i], &r.lhs, &r.rhs);
                }
                let mut grown = Vec::new();
                for p in &partial {
                    for o in &options {
                        let mut p = p.clone();
                        p.push(o.clone());
                        grown.push(p);
                    }
                }
                partial = grown;
            }
            out.extend(partial);
        }
        out
    }

    /// Terminal m-strings reachable in at most `depth` steps without any
    /// component exceeding `max_len` symbols.
    pub fn language(&self, depth: usize, max_len: usize) -> BTreeSet<MString> {
        let start: MString = self.comps.iter().map(|c| vec![c.start.clone()]).collect();
        let mut level: BTreeSet<MString> = BTreeSet::from([start]);
        let mut found = BTreeSet::new();
        for d in 0..=depth {
            let mut next = BTreeSet::new();
            for mf in &level {
                if self.terminal(mf) {
                    found.insert(mf.clone());
                } else if d < depth {
                    for succ in self.step(mf) {
                        if succ.iter().all(|f| f.len() <= max_len) {
                            next.insert(succ);
                        }
                    }
                }
            }
            level = next;
        }
        found
    }
}

pub fn mstring_of(mf: &scatterscore::derive::MForm) -> MString {
    mf.forms().iter().map(|f| f.iter().map(|s| s.as_str().to_string()).collect()).collect()
}

/// All `k`-element subsets of `0..n`, each ascending.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    if n < k {
        return Vec::new();
    }
    let mut out = combinations(n - 1, k);
    for mut c in combinations(n - 1, k - 1) {
        c.push(n - 1);
        out.push(c);
    }
    out
}
