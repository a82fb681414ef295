//! Random valid systems.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use scatterscore::grammar::{
    Accidental, AttributeVector, ChordTone, Component, Duration, Dynamic, GrammarSystem, Operation, Payload, Pitch,
    PitchLetter, ScatteredRule, Symbol, SyncTuple, TokenDef,
};

const NONTERMINALS: [&str; 3] = ["S", "A", "B"];
const TERMINALS: [&str; 2] = ["a", "b"];

fn sym(s: &str) -> Symbol {
    Symbol::new(s)
}

/// A small non-erasing system: m ≤ 3 components, ≤ 8 rules in total.
/// Rule 1 rewrites S, rule 2 finishes A, rule 4 (if any) finishes B, and the
/// rest are arbitrary rules that tend to keep a derivation going.
/// Q holds every label combination when there are at most 64.
pub fn small_system(seed: u64) -> GrammarSystem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = rng.gen_range(1..=3);
    let mut budget = 8;
    let mut components: Vec<Component> = Vec::new();
    for i in 0..m {
        let name = format!("G{}", i + 1);
        let reserve = 2 * (m - i - 1);
        // Most later components shadow the first so that they can keep pace.
        if i > 0 && components[0].rules.len() <= budget - reserve && rng.gen_bool(0.7) {
            let mut c = components[0].clone();
            c.name = name;
            budget -= c.rules.len();
            for r in &mut c.rules {
                for s in r.rhs.iter_mut().flatten() {
                    if TERMINALS.contains(&s.as_str()) && rng.gen_bool(0.3) {
                        *s = sym(TERMINALS[rng.gen_range(0..2)]);
                    }
                }
            }
            components.push(c);
            continue;
        }
        let mut c = Component::new(&name, "S");
        c.nonterminals = NONTERMINALS.iter().map(|n| sym(n)).collect();
        c.tokens = TERMINALS
            .iter()
            .map(|t| TokenDef { name: sym(t), payload: Payload::Rest, attrs: AttributeVector::default() })
            .collect();
        let count = rng.gen_range(2..=(budget - reserve).min(4)) as u32;
        budget -= count as usize;
        let live = if count >= 4 { &NONTERMINALS[1..] } else { &NONTERMINALS[1..2] };
        let part = |rng: &mut ChaCha8Rng, max: usize, p_terminal: f64| -> Vec<Symbol> {
            (0..rng.gen_range(1..=max))
                .map(|_| {
                    if rng.gen_bool(p_terminal) {
                        sym(TERMINALS[rng.gen_range(0..2)])
                    } else {
                        sym(live[rng.gen_range(0..live.len())])
                    }
                })
                .collect()
        };
        for label in 1..=count {
            let rule = match label {
                1 => ScatteredRule::new(1, vec![sym("S")], vec![part(&mut rng, 3, 0.3)]),
                2 => ScatteredRule::new(2, vec![sym("A")], vec![part(&mut rng, 2, 1.0)]),
                4 => ScatteredRule::new(4, vec![sym("B")], vec![part(&mut rng, 2, 1.0)]),
                _ => {
                    let arity = rng.gen_range(1..=2);
                    let lhs = (0..arity).map(|_| sym(live[rng.gen_range(0..live.len())])).collect();
                    let rhs = (0..arity)
                        .map(|_| {
                            let mut p = part(&mut rng, 1, 1.0);
                            p.extend(part(&mut rng, 2, 0.4));
                            p
                        })
                        .collect();
                    ScatteredRule::new(label, lhs, rhs)
                }
            };
            c.rules.push(rule);
        }
        components.push(c);
    }
    let counts: Vec<u32> = components.iter().map(|c| c.rules.len() as u32).collect();
    let mut sync: Vec<SyncTuple> = Vec::new();
    if counts.iter().product::<u32>() <= 64 {
        let mut q = vec![1u32; m];
        'all: loop {
            sync.push(SyncTuple(q.clone()));
            for i in (0..m).rev() {
                q[i] += 1;
                if q[i] <= counts[i] {
                    continue 'all;
                }
                q[i] = 1;
            }
            break;
        }
    } else {
        sync.push(SyncTuple(vec![1; m]));
        for _ in 0..rng.gen_range(3..=8) {
            let q = SyncTuple(counts.iter().map(|&n| rng.gen_range(1..=n)).collect());
            if !sync.contains(&q) {
                sync.push(q);
            }
        }
    }
    GrammarSystem { name: format!("rand{seed}"), components, sync }
}

const IDENTS: [&str; 8] = ["S", "T", "T_down", "X1", "Y", "M31", "node", "q_2"];
const TOKENS: [&str; 8] = ["c_y", "r_q", "alpha_z", "g2", "e_dn", "x", "tok", "f_h2"];
const LABEL_OPS: [&str; 4] = ["P", "R", "r", "inv"];

fn pick<'a>(rng: &mut ChaCha8Rng, from: &[&'a str]) -> &'a str {
    from.choose(rng).copied().unwrap()
}

fn pitch(rng: &mut ChaCha8Rng) -> Pitch {
    let letters = [
        PitchLetter::C,
        PitchLetter::D,
        PitchLetter::E,
        PitchLetter::F,
        PitchLetter::G,
        PitchLetter::A,
        PitchLetter::H,
    ];
    let acc = [Accidental::Natural, Accidental::Sharp, Accidental::Flat];
    Pitch::new(*letters.choose(rng).unwrap(), *acc.choose(rng).unwrap())
}

fn attrs(rng: &mut ChaCha8Rng) -> AttributeVector {
    let op = match rng.gen_range(0..7) {
        0 => Operation::Down,
        1 => Operation::Up,
        2 => Operation::Flat,
        3 => Operation::Sharp,
        4 => Operation::Label(pick(rng, &LABEL_OPS).to_string()),
        _ => Operation::None,
    };
    let durs = [Duration::Eighth, Duration::Quarter, Duration::Half, Duration::Whole];
    let dyns = [
        Dynamic::Pianissimo,
        Dynamic::Piano,
        Dynamic::MezzoPiano,
        Dynamic::MezzoForte,
        Dynamic::Forte,
        Dynamic::Fortissimo,
    ];
    AttributeVector {
        op,
        dur: if rng.gen_bool(0.8) { durs.choose(rng).copied() } else { None },
        reg: if rng.gen_bool(0.8) { Some(rng.gen_range(-2..=3)) } else { None },
        dynamic: if rng.gen_bool(0.5) { dyns.choose(rng).copied() } else { None },
    }
}

/// A richer valid system exercising every DSL construct.
pub fn rich_system(seed: u64) -> GrammarSystem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = rng.gen_range(1..=4);
    let mut components = Vec::new();
    for i in 0..m {
        let mut names: Vec<&str> = IDENTS.to_vec();
        names.shuffle(&mut rng);
        let nts: Vec<&str> = names[..rng.gen_range(1..=4)].to_vec();
        let mut c = Component::new(&format!("G{}", i + 1), nts[0]);
        c.nonterminals = nts.iter().map(|n| sym(n)).collect();
        c.program = rng.gen_range(0..=127);
        c.octave_offset = rng.gen_range(-2..=2);
        let mut toks: Vec<&str> = TOKENS.to_vec();
        toks.shuffle(&mut rng);
        let toks: Vec<&str> = toks[..rng.gen_range(1..=5)].to_vec();
        for t in &toks {
            let payload = match rng.gen_range(0..3) {
                0 => Payload::Rest,
                1 => Payload::Note(pitch(&mut rng)),
                _ => Payload::Chord(
                    (0..rng.gen_range(2..=4))
                        .map(|_| ChordTone {
                            pitch: pitch(&mut rng),
                            register: if rng.gen_bool(0.3) { Some(rng.gen_range(1..=3)) } else { None },
                        })
                        .collect(),
                ),
            };
            c.tokens.push(TokenDef { name: sym(t), payload, attrs: attrs(&mut rng) });
        }
        let alphabet: Vec<&str> = nts.iter().chain(toks.iter()).copied().collect();
        let mut labels: Vec<u32> = (1..=12).collect();
        labels.shuffle(&mut rng);
        for &label in &labels[..rng.gen_range(1..=4)] {
            let arity = rng.gen_range(1..=3);
            let lhs = (0..arity).map(|_| sym(pick(&mut rng, &nts))).collect();
            let rhs = (0..arity)
                .map(|_| (0..rng.gen_range(1..=4)).map(|_| sym(pick(&mut rng, &alphabet))).collect())
                .collect();
            c.rules.push(ScatteredRule::new(label, lhs, rhs));
        }
        c.rules.sort_by_key(|r| r.label);
        components.push(c);
    }
    let sync = (0..rng.gen_range(1..=4))
        .map(|_| SyncTuple(components.iter().map(|c| c.rules.choose(&mut rng).unwrap().label).collect()))
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .collect();
    GrammarSystem { name: format!("sys{seed}"), components, sync }
}
