#![allow(dead_code)]

pub mod gen;
pub mod oracle;
pub mod smf;

use std::path::PathBuf;

pub fn corpus_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(name)
}

pub fn corpus_text(name: &str) -> String {
    std::fs::read_to_string(corpus_path(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn corpus_system(name: &str) -> scatterscore::grammar::GrammarSystem {
    scatterscore::dsl::load_system(&corpus_text(name), Default::default())
        .unwrap_or_else(|d| panic!("{name}: {d:?}"))
        .system
}

pub const JAZZ_SCRIPT: &str = "2,2;3,3;6,6;4,4;5,5;7,7";
pub const TRIO_SCRIPT: &str = "1,1,1;2,2,2;3,5,3;4,6,4;5,6,5;6,5,6;7,7,7;8,8,8;8,8,9;8,8,10";
