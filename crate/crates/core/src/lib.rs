//! Multi-generative rule-synchronized scattered context grammar systems
//! for generating synchronized multi-instrument scores.
//!
//! - [`grammar`]: symbols, rules, components, systems; validation and classification.
//! - [`derive`]: rule application, synchronized steps, controllers, enumeration.
//! - [`dsl`]: the `.mgs` text format (parser and canonical printer).
//! - [`music`]: interpretation of terminal strings as timed tracks.
//! - [`render`]: text scores, Standard MIDI Files, derivation traces.
//! - [`cli`]: the `scatterscore` command line.

pub mod cli;
pub mod derive;
pub mod dsl;
pub mod grammar;
pub mod music;
pub mod render;
