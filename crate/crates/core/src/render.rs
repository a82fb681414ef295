//! Score and trace serialization.

use std::fmt::Write;

use crate::derive::DerivationTrace;
use crate::music::Score;

/// MIDI channels available to instrument tracks (percussion channel 9 is skipped).
pub const MAX_TRACKS: usize = 15;
const PERCUSSION_CHANNEL: u8 = 9;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RenderError {
    #[error("score has {0} tracks; at most {MAX_TRACKS} fit on non-percussion channels")]
    TooManyTracks(usize),
}

/// Canonical line-oriented text form of a score.
pub fn render_text(score: &Score) -> String {
    let mut out = String::new();
    writeln!(out, "score ppq={} tempo={}", score.ppq, score.tempo_bpm).unwrap();
    for (idx, track) in score.tracks.iter().enumerate() {
        writeln!(out, "track {idx} name={} program={}", track.name, track.program).unwrap();
        for e in &track.events {
            if e.is_rest() {
                writeln!(out, "{} {} REST", e.onset, e.duration).unwrap();
            } else {
                let keys: Vec<String> = e.pitches.iter().map(u8::to_string).collect();
                writeln!(out, "{} {} NOTE {} v{}", e.onset, e.duration, keys.join("+"), e.velocity).unwrap();
            }
        }
    }
    out
}

/// Channel for the track at `index`.
pub fn channel_for(index: usize) -> u8 {
    let c = index as u8;
    if c >= PERCUSSION_CHANNEL {
        c + 1
    } else {
        c
    }
}

fn push_vlq(buf: &mut Vec<u8>, mut value: u32) {
    let mut groups = [0u8; 5];
    let mut n = 0;
    loop {
        groups[n] = (value & 0x7f) as u8;
        n += 1;
        value >>= 7;
        if value == 0 {
            break;
        }
    }
    for i in (0..n).rev() {
        let more = if i > 0 { 0x80 } else { 0 };
        buf.push(groups[i] | more);
    }
}

fn push_chunk(out: &mut Vec<u8>, tag: &[u8; 4], body: &[u8]) {
    out.extend_from_slice(tag);
    out.extend_from_slice(&(body.len() as u32).to_be_bytes());
    out.extend_from_slice(body);
}

const END_OF_TRACK: [u8; 3] = [0xff, 0x2f, 0x00];

/// Standard MIDI File, format 1: a tempo track followed by one track per
/// score track. Every message carries its own status byte.
pub fn render_midi(score: &Score) -> Result<Vec<u8>, RenderError> {
    if score.tracks.len() > MAX_TRACKS {
        return Err(RenderError::TooManyTracks(score.tracks.len()));
    }
    let mut out = Vec::new();
    let mut header = Vec::with_capacity(6);
    header.extend_from_slice(&1u16.to_be_bytes());
    header.extend_from_slice(&(score.tracks.len() as u16 + 1).to_be_bytes());
    header.extend_from_slice(&(score.ppq as u16).to_be_bytes());
    push_chunk(&mut out, b"MThd", &header);

    let micros = 60_000_000 / score.tempo_bpm;
    let mut tempo = vec![0x00, 0xff, 0x51, 0x03];
    tempo.extend_from_slice(&micros.to_be_bytes()[1..]);
    tempo.push(0x00);
    tempo.extend_from_slice(&END_OF_TRACK);
    push_chunk(&mut out, b"MTrk", &tempo);

    for (idx, track) in score.tracks.iter().enumerate() {
        let ch = channel_for(idx);
        let mut body = vec![0x00, 0xc0 | ch, track.program & 0x7f];
        // Ticks elapsed since the last written message.
        let mut pending = 0u32;
        for e in &track.events {
            if e.is_rest() {
                pending += e.duration;
                continue;
            }
            for (i, &key) in e.pitches.iter().enumerate() {
                push_vlq(&mut body, if i == 0 { pending } else { 0 });
                body.extend_from_slice(&[0x90 | ch, key, e.velocity]);
            }
            for (i, &key) in e.pitches.iter().enumerate() {
                push_vlq(&mut body, if i == 0 { e.duration } else { 0 });
                body.extend_from_slice(&[0x80 | ch, key, 0]);
            }
            pending = 0;
        }
        push_vlq(&mut body, pending);
        body.extend_from_slice(&END_OF_TRACK);
        push_chunk(&mut out, b"MTrk", &body);
    }
    Ok(out)
}

/// Step-by-step text report of a derivation.
pub fn export_trace(trace: &DerivationTrace) -> String {
    let mut out = String::new();
    writeln!(out, "start: {}", trace.start).unwrap();
    for (k, step) in trace.steps.iter().enumerate() {
        write!(out, "step {}: Q={} pos=[", k + 1, step.tuple).unwrap();
        for (i, e) in step.embeddings.iter().enumerate() {
            if i > 0 {
                out.push('|');
            }
            write!(out, "{e}").unwrap();
        }
        writeln!(out, "] => {}", step.form).unwrap();
    }
    writeln!(out, "status: {}", trace.status).unwrap();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::derive::{DerivationStatus, Embedding, MForm, TraceStep};
    use crate::grammar::SyncTuple;
    use crate::music::{NoteEvent, Track};

    fn track(events: Vec<NoteEvent>) -> Track {
        Track { name: "G1".into(), program: 0, events }
    }

    fn ev(onset: u32, duration: u32, pitches: Vec<u8>) -> NoteEvent {
        NoteEvent { onset, duration, pitches, velocity: 75 }
    }

    #[test]
    fn text_lines() {
        let score = Score::new(vec![track(vec![ev(0, 480, vec![60]), ev(480, 960, vec![])])]);
        assert_eq!(
            render_text(&score),
            "score ppq=480 tempo=120\ntrack 0 name=G1 program=0\n0 480 NOTE 60 v75\n480 960 REST\n"
        );
        let chord = Score::new(vec![track(vec![ev(0, 240, vec![60, 64, 67])])]);
        assert!(render_text(&chord).contains("\n0 240 NOTE 60+64+67 v75\n"));
        let empty = Score::new(vec![track(vec![])]);
        assert_eq!(render_text(&empty), "score ppq=480 tempo=120\ntrack 0 name=G1 program=0\n");
    }

    #[test]
    fn vlq_encoding() {
        let cases: [(u32, &[u8]); 6] = [
            (0, &[0x00]),
            (0x40, &[0x40]),
            (0x7f, &[0x7f]),
            (0x80, &[0x81, 0x00]),
            (480, &[0x83, 0x60]),
            (0x0fff_ffff, &[0xff, 0xff, 0xff, 0x7f]),
        ];
        for (value, bytes) in cases {
            let mut buf = Vec::new();
            push_vlq(&mut buf, value);
            assert_eq!(buf, bytes, "{value}");
        }
    }

    #[test]
    fn single_note_file() {
        let bytes = render_midi(&Score::new(vec![track(vec![ev(0, 480, vec![60])])])).unwrap();
        let expected: Vec<u8> = [
            &b"MThd"[..],
            &[0, 0, 0, 6, 0, 1, 0, 2, 0x01, 0xe0],
            b"MTrk",
            &[0, 0, 0, 11, 0x00, 0xff, 0x51, 0x03, 0x07, 0xa1, 0x20, 0x00, 0xff, 0x2f, 0x00],
            b"MTrk",
            &[0, 0, 0, 16, 0x00, 0xc0, 0x00, 0x00, 0x90, 60, 75, 0x83, 0x60, 0x80, 60, 0, 0x00, 0xff, 0x2f, 0x00],
        ]
        .concat();
        assert_eq!(bytes, expected);
    }

    #[test]
    fn rests_advance_time() {
        let bytes = render_midi(&Score::new(vec![track(vec![ev(0, 480, vec![]), ev(480, 240, vec![62])])])).unwrap();
        let body = &bytes[bytes.len() - 17..];
        assert_eq!(&body[..5], &[0x00, 0xc0, 0x00, 0x83, 0x60]);
        assert_eq!(&body[5..8], &[0x90, 62, 75]);
    }

    #[test]
    fn channels_skip_percussion() {
        assert_eq!(channel_for(0), 0);
        assert_eq!(channel_for(8), 8);
        assert_eq!(channel_for(9), 10);
        assert_eq!(channel_for(14), 15);
        let score = Score::new(vec![track(vec![]); 16]);
        assert_eq!(render_midi(&score), Err(RenderError::TooManyTracks(16)));
        assert!(render_midi(&Score::new(vec![track(vec![]); 15])).is_ok());
    }

    #[test]
    fn trace_report() {
        let start = MForm::parse(&["S1", "S2"]);
        let empty = DerivationTrace { start: start.clone(), steps: vec![], status: DerivationStatus::Stuck };
        assert_eq!(export_trace(&empty), "start: (S1 | S2)\nstatus: stuck\n");

        let step = TraceStep {
            tuple: SyncTuple(vec![2, 2]),
            embeddings: vec![Embedding(vec![0]), Embedding(vec![0])],
            form: MForm::parse(&["A A B A", "A A B A"]),
        };
        let trace = DerivationTrace { start, steps: vec![step], status: DerivationStatus::BudgetExhausted };
        assert_eq!(
            export_trace(&trace),
            "start: (S1 | S2)\nstep 1: Q=(2,2) pos=[(0)|(0)] => (A A B A | A A B A)\nstatus: budget_exhausted\n"
        );
    }
}
