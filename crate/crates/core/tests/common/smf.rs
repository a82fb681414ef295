//! Structural checker for Standard MIDI Files.

use std::collections::HashMap;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Note {
    pub channel: u8,
    pub key: u8,
    pub velocity: u8,
    pub on: u64,
    pub off: u64,
}

#[derive(Debug, Clone, Default)]
pub struct TrackReport {
    pub end_tick: u64,
    pub notes: Vec<Note>,
    pub programs: Vec<(u8, u8)>,
    pub tempos: Vec<u32>,
}

#[derive(Debug, Clone)]
pub struct SmfReport {
    pub format: u16,
    pub division: u16,
    pub declared_tracks: u16,
    pub tracks: Vec<TrackReport>,
}

fn be32(b: &[u8]) -> u32 {
    u32::from_be_bytes([b[0], b[1], b[2], b[3]])
}

fn vlq(data: &[u8], pos: &mut usize) -> Result<u32, String> {
    let mut v = 0u32;
    for i in 0..4 {
        let b = *data.get(*pos).ok_or("truncated delta time")?;
        *pos += 1;
        v = (v << 7) | u32::from(b & 0x7f);
        if b & 0x80 == 0 {
            return Ok(v);
        }
        if i == 3 {
            return Err("delta time longer than 4 bytes".into());
        }
    }
    unreachable!()
}

pub fn check(bytes: &[u8]) -> Result<SmfReport, String> {
    if bytes.len() < 14 || &bytes[..4] != b"MThd" {
        return Err("missing MThd".into());
    }
    if be32(&bytes[4..8]) != 6 {
        return Err("header length is not 6".into());
    }
    let format = u16::from_be_bytes([bytes[8], bytes[9]]);
    let declared_tracks = u16::from_be_bytes([bytes[10], bytes[11]]);
    let division = u16::from_be_bytes([bytes[12], bytes[13]]);
    let mut pos = 14;
    let mut tracks = Vec::new();
    while pos < bytes.len() {
        if bytes.len() < pos + 8 || &bytes[pos..pos + 4] != b"MTrk" {
            return Err(format!("expected MTrk at byte {pos}"));
        }
        let len = be32(&bytes[pos + 4..pos + 8]) as usize;
        let body = bytes.get(pos + 8..pos + 8 + len).ok_or("chunk length past end of file")?;
        tracks.push(check_track(body).map_err(|e| format!("track {}: {e}", tracks.len()))?);
        pos += 8 + len;
    }
    if tracks.len() != declared_tracks as usize {
        return Err(format!("header declares {declared_tracks} tracks, found {}", tracks.len()));
    }
    Ok(SmfReport { format, division, declared_tracks, tracks })
}

fn check_track(body: &[u8]) -> Result<TrackReport, String> {
    let mut report = TrackReport::default();
    let mut open: HashMap<(u8, u8), (u64, u8)> = HashMap::new();
    let mut now = 0u64;
    let mut pos = 0;
    loop {
        let delta = vlq(body, &mut pos)?;
        let next = now + u64::from(delta);
        if next < now {
            return Err("time went backwards".into());
        }
        now = next;
        let status = *body.get(pos).ok_or("missing status byte")?;
        pos += 1;
        if status < 0x80 {
            return Err(format!("running status at byte {}", pos - 1));
        }
        let data = |pos: usize, n: usize| body.get(pos..pos + n).ok_or_else(|| "truncated message".to_string());
        match status & 0xf0 {
            0x80 => {
                let d = data(pos, 2)?;
                let ch = status & 0x0f;
                let (on, velocity) = open.remove(&(ch, d[0])).ok_or("note-off without note-on")?;
                report.notes.push(Note { channel: ch, key: d[0], velocity, on, off: now });
                pos += 2;
            }
            0x90 => {
                let d = data(pos, 2)?;
                if d[1] == 0 {
                    return Err("note-on with velocity 0".into());
                }
                if open.insert((status & 0x0f, d[0]), (now, d[1])).is_some() {
                    return Err("overlapping note-on for the same key".into());
                }
                pos += 2;
            }
            0xc0 => {
                let d = data(pos, 1)?;
                report.programs.push((status & 0x0f, d[0]));
                pos += 1;
            }
            0xf0 if status == 0xff => {
                let d = data(pos, 1)?;
                let kind = d[0];
                pos += 1;
                let len = vlq(body, &mut pos)? as usize;
                let payload = data(pos, len)?;
                pos += len;
                match kind {
                    0x2f => {
                        if len != 0 || pos != body.len() {
                            return Err("end-of-track is not the last event".into());
                        }
                        if !open.is_empty() {
                            return Err(format!("{} note(s) never released", open.len()));
                        }
                        report.end_tick = now;
                        return Ok(report);
                    }
                    0x51 => {
                        if len != 3 {
                            return Err("bad tempo length".into());
                        }
                        report.tempos.push(u32::from_be_bytes([0, payload[0], payload[1], payload[2]]));
                    }
                    _ => {}
                }
            }
            _ => return Err(format!("unexpected status {status:#04x}")),
        }
        if pos >= body.len() {
            return Err("track has no end-of-track".into());
        }
    }
}
