//! Per-session JSONL log of wire traffic.
//!
//! Each line is `{"t_us": .., "dir": "in"|"out", "msg": {..}}` for JSON
//! messages, or `{"t_us": .., "dir": "in", "audio": {"seq": .., "bytes": ..}}`
//! for binary audio frames, whose samples are not stored.

use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use newsgpt_core::gateway::WireMessage;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    In,
    Out,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AudioMark {
    pub seq: u64,
    pub bytes: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogEntry {
    pub t_us: u64,
    pub dir: Direction,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub msg: Option<WireMessage>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub audio: Option<AudioMark>,
}

impl LogEntry {
    pub fn message(t_us: u64, dir: Direction, msg: &WireMessage) -> Self {
        match msg {
            WireMessage::AudioChunk { seq, pcm } => Self {
                t_us,
                dir,
                msg: None,
                audio: Some(AudioMark { seq: *seq, bytes: pcm.len() }),
            },
            other => Self {
                t_us,
                dir,
                msg: Some(other.clone()),
                audio: None,
            },
        }
    }
}

pub struct SessionLog {
    path: PathBuf,
    out: BufWriter<File>,
}

impl SessionLog {
    /// Creates `<dir>/<session_id>.jsonl`, creating `dir` if needed.
    pub fn create(dir: &Path, session_id: &str) -> Result<Self> {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let path = dir.join(format!("{session_id}.jsonl"));
        let file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&path)
            .with_context(|| format!("opening {}", path.display()))?;
        Ok(Self {
            path,
            out: BufWriter::new(file),
        })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn append(&mut self, entry: &LogEntry) -> Result<()> {
        serde_json::to_writer(&mut self.out, entry)?;
        self.out.write_all(b"\n")?;
        self.out.flush()?;
        Ok(())
    }
}

pub fn read_log(path: &Path) -> Result<Vec<LogEntry>> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).with_context(|| format!("{} line {}", path.display(), i + 1))?);
    }
    Ok(out)
}

/// The JSON messages of a log, in order.
pub fn read_messages(path: &Path) -> Result<Vec<WireMessage>> {
    Ok(read_log(path)?.into_iter().filter_map(|e| e.msg).collect())
}

/// A single log file, or every `*.jsonl` in a directory sorted by name.
pub fn log_files(path: &Path) -> Result<Vec<PathBuf>> {
    if !path.is_dir() {
        return Ok(vec![path.to_path_buf()]);
    }
    let mut files: Vec<PathBuf> = std::fs::read_dir(path)
        .with_context(|| format!("reading {}", path.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "jsonl"))
        .collect();
    files.sort();
    Ok(files)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_audio_elided() {
        let dir = tempfile::tempdir().unwrap();
        let mut log = SessionLog::create(dir.path(), "s1").unwrap();
        let q = WireMessage::TextUtterance { text: "hi".into() };
        log.append(&LogEntry::message(1, Direction::In, &q)).unwrap();
        log.append(&LogEntry::message(
            2,
            Direction::In,
            &WireMessage::AudioChunk { seq: 4, pcm: vec![0; 10] },
        ))
        .unwrap();
        let entries = read_log(log.path()).unwrap();
        assert_eq!(entries[1].audio, Some(AudioMark { seq: 4, bytes: 10 }));
        assert_eq!(read_messages(log.path()).unwrap(), [q]);
        let line = std::fs::read_to_string(log.path()).unwrap();
        assert!(line.starts_with(r#"{"t_us":1,"dir":"in","msg":{"type":"text_utterance","text":"hi"}}"#));
        assert_eq!(log_files(dir.path()).unwrap(), [log.path().to_path_buf()]);
    }
}
