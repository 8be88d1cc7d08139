use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use super::Session;

pub const DEFAULT_IDLE_TIMEOUT_MS: u64 = 600_000;

/// Live sessions keyed by id.
#[derive(Default)]
pub struct SessionTable {
    sessions: BTreeMap<String, Session>,
}

impl SessionTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a session, replacing any with the same id.
    pub fn insert(&mut self, session: Session) -> Option<Session> {
        self.sessions.insert(session.id().into(), session)
    }

    pub fn get(&self, id: &str) -> Option<&Session> {
        self.sessions.get(id)
    }

    pub fn get_mut(&mut self, id: &str) -> Option<&mut Session> {
        self.sessions.get_mut(id)
    }

    pub fn remove(&mut self, id: &str) -> Option<Session> {
        self.sessions.remove(id)
    }

    pub fn len(&self) -> usize {
        self.sessions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sessions.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.sessions.keys().map(String::as_str)
    }

    /// Closes sessions idle for strictly longer than `idle_timeout_ms` and
    /// returns their ids in order.
    pub fn sweep(&mut self, now_us: u64, idle_timeout_ms: u64) -> Vec<String> {
        let limit_us = idle_timeout_ms.saturating_mul(1000);
        let closed: Vec<String> = self
            .sessions
            .iter()
            .filter(|(_, s)| now_us.saturating_sub(s.last_active_us()) > limit_us)
            .map(|(id, _)| id.clone())
            .collect();
        for id in &closed {
            self.sessions.remove(id);
        }
        closed
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gateway::SessionConfig;

    const SEC: u64 = 1_000_000;

    #[test]
    fn sweep_closes_only_idle() {
        let mut t = SessionTable::new();
        assert!(t.sweep(0, DEFAULT_IDLE_TIMEOUT_MS).is_empty());
        t.insert(Session::new("idle", SessionConfig::default(), 0));
        t.insert(Session::new("edge", SessionConfig::default(), SEC));
        t.insert(Session::new("active", SessionConfig::default(), 500 * SEC));
        assert_eq!(t.sweep(601 * SEC, DEFAULT_IDLE_TIMEOUT_MS), ["idle"]);
        assert_eq!(t.ids().collect::<Vec<_>>(), ["active", "edge"]);
        assert_eq!(t.sweep(601 * SEC + 1, DEFAULT_IDLE_TIMEOUT_MS), ["edge"]);
    }
}
