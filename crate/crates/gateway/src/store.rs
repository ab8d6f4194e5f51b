//! Mazes and hint sessions, persisted write-through to one JSON snapshot.
//!
//! Every mutation rewrites the whole snapshot through a temporary file and
//! a rename, so a crash leaves either the old or the new file. Requests on
//! one session are serialized by a per-session async mutex.

use std::collections::{BTreeMap, HashMap};
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use anyhow::Context;
use mazemate_core::scaffold::HintSession;
use mazemate_core::{parse_maze, serialize_maze, Maze};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::chat::ChatTurn;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionEntry {
    pub maze_id: String,
    pub session: HintSession,
    #[serde(default)]
    pub chat: Vec<ChatTurn>,
}

#[derive(Default, Serialize, Deserialize)]
struct Snapshot {
    /// Canonical maze documents, embedded as JSON.
    mazes: BTreeMap<String, Value>,
    sessions: BTreeMap<String, SessionEntry>,
}

#[derive(Default)]
struct State {
    mazes: BTreeMap<String, Maze>,
    sessions: BTreeMap<String, SessionEntry>,
}

#[derive(Clone, Default)]
pub struct Store {
    inner: Arc<Inner>,
}

#[derive(Default)]
struct Inner {
    state: Mutex<State>,
    locks: Mutex<HashMap<String, Arc<tokio::sync::Mutex<()>>>>,
    path: Option<PathBuf>,
    write: Mutex<()>,
}

impl Store {
    /// In-memory store without persistence.
    pub fn memory() -> Self {
        Store::default()
    }

    /// Opens the snapshot at `path`, starting empty when the file is absent.
    pub fn open(path: impl Into<PathBuf>) -> anyhow::Result<Self> {
        let path = path.into();
        let mut state = State::default();
        if path.exists() {
            let raw = std::fs::read_to_string(&path)
                .with_context(|| format!("reading snapshot {}", path.display()))?;
            let snap: Snapshot = serde_json::from_str(&raw)
                .with_context(|| format!("parsing snapshot {}", path.display()))?;
            for (id, doc) in snap.mazes {
                let m = parse_maze(&doc.to_string())
                    .with_context(|| format!("maze {id:?} in snapshot"))?;
                state.mazes.insert(id, m);
            }
            state.sessions = snap.sessions;
        }
        Ok(Store {
            inner: Arc::new(Inner {
                state: Mutex::new(state),
                path: Some(path),
                ..Inner::default()
            }),
        })
    }

    pub fn snapshot_path(&self) -> Option<&Path> {
        self.inner.path.as_deref()
    }

    fn state(&self) -> std::sync::MutexGuard<'_, State> {
        self.inner.state.lock().unwrap_or_else(|e| e.into_inner())
    }

    pub fn get_maze(&self, id: &str) -> Option<Maze> {
        self.state().mazes.get(id).cloned()
    }

    pub fn put_maze(&self, id: &str, m: Maze) -> anyhow::Result<()> {
        self.state().mazes.insert(id.to_string(), m);
        self.persist()
    }

    pub fn get_session(&self, id: &str) -> Option<SessionEntry> {
        self.state().sessions.get(id).cloned()
    }

    pub fn put_session(&self, entry: SessionEntry) -> anyhow::Result<()> {
        self.state().sessions.insert(entry.session.id.clone(), entry);
        self.persist()
    }

    /// Exclusive access to one session for a read-modify-write.
    pub async fn lock_session(&self, id: &str) -> tokio::sync::OwnedMutexGuard<()> {
        let lock = {
            let mut locks = self.inner.locks.lock().unwrap_or_else(|e| e.into_inner());
            locks.entry(id.to_string()).or_default().clone()
        };
        lock.lock_owned().await
    }

    /// The snapshot as it would be written now.
    pub fn snapshot_json(&self) -> String {
        let snap = {
            let st = self.state();
            Snapshot {
                mazes: st
                    .mazes
                    .iter()
                    .map(|(id, m)| {
                        let doc = serde_json::from_str(&serialize_maze(m)).expect("canonical maze is JSON");
                        (id.clone(), doc)
                    })
                    .collect(),
                sessions: st.sessions.clone(),
            }
        };
        serde_json::to_string_pretty(&snap).expect("snapshot serializes")
    }

    fn persist(&self) -> anyhow::Result<()> {
        let Some(path) = &self.inner.path else {
            return Ok(());
        };
        // serialize under the write lock so a later write never loses to an
        // earlier one
        let _w = self.inner.write.lock().unwrap_or_else(|e| e.into_inner());
        let body = self.snapshot_json();
        let tmp = path.with_extension("tmp");
        std::fs::write(&tmp, body).with_context(|| format!("writing {}", tmp.display()))?;
        std::fs::rename(&tmp, path).with_context(|| format!("replacing {}", path.display()))?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use mazemate_core::maze::Dir;
    use mazemate_core::scaffold::new_session;

    #[test]
    fn reopen_restores_snapshot_byte_identically() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("snap.json");
        let store = Store::open(&path).unwrap();
        let m = Maze::from_picture("S b . G", Dir::East).unwrap();
        store.put_maze("m1", m.clone()).unwrap();
        let session = new_session(&m);
        store
            .put_session(SessionEntry {
                maze_id: "m1".into(),
                session: session.clone(),
                chat: Vec::new(),
            })
            .unwrap();
        let written = std::fs::read_to_string(&path).unwrap();

        let again = Store::open(&path).unwrap();
        assert_eq!(again.get_maze("m1"), Some(m));
        assert_eq!(again.get_session(&session.id).unwrap().session, session);
        assert_eq!(again.snapshot_json(), written);
    }

    #[test]
    fn memory_store_skips_files() {
        let s = Store::memory();
        assert!(s.snapshot_path().is_none());
        s.put_maze("a", Maze::from_picture("S G", Dir::East).unwrap()).unwrap();
        assert!(s.get_maze("a").is_some());
    }
}
