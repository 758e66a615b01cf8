//! Sessions on disk: one append-only JSON-lines event log per session,
//! named `<id>.jsonl` under the data directory. An event is written and
//! synced before the in-memory state changes, so an acknowledged action
//! survives a crash.

use std::collections::HashMap;
use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, RwLock};
use std::time::{SystemTime, UNIX_EPOCH};

use crate::session::{Event, GameError, GameSession, Rules};

fn now_ms() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis() as u64)
        .unwrap_or(0)
}

fn storage<E: std::fmt::Display>(e: E) -> GameError {
    GameError::Storage(e.to_string())
}

/// Session ids are generated UUIDs; anything else never names a file.
fn valid_id(id: &str) -> bool {
    !id.is_empty() && id.len() <= 64 && id.bytes().all(|b| b.is_ascii_hexdigit() || b == b'-')
}

pub struct SessionStore {
    dir: PathBuf,
    rules: Rules,
    sessions: RwLock<HashMap<String, Arc<Mutex<GameSession>>>>,
}

impl SessionStore {
    /// Opens the data directory, replaying every event log found there.
    pub fn open(dir: impl Into<PathBuf>, rules: Rules) -> Result<Self, GameError> {
        let dir = dir.into();
        fs::create_dir_all(&dir).map_err(storage)?;
        let mut sessions = HashMap::new();
        let mut paths: Vec<PathBuf> = fs::read_dir(&dir)
            .map_err(storage)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "jsonl"))
            .collect();
        paths.sort();
        for path in paths {
            let s = load_log(&path)?;
            sessions.insert(s.id.clone(), Arc::new(Mutex::new(s)));
        }
        tracing::info!(sessions = sessions.len(), dir = %dir.display(), "session store opened");
        Ok(SessionStore {
            dir,
            rules,
            sessions: RwLock::new(sessions),
        })
    }

    pub fn rules(&self) -> &Rules {
        &self.rules
    }

    fn log_path(&self, id: &str) -> PathBuf {
        self.dir.join(format!("{id}.jsonl"))
    }

    fn append(&self, id: &str, event: &Event, create: bool) -> Result<(), GameError> {
        let mut line = serde_json::to_vec(event).map_err(storage)?;
        line.push(b'\n');
        let mut opts = OpenOptions::new();
        if create {
            opts.write(true).create_new(true);
        } else {
            opts.append(true);
        }
        let mut f = opts.open(self.log_path(id)).map_err(storage)?;
        f.write_all(&line).map_err(storage)?;
        f.sync_all().map_err(storage)
    }

    fn handle(&self, id: &str) -> Result<Arc<Mutex<GameSession>>, GameError> {
        if !valid_id(id) {
            return Err(GameError::NotFound(id.to_string()));
        }
        self.sessions
            .read()
            .expect("session map lock")
            .get(id)
            .cloned()
            .ok_or_else(|| GameError::NotFound(id.to_string()))
    }

    pub fn create(&self, raw_seed: &str) -> Result<GameSession, GameError> {
        let seed = self.rules.seed(raw_seed)?;
        let id = uuid::Uuid::new_v4().to_string();
        let session = GameSession::create(id.clone(), seed, now_ms());
        self.append(&id, &session.events[0], true)?;
        self.sessions
            .write()
            .expect("session map lock")
            .insert(id, Arc::new(Mutex::new(session.clone())));
        Ok(session)
    }

    /// Consistent copy of the current state.
    pub fn get(&self, id: &str) -> Result<GameSession, GameError> {
        Ok(self.handle(id)?.lock().expect("session lock").clone())
    }

    /// Records a definition. Submissions to one session are serialized by
    /// its lock; the event is on disk before the state is updated.
    pub fn submit<S: AsRef<str>>(
        &self,
        id: &str,
        word: &str,
        tokens: &[S],
    ) -> Result<GameSession, GameError> {
        let handle = self.handle(id)?;
        let mut session = handle.lock().expect("session lock");
        let event = session.prepare_submission(&self.rules, word, tokens, now_ms())?;
        self.append(id, &event, false)?;
        session.apply(event)?;
        Ok(session.clone())
    }

    pub fn ids(&self) -> Vec<String> {
        let mut ids: Vec<String> = self.sessions.read().expect("session map lock").keys().cloned().collect();
        ids.sort();
        ids
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }
}

/// Replays one event log file.
pub fn load_log(path: &Path) -> Result<GameSession, GameError> {
    let f = File::open(path).map_err(storage)?;
    let mut events = Vec::new();
    for (i, line) in BufReader::new(f).lines().enumerate() {
        let line = line.map_err(storage)?;
        if line.trim().is_empty() {
            continue;
        }
        let e: Event = serde_json::from_str(&line)
            .map_err(|e| GameError::Corrupt(format!("{}:{}: {e}", path.display(), i + 1)))?;
        events.push(e);
    }
    GameSession::replay(events)
}
