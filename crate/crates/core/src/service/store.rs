use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, RwLock};

use super::{Session, SessionConfig, ServiceError};

/// Sessions in memory, optionally mirrored as one JSON file per session.
/// Each session has its own lock, so mutations of one session are serialized
/// while different sessions proceed independently.
#[derive(Debug, Default)]
pub struct SessionStore {
    sessions: RwLock<HashMap<String, Arc<Mutex<Session>>>>,
    dir: Option<PathBuf>,
}

impl SessionStore {
    pub fn in_memory() -> SessionStore {
        SessionStore::default()
    }

    /// Store persisted under `dir`, loading any sessions already there.
    pub fn persistent(dir: impl Into<PathBuf>) -> Result<SessionStore, ServiceError> {
        let dir = dir.into();
        fs::create_dir_all(&dir).map_err(|e| storage(&dir, e))?;
        let mut sessions = HashMap::new();
        for entry in fs::read_dir(&dir).map_err(|e| storage(&dir, e))? {
            let path = entry.map_err(|e| storage(&dir, e))?.path();
            if path.extension().is_some_and(|e| e == "json") {
                let text = fs::read_to_string(&path).map_err(|e| storage(&path, e))?;
                let session: Session = serde_json::from_str(&text).map_err(|e| storage(&path, e))?;
                let session = session.validated()?;
                sessions.insert(session.id.clone(), Arc::new(Mutex::new(session)));
            }
        }
        log::info!("loaded {} sessions from {}", sessions.len(), dir.display());
        Ok(SessionStore { sessions: RwLock::new(sessions), dir: Some(dir) })
    }

    pub fn len(&self) -> usize {
        self.sessions.read().expect("store lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn create(&self, config: &SessionConfig) -> Result<Session, ServiceError> {
        let session = Session::create(uuid::Uuid::new_v4().simple().to_string(), config)?;
        self.persist(&session)?;
        self.sessions
            .write()
            .expect("store lock")
            .insert(session.id.clone(), Arc::new(Mutex::new(session.clone())));
        Ok(session)
    }

    fn entry(&self, id: &str) -> Result<Arc<Mutex<Session>>, ServiceError> {
        self.sessions
            .read()
            .expect("store lock")
            .get(id)
            .cloned()
            .ok_or_else(|| ServiceError::UnknownSession(id.to_string()))
    }

    pub fn get(&self, id: &str) -> Result<Session, ServiceError> {
        Ok(self.entry(id)?.lock().expect("session lock").clone())
    }

    /// Applies `f` under the session's lock. The change is kept (and written
    /// out) only if `f` succeeds.
    pub fn update<F>(&self, id: &str, f: F) -> Result<Session, ServiceError>
    where
        F: FnOnce(&mut Session) -> Result<(), ServiceError>,
    {
        let entry = self.entry(id)?;
        let mut guard = entry.lock().expect("session lock");
        let mut next = guard.clone();
        f(&mut next)?;
        self.persist(&next)?;
        *guard = next.clone();
        Ok(next)
    }

    fn persist(&self, session: &Session) -> Result<(), ServiceError> {
        let Some(dir) = &self.dir else { return Ok(()) };
        let path = dir.join(format!("{}.json", session.id));
        let tmp = dir.join(format!(".{}.json.tmp", session.id));
        let text = serde_json::to_string(session).map_err(|e| storage(&path, e))?;
        fs::write(&tmp, text).map_err(|e| storage(&tmp, e))?;
        fs::rename(&tmp, &path).map_err(|e| storage(&path, e))
    }
}

fn storage(path: &Path, e: impl std::fmt::Display) -> ServiceError {
    ServiceError::Storage(format!("{}: {e}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::service::HumanMove;

    #[test]
    fn sessions_survive_restart() {
        let dir = tempfile::tempdir().unwrap();
        let config = SessionConfig {
            human_player: 2,
            strategy: "wb".into(),
            opening: "random".into(),
            seed: Some(5),
            restarts: None,
        };
        let store = SessionStore::persistent(dir.path()).unwrap();
        let s = store.create(&config).unwrap();
        let mut raw = vec![0.0; 9];
        raw[4] = 1.0;
        let after = store.update(&s.id, |s| s.submit_human_move(&HumanMove { amplitudes: raw, assist: true })).unwrap();
        drop(store);

        let reopened = SessionStore::persistent(dir.path()).unwrap();
        assert_eq!(reopened.len(), 1);
        assert_eq!(reopened.get(&s.id).unwrap(), after);
    }

    #[test]
    fn failed_update_changes_nothing() {
        let store = SessionStore::in_memory();
        let config = SessionConfig {
            human_player: 1,
            strategy: "wb".into(),
            opening: "uniform".into(),
            seed: Some(1),
            restarts: None,
        };
        let s = store.create(&config).unwrap();
        let err = store.update(&s.id, |s| s.engine_move()).unwrap_err();
        assert_eq!(err.code(), "not_engines_turn");
        assert_eq!(store.get(&s.id).unwrap(), s);
        assert_eq!(store.get("nope").unwrap_err().code(), "unknown_session");
    }
}
