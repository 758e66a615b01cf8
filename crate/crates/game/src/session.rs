//! One game: a seed word, the definitions typed so far, and a FIFO queue of
//! words still waiting for a definition. State changes only through
//! events, so replaying the event log rebuilds the session exactly.

use std::collections::VecDeque;

use indexmap::IndexMap;
use lexkernel::lexicon::{LexEntry, Lexicon, Normalizer, Pos, Stoplist};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GameError {
    #[error("seed word is empty or a function word")]
    InvalidSeed,
    #[error("expected a definition for {expected:?}, got {got:?}")]
    OutOfSequence { expected: Option<String>, got: String },
    #[error("definition rejected: {0}")]
    EmptyDefinition(String),
    #[error("definition has {got} tokens, limit is {limit}")]
    TooLong { got: usize, limit: usize },
    #[error("session incomplete")]
    Incomplete,
    #[error("unknown session {0}")]
    NotFound(String),
    #[error("corrupt event log: {0}")]
    Corrupt(String),
    #[error("storage: {0}")]
    Storage(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Active,
    Complete,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "action", rename_all = "snake_case")]
pub enum Action {
    Created { id: String, seed_word: String },
    Defined { word: String, tokens: Vec<String> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Event {
    pub seq: u64,
    /// Milliseconds since the Unix epoch.
    pub timestamp: u64,
    #[serde(flatten)]
    pub action: Action,
}

/// Input rules shared by every session.
#[derive(Clone)]
pub struct Rules {
    pub normalizer: Normalizer,
    pub stoplist: Stoplist,
    /// Longest accepted definition, in tokens after normalization.
    pub max_definition_tokens: usize,
}

impl Default for Rules {
    fn default() -> Self {
        Rules {
            normalizer: Normalizer::default(),
            stoplist: Stoplist::english_default(),
            max_definition_tokens: 200,
        }
    }
}

impl Rules {
    /// Normalized content tokens of raw player input. Each raw token is
    /// also split on whitespace.
    pub fn content_tokens<S: AsRef<str>>(&self, raw: &[S]) -> Vec<String> {
        raw.iter()
            .flat_map(|r| r.as_ref().split_whitespace().map(str::to_string).collect::<Vec<_>>())
            .filter_map(|t| self.normalizer.normalize(&t))
            .filter(|t| !self.stoplist.contains(t))
            .collect()
    }

    pub fn seed(&self, raw: &str) -> Result<String, GameError> {
        let tokens = self.content_tokens(&[raw]);
        match tokens.as_slice() {
            [one] => Ok(one.clone()),
            _ => Err(GameError::InvalidSeed),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameSession {
    pub id: String,
    pub seed_word: String,
    /// Definitions in the order they were given.
    pub defined: IndexMap<String, Vec<String>>,
    pub pending: VecDeque<String>,
    pub status: Status,
    pub events: Vec<Event>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Prompt {
    Word { word: String },
    Complete { complete: bool },
}

impl GameSession {
    /// Starts a session. `seed_word` must already be normalized.
    pub fn create(id: String, seed_word: String, timestamp: u64) -> Self {
        let mut s = GameSession {
            id: id.clone(),
            seed_word: String::new(),
            defined: IndexMap::new(),
            pending: VecDeque::new(),
            status: Status::Active,
            events: Vec::new(),
        };
        s.apply(Event {
            seq: 0,
            timestamp,
            action: Action::Created { id, seed_word },
        })
        .expect("a fresh session accepts its creation event");
        s
    }

    pub fn next_prompt(&self) -> Prompt {
        match self.pending.front() {
            Some(w) => Prompt::Word { word: w.clone() },
            None => Prompt::Complete { complete: true },
        }
    }

    /// Validates a submission and returns the event that records it.
    pub fn prepare_submission<S: AsRef<str>>(
        &self,
        rules: &Rules,
        word: &str,
        raw_tokens: &[S],
        timestamp: u64,
    ) -> Result<Event, GameError> {
        let word = rules.normalizer.normalize(word).unwrap_or_default();
        let expected = self.pending.front().cloned();
        if expected.as_deref() != Some(word.as_str()) {
            return Err(GameError::OutOfSequence { expected, got: word });
        }
        let tokens = rules.content_tokens(raw_tokens);
        if tokens.is_empty() {
            return Err(GameError::EmptyDefinition(
                "no content words left after removing function words".into(),
            ));
        }
        if tokens.len() > rules.max_definition_tokens {
            return Err(GameError::TooLong {
                got: tokens.len(),
                limit: rules.max_definition_tokens,
            });
        }
        Ok(Event {
            seq: self.events.len() as u64,
            timestamp,
            action: Action::Defined { word, tokens },
        })
    }

    /// Applies one event; the only way state changes.
    pub fn apply(&mut self, event: Event) -> Result<(), GameError> {
        if event.seq != self.events.len() as u64 {
            return Err(GameError::Corrupt(format!(
                "event {} arrived at position {}",
                event.seq,
                self.events.len()
            )));
        }
        match &event.action {
            Action::Created { id, seed_word } => {
                if !self.events.is_empty() || seed_word.is_empty() {
                    return Err(GameError::Corrupt("misplaced creation event".into()));
                }
                self.id = id.clone();
                self.seed_word = seed_word.clone();
                self.pending.push_back(seed_word.clone());
            }
            Action::Defined { word, tokens } => {
                if self.events.is_empty() || self.pending.front() != Some(word) || tokens.is_empty() {
                    return Err(GameError::Corrupt(format!("unexpected definition of {word:?}")));
                }
                self.pending.pop_front();
                self.defined.insert(word.clone(), tokens.clone());
                for t in tokens {
                    if !self.defined.contains_key(t) && !self.pending.contains(t) {
                        self.pending.push_back(t.clone());
                    }
                }
            }
        }
        self.status = if self.pending.is_empty() {
            Status::Complete
        } else {
            Status::Active
        };
        self.events.push(event);
        Ok(())
    }

    /// Rebuilds a session from its event log.
    pub fn replay<I: IntoIterator<Item = Event>>(events: I) -> Result<Self, GameError> {
        let mut s = GameSession {
            id: String::new(),
            seed_word: String::new(),
            defined: IndexMap::new(),
            pending: VecDeque::new(),
            status: Status::Active,
            events: Vec::new(),
        };
        for e in events {
            s.apply(e)?;
        }
        if s.events.is_empty() {
            return Err(GameError::Corrupt("empty event log".into()));
        }
        Ok(s)
    }

    /// One entry per defined word, in definition order, all tagged as
    /// nouns since players type bare words.
    pub fn export_lexicon(&self, rules: &Rules) -> Result<Lexicon, GameError> {
        if self.status != Status::Complete {
            return Err(GameError::Incomplete);
        }
        let entries = self
            .defined
            .iter()
            .enumerate()
            .map(|(i, (w, def))| {
                let mut e = LexEntry::new(w.clone(), Pos::Noun, def.clone());
                e.source_line = i + 1;
                e
            })
            .collect();
        let mut lex = Lexicon::new(entries);
        lex.stoplist_id = rules.stoplist.id.clone();
        lex.normalizer_id = rules.normalizer.id();
        Ok(lex)
    }
}
