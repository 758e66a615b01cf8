//! The dictionary game: a player defines a seed word, then every word used
//! in that definition, and so on until every word used has a definition.
//! The result is a small closed dictionary that goes through the same
//! structure analysis as a full one.

pub mod analysis;
pub mod api;
pub mod session;
pub mod store;

pub use analysis::{analyze_lexicon, SessionAnalysis};
pub use api::{router, serve, AppState};
pub use session::{GameError, GameSession, Prompt, Rules, Status};
pub use store::SessionStore;
