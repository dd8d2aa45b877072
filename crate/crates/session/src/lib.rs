//! Live teleoperation sessions over a websocket.
//!
//! A browser console connects to `/session`, receives the map once, then a
//! stream of per-tick robot poses and goal beliefs while it sends velocity
//! commands and explicit goal clicks.

pub mod protocol;
pub mod server;
pub mod session;

pub use protocol::{decode, encode, ClientMessage, ServerMessage};
pub use server::{serve, ServiceConfig};
pub use session::{SessionCore, SessionError, SessionOptions};
