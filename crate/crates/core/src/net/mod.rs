//! Frame-streaming service: wire protocol, threaded server and client.

pub mod client;
pub mod protocol;
pub mod server;

pub use client::{stream_client, StreamReport};
pub use protocol::{FramePayload, MessageType, WireMessage, HEADER_LEN, MAGIC, VERSION};
pub use server::{Server, ServerContext};
