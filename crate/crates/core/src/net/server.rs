//! One thread per connection, each with its own pipeline over shared models.

use std::io::{BufReader, BufWriter};
use std::net::{SocketAddr, TcpListener, TcpStream, ToSocketAddrs};
use std::sync::Arc;
use std::thread::JoinHandle;

use super::protocol::{FramePayload, MessageType, WireMessage};
use crate::error::{Error, Result};
use crate::face::FaceProvider;
use crate::pipeline::{ModelSet, Pipeline, PipelineConfig};

/// Immutable state shared by all connections.
pub struct ServerContext {
    pub cfg: PipelineConfig,
    pub models: ModelSet,
    pub face: Arc<FaceProvider>,
}

impl ServerContext {
    /// Checks that a pipeline can be built before accepting anyone.
    pub fn new(cfg: PipelineConfig, models: ModelSet, face: FaceProvider) -> Result<Self> {
        let ctx = ServerContext {
            cfg,
            models,
            face: Arc::new(face),
        };
        ctx.pipeline()?;
        Ok(ctx)
    }

    fn pipeline(&self) -> Result<Pipeline> {
        Pipeline::new(self.cfg.clone(), &self.models, self.face.clone())
    }
}

pub struct Server {
    listener: TcpListener,
    ctx: Arc<ServerContext>,
}

impl Server {
    pub fn bind(addr: impl ToSocketAddrs, ctx: ServerContext) -> Result<Self> {
        Ok(Server {
            listener: TcpListener::bind(addr)?,
            ctx: Arc::new(ctx),
        })
    }

    pub fn local_addr(&self) -> Result<SocketAddr> {
        Ok(self.listener.local_addr()?)
    }

    /// Accepts connections forever.
    pub fn run(self) -> Result<()> {
        for conn in self.listener.incoming() {
            let stream = conn?;
            let ctx = self.ctx.clone();
            std::thread::spawn(move || {
                let _ = handle_connection(stream, &ctx);
            });
        }
        Ok(())
    }

    pub fn spawn(self) -> JoinHandle<Result<()>> {
        std::thread::spawn(move || self.run())
    }
}

/// Serves one client until it disconnects or sends something malformed.
/// Every FRAME and END_STREAM gets exactly one RESULT; a segment decision is
/// appended to it as a second `GESTURE` line.
pub fn handle_connection(stream: TcpStream, ctx: &ServerContext) -> Result<()> {
    stream.set_nodelay(true)?;
    let mut reader = BufReader::new(stream.try_clone()?);
    let mut writer = BufWriter::new(stream);
    let mut pipeline = ctx.pipeline()?;
    let outcome = serve_messages(&mut reader, &mut writer, &mut pipeline);
    if let Err(e) = &outcome {
        let msg = match e {
            Error::Protocol(m) => m.clone(),
            other => other.to_string(),
        };
        let _ = WireMessage::text(MessageType::Error, &msg).write_to(&mut writer);
    }
    outcome
}

fn serve_messages(
    reader: &mut BufReader<TcpStream>,
    writer: &mut BufWriter<TcpStream>,
    p: &mut Pipeline,
) -> Result<()> {
    while let Some(msg) = WireMessage::read_from(reader)? {
        let reply = match msg.kind {
            MessageType::Frame => {
                let frame = FramePayload::decode(&msg.payload)?.to_frame()?;
                let r = p.process_frame(&frame)?;
                match &r.gesture {
                    Some(g) => format!("{}\n{}", r.reply_text(), g.reply_text()),
                    None => r.reply_text(),
                }
            }
            MessageType::EndStream => match p.finish()? {
                Some(g) => g.reply_text(),
                None => "NONE".to_string(),
            },
            other => return Err(Error::Protocol(format!("unexpected {other:?} message from client"))),
        };
        WireMessage::text(MessageType::Result, &reply).write_to(writer)?;
    }
    Ok(())
}
