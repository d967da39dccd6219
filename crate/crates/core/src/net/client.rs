//! Reference client: paces frames, collects RESULT lines.

use std::io::{BufReader, BufWriter};
use std::net::{TcpStream, ToSocketAddrs};
use std::time::{Duration, Instant};

use super::protocol::{FramePayload, MessageType, WireMessage};
use crate::error::{Error, Result};
use crate::imaging::Frame;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StreamReport {
    /// RESULT text per frame, in order.
    pub frame_results: Vec<String>,
    /// RESULT text for END_STREAM.
    pub final_result: String,
}

impl StreamReport {
    /// Every `GESTURE` line, in arrival order.
    pub fn gestures(&self) -> Vec<&str> {
        self.frame_results
            .iter()
            .chain(std::iter::once(&self.final_result))
            .flat_map(|r| r.lines())
            .filter(|l| l.starts_with("GESTURE "))
            .collect()
    }
}

fn expect_result(reader: &mut BufReader<TcpStream>) -> Result<String> {
    match WireMessage::read_from(reader)? {
        Some(m) if m.kind == MessageType::Result => Ok(m.payload_text()?.to_string()),
        Some(m) if m.kind == MessageType::Error => Err(Error::Protocol(format!(
            "server error: {}",
            String::from_utf8_lossy(&m.payload)
        ))),
        Some(m) => Err(Error::Protocol(format!("unexpected {:?} from server", m.kind))),
        None => Err(Error::Protocol("server closed the connection".into())),
    }
}

/// Sends `frames` at `fps` (no pacing when `fps` is 0), then END_STREAM.
/// `on_result` sees each RESULT text as it arrives.
pub fn stream_client(
    addr: impl ToSocketAddrs,
    frames: &[Frame],
    fps: f64,
    mut on_result: impl FnMut(&str),
) -> Result<StreamReport> {
    let stream = TcpStream::connect(addr)?;
    stream.set_nodelay(true)?;
    let mut reader = BufReader::new(stream.try_clone()?);
    let mut writer = BufWriter::new(stream);
    let period = (fps > 0.0).then(|| Duration::from_secs_f64(1.0 / fps));
    let start = Instant::now();
    let mut report = StreamReport::default();
    for (i, f) in frames.iter().enumerate() {
        if let Some(p) = period {
            let due = start + p * i as u32;
            if let Some(wait) = due.checked_duration_since(Instant::now()) {
                std::thread::sleep(wait);
            }
        }
        WireMessage::new(MessageType::Frame, FramePayload::from_frame(f)?.encode()).write_to(&mut writer)?;
        let r = expect_result(&mut reader)?;
        on_result(&r);
        report.frame_results.push(r);
    }
    WireMessage::end_stream().write_to(&mut writer)?;
    report.final_result = expect_result(&mut reader)?;
    on_result(&report.final_result);
    Ok(report)
}
