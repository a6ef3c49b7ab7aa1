//! Binary checkpoints for long single-IC runs.
//!
//! Layout, all integers little-endian:
//!
//! ```text
//! "TAGCKPT1"
//! u32 len, rule literal (UTF-8)
//! u32 len, initial state id (UTF-8)
//! u32 len, current state, packed
//! u64 step counter
//! u32 len, detector blob
//! ```
//!
//! The current state and step counter duplicate what the detector blob
//! holds; they are checked against it on load.

use std::fs;
use std::io::Write;
use std::path::Path;

use tagforge::halting::Detector;
use tagforge::CompressedState;

use crate::CliError;

pub const MAGIC: &[u8; 8] = b"TAGCKPT1";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Checkpoint {
    pub rule: String,
    pub id: String,
    pub detector: Detector,
}

fn put_bytes(out: &mut Vec<u8>, bytes: &[u8]) {
    out.extend_from_slice(&(bytes.len() as u32).to_le_bytes());
    out.extend_from_slice(bytes);
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], CliError> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.buf.len()).ok_or_else(|| CliError::Data("checkpoint is truncated".into()))?;
        let out = &self.buf[self.pos..end];
        self.pos = end;
        Ok(out)
    }

    fn u32(&mut self) -> Result<u32, CliError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64, CliError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn bytes(&mut self) -> Result<&'a [u8], CliError> {
        let n = self.u32()? as usize;
        self.take(n)
    }

    fn text(&mut self) -> Result<String, CliError> {
        String::from_utf8(self.bytes()?.to_vec()).map_err(|_| CliError::Data("checkpoint text is not UTF-8".into()))
    }
}

impl Checkpoint {
    pub fn encode(&self) -> Vec<u8> {
        let mut out = MAGIC.to_vec();
        put_bytes(&mut out, self.rule.as_bytes());
        put_bytes(&mut out, self.id.as_bytes());
        put_bytes(&mut out, &self.detector.current().to_packed());
        out.extend_from_slice(&self.detector.steps().to_le_bytes());
        put_bytes(&mut out, &self.detector.encode());
        out
    }

    pub fn decode(buf: &[u8]) -> Result<Self, CliError> {
        if buf.len() < MAGIC.len() || &buf[..MAGIC.len()] != MAGIC {
            return Err(CliError::Data("not a tagforge checkpoint (bad magic)".into()));
        }
        let mut r = Reader { buf, pos: MAGIC.len() };
        let rule = r.text()?;
        let id = r.text()?;
        let packed = r.bytes()?;
        let (current, used) = CompressedState::read_packed(packed)?;
        let steps = r.u64()?;
        let detector = Detector::decode(r.bytes()?)?;
        if r.pos != buf.len() {
            return Err(CliError::Data("trailing bytes after checkpoint".into()));
        }
        if used != packed.len() || detector.steps() != steps || *detector.current() != current {
            return Err(CliError::Data("checkpoint header disagrees with detector state".into()));
        }
        Ok(Checkpoint { rule, id, detector })
    }

    /// Writes to a sibling temporary file, then renames over `path`.
    pub fn save(&self, path: &Path) -> Result<(), CliError> {
        let mut tmp = path.as_os_str().to_owned();
        tmp.push(".tmp");
        let tmp = Path::new(&tmp);
        let mut f = fs::File::create(tmp)?;
        f.write_all(&self.encode())?;
        f.sync_all()?;
        fs::rename(tmp, path)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        Checkpoint::decode(&fs::read(path)?)
    }
}
