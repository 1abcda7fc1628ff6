//! Single-file binary snapshot of a field state.
//!
//! Layout, all little-endian:
//!
//! ```text
//! magic  8 bytes  "SHKFORM1"
//! n1, n2          u64
//! t, L1, L2, x1_offset   f64
//! log_density, vel1, vel2   n1*n2 f64 each, row-major with x1 fastest
//! ```

use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::grid::{FieldState, Grid};

const MAGIC: &[u8; 8] = b"SHKFORM1";

pub fn encode(state: &FieldState) -> Vec<u8> {
    let g = &state.grid;
    let mut out = Vec::with_capacity(8 + 16 + 32 + 24 * g.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&(g.n1 as u64).to_le_bytes());
    out.extend_from_slice(&(g.n2 as u64).to_le_bytes());
    for x in [state.t, g.l1, g.l2, g.x1_offset] {
        out.extend_from_slice(&x.to_le_bytes());
    }
    for f in state.components() {
        for x in f {
            out.extend_from_slice(&x.to_le_bytes());
        }
    }
    out
}

pub fn decode(bytes: &[u8]) -> Result<FieldState> {
    let mut r = bytes;
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic).map_err(|_| Error::Checkpoint("truncated header".into()))?;
    if &magic != MAGIC {
        return Err(Error::Checkpoint("bad magic".into()));
    }
    let mut word = || -> Result<[u8; 8]> {
        let mut b = [0u8; 8];
        r.read_exact(&mut b).map_err(|_| Error::Checkpoint("truncated data".into()))?;
        Ok(b)
    };
    let n1 = u64::from_le_bytes(word()?) as usize;
    let n2 = u64::from_le_bytes(word()?) as usize;
    let [t, l1, l2, x1_offset] = [word()?, word()?, word()?, word()?].map(f64::from_le_bytes);
    if l2 != 1.0 {
        return Err(Error::Checkpoint(format!("unsupported transverse period {l2}")));
    }
    let grid = Grid::new(n1, n2, l1, x1_offset).map_err(|e| Error::Checkpoint(e.to_string()))?;
    let mut state = FieldState::constant(grid);
    state.t = t;
    for f in state.components_mut() {
        for x in f.iter_mut() {
            *x = f64::from_le_bytes(word()?);
        }
    }
    if !r.is_empty() {
        return Err(Error::Checkpoint(format!("{} trailing bytes", r.len())));
    }
    Ok(state)
}

pub fn write(path: &Path, state: &FieldState) -> Result<()> {
    let mut f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(&encode(state)).map_err(|e| Error::io(path, e))
}

pub fn read(path: &Path) -> Result<FieldState> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode(&bytes)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_exact() {
        let g = Grid::new(16, 16, 2.0, -0.5).unwrap();
        let mut s = FieldState::constant(g);
        s.t = 1.25;
        s.vel1 = g.sample(|x, y| (x * 3.0).sin() + y);
        s.log_density[7] = -1e-300;
        let bytes = encode(&s);
        assert_eq!(bytes.len(), 8 + 16 + 32 + 3 * 8 * 256);
        let back = decode(&bytes).unwrap();
        assert_eq!(back.t, s.t);
        assert_eq!(back.grid, s.grid);
        assert_eq!(back.vel1, s.vel1);
        assert_eq!(back.log_density, s.log_density);
        assert!(decode(&bytes[..bytes.len() - 1]).is_err());
        assert!(decode(b"NOTMAGIC").is_err());
    }
}
