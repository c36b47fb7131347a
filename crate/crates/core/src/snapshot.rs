//! Versioned binary snapshots.
//!
//! Layout: 4-byte magic, `u32` little-endian format version, then a bincode
//! payload of `(provenance, body)`. The provenance string is the run
//! configuration that produced the file.

use std::fs;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{Error, Result};

pub const FORMAT_VERSION: u32 = 1;

pub fn write<T: Serialize>(path: &Path, magic: &[u8; 4], provenance: &str, body: &T) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    w.write_all(magic).map_err(|e| Error::io(path, e))?;
    w.write_all(&FORMAT_VERSION.to_le_bytes())
        .map_err(|e| Error::io(path, e))?;
    bincode::serialize_into(&mut w, &(provenance, body))
        .map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read<T: DeserializeOwned>(path: &Path, magic: &[u8; 4]) -> Result<(String, T)> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut r = BufReader::new(file);
    let mut head = [0u8; 8];
    r.read_exact(&mut head).map_err(|e| Error::io(path, e))?;
    if &head[..4] != magic {
        return Err(Error::Format(format!(
            "{}: expected magic {:?}, found {:?}",
            path.display(),
            String::from_utf8_lossy(magic),
            String::from_utf8_lossy(&head[..4])
        )));
    }
    let version = u32::from_le_bytes([head[4], head[5], head[6], head[7]]);
    if version != FORMAT_VERSION {
        return Err(Error::Format(format!(
            "{}: unsupported format version {version}",
            path.display()
        )));
    }
    bincode::deserialize_from(&mut r)
        .map_err(|e| Error::Format(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_bad_magic() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("x.bin");
        write(&p, b"TST1", "seed=1", &vec![1.5f64, 2.25]).unwrap();
        let (prov, v): (String, Vec<f64>) = read(&p, b"TST1").unwrap();
        assert_eq!(prov, "seed=1");
        assert_eq!(v, vec![1.5, 2.25]);
        assert!(matches!(read::<Vec<f64>>(&p, b"XXX1"), Err(Error::Format(_))));
    }
}
