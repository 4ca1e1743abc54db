//! Flat binary dataset dump.
//!
//! Layout, all integers and floats little-endian:
//!
//! ```text
//! magic   4 bytes  b"FSDS"
//! version u32      1
//! K       u64      number of UEs
//! d       u64      feature dimension
//! classes u64
//! counts  K x u64  samples per UE
//! rows    f64      per UE, per sample: d features then the label as a float
//! ```

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::UeDataset;
use crate::error::{Error, Result};

pub const MAGIC: [u8; 4] = *b"FSDS";
pub const VERSION: u32 = 1;

pub fn write_datasets(path: impl AsRef<Path>, datasets: &[UeDataset], classes: usize) -> Result<()> {
    let path = path.as_ref();
    let dim = datasets.first().map_or(0, |d| d.dim);
    if datasets.iter().any(|d| d.dim != dim) {
        return Err(Error::Contract("all datasets must share one feature dimension".into()));
    }
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    let mut write = |bytes: &[u8]| out.write_all(bytes).map_err(|e| Error::io(path, e));
    write(&MAGIC)?;
    write(&VERSION.to_le_bytes())?;
    for v in [datasets.len(), dim, classes] {
        write(&(v as u64).to_le_bytes())?;
    }
    for d in datasets {
        write(&(d.len() as u64).to_le_bytes())?;
    }
    for d in datasets {
        for (x, &y) in d.samples() {
            for v in x {
                write(&v.to_le_bytes())?;
            }
            write(&f64::from(y).to_le_bytes())?;
        }
    }
    out.flush().map_err(|e| Error::io(path, e))
}

/// Reads a dump back; returns the datasets and the class count.
pub fn read_datasets(path: impl AsRef<Path>) -> Result<(Vec<UeDataset>, usize)> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut input = BufReader::new(file);
    let mut read = |buf: &mut [u8]| input.read_exact(buf).map_err(|e| Error::io(path, e));

    let mut magic = [0u8; 4];
    read(&mut magic)?;
    if magic != MAGIC {
        return Err(Error::Format(format!("bad magic {magic:?}")));
    }
    let mut word = [0u8; 4];
    read(&mut word)?;
    let version = u32::from_le_bytes(word);
    if version != VERSION {
        return Err(Error::Format(format!("unsupported version {version}")));
    }
    let next_u64 = |read: &mut dyn FnMut(&mut [u8]) -> Result<()>| -> Result<u64> {
        let mut b = [0u8; 8];
        read(&mut b)?;
        Ok(u64::from_le_bytes(b))
    };
    let k = next_u64(&mut read)? as usize;
    let dim = next_u64(&mut read)? as usize;
    let classes = next_u64(&mut read)? as usize;
    let counts = (0..k).map(|_| next_u64(&mut read).map(|c| c as usize)).collect::<Result<Vec<_>>>()?;

    let mut datasets = Vec::with_capacity(k);
    for count in counts {
        let mut features = Vec::with_capacity(count * dim);
        let mut labels = Vec::with_capacity(count);
        for _ in 0..count {
            for _ in 0..dim {
                features.push(f64::from_bits(next_u64(&mut read)?));
            }
            let y = f64::from_bits(next_u64(&mut read)?);
            if !(y >= 0.0 && y.fract() == 0.0 && (y as usize) < classes) {
                return Err(Error::Format(format!("invalid label {y}")));
            }
            labels.push(y as u32);
        }
        datasets.push(UeDataset::new(dim, features, labels).map_err(|e| Error::Format(e.to_string()))?);
    }
    Ok((datasets, classes))
}
