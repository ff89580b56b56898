use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};
use ndarray::Array2;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

use super::params::ParamStore;

const MAGIC: &[u8; 4] = b"PSW1";

/// Writes all parameters to a binary file: magic, count, then per tensor
/// its name, shape, and row-major f64 little-endian values. Deterministic
/// given identical parameters (names are sorted).
pub fn save_params(store: &ParamStore, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let write = |w: &mut BufWriter<File>, store: &ParamStore| -> std::io::Result<()> {
        w.write_all(MAGIC)?;
        w.write_u32::<LittleEndian>(store.len() as u32)?;
        for (name, value) in store.iter() {
            w.write_u32::<LittleEndian>(name.len() as u32)?;
            w.write_all(name.as_bytes())?;
            w.write_u32::<LittleEndian>(value.nrows() as u32)?;
            w.write_u32::<LittleEndian>(value.ncols() as u32)?;
            for x in value.iter() {
                w.write_f64::<LittleEndian>(*x)?;
            }
        }
        w.flush()
    };
    write(&mut w, store).map_err(|e| Error::io(path, e))
}

/// Loads parameters written by `save_params`. Optimizer state starts fresh.
pub fn load_params(path: impl AsRef<Path>) -> Result<ParamStore> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut r = BufReader::new(file);
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic).map_err(|e| Error::io(path, e))?;
    if &magic != MAGIC {
        return Err(Error::Checkpoint(format!(
            "{} is not a parameter file",
            path.display()
        )));
    }
    let read = |r: &mut BufReader<File>| -> std::io::Result<ParamStore> {
        let count = r.read_u32::<LittleEndian>()?;
        let mut store = ParamStore::new();
        for _ in 0..count {
            let name_len = r.read_u32::<LittleEndian>()? as usize;
            let mut name_bytes = vec![0u8; name_len];
            r.read_exact(&mut name_bytes)?;
            let name = String::from_utf8_lossy(&name_bytes).into_owned();
            let rows = r.read_u32::<LittleEndian>()? as usize;
            let cols = r.read_u32::<LittleEndian>()? as usize;
            let mut values = Vec::with_capacity(rows * cols);
            for _ in 0..rows * cols {
                values.push(r.read_f64::<LittleEndian>()?);
            }
            let array = Array2::from_shape_vec((rows, cols), values)
                .expect("shape consistent by construction");
            store.insert(&name, array);
        }
        Ok(store)
    };
    read(&mut r).map_err(|e| Error::io(path, e))
}

/// SHA-256 of a file's contents, hex-encoded.
pub fn sha256_file(path: impl AsRef<Path>) -> Result<String> {
    let path = path.as_ref();
    let mut file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut hasher = Sha256::new();
    let mut buf = [0u8; 8192];
    loop {
        let n = file.read(&mut buf).map_err(|e| Error::io(path, e))?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
    }
    Ok(format!("{:x}", hasher.finalize()))
}

/// SHA-256 over the in-memory parameters in sorted name order; equal hashes
/// mean bit-identical values.
pub fn sha256_params(store: &ParamStore) -> String {
    let mut hasher = Sha256::new();
    for (name, value) in store.iter() {
        hasher.update(name.as_bytes());
        hasher.update((value.nrows() as u64).to_le_bytes());
        hasher.update((value.ncols() as u64).to_le_bytes());
        for x in value.iter() {
            hasher.update(x.to_le_bytes());
        }
    }
    format!("{:x}", hasher.finalize())
}
