//! Binary cache of a per-block prime list, so repeated CLI invocations do
//! not resieve.
//!
//! Layout (all integers little-endian u64):
//! `magic "RVLPRM1\0" | b | λ | count | first prime | count−1 deltas`.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::SieveError;
use crate::digits::Base;

pub const CACHE_MAGIC: &[u8; 8] = b"RVLPRM1\0";

fn io_err(e: std::io::Error) -> SieveError {
    SieveError::Cache(e.to_string())
}

pub fn write_prime_cache(
    path: &Path,
    base: Base,
    lambda: u32,
    primes: &[u64],
) -> Result<(), SieveError> {
    let mut w = BufWriter::new(File::create(path).map_err(io_err)?);
    w.write_all(CACHE_MAGIC).map_err(io_err)?;
    w.write_all(&u64::from(base.get()).to_le_bytes()).map_err(io_err)?;
    w.write_all(&u64::from(lambda).to_le_bytes()).map_err(io_err)?;
    w.write_all(&(primes.len() as u64).to_le_bytes()).map_err(io_err)?;
    if let Some((&first, rest)) = primes.split_first() {
        w.write_all(&first.to_le_bytes()).map_err(io_err)?;
        let mut prev = first;
        for &p in rest {
            w.write_all(&(p - prev).to_le_bytes()).map_err(io_err)?;
            prev = p;
        }
    }
    w.flush().map_err(io_err)
}

/// Read a cached prime list; `Ok(None)` when the file belongs to a
/// different `(b, λ)` key or has the wrong magic.
pub fn read_prime_cache(
    path: &Path,
    base: Base,
    lambda: u32,
) -> Result<Option<Vec<u64>>, SieveError> {
    let mut r = BufReader::new(File::open(path).map_err(io_err)?);
    let mut word = [0u8; 8];
    r.read_exact(&mut word).map_err(io_err)?;
    if &word != CACHE_MAGIC {
        return Ok(None);
    }
    let mut next = || -> Result<u64, SieveError> {
        let mut w = [0u8; 8];
        r.read_exact(&mut w).map_err(io_err)?;
        Ok(u64::from_le_bytes(w))
    };
    if next()? != u64::from(base.get()) || next()? != u64::from(lambda) {
        return Ok(None);
    }
    let count = next()? as usize;
    let mut primes = Vec::with_capacity(count);
    if count > 0 {
        let mut cur = next()?;
        primes.push(cur);
        for _ in 1..count {
            cur += next()?;
            primes.push(cur);
        }
    }
    Ok(Some(primes))
}
