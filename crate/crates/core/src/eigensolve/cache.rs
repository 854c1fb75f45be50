use std::fs::{self, File, OpenOptions};
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use faer::Mat;
use num_complex::Complex64;
use sha2::{Digest, Sha256};

use super::spectral::SpectralData;
use crate::spin_basis::ModelSpec;
use crate::{Error, Result};

const MAGIC: &[u8; 8] = b"BSPEC\x00\x00\x01";

/// Identifies a cached spectrum.
#[derive(Clone, Debug)]
pub struct CacheKey {
    pub model_hash: String,
    /// Number of requested states; `None` for a full spectrum.
    pub k: Option<usize>,
    pub tol: f64,
    pub tol_deg: Option<f64>,
}

impl CacheKey {
    pub fn new(model: &ModelSpec, k: Option<usize>, tol: f64, tol_deg: Option<f64>) -> Self {
        Self { model_hash: model.hash_hex(), k, tol, tol_deg }
    }

    pub fn digest(&self) -> String {
        let text = format!(
            "{}|{:?}|{:e}|{:?}",
            self.model_hash,
            self.k,
            self.tol,
            self.tol_deg.map(|t| format!("{t:e}"))
        );
        hex::encode(Sha256::digest(text.as_bytes()))
    }
}

fn put_u64(w: &mut impl Write, v: u64) -> std::io::Result<()> {
    w.write_all(&v.to_le_bytes())
}

fn put_f64(w: &mut impl Write, v: f64) -> std::io::Result<()> {
    w.write_all(&v.to_le_bytes())
}

fn get_u64(r: &mut impl Read) -> std::io::Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

fn get_f64(r: &mut impl Read) -> std::io::Result<f64> {
    Ok(f64::from_bits(get_u64(r)?))
}

impl SpectralData {
    /// Little-endian binary encoding.
    pub fn write_binary(&self, w: &mut impl Write) -> Result<()> {
        w.write_all(MAGIC)?;
        put_u64(w, self.n_sites() as u64)?;
        put_u64(w, self.dim() as u64)?;
        put_u64(w, self.len() as u64)?;
        put_u64(w, self.is_complete() as u64)?;
        put_f64(w, self.tol_deg())?;
        for &e in self.energies() {
            put_f64(w, e)?;
        }
        let v = self.vectors();
        for j in 0..self.len() {
            for i in 0..self.dim() {
                put_f64(w, v[(i, j)].re)?;
                put_f64(w, v[(i, j)].im)?;
            }
        }
        Ok(())
    }

    pub fn read_binary(r: &mut impl Read) -> Result<Self> {
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(Error::Cache("not a spectrum cache file".into()));
        }
        let n_sites = get_u64(r)? as usize;
        let dim = get_u64(r)? as usize;
        let len = get_u64(r)? as usize;
        let complete = get_u64(r)? != 0;
        let tol_deg = get_f64(r)?;
        if dim != 1usize.checked_shl(n_sites as u32).unwrap_or(0) || len > dim {
            return Err(Error::Cache("corrupt header".into()));
        }
        let energies = (0..len).map(|_| get_f64(r)).collect::<std::io::Result<Vec<_>>>()?;
        let mut vectors = Mat::<Complex64>::zeros(dim, len);
        for j in 0..len {
            for i in 0..dim {
                let re = get_f64(r)?;
                let im = get_f64(r)?;
                vectors[(i, j)] = Complex64::new(re, im);
            }
        }
        SpectralData::new(n_sites, energies, vectors, complete, Some(tol_deg))
    }
}

/// Directory of spectra keyed by [`CacheKey`]. Writers hold an exclusive file
/// lock and publish by atomic rename.
#[derive(Clone, Debug)]
pub struct SpectralCache {
    dir: PathBuf,
}

impl SpectralCache {
    pub fn new(dir: impl AsRef<Path>) -> Result<Self> {
        fs::create_dir_all(dir.as_ref())?;
        Ok(Self { dir: dir.as_ref().to_path_buf() })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn path(&self, key: &CacheKey) -> PathBuf {
        self.dir.join(format!("{}.spec", key.digest()))
    }

    fn lock(&self, key: &CacheKey) -> Result<File> {
        let f = OpenOptions::new()
            .create(true)
            .truncate(false)
            .write(true)
            .open(self.dir.join(format!("{}.lock", key.digest())))?;
        f.lock()?;
        Ok(f)
    }

    pub fn load(&self, key: &CacheKey) -> Result<Option<SpectralData>> {
        let path = self.path(key);
        if !path.exists() {
            return Ok(None);
        }
        let mut r = BufReader::new(File::open(path)?);
        SpectralData::read_binary(&mut r).map(Some)
    }

    pub fn store(&self, key: &CacheKey, data: &SpectralData) -> Result<()> {
        let _guard = self.lock(key)?;
        let path = self.path(key);
        let tmp = path.with_extension(format!("tmp{}", std::process::id()));
        {
            let mut w = BufWriter::new(File::create(&tmp)?);
            data.write_binary(&mut w)?;
            w.flush()?;
        }
        fs::rename(tmp, path)?;
        Ok(())
    }

    /// Returns the cached spectrum or computes and stores it.
    pub fn get_or_compute(
        &self,
        key: &CacheKey,
        compute: impl FnOnce() -> Result<SpectralData>,
    ) -> Result<SpectralData> {
        if let Some(d) = self.load(key)? {
            return Ok(d);
        }
        let _guard = self.lock(key)?;
        // Another process may have finished while we waited for the lock.
        if let Some(d) = self.load(key)? {
            return Ok(d);
        }
        let data = compute()?;
        drop(_guard);
        self.store(key, &data)?;
        Ok(data)
    }
}
