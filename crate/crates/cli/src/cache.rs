//! On-disk cache of assembled operator matrices.

use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::PathBuf;

use hermitia::opcalc::{matrix_of_symbol, OperatorMatrix};
use hermitia::symbol::SymbolSpec;
use sha2::{Digest, Sha256};

use crate::error::Result;

pub struct MatrixCache {
    dir: Option<PathBuf>,
}

impl MatrixCache {
    pub fn new(dir: Option<PathBuf>) -> Self {
        Self { dir }
    }

    /// Hex sha256 of `(n, K_max, canonical symbol JSON)`.
    pub fn key(n: usize, kmax: usize, spec: &SymbolSpec) -> Result<String> {
        let mut h = Sha256::new();
        h.update((n as u64).to_le_bytes());
        h.update((kmax as u64).to_le_bytes());
        h.update(serde_json::to_vec(spec)?);
        Ok(hex::encode(h.finalize()))
    }

    /// Loads the matrix of `spec`, assembling and storing it on a miss.
    /// Unreadable entries are rebuilt.
    pub fn matrix(&self, n: usize, kmax: usize, spec: &SymbolSpec) -> Result<OperatorMatrix<f64>> {
        let Some(dir) = &self.dir else {
            return Ok(matrix_of_symbol(&spec.build::<f64>(n, kmax)?, kmax, None)?);
        };
        let path = dir.join(format!("{}.bin", Self::key(n, kmax, spec)?));
        if let Ok(f) = File::open(&path) {
            match OperatorMatrix::read_from(&mut BufReader::new(f)) {
                Ok(m) if m.n() == n && m.kmax() == kmax => return Ok(m),
                _ => eprintln!("cache entry {} unreadable, rebuilding", path.display()),
            }
        }
        let m = matrix_of_symbol(&spec.build::<f64>(n, kmax)?, kmax, None)?;
        std::fs::create_dir_all(dir)?;
        let tmp = path.with_extension("tmp");
        {
            let mut w = BufWriter::new(File::create(&tmp)?);
            m.write_to(&mut w)?;
        }
        std::fs::rename(&tmp, &path)?;
        Ok(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn key_separates_inputs() {
        let a = SymbolSpec::MihlinIt { s: 1.0 };
        let b = SymbolSpec::MihlinIt { s: 2.0 };
        let k = MatrixCache::key(1, 8, &a).unwrap();
        assert_eq!(k, MatrixCache::key(1, 8, &a).unwrap());
        assert_eq!(k.len(), 64);
        assert_ne!(k, MatrixCache::key(1, 8, &b).unwrap());
        assert_ne!(k, MatrixCache::key(1, 9, &a).unwrap());
        assert_ne!(k, MatrixCache::key(2, 8, &a).unwrap());
    }

    #[test]
    fn hit_equals_miss() {
        let dir = tempfile::tempdir().unwrap();
        let cache = MatrixCache::new(Some(dir.path().into()));
        let spec = SymbolSpec::Heat { t: 0.1 };
        let first = cache.matrix(1, 12, &spec).unwrap();
        let second = cache.matrix(1, 12, &spec).unwrap();
        assert_eq!(first.sub(&second).unwrap().max_abs(), 0.0);
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }

    #[test]
    fn corrupt_entry_rebuilt() {
        let dir = tempfile::tempdir().unwrap();
        let spec = SymbolSpec::One;
        let path = dir.path().join(format!("{}.bin", MatrixCache::key(1, 4, &spec).unwrap()));
        std::fs::write(&path, b"junk").unwrap();
        let m = MatrixCache::new(Some(dir.path().into())).matrix(1, 4, &spec).unwrap();
        assert_eq!(m.dim(), 5);
    }
}
