//! Word vectors read from the common whitespace-separated text format.

use std::collections::HashMap;
use std::io::BufRead;
use std::path::Path;
use std::sync::atomic::{AtomicU64, Ordering};

use crate::{io, Error, Result};

/// Token-to-vector table. Lookups of unknown tokens return zeros and are counted.
#[derive(Debug)]
pub struct EmbeddingStore {
    dim: usize,
    vectors: HashMap<String, Vec<f64>>,
    zeros: Vec<f64>,
    lookups: AtomicU64,
    misses: AtomicU64,
}

impl EmbeddingStore {
    pub fn new(dim: usize, vectors: HashMap<String, Vec<f64>>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Argument("embedding dimension must be positive".into()));
        }
        if let Some((tok, v)) = vectors.iter().find(|(_, v)| v.len() != dim) {
            return Err(Error::Validation(format!(
                "vector for `{tok}` has length {} (expected {dim})",
                v.len()
            )));
        }
        Ok(EmbeddingStore {
            dim,
            vectors,
            zeros: vec![0.0; dim],
            lookups: AtomicU64::new(0),
            misses: AtomicU64::new(0),
        })
    }

    /// Loads `token v1 ... vd` lines, optionally preceded by a `count dim`
    /// header. Plain or gzip input.
    pub fn load_text_vectors(path: &Path) -> Result<Self> {
        Self::read_text_vectors(io::open_reader(path)?, path)
    }

    pub fn read_text_vectors(reader: impl BufRead, origin: &Path) -> Result<Self> {
        let mut dim: Option<usize> = None;
        let mut header_dim: Option<usize> = None;
        let mut vectors = HashMap::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            let lineno = i + 1;
            let mut fields = line.split_whitespace();
            let Some(token) = fields.next() else {
                continue;
            };
            let rest: Vec<&str> = fields.collect();
            if lineno == 1 && rest.len() == 1 {
                if let (Ok(_), Ok(d)) = (token.parse::<usize>(), rest[0].parse::<usize>()) {
                    header_dim = Some(d);
                    continue;
                }
            }
            let values = rest
                .iter()
                .map(|v| v.parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| Error::parse(origin, lineno, format!("bad vector value: {e}")))?;
            let expected = *dim.get_or_insert(values.len());
            if values.is_empty() || values.len() != expected {
                return Err(Error::parse(
                    origin,
                    lineno,
                    format!("vector has {} values, expected {expected}", values.len()),
                ));
            }
            if let Some(h) = header_dim {
                if h != expected {
                    return Err(Error::parse(
                        origin,
                        lineno,
                        format!("header declares dimension {h} but vectors have {expected}"),
                    ));
                }
            }
            vectors.entry(token.to_lowercase()).or_insert(values);
        }
        match dim {
            Some(d) => Self::new(d, vectors),
            None => Err(Error::parse(origin, 0, "no vectors in file")),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn contains(&self, token: &str) -> bool {
        self.vectors.contains_key(token)
    }

    /// Stored vector for `token`, or the zero vector.
    pub fn lookup(&self, token: &str) -> &[f64] {
        self.lookups.fetch_add(1, Ordering::Relaxed);
        match self.vectors.get(token) {
            Some(v) => v,
            None => {
                self.misses.fetch_add(1, Ordering::Relaxed);
                &self.zeros
            }
        }
    }

    pub fn lookup_count(&self) -> u64 {
        self.lookups.load(Ordering::Relaxed)
    }

    pub fn miss_count(&self) -> u64 {
        self.misses.load(Ordering::Relaxed)
    }

    /// Fraction of `tokens` with a stored vector. Does not touch the counters.
    pub fn coverage<'a>(&self, tokens: impl IntoIterator<Item = &'a str>) -> f64 {
        let (mut hit, mut total) = (0usize, 0usize);
        for t in tokens {
            total += 1;
            hit += usize::from(self.vectors.contains_key(t));
        }
        if total == 0 {
            0.0
        } else {
            hit as f64 / total as f64
        }
    }
}
