//! Command-line and HTTP front ends over the library, sharing one error
//! type, one set of request limits and a compiled-program cache.

mod cli;
mod http;

use std::fmt;
use std::num::NonZeroUsize;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};

use lru::LruCache;
use serde::Serialize;

use crate::audio::DEFAULT_RATE;
use crate::semantics::{CompileError, Program, SemanticsMode};

pub use cli::cli_main;
pub use http::{router, serve, AppState};

pub const DEFAULT_PORT: u16 = 8008;
pub const DEFAULT_CHUNK: usize = 8192;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ErrorKind {
    Parse,
    Type,
    Range,
    Internal,
}

impl fmt::Display for ErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ErrorKind::Parse => "parse",
            ErrorKind::Type => "type",
            ErrorKind::Range => "range",
            ErrorKind::Internal => "internal",
        })
    }
}

/// The error shape both front ends report. Parse and type errors carry
/// the byte offset into the expression.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ApiError {
    pub kind: ErrorKind,
    pub pos: Option<usize>,
    pub msg: String,
    /// Set when a request exceeds a configured limit (HTTP 413).
    #[serde(skip)]
    pub too_large: bool,
}

impl ApiError {
    pub fn range(msg: impl Into<String>) -> Self {
        ApiError {
            kind: ErrorKind::Range,
            pos: None,
            msg: msg.into(),
            too_large: false,
        }
    }

    pub fn too_large(msg: impl Into<String>) -> Self {
        ApiError {
            too_large: true,
            ..ApiError::range(msg)
        }
    }

    pub fn internal(msg: impl Into<String>) -> Self {
        ApiError {
            kind: ErrorKind::Internal,
            ..ApiError::range(msg)
        }
    }

    /// The message followed by the source line and a caret under `pos`.
    pub fn with_caret(&self, source: &str) -> String {
        let mut out = self.to_string();
        if let Some(pos) = self.pos {
            let pad: String = source
                .chars()
                .take(pos)
                .map(|c| if c == '\t' { '\t' } else { ' ' })
                .collect();
            out.push_str(&format!("\n  {source}\n  {pad}^"));
        }
        out
    }
}

impl fmt::Display for ApiError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.pos {
            Some(pos) => write!(f, "{} error at position {pos}: {}", self.kind, self.msg),
            None => write!(f, "{} error: {}", self.kind, self.msg),
        }
    }
}

impl std::error::Error for ApiError {}

impl From<CompileError> for ApiError {
    fn from(e: CompileError) -> Self {
        let (kind, msg) = match &e {
            CompileError::Parse(p) => (ErrorKind::Parse, format!("expected {}, found {}", p.expected, p.found)),
            CompileError::Type(t) => (ErrorKind::Type, t.msg.clone()),
        };
        ApiError {
            kind,
            pos: Some(e.pos()),
            msg,
            too_large: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Largest `n` accepted for rendering.
    pub max_samples: u64,
    /// Largest `n` accepted for pitch and bit analysis, which cost more
    /// per sample than rendering.
    pub max_analysis_samples: u64,
    /// Longest expression accepted, in bytes.
    pub max_expr_len: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_samples: 1 << 24,
            max_analysis_samples: 1 << 20,
            max_expr_len: 64 * 1024,
        }
    }
}

impl Limits {
    pub fn check_expr(&self, expr: &str) -> Result<(), ApiError> {
        if expr.len() > self.max_expr_len {
            return Err(ApiError::too_large(format!(
                "expression is {} bytes, limit is {}",
                expr.len(),
                self.max_expr_len
            )));
        }
        Ok(())
    }

    pub fn check_samples(&self, n: u64) -> Result<usize, ApiError> {
        Self::check(n, self.max_samples)
    }

    pub fn check_analysis_samples(&self, n: u64) -> Result<usize, ApiError> {
        Self::check(n, self.max_analysis_samples.min(self.max_samples))
    }

    fn check(n: u64, max: u64) -> Result<usize, ApiError> {
        if n > max {
            return Err(ApiError::too_large(format!("n = {n} exceeds the limit of {max} samples")));
        }
        usize::try_from(n).map_err(|_| ApiError::too_large(format!("n = {n} does not fit in memory")))
    }
}

/// A validated request for a range of samples.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RenderRequest {
    pub expr: String,
    pub mode: SemanticsMode,
    pub t0: u64,
    pub n: usize,
    pub rate: u32,
}

impl RenderRequest {
    pub fn new(expr: impl Into<String>, n: usize) -> Self {
        RenderRequest {
            expr: expr.into(),
            mode: SemanticsMode::C32,
            t0: 0,
            n,
            rate: DEFAULT_RATE,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct CacheStats {
    pub hits: u64,
    pub compilations: u64,
    pub len: usize,
    pub capacity: usize,
}

type CacheKey = (String, SemanticsMode);

/// Least-recently-used cache of compiled programs keyed by source text
/// and mode. Programs are immutable and shared, so a hit hands back the
/// same allocation.
pub struct ProgramCache {
    entries: Mutex<LruCache<CacheKey, Arc<Program>>>,
    hits: AtomicU64,
    compilations: AtomicU64,
}

impl fmt::Debug for ProgramCache {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProgramCache").field("stats", &self.stats()).finish()
    }
}

impl Default for ProgramCache {
    fn default() -> Self {
        ProgramCache::new(64)
    }
}

impl ProgramCache {
    pub fn new(capacity: usize) -> Self {
        let capacity = NonZeroUsize::new(capacity).expect("cache capacity must be positive");
        ProgramCache {
            entries: Mutex::new(LruCache::new(capacity)),
            hits: AtomicU64::new(0),
            compilations: AtomicU64::new(0),
        }
    }

    fn lock(&self) -> std::sync::MutexGuard<'_, LruCache<CacheKey, Arc<Program>>> {
        // a panic while holding the lock cannot leave the LRU inconsistent
        self.entries.lock().unwrap_or_else(|e| e.into_inner())
    }

    pub fn get(&self, expr: &str, mode: SemanticsMode) -> Result<Arc<Program>, ApiError> {
        let key = (expr.to_owned(), mode);
        if let Some(p) = self.lock().get(&key) {
            self.hits.fetch_add(1, Ordering::Relaxed);
            return Ok(Arc::clone(p));
        }
        // compile outside the lock; a racing miss compiles twice and the
        // first insert wins
        let compiled = Arc::new(Program::from_source(expr, mode)?);
        self.compilations.fetch_add(1, Ordering::Relaxed);
        let mut entries = self.lock();
        Ok(Arc::clone(entries.get_or_insert(key, || compiled)))
    }

    pub fn contains(&self, expr: &str, mode: SemanticsMode) -> bool {
        self.lock().contains(&(expr.to_owned(), mode))
    }

    pub fn stats(&self) -> CacheStats {
        let entries = self.lock();
        CacheStats {
            hits: self.hits.load(Ordering::Relaxed),
            compilations: self.compilations.load(Ordering::Relaxed),
            len: entries.len(),
            capacity: entries.cap().get(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cache_hits_share_the_program() {
        let cache = ProgramCache::default();
        let a = cache.get("t&t>>8", SemanticsMode::C32).unwrap();
        let b = cache.get("t&t>>8", SemanticsMode::C32).unwrap();
        assert!(Arc::ptr_eq(&a, &b));
        assert_eq!(cache.stats().compilations, 1);
        assert_eq!(cache.stats().hits, 1);
    }

    #[test]
    fn mode_is_part_of_the_key() {
        let cache = ProgramCache::default();
        let a = cache.get("t", SemanticsMode::C32).unwrap();
        let b = cache.get("t", SemanticsMode::Js).unwrap();
        assert!(!Arc::ptr_eq(&a, &b));
        assert_eq!(cache.stats().len, 2);
    }

    #[test]
    fn least_recently_used_is_evicted() {
        let cache = ProgramCache::new(64);
        for i in 0..65 {
            cache.get(&format!("t*{i}"), SemanticsMode::C32).unwrap();
        }
        assert!(!cache.contains("t*0", SemanticsMode::C32));
        assert!(cache.contains("t*1", SemanticsMode::C32));
        assert!(cache.contains("t*64", SemanticsMode::C32));
        assert_eq!(cache.stats().len, 64);

        // touching an entry protects it
        let cache = ProgramCache::new(2);
        cache.get("t", SemanticsMode::C32).unwrap();
        cache.get("t*2", SemanticsMode::C32).unwrap();
        cache.get("t", SemanticsMode::C32).unwrap();
        cache.get("t*3", SemanticsMode::C32).unwrap();
        assert!(cache.contains("t", SemanticsMode::C32));
        assert!(!cache.contains("t*2", SemanticsMode::C32));
    }

    #[test]
    fn errors_are_not_cached() {
        let cache = ProgramCache::default();
        let err = cache.get("t&&t", SemanticsMode::C32).unwrap_err();
        assert_eq!((err.kind, err.pos), (ErrorKind::Parse, Some(2)));
        assert_eq!(cache.stats().len, 0);
        let err = cache.get("t%1.5", SemanticsMode::C32).unwrap_err();
        assert_eq!(err.kind, ErrorKind::Type);
    }

    #[test]
    fn caret_points_at_the_offset() {
        let err = Program::from_source("t&&t", SemanticsMode::C32).map_err(ApiError::from).unwrap_err();
        let text = err.with_caret("t&&t");
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[1], "  t&&t");
        assert_eq!(lines[2], "    ^");
        assert!(lines[0].starts_with("parse error at position 2"));
    }

    #[test]
    fn limits() {
        let limits = Limits::default();
        assert_eq!(limits.check_samples(1 << 24).unwrap(), 1 << 24);
        assert!(limits.check_samples((1 << 24) + 1).unwrap_err().too_large);
        assert!(limits.check_analysis_samples(1 << 21).unwrap_err().too_large);
        assert!(limits.check_expr(&"t".repeat(64 * 1024 + 1)).unwrap_err().too_large);
        let json = serde_json::to_value(ApiError::too_large("big")).unwrap();
        assert_eq!(json, serde_json::json!({"kind": "range", "pos": null, "msg": "big"}));
    }
}
