//! Exact-key memoization of backend calls.
//!
//! Perturbation methods revisit the same perturbed prompt many times
//! (permutation walks share prefixes; fixed baselines collapse distinct
//! include sets to identical prompts). The cache keys on the exact request
//! strings/parameters and returns clones of the first-computed result, so
//! a wrapped model is observationally identical to the bare one.
//!
//! Concurrency: a miss computes outside the lock, then inserts with
//! first-writer-wins semantics — two racing identical queries both get the
//! value that landed first. Gradient access passes through unmemoized.

use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};

use crate::error::AttrError;
use crate::model::{Capabilities, Generation, GradientModel, ScoredSequence, TextModel};

#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct CacheStats {
    pub hits: u64,
    pub misses: u64,
}

type GenKey = (String, usize, Option<Vec<String>>);

pub struct CachedModel {
    inner: Arc<dyn TextModel>,
    enabled: bool,
    score_memo: Mutex<HashMap<(String, String), ScoredSequence>>,
    gen_memo: Mutex<HashMap<GenKey, Generation>>,
    dist_memo: Mutex<HashMap<String, Vec<(String, f64)>>>,
    hits: AtomicU64,
    misses: AtomicU64,
}

impl CachedModel {
    pub fn new(inner: Arc<dyn TextModel>) -> Self {
        Self::with_enabled(inner, true)
    }

    /// `enabled = false` gives a pure pass-through (used by --no-cache).
    pub fn with_enabled(inner: Arc<dyn TextModel>, enabled: bool) -> Self {
        CachedModel {
            inner,
            enabled,
            score_memo: Mutex::new(HashMap::new()),
            gen_memo: Mutex::new(HashMap::new()),
            dist_memo: Mutex::new(HashMap::new()),
            hits: AtomicU64::new(0),
            misses: AtomicU64::new(0),
        }
    }

    pub fn stats(&self) -> CacheStats {
        CacheStats {
            hits: self.hits.load(Ordering::Relaxed),
            misses: self.misses.load(Ordering::Relaxed),
        }
    }

    fn memoized<K, V, F>(
        &self,
        memo: &Mutex<HashMap<K, V>>,
        key: K,
        compute: F,
    ) -> Result<V, AttrError>
    where
        K: std::hash::Hash + Eq,
        V: Clone,
        F: FnOnce() -> Result<V, AttrError>,
    {
        if !self.enabled {
            return compute();
        }
        if let Some(v) = memo.lock().unwrap().get(&key) {
            self.hits.fetch_add(1, Ordering::Relaxed);
            return Ok(v.clone());
        }
        let computed = compute()?;
        self.misses.fetch_add(1, Ordering::Relaxed);
        let mut guard = memo.lock().unwrap();
        Ok(guard.entry(key).or_insert(computed).clone())
    }
}

impl TextModel for CachedModel {
    fn id(&self) -> String {
        self.inner.id()
    }

    fn capabilities(&self) -> Capabilities {
        self.inner.capabilities()
    }

    fn tokenize(&self, text: &str) -> Result<Vec<String>, AttrError> {
        self.inner.tokenize(text)
    }

    fn score_target(&self, prompt: &str, target: &str) -> Result<ScoredSequence, AttrError> {
        self.memoized(
            &self.score_memo,
            (prompt.to_string(), target.to_string()),
            || self.inner.score_target(prompt, target),
        )
    }

    fn generate_greedy(
        &self,
        prompt: &str,
        max_tokens: usize,
        stop: Option<&[String]>,
    ) -> Result<Generation, AttrError> {
        self.memoized(
            &self.gen_memo,
            (prompt.to_string(), max_tokens, stop.map(|s| s.to_vec())),
            || self.inner.generate_greedy(prompt, max_tokens, stop),
        )
    }

    fn next_token_distribution(&self, prompt: &str) -> Result<Vec<(String, f64)>, AttrError> {
        self.memoized(&self.dist_memo, prompt.to_string(), || {
            self.inner.next_token_distribution(prompt)
        })
    }

    fn gradients(&self) -> Option<&dyn GradientModel> {
        self.inner.gradients()
    }
}
