//! Helpers shared by unit tests.

use std::sync::atomic::{AtomicU64, Ordering};

use crate::error::AttrError;
use crate::model::{Capabilities, Generation, ScoredSequence, TextModel};

/// Delegating wrapper that counts scoring/generation/distribution calls.
pub struct CountingModel<M> {
    pub inner: M,
    pub calls: AtomicU64,
}

impl<M> CountingModel<M> {
    pub fn new(inner: M) -> Self {
        CountingModel { inner, calls: AtomicU64::new(0) }
    }

    pub fn count(&self) -> u64 {
        self.calls.load(Ordering::Relaxed)
    }
}

impl<M: TextModel> TextModel for CountingModel<M> {
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
        self.calls.fetch_add(1, Ordering::Relaxed);
        self.inner.score_target(prompt, target)
    }

    fn generate_greedy(
        &self,
        prompt: &str,
        max_tokens: usize,
        stop: Option<&[String]>,
    ) -> Result<Generation, AttrError> {
        self.calls.fetch_add(1, Ordering::Relaxed);
        self.inner.generate_greedy(prompt, max_tokens, stop)
    }

    fn next_token_distribution(&self, prompt: &str) -> Result<Vec<(String, f64)>, AttrError> {
        self.calls.fetch_add(1, Ordering::Relaxed);
        self.inner.next_token_distribution(prompt)
    }
}

/// Central finite-difference gradient of `f` at `x`.
pub fn central_diff<F: Fn(&[f64]) -> f64>(f: F, x: &[f64], h: f64) -> Vec<f64> {
    let mut grad = Vec::with_capacity(x.len());
    let mut probe = x.to_vec();
    for i in 0..x.len() {
        let orig = probe[i];
        probe[i] = orig + h;
        let up = f(&probe);
        probe[i] = orig - h;
        let down = f(&probe);
        probe[i] = orig;
        grad.push((up - down) / (2.0 * h));
    }
    grad
}

/// Relative-error check with a floor: |a - b| <= tol * max(|a|, |b|, floor).
pub fn close_rel(a: f64, b: f64, tol: f64, floor: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(floor)
}
