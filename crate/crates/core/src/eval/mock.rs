//! Scripted backends for dry runs and tests.

use std::collections::HashMap;
use std::sync::atomic::{AtomicUsize, Ordering};

use super::client::{ChatBackend, ChatRequest, ChatResponse, EndpointError};
use crate::prompt::fence;
use crate::task::Task;

/// Answers every task with its fenced ground truth.
pub struct PerfectBackend {
    answers: HashMap<String, String>,
}

impl PerfectBackend {
    pub fn new(tasks: &[Task]) -> PerfectBackend {
        let answers = tasks
            .iter()
            .map(|t| (t.id.clone(), fence(&t.test_output.to_text())))
            .collect();
        PerfectBackend { answers }
    }
}

impl ChatBackend for PerfectBackend {
    fn complete(&self, request: &ChatRequest) -> Result<ChatResponse, EndpointError> {
        let text = self
            .answers
            .get(&request.task_id)
            .cloned()
            .ok_or_else(|| EndpointError::Unavailable(format!("unknown task {}", request.task_id)))?;
        Ok(ChatResponse { text, usage: None })
    }
}

/// Repeats the test input from the prompt, fenced.
pub struct EchoBackend;

impl ChatBackend for EchoBackend {
    fn complete(&self, request: &ChatRequest) -> Result<ChatResponse, EndpointError> {
        let grid = request.prompt.rsplit("\n\n").next().unwrap_or_default();
        Ok(ChatResponse {
            text: fence(grid),
            usage: None,
        })
    }
}

/// Talks about the task without ever fencing an answer.
pub struct ProseBackend;

impl ChatBackend for ProseBackend {
    fn complete(&self, _request: &ChatRequest) -> Result<ChatResponse, EndpointError> {
        Ok(ChatResponse {
            text: "The output is the input with the anchor extended in every direction.".into(),
            usage: None,
        })
    }
}

/// Fails the first `failures` calls with HTTP 503, then delegates.
pub struct FlakyBackend<B> {
    pub inner: B,
    failures: AtomicUsize,
}

impl<B> FlakyBackend<B> {
    pub fn new(inner: B, failures: usize) -> FlakyBackend<B> {
        FlakyBackend {
            inner,
            failures: AtomicUsize::new(failures),
        }
    }
}

impl<B: ChatBackend> ChatBackend for FlakyBackend<B> {
    fn complete(&self, request: &ChatRequest) -> Result<ChatResponse, EndpointError> {
        let left = self
            .failures
            .fetch_update(Ordering::SeqCst, Ordering::SeqCst, |n| n.checked_sub(1));
        if left.is_ok() {
            return Err(EndpointError::Status {
                status: 503,
                body: "try again".into(),
            });
        }
        self.inner.complete(request)
    }
}

/// Counts calls reaching the wrapped backend.
pub struct CountingBackend<B> {
    pub inner: B,
    calls: AtomicUsize,
}

impl<B> CountingBackend<B> {
    pub fn new(inner: B) -> CountingBackend<B> {
        CountingBackend {
            inner,
            calls: AtomicUsize::new(0),
        }
    }

    pub fn calls(&self) -> usize {
        self.calls.load(Ordering::SeqCst)
    }
}

impl<B: ChatBackend> ChatBackend for CountingBackend<B> {
    fn complete(&self, request: &ChatRequest) -> Result<ChatResponse, EndpointError> {
        self.calls.fetch_add(1, Ordering::SeqCst);
        self.inner.complete(request)
    }
}
