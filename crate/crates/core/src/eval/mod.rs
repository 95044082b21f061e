//! Model evaluation: request fan-out, response caching, exact-match scoring
//! and stratified reports.

mod cache;
mod client;
pub mod mock;
mod report;

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::thread;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::prompt::{build_prompt, extract_answer, ParseStatus};
use crate::render::{render_task, RenderError, RenderStyle};
use crate::task::{verify, Category, Difficulty, Task};

pub use cache::{CacheError, CachedResponse, ResponseCache};
pub use client::{
    parse_response, request_body, ChatBackend, ChatRequest, ChatResponse, EndpointError, OfflineBackend,
    OpenAiChatClient, TokenUsage,
};
pub use report::{summarize, Rate, Report};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelEndpointConfig {
    pub base_url: String,
    pub model: String,
    /// Name of the environment variable holding the API key.
    pub api_key_env: Option<String>,
    pub temperature: f64,
    pub samples_per_task: u32,
    pub max_output_tokens: Option<u32>,
    pub request_timeout_secs: u64,
    pub max_in_flight: usize,
    pub requests_per_minute: Option<u32>,
    pub max_retries: u32,
    pub backoff_base_ms: u64,
    /// Passed through as the image `detail` field when set.
    pub image_detail: Option<String>,
}

impl Default for ModelEndpointConfig {
    fn default() -> Self {
        ModelEndpointConfig {
            base_url: "https://api.openai.com/v1".into(),
            model: String::new(),
            api_key_env: Some("OPENAI_API_KEY".into()),
            temperature: 0.5,
            samples_per_task: 1,
            max_output_tokens: None,
            request_timeout_secs: 120,
            max_in_flight: 8,
            requests_per_minute: None,
            max_retries: 4,
            backoff_base_ms: 1000,
            image_detail: None,
        }
    }
}

impl ModelEndpointConfig {
    pub fn validate(&self) -> Result<(), EvalError> {
        let bad = |why: &str| Err(EvalError::InvalidConfig(why.into()));
        if !(self.temperature >= 0.0 && self.temperature.is_finite()) {
            return bad("temperature must be a nonnegative number");
        }
        if self.samples_per_task < 1 {
            return bad("samples_per_task must be at least 1");
        }
        if self.max_in_flight < 1 {
            return bad("max_in_flight must be at least 1");
        }
        if self.model.is_empty() {
            return bad("a model name is required");
        }
        if self.requests_per_minute == Some(0) {
            return bad("requests_per_minute must be positive when set");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalRecord {
    pub task_id: String,
    pub category: Category,
    pub difficulty: Difficulty,
    pub sample: u32,
    pub raw_text: String,
    /// Absent when the request itself failed.
    pub parse_status: Option<ParseStatus>,
    pub correct: bool,
    pub latency_ms: u64,
    pub usage: Option<TokenUsage>,
    pub error: Option<String>,
}

/// Parses and verifies a response; never fails.
pub fn score_response(task: &Task, response_text: &str) -> EvalRecord {
    let outcome = extract_answer(response_text);
    let correct = outcome.grid.as_ref().is_some_and(|g| verify(&task.test_output, g));
    EvalRecord {
        task_id: task.id.clone(),
        category: task.category(),
        difficulty: task.difficulty(),
        sample: 0,
        raw_text: response_text.to_string(),
        parse_status: Some(outcome.status),
        correct,
        latency_ms: 0,
        usage: None,
        error: None,
    }
}

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("invalid endpoint config: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Cache(#[from] CacheError),
    #[error("could not render task {task_id}: {source}")]
    Render { task_id: String, source: RenderError },
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalStats {
    pub network_calls: usize,
    pub cache_hits: usize,
    pub errored: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub records: Vec<EvalRecord>,
    pub report: Report,
    pub stats: EvalStats,
}

/// Spaces request starts at least `interval` apart across all workers.
struct RateLimiter {
    interval: Duration,
    next: Mutex<Instant>,
}

impl RateLimiter {
    fn new(per_minute: Option<u32>) -> RateLimiter {
        let interval = per_minute.map_or(Duration::ZERO, |n| Duration::from_secs(60) / n);
        RateLimiter {
            interval,
            next: Mutex::new(Instant::now()),
        }
    }

    fn acquire(&self) {
        if self.interval.is_zero() {
            return;
        }
        let wait = {
            let mut next = self.next.lock().unwrap();
            let now = Instant::now();
            let slot = (*next).max(now);
            *next = slot + self.interval;
            slot - now
        };
        thread::sleep(wait);
    }
}

struct Runner<'a> {
    endpoint: &'a ModelEndpointConfig,
    backend: &'a dyn ChatBackend,
    cache: Option<&'a ResponseCache>,
    style: &'a RenderStyle,
    limiter: RateLimiter,
    calls: AtomicUsize,
    hits: AtomicUsize,
}

impl Runner<'_> {
    fn request(&self, task: &Task, sample: u32) -> Result<ChatRequest, EvalError> {
        let image_png = render_task(task, self.style).map_err(|source| EvalError::Render {
            task_id: task.id.clone(),
            source,
        })?;
        Ok(ChatRequest {
            task_id: task.id.clone(),
            sample,
            model: self.endpoint.model.clone(),
            temperature: self.endpoint.temperature,
            max_output_tokens: self.endpoint.max_output_tokens,
            image_detail: self.endpoint.image_detail.clone(),
            image_png,
            prompt: build_prompt(&task.test_input),
        })
    }

    /// Calls the backend with exponential backoff on retryable failures.
    fn call(&self, request: &ChatRequest) -> Result<(ChatResponse, u64), EndpointError> {
        let mut attempt = 0;
        loop {
            self.limiter.acquire();
            self.calls.fetch_add(1, Ordering::SeqCst);
            let start = Instant::now();
            match self.backend.complete(request) {
                Ok(response) => return Ok((response, start.elapsed().as_millis() as u64)),
                Err(e) if e.retryable() && attempt < self.endpoint.max_retries => {
                    let delay = self.endpoint.backoff_base_ms.saturating_mul(1 << attempt.min(16));
                    thread::sleep(Duration::from_millis(delay));
                    attempt += 1;
                }
                Err(e) => return Err(e),
            }
        }
    }

    fn run(&self, task: &Task, sample: u32) -> Result<EvalRecord, EvalError> {
        let (model, temperature) = (&self.endpoint.model, self.endpoint.temperature);
        let cached = match self.cache {
            Some(cache) => cache.get(&task.id, model, temperature, sample)?,
            None => None,
        };
        let entry = match cached {
            Some(entry) => {
                self.hits.fetch_add(1, Ordering::SeqCst);
                entry
            }
            None => {
                let request = self.request(task, sample)?;
                match self.call(&request) {
                    Ok((response, latency_ms)) => {
                        let entry = CachedResponse {
                            task_id: task.id.clone(),
                            model: model.clone(),
                            temperature,
                            sample,
                            text: response.text,
                            latency_ms,
                            usage: response.usage,
                        };
                        if let Some(cache) = self.cache {
                            cache.put(&entry)?;
                        }
                        entry
                    }
                    Err(e) => {
                        return Ok(EvalRecord {
                            task_id: task.id.clone(),
                            category: task.category(),
                            difficulty: task.difficulty(),
                            sample,
                            raw_text: String::new(),
                            parse_status: None,
                            correct: false,
                            latency_ms: 0,
                            usage: None,
                            error: Some(e.to_string()),
                        })
                    }
                }
            }
        };
        Ok(EvalRecord {
            sample,
            latency_ms: entry.latency_ms,
            usage: entry.usage,
            ..score_response(task, &entry.text)
        })
    }
}

/// Runs every task `samples_per_task` times. Records come back in task order
/// then sample order, whatever order the requests complete in.
pub fn evaluate(
    tasks: &[Task],
    endpoint: &ModelEndpointConfig,
    backend: &dyn ChatBackend,
    cache: Option<&ResponseCache>,
    style: &RenderStyle,
) -> Result<Evaluation, EvalError> {
    endpoint.validate()?;
    let runner = Runner {
        endpoint,
        backend,
        cache,
        style,
        limiter: RateLimiter::new(endpoint.requests_per_minute),
        calls: AtomicUsize::new(0),
        hits: AtomicUsize::new(0),
    };
    let jobs: Vec<(usize, u32)> = (0..tasks.len())
        .flat_map(|t| (0..endpoint.samples_per_task).map(move |s| (t, s)))
        .collect();
    let results: Mutex<Vec<Option<Result<EvalRecord, EvalError>>>> = Mutex::new((0..jobs.len()).map(|_| None).collect());
    let next = AtomicUsize::new(0);
    let workers = endpoint.max_in_flight.min(jobs.len()).max(1);
    thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                let Some(&(t, s)) = jobs.get(i) else { break };
                let result = runner.run(&tasks[t], s);
                results.lock().unwrap()[i] = Some(result);
            });
        }
    });
    let records = results
        .into_inner()
        .unwrap()
        .into_iter()
        .map(|r| r.expect("every job ran"))
        .collect::<Result<Vec<_>, _>>()?;
    let report = summarize(&records);
    let stats = EvalStats {
        network_calls: runner.calls.load(Ordering::SeqCst),
        cache_hits: runner.hits.load(Ordering::SeqCst),
        errored: report.errored,
    };
    Ok(Evaluation { records, report, stats })
}

#[cfg(test)]
mod tests {
    use super::mock::*;
    use super::*;
    use crate::generators::{generate_task, GeneratorConfig};

    fn tasks() -> Vec<Task> {
        let cfg = GeneratorConfig::default();
        let mut out = Vec::new();
        for (i, category) in Category::ALL.into_iter().enumerate() {
            for (j, difficulty) in Difficulty::ALL.into_iter().enumerate() {
                out.push(generate_task(category, difficulty, (10 * i + j) as u64, &cfg).unwrap());
            }
        }
        out
    }

    fn endpoint() -> ModelEndpointConfig {
        ModelEndpointConfig {
            model: "mock".into(),
            api_key_env: None,
            backoff_base_ms: 1,
            max_in_flight: 4,
            ..ModelEndpointConfig::default()
        }
    }

    #[test]
    fn defaults_follow_the_protocol() {
        let cfg = ModelEndpointConfig::default();
        assert_eq!(cfg.temperature, 0.5);
        assert_eq!(cfg.samples_per_task, 1);
        assert!(cfg.validate().is_err());
        let mut ok = endpoint();
        ok.validate().unwrap();
        ok.temperature = -0.1;
        assert!(ok.validate().is_err());
    }

    #[test]
    fn scoring_without_a_fence() {
        let task = &tasks()[0];
        let r = score_response(task, "");
        assert_eq!(r.parse_status, Some(ParseStatus::NoFencedBlock));
        assert!(!r.correct);
    }

    #[test]
    fn mock_models() {
        let tasks = tasks();
        let style = RenderStyle::default();
        let perfect = evaluate(&tasks, &endpoint(), &PerfectBackend::new(&tasks), None, &style).unwrap();
        assert_eq!(perfect.report.overall.rate, 1.0);
        assert_eq!(perfect.records.len(), tasks.len());
        let ids: Vec<&str> = perfect.records.iter().map(|r| r.task_id.as_str()).collect();
        let expected: Vec<&str> = tasks.iter().map(|t| t.id.as_str()).collect();
        assert_eq!(ids, expected);

        let echo = evaluate(&tasks, &endpoint(), &EchoBackend, None, &style).unwrap();
        assert_eq!(echo.report.overall.rate, 0.0);
        assert!(echo.records.iter().all(|r| r.parse_status == Some(ParseStatus::Parsed)));

        let prose = evaluate(&tasks, &endpoint(), &ProseBackend, None, &style).unwrap();
        assert_eq!(prose.report.overall.rate, 0.0);
        assert!(prose.records.iter().all(|r| r.parse_status == Some(ParseStatus::NoFencedBlock)));
    }

    #[test]
    fn retries_then_succeeds_or_gives_up() {
        let tasks = &tasks()[..1];
        let style = RenderStyle::default();
        let flaky = FlakyBackend::new(PerfectBackend::new(tasks), 2);
        let run = evaluate(tasks, &endpoint(), &flaky, None, &style).unwrap();
        assert_eq!(run.stats.network_calls, 3);
        assert!(run.records[0].correct);

        let hopeless = FlakyBackend::new(PerfectBackend::new(tasks), 100);
        let run = evaluate(tasks, &ModelEndpointConfig { max_retries: 2, ..endpoint() }, &hopeless, None, &style).unwrap();
        assert_eq!(run.stats.network_calls, 3);
        assert_eq!(run.report.errored, 1);
        assert_eq!(run.report.overall.attempted, 0);
        assert!(run.records[0].error.is_some());
    }

    #[test]
    fn warm_cache_makes_no_calls() {
        let tasks = tasks();
        let dir = tempfile::tempdir().unwrap();
        let cache = ResponseCache::new(dir.path());
        let style = RenderStyle::default();
        let cfg = ModelEndpointConfig { samples_per_task: 2, ..endpoint() };
        let cold_backend = CountingBackend::new(PerfectBackend::new(&tasks));
        let cold = evaluate(&tasks, &cfg, &cold_backend, Some(&cache), &style).unwrap();
        assert_eq!(cold_backend.calls(), 2 * tasks.len());
        let warm_backend = CountingBackend::new(OfflineBackend);
        let warm = evaluate(&tasks, &cfg, &warm_backend, Some(&cache), &style).unwrap();
        assert_eq!(warm_backend.calls(), 0);
        assert_eq!(warm.stats.cache_hits, 2 * tasks.len());
        assert_eq!(warm.report, cold.report);
        assert_eq!(warm.records, cold.records);
    }

    #[test]
    fn rate_limiter_spaces_requests() {
        let limiter = RateLimiter::new(Some(6000));
        let start = Instant::now();
        for _ in 0..4 {
            limiter.acquire();
        }
        assert!(start.elapsed() >= Duration::from_millis(29));
    }
}
