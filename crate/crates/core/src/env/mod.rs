//! Single-attempt episodes over a newline-delimited JSON protocol.
//!
//! Every request line gets exactly one reply line carrying the protocol
//! version and the request's session id. See `docs/env-protocol.md`.

mod transport;

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use base64::engine::general_purpose::STANDARD;
use base64::Engine as _;
use rand::seq::IndexedRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::eval::score_response;
use crate::generators::seed::{fnv1a, mix};
use crate::generators::{generate_task, sample_difficulty, GeneratorConfig};
use crate::prompt::{build_prompt, extract_answer, ParseStatus};
use crate::render::{render_task, RenderStyle};
use crate::task::{Category, Difficulty, Task};

pub use transport::{serve_listener, serve_stdio, serve_stream, serve_tcp};

pub const PROTOCOL_VERSION: u32 = 1;

const CATEGORY_SALT: u64 = 0xCA7E;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RewardMode {
    #[default]
    Binary,
    Shaped,
}

impl std::str::FromStr for RewardMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "binary" => Ok(RewardMode::Binary),
            "shaped" => Ok(RewardMode::Shaped),
            other => Err(format!("unknown reward mode `{other}`")),
        }
    }
}

/// Binary: 1 for an exact match. Shaped: the fraction of matching cells when
/// the predicted shape is right, else 0.
pub fn compute_reward(task: &Task, answer_text: &str, mode: RewardMode) -> f64 {
    match mode {
        RewardMode::Binary => {
            if score_response(task, answer_text).correct {
                1.0
            } else {
                0.0
            }
        }
        RewardMode::Shaped => match extract_answer(answer_text).grid {
            Some(g) if g.shape() == task.test_output.shape() => {
                let same = g.cells().iter().zip(task.test_output.cells()).filter(|(a, b)| a == b).count();
                same as f64 / g.cells().len() as f64
            }
            _ => 0.0,
        },
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnvConfig {
    pub categories: Vec<Category>,
    pub difficulty_probs: [f64; 3],
    pub reveal_expected: bool,
    pub reward_mode: RewardMode,
    /// Session streams derive from this seed and the session id.
    pub seed: u64,
    pub generator: GeneratorConfig,
    pub style: RenderStyle,
}

impl Default for EnvConfig {
    fn default() -> Self {
        let generator = GeneratorConfig::default();
        EnvConfig {
            categories: Category::ALL.to_vec(),
            difficulty_probs: generator.difficulty_probs,
            reveal_expected: false,
            reward_mode: RewardMode::Binary,
            seed: 0,
            generator,
            style: RenderStyle::default(),
        }
    }
}

fn check_probs(p: [f64; 3]) -> Result<(), String> {
    let ok = p.iter().all(|x| x.is_finite() && *x >= 0.0) && (p.iter().sum::<f64>() - 1.0).abs() < 1e-9;
    if ok {
        Ok(())
    } else {
        Err(format!("difficulty_probs must be a probability vector, got {p:?}"))
    }
}

fn check_categories(c: &[Category]) -> Result<(), String> {
    if c.is_empty() {
        Err("categories must not be empty".into())
    } else {
        Ok(())
    }
}

impl EnvConfig {
    pub fn validate(&self) -> Result<(), String> {
        check_probs(self.difficulty_probs)?;
        check_categories(&self.categories)?;
        self.generator.validate().map_err(|e| e.to_string())?;
        self.style.validate().map_err(|e| e.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
enum Request {
    Reset {
        session: String,
        #[serde(default)]
        seed: Option<u64>,
        #[serde(default)]
        difficulty_probs: Option<[f64; 3]>,
        #[serde(default)]
        categories: Option<Vec<Category>>,
    },
    Step {
        session: String,
        answer: String,
    },
    Configure {
        session: String,
        #[serde(default)]
        difficulty_probs: Option<[f64; 3]>,
        #[serde(default)]
        categories: Option<Vec<Category>>,
        #[serde(default)]
        reward_mode: Option<RewardMode>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionSettings {
    pub difficulty_probs: [f64; 3],
    pub categories: Vec<Category>,
    pub reward_mode: RewardMode,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum ReplyBody {
    Task {
        task_id: String,
        category: Category,
        difficulty: Difficulty,
        prompt: String,
        image_png_base64: String,
        test_input: String,
    },
    Result {
        task_id: String,
        reward: f64,
        correct: bool,
        parse_status: ParseStatus,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        expected: Option<String>,
    },
    Ack {
        settings: SessionSettings,
    },
    Error {
        message: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Reply {
    pub version: u32,
    pub session: Option<String>,
    #[serde(flatten)]
    pub body: ReplyBody,
}

struct Session {
    seed: u64,
    counter: u64,
    settings: SessionSettings,
    active: Option<Task>,
}

/// Shared, thread-safe session table. Each session is locked on its own, so
/// sessions never wait on each other's task generation.
pub struct EnvService {
    cfg: EnvConfig,
    sessions: Mutex<HashMap<String, Arc<Mutex<Session>>>>,
}

impl EnvService {
    pub fn new(cfg: EnvConfig) -> Result<EnvService, String> {
        cfg.validate()?;
        Ok(EnvService {
            cfg,
            sessions: Mutex::new(HashMap::new()),
        })
    }

    pub fn config(&self) -> &EnvConfig {
        &self.cfg
    }

    fn session(&self, id: &str) -> Arc<Mutex<Session>> {
        let mut sessions = self.sessions.lock().unwrap();
        sessions
            .entry(id.to_string())
            .or_insert_with(|| {
                Arc::new(Mutex::new(Session {
                    seed: mix(self.cfg.seed, fnv1a(id.as_bytes())),
                    counter: 0,
                    settings: SessionSettings {
                        difficulty_probs: self.cfg.difficulty_probs,
                        categories: self.cfg.categories.clone(),
                        reward_mode: self.cfg.reward_mode,
                    },
                    active: None,
                }))
            })
            .clone()
    }

    fn existing(&self, id: &str) -> Option<Arc<Mutex<Session>>> {
        self.sessions.lock().unwrap().get(id).cloned()
    }

    /// Handles one request line and returns the reply line, without a newline.
    pub fn handle_line(&self, line: &str) -> String {
        let reply = self.handle(line);
        serde_json::to_string(&reply).expect("replies serialize")
    }

    pub fn handle(&self, line: &str) -> Reply {
        let value: Value = match serde_json::from_str(line) {
            Ok(v) => v,
            Err(e) => return error(None, format!("malformed request: {e}")),
        };
        let session = value.get("session").and_then(Value::as_str).map(str::to_string);
        let known = ["reset", "step", "configure"];
        match value.get("op").and_then(Value::as_str) {
            None => return error(session, "request has no `op`".into()),
            Some(op) if !known.contains(&op) => return error(session, format!("unknown op `{op}`")),
            _ => {}
        }
        let request: Request = match serde_json::from_value(value) {
            Ok(r) => r,
            Err(e) => return error(session, format!("malformed request: {e}")),
        };
        let (id, body) = match request {
            Request::Reset {
                session,
                seed,
                difficulty_probs,
                categories,
            } => {
                let body = self.reset(&session, seed, difficulty_probs, categories);
                (session, body)
            }
            Request::Step { session, answer } => {
                let body = self.step(&session, &answer);
                (session, body)
            }
            Request::Configure {
                session,
                difficulty_probs,
                categories,
                reward_mode,
            } => {
                let body = self.configure(&session, difficulty_probs, categories, reward_mode);
                (session, body)
            }
        };
        Reply {
            version: PROTOCOL_VERSION,
            session: Some(id),
            body,
        }
    }

    fn apply_settings(
        settings: &mut SessionSettings,
        difficulty_probs: Option<[f64; 3]>,
        categories: Option<Vec<Category>>,
        reward_mode: Option<RewardMode>,
    ) -> Result<(), String> {
        if let Some(p) = difficulty_probs {
            check_probs(p)?;
        }
        if let Some(c) = &categories {
            check_categories(c)?;
        }
        if let Some(p) = difficulty_probs {
            settings.difficulty_probs = p;
        }
        if let Some(c) = categories {
            settings.categories = c;
        }
        if let Some(m) = reward_mode {
            settings.reward_mode = m;
        }
        Ok(())
    }

    fn configure(
        &self,
        id: &str,
        difficulty_probs: Option<[f64; 3]>,
        categories: Option<Vec<Category>>,
        reward_mode: Option<RewardMode>,
    ) -> ReplyBody {
        let session = self.session(id);
        let mut s = session.lock().unwrap();
        match Self::apply_settings(&mut s.settings, difficulty_probs, categories, reward_mode) {
            Ok(()) => ReplyBody::Ack {
                settings: s.settings.clone(),
            },
            Err(message) => ReplyBody::Error { message },
        }
    }

    fn reset(
        &self,
        id: &str,
        seed: Option<u64>,
        difficulty_probs: Option<[f64; 3]>,
        categories: Option<Vec<Category>>,
    ) -> ReplyBody {
        let session = self.session(id);
        let mut s = session.lock().unwrap();
        if let Err(message) = Self::apply_settings(&mut s.settings, difficulty_probs, categories, None) {
            return ReplyBody::Error { message };
        }
        if let Some(seed) = seed {
            s.seed = seed;
            s.counter = 0;
        }
        let task_seed = mix(s.seed, s.counter);
        s.counter += 1;
        let mut rng = ChaCha8Rng::seed_from_u64(mix(task_seed, CATEGORY_SALT));
        let category = *s.settings.categories.choose(&mut rng).expect("nonempty categories");
        let difficulty = sample_difficulty(s.settings.difficulty_probs, task_seed);
        let mut task = match generate_task(category, difficulty, task_seed, &self.cfg.generator) {
            Ok(t) => t,
            Err(e) => {
                s.active = None;
                return ReplyBody::Error { message: e.to_string() };
            }
        };
        task.id = format!("{id}-{:06}", s.counter - 1);
        let image = match render_task(&task, &self.cfg.style) {
            Ok(png) => STANDARD.encode(png),
            Err(e) => {
                s.active = None;
                return ReplyBody::Error { message: e.to_string() };
            }
        };
        let body = ReplyBody::Task {
            task_id: task.id.clone(),
            category,
            difficulty,
            prompt: build_prompt(&task.test_input),
            image_png_base64: image,
            test_input: task.test_input.to_text(),
        };
        s.active = Some(task);
        body
    }

    fn step(&self, id: &str, answer: &str) -> ReplyBody {
        let no_task = || ReplyBody::Error {
            message: "no active task".into(),
        };
        let Some(session) = self.existing(id) else {
            return no_task();
        };
        let mut s = session.lock().unwrap();
        let Some(task) = s.active.take() else {
            return no_task();
        };
        let record = score_response(&task, answer);
        ReplyBody::Result {
            task_id: task.id.clone(),
            reward: compute_reward(&task, answer, s.settings.reward_mode),
            correct: record.correct,
            parse_status: record.parse_status.unwrap_or(ParseStatus::ParseError),
            expected: self.cfg.reveal_expected.then(|| task.test_output.to_text()),
        }
    }

    /// The task awaiting an answer in `session`, if any.
    pub fn active_task(&self, session: &str) -> Option<Task> {
        self.existing(session)?.lock().unwrap().active.clone()
    }
}

fn error(session: Option<String>, message: String) -> Reply {
    Reply {
        version: PROTOCOL_VERSION,
        session,
        body: ReplyBody::Error { message },
    }
}
