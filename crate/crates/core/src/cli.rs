//! The `gridrule` command line.
//!
//! Exit codes: 0 on success, 1 on operational errors, 2 on usage errors.

use std::collections::BTreeMap;
use std::error::Error;
use std::ffi::OsString;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Deserialize;

use crate::env::{serve_stdio, serve_tcp, EnvConfig, EnvService, RewardMode};
use crate::eval::mock::{EchoBackend, PerfectBackend, ProseBackend};
use crate::eval::{evaluate, ChatBackend, Evaluation, ModelEndpointConfig, OfflineBackend, OpenAiChatClient, ResponseCache};
use crate::generators::{check_unambiguous, confusion_family, sample_dataset, DatasetConfig, GeneratorConfig};
use crate::render::{render_task, RenderStyle};
use crate::task::{read_manifest, read_manifest_unchecked, write_manifest, Category, DatasetManifest, Difficulty, Split, Task};

type Result<T> = std::result::Result<T, Box<dyn Error + Send + Sync>>;

#[derive(Debug, Parser)]
#[command(name = "gridrule", version, about = "Generate, render, evaluate and serve grid-transformation reasoning tasks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sample train and test manifests plus one PNG per task.
    Generate(GenerateArgs),
    /// Render the tasks of a manifest to PNGs.
    Render(RenderArgs),
    /// Query a model on every task of a manifest and report success rates.
    Eval(EvalArgs),
    /// Re-score cached responses without touching the network.
    Score(ScoreArgs),
    /// Show a manifest's composition.
    Stats(StatsArgs),
    /// Re-apply every task's rule and re-run the uniqueness check.
    Verify(VerifyArgs),
    /// Run the environment service.
    ServeEnv(ServeArgs),
}

/// Optional TOML file; flags given on the command line win.
#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct FileConfig {
    seed: Option<u64>,
    train_per_category: Option<usize>,
    test_per_category: Option<usize>,
    generator: Option<GeneratorConfig>,
    render: Option<RenderStyle>,
    endpoint: Option<ModelEndpointConfig>,
    env: Option<EnvConfig>,
}

fn load_config(path: Option<&Path>) -> Result<FileConfig> {
    match path {
        None => Ok(FileConfig::default()),
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()))?;
            toml::from_str(&text).map_err(|e| format!("{}: {e}", p.display()).into())
        }
    }
}

#[derive(Debug, Args)]
struct StyleArgs {
    /// Cell size in pixels.
    #[arg(long)]
    cell_px: Option<usize>,
    /// Also draw the test input, with a question mark in place of its output.
    #[arg(long)]
    include_test_input: bool,
    /// Omit the "r x c" shape annotations.
    #[arg(long)]
    no_annotations: bool,
}

impl StyleArgs {
    fn style(&self, base: Option<RenderStyle>) -> RenderStyle {
        let mut style = base.unwrap_or_default();
        if let Some(px) = self.cell_px {
            style.cell_px = px;
        }
        if self.include_test_input {
            style.include_test_input = true;
        }
        if self.no_annotations {
            style.annotate_shapes = false;
        }
        style
    }
}

#[derive(Debug, Args)]
struct GenerateArgs {
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, default_value = "data")]
    out: PathBuf,
    #[arg(long)]
    train_per_category: Option<usize>,
    #[arg(long)]
    test_per_category: Option<usize>,
    /// Skip rendering images.
    #[arg(long)]
    no_images: bool,
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    style: StyleArgs,
}

#[derive(Debug, Args)]
struct RenderArgs {
    /// Manifest files to render.
    #[arg(required = true)]
    manifests: Vec<PathBuf>,
    #[arg(long, default_value = "images")]
    out: PathBuf,
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    style: StyleArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MockModel {
    Perfect,
    Echo,
    Prose,
}

#[derive(Debug, Args)]
struct EndpointArgs {
    #[arg(long)]
    model: Option<String>,
    #[arg(long)]
    base_url: Option<String>,
    /// Environment variable holding the API key.
    #[arg(long)]
    api_key_env: Option<String>,
    #[arg(long)]
    temperature: Option<f64>,
    #[arg(long)]
    samples: Option<u32>,
    #[arg(long)]
    max_output_tokens: Option<u32>,
    #[arg(long)]
    max_in_flight: Option<usize>,
    #[arg(long)]
    requests_per_minute: Option<u32>,
    #[arg(long)]
    image_detail: Option<String>,
}

impl EndpointArgs {
    fn endpoint(&self, base: Option<ModelEndpointConfig>) -> ModelEndpointConfig {
        let mut cfg = base.unwrap_or_default();
        if let Some(v) = &self.model {
            cfg.model = v.clone();
        }
        if let Some(v) = &self.base_url {
            cfg.base_url = v.clone();
        }
        if let Some(v) = &self.api_key_env {
            cfg.api_key_env = Some(v.clone());
        }
        if let Some(v) = self.temperature {
            cfg.temperature = v;
        }
        if let Some(v) = self.samples {
            cfg.samples_per_task = v;
        }
        if let Some(v) = self.max_output_tokens {
            cfg.max_output_tokens = Some(v);
        }
        if let Some(v) = self.max_in_flight {
            cfg.max_in_flight = v;
        }
        if let Some(v) = self.requests_per_minute {
            cfg.requests_per_minute = Some(v);
        }
        if let Some(v) = &self.image_detail {
            cfg.image_detail = Some(v.clone());
        }
        cfg
    }
}

#[derive(Debug, Args)]
struct EvalArgs {
    manifest: PathBuf,
    #[command(flatten)]
    endpoint: EndpointArgs,
    /// Response cache directory; defaults to `<out>/cache`.
    #[arg(long)]
    cache: Option<PathBuf>,
    /// Reports go to `<out>/reports`.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Answer with a scripted model instead of calling an endpoint.
    #[arg(long, value_enum)]
    mock: Option<MockModel>,
    /// Only evaluate the first N tasks.
    #[arg(long)]
    limit: Option<usize>,
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    style: StyleArgs,
}

#[derive(Debug, Args)]
struct ScoreArgs {
    manifest: PathBuf,
    #[arg(long)]
    model: String,
    #[arg(long, default_value_t = 0.5)]
    temperature: f64,
    #[arg(long)]
    samples: Option<u32>,
    #[arg(long)]
    cache: PathBuf,
    #[arg(long, default_value = ".")]
    out: PathBuf,
    #[arg(long)]
    limit: Option<usize>,
}

#[derive(Debug, Args)]
struct StatsArgs {
    #[arg(required = true)]
    manifests: Vec<PathBuf>,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(required = true)]
    manifests: Vec<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Transport {
    Stdio,
    Tcp,
}

#[derive(Debug, Args)]
struct ServeArgs {
    #[arg(long, value_enum, default_value = "stdio")]
    transport: Transport,
    #[arg(long, default_value = "127.0.0.1:7878")]
    addr: String,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_parser = clap::value_parser!(RewardMode))]
    reward_mode: Option<RewardMode>,
    /// Include the ground-truth grid in step results.
    #[arg(long)]
    reveal_expected: bool,
    /// Comma-separated category subset.
    #[arg(long, value_delimiter = ',')]
    categories: Option<Vec<Category>>,
    #[arg(long, value_delimiter = ',', num_args = 3)]
    difficulty_probs: Option<Vec<f64>>,
    #[arg(long)]
    config: Option<PathBuf>,
}

impl clap::builder::ValueParserFactory for RewardMode {
    type Parser = clap::builder::ValueParser;
    fn value_parser() -> Self::Parser {
        clap::builder::ValueParser::new(|s: &str| s.parse::<RewardMode>())
    }
}

impl clap::builder::ValueParserFactory for Category {
    type Parser = clap::builder::ValueParser;
    fn value_parser() -> Self::Parser {
        clap::builder::ValueParser::new(|s: &str| s.parse::<Category>())
    }
}

/// Parses `argv` (including the program name) and runs the subcommand.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let result = match cli.command {
        Command::Generate(a) => generate(a),
        Command::Render(a) => render(a),
        Command::Eval(a) => eval(a),
        Command::Score(a) => score(a),
        Command::Stats(a) => stats(a),
        Command::Verify(a) => verify(a),
        Command::ServeEnv(a) => serve(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn render_all(tasks: &[Task], style: &RenderStyle, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| format!("{}: {e}", dir.display()))?;
    tasks.par_iter().try_for_each(|task| -> Result<()> {
        let png = render_task(task, style).map_err(|e| format!("task {}: {e}", task.id))?;
        let path = dir.join(format!("{}.png", task.id));
        fs::write(&path, png).map_err(|e| format!("{}: {e}", path.display()))?;
        Ok(())
    })
}

fn generate(a: GenerateArgs) -> Result<i32> {
    let file = load_config(a.config.as_deref())?;
    let seed = a.seed.or(file.seed).unwrap_or(0);
    let train = a.train_per_category.or(file.train_per_category).unwrap_or(1000);
    let test = a.test_per_category.or(file.test_per_category).unwrap_or(100);
    let mut cfg = DatasetConfig::with_sizes(seed, train, test);
    if let Some(g) = file.generator {
        cfg.generator = g;
    }
    let style = a.style.style(file.render);
    style.validate()?;
    let data = sample_dataset(&cfg)?;
    fs::create_dir_all(&a.out).map_err(|e| format!("{}: {e}", a.out.display()))?;
    for split in Split::ALL {
        let manifest = data.split(split);
        write_manifest(manifest, a.out.join(format!("{split}.jsonl")))?;
        if !a.no_images {
            render_all(&manifest.tasks, &style, &a.out.join("images"))?;
        }
    }
    println!(
        "wrote {} train and {} test tasks to {}",
        data.train.tasks.len(),
        data.test.tasks.len(),
        a.out.display()
    );
    Ok(0)
}

fn render(a: RenderArgs) -> Result<i32> {
    let file = load_config(a.config.as_deref())?;
    let style = a.style.style(file.render);
    style.validate()?;
    let mut n = 0;
    for path in &a.manifests {
        let manifest = read_manifest(path)?;
        render_all(&manifest.tasks, &style, &a.out)?;
        n += manifest.tasks.len();
    }
    println!("rendered {n} tasks to {}", a.out.display());
    Ok(0)
}

fn load_tasks(path: &Path, limit: Option<usize>) -> Result<Vec<Task>> {
    let mut tasks = read_manifest(path)?.tasks;
    if let Some(n) = limit {
        tasks.truncate(n);
    }
    Ok(tasks)
}

fn write_reports(run: &Evaluation, out: &Path) -> Result<()> {
    let dir = out.join("reports");
    fs::create_dir_all(&dir).map_err(|e| format!("{}: {e}", dir.display()))?;
    let mut records = Vec::new();
    for r in &run.records {
        serde_json::to_writer(&mut records, r)?;
        records.push(b'\n');
    }
    fs::write(dir.join("records.jsonl"), records)?;
    fs::write(dir.join("report.json"), run.report.to_json() + "\n")?;
    fs::write(dir.join("report.txt"), run.report.to_text())?;
    print!("{}", run.report.to_text());
    println!(
        "network calls: {}, cache hits: {}; reports in {}",
        run.stats.network_calls,
        run.stats.cache_hits,
        dir.display()
    );
    Ok(())
}

fn eval(a: EvalArgs) -> Result<i32> {
    let file = load_config(a.config.as_deref())?;
    let mut endpoint = a.endpoint.endpoint(file.endpoint);
    let style = a.style.style(file.render);
    let tasks = load_tasks(&a.manifest, a.limit)?;
    let backend: Box<dyn ChatBackend> = match a.mock {
        Some(MockModel::Perfect) => Box::new(PerfectBackend::new(&tasks)),
        Some(MockModel::Echo) => Box::new(EchoBackend),
        Some(MockModel::Prose) => Box::new(ProseBackend),
        None => Box::new(OpenAiChatClient::new(&endpoint)?),
    };
    if let (Some(mock), true) = (a.mock, endpoint.model.is_empty()) {
        endpoint.model = format!("mock-{mock:?}").to_lowercase();
    }
    let cache = ResponseCache::new(a.cache.unwrap_or_else(|| a.out.join("cache")));
    let run = evaluate(&tasks, &endpoint, backend.as_ref(), Some(&cache), &style)?;
    write_reports(&run, &a.out)?;
    Ok(0)
}

fn score(a: ScoreArgs) -> Result<i32> {
    let tasks = load_tasks(&a.manifest, a.limit)?;
    let endpoint = ModelEndpointConfig {
        model: a.model,
        temperature: a.temperature,
        samples_per_task: a.samples.unwrap_or(1),
        api_key_env: None,
        max_retries: 0,
        ..ModelEndpointConfig::default()
    };
    let cache = ResponseCache::new(a.cache);
    let run = evaluate(&tasks, &endpoint, &OfflineBackend, Some(&cache), &RenderStyle::default())?;
    write_reports(&run, &a.out)?;
    Ok(0)
}

fn stats(a: StatsArgs) -> Result<i32> {
    let mut out = std::io::stdout().lock();
    for path in &a.manifests {
        let manifest: DatasetManifest = read_manifest(path)?;
        let mut counts: BTreeMap<(Category, Difficulty), usize> = BTreeMap::new();
        let (mut lo, mut hi) = (usize::MAX, 0);
        for task in &manifest.tasks {
            *counts.entry((task.category(), task.difficulty())).or_default() += 1;
            for (input, _) in task.all_pairs() {
                lo = lo.min(input.rows().min(input.cols()));
                hi = hi.max(input.rows().max(input.cols()));
            }
        }
        writeln!(out, "{} ({} split, {} tasks)", path.display(), manifest.split, manifest.tasks.len())?;
        writeln!(out, "{:<16}{:>8}{:>8}{:>8}{:>8}", "category", "easy", "medium", "hard", "total")?;
        for category in Category::ALL {
            write!(out, "{:<16}", category.name())?;
            let mut total = 0;
            for difficulty in Difficulty::ALL {
                let n = counts.get(&(category, difficulty)).copied().unwrap_or(0);
                total += n;
                write!(out, "{n:>8}")?;
            }
            writeln!(out, "{total:>8}")?;
        }
        write!(out, "{:<16}", "total")?;
        for difficulty in Difficulty::ALL {
            let n: usize = Category::ALL
                .iter()
                .map(|&c| counts.get(&(c, difficulty)).copied().unwrap_or(0))
                .sum();
            write!(out, "{n:>8}")?;
        }
        writeln!(out, "{:>8}", manifest.tasks.len())?;
        if hi > 0 {
            writeln!(out, "input grid sides: {lo}..={hi}")?;
        }
        writeln!(out)?;
    }
    Ok(0)
}

fn verify(a: VerifyArgs) -> Result<i32> {
    // Unchecked so every failing task can be reported, not just the first.
    let mut tasks = Vec::new();
    for path in &a.manifests {
        tasks.extend(read_manifest_unchecked(path)?.tasks);
    }
    let failures: Vec<String> = tasks
        .par_iter()
        .filter_map(|t| t.check_consistency().err().map(|e| format!("{}: {e}", t.id)))
        .collect();
    let ambiguous = tasks
        .par_iter()
        .filter(|t| !check_unambiguous(t, &confusion_family(t)).unique)
        .count();
    let identity = tasks.iter().filter(|t| t.test_input == t.test_output).count();
    for f in &failures {
        eprintln!("inconsistent: {f}");
    }
    let n = tasks.len();
    println!("{}/{n} rule-consistent", n - failures.len());
    println!("{}/{n} unambiguous", n - ambiguous);
    println!("{}/{n} non-identity test pairs", n - identity);
    Ok(if failures.is_empty() && ambiguous == 0 && identity == 0 { 0 } else { 1 })
}

fn serve(a: ServeArgs) -> Result<i32> {
    let file = load_config(a.config.as_deref())?;
    let mut cfg = file.env.unwrap_or_default();
    if let Some(seed) = a.seed {
        cfg.seed = seed;
    }
    if let Some(mode) = a.reward_mode {
        cfg.reward_mode = mode;
    }
    if a.reveal_expected {
        cfg.reveal_expected = true;
    }
    if let Some(c) = a.categories {
        cfg.categories = c;
    }
    if let Some(p) = a.difficulty_probs {
        cfg.difficulty_probs = [p[0], p[1], p[2]];
    }
    let service = EnvService::new(cfg)?;
    match a.transport {
        Transport::Stdio => serve_stdio(&service)?,
        Transport::Tcp => {
            eprintln!("listening on {}", a.addr);
            serve_tcp(Arc::new(service), a.addr.as_str())?
        }
    }
    Ok(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(run(["gridrule", "frobnicate"]), 2);
        assert_eq!(run(["gridrule", "generate", "--no-such-flag"]), 2);
        assert_eq!(run(["gridrule", "verify"]), 2);
        assert_eq!(run(["gridrule", "generate", "--help"]), 0);
    }

    #[test]
    fn operational_errors_exit_1() {
        assert_eq!(run(["gridrule", "stats", "/definitely/not/here.jsonl"]), 1);
    }

    #[test]
    fn generate_then_verify() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().to_str().unwrap();
        let code = run(["gridrule", "generate", "--seed", "3", "--out", out, "--train-per-category", "2", "--test-per-category", "1"]);
        assert_eq!(code, 0);
        assert!(dir.path().join("images/cross_star-train-0000.png").exists());
        assert!(dir.path().join("images/drop_one_color-test-0000.png").exists());
        let train = dir.path().join("train.jsonl");
        assert_eq!(run(["gridrule", "verify", train.to_str().unwrap()]), 0);
        assert_eq!(run(["gridrule", "stats", train.to_str().unwrap()]), 0);
    }

    #[test]
    fn config_file_is_applied() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("cfg.toml");
        fs::write(&cfg, "seed = 11\ntrain_per_category = 1\ntest_per_category = 1\n[render]\ncell_px = 10\n").unwrap();
        let out = dir.path().join("out");
        let code = run([
            "gridrule",
            "generate",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(code, 0);
        let manifest = read_manifest_unchecked(out.join("train.jsonl")).unwrap();
        assert_eq!(manifest.config.seed, 11);
        assert_eq!(manifest.tasks.len(), 5);
        fs::write(&cfg, "bogus = 1\n").unwrap();
        assert_eq!(run(["gridrule", "generate", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]), 1);
    }
}
