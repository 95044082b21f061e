use std::io::{BufRead, BufReader, Write};
use std::process::{Child, ChildStdin, ChildStdout, Command, Stdio};

use base64::engine::general_purpose::STANDARD;
use base64::Engine as _;
use gridrule::env::{compute_reward, EnvConfig, EnvService, RewardMode, PROTOCOL_VERSION};
use gridrule::eval::score_response;
use gridrule::prompt::fence;
use gridrule::task::Difficulty;
use serde_json::{json, Value};

struct Server {
    child: Child,
    stdin: ChildStdin,
    stdout: BufReader<ChildStdout>,
}

impl Server {
    fn spawn(args: &[&str]) -> Server {
        let mut child = Command::new(env!("CARGO_BIN_EXE_gridrule"))
            .arg("serve-env")
            .args(args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .spawn()
            .unwrap();
        let stdin = child.stdin.take().unwrap();
        let stdout = BufReader::new(child.stdout.take().unwrap());
        Server { child, stdin, stdout }
    }

    fn call(&mut self, request: Value) -> Value {
        writeln!(self.stdin, "{request}").unwrap();
        self.stdin.flush().unwrap();
        let mut line = String::new();
        self.stdout.read_line(&mut line).unwrap();
        let reply: Value = serde_json::from_str(&line).unwrap();
        assert_eq!(reply["version"], PROTOCOL_VERSION);
        reply
    }

    fn close(mut self) {
        drop(self.stdin);
        assert!(self.child.wait().unwrap().success());
    }
}

#[test]
fn stdio_episode() {
    let mut server = Server::spawn(&["--seed", "5", "--reveal-expected"]);
    let early = server.call(json!({"op": "step", "session": "s", "answer": "x"}));
    assert_eq!(early["op"], "error");
    assert_eq!(early["message"], "no active task");

    let task = server.call(json!({"op": "reset", "session": "s"}));
    assert_eq!(task["op"], "task");
    assert!(task["prompt"].as_str().unwrap().contains("find the common rule that maps"));
    let png = STANDARD.decode(task["image_png_base64"].as_str().unwrap()).unwrap();
    assert_eq!(&png[..4], b"\x89PNG");

    let echo = fence(task["test_input"].as_str().unwrap());
    let result = server.call(json!({"op": "step", "session": "s", "answer": echo}));
    assert_eq!(result["op"], "result");
    assert_eq!(result["task_id"], task["task_id"]);
    assert_eq!(result["reward"], 0.0);
    assert_eq!(result["correct"], false);
    assert!(result["expected"].is_string());

    let again = server.call(json!({"op": "step", "session": "s", "answer": echo}));
    assert_eq!(again["message"], "no active task");

    let bad = server.call(json!({"op": "launch", "session": "s"}));
    assert_eq!(bad["op"], "error");
    let garbled = server.call(json!("not an object"));
    assert_eq!(garbled["op"], "error");
    server.close();
}

#[test]
fn same_seed_same_stream_across_processes() {
    let run = || {
        let mut server = Server::spawn(&["--seed", "77"]);
        let tasks: Vec<(Value, Value)> = (0..4)
            .map(|_| {
                let t = server.call(json!({"op": "reset", "session": "w"}));
                (t["task_id"].clone(), t["test_input"].clone())
            })
            .collect();
        server.close();
        tasks
    };
    assert_eq!(run(), run());
}

#[test]
fn configure_and_reset_options_steer_difficulty() {
    let mut server = Server::spawn(&[]);
    let ack = server.call(json!({"op": "configure", "session": "c", "difficulty_probs": [0, 0, 1]}));
    assert_eq!(ack["op"], "ack");
    for _ in 0..10 {
        assert_eq!(server.call(json!({"op": "reset", "session": "c"}))["difficulty"], "hard");
    }
    for _ in 0..10 {
        let t = server.call(json!({"op": "reset", "session": "c", "difficulty_probs": [1, 0, 0], "categories": ["double_grid"]}));
        assert_eq!(t["difficulty"], "easy");
        assert_eq!(t["category"], "double_grid");
    }
    let bad = server.call(json!({"op": "configure", "session": "c", "difficulty_probs": [0.5, 0.5, 0.5]}));
    assert_eq!(bad["op"], "error");
    server.close();
}

/// Scripted episodes against the in-process service: every reward equals
/// offline scoring of the same (task, answer) pair.
#[test]
fn rewards_match_offline_scoring() {
    for mode in [RewardMode::Binary, RewardMode::Shaped] {
        let svc = EnvService::new(EnvConfig {
            reward_mode: mode,
            seed: 3,
            ..EnvConfig::default()
        })
        .unwrap();
        for i in 0..100 {
            let session = format!("p{}", i % 7);
            let reply: Value = serde_json::from_str(&svc.handle_line(&json!({"op": "reset", "session": session}).to_string())).unwrap();
            let task = svc.active_task(&session).unwrap();
            assert_eq!(reply["task_id"], task.id.as_str());
            let answer = match i % 4 {
                0 => fence(&task.test_output.to_text()),
                1 => fence(&task.test_input.to_text()),
                2 => "no idea".to_string(),
                _ => {
                    let mut g = task.test_output.clone();
                    let flip = if g.get(0, 0).index() == 9 { 0 } else { 9 };
                    g.set(0, 0, gridrule::grid::Color::from_index(flip).unwrap());
                    fence(&g.to_text())
                }
            };
            let step = json!({"op": "step", "session": session, "answer": answer}).to_string();
            let result: Value = serde_json::from_str(&svc.handle_line(&step)).unwrap();
            let offline = score_response(&task, &answer);
            assert_eq!(result["correct"], offline.correct);
            assert_eq!(result["reward"].as_f64().unwrap(), compute_reward(&task, &answer, mode));
            if mode == RewardMode::Binary {
                assert_eq!(result["reward"].as_f64().unwrap(), if offline.correct { 1.0 } else { 0.0 });
            }
            assert_eq!(offline.correct, i % 4 == 0);
        }
    }
}

#[test]
fn curriculum_mixture_is_respected() {
    let svc = EnvService::new(EnvConfig::default()).unwrap();
    let mut counts = [0usize; 3];
    let first = json!({"op": "reset", "session": "m", "difficulty_probs": [0.2, 0.3, 0.5]}).to_string();
    let next = json!({"op": "reset", "session": "m"}).to_string();
    for i in 0..1000 {
        let reply: Value = serde_json::from_str(&svc.handle_line(if i == 0 { &first } else { &next })).unwrap();
        let d: Difficulty = reply["difficulty"].as_str().unwrap().parse().unwrap();
        counts[Difficulty::ALL.iter().position(|&x| x == d).unwrap()] += 1;
    }
    for (n, p) in counts.iter().zip([0.2, 0.3, 0.5]) {
        assert!((*n as f64 / 1000.0 - p).abs() < 0.05, "{counts:?}");
    }
}
