use std::fs;

use gridrule::generators::{sample_dataset, DatasetConfig};
use gridrule::task::{read_manifest, read_manifest_unchecked, write_manifest, ManifestError, Split};

fn small() -> DatasetConfig {
    DatasetConfig::with_sizes(42, 6, 2)
}

#[test]
fn round_trip_is_lossless_and_byte_stable() {
    let dir = tempfile::tempdir().unwrap();
    let data = sample_dataset(&small()).unwrap();
    for split in Split::ALL {
        let path = dir.path().join(format!("{split}.jsonl"));
        write_manifest(data.split(split), &path).unwrap();
        let back = read_manifest(&path).unwrap();
        assert_eq!(&back, data.split(split));

        let again = dir.path().join(format!("{split}-again.jsonl"));
        write_manifest(&back, &again).unwrap();
        assert_eq!(fs::read(&path).unwrap(), fs::read(&again).unwrap());
    }
}

#[test]
fn one_header_line_then_one_line_per_task() {
    let dir = tempfile::tempdir().unwrap();
    let data = sample_dataset(&small()).unwrap();
    let path = dir.path().join("train.jsonl");
    write_manifest(&data.train, &path).unwrap();
    let text = fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 1 + 30);
    let header: serde_json::Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
    assert_eq!(header["split"], "train");
    assert_eq!(header["config"]["seed"], 42);
}

#[test]
fn truncation_is_detected() {
    let dir = tempfile::tempdir().unwrap();
    let data = sample_dataset(&small()).unwrap();
    let path = dir.path().join("train.jsonl");
    write_manifest(&data.train, &path).unwrap();
    let text = fs::read_to_string(&path).unwrap();
    let kept: Vec<&str> = text.lines().take(20).collect();
    fs::write(&path, kept.join("\n") + "\n").unwrap();
    let err = read_manifest_unchecked(&path).unwrap_err();
    assert!(matches!(err, ManifestError::Schema { .. }), "{err}");
    assert!(err.to_string().contains("truncated"), "{err}");

    fs::write(&path, &text[..text.len() / 2]).unwrap();
    assert!(matches!(read_manifest_unchecked(&path), Err(ManifestError::Schema { .. })));
}

#[test]
fn tampered_outputs_fail_the_checked_read() {
    let dir = tempfile::tempdir().unwrap();
    let mut data = sample_dataset(&small()).unwrap();
    let task = &mut data.train.tasks[3];
    let (r, c) = (0, 0);
    let other = if task.test_output.get(r, c).index() == 0 { 1 } else { 0 };
    task.test_output.set(r, c, gridrule::grid::Color::from_index(other).unwrap());
    let path = dir.path().join("train.jsonl");
    write_manifest(&data.train, &path).unwrap();
    let err = read_manifest(&path).unwrap_err();
    match err {
        ManifestError::Schema { line, .. } => assert_eq!(line, 5),
        other => panic!("{other}"),
    }
    assert!(read_manifest_unchecked(&path).is_ok());
}

#[test]
fn missing_and_garbage_files() {
    let dir = tempfile::tempdir().unwrap();
    assert!(matches!(read_manifest(dir.path().join("nope.jsonl")), Err(ManifestError::Io { .. })));
    let path = dir.path().join("bad.jsonl");
    fs::write(&path, "").unwrap();
    assert!(matches!(read_manifest(&path), Err(ManifestError::Schema { line: 1, .. })));
    fs::write(&path, "{\"format\":\"something-else\"}\n").unwrap();
    assert!(matches!(read_manifest(&path), Err(ManifestError::Schema { line: 1, .. })));
}
