//! Runs every `$ mlexp` example in the README and compares its stdout.

use std::path::{Path, PathBuf};
use std::process::Command;

struct Example {
    line: usize,
    env: Vec<(String, String)>,
    args: Vec<String>,
    expected: Vec<String>,
}

fn repo_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

/// Collects examples from ```console blocks; `$ ` lines are commands, the rest expected output.
fn examples(readme: &str) -> Vec<Example> {
    let mut out: Vec<Example> = Vec::new();
    let mut in_block = false;
    for (i, line) in readme.lines().enumerate() {
        if line.starts_with("```") {
            in_block = line.trim() == "```console";
            continue;
        }
        if !in_block {
            continue;
        }
        if let Some(cmd) = line.strip_prefix("$ ") {
            let mut words = cmd.split_whitespace().peekable();
            let mut env = Vec::new();
            while let Some((k, v)) = words.peek().and_then(|w| w.split_once('=')).filter(|(k, _)| k.chars().all(|c| c.is_ascii_uppercase() || c == '_')) {
                env.push((k.to_string(), v.to_string()));
                words.next();
            }
            assert_eq!(words.next(), Some("mlexp"), "README line {}: not an mlexp command", i + 1);
            out.push(Example { line: i + 1, env, args: words.map(String::from).collect(), expected: Vec::new() });
        } else if let Some(ex) = out.last_mut() {
            ex.expected.push(line.to_string());
        }
    }
    out
}

/// Matches `actual` against `expected`, where a `...` line absorbs any run of lines.
fn matches(expected: &[String], actual: &[&str]) -> bool {
    match expected.split_first() {
        None => actual.is_empty(),
        Some((head, rest)) if head == "..." => (0..=actual.len()).any(|k| matches(rest, &actual[k..])),
        Some((head, rest)) => actual.first().is_some_and(|a| a == head) && matches(rest, &actual[1..]),
    }
}

fn copy_dir(from: &Path, to: &Path) {
    std::fs::create_dir_all(to).unwrap();
    for entry in std::fs::read_dir(from).unwrap() {
        let entry = entry.unwrap();
        std::fs::copy(entry.path(), to.join(entry.file_name())).unwrap();
    }
}

#[test]
fn readme_examples_run() {
    let readme = std::fs::read_to_string(repo_root().join("README.md")).unwrap();
    let list = examples(&readme);
    assert!(list.len() >= 8, "expected the README examples, found {}", list.len());
    for ex in list {
        let dir = tempfile::tempdir().unwrap();
        copy_dir(&repo_root().join("configs"), &dir.path().join("configs"));
        let o = Command::new(env!("CARGO_BIN_EXE_mlexp"))
            .args(&ex.args)
            .envs(ex.env.iter().map(|(k, v)| (k, v)))
            .env_remove("MLEXP_OUTPUT_DIR")
            .current_dir(dir.path())
            .output()
            .unwrap();
        let stdout = String::from_utf8(o.stdout).unwrap();
        assert_eq!(o.status.code(), Some(0), "README line {}: {}", ex.line, String::from_utf8_lossy(&o.stderr));
        let actual: Vec<&str> = stdout.lines().collect();
        assert!(matches(&ex.expected, &actual), "README line {}: output differs\n--- expected\n{}\n--- actual\n{stdout}", ex.line, ex.expected.join("\n"));
    }
}

#[test]
fn wildcard_matching() {
    let e = |s: &[&str]| s.iter().map(|x| x.to_string()).collect::<Vec<_>>();
    assert!(matches(&e(&["a", "...", "d"]), &["a", "b", "c", "d"]));
    assert!(matches(&e(&["a", "..."]), &["a"]));
    assert!(!matches(&e(&["a", "d"]), &["a", "b", "d"]));
    assert!(!matches(&e(&["...", "x"]), &["a", "b"]));
}
