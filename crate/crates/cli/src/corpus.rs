//! Regression runs over a directory of programs with a `manifest.toml`.

use std::fs;
use std::path::Path;

use bff_core::interp::DEFAULT_FUEL;
use bff_core::{check_program, run_program, EvalMode, Options, Verdict, Word};
use serde::Deserialize;

use crate::{parse_oracles, Failure, EXIT_INVALID, EXIT_REJECTED};

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Manifest {
    #[serde(default)]
    entry: Vec<Entry>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Entry {
    file: String,
    verdict: Verdict,
    #[serde(default)]
    run: Vec<RunCase>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RunCase {
    #[serde(default)]
    oracles: Vec<String>,
    #[serde(default)]
    args: Vec<String>,
    output: String,
}

fn check_entry(dir: &Path, e: &Entry) -> Vec<String> {
    let path = dir.join(&e.file);
    let src = match fs::read_to_string(&path) {
        Ok(s) => s,
        Err(err) => return vec![format!("{}: {err}", e.file)],
    };
    let prg = match bff_core::parse_program(&src) {
        Ok(p) => p,
        Err(errs) => return vec![format!("{}: {}", e.file, bff_core::CheckError::Parse(errs))],
    };
    let opts = Options::default();
    let mut failures = Vec::new();
    match check_program(&prg, &opts) {
        Ok(r) if r.verdict == e.verdict => {}
        Ok(r) => failures.push(format!("{}: expected verdict {}, got {}", e.file, e.verdict, r.verdict)),
        Err(err) => failures.push(format!("{}: {err}", e.file)),
    }
    for (i, case) in e.run.iter().enumerate() {
        let oracles = match parse_oracles(&case.oracles) {
            Ok(o) => o,
            Err(err) => {
                failures.push(format!("{} run {}: {err}", e.file, i + 1));
                continue;
            }
        };
        let words: Vec<Word> = case.args.iter().map(|s| Word::from(s.as_str())).collect();
        match run_program(&prg, &opts.registry, &oracles, &words, DEFAULT_FUEL, EvalMode::ByName) {
            Ok(w) if w.to_string() == case.output => {}
            Ok(w) => failures.push(format!("{} run {}: expected \"{}\", got \"{w}\"", e.file, i + 1, case.output)),
            Err(err) => failures.push(format!("{} run {}: {err}", e.file, i + 1)),
        }
    }
    failures
}

pub fn cmd_corpus(dir: &Path) -> Result<(), Failure> {
    let manifest_path = dir.join("manifest.toml");
    let has_programs = fs::read_dir(dir)
        .map_err(|e| Failure::new(EXIT_INVALID, format!("{}: {e}", dir.display())))?
        .filter_map(Result::ok)
        .any(|f| f.path().extension().is_some_and(|x| x == "bff"));
    if !manifest_path.exists() {
        if has_programs {
            return Err(Failure::new(EXIT_REJECTED, format!("{}: no manifest.toml", dir.display())));
        }
        eprintln!("warning: {} is empty, nothing to check", dir.display());
        return Ok(());
    }
    let text = fs::read_to_string(&manifest_path).map_err(|e| Failure::new(EXIT_REJECTED, e.to_string()))?;
    let manifest: Manifest =
        toml::from_str(&text).map_err(|e| Failure::new(EXIT_REJECTED, format!("{}: {e}", manifest_path.display())))?;
    if manifest.entry.is_empty() {
        eprintln!("warning: {} lists no entries", manifest_path.display());
    }
    let results: Vec<(String, Vec<String>)> = std::thread::scope(|s| {
        let handles: Vec<_> =
            manifest.entry.iter().map(|e| (e.file.clone(), s.spawn(move || check_entry(dir, e)))).collect();
        handles.into_iter().map(|(f, h)| (f, h.join().expect("corpus worker panicked"))).collect()
    });
    let mut failed = Vec::new();
    for (file, failures) in results {
        if failures.is_empty() {
            println!("ok   {file}");
        } else {
            println!("FAIL {file}");
            failed.extend(failures);
        }
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::new(EXIT_REJECTED, failed.join("\n")))
    }
}
