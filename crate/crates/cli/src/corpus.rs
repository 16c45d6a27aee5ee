//! Fixture corpus: each `<name>.cmd` holds one command line (without the
//! program name) and `<name>.expected` its exit code, standard output and,
//! when present, standard error.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use similar::TextDiff;

use crate::{run, CliError, Outcome};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FixtureResult {
    pub name: String,
    pub passed: bool,
    pub diff: String,
}

pub fn render_expected(out: &Outcome) -> String {
    let mut s = format!("exit: {}\n{}", out.code, out.stdout);
    if !out.stderr.is_empty() {
        s.push_str("--- stderr\n");
        s.push_str(&out.stderr);
    }
    s
}

fn fixtures(dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let entries = std::fs::read_dir(dir).map_err(|_| CliError::MissingFixture(dir.to_path_buf()))?;
    let mut cmds: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "cmd"))
        .collect();
    cmds.sort();
    if cmds.is_empty() {
        return Err(CliError::MissingFixture(dir.to_path_buf()));
    }
    Ok(cmds)
}

fn io(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Runs one fixture, or rewrites its expectation when `bless` is set.
pub fn run_fixture(cmd: &Path, bless: bool) -> Result<FixtureResult, CliError> {
    let dir = cmd.parent().unwrap_or(Path::new("."));
    let name = cmd.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let line = std::fs::read_to_string(cmd).map_err(io(cmd))?;
    let mut argv = vec!["dynpair".to_string()];
    argv.extend(line.split_whitespace().map(String::from));
    let actual = render_expected(&run(&argv, dir));
    let expected_path = cmd.with_extension("expected");
    if bless {
        std::fs::write(&expected_path, &actual).map_err(io(&expected_path))?;
        return Ok(FixtureResult {
            name,
            passed: true,
            diff: String::new(),
        });
    }
    let expected = std::fs::read_to_string(&expected_path).map_err(io(&expected_path))?;
    let passed = expected == actual;
    let diff = if passed {
        String::new()
    } else {
        TextDiff::from_lines(&expected, &actual)
            .unified_diff()
            .header("expected", "actual")
            .to_string()
    };
    Ok(FixtureResult { name, passed, diff })
}

pub fn run_corpus(dir: &Path, bless: bool) -> Result<Outcome, CliError> {
    let mut stdout = String::new();
    let mut failed = 0;
    let cmds = fixtures(dir)?;
    for cmd in &cmds {
        let r = run_fixture(cmd, bless)?;
        let tag = match (bless, r.passed) {
            (true, _) => "BLESSED",
            (false, true) => "PASS",
            (false, false) => "FAIL",
        };
        let _ = writeln!(stdout, "{tag} {}", r.name);
        if !r.passed {
            failed += 1;
            stdout.push_str(&r.diff);
        }
    }
    let _ = writeln!(stdout, "{} passed, {failed} failed", cmds.len() - failed);
    Ok(Outcome {
        code: if failed == 0 { 0 } else { 1 },
        stdout,
        stderr: String::new(),
    })
}
