//! External ATP backend: write a TPTP problem to a temp file, run the
//! configured command on it and read the SZS status from stdout.

use std::io::{Read, Write};
use std::process::{Command, Stdio};
use std::thread;
use std::time::{Duration, Instant};

use super::{EntailmentOutcome, OutcomeKind};
use crate::fol::Formula;
use crate::tptp::{emit_problem, parse_szs, SzsStatus, TptpProblem};

const POLL: Duration = Duration::from_millis(5);

/// Expand `{timeout_s}` and split the command into program and arguments.
pub fn command_line(template: &str, timeout_ms: u64, problem_path: &str) -> Vec<String> {
    let secs = timeout_ms.div_ceil(1000).max(1).to_string();
    let mut argv: Vec<String> = template
        .split_whitespace()
        .map(|t| t.replace("{timeout_s}", &secs))
        .collect();
    argv.push(problem_path.to_string());
    argv
}

pub(crate) fn check(
    axioms: &[Formula],
    conjecture: &Formula,
    command: &str,
    timeout_ms: u64,
) -> EntailmentOutcome {
    let text = match emit_problem(&TptpProblem::new(axioms, Some(conjecture))) {
        Ok(t) => t,
        Err(e) => return EntailmentOutcome::error(format!("cannot serialize problem: {e}")),
    };
    let mut file = match tempfile::Builder::new()
        .prefix("chainprover-")
        .suffix(".p")
        .tempfile()
    {
        Ok(f) => f,
        Err(e) => return EntailmentOutcome::error(format!("cannot create problem file: {e}")),
    };
    if let Err(e) = file.write_all(text.as_bytes()).and_then(|_| file.flush()) {
        return EntailmentOutcome::error(format!("cannot write problem file: {e}"));
    }
    let argv = command_line(command, timeout_ms, &file.path().to_string_lossy());
    let Some((program, args)) = argv.split_first() else {
        return EntailmentOutcome::error("empty prover command");
    };

    let started = Instant::now();
    let mut child = match Command::new(program)
        .args(args)
        .stdin(Stdio::null())
        .stdout(Stdio::piped())
        .stderr(Stdio::null())
        .spawn()
    {
        Ok(c) => c,
        Err(e) => return EntailmentOutcome::error(format!("cannot launch `{program}`: {e}")),
    };
    let mut stdout = child.stdout.take().expect("stdout is piped");
    let reader = thread::spawn(move || {
        let mut buf = Vec::new();
        let _ = stdout.read_to_end(&mut buf);
        String::from_utf8_lossy(&buf).into_owned()
    });

    let deadline = started + Duration::from_millis(timeout_ms);
    let status = loop {
        match child.try_wait() {
            Ok(Some(status)) => break status,
            Ok(None) if Instant::now() >= deadline => {
                let _ = child.kill();
                let _ = child.wait();
                // The reader may still be blocked on a pipe held open by a
                // grandchild; it is left detached.
                return EntailmentOutcome {
                    kind: OutcomeKind::Indeterminate,
                    detail: format!("prover killed after {timeout_ms} ms"),
                    resource_limited: true,
                };
            }
            Ok(None) => thread::sleep(POLL),
            Err(e) => {
                let _ = child.kill();
                return EntailmentOutcome::error(format!("cannot wait for prover: {e}"));
            }
        }
    };
    let output = reader.join().unwrap_or_default();
    let szs = parse_szs(&output);
    let (kind, resource_limited) = match szs.status {
        SzsStatus::Theorem | SzsStatus::ContradictoryAxioms | SzsStatus::Unsatisfiable => {
            (OutcomeKind::Entailed, false)
        }
        SzsStatus::CounterSatisfiable | SzsStatus::Satisfiable => (OutcomeKind::NotEntailed, false),
        SzsStatus::Timeout | SzsStatus::GaveUp => (OutcomeKind::Indeterminate, true),
        SzsStatus::Error => {
            return EntailmentOutcome::error(format!("prover reported `{}`", szs.raw_line.trim()))
        }
        SzsStatus::Unparsed => {
            return EntailmentOutcome::error(format!(
                "prover exited with {status} without an SZS status line"
            ))
        }
    };
    EntailmentOutcome {
        kind,
        detail: szs.raw_line.trim().to_string(),
        resource_limited,
    }
}
