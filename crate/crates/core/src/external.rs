//! Streams generator bytes into an external test suite.
//!
//! The command is a shell template run with `sh -c`. `{bytes}` expands to the byte budget and
//! `{generator}` to the generator label. Raw bytes go to the child's standard input. Its
//! standard output and error are captured in a log file, followed by a trailer line with the
//! exit status and byte count. The tool itself is opaque; its exit status is the verdict.

use std::fs::File;
use std::io::{ErrorKind, Write};
use std::path::{Path, PathBuf};
use std::process::{Command, ExitStatus, Stdio};

use crate::error::{Error, Result};
use crate::smoke::ByteSource;

pub const EXTERNAL_TESTER_ENV: &str = "ROMU_EXTERNAL_TESTER";

/// The command from the flag, else from `ROMU_EXTERNAL_TESTER`. Blank values count as unset.
pub fn resolve_command(flag: Option<&str>) -> Option<String> {
    flag.map(str::to_owned)
        .or_else(|| std::env::var(EXTERNAL_TESTER_ENV).ok())
        .filter(|c| !c.trim().is_empty())
}

pub fn expand_template(template: &str, generator: &str, budget_bytes: u64) -> String {
    template
        .replace("{bytes}", &budget_bytes.to_string())
        .replace("{generator}", generator)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExternalStatus {
    /// No command configured.
    Skipped,
    /// The child exited successfully after reading the whole budget.
    Passed,
    /// The child exited unsuccessfully. `code` is `None` when killed by a signal.
    Failed { code: Option<i32> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExternalRun {
    pub status: ExternalStatus,
    /// Bytes accepted by the child's standard input.
    pub bytes_written: u64,
    pub log_path: Option<PathBuf>,
}

const CHUNK: usize = 1 << 16;

/// Pipes up to `budget_bytes` from `source` into `command`, logging to `log_path`.
///
/// A child that exits nonzero before the budget is spent has failed the stream, and
/// `bytes_written` is the score. A child that closes its input early and still exits
/// successfully gives [`Error::BrokenPipe`].
pub fn run_external<S: ByteSource + ?Sized>(
    command: Option<&str>,
    generator: &str,
    source: &mut S,
    budget_bytes: u64,
    log_path: &Path,
) -> Result<ExternalRun> {
    let Some(template) = command.filter(|c| !c.trim().is_empty()) else {
        return Ok(ExternalRun {
            status: ExternalStatus::Skipped,
            bytes_written: 0,
            log_path: None,
        });
    };
    let command = expand_template(template, generator, budget_bytes);

    let mut log = File::create(log_path)?;
    writeln!(log, "# command: {command}")?;
    writeln!(log, "# generator: {generator}, budget: {budget_bytes} bytes")?;
    log.flush()?;

    let mut child = Command::new("sh")
        .arg("-c")
        .arg(&command)
        .stdin(Stdio::piped())
        .stdout(log.try_clone()?)
        .stderr(log.try_clone()?)
        .spawn()
        .map_err(|source| Error::Spawn {
            command: command.clone(),
            source,
        })?;

    let mut stdin = child.stdin.take().expect("stdin is piped");
    let mut buf = vec![0u8; CHUNK];
    let mut written = 0u64;
    let mut closed_early = false;
    'feed: while written < budget_bytes {
        let want = (budget_bytes - written).min(CHUNK as u64) as usize;
        let got = source.fill(&mut buf[..want]);
        let mut off = 0;
        while off < got {
            match stdin.write(&buf[off..got]) {
                Ok(0) => {
                    closed_early = true;
                    break 'feed;
                }
                Ok(n) => {
                    off += n;
                    written += n as u64;
                }
                Err(e) if e.kind() == ErrorKind::Interrupted => {}
                Err(e) if e.kind() == ErrorKind::BrokenPipe => {
                    closed_early = true;
                    break 'feed;
                }
                Err(e) => return Err(e.into()),
            }
        }
        if got < want {
            break;
        }
    }
    drop(stdin);
    let exit = child.wait()?;
    write_trailer(&mut log, exit, written)?;

    let status = if exit.success() {
        if closed_early {
            return Err(Error::BrokenPipe {
                bytes_written: written,
            });
        }
        ExternalStatus::Passed
    } else {
        ExternalStatus::Failed { code: exit.code() }
    };
    Ok(ExternalRun {
        status,
        bytes_written: written,
        log_path: Some(log_path.to_path_buf()),
    })
}

fn write_trailer(log: &mut File, exit: ExitStatus, written: u64) -> Result<()> {
    use std::io::Seek;
    log.seek(std::io::SeekFrom::End(0))?;
    writeln!(log, "# exit: {exit}, bytes written: {written}")?;
    Ok(())
}
