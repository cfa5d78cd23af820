//! Run reports and payload emission. Every subcommand writes at most one
//! payload (circuit JSON, distribution CSV, bitstring lines, lattice
//! JSON) and always finishes with a report carrying the resolved
//! configuration, the driving seed, sha-256 digests of everything
//! emitted, and the measured statistics. Identical command, inputs, and
//! seed give identical payload bytes and digests; wall time is the one
//! report field allowed to differ between runs.

use std::collections::BTreeMap;
use std::io::{self, Write as _};
use std::path::Path;
use std::time::Instant;

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::Failure;

#[derive(Serialize)]
pub struct RunReport {
    pub command: &'static str,
    pub config: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub wall_time_s: f64,
    pub digests: BTreeMap<String, String>,
    pub stats: Value,
}

pub struct Emitter {
    started: Instant,
    digests: BTreeMap<String, String>,
    payload_on_stdout: bool,
}

impl Emitter {
    pub fn new() -> Self {
        Emitter {
            started: Instant::now(),
            digests: BTreeMap::new(),
            payload_on_stdout: false,
        }
    }

    /// Write the payload to `out`, or to stdout when no path was given,
    /// recording its digest either way.
    pub fn payload(&mut self, out: Option<&Path>, text: &str) -> Result<(), Failure> {
        let digest = format!("{:x}", Sha256::digest(text.as_bytes()));
        match out {
            Some(path) => {
                std::fs::write(path, text)
                    .map_err(|e| Failure::Io(path.display().to_string(), e))?;
                self.digests.insert(path.display().to_string(), digest);
            }
            None => {
                print!("{text}");
                io::stdout()
                    .flush()
                    .map_err(|e| Failure::Io("stdout".into(), e))?;
                self.digests.insert("stdout".into(), digest);
                self.payload_on_stdout = true;
            }
        }
        Ok(())
    }

    /// Print the report on stdout, or on stderr when the payload already
    /// owns stdout, so the two streams never mix.
    pub fn finish(self, command: &'static str, config: Value, seed: Option<u64>, stats: Value) {
        let report = RunReport {
            command,
            config,
            seed,
            wall_time_s: self.started.elapsed().as_secs_f64(),
            digests: self.digests,
            stats,
        };
        let text = serde_json::to_string_pretty(&report).expect("plain data serializes");
        if self.payload_on_stdout {
            eprintln!("{text}");
        } else {
            println!("{text}");
        }
    }
}
