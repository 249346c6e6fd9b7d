//! Shared fixtures for the acceptance suite: random text generation,
//! criterion reporting and locating the `dbwt` binary.

use std::env;
use std::path::PathBuf;
use std::process::Command;
use std::time::Duration;

use dbwt::{EngineConfig, SentinelOrder, Text};
use rand::seq::SliceRandom;
use rand::Rng;

/// Payload shapes that exercise different code paths.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    Uniform,
    Skewed,
    Periodic,
    Runs,
}

impl Shape {
    pub const ALL: [Shape; 4] = [Shape::Uniform, Shape::Skewed, Shape::Periodic, Shape::Runs];
}

/// A generated text together with how it was made, for failure reports.
#[derive(Debug, Clone)]
pub struct Sample {
    pub index: usize,
    pub shape: Shape,
    pub alphabet: Vec<u8>,
    pub text: Text,
}

impl Sample {
    pub fn describe(&self) -> String {
        format!(
            "text #{} ({:?}, len {}, alphabet {}, sentinel 0x{:02x} {})",
            self.index,
            self.shape,
            self.text.payload().len(),
            self.alphabet.len(),
            self.text.sentinel(),
            self.text.sentinel_order()
        )
    }
}

/// `size` distinct payload bytes, none equal to `sentinel`.
fn alphabet<R: Rng>(rng: &mut R, size: usize, sentinel: u8) -> Vec<u8> {
    let mut pool: Vec<u8> = (0..=255u8).filter(|&b| b != sentinel).collect();
    pool.shuffle(rng);
    pool.truncate(size);
    pool
}

fn payload<R: Rng>(rng: &mut R, shape: Shape, len: usize, sigma: &[u8]) -> Vec<u8> {
    match shape {
        Shape::Uniform => (0..len).map(|_| *sigma.choose(rng).unwrap()).collect(),
        Shape::Skewed => (0..len)
            .map(|_| {
                let mut i = 0;
                while i + 1 < sigma.len() && rng.gen_bool(0.5) {
                    i += 1;
                }
                sigma[i]
            })
            .collect(),
        Shape::Periodic => {
            let period = rng.gen_range(1..=8);
            let word: Vec<u8> = (0..period).map(|_| *sigma.choose(rng).unwrap()).collect();
            (0..len)
                .map(|i| if rng.gen_ratio(1, 64) { *sigma.choose(rng).unwrap() } else { word[i % period] })
                .collect()
        }
        Shape::Runs => {
            let mut out = Vec::with_capacity(len);
            while out.len() < len {
                let run = rng.gen_range(1..=(len - out.len()).min(64));
                let b = *sigma.choose(rng).unwrap();
                out.extend(std::iter::repeat(b).take(run));
            }
            out
        }
    }
}

/// Random text: length in `0..=max_len`, alphabet size in `2..=20`, a random
/// sentinel byte and the given sentinel order.
pub fn random_text<R: Rng>(rng: &mut R, index: usize, max_len: usize, order: SentinelOrder) -> Sample {
    let sentinel = *[0u8, b'$', 255, rng.gen()].choose(rng).unwrap();
    let size = rng.gen_range(2..=20);
    let sigma = alphabet(rng, size, sentinel);
    let shape = *Shape::ALL.choose(rng).unwrap();
    let len = rng.gen_range(0..=max_len);
    let payload = payload(rng, shape, len, &sigma);
    Sample {
        index,
        shape,
        alphabet: sigma,
        text: Text::with_sentinel(payload, sentinel, order).expect("sentinel excluded from alphabet"),
    }
}

/// Random engine layout: 1-4 workers, 1-8 partitions, random sampling seed.
pub fn random_engine_config<R: Rng>(rng: &mut R) -> EngineConfig {
    EngineConfig::new(rng.gen_range(1..=4), rng.gen_range(1..=8)).with_seed(rng.gen())
}

/// DNA-like bytes: ACGT lines of 60 characters, with about 5% of the text
/// made of copies of earlier stretches.
pub fn dna_like<R: Rng>(rng: &mut R, len: usize) -> Vec<u8> {
    let mut out: Vec<u8> = Vec::with_capacity(len);
    while out.len() < len {
        if out.len() > 10_000 && rng.gen_ratio(1, 400) {
            let copy = rng.gen_range(20..=2_000).min(len - out.len());
            let from = rng.gen_range(0..out.len() - copy);
            out.extend_from_within(from..from + copy);
        } else {
            out.push(b"ACGT"[rng.gen_range(0..4)]);
        }
    }
    for i in (60..len).step_by(61) {
        out[i] = b'\n';
    }
    out
}

/// One line of the acceptance report.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

impl Outcome {
    pub fn line(&self) -> String {
        format!(
            "{} {} ({:.1} s): {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.elapsed.as_secs_f64(),
            self.detail
        )
    }
}

/// Build the `dbwt` binary with the profile of the running test and return
/// its path.
pub fn dbwt_binary() -> Result<PathBuf, String> {
    let cargo = env::var("CARGO").unwrap_or_else(|_| "cargo".into());
    let release = env::current_exe()
        .map(|p| p.components().any(|c| c.as_os_str() == "release"))
        .unwrap_or(false);
    let mut cmd = Command::new(cargo);
    cmd.args(["build", "--quiet", "-p", "dbwt", "--bin", "dbwt", "--message-format=json"])
        .current_dir(env!("CARGO_MANIFEST_DIR"));
    if release {
        cmd.arg("--release");
    }
    let out = cmd.output().map_err(|e| format!("cannot run cargo: {e}"))?;
    if !out.status.success() {
        return Err(format!("cargo build failed: {}", String::from_utf8_lossy(&out.stderr)));
    }
    String::from_utf8_lossy(&out.stdout)
        .lines()
        .filter_map(|l| serde_json::from_str::<serde_json::Value>(l).ok())
        .filter(|m| m["reason"] == "compiler-artifact" && m["target"]["name"] == "dbwt")
        .find_map(|m| m["executable"].as_str().map(PathBuf::from))
        .ok_or_else(|| "cargo did not report a dbwt executable".into())
}
