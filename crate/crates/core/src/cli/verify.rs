use std::cmp::Ordering;

use anyhow::Result;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{io, RunConfig, VerifyArgs};
use crate::bwt::sa_to_bwt;
use crate::engine::Engine;
use crate::oracle::{inverse_bwt, naive_sa, suffix_cmp};
use crate::text::{SuffixArray, Text};

/// Inputs up to this size are also compared against the brute-force oracle.
pub const NAIVE_LIMIT: usize = 64 * 1024;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl CheckResult {
    fn new(name: &'static str, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            name,
            passed,
            detail: detail.into(),
        }
    }
}

/// Adjacent pairs to compare: all of them when there are at most `samples`.
fn spot_pairs(len: usize, samples: usize, seed: u64) -> Vec<usize> {
    let pairs = len.saturating_sub(1);
    if pairs <= samples {
        return (0..pairs).collect();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..samples).map(|_| rng.gen_range(0..pairs)).collect()
}

/// Run every check on `entries` as a suffix array of `text`.
pub fn check_suffix_array(
    engine: &Engine,
    text: &Text,
    entries: &[usize],
    spot_checks: usize,
    seed: u64,
) -> Vec<CheckResult> {
    let mut checks = Vec::new();
    let permutation = if entries.len() != text.len() {
        Err(format!(
            "{} entries for a text of length {}",
            entries.len(),
            text.len()
        ))
    } else {
        SuffixArray::new(entries.to_vec()).map_err(|e| e.to_string())
    };
    let sa = match permutation {
        Ok(sa) => {
            checks.push(CheckResult::new("permutation", true, format!("{} entries", sa.len())));
            sa
        }
        Err(e) => {
            checks.push(CheckResult::new("permutation", false, e));
            return checks;
        }
    };

    let pairs = spot_pairs(sa.len(), spot_checks, seed);
    let bad = pairs
        .iter()
        .find(|&&j| suffix_cmp(text, sa.as_slice()[j], sa.as_slice()[j + 1]) != Ordering::Less);
    checks.push(match bad {
        None => CheckResult::new("sortedness", true, format!("{} adjacent pairs", pairs.len())),
        Some(&j) => CheckResult::new("sortedness", false, format!("rows {j} and {} out of order", j + 1)),
    });

    let round_trip = sa_to_bwt(engine, sa.as_slice(), text)
        .map_err(|e| e.to_string())
        .and_then(|bwt| inverse_bwt(&bwt, text.char_order()).map_err(|e| e.to_string()));
    checks.push(match round_trip {
        Ok(decoded) if decoded == text.to_bytes_with_sentinel() => {
            CheckResult::new("round-trip", true, "inverse BWT restores the input")
        }
        Ok(_) => CheckResult::new("round-trip", false, "inverse BWT differs from the input"),
        Err(e) => CheckResult::new("round-trip", false, e),
    });

    if text.len() <= NAIVE_LIMIT + 1 {
        let same = naive_sa(text) == sa;
        checks.push(CheckResult::new(
            "naive",
            same,
            if same { "matches brute-force suffix sort" } else { "differs from brute-force suffix sort" },
        ));
    }
    checks
}

pub fn cmd_verify(args: &VerifyArgs) -> Result<bool> {
    let mut algorithms = vec![args.algorithm];
    algorithms.extend(args.cross_check);
    let config = RunConfig::new(&args.input, &algorithms, &args.engine)?;
    let text = config.ingest()?;
    let engine = config.engine()?;

    let (label, entries) = match &args.sa_in {
        Some(path) => (path.display().to_string(), io::read_sa(path, args.sa_format)?),
        None => {
            let built = config.build(&engine, &text, config.algorithm)?;
            (config.algorithm.to_string(), built.sa.into_vec())
        }
    };

    let mut checks = check_suffix_array(&engine, &text, &entries, args.spot_checks, config.seed);
    if let Some(other) = args.cross_check {
        let built = config.build(&engine, &text, other)?;
        let same = built.sa.as_slice() == entries.as_slice();
        checks.push(CheckResult::new(
            "cross-check",
            same,
            format!("{label} vs {other}: {}", if same { "identical" } else { "different" }),
        ));
    }

    println!("verifying {label} on {} ({} bytes)", config.input.display(), text.payload().len());
    for c in &checks {
        println!("{} {:<12} {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    Ok(checks.iter().all(|c| c.passed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::EngineConfig;

    #[test]
    fn detects_faults() {
        let e = Engine::new(EngineConfig::new(1, 2)).unwrap();
        let t = Text::new(b"BANANA".to_vec()).unwrap();
        let good = naive_sa(&t).into_vec();
        assert!(check_suffix_array(&e, &t, &good, 10, 0).iter().all(|c| c.passed));

        let mut dup = good.clone();
        dup[0] = dup[1];
        let checks = check_suffix_array(&e, &t, &dup, 10, 0);
        assert_eq!(checks.len(), 1);
        assert!(!checks[0].passed);

        let mut swapped = good.clone();
        swapped.swap(2, 3);
        let checks = check_suffix_array(&e, &t, &swapped, 10, 0);
        assert!(checks[0].passed);
        assert!(checks.iter().any(|c| c.name == "sortedness" && !c.passed));
        assert!(checks.iter().any(|c| c.name == "naive" && !c.passed));
    }

    #[test]
    fn spot_pairs_cover_small_inputs() {
        assert_eq!(spot_pairs(5, 10, 1), vec![0, 1, 2, 3]);
        assert_eq!(spot_pairs(1, 10, 1), Vec::<usize>::new());
        let sampled = spot_pairs(1000, 10, 1);
        assert_eq!(sampled.len(), 10);
        assert!(sampled.iter().all(|&j| j < 999));
    }
}
