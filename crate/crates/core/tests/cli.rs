use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tempfile::TempDir;

fn dbwt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dbwt"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &TempDir, name: &str, data: &[u8]) -> PathBuf {
    let path = dir.path().join(name);
    fs::write(&path, data).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn dna(len: usize, seed: u64) -> Vec<u8> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..len)
        .map(|i| if i % 61 == 60 { b'\n' } else { b"ACGT"[rng.gen_range(0..4)] })
        .collect()
}

fn le64(bytes: &[u8]) -> Vec<u64> {
    bytes
        .chunks_exact(8)
        .map(|c| u64::from_le_bytes(c.try_into().unwrap()))
        .collect()
}

#[test]
fn banana_bwt_file() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "banana.txt", b"BANANA");
    let mut outputs = Vec::new();
    for algorithm in ["pda", "smr-t", "smr-r", "naive"] {
        let out = dir.path().join(format!("{algorithm}.bwt"));
        let sa = dir.path().join(format!("{algorithm}.sa"));
        let run = dbwt(&[
            "bwt", s(&input), "--algorithm", algorithm, "--sentinel-order", "largest",
            "--sentinel", "$", "--out", s(&out), "--sa-out", s(&sa), "--sa-format", "text",
        ]);
        assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
        assert_eq!(fs::read(&out).unwrap(), b"BNN$AAA\nI=3\n");
        assert_eq!(fs::read_to_string(&sa).unwrap(), "1\n3\n5\n0\n2\n4\n6\n");
        outputs.push(fs::read(&out).unwrap());
    }
    assert!(outputs.windows(2).all(|w| w[0] == w[1]));
}

#[test]
fn naive_sa_has_one_entry_per_suffix() {
    let dir = TempDir::new().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let payload: Vec<u8> = (0..4096).map(|_| rng.gen_range(1..=255)).collect();
    let input = write(&dir, "random.bin", &payload);
    let sa = dir.path().join("random.sa");
    let run = dbwt(&["sa", s(&input), "--algorithm", "naive", "--sa-out", s(&sa)]);
    assert!(run.status.success());
    let entries = le64(&fs::read(&sa).unwrap());
    assert_eq!(entries.len(), payload.len() + 1);
    assert_eq!(entries[0], payload.len() as u64);
}

#[test]
fn max_bytes_reads_a_prefix() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "dna.txt", &dna(3 << 20, 5));
    let sa = dir.path().join("prefix.sa");
    let run = dbwt(&[
        "sa", s(&input), "--algorithm", "naive", "--max-bytes", "2M", "--sa-out", s(&sa),
    ]);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    assert_eq!(fs::metadata(&sa).unwrap().len(), 8 * ((2 << 20) + 1));

    let run = dbwt(&["sa", s(&input), "--max-bytes", "0", "--sa-out", s(&sa)]);
    assert_eq!(run.status.code(), Some(2));
}

#[test]
fn empty_file_and_reserved_byte() {
    let dir = TempDir::new().unwrap();
    let empty = write(&dir, "empty", b"");
    let out = dir.path().join("empty.bwt");
    let run = dbwt(&["bwt", s(&empty), "--out", s(&out)]);
    assert!(run.status.success());
    assert_eq!(fs::read(&out).unwrap(), b"\0\nI=0\n");

    let bad = write(&dir, "bad.bin", b"ACG\0T");
    let run = dbwt(&["bwt", s(&bad), "--out", s(&out)]);
    assert_eq!(run.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&run.stderr).contains("offset 3"));
}

#[test]
fn option_errors_exit_nonzero() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "in.txt", b"ACGT");
    let out = dir.path().join("o");
    let run = dbwt(&["bwt", s(&input), "--out", s(&out), "--kmer", "4"]);
    assert_eq!(run.status.code(), Some(2));
    let run = dbwt(&["bwt", s(&input), "--out", s(&out), "--algorithm", "dc3"]);
    assert!(!run.status.success());
    let run = dbwt(&["bwt", s(&dir.path().join("missing")), "--out", s(&out)]);
    assert_eq!(run.status.code(), Some(2));
}

#[test]
fn verify_passes_on_banana() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "banana.txt", b"BANANA");
    for algorithm in ["pda", "smr-r", "smr-t", "naive"] {
        let run = dbwt(&["verify", s(&input), "--algorithm", algorithm]);
        let stdout = String::from_utf8_lossy(&run.stdout);
        assert!(run.status.success(), "{stdout}");
        for check in ["permutation", "sortedness", "round-trip", "naive"] {
            assert!(stdout.contains(&format!("PASS {check}")), "{stdout}");
        }
        assert!(!stdout.contains("FAIL"));
    }
}

#[test]
fn verify_rejects_corrupted_suffix_array() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "banana.txt", b"BANANA");
    let sa = write(&dir, "bad.sa", b"6\n5\n3\n1\n0\n4\n4\n");
    let run = dbwt(&["verify", s(&input), "--sa-in", s(&sa), "--sa-format", "text"]);
    assert_eq!(run.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&run.stdout).contains("FAIL permutation"));

    let unsorted = write(&dir, "unsorted.sa", b"6\n5\n1\n3\n0\n4\n2\n");
    let run = dbwt(&["verify", s(&input), "--sa-in", s(&unsorted), "--sa-format", "text"]);
    assert_eq!(run.status.code(), Some(1));
    let stdout = String::from_utf8_lossy(&run.stdout);
    assert!(stdout.contains("PASS permutation") && stdout.contains("FAIL sortedness"), "{stdout}");

    let good = write(&dir, "good.sa", b"6\n5\n3\n1\n0\n4\n2\n");
    let run = dbwt(&["verify", s(&input), "--sa-in", s(&good), "--sa-format", "text"]);
    assert!(run.status.success());
}

#[test]
fn verify_cross_check_on_a_megabyte() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "dna.txt", &dna(1 << 20, 6));
    let run = dbwt(&[
        "verify", s(&input), "--algorithm", "pda", "--cross-check", "smr-t", "--workers", "4",
    ]);
    let stdout = String::from_utf8_lossy(&run.stdout);
    assert!(run.status.success(), "{stdout}");
    assert!(stdout.contains("PASS cross-check"), "{stdout}");
    assert!(!stdout.contains("naive"), "oracle comparison is limited to small inputs");
}

#[test]
fn bench_reports() {
    let dir = TempDir::new().unwrap();
    let run = dbwt(&["bench", "--format", "json"]);
    assert!(run.status.success());
    assert_eq!(String::from_utf8_lossy(&run.stdout).trim(), "[]");

    let a = write(&dir, "a.txt", &dna(5000, 7));
    let b = write(&dir, "b.txt", b"MISSISSIPPI");
    let report = dir.path().join("report.json");
    let run = dbwt(&[
        "bench", s(&a), s(&b), "--algorithm", "pda,smr-t", "--max-bytes", "4K",
        "--format", "json", "--out", s(&report),
    ]);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    let rows: serde_json::Value = serde_json::from_slice(&fs::read(&report).unwrap()).unwrap();
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 4);
    assert_eq!(rows[0]["bytes"], 4096);
    assert_eq!(rows[2]["bytes"], 11);
    for row in rows {
        assert_eq!(row["status"], "ok");
        assert!(row["wall_secs"].as_f64().unwrap() >= 0.0);
    }
    assert!(rows[0]["rounds"].as_u64().unwrap() >= 1);

    let big = write(&dir, "big.txt", &[b"A".repeat(100_000), dna(100_000, 8)].concat());
    let run = dbwt(&["bench", s(&big), "--algorithm", "smr-r", "--timeout", "0.05"]);
    let stdout = String::from_utf8_lossy(&run.stdout);
    assert!(run.status.success(), "{stdout}");
    assert!(stdout.contains("> 0.05 s") && stdout.contains("timeout"), "{stdout}");
}
