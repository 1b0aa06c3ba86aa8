use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use tempfile::TempDir;

fn bke(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bke")).args(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn path(dir: &TempDir, name: &str) -> PathBuf {
    dir.path().join(name)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn keygen(dir: &TempDir, preset: &str, tag: &str, seed: &str) -> (PathBuf, PathBuf) {
    let (sk, pk) = (path(dir, &format!("{tag}.sk")), path(dir, &format!("{tag}.pk")));
    let out = bke(&["keygen", "--preset", preset, "--out-private", s(&sk), "--out-public", s(&pk), "--seed", seed]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    (sk, pk)
}

fn roundtrip(dir: &TempDir, sk: &Path, key: &Path, data: &[u8]) -> Vec<u8> {
    let (plain, ct, back) = (path(dir, "plain"), path(dir, "ct"), path(dir, "back"));
    fs::write(&plain, data).unwrap();
    assert_eq!(code(&bke(&["encrypt", "--key", s(key), "--in", s(&plain), "--out", s(&ct)])), 0);
    assert_eq!(code(&bke(&["decrypt", "--key", s(sk), "--in", s(&ct), "--out", s(&back)])), 0);
    fs::read(back).unwrap()
}

#[test]
fn seeded_keygen_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let (sk1, pk1) = keygen(&dir, "ntru509", "a", "42");
    let (sk2, pk2) = keygen(&dir, "ntru509", "b", "42");
    assert_eq!(fs::read(sk1).unwrap(), fs::read(sk2).unwrap());
    assert_eq!(fs::read(pk1).unwrap(), fs::read(&pk2).unwrap());
    let (_, pk3) = keygen(&dir, "ntru509", "c", "43");
    assert_ne!(fs::read(pk2).unwrap(), fs::read(pk3).unwrap());
}

#[test]
fn self_test_reports() {
    let dir = TempDir::new().unwrap();
    let out = bke(&[
        "keygen", "--preset", "toy17", "--out-private", s(&path(&dir, "k")), "--out-public",
        s(&path(&dir, "p")), "--self-test",
    ]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("self-test passed"));
}

#[test]
fn empty_and_large_files_roundtrip() {
    let dir = TempDir::new().unwrap();
    let (sk, pk) = keygen(&dir, "toy17", "k", "1");
    assert_eq!(roundtrip(&dir, &sk, &pk, b""), b"");
    let mut x = 0x9e37_79b9_7f4a_7c15u64;
    let data: Vec<u8> = (0..1 << 20)
        .map(|_| {
            x ^= x << 13;
            x ^= x >> 7;
            x ^= x << 17;
            x as u8
        })
        .collect();
    assert_eq!(roundtrip(&dir, &sk, &pk, &data), data);
}

#[test]
fn expanded_keys_decrypt_with_the_original_private_key() {
    let dir = TempDir::new().unwrap();
    let (sk, pk) = keygen(&dir, "ntru677", "k", "2");
    let (w, r) = (path(&dir, "w"), path(&dir, "r"));
    let out = bke(&["expand", "--in", s(&pk), "--out", s(&w), "--keep-secret", s(&r)]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("depth 1"));
    assert!(!fs::read(&r).unwrap().is_empty());
    assert_eq!(roundtrip(&dir, &sk, &w, b"depth one"), b"depth one");

    let v = path(&dir, "v");
    assert_eq!(code(&bke(&["expand", "--in", s(&w), "--out", s(&v)])), 0);
    assert_eq!(roundtrip(&dir, &sk, &v, b"depth two"), b"depth two");
    // A third expansion exceeds the supported depth.
    assert_eq!(code(&bke(&["expand", "--in", s(&v), "--out", s(&path(&dir, "z"))])), 2);
}

#[test]
fn fixed_expanders() {
    let dir = TempDir::new().unwrap();
    let (_, pk) = keygen(&dir, "toy17", "k", "3");
    let one = path(&dir, "one");
    let out = bke(&["expand", "--in", s(&pk), "--out", s(&one), "--fixed-expander", "one"]);
    assert_eq!(code(&out), 0);
    let original = stdout(&bke(&["keygen", "--preset", "toy17", "--out-private", s(&path(&dir, "k2")), "--out-public", s(&path(&dir, "p2")), "--seed", "3"]));
    // Multiplying by 1 keeps the key, so the fingerprints match.
    let fp = original.split_whitespace().last().unwrap();
    assert!(stdout(&out).contains(fp), "{}", stdout(&out));

    let x = path(&dir, "x");
    let out = bke(&["expand", "--in", s(&pk), "--out", s(&x), "--fixed-expander", "x"]);
    assert_eq!(code(&out), 0);
    assert!(!stdout(&out).contains(fp));
}

#[test]
fn wrong_key_and_corrupt_input_exit_with_integrity_failure() {
    let dir = TempDir::new().unwrap();
    let (_, pk) = keygen(&dir, "toy17", "a", "4");
    let (other, _) = keygen(&dir, "toy17", "b", "5");
    let (plain, ct) = (path(&dir, "plain"), path(&dir, "ct"));
    fs::write(&plain, b"secret").unwrap();
    assert_eq!(code(&bke(&["encrypt", "--key", s(&pk), "--in", s(&plain), "--out", s(&ct)])), 0);
    assert_eq!(code(&bke(&["decrypt", "--key", s(&other), "--in", s(&ct), "--out", s(&path(&dir, "x"))])), 3);
    fs::write(&ct, b"not a ciphertext").unwrap();
    assert_eq!(code(&bke(&["decrypt", "--key", s(&other), "--in", s(&ct), "--out", s(&path(&dir, "x"))])), 3);
}

#[test]
fn usage_and_io_exit_codes() {
    assert_eq!(code(&bke(&["keygen"])), 1);
    assert_eq!(code(&bke(&["keygen", "--preset", "ntru1", "--out-private", "a", "--out-public", "b"])), 1);
    assert_eq!(code(&bke(&["--help"])), 0);
    let dir = TempDir::new().unwrap();
    let (sk, _) = keygen(&dir, "toy17", "k", "6");
    // Private key where a public one is expected.
    assert_eq!(code(&bke(&["expand", "--in", s(&sk), "--out", s(&path(&dir, "w"))])), 1);
    assert_eq!(code(&bke(&["expand", "--in", s(&path(&dir, "missing")), "--out", "w"])), 4);
}

#[test]
fn demo_transcripts() {
    let butterfly = bke(&["demo", "--flow", "butterfly", "--preset", "ntru509", "--seed", "7"]);
    assert_eq!(code(&butterfly), 0);
    let text = stdout(&butterfly);
    assert_eq!(text.lines().filter(|l| l.starts_with("message ")).count(), 3);
    assert!(text.contains("via=RA"));
    assert!(text.ends_with("result ok\n"));
    assert_eq!(stdout(&bke(&["demo", "--flow", "butterfly", "--preset", "ntru509", "--seed", "7"])), text);

    let direct = stdout(&bke(&["demo", "--flow", "direct", "--preset", "toy17"]));
    assert_eq!(direct.lines().filter(|l| l.starts_with("message ")).count(), 2);
}

#[test]
fn bench_smoke() {
    let start = Instant::now();
    let csv = bke(&["bench", "--preset", "toy17", "--format", "csv", "--seed", "1"]);
    assert!(start.elapsed() < Duration::from_secs(5));
    let csv = stdout(&csv);
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("preset,security_level,keygen_ms,expansion_ms,speedup"));
    assert!(lines.next().unwrap().starts_with("toy17,"));

    let text = stdout(&bke(&["bench", "--preset", "toy17", "--preset", "ntru509", "--format", "text"]));
    assert_eq!(text.lines().count(), 3);
    assert!(text.lines().next().unwrap().split_whitespace().eq(
        ["preset", "security_level", "keygen_ms", "expansion_ms", "speedup"]
    ));
    assert_eq!(code(&bke(&["bench", "--trials", "3"])), 1);
}
