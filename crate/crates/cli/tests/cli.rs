use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const FIXTURE: &str = concat!(
    env!("CARGO_MANIFEST_DIR"),
    "/../core/tests/data/astronaut.ppm"
);

fn chaovid(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chaovid"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = chaovid(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn path(dir: &Path, name: &str) -> PathBuf {
    dir.join(name)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// A 7x5 P6 image with a recognisable gradient.
fn small_ppm(dir: &Path, name: &str, shift: u8) -> PathBuf {
    let mut bytes = b"P6\n7 5\n255\n".to_vec();
    bytes.extend((0..7 * 5 * 3).map(|i| (i as u8).wrapping_mul(37).wrapping_add(shift)));
    let p = path(dir, name);
    std::fs::write(&p, bytes).unwrap();
    p
}

#[test]
fn keygen_is_seeded() {
    let a = ok(&["keygen", "--map", "plcm", "--seed", "9"]);
    let b = ok(&["keygen", "--map", "plcm", "--seed", "9"]);
    assert_eq!(a, b);
    assert_eq!(a.trim().len(), 2 * (1 + 4 * 8));
    assert!(a.starts_with("01"));
    assert!(ok(&["keygen", "--map", "lasm"]).starts_with("02"));
}

#[test]
fn ppm_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let key = ok(&["keygen", "--seed", "1"]);
    let key = key.trim();
    let container = path(dir.path(), "c.cve");
    let plain = path(dir.path(), "p.ppm");
    ok(&[
        "encrypt",
        "--key",
        key,
        "--threads",
        "4",
        "--rounds",
        "3",
        "--in",
        FIXTURE,
        "--out",
        s(&container),
    ]);
    assert_eq!(std::fs::read(&container).unwrap()[..4], *b"CVE1");
    ok(&[
        "decrypt",
        "--key",
        key,
        "--in",
        s(&container),
        "--out",
        s(&plain),
    ]);
    assert_eq!(
        std::fs::read(&plain).unwrap(),
        std::fs::read(FIXTURE).unwrap()
    );
}

#[test]
fn sequence_round_trip_with_key_file() {
    let dir = tempfile::tempdir().unwrap();
    let frames = path(dir.path(), "frames");
    std::fs::create_dir(&frames).unwrap();
    let originals: Vec<PathBuf> = (0..3)
        .map(|i| small_ppm(&frames, &format!("f{i}.ppm"), i * 11))
        .collect();
    let key_file = path(dir.path(), "key.txt");
    ok(&[
        "keygen",
        "--map",
        "lasm",
        "--seed",
        "4",
        "--out",
        s(&key_file),
    ]);
    let container = path(dir.path(), "v.cve");
    ok(&[
        "encrypt",
        "--key-file",
        s(&key_file),
        "--threads",
        "2",
        "--fps",
        "30",
        "--in",
        s(&frames),
        "--out",
        s(&container),
    ]);
    let decoded = path(dir.path(), "decoded");
    std::fs::create_dir(&decoded).unwrap();
    ok(&[
        "decrypt",
        "--key-file",
        s(&key_file),
        "--threads",
        "2",
        "--in",
        s(&container),
        "--out",
        s(&decoded),
    ]);
    for (i, original) in originals.iter().enumerate() {
        let back = std::fs::read(decoded.join(format!("frame_{i:05}.ppm"))).unwrap();
        assert_eq!(back, std::fs::read(original).unwrap());
    }
}

#[test]
fn raw_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let raw = path(dir.path(), "in.rgb");
    let data: Vec<u8> = (0..2 * 6 * 4 * 3).map(|i| (i * 7 % 256) as u8).collect();
    std::fs::write(&raw, &data).unwrap();
    let key = ok(&["keygen", "--seed", "2"]);
    let container = path(dir.path(), "c.cve");
    let out = path(dir.path(), "out.rgb");
    ok(&[
        "encrypt",
        "--key",
        key.trim(),
        "--threads",
        "2",
        "--format",
        "raw",
        "--width",
        "6",
        "--height",
        "4",
        "--in",
        s(&raw),
        "--out",
        s(&container),
    ]);
    ok(&[
        "decrypt",
        "--key",
        key.trim(),
        "--format",
        "raw",
        "--in",
        s(&container),
        "--out",
        s(&out),
    ]);
    assert_eq!(std::fs::read(&out).unwrap(), data);
}

#[test]
fn decrypt_refuses_mismatched_settings() {
    let dir = tempfile::tempdir().unwrap();
    let img = small_ppm(dir.path(), "a.ppm", 0);
    let key = ok(&["keygen", "--seed", "3"]);
    let container = path(dir.path(), "c.cve");
    let out = path(dir.path(), "o.ppm");
    ok(&[
        "encrypt",
        "--key",
        key.trim(),
        "--threads",
        "4",
        "--in",
        s(&img),
        "--out",
        s(&container),
    ]);

    let threads = chaovid(&[
        "decrypt",
        "--key",
        key.trim(),
        "--threads",
        "2",
        "--in",
        s(&container),
        "--out",
        s(&out),
    ]);
    assert_eq!(threads.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&threads.stderr).contains("worker count"));

    let rounds = chaovid(&[
        "decrypt",
        "--key",
        key.trim(),
        "--rounds",
        "4",
        "--in",
        s(&container),
        "--out",
        s(&out),
    ]);
    assert_eq!(rounds.status.code(), Some(1));

    let lasm = ok(&["keygen", "--map", "lasm", "--seed", "3"]);
    let map = chaovid(&[
        "decrypt",
        "--key",
        lasm.trim(),
        "--in",
        s(&container),
        "--out",
        s(&out),
    ]);
    assert_eq!(map.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&map.stderr).contains("map kind"));
}

#[test]
fn contract_violations_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let img = small_ppm(dir.path(), "a.ppm", 0);
    let out = path(dir.path(), "o.ppm");
    for args in [
        vec!["encrypt", "--key", "zz", "--in", s(&img), "--out", s(&out)],
        vec!["encrypt", "--key", "01", "--in", s(&img), "--out", s(&out)],
        vec!["noise", "--in", s(&img), "--out", s(&out), "--rate", "2"],
        vec![
            "crop",
            "--in",
            s(&img),
            "--out",
            s(&out),
            "--block",
            "6,0,2",
        ],
        vec!["analyze", "--in", "/nonexistent.ppm"],
    ] {
        assert_eq!(chaovid(&args).status.code(), Some(1), "{args:?}");
    }
}

#[test]
fn nist_export_length() {
    let dir = tempfile::tempdir().unwrap();
    let key = ok(&["keygen", "--seed", "5"]);
    let out = path(dir.path(), "bytes.bin");
    for n in [0u64, 1, 100_003] {
        ok(&[
            "nist-export",
            "--key",
            key.trim(),
            "--threads",
            "3",
            "--worker",
            "2",
            "--bytes",
            &n.to_string(),
            "--out",
            s(&out),
        ]);
        assert_eq!(std::fs::metadata(&out).unwrap().len(), n);
    }
    let bad = chaovid(&[
        "nist-export",
        "--key",
        key.trim(),
        "--worker",
        "1",
        "--bytes",
        "8",
        "--out",
        s(&out),
    ]);
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn analyze_report_format() {
    let dir = tempfile::tempdir().unwrap();
    let a = small_ppm(dir.path(), "a.ppm", 0);
    let b = small_ppm(dir.path(), "b.ppm", 1);
    let csv = path(dir.path(), "r.csv");
    let text = ok(&[
        "analyze",
        "--in",
        s(&a),
        "--compare",
        s(&b),
        "--samples",
        "10",
        "--csv",
        s(&csv),
    ]);
    let keys: Vec<&str> = text.lines().map(|l| l.split('=').next().unwrap()).collect();
    assert_eq!(&keys[..5], ["width", "height", "samples", "seed", "[R]"]);
    assert_eq!(
        &keys[5..15],
        [
            "variance",
            "chi2",
            "entropy",
            "local_entropy",
            "corr_h",
            "corr_v",
            "corr_d",
            "npcr",
            "uaci",
            "[G]"
        ]
    );
    assert!(text.contains("npcr=100.000000"));
    assert!(text.contains("local_entropy=n/a"));
    let csv = std::fs::read_to_string(csv).unwrap();
    assert_eq!(csv.lines().count(), 4);
}

#[test]
fn noise_and_crop() {
    let dir = tempfile::tempdir().unwrap();
    let img = small_ppm(dir.path(), "a.ppm", 0);
    let noisy = path(dir.path(), "n.ppm");
    ok(&[
        "noise",
        "--in",
        s(&img),
        "--out",
        s(&noisy),
        "--rate",
        "1",
        "--seed",
        "3",
    ]);
    let bytes = std::fs::read(&noisy).unwrap();
    assert!(bytes[11..].iter().all(|&v| v == 0 || v == 255));

    let cropped = path(dir.path(), "c.ppm");
    ok(&[
        "crop",
        "--in",
        s(&img),
        "--out",
        s(&cropped),
        "--block",
        "0,0,5,white",
        "--block",
        "5,3,2",
    ]);
    let bytes = std::fs::read(&cropped).unwrap();
    assert_eq!(&bytes[11..14], [255; 3]);
    let last = bytes.len() - 3;
    assert_eq!(&bytes[last..], [0; 3]);
}

#[test]
fn bench_and_sweep_csv() {
    let bench = ok(&[
        "bench",
        "--mode",
        "phases",
        "--sides",
        "16",
        "--threads",
        "1,2",
        "--frames",
        "2",
    ]);
    let mut lines = bench.lines();
    assert!(lines
        .next()
        .unwrap()
        .starts_with("bench,map,side,workers,rounds,frames,fps,"));
    assert_eq!(lines.count(), 6);

    let bytegen = ok(&[
        "bench",
        "--mode",
        "bytegen",
        "--map",
        "lasm",
        "--threads",
        "1,2",
        "--iterations",
        "1000",
    ]);
    assert_eq!(bytegen.lines().count(), 3);

    let dir = tempfile::tempdir().unwrap();
    let img = small_ppm(dir.path(), "a.ppm", 0);
    let sweep = ok(&[
        "sweep",
        "--in",
        s(&img),
        "--threads",
        "2",
        "--max-rounds",
        "3",
    ]);
    let mut lines = sweep.lines();
    assert_eq!(
        lines.next().unwrap(),
        "round,npcr_r,npcr_g,npcr_b,npcr_mean,uaci_r,uaci_g,uaci_b,uaci_mean,corr_r,corr_g,corr_b"
    );
    assert_eq!(lines.count(), 4);
}
