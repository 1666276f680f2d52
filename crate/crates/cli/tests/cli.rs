use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn qcl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qcl"))
        .args(args)
        .env_remove("QCL_CATALOG")
        .output()
        .expect("run qcl")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(out)))
}

fn pinned_vectors() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/tests/vectors/protected.txt")
}

#[test]
fn suites_table_and_json() {
    let out = qcl(&["suites"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    for name in ["AES_128_GCM", "AES_256_GCM", "CHACHA20_POLY1305", "NOOP"] {
        assert!(text.lines().any(|l| l.starts_with(name)), "{name}");
    }
    let v = json(&qcl(&["suites", "--json"]));
    assert_eq!(v["suites"].as_array().unwrap().len(), 4);
    assert_eq!(v["hp_algorithms"].as_array().unwrap().len(), 4);
    assert_eq!(v["suites"][1]["key_len"], 32);
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(code(&qcl(&["suites", "--frobnicate"])), 2);
    assert_eq!(code(&qcl(&["nonsense"])), 2);
    assert_eq!(code(&qcl(&["bench", "--suite", "ROT13"])), 2);
    assert_eq!(code(&qcl(&["bench", "--mtu", "40", "--bytes", "1MiB"])), 2);
    assert_eq!(code(&qcl(&["simulate", "--kem", "kyber9000"])), 2);
    assert_eq!(code(&qcl(&["simulate", "--sig", "rsa-123"])), 2);
    assert_eq!(code(&qcl(&["simulate", "--rtt", "soon"])), 2);
}

#[test]
fn vectors_pass() {
    let out = qcl(&["vectors", pinned_vectors().to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    assert!(stdout(&out).contains("PASS initial_client"));
}

#[test]
fn corrupted_vector_names_label() {
    let text = std::fs::read_to_string(pinned_vectors()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.txt");
    // flip one nibble inside the Initial packet's wire hex
    let idx = text.find("wire: ").unwrap() + 6 + 40;
    let mut bytes = text.into_bytes();
    bytes[idx] = if bytes[idx] == b'0' { b'1' } else { b'0' };
    std::fs::write(&path, bytes).unwrap();
    let out = qcl(&["vectors", path.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    let text = stdout(&out);
    assert!(text.contains("FAIL initial_client: `wire`"), "{text}");
    assert!(text.contains("PASS chacha_short"));
}

#[test]
fn empty_vector_file_passes_with_warning() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("empty.txt");
    std::fs::write(&path, "").unwrap();
    let out = qcl(&["vectors", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stderr).contains("0 vectors"));
}

#[test]
fn malformed_or_missing_vector_file_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("junk.txt");
    std::fs::write(&path, "this is not a vector\n").unwrap();
    assert_eq!(code(&qcl(&["vectors", path.to_str().unwrap()])), 2);
    assert_eq!(code(&qcl(&["vectors", "/nonexistent/vectors.txt"])), 2);
}

#[test]
fn initial_key_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("keys.txt");
    let out = qcl(&[
        "vectors",
        "--dcid",
        "8394c8f03e515708",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.contains("client_key=1f369613dd76d5467730efcbe3b1a22d"));
    assert!(text.contains("client_iv=fa044b2f42a3fd3b46fb255c"));
    assert!(text.contains("client_hp=9f50449e04a0e810283a1e9933adedd2"));
    assert_eq!(text.lines().count(), 8);
}

#[test]
fn simulate_baseline() {
    let v = json(&qcl(&[
        "simulate", "--kem", "x25519", "--sig", "rsa2048", "--rtt", "0",
    ]));
    assert_eq!(v["outcome"], "ok");
    for field in [
        "ttfb",
        "packets_client",
        "packets_server",
        "server_flight_bytes",
        "retry_used",
    ] {
        assert!(v.get(field).is_some(), "{field}");
    }
}

#[test]
fn simulate_hybrid_size() {
    let v = json(&qcl(&[
        "simulate",
        "--kem",
        "p256+kyber512",
        "--sig",
        "rsa2048",
    ]));
    assert_eq!(v["kem"]["pk_size"], 865);
}

#[test]
fn simulate_window_failure_is_data() {
    let out = qcl(&[
        "simulate",
        "--sig",
        "sphincs-sha2-192f",
        "--pn-window",
        "64",
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["outcome"], "failed_pn_window");
    let open = json(&qcl(&["simulate", "--sig", "sphincs-sha2-192f"]));
    assert_eq!(open["outcome"], "ok");
    assert!(open["packets_server"].as_u64().unwrap() > 64);
}

#[test]
fn simulate_retry_and_timings() {
    let v = json(&qcl(&[
        "simulate",
        "--sig",
        "dilithium5",
        "--rtt",
        "20ms",
        "--retry",
        "--timings",
        "reference",
    ]));
    assert_eq!(v["retry_used"], true);
    assert_eq!(v["ttfb_parts"]["network"], 40_000_000);
    assert!(v["ttfb_parts"]["crypto_compute"].as_u64().unwrap() > 0);
}

#[test]
fn simulate_is_reproducible() {
    let args = [
        "simulate",
        "--kem",
        "hqc-256",
        "--sig",
        "falcon-1024",
        "--rtt",
        "30ms",
    ];
    assert_eq!(stdout(&qcl(&args)), stdout(&qcl(&args)));
}

#[test]
fn catalog_override_via_env() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cat.txt");
    std::fs::write(&path, "Toy;1;10;20;-;test\nToySig;1;5;6;100;test\n").unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_qcl"))
        .args(["simulate", "--kem", "toy", "--sig", "toysig"])
        .env("QCL_CATALOG", &path)
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["kem"]["pk_size"], 10);
    let broken = dir.path().join("broken.txt");
    std::fs::write(&broken, "Toy;1;10\n").unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_qcl"))
        .args(["catalog"])
        .env("QCL_CATALOG", &broken)
        .output()
        .unwrap();
    assert_eq!(code(&out), 2);
}

#[test]
fn catalog_listing() {
    let v = json(&qcl(&["catalog", "--json"]));
    assert_eq!(v["kems"].as_array().unwrap().len(), 13);
    assert!(v["sigs"].as_array().unwrap().len() >= 20);
    assert!(stdout(&qcl(&["catalog"])).contains("Kyber512"));
}

#[test]
fn bench_json_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("bench.csv");
    let out = qcl(&[
        "bench",
        "--suite",
        "chacha20_poly1305",
        "--bytes",
        "256KiB",
        "--reps",
        "3",
        "--json",
        "--csv",
        csv_path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["suite"], "CHACHA20_POLY1305");
    assert_eq!(v["hp_alg"], "CHACHA20_RAW");
    assert!(v["goodput_bps"].as_f64().unwrap() > 0.0);

    let mut rdr = csv::Reader::from_path(&csv_path).unwrap();
    let headers: Vec<String> = rdr.headers().unwrap().iter().map(str::to_owned).collect();
    assert_eq!(
        headers,
        [
            "suite",
            "hp_alg",
            "mtu",
            "rep",
            "goodput_Bps",
            "pp_ns",
            "hp_ns",
            "packets"
        ]
    );
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 3);
    let packets = v["packets"].to_string();
    assert!(rows.iter().all(|r| r[7] == packets));
}

#[test]
fn sweep_packet_counts() {
    let v = json(&qcl(&[
        "sweep", "--suite", "NOOP", "--hp", "off", "--bytes", "1MiB", "--reps", "1", "--json",
    ]));
    let counts: Vec<u64> = v
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["packets"].as_u64().unwrap())
        .collect();
    let oracle: Vec<u64> = [1500u64, 3000, 6000]
        .iter()
        .map(|m| (1u64 << 20).div_ceil(m - 28 - 9 - 2 - 16))
        .collect();
    assert_eq!(counts, oracle);
    assert_eq!(
        code(&qcl(&["sweep", "--mtus", "1500,50", "--bytes", "1MiB"])),
        2
    );
}

#[test]
fn bench_text_and_directions() {
    for dir in ["seal", "open", "both"] {
        let out = qcl(&[
            "bench",
            "--bytes",
            "128KiB",
            "--reps",
            "1",
            "--direction",
            dir,
        ]);
        assert_eq!(code(&out), 0);
        assert!(stdout(&out).contains("goodput"));
    }
    assert_eq!(code(&qcl(&["bench", "--direction", "sideways"])), 2);
}
