use std::path::Path;
use std::process::{Command, Output};

fn ringcode(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ringcode"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn selftest_passes_and_is_deterministic() {
    let a = ringcode(&["selftest", "--seed", "7"]);
    assert!(a.status.success());
    let b = ringcode(&["selftest", "--seed", "7"]);
    assert_eq!(stdout(&a), stdout(&b));
    assert!(stdout(&a).contains("selftest: PASS"));
}

#[test]
fn selftest_json_is_parseable() {
    let out = ringcode(&["selftest", "--json"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["all_pass"], serde_json::Value::Bool(true));
    assert_eq!(v["checks"].as_array().unwrap().len(), 3);
}

#[test]
fn ring_info_reports_worked_ring() {
    let out = ringcode(&["ring-info", "--json"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["ring_size"], 64);
    assert_eq!(v["teich_size"], 8);
    assert_eq!(v["ideal_chain_sizes"], serde_json::json!([64, 8, 1]));
    assert_eq!(v["trace_polynomial"], "x + x^2 + x^4");
}

#[test]
fn ring_info_odd_characteristic() {
    let out = ringcode(&["ring-info", "--p", "3", "--m", "2", "--l", "1", "--json"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["ring_size"], 81); // |GR(9, 2)| = 3^4
    assert_eq!(v["teich_size"], 9);
}

fn write_random(path: &Path, len: usize, seed: u8) {
    let bytes: Vec<u8> = (0..len)
        .map(|i| (i as u8).wrapping_mul(31).wrapping_add(seed))
        .collect();
    std::fs::write(path, bytes).unwrap();
}

#[test]
fn encode_erase_repair_retrieve_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("input.bin");
    let store = dir.path().join("store");
    let output = dir.path().join("output.bin");
    write_random(&input, 1024, 3);

    let out = ringcode(&[
        "encode",
        "--input",
        input.to_str().unwrap(),
        "--data-dir",
        store.to_str().unwrap(),
        "--json",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["records"], 683); // 8192 bits / 12 bits per record
    assert_eq!(v["nodes"], 8);

    let out = ringcode(&[
        "erase",
        "--data-dir",
        store.to_str().unwrap(),
        "--node",
        "5",
    ]);
    assert!(out.status.success());

    let out = ringcode(&[
        "repair",
        "--data-dir",
        store.to_str().unwrap(),
        "--node",
        "5",
        "--scheme",
        "trace",
        "--json",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["bandwidth"]["total_r_symbols"], 683 * 7);
    assert_eq!(v["bandwidth"]["naive_r_symbols"], 683 * 6);
    assert_eq!(v["bandwidth"]["beats_naive"], false);

    let out = ringcode(&[
        "retrieve",
        "--data-dir",
        store.to_str().unwrap(),
        "--output",
        output.to_str().unwrap(),
        "--json",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["hash_matches_manifest"], true);
    assert_eq!(
        std::fs::read(&input).unwrap(),
        std::fs::read(&output).unwrap()
    );
}

#[test]
fn naive_and_trace_reports_differ_per_formulas() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("input.bin");
    write_random(&input, 240, 4);

    for (scheme, per_record) in [("trace", 7u64), ("naive", 9)] {
        let store = dir.path().join(format!("store-{scheme}"));
        let out = ringcode(&[
            "encode",
            "--input",
            input.to_str().unwrap(),
            "--data-dir",
            store.to_str().unwrap(),
            "--k",
            "3",
            "--json",
        ]);
        assert!(out.status.success());
        let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
        let records = v["records"].as_u64().unwrap();

        assert!(ringcode(&[
            "erase",
            "--data-dir",
            store.to_str().unwrap(),
            "--node",
            "0"
        ])
        .status
        .success());
        let out = ringcode(&[
            "repair",
            "--data-dir",
            store.to_str().unwrap(),
            "--node",
            "0",
            "--scheme",
            scheme,
            "--json",
        ]);
        assert!(out.status.success());
        let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
        assert_eq!(v["bandwidth"]["total_r_symbols"], records * per_record);
        assert_eq!(v["bandwidth"]["beats_naive"], scheme == "trace");
    }
}

#[test]
fn repair_over_bound_is_parameter_error() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("input.bin");
    let store = dir.path().join("store");
    write_random(&input, 100, 5);
    // k = 5 exceeds the trace bound 4 on the default tower.
    assert!(ringcode(&[
        "encode",
        "--input",
        input.to_str().unwrap(),
        "--data-dir",
        store.to_str().unwrap(),
        "--k",
        "5",
    ])
    .status
    .success());
    assert!(ringcode(&[
        "erase",
        "--data-dir",
        store.to_str().unwrap(),
        "--node",
        "1"
    ])
    .status
    .success());
    let out = ringcode(&[
        "repair",
        "--data-dir",
        store.to_str().unwrap(),
        "--node",
        "1",
        "--scheme",
        "trace",
    ]);
    assert_eq!(out.status.code(), Some(3));
    // Naive still works.
    let out = ringcode(&[
        "repair",
        "--data-dir",
        store.to_str().unwrap(),
        "--node",
        "1",
        "--scheme",
        "naive",
    ]);
    assert!(out.status.success());
}

#[test]
fn distinct_exit_codes() {
    // usage: unknown flag
    let out = ringcode(&["repair", "--bogus"]);
    assert_eq!(out.status.code(), Some(2));

    // parameter: p not prime
    let out = ringcode(&["ring-info", "--p", "15"]);
    assert_eq!(out.status.code(), Some(3));

    // io: missing store
    let out = ringcode(&[
        "retrieve",
        "--data-dir",
        "/nonexistent-ringcode",
        "--output",
        "/tmp/x",
    ]);
    assert_eq!(out.status.code(), Some(5));

    // data/consistency: erase a node twice
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("input.bin");
    let store = dir.path().join("store");
    write_random(&input, 32, 6);
    assert!(ringcode(&[
        "encode",
        "--input",
        input.to_str().unwrap(),
        "--data-dir",
        store.to_str().unwrap(),
    ])
    .status
    .success());
    assert!(ringcode(&[
        "erase",
        "--data-dir",
        store.to_str().unwrap(),
        "--node",
        "2"
    ])
    .status
    .success());
    let out = ringcode(&[
        "erase",
        "--data-dir",
        store.to_str().unwrap(),
        "--node",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn custom_modulus_flag() {
    let out = ringcode(&["ring-info", "--modulus", "3,1,2,1", "--json"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    // Under x^3 + 2x^2 + x + 3 the class of x is itself the generator.
    assert_eq!(v["gamma"], serde_json::json!([0, 1, 0]));

    let out = ringcode(&["ring-info", "--modulus", "1,0,0,1"]);
    assert_eq!(out.status.code(), Some(3)); // x^3 + 1 is reducible mod 2
}
