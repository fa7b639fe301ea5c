//! Command-line surface for the ringcode library: ring inspection,
//! encode/retrieve/erase/repair against an on-disk shard store, and a
//! self-test that replays the known-good GR(4,3) repair configuration.
//!
//! Exit codes: 0 ok, 2 usage, 3 parameter, 4 data/consistency, 5 io.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use ringcode::storage::sha256_hex;
use ringcode::{
    BandwidthReport, Error, GRElement, GrsCode, SchemeKind, ShardStore, TowerContext,
    TraceRepairScheme,
};

const EXIT_PARAMETER: u8 = 3;
const EXIT_DATA: u8 = 4;
const EXIT_IO: u8 = 5;

#[derive(Parser)]
#[command(
    name = "ringcode",
    version,
    about = "Erasure coding over Galois rings with low-bandwidth node repair"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct TowerArgs {
    /// Prime characteristic
    #[arg(long, default_value_t = 2)]
    p: u64,
    /// Nilpotency exponent: coefficients live mod p^n
    #[arg(long, default_value_t = 2)]
    n: u32,
    /// Subring degree over Z_{p^n}
    #[arg(long, default_value_t = 1)]
    m: u32,
    /// Extension degree of the symbol ring over the subring
    #[arg(long, default_value_t = 3)]
    l: u32,
    /// Modulus coefficients a0,a1,...  (little-endian, monic, degree m*l)
    #[arg(long, value_delimiter = ',')]
    modulus: Option<Vec<u64>>,
}

impl TowerArgs {
    fn build(&self) -> Result<TowerContext, Error> {
        match &self.modulus {
            Some(coeffs) => TowerContext::with_modulus(self.p, self.n, self.m, self.l, coeffs),
            None => TowerContext::new(self.p, self.n, self.m, self.l),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Print structure facts about the symbol ring GR(p^n, m*l)
    RingInfo {
        #[command(flatten)]
        tower: TowerArgs,
        #[arg(long)]
        json: bool,
    },
    /// Split a file into records and encode it across node shard files
    Encode {
        #[command(flatten)]
        tower: TowerArgs,
        /// Message symbols per record (the code rate is k of n nodes)
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        data_dir: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Reassemble the original file from the surviving nodes
    Retrieve {
        #[arg(long)]
        data_dir: PathBuf,
        #[arg(long)]
        output: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Delete one node's shard file and mark it lost
    Erase {
        #[arg(long)]
        data_dir: PathBuf,
        #[arg(long)]
        node: usize,
        #[arg(long)]
        json: bool,
    },
    /// Rebuild a lost node and report the repair bandwidth
    Repair {
        #[arg(long)]
        data_dir: PathBuf,
        #[arg(long)]
        node: usize,
        /// trace | naive | generic
        #[arg(long, default_value = "trace")]
        scheme: String,
        #[arg(long)]
        json: bool,
    },
    /// Replay the known-good GR(4,3) repair configuration and a seeded sweep
    Selftest {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::ParamOverflow(_)
        | Error::BadModulus(_)
        | Error::BadK { .. }
        | Error::KTooLarge { .. }
        | Error::TooLarge(_)
        | Error::NotFullLength
        | Error::UnsupportedCharacteristic(_)
        | Error::SchemeUnavailable(_) => EXIT_PARAMETER,
        Error::Io(_) => EXIT_IO,
        _ => EXIT_DATA,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::RingInfo { tower, json } => cmd_ring_info(&tower, json),
        Command::Encode {
            tower,
            k,
            input,
            data_dir,
            json,
        } => cmd_encode(&tower, k, &input, &data_dir, json),
        Command::Retrieve {
            data_dir,
            output,
            json,
        } => cmd_retrieve(&data_dir, &output, json),
        Command::Erase {
            data_dir,
            node,
            json,
        } => cmd_erase(&data_dir, node, json),
        Command::Repair {
            data_dir,
            node,
            scheme,
            json,
        } => cmd_repair(&data_dir, node, &scheme, json),
        Command::Selftest { seed, json } => return cmd_selftest(seed, json),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}

#[derive(Serialize)]
struct RingInfoReport {
    p: u64,
    n: u32,
    degree: u32,
    modulus: Vec<u64>,
    ring_size: u64,
    teich_size: u64,
    gamma: Vec<u64>,
    subring_degree: u32,
    extension_degree: u32,
    ideal_chain_sizes: Vec<u64>,
    trace_polynomial: String,
}

fn cmd_ring_info(args: &TowerArgs, json: bool) -> Result<(), Error> {
    let tower = args.build()?;
    let ring = tower.ring();
    let degree = ring.degree();
    let ideal_chain_sizes: Vec<u64> = (0..=ring.n())
        .map(|i| {
            let remaining = ring.n() - i;
            (0..degree * remaining).fold(1u64, |acc, _| acc * ring.p())
        })
        .collect();
    let trace_polynomial = {
        let terms: Vec<String> = (0..degree)
            .map(|i| {
                let e = ring.p().pow(i);
                if e == 1 {
                    "x".to_string()
                } else {
                    format!("x^{e}")
                }
            })
            .collect();
        terms.join(" + ")
    };
    let report = RingInfoReport {
        p: ring.p(),
        n: ring.n(),
        degree,
        modulus: ring.modulus().to_vec(),
        ring_size: ring.size(),
        teich_size: ring.teich_len(),
        gamma: ring.gamma().coeffs().to_vec(),
        subring_degree: tower.subring_degree(),
        extension_degree: tower.extension_degree(),
        ideal_chain_sizes,
        trace_polynomial,
    };
    if json {
        println!(
            "{}",
            serde_json::to_string_pretty(&report).expect("report serializes")
        );
    } else {
        println!(
            "ring           GR({}^{}, {})",
            report.p, report.n, report.degree
        );
        println!("modulus        {}", poly_string(&report.modulus));
        println!("|ring|         {}", report.ring_size);
        println!("|teichmuller|  {}", report.teich_size);
        println!("gamma          {}", poly_string(&report.gamma));
        println!(
            "tower          degree {} over GR({}^{}, {})",
            report.extension_degree, report.p, report.n, report.subring_degree
        );
        println!("ideal chain    {:?}", report.ideal_chain_sizes);
        println!("trace on T     {}", report.trace_polynomial);
    }
    Ok(())
}

fn poly_string(coeffs: &[u64]) -> String {
    let mut terms = Vec::new();
    for (i, &c) in coeffs.iter().enumerate() {
        if c == 0 {
            continue;
        }
        terms.push(match (i, c) {
            (0, _) => format!("{c}"),
            (1, 1) => "x".into(),
            (1, _) => format!("{c}x"),
            (_, 1) => format!("x^{i}"),
            _ => format!("{c}x^{i}"),
        });
    }
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join(" + ")
    }
}

#[derive(Serialize)]
struct EncodeReport {
    data_dir: PathBuf,
    nodes: usize,
    k: usize,
    records: u64,
    original_length: u64,
    symbol_bits: u32,
    sha256: String,
}

fn cmd_encode(
    args: &TowerArgs,
    k: usize,
    input: &Path,
    data_dir: &Path,
    json: bool,
) -> Result<(), Error> {
    let tower = args.build()?;
    let code = GrsCode::full_length(tower, k)?;
    let bytes = std::fs::read(input)?;
    let store = ShardStore::ingest(&bytes, &code, data_dir)?;
    let report = EncodeReport {
        data_dir: data_dir.to_path_buf(),
        nodes: code.length(),
        k,
        records: store.manifest().record_count,
        original_length: store.manifest().original_length,
        symbol_bits: store.manifest().symbol_bits,
        sha256: store.manifest().original_sha256.clone(),
    };
    if json {
        println!(
            "{}",
            serde_json::to_string_pretty(&report).expect("report serializes")
        );
    } else {
        println!(
            "encoded {} bytes into {} records of {} symbols across {} nodes under {}",
            report.original_length,
            report.records,
            report.k,
            report.nodes,
            report.data_dir.display()
        );
        println!("sha256 {}", report.sha256);
    }
    Ok(())
}

#[derive(Serialize)]
struct RetrieveReport {
    output: PathBuf,
    bytes: u64,
    sha256: String,
    hash_matches_manifest: bool,
}

fn cmd_retrieve(data_dir: &Path, output: &Path, json: bool) -> Result<(), Error> {
    let store = ShardStore::open(data_dir)?;
    let bytes = store.retrieve()?;
    let sha256 = sha256_hex(&bytes);
    let matches = sha256 == store.manifest().original_sha256;
    std::fs::write(output, &bytes)?;
    let report = RetrieveReport {
        output: output.to_path_buf(),
        bytes: bytes.len() as u64,
        sha256,
        hash_matches_manifest: matches,
    };
    if json {
        println!(
            "{}",
            serde_json::to_string_pretty(&report).expect("report serializes")
        );
    } else {
        println!(
            "wrote {} bytes to {}",
            report.bytes,
            report.output.display()
        );
        println!(
            "sha256 {} (manifest match: {})",
            report.sha256, report.hash_matches_manifest
        );
    }
    if !matches {
        return Err(Error::CorruptShard(
            "retrieved data does not hash to the manifest value".into(),
        ));
    }
    Ok(())
}

#[derive(Serialize)]
struct EraseReport {
    node: usize,
    lost_nodes: Vec<usize>,
}

fn cmd_erase(data_dir: &Path, node: usize, json: bool) -> Result<(), Error> {
    let mut store = ShardStore::open(data_dir)?;
    store.erase_node(node)?;
    let report = EraseReport {
        node,
        lost_nodes: store.manifest().lost_nodes.iter().copied().collect(),
    };
    if json {
        println!(
            "{}",
            serde_json::to_string_pretty(&report).expect("report serializes")
        );
    } else {
        println!(
            "erased node {}; lost set now {:?}",
            report.node, report.lost_nodes
        );
    }
    Ok(())
}

#[derive(Serialize)]
struct RepairCmdReport {
    node: usize,
    scheme: String,
    bandwidth: BandwidthReport,
}

fn cmd_repair(data_dir: &Path, node: usize, scheme: &str, json: bool) -> Result<(), Error> {
    let kind: SchemeKind = scheme.parse()?;
    let mut store = ShardStore::open(data_dir)?;
    let bandwidth = store.repair_node(node, kind)?;
    let report = RepairCmdReport {
        node,
        scheme: kind.to_string(),
        bandwidth,
    };
    if json {
        println!(
            "{}",
            serde_json::to_string_pretty(&report).expect("report serializes")
        );
    } else {
        let b = &report.bandwidth;
        println!("repaired node {} via {} repair", report.node, report.scheme);
        println!(
            "downloaded {} subring symbols ({} bits); naive baseline {} symbols; {}",
            b.total_r_symbols,
            b.total_bits,
            b.naive_r_symbols,
            if b.beats_naive {
                "beats naive"
            } else {
                "does not beat naive"
            }
        );
    }
    Ok(())
}

#[derive(Serialize)]
struct SelftestCheck {
    name: String,
    pass: bool,
    detail: String,
}

#[derive(Serialize)]
struct SelftestReport {
    seed: u64,
    checks: Vec<SelftestCheck>,
    all_pass: bool,
}

fn cmd_selftest(seed: u64, json: bool) -> ExitCode {
    let mut checks = Vec::new();
    let push = |name: &str, outcome: Result<String, String>, checks: &mut Vec<SelftestCheck>| {
        let (pass, detail) = match outcome {
            Ok(d) => (true, d),
            Err(d) => (false, d),
        };
        checks.push(SelftestCheck {
            name: name.to_string(),
            pass,
            detail,
        });
    };

    push(
        "worked-example repair",
        selftest_worked_example(json),
        &mut checks,
    );
    push("seeded codeword sweep", selftest_sweep(seed), &mut checks);
    push("hypothesis bounds", selftest_bounds(), &mut checks);

    let all_pass = checks.iter().all(|c| c.pass);
    if json {
        let report = SelftestReport {
            seed,
            checks,
            all_pass,
        };
        println!(
            "{}",
            serde_json::to_string_pretty(&report).expect("report serializes")
        );
    } else {
        for c in &checks {
            println!(
                "[{}] {}: {}",
                if c.pass { "PASS" } else { "FAIL" },
                c.name,
                c.detail
            );
        }
        println!("selftest: {}", if all_pass { "PASS" } else { "FAIL" });
    }
    if all_pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_DATA)
    }
}

fn worked_code() -> Result<GrsCode, Error> {
    let tower = TowerContext::with_modulus(2, 2, 1, 3, &[3, 1, 2, 1])?;
    GrsCode::full_length(tower, 2)
}

/// Replays the fixed configuration: GR(4,3) over Z4, message gamma^2 + x,
/// node 0 erased. Ring values are recomputed; the residue-field reference
/// table is what they must reduce to mod 2.
fn selftest_worked_example(json: bool) -> Result<String, String> {
    let code = worked_code().map_err(|e| e.to_string())?;
    let tower = code.tower().clone();
    let ring = code.ring().clone();
    let g = ring.gamma();
    let word = code
        .encode(&[g.pow(2), ring.one()])
        .map_err(|e| e.to_string())?;

    let scheme = TraceRepairScheme::new(code.clone(), 0).map_err(|e| e.to_string())?;
    if scheme.helpers().len() != 7 {
        return Err("expected 7 helpers".into());
    }
    let mut messages = Vec::new();
    for &h in scheme.helpers() {
        let wire = scheme
            .wire_message(0, h, &word[h])
            .map_err(|e| e.to_string())?;
        if wire.coords.len() != 1 {
            return Err(format!(
                "helper {h} sent {} values, expected 1",
                wire.coords.len()
            ));
        }
        messages.push(scheme.message_from_wire(&wire).map_err(|e| e.to_string())?);
    }
    let recovered = scheme.reconstruct(&messages).map_err(|e| e.to_string())?;
    if recovered != word[0] || recovered != g.pow(2) {
        return Err("recovered symbol differs from f(0)".into());
    }

    // Independent reconstruction identity from the true symbol.
    let mut direct = ring.zero();
    for (beta, dual) in tower.basis().iter().zip(tower.dual_basis()) {
        direct = direct.add(&tower.relative_trace(&beta.mul(&word[0])).mul(dual));
    }
    if direct != word[0] {
        return Err("trace-dual expansion of f(0) failed".into());
    }

    let reference: [[u64; 7]; 3] = [
        [1, 0, 0, 1, 0, 1, 1],
        [0, 0, 1, 0, 1, 1, 1],
        [0, 1, 0, 1, 1, 1, 0],
    ];
    let reference_r: [u64; 7] = [1, 1, 0, 0, 0, 1, 0];
    let labels = ["1     ", "gamma ", "gamma2"];
    if !json {
        println!("trace table Tr(beta * alpha_h), helpers alpha = 1..gamma^6");
        println!("       {:28} residue reference (F2)", "ring values (Z4)");
        for (j, row) in scheme.trace_table().iter().enumerate() {
            let ring_vals: Vec<u64> = row.iter().map(|t| t.coeffs()[0]).collect();
            println!(
                "{}  {:28} {:?}",
                labels[j],
                format!("{ring_vals:?}"),
                reference[j]
            );
        }
        let r_vals: Vec<u64> = messages.iter().map(|m| m.coeffs()[0]).collect();
        println!("r      {:28} {:?}", format!("{r_vals:?}"), reference_r);
    }
    for (j, row) in scheme.trace_table().iter().enumerate() {
        for (t, want) in row.iter().zip(reference[j]) {
            if t.coeffs()[0] % 2 != want {
                return Err(format!(
                    "trace table row {j} does not reduce to the reference"
                ));
            }
        }
    }
    for (m, want) in messages.iter().zip(reference_r) {
        if m.coeffs()[0] % 2 != want {
            return Err("helper messages do not reduce to the reference vector".into());
        }
    }
    Ok("recovered gamma^2; 7 single-Z4 messages; residue tables match".into())
}

fn selftest_sweep(seed: u64) -> Result<String, String> {
    let code = worked_code().map_err(|e| e.to_string())?;
    let ring = code.ring().clone();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut repairs = 0u64;
    for _ in 0..100 {
        let message: Vec<GRElement> = (0..2)
            .map(|_| ring.element_from_index(rng.gen_range(0..ring.size())))
            .collect();
        let word = code.encode(&message).map_err(|e| e.to_string())?;
        for lost in 0..8 {
            let scheme = TraceRepairScheme::new(code.clone(), lost).map_err(|e| e.to_string())?;
            let msgs: Vec<GRElement> = scheme
                .helpers()
                .iter()
                .map(|&h| scheme.helper_message(h, &word[h]))
                .collect::<Result<_, _>>()
                .map_err(|e: Error| e.to_string())?;
            if scheme.reconstruct(&msgs).map_err(|e| e.to_string())? != word[lost] {
                return Err(format!("mismatch at lost={lost}"));
            }
            repairs += 1;
        }
    }
    Ok(format!("{repairs} seeded repairs exact (seed {seed})"))
}

fn selftest_bounds() -> Result<String, String> {
    let tower = TowerContext::with_modulus(2, 2, 1, 3, &[3, 1, 2, 1]).map_err(|e| e.to_string())?;
    let at_bound = GrsCode::full_length(tower.clone(), 4).map_err(|e| e.to_string())?;
    TraceRepairScheme::new(at_bound, 0).map_err(|e| format!("k=4 must be accepted: {e}"))?;
    let over = GrsCode::full_length(tower, 5).map_err(|e| e.to_string())?;
    match TraceRepairScheme::new(over, 0) {
        Err(Error::KTooLarge { k: 5, max: 4 }) => {}
        other => return Err(format!("k=5 must fail the bound, got {other:?}")),
    }
    // Degenerate l = 1 tower: the ring over itself, bound p^m - 1 = 7.
    let degenerate = TowerContext::new(2, 2, 3, 1).map_err(|e| e.to_string())?;
    let at_bound = GrsCode::full_length(degenerate.clone(), 7).map_err(|e| e.to_string())?;
    TraceRepairScheme::new(at_bound, 0).map_err(|e| format!("l=1 k=7 must be accepted: {e}"))?;
    let over = GrsCode::full_length(degenerate, 8).map_err(|e| e.to_string())?;
    match TraceRepairScheme::new(over, 0) {
        Err(Error::KTooLarge { k: 8, max: 7 }) => {}
        other => return Err(format!("l=1 k=8 must fail the bound, got {other:?}")),
    }
    Ok("k bounds 4 (over Z4) and 7 (l=1) enforced at both edges".into())
}
