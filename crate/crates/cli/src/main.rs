//! `qcl`: registry listing, vector checks, throughput benchmarks and the
//! handshake simulator.
//!
//! Exit codes: 0 success, 1 a check failed, 2 usage or input error.

mod units;

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qcl_core::bench::{mtu_sweep, run_throughput, BenchConfig, BenchReport, Direction};
use qcl_core::handshake::catalog::REFERENCE_TIMINGS;
use qcl_core::handshake::{build_flights, simulate, ttfb_decompose, Catalog, HandshakeProfile};
use qcl_core::keys::{derive_initial_secrets, derive_packet_keys};
use qcl_core::suites::SUITES;
use qcl_core::vectors::load_vectors;
use qcl_core::{HpAlg, SuiteId};
use serde::Serialize;

#[derive(Parser)]
#[command(
    name = "qcl",
    version,
    about = "QUIC packet protection benchmarks and handshake size model"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List cipher suites and header protection algorithms.
    Suites {
        #[arg(long)]
        json: bool,
    },
    /// Verify a vector file, or print Initial keys for a connection ID.
    Vectors(VectorArgs),
    /// Measure goodput and PP/HP cost for one configuration.
    Bench(BenchArgs),
    /// Run the benchmark at several MTUs.
    Sweep(SweepArgs),
    /// Simulate a handshake and print the report as JSON.
    Simulate(SimArgs),
    /// List the KEM and signature catalogs.
    Catalog {
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args)]
struct VectorArgs {
    /// Vector file to verify.
    #[arg(required_unless_present = "dcid", conflicts_with = "dcid")]
    path: Option<PathBuf>,
    /// Destination connection ID (hex) to derive Initial keys for.
    #[arg(long)]
    dcid: Option<String>,
    #[arg(long, default_value = "AES_128_GCM", requires = "dcid")]
    suite: String,
    #[arg(long, requires = "dcid")]
    hp: Option<String>,
    /// Write the `name=hex` key lines to this file instead of stdout.
    #[arg(long, requires = "dcid")]
    out: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct StreamArgs {
    #[arg(long, default_value = "AES_128_GCM")]
    suite: String,
    /// Header protection algorithm; defaults to the suite's own.
    #[arg(long)]
    hp: Option<String>,
    /// Payload per repetition, e.g. 256MiB or 8GiB.
    #[arg(long, default_value = "256MiB")]
    bytes: String,
    #[arg(long, default_value_t = 5)]
    reps: usize,
    #[arg(long, default_value_t = 2)]
    pn_len: usize,
    #[arg(long, default_value_t = 2048)]
    warmup: u64,
    /// seal, open or both.
    #[arg(long, default_value = "seal")]
    direction: String,
    /// Print the summary as JSON.
    #[arg(long)]
    json: bool,
    /// Write one CSV row per repetition.
    #[arg(long, value_name = "PATH")]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, default_value_t = 1500)]
    mtu: usize,
    #[command(flatten)]
    stream: StreamArgs,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, value_delimiter = ',', default_value = "1500,3000,6000")]
    mtus: Vec<usize>,
    #[command(flatten)]
    stream: StreamArgs,
}

#[derive(Args)]
struct SimArgs {
    /// KEM name or hybrid expression such as p256+kyber512.
    #[arg(long, default_value = "X25519")]
    kem: String,
    #[arg(long, default_value = "RSA-2048")]
    sig: String,
    /// Round-trip time, e.g. 20ms, 500us or 0.
    #[arg(long, default_value = "0")]
    rtt: String,
    /// Handshake packet-number window for both endpoints (unlimited if absent).
    #[arg(long)]
    pn_window: Option<u64>,
    /// Let the server answer an oversized flight with Retry.
    #[arg(long)]
    retry: bool,
    /// Anti-amplification factor; 0 disables the limit.
    #[arg(long, default_value_t = 3)]
    amp_factor: u64,
    #[arg(long, default_value_t = 1200)]
    mtu: usize,
    #[arg(long, default_value_t = 2)]
    ack_every: u64,
    /// Timing file (`reference` for the built-in representative numbers).
    #[arg(long)]
    timings: Option<String>,
    /// Processing delay charged per handshake message, e.g. 5ms.
    #[arg(long, default_value = "0")]
    per_message_delay: String,
}

enum Failure {
    Check(String),
    Usage(String),
}

impl From<qcl_core::Error> for Failure {
    fn from(e: qcl_core::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type CmdResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Suites { json } => cmd_suites(json),
        Command::Vectors(args) => cmd_vectors(args),
        Command::Bench(args) => cmd_bench(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Catalog { json } => cmd_catalog(json),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn parse_suite(s: &str) -> Result<SuiteId, Failure> {
    Ok(s.to_ascii_uppercase().replace('-', "_").parse()?)
}

fn parse_hp(s: Option<&str>, suite: SuiteId) -> Result<HpAlg, Failure> {
    match s {
        Some(s) => Ok(s.to_ascii_uppercase().replace('-', "_").parse()?),
        None => Ok(suite.params().default_hp_alg),
    }
}

fn print_json<T: Serialize>(value: &T) -> CmdResult {
    let text = serde_json::to_string_pretty(value).map_err(|e| Failure::Usage(e.to_string()))?;
    println!("{text}");
    Ok(())
}

fn cmd_suites(json: bool) -> CmdResult {
    if json {
        #[derive(Serialize)]
        struct Listing {
            suites: &'static [qcl_core::CipherSuite],
            hp_algorithms: [HpAlg; 4],
        }
        return print_json(&Listing {
            suites: &SUITES,
            hp_algorithms: HpAlg::ALL,
        });
    }
    println!(
        "{:<20} {:>7} {:>6} {:>7}  default HP",
        "suite", "key_len", "iv_len", "tag_len"
    );
    for s in &SUITES {
        println!(
            "{:<20} {:>7} {:>6} {:>7}  {}",
            s.id.name(),
            s.key_len,
            s.iv_len,
            s.tag_len,
            s.default_hp_alg
        );
    }
    println!();
    println!(
        "header protection: {}",
        HpAlg::ALL.map(HpAlg::name).join(", ")
    );
    Ok(())
}

fn cmd_vectors(args: VectorArgs) -> CmdResult {
    if let Some(dcid) = args.dcid {
        return write_initial_keys(&dcid, &args.suite, args.hp.as_deref(), args.out.as_deref());
    }
    let path = args.path.expect("clap requires a path without --dcid");
    let vectors =
        load_vectors(&path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    if vectors.is_empty() {
        eprintln!("warning: 0 vectors in {}", path.display());
        return Ok(());
    }
    let mut failed = Vec::new();
    for v in &vectors {
        match v.verify() {
            Ok(()) => println!("PASS {}", v.name),
            Err(m) => {
                println!("FAIL {}: `{}` mismatch ({})", v.name, m.label, m.detail);
                failed.push(v.name.as_str());
            }
        }
    }
    if failed.is_empty() {
        println!("{} vectors passed", vectors.len());
        Ok(())
    } else {
        Err(Failure::Check(format!(
            "{} of {} vectors failed: {}",
            failed.len(),
            vectors.len(),
            failed.join(", ")
        )))
    }
}

fn write_initial_keys(dcid: &str, suite: &str, hp: Option<&str>, out: Option<&Path>) -> CmdResult {
    let dcid = hex::decode(dcid).map_err(|e| Failure::Usage(format!("--dcid: {e}")))?;
    let suite = parse_suite(suite)?;
    let hp = parse_hp(hp, suite)?;
    let (client, server) = derive_initial_secrets(&dcid)?;
    let mut text = String::new();
    for (side, secret) in [("client", &client), ("server", &server)] {
        let keys = derive_packet_keys(secret, suite, hp);
        text += &format!("{side}_secret={}\n", hex::encode(secret.as_bytes()));
        text += &format!("{side}_key={}\n", hex::encode(&keys.key));
        text += &format!("{side}_iv={}\n", hex::encode(keys.iv));
        text += &format!("{side}_hp={}\n", hex::encode(&keys.hp));
    }
    match out {
        Some(path) => fs::write(path, text)?,
        None => io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn bench_config(stream: &StreamArgs, mtu: usize) -> Result<BenchConfig, Failure> {
    let suite = parse_suite(&stream.suite)?;
    Ok(BenchConfig {
        suite,
        hp_alg: parse_hp(stream.hp.as_deref(), suite)?,
        mtu,
        total_bytes: units::parse_bytes(&stream.bytes).map_err(Failure::Usage)?,
        pn_len: stream.pn_len,
        warmup_packets: stream.warmup,
        repetitions: stream.reps,
        direction: stream.direction.parse::<Direction>()?,
        ..BenchConfig::default()
    })
}

fn write_csv(path: &Path, reports: &[BenchReport]) -> CmdResult {
    let csv_err = |e: csv::Error| Failure::Usage(format!("{}: {e}", path.display()));
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record([
        "suite",
        "hp_alg",
        "mtu",
        "rep",
        "goodput_Bps",
        "pp_ns",
        "hp_ns",
        "packets",
    ])
    .map_err(csv_err)?;
    for r in reports {
        for s in &r.reps {
            w.write_record([
                r.suite.name().to_owned(),
                r.hp_alg.name().to_owned(),
                r.mtu.to_string(),
                s.rep.to_string(),
                format!("{:.1}", s.goodput_bps),
                s.pp_ns.to_string(),
                s.hp_ns.to_string(),
                s.packets.to_string(),
            ])
            .map_err(csv_err)?;
        }
    }
    w.flush()?;
    Ok(())
}

fn print_report_line(r: &BenchReport) {
    println!(
        "{}/{} mtu {} {}: goodput {:.1} Mbps median, {:.1} Mbps mean; {} packets; pp {:.2}%, hp {:.2}%",
        r.suite,
        r.hp_alg,
        r.mtu,
        r.direction,
        r.goodput_bps * 8.0 / 1e6,
        r.goodput_mean_bps * 8.0 / 1e6,
        r.packets,
        r.pp_share * 100.0,
        r.hp_share * 100.0
    );
}

fn emit_reports(stream: &StreamArgs, reports: &[BenchReport]) -> CmdResult {
    if let Some(path) = &stream.csv {
        write_csv(path, reports)?;
    }
    if stream.json {
        if let [single] = reports {
            print_json(single)
        } else {
            print_json(&reports)
        }
    } else {
        reports.iter().for_each(print_report_line);
        Ok(())
    }
}

fn cmd_bench(args: BenchArgs) -> CmdResult {
    let cfg = bench_config(&args.stream, args.mtu)?;
    let report = run_throughput(&cfg)?;
    emit_reports(&args.stream, &[report])
}

fn cmd_sweep(args: SweepArgs) -> CmdResult {
    let cfg = bench_config(&args.stream, 1500)?;
    let reports = mtu_sweep(&cfg, &args.mtus)?;
    emit_reports(&args.stream, &reports)
}

fn load_catalog(timings: Option<&str>) -> Result<Catalog, Failure> {
    let mut cat = Catalog::from_env()?;
    match timings {
        None => {}
        Some("reference") => cat.apply_timings(REFERENCE_TIMINGS)?,
        Some(path) => {
            let text =
                fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{path}: {e}")))?;
            cat.apply_timings(&text)?;
        }
    }
    Ok(cat)
}

fn cmd_simulate(args: SimArgs) -> CmdResult {
    let cat = load_catalog(args.timings.as_deref())?;
    let mut profile = HandshakeProfile::new(cat.kem(&args.kem)?, cat.sig(&args.sig)?);
    profile.rtt = units::parse_duration(&args.rtt).map_err(Failure::Usage)?;
    profile.per_message_delay =
        units::parse_duration(&args.per_message_delay).map_err(Failure::Usage)?;
    if args.mtu < 1200 {
        return Err(Failure::Usage(format!(
            "--mtu {} is below the 1200-byte QUIC minimum",
            args.mtu
        )));
    }
    if args.pn_window == Some(0) || args.ack_every == 0 {
        return Err(Failure::Usage(
            "--pn-window and --ack-every must be at least 1".into(),
        ));
    }
    for policy in [&mut profile.client_policy, &mut profile.server_policy] {
        policy.pn_window = args.pn_window;
        policy.initial_mtu = args.mtu;
        policy.ack_every = args.ack_every;
        policy.amp_factor = (args.amp_factor > 0).then_some(args.amp_factor);
    }
    profile.server_policy.retry_enabled = args.retry;

    let report = simulate(&profile);
    #[derive(Serialize)]
    struct Output<'a> {
        #[serde(flatten)]
        report: &'a qcl_core::handshake::SimReport,
        ttfb_ms: f64,
        ttfb_parts: qcl_core::handshake::TtfbParts,
        flights: qcl_core::handshake::Flights,
        kem: &'a qcl_core::handshake::KemSpec,
        sig: &'a qcl_core::handshake::SigSpec,
    }
    print_json(&Output {
        report: &report,
        ttfb_ms: report.ttfb.as_secs_f64() * 1e3,
        ttfb_parts: ttfb_decompose(&report, &profile),
        flights: build_flights(&profile),
        kem: &profile.kem,
        sig: &profile.sig,
    })
}

fn cmd_catalog(json: bool) -> CmdResult {
    let cat = load_catalog(None)?;
    if json {
        #[derive(Serialize)]
        struct Listing<'a> {
            kems: &'a [qcl_core::handshake::KemSpec],
            sigs: &'a [qcl_core::handshake::SigSpec],
        }
        return print_json(&Listing {
            kems: &cat.kems,
            sigs: &cat.sigs,
        });
    }
    println!("{:<22} {:>5} {:>8} {:>8}", "KEM", "level", "pk", "ct");
    for k in &cat.kems {
        println!(
            "{:<22} {:>5} {:>8} {:>8}",
            k.name, k.nist_level, k.pk_size, k.ct_size
        );
    }
    println!();
    println!(
        "{:<22} {:>5} {:>8} {:>8} {:>8}",
        "signature", "level", "pk", "sig", "cert"
    );
    for s in &cat.sigs {
        println!(
            "{:<22} {:>5} {:>8} {:>8} {:>8}",
            s.name, s.nist_level, s.pk_size, s.sig_size, s.cert_chain_size
        );
    }
    Ok(())
}
