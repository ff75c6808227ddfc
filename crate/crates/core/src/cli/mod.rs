//! The `ringshare` command line.
//!
//! Exit codes:
//!
//! | code | meaning                                         |
//! |------|-------------------------------------------------|
//! | 0    | success                                         |
//! | 1    | any other failure (I/O, missing file, ...)      |
//! | 2    | usage error (bad flags or inconsistent config)  |
//! | 3    | circuit, metadata or share-file parse error     |
//! | 4    | transport or handshake failure                  |
//! | 5    | protocol desync between parties                 |
//!
//! Every command accepts `--json` for one structured record on stdout.
//! Log verbosity follows the `RINGSHARE_LOG` environment variable
//! (`error`, `warn`, `info`, `debug`, `trace`).

mod config;

use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde_json::{json, Value};

use crate::bitvec::BitVector;
use crate::circuit::metadata::{CircuitMetadata, MetadataError};
use crate::circuit::{bundled, eval_clear, layerize, parse_bristol, validate, Circuit};
use crate::corr_rand::CorrRandError;
use crate::engine::{drive_party, simulate, simulate_tcp_loopback, EngineError, GroupInput, SessionReport, SimulationOptions};
use crate::perf;
use crate::sharefile::{self, ShareFile, ShareFileError};
use crate::sharing::{split_secret, PartyId, ReplicatedShare};
use crate::transport::{MsgType, PendingTcp, RingTransport, TcpConfig, TrafficCounters, TransportError};

pub use config::FileConfig;

pub const EXIT_OK: i32 = 0;
pub const EXIT_OTHER: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_PARSE: i32 = 3;
pub const EXIT_TRANSPORT: i32 = 4;
pub const EXIT_DESYNC: i32 = 5;

pub const LOG_ENV: &str = "RINGSHARE_LOG";

/// Inputs broadcast to more lanes than this are still fine; exhaustive
/// runs are capped so the lane count stays reasonable.
const MAX_EXHAUSTIVE_INPUT_WIRES: usize = 20;

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn new(code: i32, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }

    pub fn usage(message: impl Into<String>) -> Self {
        Self::new(EXIT_USAGE, message)
    }

    pub fn parse(message: impl Into<String>) -> Self {
        Self::new(EXIT_PARSE, message)
    }

    pub fn other(message: impl Into<String>) -> Self {
        Self::new(EXIT_OTHER, message)
    }
}

impl From<EngineError> for CliError {
    fn from(e: EngineError) -> Self {
        let code = match &e {
            EngineError::Transport { .. } => EXIT_TRANSPORT,
            EngineError::CorrRand {
                source: CorrRandError::Transport(_),
                ..
            } => EXIT_TRANSPORT,
            EngineError::Desync { .. } => EXIT_DESYNC,
            EngineError::Input(_) => EXIT_USAGE,
            _ => EXIT_OTHER,
        };
        Self::new(code, e.to_string())
    }
}

impl From<TransportError> for CliError {
    fn from(e: TransportError) -> Self {
        Self::new(EXIT_TRANSPORT, e.to_string())
    }
}

impl From<ShareFileError> for CliError {
    fn from(e: ShareFileError) -> Self {
        let code = match e {
            ShareFileError::Version(_) | ShareFileError::Malformed(_) => EXIT_PARSE,
            ShareFileError::Io(_) => EXIT_OTHER,
            _ => EXIT_USAGE,
        };
        Self::new(code, e.to_string())
    }
}

impl From<MetadataError> for CliError {
    fn from(e: MetadataError) -> Self {
        Self::parse(e.to_string())
    }
}

impl From<perf::ModelError> for CliError {
    fn from(e: perf::ModelError) -> Self {
        Self::usage(e.to_string())
    }
}

#[derive(Debug, Parser)]
#[command(name = "ringshare", version, about = "Three-party replicated secret sharing over a ring")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Inspect Bristol circuits.
    #[command(subcommand)]
    Circuit(CircuitCmd),
    /// Run one party of a session over TCP.
    Run(RunArgs),
    /// Run all three parties in this process over the in-memory ring.
    RunLocal(RunLocalArgs),
    /// Measure throughput of repeated sessions.
    Bench(BenchArgs),
    /// Reproduce the analytic throughput models.
    #[command(subcommand)]
    Model(ModelCmd),
    /// Split a file into three share files.
    Share(ShareArgs),
    /// Recover a file from its share files.
    Reconstruct(ReconstructArgs),
    /// Deal input shares of a circuit to three share files for `run --dealer-shares`.
    Deal(DealArgs),
}

#[derive(Debug, Subcommand)]
pub enum CircuitCmd {
    /// Parse and validate a circuit file.
    Validate(CircuitArg),
    /// Gate counts and AND depth.
    Stats(CircuitArg),
    /// Per-layer gate counts of the round schedule.
    Layers(CircuitArg),
    /// Names of the built-in circuits.
    List(JsonFlag),
    /// Write a built-in circuit and its sidecar to disk.
    Export {
        name: String,
        #[arg(long, short)]
        output: PathBuf,
    },
}

#[derive(Debug, Args)]
pub struct JsonFlag {
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct CircuitArg {
    /// Circuit file, or the name of a built-in circuit.
    pub circuit: String,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Flat `key = value` config file; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub party: Option<u8>,
    #[arg(long)]
    pub listen: Option<String>,
    #[arg(long)]
    pub successor: Option<String>,
    #[arg(long)]
    pub circuit: Option<String>,
    #[arg(long)]
    pub lanes: Option<usize>,
    /// Seeds key generation and any input lanes not given explicitly.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub session: Option<u64>,
    /// Per-message timeout in seconds.
    #[arg(long)]
    pub timeout: Option<u64>,
    #[arg(long)]
    pub output_party: Option<u8>,
    /// Comma-separated provider party per input group, e.g. `1,2`.
    #[arg(long)]
    pub providers: Option<String>,
    /// `GROUP=HEX` for an input group this party provides.
    #[arg(long = "input")]
    pub inputs: Vec<String>,
    /// Share file from `ringshare deal` holding all input wires.
    #[arg(long)]
    pub dealer_shares: Option<PathBuf>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct RunLocalArgs {
    #[arg(long)]
    pub circuit: String,
    /// Hex value per input group, in group order; broadcast to every lane.
    #[arg(long = "input")]
    pub inputs: Vec<String>,
    /// Lanes; defaults to 1 with explicit inputs, 128 with random inputs.
    #[arg(long)]
    pub lanes: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Evaluate every input assignment, one per lane.
    #[arg(long)]
    pub exhaustive: bool,
    #[arg(long, default_value_t = 1)]
    pub output_party: u8,
    /// Comma-separated provider per input group (`d` for the dealer).
    #[arg(long)]
    pub providers: Option<String>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BenchTransport {
    Local,
    Tcp,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, default_value = bundled::AES_NAME)]
    pub circuit: String,
    #[arg(long, default_value_t = 128)]
    pub lanes: usize,
    #[arg(long, default_value_t = 3)]
    pub repetitions: usize,
    #[arg(long, value_enum, default_value_t = BenchTransport::Local)]
    pub transport: BenchTransport,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Subcommand)]
pub enum ModelCmd {
    /// Network rate implied by published CPU AES rates.
    CpuTable {
        #[arg(long, default_value_t = perf::TCP_OVERHEAD)]
        overhead: f64,
        #[arg(long, default_value_t = perf::ANDS_PER_AES)]
        ands_per_aes: u64,
        #[arg(long)]
        json: bool,
    },
    /// Throughput of the FPGA AND core series.
    FpgaTable {
        #[arg(long, default_value_t = perf::FPGA_CLOCK_HZ / 1e6)]
        freq_mhz: f64,
        #[arg(long, default_value_t = perf::FPGA_WIDTH)]
        width: u64,
        #[arg(long, default_value_t = perf::FPGA_INITIATION_INTERVAL)]
        ii: u64,
        #[arg(long, default_value_t = perf::ANDS_PER_AES)]
        ands_per_aes: u64,
        /// Comma-separated AND core counts.
        #[arg(long)]
        cores: Option<String>,
        #[arg(long)]
        json: bool,
    },
    /// Instances that fit the fabric, and the link rate they saturate.
    Capacity {
        #[arg(long, default_value_t = perf::FPGA_INSTANCE_UTILIZATION_PCT)]
        per_instance_pct: f64,
        /// Comma-separated usable fabric fractions.
        #[arg(long, default_value = "1.0,0.7")]
        usable: String,
        #[arg(long, default_value_t = perf::FPGA_INITIATION_INTERVAL)]
        ii: u64,
        /// Instance count for the saturation estimate.
        #[arg(long, default_value_t = 48)]
        instances: u64,
        #[arg(long, default_value_t = 200.0)]
        freq_mhz: f64,
        #[arg(long, default_value_t = perf::FPGA_WIDTH)]
        width: u64,
        #[arg(long)]
        json: bool,
    },
    /// Least-squares fit of utilization against AND cores.
    Fit {
        /// `x,y;x,y;...`; defaults to the measured utilization series.
        #[arg(long)]
        points: Option<String>,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Debug, Args)]
pub struct ShareArgs {
    /// File to share (raw bytes, or hex text with `--hex`).
    pub input: PathBuf,
    /// Output files are `<prefix>.p1.share` .. `<prefix>.p3.share`.
    #[arg(long)]
    pub out_prefix: PathBuf,
    #[arg(long)]
    pub hex: bool,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct ReconstructArgs {
    pub files: Vec<PathBuf>,
    /// Recover from two shares instead of requiring all three.
    #[arg(long)]
    pub pairwise: bool,
    /// Write the raw bytes here instead of printing hex.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct DealArgs {
    #[arg(long)]
    pub circuit: String,
    /// Hex value per input group, in group order.
    #[arg(long = "input")]
    pub inputs: Vec<String>,
    #[arg(long, default_value_t = 1)]
    pub lanes: usize,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out_prefix: PathBuf,
    #[arg(long)]
    pub json: bool,
}

/// Entry point used by the binary; returns the process exit code.
pub fn main() -> i32 {
    let _ = env_logger::Builder::from_env(env_logger::Env::new().filter_or(LOG_ENV, "warn")).try_init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(cli.command) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    }
}

pub fn execute(cmd: Command) -> Result<(), CliError> {
    match cmd {
        Command::Circuit(c) => cmd_circuit(c),
        Command::Run(a) => cmd_run(a),
        Command::RunLocal(a) => cmd_run_local(a),
        Command::Bench(a) => cmd_bench(a),
        Command::Model(m) => cmd_model(m),
        Command::Share(a) => cmd_share(a),
        Command::Reconstruct(a) => cmd_reconstruct(a),
        Command::Deal(a) => cmd_deal(a),
    }
}

fn emit(json_mode: bool, record: &Value, text: impl FnOnce() -> String) {
    if json_mode {
        println!("{}", serde_json::to_string_pretty(record).expect("json values serialize"));
    } else {
        print!("{}", text());
    }
}

/// A circuit from a file (with its `.meta` sidecar, if any) or by built-in name.
pub fn load_circuit(arg: &str) -> Result<(Circuit, CircuitMetadata), CliError> {
    let path = Path::new(arg);
    if path.exists() {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::other(format!("cannot read {arg}: {e}")))?;
        let c = parse_bristol(&text).map_err(|e| CliError::parse(format!("{arg}: {e}")))?;
        let report = validate(&c);
        if !report.is_valid() {
            return Err(CliError::parse(format!("{arg}: {:?}", report.violations)));
        }
        let meta = CircuitMetadata::load_sidecar(path)
            .map_err(|e| CliError::parse(format!("{}: {e}", crate::circuit::metadata::sidecar_path(path).display())))?
            .unwrap_or_default();
        return Ok((c, meta));
    }
    bundled::by_name(arg).ok_or_else(|| CliError::other(format!("no circuit file or built-in circuit named {arg:?}")))
}

fn parse_party(n: u8) -> Result<PartyId, CliError> {
    PartyId::new(n).map_err(|e| CliError::usage(e.to_string()))
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>, CliError> {
    s.split(',')
        .map(|v| v.trim().parse().map_err(|_| CliError::usage(format!("bad {what}: {v:?}"))))
        .collect()
}

/// `inputs[w]` for every input wire, each lane drawn from `seed`.
pub fn random_inputs(c: &Circuit, lanes: usize, seed: u64) -> Vec<BitVector> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    (0..c.input_wire_count()).map(|_| BitVector::random(&mut rng, lanes)).collect()
}

/// Per-wire lanes for one hex value per group, repeated over every lane.
pub fn broadcast_inputs(c: &Circuit, meta: &CircuitMetadata, values: &[String], lanes: usize) -> Result<Vec<BitVector>, CliError> {
    let bits = meta.encode_inputs(c, values).map_err(|e| CliError::usage(e.to_string()))?;
    Ok(bits.iter().map(|b| if b { BitVector::ones(lanes) } else { BitVector::zeros(lanes) }).collect())
}

/// Every assignment of the input wires, one per lane.
fn exhaustive_inputs(c: &Circuit) -> Result<(Vec<BitVector>, usize), CliError> {
    let n = c.input_wire_count();
    if n > MAX_EXHAUSTIVE_INPUT_WIRES {
        return Err(CliError::usage(format!(
            "--exhaustive supports at most {MAX_EXHAUSTIVE_INPUT_WIRES} input wires, circuit has {n}"
        )));
    }
    let lanes = 1usize << n;
    let wires = (0..n).map(|w| (0..lanes).map(|k| k >> w & 1 == 1).collect()).collect();
    Ok((wires, lanes))
}

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct LaneRow {
    pub lane: usize,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
}

fn lane_column(wires: &[BitVector], lane: usize) -> BitVector {
    wires.iter().map(|w| w.get(lane)).collect()
}

pub fn lane_rows(c: &Circuit, meta: &CircuitMetadata, inputs: &[BitVector], outputs: &[BitVector], lanes: usize) -> Vec<LaneRow> {
    (0..lanes)
        .map(|lane| {
            let ins = lane_column(inputs, lane);
            let mut pos = 0;
            let inputs = c
                .input_groups()
                .iter()
                .map(|&w| {
                    let s = meta.group_to_hex(&ins.slice(pos, w));
                    pos += w;
                    s
                })
                .collect();
            LaneRow {
                lane,
                inputs,
                outputs: meta.decode_outputs(c, &lane_column(outputs, lane)),
            }
        })
        .collect()
}

fn rows_text(rows: &[LaneRow]) -> String {
    rows.iter()
        .map(|r| format!("lane {:>4}: {} -> {}\n", r.lane, r.inputs.join(" "), r.outputs.join(" ")))
        .collect()
}

fn traffic_record(party: PartyId, counters: &TrafficCounters, and_payload_bits: u64) -> Value {
    json!({
        "party": party.get(),
        "and_round_payload_bits": and_payload_bits,
        "sent_bytes": counters.total_sent().framed_bytes,
        "received_bytes": counters.total_received().framed_bytes,
        "counters": counters,
    })
}

fn traffic_text(party: PartyId, counters: &TrafficCounters, and_payload_bits: u64) -> String {
    let mut s = format!(
        "{party}: sent {} B, received {} B, AND_ROUND payload {and_payload_bits} bits\n",
        counters.total_sent().framed_bytes,
        counters.total_received().framed_bytes
    );
    for ty in MsgType::ALL {
        let st = counters.sent(ty);
        if st.messages > 0 {
            s += &format!("    {:<14} {:>4} msgs {:>10} payload B\n", ty.name(), st.messages, st.payload_bytes);
        }
    }
    s
}

fn cmd_circuit(cmd: CircuitCmd) -> Result<(), CliError> {
    match cmd {
        CircuitCmd::Validate(a) => {
            // Report every problem instead of stopping at the loader.
            let (valid, errors) = if Path::new(&a.circuit).exists() {
                let text = std::fs::read_to_string(&a.circuit).map_err(|e| CliError::other(e.to_string()))?;
                match parse_bristol(&text) {
                    Err(e) => (false, vec![e.to_string()]),
                    Ok(c) => {
                        let r = validate(&c);
                        (r.is_valid(), r.violations.iter().map(|v| format!("{v:?}")).collect())
                    }
                }
            } else {
                load_circuit(&a.circuit)?;
                (true, Vec::new())
            };
            let record = json!({"circuit": a.circuit, "valid": valid, "errors": errors});
            emit(a.json, &record, || {
                if valid {
                    format!("{}: ok\n", a.circuit)
                } else {
                    errors.iter().map(|e| format!("{}: {e}\n", a.circuit)).collect()
                }
            });
            if valid {
                Ok(())
            } else {
                Err(CliError::parse(format!("{} is not a valid circuit", a.circuit)))
            }
        }
        CircuitCmd::Stats(a) => {
            let (c, _) = load_circuit(&a.circuit)?;
            let stats = c.stats();
            emit(a.json, &serde_json::to_value(&stats).expect("serializable"), || format!("{stats}\n"));
            Ok(())
        }
        CircuitCmd::Layers(a) => {
            let (c, _) = load_circuit(&a.circuit)?;
            let l = layerize(&c);
            let layers: Vec<Value> = l
                .layers()
                .iter()
                .enumerate()
                .map(|(i, layer)| json!({"layer": i, "local": layer.local.len(), "and": layer.and.len()}))
                .collect();
            let record = json!({"and_depth": l.and_depth(), "and_gates": l.and_gate_count(), "layers": layers});
            emit(a.json, &record, || {
                let mut s = format!("and_depth {}\n", l.and_depth());
                for (i, layer) in l.layers().iter().enumerate() {
                    s += &format!("layer {i:>3}: {:>6} local {:>6} and\n", layer.local.len(), layer.and.len());
                }
                s
            });
            Ok(())
        }
        CircuitCmd::List(f) => {
            let mut names: Vec<&str> = bundled::ALL.iter().map(|b| b.name).collect();
            names.push(bundled::AES_NAME);
            emit(f.json, &json!(names), || names.iter().map(|n| format!("{n}\n")).collect());
            Ok(())
        }
        CircuitCmd::Export { name, output } => {
            let (c, meta) = bundled::by_name(&name).ok_or_else(|| CliError::usage(format!("no built-in circuit {name:?}")))?;
            let write = |p: &Path, s: String| std::fs::write(p, s).map_err(|e| CliError::other(format!("{}: {e}", p.display())));
            write(&output, c.to_bristol())?;
            write(&crate::circuit::metadata::sidecar_path(&output), meta.to_text())?;
            Ok(())
        }
    }
}

fn parse_providers(list: &str, groups: usize) -> Result<Vec<Option<PartyId>>, CliError> {
    let parsed: Vec<Option<PartyId>> = list
        .split(',')
        .map(|v| match v.trim() {
            "d" | "dealer" => Ok(None),
            v => v
                .parse::<u8>()
                .map_err(|_| CliError::usage(format!("bad provider {v:?}")))
                .and_then(parse_party)
                .map(Some),
        })
        .collect::<Result<_, _>>()?;
    if parsed.len() != groups {
        return Err(CliError::usage(format!("{} providers for {groups} input groups", parsed.len())));
    }
    Ok(parsed)
}

fn cmd_run_local(a: RunLocalArgs) -> Result<(), CliError> {
    let (c, meta) = load_circuit(&a.circuit)?;
    let (inputs, lanes) = if a.exhaustive {
        exhaustive_inputs(&c)?
    } else if !a.inputs.is_empty() {
        let lanes = a.lanes.unwrap_or(1);
        (broadcast_inputs(&c, &meta, &a.inputs, lanes)?, lanes)
    } else {
        let lanes = a.lanes.unwrap_or(crate::sharing::DEFAULT_LANE_COUNT);
        (random_inputs(&c, lanes, a.seed), lanes)
    };
    if lanes == 0 {
        return Err(CliError::usage("--lanes must be at least 1"));
    }
    let providers = a.providers.as_deref().map(|p| parse_providers(p, c.input_groups().len())).transpose()?;
    let opts = SimulationOptions {
        lanes,
        seed: a.seed,
        output_party: parse_party(a.output_party)?,
        providers,
        ..Default::default()
    };
    let report = simulate(&c, &inputs, &opts)?;
    let clear = eval_clear(&c, &inputs).map_err(|e| CliError::usage(e.to_string()))?;
    let matches = clear == report.outputs;
    let rows = lane_rows(&c, &meta, &inputs, &report.outputs, lanes);
    let record = json!({
        "circuit": a.circuit,
        "lanes": lanes,
        "seed": a.seed,
        "output_party": opts.output_party.get(),
        "and_gates": report.and_gates,
        "and_depth": report.and_depth,
        "matches_clear_evaluation": matches,
        "elapsed_ms": report.elapsed.as_secs_f64() * 1e3,
        "rows": rows,
        "traffic": PartyId::ALL.iter().map(|&p| traffic_record(p, &report.counters[p.index()], report.stats[p.index()].and_payload_bits)).collect::<Vec<_>>(),
    });
    emit(a.json, &record, || {
        let mut s = rows_text(&rows);
        s += &format!(
            "matches clear evaluation: {matches}\n{} AND gates x {lanes} lanes, depth {}, {:.2} ms\n",
            report.and_gates,
            report.and_depth,
            report.elapsed.as_secs_f64() * 1e3
        );
        for p in PartyId::ALL {
            s += &traffic_text(p, &report.counters[p.index()], report.stats[p.index()].and_payload_bits);
        }
        s
    });
    if matches {
        Ok(())
    } else {
        Err(CliError::other("MPC output differs from clear evaluation"))
    }
}

/// Fully resolved `run` configuration.
#[derive(Debug, Clone)]
pub struct SessionConfig {
    pub party: PartyId,
    pub listen: String,
    pub successor: String,
    pub circuit: String,
    pub lanes: usize,
    pub seed: Option<u64>,
    pub session: u64,
    pub timeout: Duration,
    pub output_party: PartyId,
    pub providers: Option<String>,
    pub inputs: Vec<String>,
    pub dealer_shares: Option<PathBuf>,
}

impl SessionConfig {
    pub fn resolve(a: &RunArgs) -> Result<Self, CliError> {
        let file = match &a.config {
            Some(p) => FileConfig::load(p)?,
            None => FileConfig::default(),
        };
        let need = |v: Option<String>, key: &str| v.ok_or_else(|| CliError::usage(format!("--{} is required", key.replace('_', "-"))));
        let party = parse_party(file.pick(a.party, "party")?.ok_or_else(|| CliError::usage("--party is required"))?)?;
        let lanes = file.pick(a.lanes, "lanes")?.unwrap_or(1);
        if lanes == 0 {
            return Err(CliError::usage("lanes must be at least 1"));
        }
        let inputs = if a.inputs.is_empty() { file.inputs().to_vec() } else { a.inputs.clone() };
        Ok(Self {
            party,
            listen: need(file.pick(a.listen.clone(), "listen")?, "listen")?,
            successor: need(file.pick(a.successor.clone(), "successor")?, "successor")?,
            circuit: need(file.pick(a.circuit.clone(), "circuit")?, "circuit")?,
            lanes,
            seed: file.pick(a.seed, "seed")?,
            session: file.pick(a.session, "session")?.unwrap_or(0),
            timeout: Duration::from_secs(file.pick(a.timeout, "timeout")?.unwrap_or(30)),
            output_party: parse_party(file.pick(a.output_party, "output_party")?.unwrap_or(1))?,
            providers: file.pick(a.providers.clone(), "providers")?,
            inputs,
            dealer_shares: file.pick(a.dealer_shares.as_ref().map(|p| p.display().to_string()), "dealer_shares")?.map(PathBuf::from),
        })
    }
}

fn own_group_inputs(cfg: &SessionConfig, c: &Circuit, meta: &CircuitMetadata) -> Result<Vec<GroupInput>, CliError> {
    let groups = c.input_groups().len();
    if let Some(path) = &cfg.dealer_shares {
        let file = ShareFile::read(path)?;
        if file.party != cfg.party {
            return Err(CliError::usage(format!("{} holds {}'s shares, not {}'s", path.display(), file.party, cfg.party)));
        }
        let lanes = cfg.lanes;
        if file.share.len() != c.input_wire_count() * lanes {
            return Err(CliError::usage(format!(
                "{} holds {} bits, circuit needs {} input wires x {lanes} lanes",
                path.display(),
                file.share.len(),
                c.input_wire_count()
            )));
        }
        let mut wire = 0;
        return Ok(c
            .input_groups()
            .iter()
            .map(|&w| {
                let shares = (wire..wire + w)
                    .map(|k| {
                        let (lo, n) = (k * lanes, lanes);
                        ReplicatedShare::new(file.share.x().slice(lo, n), file.share.a().slice(lo, n)).expect("equal lengths")
                    })
                    .collect();
                wire += w;
                GroupInput::Dealt(shares)
            })
            .collect());
    }
    let providers = match &cfg.providers {
        Some(p) => parse_providers(p, groups)?,
        None => vec![Some(PartyId::ALL[0]); groups],
    };
    let mut given: Vec<Option<String>> = vec![None; groups];
    for entry in &cfg.inputs {
        let (g, v) = entry
            .split_once('=')
            .ok_or_else(|| CliError::usage(format!("--input expects GROUP=HEX, got {entry:?}")))?;
        let g: usize = g.trim().parse().map_err(|_| CliError::usage(format!("bad input group in {entry:?}")))?;
        if g >= groups {
            return Err(CliError::usage(format!("input group {g} out of range (circuit has {groups})")));
        }
        if providers[g] != Some(cfg.party) {
            return Err(CliError::usage(format!("input group {g} is not provided by {}", cfg.party)));
        }
        given[g] = Some(v.trim().to_string());
    }
    let mut seeded = None;
    let mut out = Vec::with_capacity(groups);
    for g in 0..groups {
        let owner = providers[g].ok_or_else(|| CliError::usage("dealer-provided groups need --dealer-shares"))?;
        if owner != cfg.party {
            out.push(GroupInput::Remote(owner));
            continue;
        }
        let base = c.input_group_offset(g);
        let width = c.input_groups()[g];
        let values = match &given[g] {
            Some(hex) => {
                let bits = meta.group_from_hex(hex, width).map_err(|e| CliError::usage(e.to_string()))?;
                bits.iter().map(|b| if b { BitVector::ones(cfg.lanes) } else { BitVector::zeros(cfg.lanes) }).collect()
            }
            None => {
                let seed = cfg
                    .seed
                    .ok_or_else(|| CliError::usage(format!("input group {g} needs --input {g}=HEX or --seed")))?;
                let all = seeded.get_or_insert_with(|| random_inputs(c, cfg.lanes, seed));
                all[base..base + width].to_vec()
            }
        };
        out.push(GroupInput::Own(values));
    }
    Ok(out)
}

fn cmd_run(a: RunArgs) -> Result<(), CliError> {
    let cfg = SessionConfig::resolve(&a)?;
    let (c, meta) = load_circuit(&cfg.circuit)?;
    let groups = own_group_inputs(&cfg, &c, &meta)?;
    let layering = layerize(&c);

    let mut tcp = TcpConfig::new(cfg.party, cfg.listen.clone(), cfg.successor.clone(), cfg.session);
    tcp.timeout = cfg.timeout;
    log::info!("{} listening on {}, successor {}", cfg.party, cfg.listen, cfg.successor);
    let start = Instant::now();
    let endpoint = PendingTcp::bind(&cfg.listen)?.establish(&tcp)?;
    log::info!("{} ring established", cfg.party);
    let mut rng = match cfg.seed {
        Some(s) => {
            let mut r = ChaCha20Rng::seed_from_u64(s);
            r.set_stream(100 + u64::from(cfg.party.get()));
            r
        }
        None => ChaCha20Rng::from_entropy(),
    };
    let (outcome, endpoint) = drive_party(endpoint, &c, &layering, groups, cfg.lanes, cfg.output_party, false, &mut rng)?;
    let counters = endpoint.counters();
    endpoint.close()?;
    let elapsed = start.elapsed();

    let rows = outcome.revealed.as_ref().map(|outs| {
        // Inputs are private: rows carry outputs only.
        let mut rows = lane_rows(&c, &meta, &vec![BitVector::zeros(cfg.lanes); c.input_wire_count()], outs, cfg.lanes);
        for r in &mut rows {
            r.inputs.clear();
        }
        rows
    });
    let record = json!({
        "party": cfg.party.get(),
        "output_party": cfg.output_party.get(),
        "circuit": cfg.circuit,
        "lanes": cfg.lanes,
        "outputs": rows.as_ref().map(|r| r.iter().map(|row| row.outputs.clone()).collect::<Vec<_>>()),
        "elapsed_ms": elapsed.as_secs_f64() * 1e3,
        "compute_ms": outcome.compute.as_secs_f64() * 1e3,
        "traffic": traffic_record(cfg.party, &counters, outcome.stats.and_payload_bits),
    });
    emit(a.json, &record, || {
        let mut s = String::new();
        if let Some(rows) = &rows {
            for r in rows {
                if cfg.lanes == 1 {
                    s += &format!("{}\n", r.outputs.join(" "));
                } else {
                    s += &format!("lane {:>4}: {}\n", r.lane, r.outputs.join(" "));
                }
            }
        }
        s += &traffic_text(cfg.party, &counters, outcome.stats.and_payload_bits);
        s += &format!("elapsed {:.2} ms (compute {:.2} ms)\n", elapsed.as_secs_f64() * 1e3, outcome.compute.as_secs_f64() * 1e3);
        s
    });
    Ok(())
}

fn cmd_bench(a: BenchArgs) -> Result<(), CliError> {
    if a.repetitions == 0 {
        return Err(CliError::usage("--repetitions must be at least 1"));
    }
    if a.lanes == 0 {
        return Err(CliError::usage("--lanes must be at least 1"));
    }
    let (c, _) = load_circuit(&a.circuit)?;
    let mut reps = Vec::new();
    let mut outputs_match_local = true;
    for rep in 0..a.repetitions {
        let seed = a.seed.wrapping_add(rep as u64);
        let inputs = random_inputs(&c, a.lanes, seed);
        let opts = SimulationOptions {
            lanes: a.lanes,
            seed,
            ..Default::default()
        };
        let report: SessionReport = match a.transport {
            BenchTransport::Local => simulate(&c, &inputs, &opts)?,
            BenchTransport::Tcp => {
                let r = simulate_tcp_loopback(&c, &inputs, &opts)?;
                if rep == 0 {
                    outputs_match_local = simulate(&c, &inputs, &opts)?.outputs == r.outputs;
                }
                r
            }
        };
        let t = perf::measure_throughput(&report)?;
        reps.push((t, report.elapsed));
    }
    let best = reps
        .iter()
        .map(|r| r.0)
        .max_by(|x, y| x.ands_per_sec.total_cmp(&y.ands_per_sec))
        .expect("at least one repetition");
    let transport = match a.transport {
        BenchTransport::Local => "local",
        BenchTransport::Tcp => "tcp",
    };
    let record = json!({
        "circuit": a.circuit,
        "transport": transport,
        "lanes": a.lanes,
        "repetitions": reps.iter().map(|(t, wall)| json!({"throughput": t, "wall_ms": wall.as_secs_f64() * 1e3})).collect::<Vec<_>>(),
        "best": best,
        "outputs_match_local": outputs_match_local,
    });
    emit(a.json, &record, || {
        let rows: Vec<Vec<String>> = reps
            .iter()
            .enumerate()
            .map(|(i, (t, wall))| {
                vec![
                    i.to_string(),
                    format!("{:.0}", t.ands_per_sec),
                    format!("{:.1}", t.equivalent_aes_per_sec),
                    format!("{:.4}", t.payload_gbps),
                    format!("{:.2}", t.seconds * 1e3),
                    format!("{:.2}", wall.as_secs_f64() * 1e3),
                ]
            })
            .collect();
        let mut s = format!("{} over {transport}, {} lanes\n", a.circuit, a.lanes);
        s += &perf::aligned_table(&["rep", "ANDs/s", "AES/s", "payload Gbps", "compute ms", "wall ms"], &rows);
        if a.transport == BenchTransport::Tcp {
            s += &format!("outputs match local simulation: {outputs_match_local}\n");
        }
        s
    });
    if outputs_match_local {
        Ok(())
    } else {
        Err(CliError::other("TCP outputs differ from the local simulation"))
    }
}

fn mark(ok: bool) -> &'static str {
    if ok {
        "ok"
    } else {
        "off"
    }
}

fn cmd_model(cmd: ModelCmd) -> Result<(), CliError> {
    match cmd {
        ModelCmd::CpuTable {
            overhead,
            ands_per_aes,
            json,
        } => {
            let rows: Vec<perf::CpuModelRow> = perf::CPU_REFERENCE
                .iter()
                .map(|&(c, aes, gbps)| perf::cpu_row(c, aes, gbps, ands_per_aes, overhead))
                .collect::<Result<_, _>>()?;
            let checks: Vec<bool> = rows
                .iter()
                .zip(perf::CPU_PUBLISHED)
                .map(|(r, (g, e))| {
                    (r.predicted_gbps_with_overhead - g).abs() <= perf::CPU_GBPS_TOLERANCE
                        && (r.error_percent - e).abs() <= perf::CPU_ERROR_TOLERANCE_PP
                })
                .collect();
            let records: Vec<Value> = rows
                .iter()
                .zip(&checks)
                .map(|(r, ok)| {
                    let mut v = serde_json::to_value(r).expect("serializable");
                    v["matches_published"] = json!(ok);
                    v
                })
                .collect();
            emit(json, &json!(records), || {
                let body: Vec<Vec<String>> = rows
                    .iter()
                    .zip(perf::CPU_PUBLISHED)
                    .zip(&checks)
                    .map(|((r, (g, e)), ok)| {
                        vec![
                            r.cores.to_string(),
                            format!("{:.0}", r.reported_aes_per_sec),
                            format!("{:.3}", r.reported_gbps),
                            format!("{:.4}", r.predicted_gbps_with_overhead),
                            format!("{g:.3}"),
                            format!("{:.2}%", r.error_percent),
                            format!("{e:.2}%"),
                            mark(*ok).into(),
                        ]
                    })
                    .collect();
                perf::aligned_table(
                    &["cores", "aes/s", "gbps", "predicted", "published", "error", "published", "check"],
                    &body,
                )
            });
            Ok(())
        }
        ModelCmd::FpgaTable {
            freq_mhz,
            width,
            ii,
            ands_per_aes,
            cores,
            json,
        } => {
            let series: Vec<u64> = match &cores {
                Some(s) => parse_list(s, "core count")?,
                None => perf::FPGA_CORE_SERIES.to_vec(),
            };
            let rows: Vec<perf::FpgaModelRow> = series
                .iter()
                .map(|&n| perf::fpga_throughput(n, freq_mhz * 1e6, width, ii, ands_per_aes))
                .collect::<Result<_, _>>()?;
            // Published values only apply to the default series.
            let checks: Vec<Option<bool>> = rows
                .iter()
                .map(|r| {
                    let i = perf::FPGA_CORE_SERIES.iter().position(|&n| n == r.and_cores)?;
                    let (g, aes) = perf::FPGA_PUBLISHED[i];
                    (cores.is_none()).then(|| {
                        (r.gbps - g).abs() <= perf::FPGA_GBPS_TOLERANCE
                            && (r.aes_per_sec / aes - 1.0).abs() <= perf::FPGA_AES_RELATIVE_TOLERANCE
                    })
                })
                .collect();
            let records: Vec<Value> = rows
                .iter()
                .zip(&checks)
                .map(|(r, ok)| {
                    let mut v = serde_json::to_value(r).expect("serializable");
                    v["matches_published"] = json!(ok);
                    v
                })
                .collect();
            emit(json, &json!(records), || {
                let mut s = perf::fpga_table_text(&rows);
                if checks.iter().any(Option::is_some) {
                    let all = checks.iter().all(|c| *c == Some(true));
                    s += &format!("published table: {}\n", mark(all));
                }
                s
            });
            Ok(())
        }
        ModelCmd::Capacity {
            per_instance_pct,
            usable,
            ii,
            instances,
            freq_mhz,
            width,
            json,
        } => {
            let fractions: Vec<f64> = parse_list(&usable, "usable fraction")?;
            let rows: Vec<(f64, perf::CapacityEstimate)> = fractions
                .iter()
                .map(|&f| perf::capacity_estimate(per_instance_pct, f, ii).map(|e| (f, e)))
                .collect::<Result<_, _>>()?;
            let ops = perf::ops_per_cycle(instances, ii);
            let gbps = perf::saturated_gbps(ops, width, freq_mhz * 1e6);
            let record = json!({
                "per_instance_pct": per_instance_pct,
                "estimates": rows.iter().map(|(f, e)| json!({"usable_fraction": f, "instances": e.instances, "ops_per_cycle": e.ops_per_cycle})).collect::<Vec<_>>(),
                "saturation": {"instances": instances, "initiation_interval": ii, "ops_per_cycle": ops, "freq_mhz": freq_mhz, "width": width, "gbps": gbps},
            });
            emit(json, &record, || {
                let mut s = String::new();
                for (f, e) in &rows {
                    s += &format!(
                        "{:>5.1}% usable at {per_instance_pct}% each: {} instances, {} ops/cycle\n",
                        f * 100.0,
                        e.instances,
                        e.ops_per_cycle
                    );
                }
                s += &format!("{instances} instances / ii {ii} = {ops} ops/cycle x {width} bits x {freq_mhz} MHz = {gbps:.1} Gbps\n");
                s
            });
            Ok(())
        }
        ModelCmd::Fit { points, json } => {
            let pts: Vec<(f64, f64)> = match &points {
                Some(s) => s
                    .split(';')
                    .filter(|p| !p.trim().is_empty())
                    .map(|p| {
                        let v: Vec<f64> = parse_list(p, "point")?;
                        match v[..] {
                            [x, y] => Ok((x, y)),
                            _ => Err(CliError::usage(format!("point {p:?} needs x,y"))),
                        }
                    })
                    .collect::<Result<_, _>>()?,
                None => perf::FPGA_UTILIZATION_POINTS.to_vec(),
            };
            let fit = perf::utilization_fit(&pts)?;
            emit(json, &serde_json::to_value(fit).expect("serializable"), || {
                format!(
                    "slope {:.5}\nintercept {:.5}\nr_squared {:.5}\n",
                    fit.slope, fit.intercept, fit.r_squared
                )
            });
            Ok(())
        }
    }
}

fn share_paths(prefix: &Path) -> [PathBuf; 3] {
    PartyId::ALL.map(|p| PathBuf::from(format!("{}.p{}.share", prefix.display(), p.get())))
}

fn seeded_or_entropy(seed: Option<u64>) -> ChaCha20Rng {
    seed.map_or_else(ChaCha20Rng::from_entropy, ChaCha20Rng::seed_from_u64)
}

fn cmd_share(a: ShareArgs) -> Result<(), CliError> {
    let raw = std::fs::read(&a.input).map_err(|e| CliError::other(format!("{}: {e}", a.input.display())))?;
    let bytes = if a.hex {
        let text: String = String::from_utf8_lossy(&raw).split_whitespace().collect();
        hex::decode(text).map_err(|e| CliError::parse(format!("{}: bad hex: {e}", a.input.display())))?
    } else {
        raw
    };
    let v = BitVector::from_byte_slice(&bytes);
    let bundle = split_secret(&v, &mut seeded_or_entropy(a.seed));
    let paths = share_paths(&a.out_prefix);
    for (f, p) in sharefile::bundle_files(&bundle).iter().zip(&paths) {
        f.write(p)?;
    }
    let names: Vec<String> = paths.iter().map(|p| p.display().to_string()).collect();
    emit(a.json, &json!({"bits": v.len(), "files": names}), || names.iter().map(|n| format!("{n}\n")).collect());
    Ok(())
}

fn cmd_reconstruct(a: ReconstructArgs) -> Result<(), CliError> {
    let files: Vec<ShareFile> = a.files.iter().map(|p| ShareFile::read(p)).collect::<Result<_, _>>()?;
    let v = if a.pairwise {
        sharefile::reconstruct_two(&files)?
    } else {
        sharefile::reconstruct_files(&files)?
    };
    let bytes = v.to_bytes();
    if let Some(out) = &a.output {
        std::fs::write(out, &bytes).map_err(|e| CliError::other(format!("{}: {e}", out.display())))?;
    }
    let record = json!({"bits": v.len(), "hex": hex::encode(&bytes)});
    if a.output.is_none() || a.json {
        emit(a.json, &record, || format!("{}\n", hex::encode(&bytes)));
    }
    Ok(())
}

fn cmd_deal(a: DealArgs) -> Result<(), CliError> {
    if a.lanes == 0 {
        return Err(CliError::usage("--lanes must be at least 1"));
    }
    let (c, meta) = load_circuit(&a.circuit)?;
    let wires = broadcast_inputs(&c, &meta, &a.inputs, a.lanes)?;
    let v = BitVector::concat(&wires);
    let bundle = split_secret(&v, &mut seeded_or_entropy(a.seed));
    let paths = share_paths(&a.out_prefix);
    for (f, p) in sharefile::bundle_files(&bundle).iter().zip(&paths) {
        f.write(p)?;
    }
    let names: Vec<String> = paths.iter().map(|p| p.display().to_string()).collect();
    emit(a.json, &json!({"bits": v.len(), "lanes": a.lanes, "files": names}), || {
        names.iter().map(|n| format!("{n}\n")).collect()
    });
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn definitions_are_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }

    #[test]
    fn exit_codes_for_engine_errors() {
        let desync = EngineError::Desync {
            phase: crate::engine::Phase::Compute,
            detail: "x".into(),
        };
        assert_eq!(CliError::from(desync).code, EXIT_DESYNC);
        let t = EngineError::Transport {
            phase: crate::engine::Phase::Setup,
            source: TransportError::Closed,
        };
        assert_eq!(CliError::from(t).code, EXIT_TRANSPORT);
        assert_eq!(CliError::from(EngineError::Input("x".into())).code, EXIT_USAGE);
    }

    #[test]
    fn exhaustive_lanes_enumerate_assignments() {
        let c = bundled::FULL_ADDER.circuit();
        let (wires, lanes) = exhaustive_inputs(&c).unwrap();
        assert_eq!(lanes, 8);
        assert_eq!(wires[2], BitVector::from_bools(&[false, false, false, false, true, true, true, true]));
    }

    #[test]
    fn providers_parse() {
        assert_eq!(parse_providers("1,d", 2).unwrap(), vec![Some(PartyId::ALL[0]), None]);
        assert!(parse_providers("1", 2).is_err());
        assert!(parse_providers("4,1", 2).is_err());
    }
}
