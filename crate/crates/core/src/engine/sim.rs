use std::thread;
use std::time::{Duration, Instant};

use rand::{CryptoRng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::Serialize;

use crate::bitvec::BitVector;
use crate::circuit::{layerize, Circuit, Layering};
use crate::sharing::{PartyId, ReplicatedShare, DEFAULT_LANE_COUNT};
use crate::transport::{
    memory_ring, MemoryRingOptions, PendingTcp, RingTransport, TcpConfig, TrafficCounters, TranscriptEntry, TransportError,
    DEFAULT_TIMEOUT,
};

use super::inputs::group_wires;
use super::{distribute_inputs, EngineError, EngineStats, GroupInput, InputAssignment, PartyState, Phase, RoundValues};

#[derive(Debug, Clone)]
pub struct SimulationOptions {
    pub lanes: usize,
    pub seed: u64,
    pub output_party: PartyId,
    /// Provider of each input group; `None` (or a `None` entry) means the
    /// harness deals the shares.
    pub providers: Option<Vec<Option<PartyId>>>,
    pub record_transcripts: bool,
    pub record_rounds: bool,
    pub timeout: Duration,
}

impl Default for SimulationOptions {
    fn default() -> Self {
        Self {
            lanes: DEFAULT_LANE_COUNT,
            seed: 0,
            output_party: PartyId::ALL[0],
            providers: None,
            record_transcripts: false,
            record_rounds: false,
            timeout: DEFAULT_TIMEOUT,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SessionReport {
    /// Revealed lanes of each output wire.
    #[serde(skip)]
    pub outputs: Vec<BitVector>,
    pub output_party: PartyId,
    pub lanes: usize,
    pub and_gates: usize,
    pub and_depth: usize,
    pub counters: [TrafficCounters; 3],
    pub stats: [EngineStats; 3],
    /// Wall time of the whole session, key exchange to reveal.
    pub elapsed: Duration,
    /// Slowest party's time in the compute phase alone.
    pub compute_elapsed: Duration,
    #[serde(skip)]
    pub transcripts: Option<[Vec<TranscriptEntry>; 3]>,
    #[serde(skip)]
    pub rounds: Option<[Vec<RoundValues>; 3]>,
    #[serde(skip)]
    pub output_shares: [Vec<ReplicatedShare>; 3],
}

/// What one party's run of a session produced.
#[derive(Debug, Clone)]
pub struct PartyOutcome {
    /// `Some` at the output party only.
    pub revealed: Option<Vec<BitVector>>,
    pub stats: EngineStats,
    pub compute: Duration,
    pub rounds: Vec<RoundValues>,
    pub output_shares: Vec<ReplicatedShare>,
}

/// Runs one party through a whole session over any ring transport and
/// hands the transport back for inspection.
#[allow(clippy::too_many_arguments)]
pub fn drive_party<T: RingTransport, R: RngCore + CryptoRng>(
    transport: T,
    c: &Circuit,
    layering: &Layering,
    groups: Vec<GroupInput>,
    lanes: usize,
    output_party: PartyId,
    record_rounds: bool,
    rng: &mut R,
) -> Result<(PartyOutcome, T), EngineError> {
    let mut party: PartyState<T> = PartyState::new(transport, lanes);
    if record_rounds {
        party.record_rounds();
    }
    party.setup(rng)?;
    party.load_inputs(c, groups)?;
    let t = Instant::now();
    party.run_circuit(c, layering)?;
    let compute = t.elapsed();
    let output_shares = party.output_shares(c)?;
    let revealed = party.reveal_outputs(c, output_party)?;
    let stats = party.stats();
    let rounds = party.rounds().map(<[_]>::to_vec).unwrap_or_default();
    Ok((
        PartyOutcome {
            revealed,
            stats,
            compute,
            rounds,
            output_shares,
        },
        party.into_transport(),
    ))
}

/// Three parties over the in-memory ring with harness-dealt inputs.
/// `inputs[w]` holds the lanes of input wire `w`.
pub fn run_local_simulation(c: &Circuit, inputs: &[BitVector], lanes: usize, seed: u64) -> Result<SessionReport, EngineError> {
    simulate(
        c,
        inputs,
        &SimulationOptions {
            lanes,
            seed,
            ..Default::default()
        },
    )
}

/// Seeded RNG for one role: stream 0 is the dealer, streams 1–3 the parties.
fn role_rng(seed: u64, stream: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Splits the harness's global inputs into what each party loads.
fn prepare(c: &Circuit, inputs: &[BitVector], opts: &SimulationOptions) -> Result<[Vec<GroupInput>; 3], EngineError> {
    if inputs.len() != c.input_wire_count() {
        return Err(EngineError::Input(format!(
            "circuit has {} input wires, got {}",
            c.input_wire_count(),
            inputs.len()
        )));
    }
    let groups = group_wires(c, inputs);
    let assignments: Vec<InputAssignment> = groups
        .into_iter()
        .enumerate()
        .map(|(g, values)| match opts.providers.as_ref().and_then(|p| p.get(g).copied().flatten()) {
            Some(owner) => InputAssignment::Party(owner, values),
            None => InputAssignment::Dealer(values),
        })
        .collect();
    distribute_inputs(c, &assignments, opts.lanes, &mut role_rng(opts.seed, 0))
}

pub fn simulate(c: &Circuit, inputs: &[BitVector], opts: &SimulationOptions) -> Result<SessionReport, EngineError> {
    let lanes = opts.lanes;
    let per_party = prepare(c, inputs, opts)?;
    let layering = layerize(c);
    let endpoints = memory_ring(MemoryRingOptions {
        timeout: opts.timeout,
        record_transcript: opts.record_transcripts,
        ..Default::default()
    });

    let start = Instant::now();
    let results: Vec<Result<(PartyOutcome, TrafficCounters, Vec<TranscriptEntry>), EngineError>> = thread::scope(|scope| {
        let handles: Vec<_> = endpoints
            .into_iter()
            .zip(per_party)
            .map(|(endpoint, groups)| {
                let layering = &layering;
                scope.spawn(move || {
                    let id = endpoint.party();
                    let mut rng = role_rng(opts.seed, u64::from(id.get()));
                    let (outcome, mut endpoint) =
                        drive_party(endpoint, c, layering, groups, lanes, opts.output_party, opts.record_rounds, &mut rng)?;
                    Ok((outcome, endpoint.counters(), endpoint.take_transcript()))
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().unwrap_or(Err(EngineError::Panicked)))
            .collect()
    });
    let elapsed = start.elapsed();
    let parties = first_error(results)?;
    let [(o1, c1, t1), (o2, c2, t2), (o3, c3, t3)] = parties;
    let transcripts = opts.record_transcripts.then(|| [t1, t2, t3]);
    Ok(assemble_report(c, &layering, opts, [o1, o2, o3], [c1, c2, c3], elapsed, transcripts))
}

/// A failing party closes its links, so its neighbours report `Closed`;
/// surface the original failure instead.
fn first_error<X>(results: Vec<Result<X, EngineError>>) -> Result<[X; 3], EngineError> {
    if results.iter().any(Result::is_err) {
        let mut errors: Vec<EngineError> = results.into_iter().filter_map(Result::err).collect();
        let root = errors
            .iter()
            .position(|e| {
                !matches!(
                    e,
                    EngineError::Transport {
                        source: TransportError::Closed,
                        ..
                    }
                )
            })
            .unwrap_or(0);
        return Err(errors.swap_remove(root));
    }
    let ok: Vec<X> = results.into_iter().map(|r| r.ok().expect("checked above")).collect();
    match <[X; 3]>::try_from(ok) {
        Ok(all) => Ok(all),
        Err(_) => unreachable!("three parties"),
    }
}

fn assemble_report(
    c: &Circuit,
    layering: &Layering,
    opts: &SimulationOptions,
    outcomes: [PartyOutcome; 3],
    counters: [TrafficCounters; 3],
    elapsed: Duration,
    transcripts: Option<[Vec<TranscriptEntry>; 3]>,
) -> SessionReport {
    let outputs = outcomes[opts.output_party.index()]
        .revealed
        .clone()
        .expect("output party reveals");
    debug_assert_eq!(outputs.len(), c.output_wire_count());
    let compute_elapsed = outcomes.iter().map(|o| o.compute).max().unwrap_or_default();
    let stats = outcomes.each_ref().map(|o| o.stats);
    let [o1, o2, o3] = outcomes;
    let rounds = opts.record_rounds.then(|| [o1.rounds, o2.rounds, o3.rounds]);
    SessionReport {
        outputs,
        output_party: opts.output_party,
        lanes: opts.lanes,
        and_gates: layering.and_gate_count(),
        and_depth: layering.and_depth(),
        counters,
        stats,
        elapsed,
        compute_elapsed,
        transcripts,
        rounds,
        output_shares: [o1.output_shares, o2.output_shares, o3.output_shares],
    }
}

/// Same session as [`simulate`], but the three parties talk over TCP on
/// loopback, each in its own thread. Transcripts are not recorded.
pub fn simulate_tcp_loopback(c: &Circuit, inputs: &[BitVector], opts: &SimulationOptions) -> Result<SessionReport, EngineError> {
    let per_party = prepare(c, inputs, opts)?;
    let layering = layerize(c);
    let tcp_err = |source| EngineError::Transport {
        phase: Phase::Setup,
        source,
    };
    let pending: Vec<PendingTcp> = (0..3).map(|_| PendingTcp::bind("127.0.0.1:0")).collect::<Result<_, _>>().map_err(tcp_err)?;
    let addrs: Vec<String> = pending.iter().map(|p| p.local_addr().to_string()).collect();
    let session_id = opts.seed ^ 0x5eed_0000_0000_0000;

    let start = Instant::now();
    let results = thread::scope(|scope| {
        let handles: Vec<_> = pending
            .into_iter()
            .zip(per_party)
            .enumerate()
            .map(|(i, (listener, groups))| {
                let id = PartyId::ALL[i];
                let mut cfg = TcpConfig::new(id, addrs[i].clone(), addrs[(i + 1) % 3].clone(), session_id);
                cfg.timeout = opts.timeout;
                let layering = &layering;
                scope.spawn(move || {
                    let endpoint = listener.establish(&cfg).map_err(tcp_err)?;
                    let mut rng = role_rng(opts.seed, u64::from(id.get()));
                    let (outcome, endpoint) =
                        drive_party(endpoint, c, layering, groups, opts.lanes, opts.output_party, opts.record_rounds, &mut rng)?;
                    let counters = endpoint.counters();
                    endpoint.close().map_err(tcp_err)?;
                    Ok((outcome, counters))
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().unwrap_or(Err(EngineError::Panicked)))
            .collect::<Vec<_>>()
    });
    let elapsed = start.elapsed();
    let [(o1, c1), (o2, c2), (o3, c3)] = first_error(results)?;
    Ok(assemble_report(c, &layering, opts, [o1, o2, o3], [c1, c2, c3], elapsed, None))
}
