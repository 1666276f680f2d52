//! Throughput harness that pushes a synthetic stream through the protection
//! pipeline and attributes wall-clock time to framing, packet protection and
//! header protection.
//!
//! Stages are timed per batch of packets rather than per packet, which keeps
//! clock reads well under 1% of the measured work.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::keys::derive_packet_keys_from;
use crate::packet::{plan_packets, Protection, DEFAULT_DCID_LEN};
use crate::suites::{HpAlg, SuiteId, TAG_LEN};

pub const MIB: u64 = 1 << 20;
pub const GIB: u64 = 1 << 30;
/// Short header: first byte plus DCID.
pub const SHORT_HEADER_LEN: usize = 1 + DEFAULT_DCID_LEN;
/// Packet buffer bytes per timing probe; sized to stay cache resident.
pub const DEFAULT_BATCH_BYTES: usize = 256 * 1024;

const BENCH_SECRET: [u8; 32] = [0x5a; 32];
const BENCH_DCID: [u8; DEFAULT_DCID_LEN] = [0x83, 0x94, 0xc8, 0xf0, 0x3e, 0x51, 0x57, 0x08];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    #[default]
    Seal,
    Open,
    Both,
}

impl Direction {
    pub fn name(self) -> &'static str {
        match self {
            Direction::Seal => "seal",
            Direction::Open => "open",
            Direction::Both => "both",
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Direction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "seal" => Ok(Direction::Seal),
            "open" => Ok(Direction::Open),
            "both" => Ok(Direction::Both),
            other => Err(Error::InvalidConfig(format!("unknown direction `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BenchConfig {
    pub suite: SuiteId,
    pub hp_alg: HpAlg,
    /// IP-level MTU.
    pub mtu: usize,
    /// Application payload bytes per repetition.
    pub total_bytes: u64,
    pub pn_len: usize,
    /// Packets pushed through the pipeline before the first timed repetition.
    pub warmup_packets: u64,
    pub repetitions: usize,
    pub direction: Direction,
    /// Packet buffer bytes per timing probe (at least one packet).
    pub batch_bytes: usize,
    /// Seed for the synthetic stream contents.
    pub seed: u64,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            suite: SuiteId::Aes128Gcm,
            hp_alg: HpAlg::AesEcb,
            mtu: 1500,
            total_bytes: 256 * MIB,
            pn_len: 2,
            warmup_packets: 2048,
            repetitions: 5,
            direction: Direction::Seal,
            batch_bytes: DEFAULT_BATCH_BYTES,
            seed: 0x5eed,
        }
    }
}

impl BenchConfig {
    pub fn new(suite: SuiteId, hp_alg: HpAlg) -> Self {
        Self {
            suite,
            hp_alg,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let capacity = crate::packet::payload_capacity(self.mtu, SHORT_HEADER_LEN, self.pn_len)?;
        if self.repetitions == 0 {
            return Err(Error::InvalidConfig(
                "repetitions must be at least 1".into(),
            ));
        }
        if !(1..=4).contains(&self.pn_len) {
            return Err(Error::InvalidConfig("pn_len must be 1..=4".into()));
        }
        if self.total_bytes < capacity as u64 {
            return Err(Error::InvalidConfig(format!(
                "total_bytes {} is less than one packet ({capacity} bytes)",
                self.total_bytes
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RepSample {
    pub rep: usize,
    pub goodput_bps: f64,
    pub wall_ns: u64,
    pub framing_ns: u64,
    pub pp_ns: u64,
    pub hp_ns: u64,
    pub packets: u64,
}

impl RepSample {
    pub fn pipeline_ns(&self) -> u64 {
        self.framing_ns + self.pp_ns + self.hp_ns
    }
}

/// Aggregated result of one configuration. Stage times and goodput are
/// medians over repetitions; the `_mean` fields carry the means.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchReport {
    pub suite: SuiteId,
    pub hp_alg: HpAlg,
    pub mtu: usize,
    pub direction: Direction,
    pub payload_bytes: u64,
    pub packets: u64,
    pub goodput_bps: f64,
    pub goodput_mean_bps: f64,
    pub framing_ns: u64,
    pub pp_ns: u64,
    pub hp_ns: u64,
    pub pp_share: f64,
    pub hp_share: f64,
    pub reps: Vec<RepSample>,
}

impl BenchReport {
    pub fn pp_time(&self) -> Duration {
        Duration::from_nanos(self.pp_ns)
    }

    pub fn hp_time(&self) -> Duration {
        Duration::from_nanos(self.hp_ns)
    }

    pub fn framing_time(&self) -> Duration {
        Duration::from_nanos(self.framing_ns)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CostShares {
    pub pp_share: f64,
    pub hp_share: f64,
}

/// Stage shares of the total pipeline time, summed over repetitions.
pub fn attribute_cost(report: &BenchReport) -> CostShares {
    let (pp, hp, total) = report.reps.iter().fold((0u64, 0u64, 0u64), |acc, r| {
        (acc.0 + r.pp_ns, acc.1 + r.hp_ns, acc.2 + r.pipeline_ns())
    });
    if total == 0 {
        return CostShares {
            pp_share: 0.0,
            hp_share: 0.0,
        };
    }
    CostShares {
        pp_share: pp as f64 / total as f64,
        hp_share: hp as f64 / total as f64,
    }
}

#[derive(Default, Clone, Copy)]
struct StageTimes {
    framing: Duration,
    pp: Duration,
    hp: Duration,
}

/// Working set for one packet size: a ring of packet buffers and, for the
/// receive direction, the sealed images they are restored from.
struct Lane {
    payload_len: usize,
    bufs: Vec<Vec<u8>>,
    sealed: Vec<Vec<u8>>,
}

struct Pipeline {
    prot: Protection,
    pn_len: usize,
    direction: Direction,
    pattern: Vec<u8>,
    next_pn: u64,
    pattern_pos: usize,
}

impl Pipeline {
    fn header_byte(&self) -> u8 {
        0x40 | (self.pn_len as u8 - 1)
    }

    fn lane(&mut self, payload_len: usize, slots: usize) -> Lane {
        // QUIC pads tiny packets so the header protection sample exists
        let padded = payload_len.max(4usize.saturating_sub(self.pn_len));
        let packet_len = SHORT_HEADER_LEN + self.pn_len + padded + TAG_LEN;
        let mut lane = Lane {
            payload_len,
            bufs: vec![vec![0u8; packet_len]; slots],
            sealed: Vec::new(),
        };
        if self.direction == Direction::Open {
            for i in 0..slots {
                self.frame(&mut lane.bufs[i], payload_len, i as u64);
                self.prot.protect_payload(
                    &mut lane.bufs[i],
                    SHORT_HEADER_LEN,
                    self.pn_len,
                    i as u64,
                );
                self.prot
                    .protect_header(&mut lane.bufs[i], SHORT_HEADER_LEN, self.pn_len);
            }
            lane.sealed = lane.bufs.clone();
        }
        lane
    }

    fn frame(&mut self, buf: &mut [u8], payload_len: usize, pn: u64) {
        buf[0] = self.header_byte();
        buf[1..SHORT_HEADER_LEN].copy_from_slice(&BENCH_DCID);
        let pn_bytes = pn.to_be_bytes();
        buf[SHORT_HEADER_LEN..SHORT_HEADER_LEN + self.pn_len]
            .copy_from_slice(&pn_bytes[8 - self.pn_len..]);
        let start = SHORT_HEADER_LEN + self.pn_len;
        let half = self.pattern.len() / 2;
        let src = &self.pattern[self.pattern_pos..self.pattern_pos + payload_len];
        buf[start..start + payload_len].copy_from_slice(src);
        let end = buf.len() - TAG_LEN;
        buf[start + payload_len..end].fill(0);
        self.pattern_pos = (self.pattern_pos + payload_len) % half;
    }

    /// Pushes `count` packets of one lane through the pipeline.
    fn run_lane(&mut self, lane: &mut Lane, count: u64, times: &mut StageTimes) {
        let pn_len = self.pn_len;
        // with HP off the stage does not exist, so it is not timed either
        let hp_on = self.prot.hp_alg().is_enabled();
        let mut remaining = count;
        while remaining > 0 {
            let n = remaining.min(lane.bufs.len() as u64) as usize;
            remaining -= n as u64;
            let first_pn = self.next_pn;
            self.next_pn += n as u64;

            let t0 = Instant::now();
            if self.direction == Direction::Open {
                for (buf, sealed) in lane.bufs[..n].iter_mut().zip(&lane.sealed) {
                    buf.copy_from_slice(sealed);
                }
            } else {
                for (i, buf) in lane.bufs[..n].iter_mut().enumerate() {
                    self.frame(buf, lane.payload_len, first_pn + i as u64);
                }
            }
            let t1 = Instant::now();
            times.framing += t1 - t0;

            if self.direction != Direction::Open {
                for (i, buf) in lane.bufs[..n].iter_mut().enumerate() {
                    self.prot
                        .protect_payload(buf, SHORT_HEADER_LEN, pn_len, first_pn + i as u64);
                }
                let t2 = Instant::now();
                times.pp += t2 - t1;
                if hp_on {
                    for buf in &mut lane.bufs[..n] {
                        self.prot.protect_header(buf, SHORT_HEADER_LEN, pn_len);
                    }
                    times.hp += t2.elapsed();
                }
            }
            if self.direction != Direction::Seal {
                // sealed images in the open direction carry pns 0..n
                let base = if self.direction == Direction::Open {
                    0
                } else {
                    first_pn
                };
                let t3 = Instant::now();
                if hp_on {
                    for buf in &mut lane.bufs[..n] {
                        self.prot
                            .unprotect_header(buf, SHORT_HEADER_LEN)
                            .expect("bench packets carry a full sample");
                    }
                }
                let t4 = Instant::now();
                for (i, buf) in lane.bufs[..n].iter_mut().enumerate() {
                    self.prot
                        .unprotect_payload(buf, SHORT_HEADER_LEN, pn_len, base + i as u64)
                        .expect("bench packets authenticate");
                }
                let t5 = Instant::now();
                if hp_on {
                    times.hp += t4 - t3;
                }
                times.pp += t5 - t4;
            }
        }
    }
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        (values[n / 2 - 1] + values[n / 2]) / 2.0
    }
}

fn median_u64(values: impl Iterator<Item = u64>) -> u64 {
    let mut v: Vec<f64> = values.map(|x| x as f64).collect();
    median(&mut v).round() as u64
}

/// Seals (and/or opens, per `cfg.direction`) a `total_bytes` stream
/// `repetitions` times and reports goodput and per-stage time.
pub fn run_throughput(cfg: &BenchConfig) -> Result<BenchReport> {
    cfg.validate()?;
    let plan = plan_packets(cfg.total_bytes, cfg.mtu, SHORT_HEADER_LEN, cfg.pn_len)?;
    let keys = derive_packet_keys_from(&BENCH_SECRET, cfg.suite, cfg.hp_alg)?;

    let mut pattern = vec![0u8; 2 * plan.capacity];
    ChaCha8Rng::seed_from_u64(cfg.seed).fill_bytes(&mut pattern);
    let mut pipe = Pipeline {
        prot: Protection::new(&keys, cfg.suite, cfg.hp_alg)?,
        pn_len: cfg.pn_len,
        direction: cfg.direction,
        pattern,
        next_pn: 0,
        pattern_pos: 0,
    };
    let slots = (cfg.batch_bytes / cfg.mtu).clamp(1, plan.full_packets.max(1) as usize);
    let mut full = pipe.lane(plan.capacity, slots);
    let mut tail = (plan.last > 0).then(|| pipe.lane(plan.last, 1));

    let mut scratch = StageTimes::default();
    pipe.run_lane(&mut full, cfg.warmup_packets, &mut scratch);

    let mut reps = Vec::with_capacity(cfg.repetitions);
    for rep in 0..cfg.repetitions {
        // packet numbers restart each repetition, mirroring a fresh connection
        pipe.next_pn = 0;
        let mut times = StageTimes::default();
        let start = Instant::now();
        pipe.run_lane(&mut full, plan.full_packets, &mut times);
        if let Some(tail) = tail.as_mut() {
            pipe.run_lane(tail, 1, &mut times);
        }
        let wall = start.elapsed();
        let wall_ns = (wall.as_nanos() as u64).max(1);
        reps.push(RepSample {
            rep,
            goodput_bps: cfg.total_bytes as f64 / (wall_ns as f64 / 1e9),
            wall_ns,
            framing_ns: times.framing.as_nanos() as u64,
            pp_ns: times.pp.as_nanos() as u64,
            hp_ns: times.hp.as_nanos() as u64,
            packets: plan.count(),
        });
    }

    let mut goodputs: Vec<f64> = reps.iter().map(|r| r.goodput_bps).collect();
    let goodput_mean_bps = goodputs.iter().sum::<f64>() / goodputs.len() as f64;
    let mut report = BenchReport {
        suite: cfg.suite,
        hp_alg: cfg.hp_alg,
        mtu: cfg.mtu,
        direction: cfg.direction,
        payload_bytes: plan.total_len(),
        packets: plan.count(),
        goodput_bps: median(&mut goodputs),
        goodput_mean_bps,
        framing_ns: median_u64(reps.iter().map(|r| r.framing_ns)),
        pp_ns: median_u64(reps.iter().map(|r| r.pp_ns)),
        hp_ns: median_u64(reps.iter().map(|r| r.hp_ns)),
        pp_share: 0.0,
        hp_share: 0.0,
        reps,
    };
    let shares = attribute_cost(&report);
    report.pp_share = shares.pp_share;
    report.hp_share = shares.hp_share;
    Ok(report)
}

/// One report per MTU over the same stream. Every MTU is checked before any
/// run starts.
pub fn mtu_sweep(cfg: &BenchConfig, mtus: &[usize]) -> Result<Vec<BenchReport>> {
    let cfgs: Vec<BenchConfig> = mtus
        .iter()
        .map(|&mtu| BenchConfig { mtu, ..cfg.clone() })
        .collect();
    for c in &cfgs {
        c.validate()?;
    }
    cfgs.iter().map(run_throughput).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(suite: SuiteId, hp_alg: HpAlg) -> BenchConfig {
        BenchConfig {
            total_bytes: 64 * 1024,
            repetitions: 2,
            warmup_packets: 4,
            ..BenchConfig::new(suite, hp_alg)
        }
    }

    #[test]
    fn one_packet_stream() {
        let cap = crate::packet::payload_capacity(1500, SHORT_HEADER_LEN, 2).unwrap() as u64;
        let cfg = BenchConfig {
            total_bytes: cap,
            ..small(SuiteId::Aes128Gcm, HpAlg::AesEcb)
        };
        let r = run_throughput(&cfg).unwrap();
        assert_eq!(r.packets, 1);
        assert!(r.goodput_bps > 0.0);
    }

    #[test]
    fn packets_follow_packetize() {
        for dir in [Direction::Seal, Direction::Open, Direction::Both] {
            let cfg = BenchConfig {
                total_bytes: 100_001,
                direction: dir,
                ..small(SuiteId::ChaCha20Poly1305, HpAlg::ChaCha20Raw)
            };
            let r = run_throughput(&cfg).unwrap();
            let sizes = crate::packet::packetize(100_001, 1500, SHORT_HEADER_LEN, 2).unwrap();
            assert_eq!(r.packets, sizes.len() as u64);
            assert_eq!(r.payload_bytes, 100_001);
            assert!(r.reps.iter().all(|s| s.packets == r.packets));
        }
    }

    #[test]
    fn tiny_tail_is_padded_for_sample() {
        let cap = crate::packet::payload_capacity(1500, SHORT_HEADER_LEN, 1).unwrap() as u64;
        let cfg = BenchConfig {
            total_bytes: cap + 1,
            pn_len: 1,
            direction: Direction::Both,
            ..small(SuiteId::Aes256Gcm, HpAlg::AesEcb)
        };
        assert_eq!(run_throughput(&cfg).unwrap().packets, 2);
    }

    #[test]
    fn off_has_no_hp_share() {
        let r = run_throughput(&small(SuiteId::Noop, HpAlg::Off)).unwrap();
        assert_eq!(r.hp_ns, 0);
        assert_eq!(attribute_cost(&r).hp_share, 0.0);
    }

    #[test]
    fn shares_bounded() {
        for suite in SuiteId::ALL {
            for hp in HpAlg::ALL {
                let r = run_throughput(&small(suite, hp)).unwrap();
                let s = attribute_cost(&r);
                assert!(s.pp_share >= 0.0 && s.hp_share >= 0.0);
                assert!(s.pp_share + s.hp_share <= 1.0 + 1e-12);
            }
        }
    }

    #[test]
    fn config_errors() {
        let base = small(SuiteId::Aes128Gcm, HpAlg::AesEcb);
        let bad_mtu = BenchConfig {
            mtu: 50,
            ..base.clone()
        };
        assert!(matches!(
            run_throughput(&bad_mtu),
            Err(Error::MtuTooSmall { .. })
        ));
        let no_reps = BenchConfig {
            repetitions: 0,
            ..base.clone()
        };
        assert!(run_throughput(&no_reps).is_err());
        let tiny = BenchConfig {
            total_bytes: 10,
            ..base.clone()
        };
        assert!(run_throughput(&tiny).is_err());
        assert!(mtu_sweep(&base, &[1500, 50]).is_err());
    }

    #[test]
    fn goodput_is_bytes_over_wall_time() {
        let r = run_throughput(&small(SuiteId::Aes128Gcm, HpAlg::ChaCha20Raw)).unwrap();
        for s in &r.reps {
            let expect = r.payload_bytes as f64 * 1e9 / s.wall_ns as f64;
            assert!((s.goodput_bps - expect).abs() / expect < 1e-9);
            assert!(s.pipeline_ns() <= s.wall_ns);
        }
    }

    #[test]
    fn direction_names() {
        for d in [Direction::Seal, Direction::Open, Direction::Both] {
            assert_eq!(d.name().parse::<Direction>().unwrap(), d);
        }
        assert!("sideways".parse::<Direction>().is_err());
    }
}
