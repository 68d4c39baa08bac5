//! Scenario orchestration on `f64`: presets, Monte Carlo delay averaging,
//! parameter sweeps, relay placement search and CSV/JSON output.
//!
//! Realization `k` of every Monte Carlo run draws from its own stream
//! seeded by `(seed, k)`, always in the same order, so results do not depend
//! on thread scheduling and neighbouring grid points share their fading
//! draws.

use std::fs;
use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{
    average_snr, interference_power, sample_rician, sample_shadowing, AverageSnrMode, ClosedFormReport, Emission,
    LinkBudget, LinkGeometry,
};
use crate::error::{Error, Result};
use crate::infotheory::{capacity_upper_bound, min_delay, min_power};
use crate::relaylink::{af_cascade, dualhop_sinr, first_hop_ratio, RELAYED_SLOTS};
use crate::scalar::{db_to_lin, dbm_to_watts, lin_to_db, watts_to_dbm};
use crate::seeding;
use crate::specfun::golden_section_min;
use crate::{Budget, CapacitySpec, Channel, Position, Relay, Reliability};

/// Noise power standing in for "no noise" in the interference-limited
/// regime.
pub const NOISE_FLOOR_W: f64 = 1e-30;

/// Coarse grid size used by [`optimize_relay`].
pub const RELAY_GRID_POINTS: usize = 41;

/// Relay positions indexed 1..=5 in the placement study.
pub const RELAY_INDEX_SET: [(f64, f64, f64); 5] =
    [(0.0, -50.0, 50.0), (0.0, 0.0, 50.0), (0.0, 50.0, 50.0), (0.0, 100.0, 50.0), (0.0, 150.0, 50.0)];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Interferer {
    pub position: Position,
    pub power_dbm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Nodes {
    pub bs: Position,
    pub receiver: Position,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relay: Option<Relay>,
    #[serde(default)]
    pub interferers: Vec<Interferer>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelRegime {
    InterferenceLimited,
    #[default]
    NoisePlusInterference,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub tx_power_dbm: f64,
    pub channel_regime: ChannelRegime,
    /// Pins the direct link's average SNR by choosing the noise power.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target_avg_snr_db: Option<f64>,
    pub seed: u64,
    pub realizations: u32,
    /// Realizations needing more symbols than this count as outages.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_delay_symbols: Option<f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            tx_power_dbm: 30.0,
            channel_regime: ChannelRegime::NoisePlusInterference,
            target_avg_snr_db: None,
            seed: 42,
            realizations: 1000,
            max_delay_symbols: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub nodes: Nodes,
    #[serde(default)]
    pub channel: Channel,
    #[serde(default)]
    pub reliability: Reliability,
    #[serde(default)]
    pub capacity: CapacitySpec,
    #[serde(default)]
    pub run: RunConfig,
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self> {
        let s: Scenario = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        s.validate()?;
        Ok(s)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read scenario {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn validate(&self) -> Result<()> {
        let n = &self.nodes;
        n.bs.validate()?;
        n.receiver.validate()?;
        if n.bs == n.receiver {
            return Err(Error::invalid("base station and receiver coincide"));
        }
        for i in &n.interferers {
            i.position.validate()?;
            if !i.power_dbm.is_finite() {
                return Err(Error::invalid("interferer power_dbm must be finite"));
            }
        }
        if let Some(r) = &n.relay {
            r.validate()?;
        }
        self.channel.validate()?;
        self.reliability.validate()?;
        self.capacity.validate()?;
        let run = &self.run;
        if run.realizations == 0 {
            return Err(Error::invalid("realizations must be at least 1"));
        }
        if !run.tx_power_dbm.is_finite() {
            return Err(Error::invalid("tx_power_dbm must be finite"));
        }
        if matches!(run.target_avg_snr_db, Some(t) if !t.is_finite()) {
            return Err(Error::invalid("target_avg_snr_db must be finite"));
        }
        if matches!(run.max_delay_symbols, Some(d) if !(d > 0.0)) {
            return Err(Error::invalid("max_delay_symbols must be positive"));
        }
        if run.channel_regime == ChannelRegime::InterferenceLimited && n.interferers.is_empty() {
            return Err(Error::invalid("the interference-limited regime needs at least one interferer"));
        }
        Ok(())
    }

    /// Noise power at every receiver front end.
    pub fn noise_power_w(&self) -> Result<f64> {
        match (self.run.channel_regime, self.run.target_avg_snr_db) {
            (ChannelRegime::InterferenceLimited, _) => Ok(NOISE_FLOOR_W),
            (ChannelRegime::NoisePlusInterference, None) => Ok(self.channel.noise_power_w()),
            (ChannelRegime::NoisePlusInterference, Some(db)) => {
                let direct = self.channel.link(&self.nodes.bs, &self.nodes.receiver)?;
                Ok(dbm_to_watts(self.run.tx_power_dbm) * direct.path_gain() / db_to_lin(db))
            }
        }
    }

    pub fn with_receiver_height(&self, z: f64) -> Self {
        let mut s = self.clone();
        s.nodes.receiver.z = z;
        s
    }

    pub fn with_relay_position(&self, p: Position) -> Self {
        let mut s = self.clone();
        if let Some(r) = s.nodes.relay.as_mut() {
            r.position = p;
        }
        s
    }

    fn require_relay(&self) -> Result<&Relay> {
        self.nodes.relay.as_ref().ok_or_else(|| Error::Config("this study needs a relay in nodes.relay".into()))
    }
}

/// The three receiver placements: above the base station, midway, above
/// the interferer.
pub fn preset_case(case_id: u8, height: f64) -> Result<Scenario> {
    let y = match case_id {
        1 => 0.0,
        2 => 250.0,
        3 => 500.0,
        other => return Err(Error::UnknownCase(other)),
    };
    if !(height > 0.0 && height.is_finite()) {
        return Err(Error::invalid(format!("receiver height must be positive, got {height}")));
    }
    let s = Scenario {
        nodes: Nodes {
            bs: Position::ground(0.0, 0.0),
            receiver: Position::new(0.0, y, height),
            relay: None,
            interferers: vec![Interferer { position: Position::ground(0.0, 500.0), power_dbm: 30.0 }],
        },
        channel: Channel::default(),
        reliability: Reliability::default(),
        capacity: CapacitySpec::default(),
        run: RunConfig::default(),
    };
    s.validate()?;
    Ok(s)
}

/// Case II with an AF relay at relay index 3, the receiver's average SNR
/// pinned at −2 dB and relay noise enabled.
pub fn preset_relay_scenario(height: f64) -> Result<Scenario> {
    let mut s = preset_case(2, height)?;
    let (x, y, z) = RELAY_INDEX_SET[2];
    s.nodes.relay = Some(Relay::new(Position::new(x, y, z)));
    s.run.target_avg_snr_db = Some(-2.0);
    s.validate()?;
    Ok(s)
}

struct RelayPath {
    cfg: Relay,
    hop1: LinkGeometry<f64>,
    /// `None` when the relay sits on the receiver.
    hop2: Option<LinkGeometry<f64>>,
    at_relay: Vec<(LinkGeometry<f64>, f64)>,
    p_n: f64,
}

/// Geometry and powers resolved once per scenario.
struct Prepared {
    p_tx: f64,
    noise_w: f64,
    direct: LinkGeometry<f64>,
    at_rx: Vec<(LinkGeometry<f64>, f64)>,
    relay: Option<RelayPath>,
    channel: Channel,
}

#[derive(Debug, Clone, Copy)]
struct Draw {
    sinr: f64,
    signal_w: f64,
}

impl Prepared {
    fn new(s: &Scenario) -> Result<Self> {
        s.validate()?;
        let ch = &s.channel;
        let p_tx = dbm_to_watts(s.run.tx_power_dbm);
        let rx = &s.nodes.receiver;
        let at = |target: &Position| -> Result<Vec<(LinkGeometry<f64>, f64)>> {
            s.nodes.interferers.iter().map(|i| Ok((ch.link(&i.position, target)?, dbm_to_watts(i.power_dbm)))).collect()
        };
        let relay = match &s.nodes.relay {
            None => None,
            Some(cfg) => Some(RelayPath {
                cfg: *cfg,
                hop1: ch.link(&s.nodes.bs, &cfg.position)?,
                hop2: if cfg.position == *rx { None } else { Some(ch.link(&cfg.position, rx)?) },
                at_relay: if cfg.interference_at_relay { at(&cfg.position)? } else { Vec::new() },
                p_n: cfg.relay_power_w(p_tx),
            }),
        };
        Ok(Self {
            p_tx,
            noise_w: s.noise_power_w()?,
            direct: ch.link(&s.nodes.bs, rx)?,
            at_rx: at(rx)?,
            relay,
            channel: ch.clone(),
        })
    }

    fn slots(&self) -> u32 {
        if self.relay.is_some() {
            RELAYED_SLOTS
        } else {
            1
        }
    }

    // Power gain `h²·shadowing` of one link.
    fn fade<R: rand::Rng>(&self, link: &LinkGeometry<f64>, rng: &mut R) -> f64 {
        let h = sample_rician(&link.rician, rng);
        h * h * sample_shadowing(link, &self.channel, rng)
    }

    fn interference<R: rand::Rng>(&self, sources: &[(LinkGeometry<f64>, f64)], rng: &mut R) -> (f64, Vec<f64>) {
        let emissions: Vec<Emission<f64>> = sources
            .iter()
            .map(|(link, p)| {
                let fade = self.fade(link, rng);
                let phase = rng.random::<f64>() * std::f64::consts::TAU;
                Emission { power_w: *p, path_gain: link.path_gain(), fading: fade.sqrt(), phase }
            })
            .collect();
        let each = emissions.iter().map(Emission::received_power).collect();
        (interference_power(&emissions, self.channel.interference_sum), each)
    }

    fn draw(&self, seed: u64, k: u64) -> (Draw, Vec<f64>) {
        let mut rng = seeding::stream(seed, k);
        let direct_fade = self.fade(&self.direct, &mut rng);
        let (i_rx, each) = self.interference(&self.at_rx, &mut rng);
        let direct = LinkBudget::evaluate(&self.direct, self.p_tx, direct_fade.sqrt(), self.noise_w, i_rx);
        let Some(path) = &self.relay else {
            return (Draw { sinr: direct.sinr, signal_w: direct.signal_w }, each);
        };
        let f1 = self.fade(&path.hop1, &mut rng);
        let f2 = path.hop2.as_ref().map(|l| self.fade(l, &mut rng)).unwrap_or(1.0);
        let (i_relay, _) = self.interference(&path.at_relay, &mut rng);
        let relay_noise = if path.cfg.noise_at_relay { self.noise_w } else { 0.0 };
        let hop1 = LinkBudget::evaluate(&path.hop1, self.p_tx, f1.sqrt(), relay_noise, i_relay);
        let sinr = match &path.hop2 {
            Some(l) => {
                let hop2 = LinkBudget::evaluate(l, path.p_n, f2.sqrt(), self.noise_w, i_rx);
                dualhop_sinr(&hop1, &hop2, i_rx, &path.cfg)
            }
            None => af_cascade(first_hop_ratio(&hop1, &path.cfg), f64::INFINITY),
        };
        (Draw { sinr, signal_w: direct.signal_w }, each)
    }

    /// Mean interference power at the receiver.
    fn mean_interference(&self) -> f64 {
        self.at_rx.iter().map(|(l, p)| p * l.path_gain()).sum()
    }

    /// SINR with every fading gain at its mean.
    fn mean_sinr(&self) -> f64 {
        let i_rx = self.mean_interference();
        let direct = self.p_tx * self.direct.path_gain() / (i_rx + self.noise_w);
        let Some(path) = &self.relay else { return direct };
        let i_relay: f64 = path.at_relay.iter().map(|(l, p)| p * l.path_gain()).sum();
        let relay_noise = if path.cfg.noise_at_relay { self.noise_w } else { 0.0 };
        let s1 = self.p_tx * path.hop1.path_gain();
        let l1 = if i_relay + relay_noise > 0.0 { s1 / (i_relay + relay_noise) } else { f64::INFINITY };
        let l2 = match &path.hop2 {
            Some(l) => path.p_n * l.path_gain() / (i_rx + self.noise_w),
            None => f64::INFINITY,
        };
        af_cascade(l1, l2)
    }

    /// Mean-power SIR at the receiver from whichever node transmits to it.
    fn mean_sir(&self) -> f64 {
        let intended = match &self.relay {
            Some(RelayPath { hop2: Some(l), p_n, .. }) => p_n * l.path_gain(),
            Some(RelayPath { hop2: None, .. }) => f64::INFINITY,
            None => self.p_tx * self.direct.path_gain(),
        };
        let i = self.mean_interference();
        if i > 0.0 {
            intended / i
        } else {
            f64::INFINITY
        }
    }
}

/// Monte Carlo summary of the minimum delay.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DelayEstimate {
    /// Mean over non-outage realizations, in symbols.
    pub mean: f64,
    pub std_error: f64,
    pub outage_frac: f64,
    pub realizations: u32,
    pub finite: u32,
    /// Mean end-to-end SINR over all realizations.
    pub mean_sinr: f64,
    pub rho_used: f64,
    pub slots: u32,
}

pub fn monte_carlo_delay(s: &Scenario) -> Result<DelayEstimate> {
    let prep = Prepared::new(s)?;
    let n = s.run.realizations;
    let limit = s.run.max_delay_symbols.unwrap_or(f64::INFINITY);
    let draws: Vec<(f64, f64, f64)> = (0..n as u64)
        .into_par_iter()
        .map(|k| {
            let (d, _) = prep.draw(s.run.seed, k);
            let bound = min_delay(&s.reliability, d.sinr);
            (bound.d_c_min, bound.rho_used, d.sinr)
        })
        .collect();
    let mut finite = 0u32;
    let (mut sum, mut sum_sq, mut sinr_sum) = (0.0, 0.0, 0.0);
    let mut rho_used = s.reliability.rho;
    for &(d, rho, sinr) in &draws {
        sinr_sum += sinr;
        if d.is_finite() && d <= limit {
            finite += 1;
            sum += d;
            sum_sq += d * d;
            rho_used = rho;
        }
    }
    if finite == 0 {
        return Err(Error::AllOutage);
    }
    let m = finite as f64;
    let mean = sum / m;
    let var = if finite > 1 { ((sum_sq - m * mean * mean) / (m - 1.0)).max(0.0) } else { 0.0 };
    Ok(DelayEstimate {
        mean,
        std_error: (var / m).sqrt(),
        outage_frac: (n - finite) as f64 / n as f64,
        realizations: n,
        finite,
        mean_sinr: sinr_sum / n as f64,
        rho_used,
        slots: prep.slots(),
    })
}

/// Monte Carlo mean of the capacity upper bound of the direct link.
pub fn monte_carlo_capacity(s: &Scenario) -> Result<f64> {
    let prep = Prepared::new(s)?;
    let n = s.run.realizations;
    let values: Vec<Result<f64>> = (0..n as u64)
        .into_par_iter()
        .map(|k| {
            let (d, each) = prep.draw(s.run.seed, k);
            capacity_upper_bound(d.signal_w, &each, prep.noise_w, &s.capacity)
        })
        .collect();
    let mut sum = 0.0;
    for v in values {
        sum += v?;
    }
    Ok(sum / n as f64)
}

/// Mean-power SIR at the receiver in dB.
pub fn analytic_sir_db(s: &Scenario) -> Result<f64> {
    Ok(lin_to_db(Prepared::new(s)?.mean_sir()))
}

/// SINR at the receiver with all fading gains at their mean, in dB.
pub fn analytic_sinr_db(s: &Scenario) -> Result<f64> {
    Ok(lin_to_db(Prepared::new(s)?.mean_sinr()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HeightMetric {
    #[default]
    Delay,
    Sir,
    Capacity,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct RowMeta {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub realizations: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub finite: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slots: Option<u32>,
    /// Change in delay from the previous grid point.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delay_first_difference: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub closed_form: Option<ClosedFormReport<f64>>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct SweepRow {
    /// Curve label for two-parameter studies.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub series: Option<String>,
    pub swept_value: f64,
    pub delay_symbols: Option<f64>,
    pub delay_seconds: Option<f64>,
    pub delay_stderr: Option<f64>,
    pub outage_frac: Option<f64>,
    pub sinr_db: Option<f64>,
    pub sir_db: Option<f64>,
    pub p_min_dbm: Option<f64>,
    pub rho_used: Option<f64>,
    pub capacity_nats: Option<f64>,
    pub meta: RowMeta,
}

impl SweepRow {
    fn from_estimate(x: f64, e: &DelayEstimate, bandwidth_hz: f64, sir_db: f64) -> Self {
        SweepRow {
            swept_value: x,
            delay_symbols: Some(e.mean),
            delay_seconds: Some(e.mean * e.slots as f64 / bandwidth_hz),
            delay_stderr: Some(e.std_error),
            outage_frac: Some(e.outage_frac),
            sinr_db: Some(lin_to_db(e.mean_sinr)),
            sir_db: Some(sir_db),
            rho_used: Some(e.rho_used),
            meta: RowMeta {
                realizations: Some(e.realizations),
                finite: Some(e.finite),
                slots: Some(e.slots),
                ..RowMeta::default()
            },
            ..SweepRow::default()
        }
    }
}

pub const CSV_COLUMNS: [&str; 10] = [
    "swept_value",
    "delay_symbols",
    "delay_seconds",
    "delay_stderr",
    "outage_frac",
    "sinr_db",
    "sir_db",
    "p_min_dbm",
    "rho_used",
    "capacity_nats",
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub swept_name: String,
    pub rows: Vec<SweepRow>,
}

fn cell(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

impl SweepResult {
    fn is_surface(&self) -> bool {
        self.rows.iter().any(|r| r.series.is_some())
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let surface = self.is_surface();
        let mut header: Vec<&str> = Vec::with_capacity(CSV_COLUMNS.len() + 1);
        if surface {
            header.push("series");
        }
        header.extend(CSV_COLUMNS);
        out.write_record(&header)?;
        for r in &self.rows {
            let mut rec = Vec::with_capacity(header.len());
            if surface {
                rec.push(r.series.clone().unwrap_or_default());
            }
            rec.push(r.swept_value.to_string());
            for v in [
                r.delay_symbols,
                r.delay_seconds,
                r.delay_stderr,
                r.outage_frac,
                r.sinr_db,
                r.sir_db,
                r.p_min_dbm,
                r.rho_used,
                r.capacity_nats,
            ] {
                rec.push(cell(v));
            }
            out.write_record(&rec)?;
        }
        out.flush()?;
        Ok(())
    }

    /// JSON array of row objects; `NaN`/`∞` become `null`.
    pub fn write_json<W: Write>(&self, mut w: W) -> Result<()> {
        serde_json::to_writer_pretty(&mut w, &self.rows)?;
        writeln!(w)?;
        Ok(())
    }

    pub fn column(&self, f: impl Fn(&SweepRow) -> Option<f64>) -> Vec<f64> {
        self.rows.iter().map(|r| f(r).unwrap_or(f64::NAN)).collect()
    }
}

fn check_grid(name: &str, grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::Config(format!("{name} grid is empty")));
    }
    if grid.iter().any(|v| !v.is_finite()) || grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Config(format!("{name} grid must be finite and strictly ascending")));
    }
    Ok(())
}

pub fn sweep_height(s: &Scenario, z_grid: &[f64], metric: HeightMetric) -> Result<SweepResult> {
    check_grid("height", z_grid)?;
    if z_grid[0] <= 0.0 {
        return Err(Error::Config("receiver heights must be positive".into()));
    }
    let rows = z_grid
        .iter()
        .map(|&z| {
            let sz = s.with_receiver_height(z);
            let sir_db = analytic_sir_db(&sz)?;
            Ok(match metric {
                HeightMetric::Delay => {
                    SweepRow::from_estimate(z, &monte_carlo_delay(&sz)?, s.channel.bandwidth_hz, sir_db)
                }
                HeightMetric::Sir => SweepRow {
                    swept_value: z,
                    sir_db: Some(sir_db),
                    sinr_db: Some(analytic_sinr_db(&sz)?),
                    ..SweepRow::default()
                },
                HeightMetric::Capacity => SweepRow {
                    swept_value: z,
                    sir_db: Some(sir_db),
                    sinr_db: Some(analytic_sinr_db(&sz)?),
                    capacity_nats: Some(monte_carlo_capacity(&sz)?),
                    meta: RowMeta { realizations: Some(s.run.realizations), ..RowMeta::default() },
                    ..SweepRow::default()
                },
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepResult { swept_name: "height_m".into(), rows })
}

/// Delay against pinned average SNR, evaluated at the mean-power SINR so
/// that the curve is the closed form itself.
pub fn sweep_snr(s: &Scenario, snr_db_grid: &[f64]) -> Result<SweepResult> {
    check_grid("SNR", snr_db_grid)?;
    let mut rows: Vec<SweepRow> = Vec::with_capacity(snr_db_grid.len());
    for &db in snr_db_grid {
        let mut sp = s.clone();
        sp.run.channel_regime = ChannelRegime::NoisePlusInterference;
        sp.run.target_avg_snr_db = Some(db);
        let prep = Prepared::new(&sp)?;
        let sinr = prep.mean_sinr();
        let bound = min_delay(&sp.reliability, sinr).with_slots(prep.slots());
        let diff = rows.last().and_then(|r| r.delay_symbols).map(|prev| bound.d_c_min - prev);
        rows.push(SweepRow {
            swept_value: db,
            delay_symbols: Some(bound.d_c_min),
            delay_seconds: Some(bound.seconds(sp.channel.bandwidth_hz)),
            outage_frac: Some(if bound.is_outage() { 1.0 } else { 0.0 }),
            sinr_db: Some(lin_to_db(sinr)),
            sir_db: Some(lin_to_db(prep.mean_sir())),
            rho_used: Some(bound.rho_used),
            meta: RowMeta { slots: Some(bound.slots_factor), delay_first_difference: diff, ..RowMeta::default() },
            ..SweepRow::default()
        });
    }
    Ok(SweepResult { swept_name: "avg_snr_db".into(), rows })
}

/// Minimum direct-link transmit power against the delay budget, one curve
/// per noise-to-interference ratio. Noise is scaled against the fixed mean
/// interference power at the receiver.
pub fn power_vs_delay(s: &Scenario, d_max_grid: &[f64], nip_db_list: &[f64]) -> Result<SweepResult> {
    check_grid("delay", d_max_grid)?;
    if nip_db_list.is_empty() {
        return Err(Error::Config("NIP list is empty".into()));
    }
    let prep = Prepared::new(s)?;
    let i = prep.mean_interference();
    if !(i > 0.0) {
        return Err(Error::Config("the power curve needs at least one interferer".into()));
    }
    let mut rows = Vec::with_capacity(d_max_grid.len() * nip_db_list.len());
    for &nip in nip_db_list {
        let noise = i * db_to_lin(nip);
        for &d in d_max_grid {
            let p = min_power(&s.reliability, d, prep.direct.path_gain(), i, noise, 1.0)?;
            rows.push(SweepRow {
                series: Some(format!("nip_db={nip}")),
                swept_value: d,
                delay_symbols: Some(d),
                delay_seconds: Some(d / s.channel.bandwidth_hz),
                p_min_dbm: Some(watts_to_dbm(p)),
                rho_used: Some(s.reliability.rho),
                ..SweepRow::default()
            });
        }
    }
    Ok(SweepResult { swept_name: "d_max_symbols".into(), rows })
}

fn position_label(p: &Position) -> String {
    format!("relay=({},{},{})", p.x, p.y, p.z)
}

/// Delay surface over relay position and receiver height.
pub fn sweep_relay(s: &Scenario, relay_positions: &[Position], z_grid: &[f64]) -> Result<SweepResult> {
    s.require_relay()?;
    check_grid("height", z_grid)?;
    if relay_positions.is_empty() {
        return Err(Error::Config("no relay positions given".into()));
    }
    let mut rows = Vec::with_capacity(relay_positions.len() * z_grid.len());
    for p in relay_positions {
        let sr = s.with_relay_position(*p);
        for &z in z_grid {
            let sz = sr.with_receiver_height(z);
            let e = monte_carlo_delay(&sz)?;
            let mut row = SweepRow::from_estimate(z, &e, s.channel.bandwidth_hz, analytic_sir_db(&sz)?);
            row.series = Some(position_label(p));
            rows.push(row);
        }
    }
    Ok(SweepResult { swept_name: "height_m".into(), rows })
}

pub fn relay_index_positions() -> Vec<Position> {
    RELAY_INDEX_SET.iter().map(|&(x, y, z)| Position::new(x, y, z)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RelayOptimum {
    pub position: Position,
    pub delay: f64,
    /// `(y, mean delay)` on the coarse grid.
    pub coarse: Vec<(f64, f64)>,
    pub coarse_best: (f64, f64),
    /// Coarse-grid first differences pointing away from the minimum.
    pub violations: usize,
    pub unimodal: bool,
    pub refined: bool,
    /// Mean delay of the same scenario without the relay.
    pub direct_delay: f64,
}

/// Coarse grid then golden-section search for the relay `y` minimising the
/// mean delay at height `z_fixed`. The refinement is skipped when the grid
/// profile has more than one point on the wrong side of its minimum.
pub fn optimize_relay(s: &Scenario, y_min: f64, y_max: f64, z_fixed: f64) -> Result<RelayOptimum> {
    let x = s.require_relay()?.position.x;
    if !(y_min < y_max && z_fixed > 0.0) || !(y_min.is_finite() && y_max.is_finite() && z_fixed.is_finite()) {
        return Err(Error::Config(format!("degenerate relay search box y ∈ [{y_min}, {y_max}], z = {z_fixed}")));
    }
    let eval = |y: f64| -> Result<f64> {
        match monte_carlo_delay(&s.with_relay_position(Position::new(x, y, z_fixed))) {
            Ok(e) => Ok(e.mean),
            Err(Error::AllOutage) => Ok(f64::INFINITY),
            Err(e) => Err(e),
        }
    };
    let step = (y_max - y_min) / (RELAY_GRID_POINTS - 1) as f64;
    let coarse = (0..RELAY_GRID_POINTS)
        .map(|i| {
            let y = y_min + step * i as f64;
            Ok((y, eval(y)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let (best_idx, coarse_best) = coarse
        .iter()
        .copied()
        .enumerate()
        .fold((0, (y_min, f64::INFINITY)), |acc, (i, p)| if p.1 < acc.1 .1 { (i, p) } else { acc });
    let violations = coarse
        .windows(2)
        .enumerate()
        .filter(|(i, w)| if *i < best_idx { w[1].1 > w[0].1 } else { w[1].1 < w[0].1 })
        .count();
    let unimodal = violations <= 1;
    let mut best = coarse_best;
    let mut refined = false;
    if unimodal && coarse_best.1.is_finite() {
        let lo = coarse[best_idx.saturating_sub(1)].0;
        let hi = coarse[(best_idx + 1).min(RELAY_GRID_POINTS - 1)].0;
        let (y, d) = golden_section_min(|y| eval(y).unwrap_or(f64::INFINITY), lo, hi, step * 1e-3);
        refined = true;
        if d < best.1 {
            best = (y, d);
        }
    }
    let mut direct = s.clone();
    direct.nodes.relay = None;
    let direct_delay = monte_carlo_delay(&direct).map(|e| e.mean).unwrap_or(f64::INFINITY);
    Ok(RelayOptimum {
        position: Position::new(x, best.0, z_fixed),
        delay: best.1,
        coarse,
        coarse_best,
        violations,
        unimodal,
        refined,
        direct_delay,
    })
}

/// Single-point report: Monte Carlo delay, mean-power SIR/SINR, capacity
/// bound and, when `run.max_delay_symbols` is set, the power needed to meet
/// it on the direct link.
pub fn evaluate(s: &Scenario) -> Result<SweepResult> {
    let prep = Prepared::new(s)?;
    let e = monte_carlo_delay(s)?;
    let mut row = SweepRow::from_estimate(s.nodes.receiver.z, &e, s.channel.bandwidth_hz, lin_to_db(prep.mean_sir()));
    row.capacity_nats = Some(monte_carlo_capacity(s)?);
    if let Some(d_max) = s.run.max_delay_symbols {
        let p = min_power(&s.reliability, d_max, prep.direct.path_gain(), prep.mean_interference(), prep.noise_w, 1.0)?;
        row.p_min_dbm = Some(watts_to_dbm(p));
    }
    let snr = average_snr(prep.p_tx, &prep.direct, &s.channel, AverageSnrMode::ClosedForm)?;
    row.meta.closed_form = snr.closed_form;
    Ok(SweepResult { swept_name: "height_m".into(), rows: vec![row] })
}

/// Direct-link budget at unit fading, mostly for diagnostics.
pub fn mean_budget(s: &Scenario) -> Result<Budget> {
    let prep = Prepared::new(s)?;
    Ok(LinkBudget::evaluate(&prep.direct, prep.p_tx, 1.0, prep.noise_w, prep.mean_interference()))
}
