use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use g2u_latency::engine::{
    self, ChannelRegime, HeightMetric, RelayOptimum, Scenario, SweepResult, SweepRow, RELAY_INDEX_SET,
};
use g2u_latency::infotheory::RhoMode;
use g2u_latency::{Error, Position, Relay, Result};

#[derive(Parser)]
#[command(name = "g2u", version, about = "Reliability-constrained latency bounds for ground-to-UAV links")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Common,
}

#[derive(Args)]
struct Common {
    /// Scenario file (JSON).
    #[arg(long, global = true, conflicts_with = "case")]
    scenario: Option<PathBuf>,
    /// Preset receiver placement: 1 above the BS, 2 midway, 3 above the interferer.
    #[arg(long, global = true)]
    case: Option<u8>,
    /// Receiver height in metres.
    #[arg(long, global = true)]
    height: Option<f64>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    realizations: Option<u32>,
    #[arg(long, global = true)]
    rho: Option<f64>,
    #[arg(long, global = true, value_enum)]
    rho_mode: Option<RhoArg>,
    #[arg(long, global = true)]
    phi_e: Option<f64>,
    #[arg(long, global = true, value_enum)]
    regime: Option<RegimeArg>,
    /// Noise at the relay input (amplified with the signal).
    #[arg(long, global = true, value_enum)]
    relay_noise: Option<Switch>,
    /// Pin the direct link's average SNR in dB.
    #[arg(long, global = true, allow_hyphen_values = true)]
    snr_db: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    tx_power_dbm: Option<f64>,
    /// Output file; standard output when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Write the fully resolved scenario here.
    #[arg(long, global = true)]
    meta: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Metric against receiver height.
    SweepHeight {
        #[command(flatten)]
        heights: HeightGrid,
        #[arg(long, value_enum, default_value_t = MetricArg::Delay)]
        metric: MetricArg,
    },
    /// Delay against pinned average SNR.
    SweepSnr {
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        snr_min: f64,
        #[arg(long, default_value_t = 50.0, allow_hyphen_values = true)]
        snr_max: f64,
        #[arg(long, default_value_t = 2.5)]
        snr_step: f64,
    },
    /// Minimum transmit power against the delay budget.
    PowerCurve {
        #[arg(long, value_delimiter = ',', default_values_t = [10.0, 20.0, 40.0, 80.0, 160.0])]
        d_max: Vec<f64>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_values_t = [-20.0, -10.0, 0.0, 10.0])]
        nip_db: Vec<f64>,
    },
    /// Delay surface over the indexed relay positions and receiver height.
    SweepRelay {
        #[command(flatten)]
        heights: HeightGrid,
    },
    /// Best relay position along y at a fixed relay height.
    OptimizeRelay {
        #[arg(long, default_value_t = -50.0, allow_hyphen_values = true)]
        y_min: f64,
        #[arg(long, default_value_t = 250.0, allow_hyphen_values = true)]
        y_max: f64,
        #[arg(long, default_value_t = 50.0)]
        relay_z: f64,
    },
    /// Single-point report.
    Eval,
}

#[derive(Args)]
struct HeightGrid {
    #[arg(long, default_value_t = 50.0)]
    z_min: f64,
    #[arg(long, default_value_t = 500.0)]
    z_max: f64,
    #[arg(long, default_value_t = 50.0)]
    z_step: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum RhoArg {
    Fixed,
    Optimize,
}

#[derive(Clone, Copy, ValueEnum)]
enum RegimeArg {
    InterferenceLimited,
    NoisePlusInterference,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Switch {
    On,
    Off,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum MetricArg {
    Delay,
    Sir,
    Capacity,
}

fn grid(min: f64, max: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && min <= max && min.is_finite() && max.is_finite()) {
        return Err(Error::Config(format!("bad grid {min}..{max} step {step}")));
    }
    let n = ((max - min) / step + 1e-9).floor() as usize + 1;
    Ok((0..n).map(|i| min + step * i as f64).collect())
}

fn resolve(opts: &Common, wants_relay: bool) -> Result<Scenario> {
    let mut s = match (&opts.scenario, opts.case) {
        (Some(path), _) => {
            let mut s = Scenario::load(path)?;
            if let Some(h) = opts.height {
                s.nodes.receiver.z = h;
            }
            s
        }
        (None, Some(case)) => {
            let mut s = engine::preset_case(case, opts.height.unwrap_or(100.0))?;
            if wants_relay {
                let (x, y, z) = RELAY_INDEX_SET[2];
                s.nodes.relay = Some(Relay::new(Position::new(x, y, z)));
            }
            s
        }
        (None, None) => return Err(Error::Config("either --scenario or --case is required".into())),
    };
    let run = &mut s.run;
    if let Some(v) = opts.seed {
        run.seed = v;
    }
    if let Some(v) = opts.realizations {
        run.realizations = v;
    }
    if let Some(v) = opts.snr_db {
        run.target_avg_snr_db = Some(v);
    }
    if let Some(v) = opts.tx_power_dbm {
        run.tx_power_dbm = v;
    }
    if let Some(r) = opts.regime {
        run.channel_regime = match r {
            RegimeArg::InterferenceLimited => ChannelRegime::InterferenceLimited,
            RegimeArg::NoisePlusInterference => ChannelRegime::NoisePlusInterference,
        };
    }
    let rel = &mut s.reliability;
    if let Some(v) = opts.rho {
        rel.rho = v;
    }
    if let Some(v) = opts.phi_e {
        rel.phi_e = v;
    }
    if let Some(m) = opts.rho_mode {
        rel.rho_mode = match m {
            RhoArg::Fixed => RhoMode::Fixed,
            RhoArg::Optimize => RhoMode::Optimize,
        };
    }
    if let Some(sw) = opts.relay_noise {
        let relay = s.nodes.relay.as_mut().ok_or_else(|| Error::Config("--relay-noise needs a relay".into()))?;
        relay.noise_at_relay = sw == Switch::On;
    }
    s.validate()?;
    Ok(s)
}

fn optimum_table(opt: &RelayOptimum) -> SweepResult {
    let row = |series: &str, y: f64, d: f64| SweepRow {
        series: Some(series.to_string()),
        swept_value: y,
        delay_symbols: Some(d),
        ..SweepRow::default()
    };
    let mut rows: Vec<SweepRow> = opt.coarse.iter().map(|&(y, d)| row("coarse", y, d)).collect();
    rows.push(row("optimum", opt.position.y, opt.delay));
    SweepResult { swept_name: "relay_y_m".into(), rows }
}

fn run(cli: Cli) -> Result<()> {
    let opts = &cli.opts;
    let wants_relay = matches!(cli.command, Command::SweepRelay { .. } | Command::OptimizeRelay { .. });
    let s = resolve(opts, wants_relay)?;
    if let Some(path) = &opts.meta {
        std::fs::write(path, s.to_json()? + "\n")?;
    }
    let mut out: Box<dyn Write> = match &opts.out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    let table = match cli.command {
        Command::SweepHeight { heights, metric } => {
            let metric = match metric {
                MetricArg::Delay => HeightMetric::Delay,
                MetricArg::Sir => HeightMetric::Sir,
                MetricArg::Capacity => HeightMetric::Capacity,
            };
            engine::sweep_height(&s, &grid(heights.z_min, heights.z_max, heights.z_step)?, metric)?
        }
        Command::SweepSnr { snr_min, snr_max, snr_step } => engine::sweep_snr(&s, &grid(snr_min, snr_max, snr_step)?)?,
        Command::PowerCurve { d_max, nip_db } => engine::power_vs_delay(&s, &d_max, &nip_db)?,
        Command::SweepRelay { heights } => engine::sweep_relay(
            &s,
            &engine::relay_index_positions(),
            &grid(heights.z_min, heights.z_max, heights.z_step)?,
        )?,
        Command::OptimizeRelay { y_min, y_max, relay_z } => {
            let opt = engine::optimize_relay(&s, y_min, y_max, relay_z)?;
            if !opt.unimodal {
                eprintln!(
                    "warning: delay profile is not unimodal ({} violations); returning the grid minimum",
                    opt.violations
                );
            }
            eprintln!(
                "optimum relay y = {} m, delay = {} symbols (direct link {})",
                opt.position.y, opt.delay, opt.direct_delay
            );
            if opts.format == Format::Json {
                serde_json::to_writer_pretty(&mut out, &opt)?;
                writeln!(out)?;
                out.flush()?;
                return Ok(());
            }
            optimum_table(&opt)
        }
        Command::Eval => engine::evaluate(&s)?,
    };
    match opts.format {
        Format::Csv => table.write_csv(&mut out)?,
        Format::Json => table.write_json(&mut out)?,
    }
    out.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_config() { 2 } else { 3 })
        }
    }
}
