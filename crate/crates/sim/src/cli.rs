//! The `bmp` command line tool.

use std::io::Write as _;
use std::path::{Path, PathBuf};

use bmp_core::channel::{ebn0_db_to_sigma, BiawgnChannel};
use bmp_core::de::{density_evolution, threshold_ebn0, ChannelFamily};
use bmp_core::design::{optimize, CycleFreeTarget, OptimizeConfig, SweepConfig};
use bmp_core::exit::{exit_curve, NodeCase};
use bmp_core::graph::{find_weak_cycles, peg_construct, random_construct, validate, Node};
use bmp_core::{ChannelModel, DeConfig, DegreeDistribution, Quantizer};
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::ber::{de_vs_sim_trace, run_ber, SimConfig, SimMode};
use crate::error::{io_err, Result, SimError};
use crate::formats;

/// Levels of the fine uniform quantizer that stands in for soft decoding.
pub const SOFT_LEVELS: usize = 256;
/// Largest finite boundary of that quantizer.
pub const SOFT_MAX: f64 = 30.0;

#[derive(Debug, Parser)]
#[command(name = "bmp", version, about = "Binary message-passing decoding of LDPC codes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// EXIT curves as CSV.
    Exit(ExitArgs),
    /// Density-evolution threshold in dB.
    Threshold(ThresholdArgs),
    /// Optimize a degree distribution and write it as JSON.
    Optimize(OptimizeArgs),
    /// Best design per rate and channel as CSV.
    Sweep(SweepArgs),
    /// Build a Tanner graph by progressive edge growth and write an alist file.
    Construct(ConstructArgs),
    /// Look for weak cycles and check degrees against a distribution.
    CheckGraph(CheckGraphArgs),
    /// Monte Carlo bit and frame error rates as CSV.
    Ber(BerArgs),
    /// Density-evolution trajectory, optionally paired with simulation.
    DeTrace(DeTraceArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ChannelKind {
    Bsc,
    Bsqc,
    Soft,
}

#[derive(Debug, Args)]
pub struct ChannelArgs {
    #[arg(long, value_enum, default_value = "bsqc")]
    pub channel: ChannelKind,
    /// Inner BSQC boundary.
    #[arg(long, default_value_t = 2.34)]
    pub zeta1: f64,
    /// Quantizer JSON; overrides `--channel`.
    #[arg(long)]
    pub quantizer: Option<PathBuf>,
}

impl ChannelArgs {
    pub fn family(&self) -> Result<ChannelFamily> {
        if let Some(p) = &self.quantizer {
            return Ok(ChannelFamily::Quantized(formats::read_quantizer(p)?));
        }
        Ok(match self.channel {
            ChannelKind::Bsc => ChannelFamily::Hard,
            ChannelKind::Bsqc => ChannelFamily::Quantized(Quantizer::bsqc(self.zeta1)?),
            ChannelKind::Soft => ChannelFamily::Soft,
        })
    }

    /// The quantizer applied to simulated channel outputs.
    pub fn sim_quantizer(&self) -> Result<Quantizer> {
        Ok(match self.family()? {
            ChannelFamily::Hard => Quantizer::hard(),
            ChannelFamily::Quantized(q) => q,
            ChannelFamily::Soft => Quantizer::uniform(SOFT_LEVELS, SOFT_MAX)?,
        })
    }
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct EnsembleArgs {
    /// Regular ensemble as `dv,dc`.
    #[arg(long, value_parser = parse_pair)]
    pub regular: Option<(usize, usize)>,
    /// Degree distribution JSON.
    #[arg(long)]
    pub dist: Option<PathBuf>,
}

impl EnsembleArgs {
    pub fn load(&self) -> Result<DegreeDistribution> {
        match (&self.regular, &self.dist) {
            (Some((dv, dc)), _) => Ok(DegreeDistribution::regular(*dv, *dc)?),
            (_, Some(p)) => formats::read_distribution(p),
            _ => unreachable!("clap enforces one source"),
        }
    }
}

#[derive(Debug, Args)]
pub struct ExitArgs {
    #[arg(long)]
    pub dv: usize,
    #[arg(long)]
    pub dc: usize,
    #[command(flatten)]
    pub channel: ChannelArgs,
    /// Noise standard deviation.
    #[arg(long, conflicts_with = "ebn0")]
    pub sigma: Option<f64>,
    #[arg(long, requires = "rate")]
    pub ebn0: Option<f64>,
    #[arg(long)]
    pub rate: Option<f64>,
    #[arg(long, default_value_t = 101)]
    pub points: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ThresholdArgs {
    #[command(flatten)]
    pub ensemble: EnsembleArgs,
    #[command(flatten)]
    pub channel: ChannelArgs,
    #[arg(long, value_parser = parse_range, default_value = "-2,15")]
    pub bracket: (f64, f64),
    #[arg(long, default_value_t = 1e-3)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct OptimizeArgs {
    #[arg(long)]
    pub dc: usize,
    #[arg(long, default_value_t = 100)]
    pub dv_max: usize,
    #[command(flatten)]
    pub channel: ChannelArgs,
    /// Design Eb/N0 in dB.
    #[arg(long)]
    pub ebn0: f64,
    /// Rate used to convert `--ebn0` to a noise level.
    #[arg(long, default_value_t = 0.5)]
    pub rate: f64,
    /// Block length of the cycle-free constraint.
    #[arg(long, default_value_t = 10_000)]
    pub block_length: usize,
    #[arg(long)]
    pub no_cycle_free: bool,
    #[arg(long)]
    pub no_stability: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, value_delimiter = ',', default_value = "0.5")]
    pub rates: Vec<f64>,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "bsc,bsqc,soft")]
    pub channels: Vec<ChannelKind>,
    #[arg(long, default_value_t = 2.34)]
    pub zeta1: f64,
    /// Check degrees to try, as `lo,hi` or `lo,hi,step`.
    #[arg(long, default_value = "4,30")]
    pub dc: String,
    #[arg(long, default_value_t = 100)]
    pub dv_max: usize,
    #[arg(long, default_value_t = 10_000)]
    pub block_length: usize,
    #[arg(long)]
    pub no_cycle_free: bool,
    #[arg(long, value_parser = parse_range, default_value = "-1,12")]
    pub bracket: (f64, f64),
    #[arg(long, default_value_t = 0.01)]
    pub tol: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ConstructArgs {
    #[command(flatten)]
    pub ensemble: EnsembleArgs,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Never close a cycle among degree-2 and degree-3 variables.
    #[arg(long)]
    pub forbid_weak_cycles: bool,
    /// Random configuration-model graph instead of progressive edge growth.
    #[arg(long, conflicts_with = "forbid_weak_cycles")]
    pub random: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct CheckGraphArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Distribution to validate degrees against.
    #[arg(long)]
    pub dist: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeKind {
    Adaptive,
    Schedule,
}

#[derive(Debug, Args)]
pub struct BerArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, value_delimiter = ',', required = true)]
    pub ebn0: Vec<f64>,
    /// Code rate for the Eb/N0 conversion; defaults to `1 - M/N`.
    #[arg(long)]
    pub rate: Option<f64>,
    #[command(flatten)]
    pub channel: ChannelArgs,
    #[arg(long, value_enum, default_value = "adaptive")]
    pub mode: ModeKind,
    /// Distribution whose schedule drives `--mode schedule`.
    #[arg(long, required_if_eq("mode", "schedule"))]
    pub dist: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 100)]
    pub min_frame_errors: u64,
    #[arg(long, default_value_t = 1_000_000)]
    pub max_frames: u64,
    #[arg(long, default_value_t = 200)]
    pub max_iterations: usize,
    /// Thread count; 0 picks one per core.
    #[arg(long, default_value_t = 0)]
    pub workers: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DeTraceArgs {
    #[command(flatten)]
    pub ensemble: EnsembleArgs,
    #[command(flatten)]
    pub channel: ChannelArgs,
    #[arg(long)]
    pub ebn0: f64,
    #[arg(long, default_value_t = 2000)]
    pub max_iters: usize,
    /// Code to simulate alongside; writes the paired table instead.
    #[arg(long)]
    pub code: Option<PathBuf>,
    #[arg(long, default_value_t = 10)]
    pub iterations: usize,
    #[arg(long, default_value_t = 10)]
    pub frames: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0)]
    pub workers: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_pair(s: &str) -> std::result::Result<(usize, usize), String> {
    let (a, b) = s.split_once(',').ok_or("expected `a,b`")?;
    Ok((a.trim().parse().map_err(|e| format!("{e}"))?, b.trim().parse().map_err(|e| format!("{e}"))?))
}

fn parse_range(s: &str) -> std::result::Result<(f64, f64), String> {
    let (a, b) = s.split_once(',').ok_or("expected `lo,hi`")?;
    let lo: f64 = a.trim().parse().map_err(|e| format!("{e}"))?;
    let hi: f64 = b.trim().parse().map_err(|e| format!("{e}"))?;
    if !(lo < hi) {
        return Err("need lo < hi".into());
    }
    Ok((lo, hi))
}

fn parse_degrees(s: &str) -> Result<Vec<usize>> {
    let bad = || SimError::Format(format!("--dc: expected `lo,hi` or `lo,hi,step`, got `{s}`"));
    let v: Vec<usize> = s.split(',').map(|x| x.trim().parse().map_err(|_| bad())).collect::<Result<_>>()?;
    let (lo, hi, step) = match v.as_slice() {
        [lo, hi] => (*lo, *hi, 1),
        [lo, hi, step] if *step > 0 => (*lo, *hi, *step),
        _ => return Err(bad()),
    };
    Ok((lo..=hi).step_by(step).collect())
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => formats::write_file(p, text),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(io_err(Path::new("<stdout>"))),
    }
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Exit(a) => exit_cmd(a),
        Command::Threshold(a) => {
            let dist = a.ensemble.load()?;
            let db = threshold_ebn0(&dist, &a.channel.family()?, a.bracket, a.tol, &DeConfig::default())?;
            println!("{db:.3} dB");
            Ok(())
        }
        Command::Optimize(a) => {
            let ch = a.channel.family()?.at_ebn0(a.ebn0, a.rate)?;
            let cfg = OptimizeConfig {
                enforce_stability: !a.no_stability,
                cycle_free: (!a.no_cycle_free)
                    .then_some(CycleFreeTarget { block_length: a.block_length, rate_guess: a.rate }),
                ..OptimizeConfig::new(a.dc, a.dv_max)
            };
            let d = optimize(&ch, &cfg)?;
            eprintln!("rate {:.4}, stability margin {:.4}", d.rate, d.stability_margin);
            emit(a.out.as_deref(), &formats::distribution_json(&d.dist))
        }
        Command::Sweep(a) => {
            let families = a
                .channels
                .iter()
                .map(|&k| ChannelArgs { channel: k, zeta1: a.zeta1, quantizer: None }.family())
                .collect::<Result<Vec<_>>>()?;
            let cfg = SweepConfig {
                check_degrees: parse_degrees(&a.dc)?,
                d_v_max: a.dv_max,
                cycle_free_block_length: (!a.no_cycle_free).then_some(a.block_length),
                ebn0_bracket: a.bracket,
                ebn0_tol: a.tol,
                ..SweepConfig::default()
            };
            let rows = bmp_core::design::design_sweep(&a.rates, &families, &cfg)?;
            emit(a.out.as_deref(), &formats::sweep_csv(&rows))
        }
        Command::Construct(a) => {
            let dist = a.ensemble.load()?;
            let g = if a.random {
                random_construct(a.n, &dist, a.seed)?
            } else {
                peg_construct(a.n, &dist, a.seed, a.forbid_weak_cycles)?
            };
            formats::write_alist(&a.out, &g)
        }
        Command::CheckGraph(a) => {
            let g = formats::read_alist(&a.input)?;
            let mut ok = true;
            let report = find_weak_cycles(&g);
            match report.witness {
                Some(w) if report.found => {
                    ok = false;
                    let path: Vec<String> = w
                        .iter()
                        .map(|n| match n {
                            Node::Var(v) => format!("v{v}"),
                            Node::Check(c) => format!("c{c}"),
                        })
                        .collect();
                    println!("weak cycle: {}", path.join(" "));
                }
                _ => println!("no weak cycles"),
            }
            if let Some(p) = &a.dist {
                let v = validate(&g, &formats::read_distribution(p)?);
                for f in &v.findings {
                    println!("{f}");
                }
                if v.ok {
                    println!("degrees match");
                }
                ok &= v.ok;
            }
            if ok {
                Ok(())
            } else {
                Err(SimError::Format("graph check failed".into()))
            }
        }
        Command::Ber(a) => {
            let g = formats::read_alist(&a.input)?;
            let rate = a.rate.unwrap_or(1.0 - g.n_chk() as f64 / g.n_var() as f64);
            let mode = match a.mode {
                ModeKind::Adaptive => SimMode::Adaptive,
                ModeKind::Schedule => {
                    SimMode::Schedule(formats::read_distribution(a.dist.as_deref().expect("clap requires it"))?)
                }
            };
            let cfg = SimConfig {
                max_iterations: a.max_iterations,
                master_seed: a.seed,
                min_frame_errors: a.min_frame_errors,
                max_frames: a.max_frames,
                workers: a.workers,
                ..SimConfig::new(a.ebn0.clone(), rate, a.channel.sim_quantizer()?, mode)
            };
            emit(a.out.as_deref(), &formats::ber_csv(&run_ber(&g, &cfg)?))
        }
        Command::DeTrace(a) => {
            let dist = a.ensemble.load()?;
            match &a.code {
                Some(p) => {
                    let g = formats::read_alist(p)?;
                    let rows = de_vs_sim_trace(
                        &g,
                        &dist,
                        a.ebn0,
                        &a.channel.sim_quantizer()?,
                        a.iterations,
                        a.frames,
                        a.seed,
                        a.workers,
                    )?;
                    emit(a.out.as_deref(), &formats::trace_csv(&rows))
                }
                None => {
                    let ch = a.channel.family()?.at_ebn0(a.ebn0, dist.design_rate())?;
                    let cfg = DeConfig { max_iters: a.max_iters, ..DeConfig::default() };
                    emit(a.out.as_deref(), &formats::de_csv(&density_evolution(&dist, &ch, &cfg)?))
                }
            }
        }
    }
}

/// The check curve (transposed), the hard-decision variable curve and,
/// for other channels, the variable curve of the chosen channel.
fn exit_cmd(a: ExitArgs) -> Result<()> {
    let ch: BiawgnChannel = match (a.sigma, a.ebn0, a.rate) {
        (Some(s), _, _) => BiawgnChannel::from_sigma(s)?,
        (None, Some(db), Some(r)) => ebn0_db_to_sigma(db, r)?,
        _ => return Err(SimError::Format("exit: give --sigma or --ebn0 with --rate".into())),
    };
    let check: Vec<_> = exit_curve(&NodeCase::Check { d_c: a.dc }, a.points)?.iter().map(|p| p.swapped()).collect();
    let hard = ChannelModel::hard(ch.hard_decision_crossover())?;
    let mut curves = vec![
        ("check", check),
        ("var_bsc", exit_curve(&NodeCase::Variable { d_v: a.dv, channel: hard }, a.points)?),
    ];
    let family = a.channel.family()?;
    let name = match (&a.channel.quantizer, a.channel.channel) {
        (Some(_), _) => Some("var_quantized"),
        (None, ChannelKind::Bsc) => None,
        (None, k) => Some(if k == ChannelKind::Soft { "var_soft" } else { "var_bsqc" }),
    };
    if let Some(name) = name {
        let model = match family {
            ChannelFamily::Soft => ChannelModel::Soft(ch),
            ChannelFamily::Quantized(q) => ChannelModel::quantized(&ch, &q),
            ChannelFamily::Hard => unreachable!("handled above"),
        };
        curves.push((name, exit_curve(&NodeCase::Variable { d_v: a.dv, channel: model }, a.points)?));
    }
    emit(a.out.as_deref(), &formats::exit_csv(&curves))
}
