//! Monte Carlo bit and frame error rates over the quantized BIAWGN channel.
//!
//! Every frame transmits the all-`+1` word. Frame `f` of point `p` draws its
//! noise from a ChaCha8 stream seeded with `frame_seed(master, p, f)`, so
//! results do not depend on how frames are spread over threads.

use bmp_core::channel::{decompose, ebn0_db_to_sigma, BiawgnChannel};
use bmp_core::de::decoder_schedule;
use bmp_core::exit::var_exit_mixture;
use bmp_core::{
    ChannelModel, ChannelObservation, DecoderConfig, Decoder, DegreeDistribution, Quantizer, ReliabilityMode,
    TannerGraph,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;

use crate::error::{Result, SimError};

/// Frames decoded per parallel batch.
pub const BLOCK: u64 = 64;

/// SplitMix64 finalizer.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of frame `frame` at Eb/N0 point `point`.
pub fn frame_seed(master: u64, point: u64, frame: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(master) ^ point) ^ frame)
}

/// How the decoder obtains check-message reliabilities.
#[derive(Debug, Clone, PartialEq)]
pub enum SimMode {
    Adaptive,
    /// Density-evolution schedule of this ensemble at each point.
    Schedule(DegreeDistribution),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub ebn0_db: Vec<f64>,
    /// Code rate used to convert Eb/N0 to a noise level.
    pub rate: f64,
    pub quantizer: Quantizer,
    pub mode: SimMode,
    pub max_iterations: usize,
    pub master_seed: u64,
    pub min_frame_errors: u64,
    pub max_frames: u64,
    /// Thread count; 0 uses the rayon default.
    pub workers: usize,
}

impl SimConfig {
    pub fn new(ebn0_db: Vec<f64>, rate: f64, quantizer: Quantizer, mode: SimMode) -> Self {
        Self {
            ebn0_db,
            rate,
            quantizer,
            mode,
            max_iterations: 200,
            master_seed: 0,
            min_frame_errors: 100,
            max_frames: 1_000_000,
            workers: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BerRecord {
    pub ebn0_db: f64,
    pub frames: u64,
    pub bits: u64,
    pub bit_errors: u64,
    pub frame_errors: u64,
    pub ber: f64,
    pub fer: f64,
    pub mean_iterations: f64,
    /// The frame-error target was not reached within `max_frames`.
    pub censored: bool,
}

/// Channel observations of one all-`+1` frame.
pub fn observe(
    ch: &BiawgnChannel,
    q: &Quantizer,
    n: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<ChannelObservation> {
    let sigma = ch.sigma_n();
    let noise = Normal::new(0.0, sigma).expect("positive sigma");
    let scale = 2.0 / (sigma * sigma);
    (0..n)
        .map(|_| {
            let l = scale * (1.0 + noise.sample(rng));
            let (negative, w) = q.quantize(l);
            ChannelObservation::new(negative, w)
        })
        .collect()
}

fn pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| SimError::Format(format!("thread pool: {e}")))
}

fn point_config(
    cfg: &SimConfig,
    ch: &BiawgnChannel,
) -> DecoderConfig {
    let dec = decompose(ch, &cfg.quantizer);
    let mode = match &cfg.mode {
        SimMode::Adaptive => ReliabilityMode::Adaptive,
        SimMode::Schedule(dist) => ReliabilityMode::Schedule(decoder_schedule(
            dist,
            &ChannelModel::Quantized(dec.clone()),
            cfg.max_iterations,
        )),
    };
    DecoderConfig::new(cfg.max_iterations, mode, dec)
}

#[derive(Clone, Copy)]
struct Frame {
    bit_errors: u64,
    iterations: u64,
}

/// Runs every Eb/N0 point of `cfg` on the code `g`.
pub fn run_ber(g: &TannerGraph, cfg: &SimConfig) -> Result<Vec<BerRecord>> {
    if cfg.max_iterations == 0 || cfg.max_frames == 0 {
        return Err(SimError::Format("max_iterations and max_frames must be positive".into()));
    }
    let pool = pool(cfg.workers)?;
    let n = g.n_var();
    let mut out = Vec::with_capacity(cfg.ebn0_db.len());
    for (p, &db) in cfg.ebn0_db.iter().enumerate() {
        let ch = ebn0_db_to_sigma(db, cfg.rate)?;
        let dcfg = point_config(cfg, &ch);
        let (mut frames, mut bit_errors, mut frame_errors, mut iterations) = (0u64, 0u64, 0u64, 0u64);
        'blocks: while frames < cfg.max_frames {
            let end = (frames + BLOCK).min(cfg.max_frames);
            let batch: Vec<Result<Frame>> = pool.install(|| {
                (frames..end)
                    .into_par_iter()
                    .map_init(
                        || Decoder::new(g),
                        |dec, f| {
                            let mut rng = ChaCha8Rng::seed_from_u64(frame_seed(cfg.master_seed, p as u64, f));
                            let obs = observe(&ch, &cfg.quantizer, n, &mut rng);
                            let r = dec.decode(&obs, &dcfg)?;
                            let errs = r.hard_decisions.iter().filter(|&&x| x).count() as u64;
                            Ok(Frame { bit_errors: errs, iterations: r.iterations_used as u64 })
                        },
                    )
                    .collect()
            });
            for fr in batch {
                let fr = fr?;
                frames += 1;
                bit_errors += fr.bit_errors;
                iterations += fr.iterations;
                if fr.bit_errors > 0 {
                    frame_errors += 1;
                    if frame_errors >= cfg.min_frame_errors {
                        break 'blocks;
                    }
                }
            }
        }
        let bits = frames * n as u64;
        out.push(BerRecord {
            ebn0_db: db,
            frames,
            bits,
            bit_errors,
            frame_errors,
            ber: bit_errors as f64 / bits as f64,
            fer: frame_errors as f64 / frames as f64,
            mean_iterations: iterations as f64 / frames as f64,
            censored: frame_errors < cfg.min_frame_errors,
        });
    }
    Ok(out)
}

/// Predicted and measured variable-to-check error rate of one iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub iteration: usize,
    pub de: f64,
    pub empirical: f64,
}

/// Compares density evolution with the decoder on `g` over iterations
/// `0..=iterations`, averaging the fraction of wrong variable-to-check
/// messages over `frames` frames. The decoder uses the density-evolution
/// schedule and never stops early.
#[allow(clippy::too_many_arguments)]
pub fn de_vs_sim_trace(
    g: &TannerGraph,
    dist: &DegreeDistribution,
    ebn0_db: f64,
    quantizer: &Quantizer,
    iterations: usize,
    frames: u64,
    master_seed: u64,
    workers: usize,
) -> Result<Vec<TraceRow>> {
    if iterations == 0 || frames == 0 {
        return Err(SimError::Format("iterations and frames must be positive".into()));
    }
    let ch = ebn0_db_to_sigma(ebn0_db, dist.design_rate())?;
    let dec = decompose(&ch, quantizer);
    let model = ChannelModel::Quantized(dec.clone());
    let schedule = decoder_schedule(dist, &model, iterations);
    let mut de = vec![model.hard_crossover()];
    for &ec in &schedule {
        de.push(var_exit_mixture(ec, dist, &model)?);
    }
    let mut dcfg = DecoderConfig::new(iterations, ReliabilityMode::Schedule(schedule), dec);
    dcfg.stop_on_syndrome = false;
    let edges = g.n_edges() as f64;
    let n = g.n_var();
    let pool = pool(workers)?;
    let counts: Vec<Result<Vec<usize>>> = pool.install(|| {
        (0..frames)
            .into_par_iter()
            .map_init(
                || Decoder::new(g),
                |d, f| {
                    let mut rng = ChaCha8Rng::seed_from_u64(frame_seed(master_seed, 0, f));
                    let obs = observe(&ch, quantizer, n, &mut rng);
                    let r = d.decode(&obs, &dcfg)?;
                    Ok(r.trace.iter().map(|t| t.negative_messages).collect())
                },
            )
            .collect()
    });
    let mut sums = vec![0u64; iterations + 1];
    for c in counts {
        for (s, k) in sums.iter_mut().zip(c?) {
            *s += k as u64;
        }
    }
    Ok((0..=iterations)
        .map(|l| TraceRow { iteration: l, de: de[l], empirical: sums[l] as f64 / (edges * frames as f64) })
        .collect())
}
