//! Density evolution for BMP decoding of check-regular ensembles.
//!
//! Iteration 0 forwards the channel signs, so the first a-priori crossover
//! is 1/2. Afterwards `eps_ec(l) = f_c(eps_ev(l-1))` and
//! `eps_ev(l) = sum_i lambda_i f_v(eps_ec(l); i)`.

use alloc::vec::Vec;

use crate::channel::{reliability_clamped, Quantizer};
use crate::design::DegreeDistribution;
use crate::exit::{check_exit_unchecked, var_exit_mixture_with, ChannelModel};
use crate::{Error, Result};

/// Iteration cap and residual target.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeConfig {
    pub max_iters: usize,
    pub residual_target: f64,
}

impl Default for DeConfig {
    fn default() -> Self {
        Self { max_iters: 2000, residual_target: 1e-10 }
    }
}

/// Per-iteration crossover probabilities of a density-evolution run.
///
/// Entry `l` of `eps_ec` is the a-priori crossover seen by variable nodes in
/// iteration `l`; entry `l` of `eps_ev` is the resulting variable-to-check
/// crossover.
#[derive(Debug, Clone, PartialEq)]
pub struct DeTrajectory {
    pub eps_ev: Vec<f64>,
    pub eps_ec: Vec<f64>,
    pub converged: bool,
    pub iterations_used: usize,
}

impl DeTrajectory {
    /// `(iteration, eps_ev, eps_ec, D_av)` rows.
    pub fn rows(&self) -> impl Iterator<Item = (usize, f64, f64, f64)> + '_ {
        self.eps_ev
            .iter()
            .zip(&self.eps_ec)
            .enumerate()
            .map(|(l, (&ev, &ec))| (l, ev, ec, reliability_clamped(ec)))
    }

    pub fn final_eps_ev(&self) -> f64 {
        *self.eps_ev.last().unwrap_or(&0.5)
    }
}

fn run(
    dist: &DegreeDistribution,
    ch: &ChannelModel,
    start_eps_ec: f64,
    iterations: usize,
    stop_below: Option<f64>,
) -> DeTrajectory {
    let d_c = dist.check_degree() as f64;
    let mut pmf = Vec::new();
    let mut eps_ev = Vec::new();
    let mut eps_ec = Vec::new();
    let mut ec = start_eps_ec;
    let mut converged = false;
    for l in 0..=iterations {
        let ev = var_exit_mixture_with(ec, dist, ch, &mut pmf);
        eps_ec.push(ec);
        eps_ev.push(ev);
        if let Some(target) = stop_below {
            if ev < target {
                converged = true;
                break;
            }
            // numerically stuck at a nonzero fixed point
            if l > 0 && (eps_ev[l - 1] - ev).abs() <= 1e-13 * ev {
                break;
            }
        }
        if l == iterations {
            break;
        }
        ec = check_exit_unchecked(ev, d_c);
    }
    let iterations_used = eps_ev.len() - 1;
    DeTrajectory { eps_ev, eps_ec, converged, iterations_used }
}

/// Runs density evolution from uninformative a-priori messages.
pub fn density_evolution(
    dist: &DegreeDistribution,
    ch: &ChannelModel,
    cfg: &DeConfig,
) -> Result<DeTrajectory> {
    if cfg.max_iters == 0 {
        return Err(Error::OutOfRange { name: "max_iters", value: 0.0 });
    }
    Ok(run(dist, ch, 0.5, cfg.max_iters, Some(cfg.residual_target)))
}

/// Runs density evolution from a given variable-to-check crossover
/// `start_eps_ev` instead of the channel forward. Entry 0 of the result is
/// the first iteration after the start point.
pub fn density_evolution_from(
    dist: &DegreeDistribution,
    ch: &ChannelModel,
    start_eps_ev: f64,
    cfg: &DeConfig,
) -> Result<DeTrajectory> {
    if !(0.0..=0.5).contains(&start_eps_ev) {
        return Err(Error::OutOfRange { name: "start_eps_ev", value: start_eps_ev });
    }
    if cfg.max_iters == 0 {
        return Err(Error::OutOfRange { name: "max_iters", value: 0.0 });
    }
    let first_ec = check_exit_unchecked(start_eps_ev, dist.check_degree() as f64);
    Ok(run(dist, ch, first_ec, cfg.max_iters - 1, Some(cfg.residual_target)))
}

/// `(eps_ec, D_av)` for iterations `0..n_iters`, for decoders that take a
/// precomputed reliability sequence.
pub fn reliability_schedule(
    dist: &DegreeDistribution,
    ch: &ChannelModel,
    n_iters: usize,
) -> Result<Vec<(f64, f64)>> {
    if n_iters == 0 {
        return Err(Error::OutOfRange { name: "n_iters", value: 0.0 });
    }
    let traj = run(dist, ch, 0.5, n_iters - 1, None);
    Ok(traj.eps_ec.iter().map(|&ec| (ec, reliability_clamped(ec))).collect())
}

/// The a-priori crossover sequence for decoder iterations `1..=max_iterations`.
pub fn decoder_schedule(
    dist: &DegreeDistribution,
    ch: &ChannelModel,
    max_iterations: usize,
) -> Vec<f64> {
    let traj = run(dist, ch, 0.5, max_iterations, None);
    traj.eps_ec[1..].to_vec()
}

/// A channel family parametrized by Eb/N0.
#[derive(Debug, Clone, PartialEq)]
pub enum ChannelFamily {
    /// Hard decisions (BSC).
    Hard,
    /// Sign-magnitude quantized observations.
    Quantized(Quantizer),
    /// Unquantized observations.
    Soft,
}

impl ChannelFamily {
    /// The channel model at `ebn0_db` for a code of rate `rate`.
    pub fn at_ebn0(&self, ebn0_db: f64, rate: f64) -> Result<ChannelModel> {
        let ch = crate::channel::ebn0_db_to_sigma(ebn0_db, rate)?;
        Ok(match self {
            ChannelFamily::Hard => ChannelModel::Hard { epsilon: ch.hard_decision_crossover() },
            ChannelFamily::Quantized(q) => ChannelModel::quantized(&ch, q),
            ChannelFamily::Soft => ChannelModel::Soft(ch),
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            ChannelFamily::Hard => "bsc",
            ChannelFamily::Quantized(_) => "quantized",
            ChannelFamily::Soft => "soft",
        }
    }
}

/// Smallest Eb/N0 (dB) in `bracket` at which density evolution converges,
/// to within `tol`. The returned value is on the converging side. The code
/// rate used for the Eb/N0 conversion is the design rate of `dist`.
pub fn threshold_ebn0(
    dist: &DegreeDistribution,
    family: &ChannelFamily,
    bracket: (f64, f64),
    tol: f64,
    cfg: &DeConfig,
) -> Result<f64> {
    let rate = dist.design_rate();
    let converges = |db: f64| -> Result<bool> {
        let ch = family.at_ebn0(db, rate)?;
        Ok(density_evolution(dist, &ch, cfg)?.converged)
    };
    let (mut lo, mut hi) = bracket;
    if converges(lo)? || !converges(hi)? {
        return Err(Error::Bracket { low: lo, high: hi });
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if converges(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Largest BSC crossover in `bracket` for which density evolution
/// converges, to within `tol`.
pub fn threshold_crossover(
    dist: &DegreeDistribution,
    bracket: (f64, f64),
    tol: f64,
    cfg: &DeConfig,
) -> Result<f64> {
    let converges = |eps: f64| -> Result<bool> {
        Ok(density_evolution(dist, &ChannelModel::hard(eps)?, cfg)?.converged)
    };
    let (mut lo, mut hi) = bracket;
    if !converges(lo)? || converges(hi)? {
        return Err(Error::Bracket { low: lo, high: hi });
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if converges(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}
