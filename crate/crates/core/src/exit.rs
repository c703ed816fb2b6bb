//! Transfer functions of check and variable nodes under binary message
//! passing, expressed in crossover probabilities.
//!
//! A check node of degree `d_c` outputs the product of the other `d_c - 1`
//! inputs. A variable node of degree `d_v` adds the channel L-value and the
//! other `d_v - 1` incoming messages, each converted to `±D_av`, and sends
//! the sign of the sum.

use alloc::vec::Vec;

use crate::channel::{
    binary_entropy_unchecked, decompose, reliability_clamped, BiawgnChannel, Quantizer,
    SubChannelDecomposition,
};
use crate::design::DegreeDistribution;
use crate::math::{self, binomial_pmf, q_function};
use crate::{Error, Result};

fn check_eps(name: &'static str, eps: f64) -> Result<()> {
    if (0.0..=0.5).contains(&eps) {
        Ok(())
    } else {
        Err(Error::OutOfRange { name, value: eps })
    }
}

fn check_degree(degree: usize, min: usize) -> Result<()> {
    if degree >= min {
        Ok(())
    } else {
        Err(Error::InvalidDegree { degree, min })
    }
}

/// Check node output crossover `(1 - (1 - 2 eps_ac)^(d_c - 1)) / 2`.
pub fn check_exit(eps_ac: f64, d_c: usize) -> Result<f64> {
    check_eps("eps_ac", eps_ac)?;
    check_degree(d_c, 2)?;
    Ok(check_exit_unchecked(eps_ac, d_c as f64))
}

#[inline]
pub(crate) fn check_exit_unchecked(eps_ac: f64, d_c: f64) -> f64 {
    (0.5 * (1.0 - math::powf(1.0 - 2.0 * eps_ac, d_c - 1.0))).clamp(0.0, 0.5)
}

/// Inverse of [`check_exit`] on `[0, 1/2]`.
pub fn check_exit_inv(eps_ec: f64, d_c: usize) -> Result<f64> {
    check_eps("eps_ec", eps_ec)?;
    check_degree(d_c, 2)?;
    Ok(check_exit_inv_unchecked(eps_ec, d_c as f64))
}

#[inline]
pub(crate) fn check_exit_inv_unchecked(eps_ec: f64, d_c: f64) -> f64 {
    (0.5 * (1.0 - math::powf(1.0 - 2.0 * eps_ec, 1.0 / (d_c - 1.0)))).clamp(0.0, 0.5)
}

/// Majority thresholds of a variable node.
///
/// `t` is the largest number of wrong check messages that still lets the
/// node correct a wrong channel sign; `t_bar` the largest number it
/// tolerates when the channel sign is right. `-1` means no count qualifies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VndThresholds {
    pub t: i64,
    pub t_bar: i64,
}

/// Thresholds for a degree-`d_v` node with a-priori reliability `d_av > 0`
/// and channel reliability `d_ch`.
pub fn vnd_thresholds(d_v: usize, d_av: f64, d_ch: f64) -> VndThresholds {
    let n = (d_v - 1) as f64;
    let clamp = |x: f64| (math::floor(x) as i64).clamp(-1, d_v as i64 - 1);
    VndThresholds {
        t: clamp((d_av * n - d_ch) / (2.0 * d_av)),
        t_bar: clamp((d_av * n + d_ch) / (2.0 * d_av)),
    }
}

/// Variable node output crossover with a hard-decision (BSC) channel.
pub fn var_exit_hard(eps_av: f64, d_v: usize, eps_ch: f64) -> Result<f64> {
    check_eps("eps_av", eps_av)?;
    check_eps("eps_ch", eps_ch)?;
    check_degree(d_v, 2)?;
    let mut scratch = Vec::new();
    Ok(var_exit_hard_with(eps_av, d_v, eps_ch, &mut scratch))
}

pub(crate) fn var_exit_hard_with(eps_av: f64, d_v: usize, eps_ch: f64, pmf: &mut Vec<f64>) -> f64 {
    if eps_ch <= 0.0 {
        return 0.0;
    }
    if eps_av >= 0.5 {
        return eps_ch;
    }
    let d_av = reliability_clamped(eps_av);
    let d_ch = reliability_clamped(eps_ch);
    let th = vnd_thresholds(d_v, d_av, d_ch);
    let n = d_v - 1;
    binomial_pmf(n, eps_av, pmf);
    let cdf = |k: i64| -> f64 {
        if k < 0 {
            0.0
        } else if k as usize >= n {
            1.0
        } else {
            pmf[..=k as usize].iter().sum::<f64>().min(1.0)
        }
    };
    let value = 1.0 - eps_ch * cdf(th.t) - (1.0 - eps_ch) * cdf(th.t_bar);
    value.clamp(0.0, 0.5)
}

/// Variable node output crossover with the unquantized BIAWGN channel.
pub fn var_exit_soft(eps_av: f64, d_v: usize, ch: &BiawgnChannel) -> Result<f64> {
    check_eps("eps_av", eps_av)?;
    check_degree(d_v, 2)?;
    let mut scratch = Vec::new();
    Ok(var_exit_soft_with(eps_av, d_v, ch, &mut scratch))
}

pub(crate) fn var_exit_soft_with(
    eps_av: f64,
    d_v: usize,
    ch: &BiawgnChannel,
    pmf: &mut Vec<f64>,
) -> f64 {
    let d_av = reliability_clamped(eps_av);
    let mu = ch.mu_ch();
    let sd = ch.sigma_ch();
    let n = d_v - 1;
    binomial_pmf(n, eps_av, pmf);
    let mut acc = 0.0;
    for (z, &b) in pmf.iter().enumerate() {
        if b == 0.0 {
            continue;
        }
        let shift = d_av * (n as f64 - 2.0 * z as f64);
        acc += b * q_function((shift + mu) / sd);
    }
    acc.clamp(0.0, 0.5)
}

/// Expectation of [`var_exit_hard`] over the sub-channels of `dec`.
pub fn var_exit_quantized(eps_av: f64, d_v: usize, dec: &SubChannelDecomposition) -> Result<f64> {
    check_eps("eps_av", eps_av)?;
    check_degree(d_v, 2)?;
    let mut scratch = Vec::new();
    Ok(var_exit_quantized_with(eps_av, d_v, dec, &mut scratch))
}

pub(crate) fn var_exit_quantized_with(
    eps_av: f64,
    d_v: usize,
    dec: &SubChannelDecomposition,
    pmf: &mut Vec<f64>,
) -> f64 {
    dec.subchannels()
        .iter()
        .map(|s| s.probability * var_exit_hard_with(eps_av, d_v, s.epsilon, pmf))
        .sum::<f64>()
        .clamp(0.0, 0.5)
}

/// The decoder's view of the communication channel.
#[derive(Debug, Clone, PartialEq)]
pub enum ChannelModel {
    /// Sign-only observations: a BSC.
    Hard { epsilon: f64 },
    /// Sign plus a quantization index: a mixture of BSCs.
    Quantized(SubChannelDecomposition),
    /// Unquantized BIAWGN L-values.
    Soft(BiawgnChannel),
}

impl ChannelModel {
    pub fn hard(epsilon: f64) -> Result<Self> {
        check_eps("epsilon", epsilon)?;
        Ok(ChannelModel::Hard { epsilon })
    }

    pub fn quantized(ch: &BiawgnChannel, q: &Quantizer) -> Self {
        ChannelModel::Quantized(decompose(ch, q))
    }

    /// Variable node transfer function for degree `d_v`.
    pub fn var_exit(&self, eps_av: f64, d_v: usize) -> f64 {
        let mut scratch = Vec::new();
        self.var_exit_with(eps_av, d_v, &mut scratch)
    }

    pub(crate) fn var_exit_with(&self, eps_av: f64, d_v: usize, pmf: &mut Vec<f64>) -> f64 {
        match self {
            ChannelModel::Hard { epsilon } => var_exit_hard_with(eps_av, d_v, *epsilon, pmf),
            ChannelModel::Quantized(dec) => var_exit_quantized_with(eps_av, d_v, dec, pmf),
            ChannelModel::Soft(ch) => var_exit_soft_with(eps_av, d_v, ch, pmf),
        }
    }

    /// Error probability of the channel sign alone.
    pub fn hard_crossover(&self) -> f64 {
        match self {
            ChannelModel::Hard { epsilon } => *epsilon,
            ChannelModel::Quantized(dec) => dec.hard_crossover(),
            ChannelModel::Soft(ch) => ch.hard_decision_crossover(),
        }
    }
}

/// Edge-averaged variable node transfer function of an irregular ensemble.
pub fn var_exit_mixture(eps_av: f64, dist: &DegreeDistribution, ch: &ChannelModel) -> Result<f64> {
    check_eps("eps_av", eps_av)?;
    let mut scratch = Vec::new();
    Ok(var_exit_mixture_with(eps_av, dist, ch, &mut scratch))
}

pub(crate) fn var_exit_mixture_with(
    eps_av: f64,
    dist: &DegreeDistribution,
    ch: &ChannelModel,
    pmf: &mut Vec<f64>,
) -> f64 {
    dist.lambda()
        .iter()
        .map(|&(d, l)| l * ch.var_exit_with(eps_av, d, pmf))
        .sum::<f64>()
        .clamp(0.0, 0.5)
}

/// Outcome of the small-error stability test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stability {
    pub stable: bool,
    /// `1 - (lambda_2 + 2 eps_ch lambda_3)(d_c - 1)`.
    pub margin: f64,
}

/// Stability of the zero-error fixed point under BMP decoding.
///
/// `eps_ch_hard` is the error probability of hard decisions on the channel.
pub fn stability_check(dist: &DegreeDistribution, eps_ch_hard: f64) -> Stability {
    let lhs = (dist.lambda_of(2) + 2.0 * eps_ch_hard * dist.lambda_of(3))
        * (dist.check_degree() as f64 - 1.0);
    Stability { stable: lhs < 1.0, margin: 1.0 - lhs }
}

/// One point of an EXIT curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExitPoint {
    pub eps_a: f64,
    pub eps_e: f64,
    pub i_a: f64,
    pub i_e: f64,
}

impl ExitPoint {
    fn new(eps_a: f64, eps_e: f64) -> Self {
        Self {
            eps_a,
            eps_e,
            i_a: 1.0 - binary_entropy_unchecked(eps_a),
            i_e: 1.0 - binary_entropy_unchecked(eps_e),
        }
    }

    /// Input and output exchanged, for overlaying a check curve on a
    /// variable curve.
    pub fn swapped(&self) -> Self {
        Self { eps_a: self.eps_e, eps_e: self.eps_a, i_a: self.i_e, i_e: self.i_a }
    }
}

/// Which transfer function to sample.
#[derive(Debug, Clone, PartialEq)]
pub enum NodeCase {
    Check { d_c: usize },
    Variable { d_v: usize, channel: ChannelModel },
    Mixture { dist: DegreeDistribution, channel: ChannelModel },
}

/// Samples a transfer function on a uniform grid of `eps_a` over `[0, 1/2]`.
pub fn exit_curve(node: &NodeCase, grid_size: usize) -> Result<Vec<ExitPoint>> {
    if grid_size < 2 {
        return Err(Error::OutOfRange { name: "grid_size", value: grid_size as f64 });
    }
    match node {
        NodeCase::Check { d_c } => check_degree(*d_c, 2)?,
        NodeCase::Variable { d_v, .. } => check_degree(*d_v, 2)?,
        NodeCase::Mixture { .. } => {}
    }
    let mut pmf = Vec::new();
    let step = 0.5 / (grid_size - 1) as f64;
    Ok((0..grid_size)
        .map(|k| {
            let eps_a = if k + 1 == grid_size { 0.5 } else { step * k as f64 };
            let eps_e = match node {
                NodeCase::Check { d_c } => check_exit_unchecked(eps_a, *d_c as f64),
                NodeCase::Variable { d_v, channel } => channel.var_exit_with(eps_a, *d_v, &mut pmf),
                NodeCase::Mixture { dist, channel } => {
                    var_exit_mixture_with(eps_a, dist, channel, &mut pmf)
                }
            };
            ExitPoint::new(eps_a, eps_e)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::D_MAX;

    #[test]
    fn check_exit_examples() {
        assert_eq!(check_exit(0.0, 6).unwrap(), 0.0);
        assert_eq!(check_exit(0.5, 6).unwrap(), 0.5);
        assert!((check_exit(0.1, 6).unwrap() - 0.33616).abs() < 1e-15);
        assert!(check_exit(0.1, 1).is_err());
        assert!(check_exit(0.6, 6).is_err());
    }

    #[test]
    fn check_exit_inverse() {
        assert_eq!(check_exit_inv(0.0, 6).unwrap(), 0.0);
        assert!((check_exit_inv(0.33616, 6).unwrap() - 0.1).abs() < 1e-12);
        for k in 0..=50 {
            let x = 0.01 * k as f64;
            let y = check_exit(x, 6).unwrap();
            let back = check_exit_inv(y, 6).unwrap();
            assert!((check_exit(back, 6).unwrap() - y).abs() < 1e-15, "x={x}");
            if k <= 40 {
                assert!((back - x).abs() < 1e-12, "x={x}");
            }
        }
    }

    #[test]
    fn thresholds_examples() {
        let th = vnd_thresholds(3, libm::log(4.0), libm::log(9.0));
        assert_eq!(th, VndThresholds { t: 0, t_bar: 1 });
        let th = vnd_thresholds(5, 1.3, 0.0);
        assert_eq!(th, VndThresholds { t: 2, t_bar: 2 });
        let th = vnd_thresholds(4, 1.0, 3.5);
        assert_eq!(th.t, -1);
        assert!(th.t <= th.t_bar);
    }

    #[test]
    fn var_exit_hard_examples() {
        assert!((var_exit_hard(0.2, 3, 0.1).unwrap() - 0.072).abs() < 1e-15);
        assert_eq!(var_exit_hard(0.5, 4, 0.13).unwrap(), 0.13);
        for &e in &[0.0, 1e-9, 0.1, 0.3, 0.5] {
            assert_eq!(var_exit_hard(e, 5, 0.0).unwrap(), 0.0);
        }
    }

    #[test]
    fn var_exit_soft_limits() {
        let ch = BiawgnChannel::from_sigma(0.8).unwrap();
        let v = var_exit_soft(0.5, 2, &ch).unwrap();
        assert!((v - ch.hard_decision_crossover()).abs() < 1e-15);
        let v = var_exit_soft(0.0, 2, &ch).unwrap();
        let expect = q_function((D_MAX + ch.mu_ch()) / ch.sigma_ch());
        assert!((v - expect).abs() < 1e-300 + 1e-12 * expect);
        assert!(v < 1e-20);
    }

    #[test]
    fn quantized_reduces_to_hard() {
        let dec = SubChannelDecomposition::single(0.08).unwrap();
        for k in 0..20 {
            let e = 0.025 * k as f64;
            assert_eq!(
                var_exit_quantized(e, 4, &dec).unwrap(),
                var_exit_hard(e, 4, 0.08).unwrap()
            );
        }
        let erasure = SubChannelDecomposition::from_parts(&[(0, 1.0, 0.5)]).unwrap();
        assert_eq!(
            var_exit_quantized(0.2, 4, &erasure).unwrap(),
            var_exit_hard(0.2, 4, 0.5).unwrap()
        );
    }

    #[test]
    fn mixture_of_two_degrees_is_average() {
        let dist = DegreeDistribution::new(&[(3, 0.5), (4, 0.5)], 6).unwrap();
        let ch = ChannelModel::hard(0.07).unwrap();
        for k in 0..=10 {
            let e = 0.05 * k as f64;
            let m = var_exit_mixture(e, &dist, &ch).unwrap();
            let avg = 0.5 * (ch.var_exit(e, 3) + ch.var_exit(e, 4));
            assert!((m - avg).abs() < 1e-15);
        }
    }

    #[test]
    fn stability_examples() {
        let d = DegreeDistribution::new(&[(4, 1.0)], 8).unwrap();
        let s = stability_check(&d, 0.2);
        assert!(s.stable);
        assert_eq!(s.margin, 1.0);
        for dc in 2..10 {
            let d = DegreeDistribution::regular(2, dc).unwrap();
            assert!(!stability_check(&d, 0.0).stable);
        }
        let d = DegreeDistribution::new(&[(2, 0.2), (3, 0.3), (6, 0.5)], 6).unwrap();
        let s = stability_check(&d, 0.1);
        assert!(!s.stable);
        assert!((s.margin + 0.3).abs() < 1e-12);
    }

    #[test]
    fn check_curve_endpoint() {
        let pts = exit_curve(&NodeCase::Check { d_c: 6 }, 11).unwrap();
        assert_eq!(pts[0].i_a, 1.0);
        assert_eq!(pts[0].i_e, 1.0);
        assert_eq!(pts[10].eps_a, 0.5);
        assert!(exit_curve(&NodeCase::Check { d_c: 6 }, 1).is_err());
        let s = pts[3].swapped();
        assert_eq!(s.i_a, pts[3].i_e);
    }

    #[test]
    fn hard_curve_has_kinks() {
        // Gallager-B rule changes show up as jumps in the slope of the
        // d_v = 4 curve.
        let ch = ChannelModel::hard(0.1).unwrap();
        let pts = exit_curve(&NodeCase::Variable { d_v: 4, channel: ch }, 2001).unwrap();
        let mut t_changes = 0;
        let d_ch = reliability_clamped(0.1);
        let mut last = None;
        for p in &pts[1..pts.len() - 1] {
            let th = vnd_thresholds(4, reliability_clamped(p.eps_a), d_ch);
            if last.map_or(false, |l| l != th) {
                t_changes += 1;
            }
            last = Some(th);
        }
        assert!(t_changes >= 1);
    }
}
