//! Communication channel models.
//!
//! Entropies and mutual information are in bits; reliabilities and L-values
//! use the natural logarithm.

use alloc::vec::Vec;

use crate::math::{self, gaussian_mass};
use crate::{Error, Result};

pub use crate::math::q_function;

/// Smallest crossover probability that is turned into a finite reliability.
pub const EPS_MIN: f64 = 1e-12;

/// Reliability of a BSC with crossover [`EPS_MIN`]; every reliability is
/// clamped to this value.
pub const D_MAX: f64 = 27.63102111592755;

fn check_probability(name: &'static str, value: f64, max: f64) -> Result<()> {
    if (0.0..=max).contains(&value) {
        Ok(())
    } else {
        Err(Error::OutOfRange { name, value })
    }
}

/// `h_b(eps) = -eps log2 eps - (1-eps) log2 (1-eps)`.
pub fn binary_entropy(eps: f64) -> Result<f64> {
    check_probability("eps", eps, 1.0)?;
    Ok(binary_entropy_unchecked(eps))
}

pub(crate) fn binary_entropy_unchecked(eps: f64) -> f64 {
    if eps <= 0.0 || eps >= 1.0 {
        return 0.0;
    }
    -eps * math::log2(eps) - (1.0 - eps) * math::log2(1.0 - eps)
}

/// Inverse of [`binary_entropy`] on `[0, 1/2]`, by bisection.
pub fn binary_entropy_inv(h: f64) -> Result<f64> {
    check_probability("h", h, 1.0)?;
    Ok(binary_entropy_inv_unchecked(h))
}

pub(crate) fn binary_entropy_inv_unchecked(h: f64) -> f64 {
    if h <= 0.0 {
        return 0.0;
    }
    if h >= 1.0 {
        return 0.5;
    }
    let (mut lo, mut hi) = (0.0f64, 0.5f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if binary_entropy_unchecked(mid) < h {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Reliability `D = ln((1-eps)/eps)` of a BSC, clamped at [`D_MAX`].
pub fn reliability(eps: f64) -> Result<f64> {
    check_probability("eps", eps, 0.5)?;
    Ok(reliability_clamped(eps))
}

#[inline]
pub(crate) fn reliability_clamped(eps: f64) -> f64 {
    if eps >= 0.5 {
        return 0.0;
    }
    let eps = eps.max(EPS_MIN);
    math::ln((1.0 - eps) / eps)
}

/// `I(X;Y) = 1 - h_b(eps)` for a BSC.
pub fn mutual_info_bsc(eps: f64) -> Result<f64> {
    check_probability("eps", eps, 0.5)?;
    Ok(1.0 - binary_entropy_unchecked(eps))
}

/// Binary symmetric channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BscParams {
    epsilon: f64,
}

impl BscParams {
    pub fn new(epsilon: f64) -> Result<Self> {
        check_probability("epsilon", epsilon, 0.5)?;
        Ok(Self { epsilon })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn reliability(&self) -> f64 {
        reliability_clamped(self.epsilon)
    }

    pub fn mutual_information(&self) -> f64 {
        1.0 - binary_entropy_unchecked(self.epsilon)
    }
}

/// Binary-input AWGN channel with antipodal signalling.
///
/// L-values `L = 2y/sigma_n^2` are Gaussian with standard deviation
/// `sigma_ch = 2/sigma_n` and mean `mu_ch = sigma_ch^2/2` given `X = +1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BiawgnChannel {
    sigma_n: f64,
    rate_for_ebn0: Option<f64>,
}

impl BiawgnChannel {
    pub fn from_sigma(sigma_n: f64) -> Result<Self> {
        if !(sigma_n > 0.0) || !sigma_n.is_finite() {
            return Err(Error::OutOfRange { name: "sigma_n", value: sigma_n });
        }
        Ok(Self { sigma_n, rate_for_ebn0: None })
    }

    /// `sigma_n^2 = 1 / (2 R 10^(ebn0_db/10))`.
    pub fn from_ebn0_db(ebn0_db: f64, rate: f64) -> Result<Self> {
        ebn0_db_to_sigma(ebn0_db, rate)
    }

    pub fn sigma_n(&self) -> f64 {
        self.sigma_n
    }

    pub fn sigma_ch(&self) -> f64 {
        2.0 / self.sigma_n
    }

    pub fn mu_ch(&self) -> f64 {
        let s = self.sigma_ch();
        0.5 * s * s
    }

    pub fn rate_for_ebn0(&self) -> Option<f64> {
        self.rate_for_ebn0
    }

    /// Eb/N0 in dB for the given code rate.
    pub fn ebn0_db(&self, rate: f64) -> f64 {
        let snr = 1.0 / (2.0 * rate * self.sigma_n * self.sigma_n);
        10.0 * libm::log10(snr)
    }

    /// Crossover probability of sign-only detection, `Q(sigma_ch/2)`.
    pub fn hard_decision_crossover(&self) -> f64 {
        q_function(0.5 * self.sigma_ch())
    }

    /// Mass of the conditional L-value density on `[a, b]`.
    pub fn l_value_mass(&self, a: f64, b: f64) -> f64 {
        gaussian_mass(self.mu_ch(), self.sigma_ch(), a, b)
    }

    /// Capacity of the unquantized channel in bits per use.
    pub fn capacity(&self) -> f64 {
        let mu = self.mu_ch();
        let sd = self.sigma_ch();
        let span = 14.0 * sd;
        let integrand = |l: f64| {
            let z = (l - mu) / sd;
            let pdf = math::exp(-0.5 * z * z) / (sd * math::sqrt(2.0 * core::f64::consts::PI));
            // log2(1 + e^-l), split to stay finite for large |l|
            let soft_plus = (-l).max(0.0) + math::ln_1p(math::exp(-l.abs()));
            pdf * soft_plus / math::LN_2
        };
        1.0 - math::simpson(integrand, mu - span, mu + span, 4000)
    }
}

/// BPSK convention: `sigma_n^2 = 1 / (2 R 10^(ebn0_db/10))`.
pub fn ebn0_db_to_sigma(ebn0_db: f64, rate: f64) -> Result<BiawgnChannel> {
    if !(rate > 0.0 && rate < 1.0) {
        return Err(Error::OutOfRange { name: "rate", value: rate });
    }
    if !ebn0_db.is_finite() {
        return Err(Error::OutOfRange { name: "ebn0_db", value: ebn0_db });
    }
    let snr = libm::pow(10.0, ebn0_db / 10.0);
    let sigma_n = math::sqrt(1.0 / (2.0 * rate * snr));
    Ok(BiawgnChannel { sigma_n, rate_for_ebn0: Some(rate) })
}

/// Crossover probability of hard decisions on `ch`.
pub fn hard_decision_crossover(ch: &BiawgnChannel) -> f64 {
    ch.hard_decision_crossover()
}

fn bisect_ebn0<F: Fn(f64) -> bool>(ok: F) -> f64 {
    let (mut lo, mut hi) = (-10.0f64, 30.0f64);
    while hi - lo > 1e-6 {
        let mid = 0.5 * (lo + hi);
        if ok(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Smallest Eb/N0 (dB) at which the BIAWGN capacity reaches `rate`.
pub fn biawgn_limit_db(rate: f64) -> Result<f64> {
    ebn0_db_to_sigma(0.0, rate)?;
    Ok(bisect_ebn0(|db| match ebn0_db_to_sigma(db, rate) {
        Ok(ch) => ch.capacity() >= rate,
        Err(_) => false,
    }))
}

/// Smallest Eb/N0 (dB) at which hard decisions (a BSC) support `rate`.
pub fn bsc_limit_db(rate: f64) -> Result<f64> {
    ebn0_db_to_sigma(0.0, rate)?;
    Ok(bisect_ebn0(|db| match ebn0_db_to_sigma(db, rate) {
        Ok(ch) => 1.0 - binary_entropy_unchecked(ch.hard_decision_crossover()) >= rate,
        Err(_) => false,
    }))
}

/// Symmetric sign-magnitude quantizer on L-value magnitudes.
///
/// Boundaries `zeta_0 < ... < zeta_W`. Magnitudes below `zeta_0` map to
/// sub-channel 0 (an erasure-like BSC with crossover 1/2); magnitudes in
/// `[zeta_{w-1}, zeta_w)` map to sub-channel `w`. A finite last boundary
/// saturates: everything above `zeta_{W-1}` lands in sub-channel `W`.
#[derive(Debug, Clone, PartialEq)]
pub struct Quantizer {
    zeta: Vec<f64>,
}

impl Quantizer {
    /// `boundaries` are the finite boundaries; with `last_is_infinite` an
    /// infinite boundary is appended.
    pub fn new(boundaries: &[f64], last_is_infinite: bool) -> Result<Self> {
        let mut zeta: Vec<f64> = boundaries.to_vec();
        if zeta.iter().any(|z| !z.is_finite()) {
            return Err(Error::InvalidQuantizer("boundaries must be finite; use the infinite flag"));
        }
        if last_is_infinite {
            zeta.push(f64::INFINITY);
        }
        if zeta.len() < 2 {
            return Err(Error::InvalidQuantizer("need at least two boundaries"));
        }
        if zeta[0] < 0.0 {
            return Err(Error::InvalidQuantizer("boundaries must be nonnegative"));
        }
        if zeta.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidQuantizer("boundaries must be strictly increasing"));
        }
        Ok(Self { zeta })
    }

    /// Sign-only detection, `zeta = [0, inf]`.
    pub fn hard() -> Self {
        Self { zeta: alloc::vec![0.0, f64::INFINITY] }
    }

    /// Binary symmetric quaternary-output channel, `zeta = [0, zeta1, inf]`.
    pub fn bsqc(zeta1: f64) -> Result<Self> {
        Self::new(&[0.0, zeta1], true)
    }

    /// `levels` equal-width magnitude bins on `[0, max]` plus a saturating
    /// top bin. Used to approximate the unquantized channel.
    pub fn uniform(levels: usize, max: f64) -> Result<Self> {
        if levels == 0 || !(max > 0.0) {
            return Err(Error::InvalidQuantizer("uniform quantizer needs levels >= 1 and max > 0"));
        }
        let step = max / levels as f64;
        let b: Vec<f64> = (0..=levels).map(|i| step * i as f64).collect();
        Self::new(&b, true)
    }

    /// All boundaries including a trailing infinity when present.
    pub fn zeta(&self) -> &[f64] {
        &self.zeta
    }

    pub fn finite_boundaries(&self) -> &[f64] {
        if self.last_is_infinite() {
            &self.zeta[..self.zeta.len() - 1]
        } else {
            &self.zeta
        }
    }

    pub fn last_is_infinite(&self) -> bool {
        self.zeta.last().is_some_and(|z| z.is_infinite())
    }

    /// Largest sub-channel index `W`.
    pub fn max_index(&self) -> usize {
        self.zeta.len() - 1
    }

    /// Sign (`true` for negative) and sub-channel index of an L-value.
    pub fn quantize(&self, l: f64) -> (bool, usize) {
        let mag = l.abs();
        let negative = l < 0.0;
        if mag < self.zeta[0] {
            return (negative, 0);
        }
        // first boundary strictly above mag
        let w = self.zeta.partition_point(|&z| z <= mag);
        (negative, w.min(self.max_index()).max(1))
    }
}

/// One BSC component of a decomposed quantized channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubChannel {
    /// Quantizer index `w`.
    pub index: usize,
    pub probability: f64,
    pub epsilon: f64,
    pub reliability: f64,
}

/// A quantized symmetric channel written as a mixture of BSCs.
#[derive(Debug, Clone, PartialEq)]
pub struct SubChannelDecomposition {
    subchannels: Vec<SubChannel>,
    max_index: usize,
}

impl SubChannelDecomposition {
    /// Builds a decomposition from explicit `(index, probability, epsilon)`
    /// records. Probabilities are renormalized only if they already sum to 1
    /// within 1e-9.
    pub fn from_parts(parts: &[(usize, f64, f64)]) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::InvalidQuantizer("empty decomposition"));
        }
        let mut subchannels = Vec::with_capacity(parts.len());
        let mut max_index = 0;
        for &(index, probability, epsilon) in parts {
            check_probability("probability", probability, 1.0)?;
            check_probability("epsilon", epsilon, 0.5)?;
            max_index = max_index.max(index);
            subchannels.push(SubChannel {
                index,
                probability,
                epsilon,
                reliability: reliability_clamped(epsilon),
            });
        }
        let total: f64 = subchannels.iter().map(|s| s.probability).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::OutOfRange { name: "sum of sub-channel probabilities", value: total });
        }
        for s in &mut subchannels {
            s.probability /= total;
        }
        Ok(Self { subchannels, max_index })
    }

    /// A single hard-decision BSC (sub-channel index 1).
    pub fn single(epsilon: f64) -> Result<Self> {
        Self::from_parts(&[(1, 1.0, epsilon)])
    }

    pub fn subchannels(&self) -> &[SubChannel] {
        &self.subchannels
    }

    /// Largest quantizer index covered.
    pub fn max_index(&self) -> usize {
        self.max_index
    }

    /// Reliability for every index `0..=W`; indices without a record get 0.
    pub fn reliability_table(&self) -> Vec<f64> {
        let mut table = alloc::vec![0.0; self.max_index + 1];
        for s in &self.subchannels {
            table[s.index] = s.reliability;
        }
        table
    }

    /// `sum_w p_w (1 - h_b(eps_w))`.
    pub fn mutual_information(&self) -> f64 {
        self.subchannels
            .iter()
            .map(|s| s.probability * (1.0 - binary_entropy_unchecked(s.epsilon)))
            .sum()
    }

    /// Error probability of the sign alone, `sum_w p_w eps_w`.
    pub fn hard_crossover(&self) -> f64 {
        self.subchannels.iter().map(|s| s.probability * s.epsilon).sum()
    }
}

/// Decomposes the quantized BIAWGN channel into BSC sub-channels.
///
/// Sub-channel 0 is emitted only when `zeta_0 > 0`; sub-channels with zero
/// probability are dropped.
pub fn decompose(ch: &BiawgnChannel, q: &Quantizer) -> SubChannelDecomposition {
    let zeta = q.zeta();
    let w_max = q.max_index();
    let mut subchannels = Vec::with_capacity(zeta.len());
    if zeta[0] > 0.0 {
        let p0 = ch.l_value_mass(-zeta[0], zeta[0]);
        if p0 > 0.0 {
            subchannels.push(SubChannel { index: 0, probability: p0, epsilon: 0.5, reliability: 0.0 });
        }
    }
    for w in 1..=w_max {
        let lo = zeta[w - 1];
        let hi = if w == w_max { f64::INFINITY } else { zeta[w] };
        let pos = ch.l_value_mass(lo, hi);
        let neg = ch.l_value_mass(-hi, -lo);
        let p = pos + neg;
        if p <= 0.0 {
            continue;
        }
        let epsilon = (neg / p).min(0.5);
        subchannels.push(SubChannel {
            index: w,
            probability: p,
            epsilon,
            reliability: reliability_clamped(epsilon),
        });
    }
    SubChannelDecomposition { subchannels, max_index: w_max }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn entropy_fixed_points() {
        assert_eq!(binary_entropy(0.5).unwrap(), 1.0);
        assert_eq!(binary_entropy(0.0).unwrap(), 0.0);
        assert_eq!(binary_entropy(1.0).unwrap(), 0.0);
        assert!(binary_entropy(1.5).is_err());
        assert!(binary_entropy(-0.1).is_err());
        assert!(binary_entropy(f64::NAN).is_err());
        let a = binary_entropy(0.11).unwrap();
        let b = binary_entropy(0.89).unwrap();
        assert!((a - b).abs() < 1e-15);
    }

    #[test]
    fn entropy_inverse_endpoints() {
        assert_eq!(binary_entropy_inv(1.0).unwrap(), 0.5);
        assert_eq!(binary_entropy_inv(0.0).unwrap(), 0.0);
        assert!(binary_entropy_inv(1.01).is_err());
    }

    #[test]
    fn reliability_examples() {
        assert_eq!(reliability(0.5).unwrap(), 0.0);
        assert!((reliability(0.1).unwrap() - libm::log(9.0)).abs() < 1e-15);
        assert!((reliability(0.0).unwrap() - D_MAX).abs() < 1e-13);
        assert!((D_MAX - libm::log((1.0 - EPS_MIN) / EPS_MIN)).abs() < 1e-12);
        assert!(reliability(0.51).is_err());
    }

    #[test]
    fn mutual_info_endpoints() {
        assert_eq!(mutual_info_bsc(0.0).unwrap(), 1.0);
        assert_eq!(mutual_info_bsc(0.5).unwrap(), 0.0);
    }

    #[test]
    fn ebn0_conversion() {
        let ch = ebn0_db_to_sigma(0.0, 0.5).unwrap();
        assert!((ch.sigma_n() - 1.0).abs() < 1e-15);
        let db = 10.0 * libm::log10(2.0);
        let ch = ebn0_db_to_sigma(db, 0.5).unwrap();
        assert!((ch.sigma_n() * ch.sigma_n() - 0.5).abs() < 1e-15);
        assert!((ch.ebn0_db(0.5) - db).abs() < 1e-12);
        assert!(ebn0_db_to_sigma(1.0, 0.0).is_err());
        assert!(ebn0_db_to_sigma(1.0, -0.5).is_err());
        let ch = BiawgnChannel::from_sigma(0.8).unwrap();
        assert!((ch.mu_ch() - ch.sigma_ch() * ch.sigma_ch() / 2.0).abs() < 1e-15);
    }

    #[test]
    fn hard_crossover_limits() {
        let noisy = BiawgnChannel::from_sigma(1e6).unwrap();
        assert!((noisy.hard_decision_crossover() - 0.5).abs() < 1e-6);
        let clean = BiawgnChannel::from_sigma(1e-2).unwrap();
        assert_eq!(clean.hard_decision_crossover(), 0.0);
    }

    #[test]
    fn quantizer_validation() {
        assert!(Quantizer::new(&[1.0, 0.5], true).is_err());
        assert!(Quantizer::new(&[0.0], false).is_err());
        assert!(Quantizer::new(&[-1.0, 1.0], true).is_err());
        assert!(Quantizer::new(&[0.0, f64::INFINITY], false).is_err());
        let q = Quantizer::bsqc(1.95).unwrap();
        assert_eq!(q.finite_boundaries(), &[0.0, 1.95]);
        assert!(q.last_is_infinite());
        assert_eq!(q.quantize(0.3), (false, 1));
        assert_eq!(q.quantize(-2.5), (true, 2));
        assert_eq!(q.quantize(1.95), (false, 2));
        let q = Quantizer::new(&[0.5, 2.0], true).unwrap();
        assert_eq!(q.quantize(-0.2), (true, 0));
    }

    #[test]
    fn hard_quantizer_is_single_bsc() {
        let ch = BiawgnChannel::from_sigma(0.9).unwrap();
        let dec = decompose(&ch, &Quantizer::hard());
        assert_eq!(dec.subchannels().len(), 1);
        let s = dec.subchannels()[0];
        assert!((s.probability - 1.0).abs() < 1e-15);
        assert!((s.epsilon - ch.hard_decision_crossover()).abs() < 1e-12);
    }

    #[test]
    fn bsqc_has_no_erasure_subchannel() {
        let ch = BiawgnChannel::from_sigma(0.67).unwrap();
        let dec = decompose(&ch, &Quantizer::bsqc(1.90).unwrap());
        assert_eq!(dec.subchannels().len(), 2);
        assert!(dec.subchannels().iter().all(|s| s.index != 0));
        let total: f64 = dec.subchannels().iter().map(|s| s.probability).sum();
        assert!((total - 1.0).abs() < 1e-12);
        // inner bin is the less reliable one
        assert!(dec.subchannels()[0].epsilon > dec.subchannels()[1].epsilon);
        assert!(dec.subchannels()[0].reliability < dec.subchannels()[1].reliability);
        assert_eq!(dec.reliability_table()[0], 0.0);
    }

    #[test]
    fn erasure_subchannel_present_when_zeta0_positive() {
        let ch = BiawgnChannel::from_sigma(0.8).unwrap();
        let dec = decompose(&ch, &Quantizer::new(&[0.7, 3.0], true).unwrap());
        let s0 = dec.subchannels()[0];
        assert_eq!(s0.index, 0);
        assert_eq!(s0.epsilon, 0.5);
        assert_eq!(s0.reliability, 0.0);
        let total: f64 = dec.subchannels().iter().map(|s| s.probability).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn capacity_sanity() {
        // rate 1/2 limit of the binary-input AWGN channel is about 0.187 dB
        let db = biawgn_limit_db(0.5).unwrap();
        assert!((db - 0.187).abs() < 0.01, "{db}");
        assert!(bsc_limit_db(0.5).unwrap() > db + 1.5);
    }
}
