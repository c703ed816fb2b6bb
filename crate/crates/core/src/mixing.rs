//! Symmetric L-value densities and their mutual information.
//!
//! A density is stored conditioned on the transmitted symbol `+1`: a set of
//! point masses plus a part tabulated on a uniform grid. Symmetric means
//! `p(-l) = e^{-l} p(l)`. For such densities the mutual information is
//! `E[1 - log2(1 + e^{-L})]`, which is linear in the density, so mixing
//! densities mixes their mutual informations with the same weights.

use alloc::vec;
use alloc::vec::Vec;

use crate::channel::reliability_clamped;
use crate::math;
use crate::{Error, Result};

/// Half-width of the default tabulation interval.
pub const DEFAULT_L_MAX: f64 = 80.0;
/// Default tabulation step.
pub const DEFAULT_STEP: f64 = 0.005;

/// Uniform grid `lo, lo + step, ..., hi` with density values.
#[derive(Debug, Clone, PartialEq)]
pub struct Tabulated {
    pub l_max: f64,
    pub step: f64,
    pub values: Vec<f64>,
}

impl Tabulated {
    fn zeros(l_max: f64, step: f64) -> Self {
        let n = (2.0 * l_max / step).round() as usize + 1;
        Self { l_max, step, values: vec![0.0; n] }
    }

    fn abscissa(&self, i: usize) -> f64 {
        -self.l_max + self.step * i as f64
    }

    fn same_grid(&self, other: &Tabulated) -> bool {
        self.l_max == other.l_max && self.step == other.step && self.values.len() == other.values.len()
    }

    /// Simpson's rule over the grid (trapezoid on a trailing odd interval).
    fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        let n = self.values.len();
        if n < 2 {
            return 0.0;
        }
        let g = |i: usize| self.values[i] * f(self.abscissa(i));
        let intervals = n - 1;
        let even = intervals - intervals % 2;
        let mut s = 0.0;
        let mut i = 0;
        while i < even {
            s += g(i) + 4.0 * g(i + 1) + g(i + 2);
            i += 2;
        }
        let mut total = s * self.step / 3.0;
        if even < intervals {
            total += 0.5 * self.step * (g(even) + g(even + 1));
        }
        total
    }
}

/// A symmetric L-value density given `X = +1`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricDensity {
    /// `(l, mass)` point masses.
    atoms: Vec<(f64, f64)>,
    continuous: Option<Tabulated>,
}

/// `log2(1 + e^{-l})` without overflow.
fn log2_1p_exp_neg(l: f64) -> f64 {
    let x = -l;
    (x.max(0.0) + math::ln_1p(math::exp(-x.abs()))) / math::LN_2
}

impl SymmetricDensity {
    /// The BSC with crossover `eps`: masses `1 - eps` at `+D` and `eps` at `-D`.
    pub fn bsc(eps: f64) -> Result<Self> {
        if !(0.0..=0.5).contains(&eps) {
            return Err(Error::OutOfRange { name: "epsilon", value: eps });
        }
        let d = reliability_clamped(eps);
        let mut atoms = vec![(d, 1.0 - eps)];
        if eps > 0.0 {
            atoms.push((-d, eps));
        }
        Ok(Self { atoms, continuous: None })
    }

    /// Consistent Gaussian `N(mu, 2 mu)`, tabulated on the default grid.
    pub fn gaussian(mu: f64) -> Result<Self> {
        Self::gaussian_on(mu, DEFAULT_L_MAX, DEFAULT_STEP)
    }

    pub fn gaussian_on(mu: f64, l_max: f64, step: f64) -> Result<Self> {
        if !(mu > 0.0) || !(l_max > 0.0) || !(step > 0.0) {
            return Err(Error::OutOfRange { name: "gaussian mean", value: mu });
        }
        let mut t = Tabulated::zeros(l_max, step);
        let var = 2.0 * mu;
        let norm = 1.0 / math::sqrt(2.0 * core::f64::consts::PI * var);
        for i in 0..t.values.len() {
            let x = t.abscissa(i) - mu;
            t.values[i] = norm * math::exp(-x * x / (2.0 * var));
        }
        Ok(Self { atoms: Vec::new(), continuous: Some(t) })
    }

    /// Weighted mixture. Weights must be nonnegative and sum to 1; tabulated
    /// parts must share one grid.
    pub fn mixture(parts: &[(f64, &SymmetricDensity)]) -> Result<Self> {
        let total: f64 = parts.iter().map(|p| p.0).sum();
        if parts.iter().any(|p| !(p.0 >= 0.0)) || (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidDistribution(alloc::format!("mixture weights sum to {total}")));
        }
        let mut atoms = Vec::new();
        let mut continuous: Option<Tabulated> = None;
        for &(w, d) in parts {
            atoms.extend(d.atoms.iter().map(|&(l, m)| (l, w * m)));
            if let Some(t) = &d.continuous {
                match &mut continuous {
                    None => {
                        let mut c = t.clone();
                        c.values.iter_mut().for_each(|v| *v *= w);
                        continuous = Some(c);
                    }
                    Some(c) => {
                        if !c.same_grid(t) {
                            return Err(Error::InvalidDistribution("tabulation grids differ".into()));
                        }
                        for (a, b) in c.values.iter_mut().zip(&t.values) {
                            *a += w * b;
                        }
                    }
                }
            }
        }
        Ok(Self { atoms, continuous })
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    pub fn tabulated(&self) -> Option<&Tabulated> {
        self.continuous.as_ref()
    }

    /// Total probability mass.
    pub fn mass(&self) -> f64 {
        let a: f64 = self.atoms.iter().map(|a| a.1).sum();
        a + self.continuous.as_ref().map_or(0.0, |t| t.integrate(|_| 1.0))
    }

    /// Largest relative violation of `p(-l) = e^{-l} p(l)`, over atom pairs
    /// and over tabulated points where `p(l)` is not negligible.
    pub fn symmetry_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for &(l, m) in self.atoms.iter().filter(|a| a.0 > 0.0) {
            let mirror: f64 =
                self.atoms.iter().filter(|a| (a.0 + l).abs() < 1e-12).map(|a| a.1).sum();
            let expect = math::exp(-l) * m;
            worst = worst.max((mirror - expect).abs() / m);
        }
        if let Some(t) = &self.continuous {
            let n = t.values.len();
            for i in n / 2..n {
                let l = t.abscissa(i);
                let p = t.values[i];
                if p < 1e-12 {
                    continue;
                }
                let expect = math::exp(-l) * p;
                worst = worst.max((t.values[n - 1 - i] - expect).abs() / p);
            }
        }
        worst
    }

    /// `I = E[1 - log2(1 + e^{-L})]` over the full line.
    pub fn mutual_information(&self) -> f64 {
        let kernel = |l: f64| 1.0 - log2_1p_exp_neg(l);
        let a: f64 = self.atoms.iter().map(|&(l, m)| m * kernel(l)).sum();
        a + self.continuous.as_ref().map_or(0.0, |t| t.integrate(kernel))
    }

    /// The same quantity using symmetry to fold the density onto `l >= 0`:
    /// `I = int_0^inf p(l) [1 - log2(1+e^{-l}) + e^{-l}(1 - log2(1+e^{l}))] dl`.
    pub fn mutual_information_folded(&self) -> f64 {
        let kernel = |l: f64| {
            if l < 0.0 {
                return 0.0;
            }
            let w = if l == 0.0 { 0.5 } else { 1.0 };
            w * ((1.0 - log2_1p_exp_neg(l)) + math::exp(-l) * (1.0 - log2_1p_exp_neg(-l)))
        };
        let a: f64 = self.atoms.iter().map(|&(l, m)| m * kernel(l)).sum();
        a + self.continuous.as_ref().map_or(0.0, |t| t.integrate(kernel))
    }
}

/// Mutual information of a symmetric density.
pub fn mi_of_symmetric_density(d: &SymmetricDensity) -> f64 {
    d.mutual_information()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::mutual_info_bsc;

    #[test]
    fn bsc_matches_closed_form() {
        for &eps in &[0.0, 0.01, 0.1, 0.3, 0.5] {
            let d = SymmetricDensity::bsc(eps).unwrap();
            let want = mutual_info_bsc(eps).unwrap();
            assert!((d.mutual_information() - want).abs() < 1e-11, "eps={eps}");
            assert!(d.symmetry_defect() < 1e-9);
        }
    }

    #[test]
    fn gaussian_is_symmetric_and_normalized() {
        let d = SymmetricDensity::gaussian(3.0).unwrap();
        assert!((d.mass() - 1.0).abs() < 1e-10);
        assert!(d.symmetry_defect() < 1e-6);
        let i = d.mutual_information();
        assert!((i - d.mutual_information_folded()).abs() < 1e-8);
        assert!(i > 0.0 && i < 1.0);
    }

    #[test]
    fn mixture_is_linear() {
        let a = SymmetricDensity::bsc(0.1).unwrap();
        let b = SymmetricDensity::gaussian(2.0).unwrap();
        let m = SymmetricDensity::mixture(&[(0.3, &a), (0.7, &b)]).unwrap();
        let want = 0.3 * a.mutual_information() + 0.7 * b.mutual_information();
        assert!((m.mutual_information_folded() - want).abs() < 1e-8);
    }

    #[test]
    fn bad_weights() {
        let a = SymmetricDensity::bsc(0.1).unwrap();
        assert!(SymmetricDensity::mixture(&[(0.5, &a)]).is_err());
    }
}
