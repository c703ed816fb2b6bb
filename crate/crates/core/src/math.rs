//! Scalar helpers shared across the crate. All transcendental functions go
//! through `libm` so results are identical with and without `std`.

pub(crate) const LN_2: f64 = core::f64::consts::LN_2;
pub(crate) const SQRT_2: f64 = core::f64::consts::SQRT_2;

#[inline]
pub(crate) fn ln(x: f64) -> f64 {
    libm::log(x)
}

#[inline]
pub(crate) fn ln_1p(x: f64) -> f64 {
    libm::log1p(x)
}

#[inline]
pub(crate) fn log2(x: f64) -> f64 {
    libm::log2(x)
}

#[inline]
pub(crate) fn exp(x: f64) -> f64 {
    libm::exp(x)
}

#[inline]
pub(crate) fn powf(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}

#[inline]
pub(crate) fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub(crate) fn floor(x: f64) -> f64 {
    libm::floor(x)
}

/// Gaussian tail probability `Q(x) = P(Z > x)` for a standard normal `Z`.
#[inline]
pub fn q_function(x: f64) -> f64 {
    0.5 * libm::erfc(x / SQRT_2)
}

/// Probability that `N(mean, sd^2)` falls in `[a, b]`, evaluated on whichever
/// tail keeps the subtraction well conditioned. `a` may be `-inf`, `b` `+inf`.
pub(crate) fn gaussian_mass(mean: f64, sd: f64, a: f64, b: f64) -> f64 {
    if !(b > a) {
        return 0.0;
    }
    let za = (a - mean) / sd;
    let zb = (b - mean) / sd;
    let mass = if za >= 0.0 {
        q_function(za) - q_function(zb)
    } else if zb <= 0.0 {
        q_function(-zb) - q_function(-za)
    } else {
        1.0 - q_function(-za) - q_function(zb)
    };
    mass.max(0.0)
}

/// Binomial probabilities `b(k; n, p)` for `k = 0..=n`.
pub(crate) fn binomial_pmf(n: usize, p: f64, out: &mut alloc::vec::Vec<f64>) {
    out.clear();
    out.resize(n + 1, 0.0);
    if p <= 0.0 {
        out[0] = 1.0;
        return;
    }
    if p >= 1.0 {
        out[n] = 1.0;
        return;
    }
    // Build from the mode outward to avoid underflowing the starting term.
    let q = 1.0 - p;
    let ratio = p / q;
    let mode = (((n + 1) as f64) * p) as usize;
    let mode = mode.min(n);
    let log_mode = ln_choose(n, mode) + (mode as f64) * ln(p) + ((n - mode) as f64) * ln(q);
    out[mode] = exp(log_mode);
    for k in mode..n {
        out[k + 1] = out[k] * ((n - k) as f64) / ((k + 1) as f64) * ratio;
    }
    for k in (0..mode).rev() {
        out[k] = out[k + 1] * ((k + 1) as f64) / ((n - k) as f64) / ratio;
    }
}

/// Binomial CDF `B(k; n, p)` with `B(-1; n, p) = 0`.
#[cfg(test)]
pub(crate) fn binomial_cdf(k: i64, n: usize, p: f64) -> f64 {
    if k < 0 {
        return 0.0;
    }
    if k as usize >= n {
        return 1.0;
    }
    let mut pmf = alloc::vec::Vec::with_capacity(n + 1);
    binomial_pmf(n, p, &mut pmf);
    pmf[..=k as usize].iter().sum::<f64>().min(1.0)
}

pub(crate) fn ln_choose(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    let mut acc = 0.0;
    for i in 0..k {
        acc += ln(((n - i) as f64) / ((i + 1) as f64));
    }
    acc
}

/// Composite Simpson rule on `[a, b]` with `intervals` (rounded up to even).
pub(crate) fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, intervals: usize) -> f64 {
    let n = if intervals % 2 == 0 { intervals.max(2) } else { intervals + 1 };
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + h * i as f64);
    }
    acc * h / 3.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;

    #[test]
    fn binomial_pmf_sums_to_one() {
        let mut v = Vec::new();
        for &(n, p) in &[(1usize, 0.3), (6, 0.5), (99, 1e-7), (99, 0.49), (40, 0.02)] {
            binomial_pmf(n, p, &mut v);
            let s: f64 = v.iter().sum();
            assert!((s - 1.0).abs() < 1e-12, "n={n} p={p} sum={s}");
        }
    }

    #[test]
    fn binomial_cdf_small_cases() {
        assert_eq!(binomial_cdf(-1, 4, 0.3), 0.0);
        assert!((binomial_cdf(0, 2, 0.2) - 0.64).abs() < 1e-15);
        assert!((binomial_cdf(1, 2, 0.2) - 0.96).abs() < 1e-15);
        assert_eq!(binomial_cdf(2, 2, 0.2), 1.0);
    }

    #[test]
    fn gaussian_mass_partitions() {
        let (m, s) = (2.0, 1.7);
        let parts = [
            gaussian_mass(m, s, f64::NEG_INFINITY, -1.0),
            gaussian_mass(m, s, -1.0, 0.5),
            gaussian_mass(m, s, 0.5, 4.0),
            gaussian_mass(m, s, 4.0, f64::INFINITY),
        ];
        let total: f64 = parts.iter().sum();
        assert!((total - 1.0).abs() < 1e-14);
    }

    #[test]
    fn simpson_integrates_cubic_exactly() {
        let v = simpson(|x| x * x * x - 2.0 * x, 0.0, 3.0, 4);
        assert!((v - (81.0 / 4.0 - 9.0)).abs() < 1e-12);
    }
}
