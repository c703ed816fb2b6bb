//! Variable-node degree distributions and their design by linear
//! programming.
//!
//! For a fixed channel the variable-node transfer function of an ensemble is
//! linear in the edge fractions `lambda_i`, so maximizing the design rate
//! (equivalently `sum_i lambda_i / i`) subject to an open decoding tunnel on
//! a grid of crossover probabilities is an LP. Optional rows add the
//! small-error stability condition and the bound that keeps the subgraph of
//! degree-2 and degree-3 variable nodes cycle free.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::channel::{biawgn_limit_db, bsc_limit_db, reliability_clamped, Quantizer};
use crate::de::{density_evolution, threshold_ebn0, ChannelFamily, DeConfig};
use crate::exit::{check_exit_inv_unchecked, stability_check, var_exit_mixture_with, ChannelModel};
use crate::lp::{lp_solve, LpProblem};
use crate::math;
use crate::{Error, Result};

/// Edge-perspective variable degree distribution of a check-regular
/// ensemble.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeDistribution {
    /// `(degree, lambda)` sorted by degree, zero fractions dropped.
    lambda: Vec<(usize, f64)>,
    d_c: usize,
}

impl DegreeDistribution {
    /// Validates and normalizes `(degree, lambda)` pairs.
    pub fn new(lambda: &[(usize, f64)], d_c: usize) -> Result<Self> {
        if d_c < 2 {
            return Err(Error::InvalidDegree { degree: d_c, min: 2 });
        }
        let mut entries: Vec<(usize, f64)> = Vec::with_capacity(lambda.len());
        for &(d, l) in lambda {
            if d < 2 {
                return Err(Error::InvalidDegree { degree: d, min: 2 });
            }
            if !(l >= 0.0) || !l.is_finite() {
                return Err(Error::InvalidDistribution(format!("lambda_{d} = {l}")));
            }
            if l == 0.0 {
                continue;
            }
            match entries.iter_mut().find(|e| e.0 == d) {
                Some(_) => {
                    return Err(Error::InvalidDistribution(format!("degree {d} listed twice")))
                }
                None => entries.push((d, l)),
            }
        }
        let total: f64 = entries.iter().map(|e| e.1).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidDistribution(format!("fractions sum to {total}")));
        }
        entries.sort_by_key(|e| e.0);
        for e in &mut entries {
            e.1 /= total;
        }
        Ok(Self { lambda: entries, d_c })
    }

    pub fn regular(d_v: usize, d_c: usize) -> Result<Self> {
        Self::new(&[(d_v, 1.0)], d_c)
    }

    /// Builds the edge perspective from node fractions `Lambda_i`.
    pub fn from_node_perspective(nodes: &[(usize, f64)], d_c: usize) -> Result<Self> {
        let norm: f64 = nodes.iter().map(|&(d, n)| d as f64 * n).sum();
        if !(norm > 0.0) {
            return Err(Error::InvalidDistribution("empty node distribution".into()));
        }
        let node_total: f64 = nodes.iter().map(|e| e.1).sum();
        if (node_total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidDistribution(format!("node fractions sum to {node_total}")));
        }
        let edges: Vec<(usize, f64)> =
            nodes.iter().map(|&(d, n)| (d, d as f64 * n / norm)).collect();
        Self::new(&edges, d_c)
    }

    pub fn lambda(&self) -> &[(usize, f64)] {
        &self.lambda
    }

    pub fn lambda_of(&self, degree: usize) -> f64 {
        self.lambda.iter().find(|e| e.0 == degree).map_or(0.0, |e| e.1)
    }

    pub fn check_degree(&self) -> usize {
        self.d_c
    }

    pub fn max_degree(&self) -> usize {
        self.lambda.last().map_or(0, |e| e.0)
    }

    /// `sum_j lambda_j / j`, the inverse mean variable degree.
    pub fn inverse_mean_degree(&self) -> f64 {
        self.lambda.iter().map(|&(d, l)| l / d as f64).sum()
    }

    /// Node-perspective fractions `Lambda_i = (lambda_i/i) / sum_j (lambda_j/j)`.
    pub fn node_perspective(&self) -> Vec<(usize, f64)> {
        let s = self.inverse_mean_degree();
        self.lambda.iter().map(|&(d, l)| (d, l / d as f64 / s)).collect()
    }

    /// `R = 1 - (1/d_c) / sum_j (lambda_j/j)`.
    pub fn design_rate(&self) -> f64 {
        1.0 - (1.0 / self.d_c as f64) / self.inverse_mean_degree()
    }
}

/// Edge to node perspective.
pub fn edge_to_node(dist: &DegreeDistribution) -> Vec<(usize, f64)> {
    dist.node_perspective()
}

/// Node to edge perspective.
pub fn node_to_edge(nodes: &[(usize, f64)], d_c: usize) -> Result<DegreeDistribution> {
    DegreeDistribution::from_node_perspective(nodes, d_c)
}

/// `R = 1 - (1/d_c) / sum_j (lambda_j/j)`.
pub fn design_rate(dist: &DegreeDistribution) -> f64 {
    dist.design_rate()
}

/// Result of the cycle-free existence test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CycleFree {
    pub ok: bool,
    /// Bound minus `3 lambda_2 + 4 lambda_3`.
    pub slack: f64,
}

/// Whether a Tanner graph of length `n` can keep its degree-2/3 variable
/// nodes free of cycles: `3 lambda_2 + 4 lambda_3 <= (6/d_c)((1-R) - 1/n)/(1-R)`.
pub fn cycle_free_check(dist: &DegreeDistribution, n: usize) -> Result<CycleFree> {
    if n == 0 {
        return Err(Error::OutOfRange { name: "block length", value: 0.0 });
    }
    let rate = dist.design_rate();
    if rate >= 1.0 {
        return Err(Error::OutOfRange { name: "design rate", value: rate });
    }
    let bound = cycle_free_bound(dist.check_degree(), rate, n);
    let lhs = 3.0 * dist.lambda_of(2) + 4.0 * dist.lambda_of(3);
    Ok(CycleFree { ok: lhs <= bound, slack: bound - lhs })
}

fn cycle_free_bound(d_c: usize, rate: f64, n: usize) -> f64 {
    let one_minus_r = 1.0 - rate;
    6.0 / d_c as f64 * (one_minus_r - 1.0 / n as f64) / one_minus_r
}

/// Block length and starting rate for the cycle-free LP row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CycleFreeTarget {
    pub block_length: usize,
    /// Rate used in the bound on the first pass.
    pub rate_guess: f64,
}

/// Settings of the design LP.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizeConfig {
    pub d_c: usize,
    pub d_v_max: usize,
    /// Number of crossover samples in the tunnel constraint.
    pub grid_points: usize,
    /// Relative slack: rows read `f_v <= (1 - delta) f_c^-1`.
    pub delta: f64,
    pub enforce_stability: bool,
    /// Relative slack of the stability row, `(lambda_2 + 2 eps lambda_3)(d_c - 1) <= 1 - s`.
    /// Density evolution contracts by about `1 - s` per iteration near zero.
    pub stability_slack: f64,
    pub cycle_free: Option<CycleFreeTarget>,
    /// Density evolution used to re-validate the result.
    pub de: DeConfig,
}

impl OptimizeConfig {
    pub fn new(d_c: usize, d_v_max: usize) -> Self {
        Self {
            d_c,
            d_v_max,
            grid_points: 400,
            delta: 1e-6,
            enforce_stability: true,
            stability_slack: 1e-2,
            cycle_free: Some(CycleFreeTarget { block_length: 10_000, rate_guess: 0.5 }),
            de: DeConfig { max_iters: 100_000, ..DeConfig::default() },
        }
    }
}

/// An optimized ensemble.
#[derive(Debug, Clone, PartialEq)]
pub struct Design {
    pub dist: DegreeDistribution,
    pub rate: f64,
    pub stability_margin: f64,
    pub delta_used: f64,
}

/// Crossover samples: half uniform on `(0, 1/2)`, half geometric from
/// `1e-6` up to the first uniform point.
pub fn constraint_grid(points: usize) -> Vec<f64> {
    let n_uni = (points / 2).max(1);
    let n_geo = points.saturating_sub(n_uni).max(1);
    let step = 0.5 / (n_uni + 1) as f64;
    let mut grid: Vec<f64> = (1..=n_uni).map(|k| step * k as f64).collect();
    let (lo, hi) = (math::ln(1e-6), math::ln(step));
    for k in 0..n_geo {
        let f = k as f64 / n_geo as f64;
        grid.push(math::exp(lo + f * (hi - lo)));
    }
    grid.sort_by(|a, b| a.total_cmp(b));
    grid.dedup();
    grid
}

struct DesignLp {
    degrees: Vec<usize>,
    problem: LpProblem,
}

fn build_lp(
    ch: &ChannelModel,
    cfg: &OptimizeConfig,
    delta: f64,
    with_stability: bool,
    cycle_bound: Option<f64>,
    rows: &[(f64, Vec<f64>)],
) -> DesignLp {
    let degrees: Vec<usize> = (2..=cfg.d_v_max).collect();
    let nv = degrees.len();
    let mut p = LpProblem::new(nv);
    let obj: Vec<f64> = degrees.iter().map(|&d| 1.0 / d as f64).collect();
    p.maximize(&obj);
    let d_c = cfg.d_c as f64;
    for (eps, fv) in rows {
        p.add_le(fv, (1.0 - delta) * check_exit_inv_unchecked(*eps, d_c));
    }
    if with_stability {
        let mut row = vec![0.0; nv];
        row[0] = d_c - 1.0;
        if nv > 1 {
            row[1] = 2.0 * ch.hard_crossover() * (d_c - 1.0);
        }
        p.add_le(&row, 1.0 - cfg.stability_slack);
    }
    if let Some(bound) = cycle_bound {
        let mut row = vec![0.0; nv];
        row[0] = 3.0;
        if nv > 1 {
            row[1] = 4.0;
        }
        p.add_le(&row, bound);
    }
    p.add_eq(&vec![1.0; nv], 1.0);
    DesignLp { degrees, problem: p }
}

/// Crossovers where a hard or quantized variable-node transfer function
/// jumps, `D_av = D_ch,w / j`, together with points just either side.
pub fn breakpoints(ch: &ChannelModel, d_v_max: usize) -> Vec<f64> {
    let reliabilities: Vec<f64> = match ch {
        ChannelModel::Hard { epsilon } => vec![reliability_clamped(*epsilon)],
        ChannelModel::Quantized(dec) => dec.subchannels().iter().map(|s| s.reliability).collect(),
        ChannelModel::Soft(_) => Vec::new(),
    };
    let mut out = Vec::new();
    for d_ch in reliabilities.into_iter().filter(|&d| d > 0.0) {
        for j in 1..d_v_max {
            let eps = 1.0 / (1.0 + math::exp(d_ch / j as f64));
            for e in [eps * (1.0 - 1e-9), eps, eps * (1.0 + 1e-9)] {
                if e > 1e-6 && e < 0.5 {
                    out.push(e);
                }
            }
        }
    }
    out
}

fn transfer_rows(ch: &ChannelModel, cfg: &OptimizeConfig) -> Vec<(f64, Vec<f64>)> {
    let mut grid = constraint_grid(cfg.grid_points);
    grid.extend(breakpoints(ch, cfg.d_v_max));
    grid.sort_by(|a, b| a.total_cmp(b));
    grid.dedup();
    rows_at(ch, cfg, grid)
}

fn rows_at(ch: &ChannelModel, cfg: &OptimizeConfig, grid: Vec<f64>) -> Vec<(f64, Vec<f64>)> {
    let mut pmf = Vec::new();
    grid.into_iter()
        .map(|eps| {
            let fv = (2..=cfg.d_v_max).map(|d| ch.var_exit_with(eps, d, &mut pmf)).collect();
            (eps, fv)
        })
        .collect()
}

fn solve_once(
    ch: &ChannelModel,
    cfg: &OptimizeConfig,
    delta: f64,
    rows: &mut Vec<(f64, Vec<f64>)>,
) -> Result<DegreeDistribution> {
    let bound_for = |rate: f64| {
        cfg.cycle_free
            .map(|t| cycle_free_bound(cfg.d_c, rate.min(1.0 - 1e-9), t.block_length))
    };
    let mut rate = cfg.cycle_free.map_or(0.5, |t| t.rate_guess);
    let passes = if cfg.cycle_free.is_some() { 2 } else { 1 };
    let mut dist = None;
    for _ in 0..passes {
        let mut rounds = 0;
        let d = loop {
            let lp = build_lp(ch, cfg, delta, cfg.enforce_stability, bound_for(rate), rows);
            let sol = match lp_solve(&lp.problem) {
                Ok(s) => s,
                Err(Error::LpInfeasible { .. }) => {
                    return Err(Error::DesignInfeasible {
                        binding: diagnose(ch, cfg, delta, rows, rate),
                    })
                }
                Err(e) => return Err(e),
            };
            let pairs: Vec<(usize, f64)> = lp
                .degrees
                .iter()
                .zip(&sol.x)
                .filter(|(_, &x)| x > 1e-12)
                .map(|(&d, &x)| (d, x))
                .collect();
            let total: f64 = pairs.iter().map(|p| p.1).sum();
            let pairs: Vec<(usize, f64)> =
                pairs.into_iter().map(|(d, x)| (d, x / total)).collect();
            let d = DegreeDistribution::new(&pairs, cfg.d_c)?;
            let cuts = violations(ch, cfg, delta, &d);
            rounds += 1;
            if cuts.is_empty() || rounds > 8 {
                break d;
            }
            rows.extend(rows_at(ch, cfg, cuts));
        };
        rate = d.design_rate();
        dist = Some(d);
    }
    Ok(dist.expect("at least one pass"))
}

/// Points of a scan 20 times finer than the constraint grid where the
/// tunnel is narrower than half the requested slack.
fn violations(ch: &ChannelModel, cfg: &OptimizeConfig, delta: f64, d: &DegreeDistribution) -> Vec<f64> {
    let mut pmf = Vec::new();
    let d_c = cfg.d_c as f64;
    constraint_grid(20 * cfg.grid_points)
        .into_iter()
        .filter(|&eps| {
            let fv = var_exit_mixture_with(eps, d, ch, &mut pmf);
            fv > (1.0 - 0.5 * delta) * check_exit_inv_unchecked(eps, d_c)
        })
        .collect()
}

fn diagnose(
    ch: &ChannelModel,
    cfg: &OptimizeConfig,
    delta: f64,
    rows: &[(f64, Vec<f64>)],
    rate: f64,
) -> &'static str {
    let bound = cfg.cycle_free.map(|t| cycle_free_bound(cfg.d_c, rate, t.block_length));
    if lp_solve(&build_lp(ch, cfg, delta, false, None, rows).problem).is_err() {
        "decoding tunnel"
    } else if lp_solve(&build_lp(ch, cfg, delta, cfg.enforce_stability, None, rows).problem).is_ok()
        && bound.is_some()
    {
        "cycle-free"
    } else {
        "stability"
    }
}

/// Solves the design LP without the density-evolution re-validation.
pub fn design_lp(ch: &ChannelModel, cfg: &OptimizeConfig) -> Result<DegreeDistribution> {
    solve_once(ch, cfg, cfg.delta, &mut transfer_rows(ch, cfg))
}

/// Maximizes the design rate for a fixed channel and check degree.
///
/// The result is re-validated by a full density-evolution run; on failure
/// the LP is solved once more with twice the slack.
pub fn optimize(ch: &ChannelModel, cfg: &OptimizeConfig) -> Result<Design> {
    if cfg.d_v_max < 2 {
        return Err(Error::InvalidDegree { degree: cfg.d_v_max, min: 2 });
    }
    if cfg.d_c < 2 {
        return Err(Error::InvalidDegree { degree: cfg.d_c, min: 2 });
    }
    let mut rows = transfer_rows(ch, cfg);
    let mut delta = cfg.delta;
    for _ in 0..2 {
        let dist = solve_once(ch, cfg, delta, &mut rows)?;
        let stability = stability_check(&dist, ch.hard_crossover());
        if density_evolution(&dist, ch, &cfg.de)?.converged
            && (stability.stable || !cfg.enforce_stability)
        {
            return Ok(Design {
                rate: dist.design_rate(),
                stability_margin: stability.margin,
                dist,
                delta_used: delta,
            });
        }
        delta *= 2.0;
    }
    Err(Error::DesignNotConverged)
}

/// Smallest Eb/N0 in `bracket` (to within `tol` dB) at which the design LP
/// reaches `target_rate`, with the design found there.
pub fn min_ebn0_for_rate(
    target_rate: f64,
    family: &ChannelFamily,
    cfg: &OptimizeConfig,
    bracket: (f64, f64),
    tol: f64,
) -> Result<(f64, Design)> {
    let attempt = |db: f64| -> Result<Option<Design>> {
        let ch = family.at_ebn0(db, target_rate)?;
        match optimize(&ch, cfg) {
            Ok(d) if d.rate >= target_rate => Ok(Some(d)),
            Ok(_) | Err(Error::DesignInfeasible { .. }) | Err(Error::DesignNotConverged) => Ok(None),
            Err(e) => Err(e),
        }
    };
    let (mut lo, mut hi) = bracket;
    let mut best = match attempt(hi)? {
        Some(d) => d,
        None => return Err(Error::Bracket { low: lo, high: hi }),
    };
    if attempt(lo)?.is_some() {
        return Err(Error::Bracket { low: lo, high: hi });
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        match attempt(mid)? {
            Some(d) => {
                hi = mid;
                best = d;
            }
            None => lo = mid,
        }
    }
    Ok((hi, best))
}

/// What the quantizer is tuned for.
#[derive(Debug, Clone, PartialEq)]
pub enum QuantizerTarget {
    /// A fixed ensemble; the objective is its DE threshold.
    Fixed(DegreeDistribution),
    /// Re-design the ensemble for every boundary; the objective is the
    /// smallest Eb/N0 at which `rate` is reachable.
    Designed { rate: f64, cfg: OptimizeConfig },
}

/// Best boundary of a BSQC quantizer `[0, zeta_1, inf]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantizerChoice {
    pub zeta1: f64,
    pub threshold_db: f64,
}

/// Settings of the boundary search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantizerSearch {
    /// Search interval for `zeta_1`.
    pub bracket: (f64, f64),
    pub zeta_tol: f64,
    /// Eb/N0 interval that must straddle every threshold.
    pub ebn0_bracket: (f64, f64),
    pub ebn0_tol: f64,
}

impl Default for QuantizerSearch {
    fn default() -> Self {
        Self { bracket: (0.5, 5.0), zeta_tol: 0.01, ebn0_bracket: (0.0, 10.0), ebn0_tol: 1e-3 }
    }
}

/// Eb/N0 objective for a BSQC boundary.
pub fn quantizer_objective(target: &QuantizerTarget, zeta1: f64, s: &QuantizerSearch) -> Result<f64> {
    let family = ChannelFamily::Quantized(Quantizer::bsqc(zeta1)?);
    match target {
        QuantizerTarget::Fixed(dist) => {
            threshold_ebn0(dist, &family, s.ebn0_bracket, s.ebn0_tol, &DeConfig::default())
        }
        QuantizerTarget::Designed { rate, cfg } => {
            Ok(min_ebn0_for_rate(*rate, &family, cfg, s.ebn0_bracket, s.ebn0_tol)?.0)
        }
    }
}

/// Golden-section search for the `zeta_1` with the lowest threshold.
pub fn best_quantizer(target: &QuantizerTarget, s: &QuantizerSearch) -> Result<QuantizerChoice> {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let f = |z: f64| quantizer_objective(target, z, s);
    let (a0, b0) = s.bracket;
    if !(a0 > 0.0 && b0 > a0) {
        return Err(Error::OutOfRange { name: "zeta_1 bracket", value: a0 });
    }
    let (mut a, mut b) = (a0, b0);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    while b - a > s.zeta_tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d)?;
        }
    }
    let (zeta1, threshold_db) = if fc <= fd { (c, fc) } else { (d, fd) };
    let fa = f(a0)?;
    let fb = f(b0)?;
    if fa < threshold_db - s.ebn0_tol {
        return Err(Error::NotUnimodal { at: a0 });
    }
    if fb < threshold_db - s.ebn0_tol {
        return Err(Error::NotUnimodal { at: b0 });
    }
    Ok(QuantizerChoice { zeta1, threshold_db })
}

/// One cell of a design sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub rate: f64,
    pub channel: &'static str,
    pub d_c: usize,
    pub threshold_db: f64,
    pub capacity_gap_db: f64,
    pub biawgn_limit_db: f64,
    pub bsc_limit_db: f64,
    pub dist: DegreeDistribution,
}

/// Settings for [`design_sweep`].
#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub check_degrees: Vec<usize>,
    pub d_v_max: usize,
    pub grid_points: usize,
    pub enforce_stability: bool,
    /// Block length of the cycle-free row, `None` to drop the row.
    pub cycle_free_block_length: Option<usize>,
    pub ebn0_bracket: (f64, f64),
    pub ebn0_tol: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            check_degrees: (2..=100).collect(),
            d_v_max: 100,
            grid_points: 400,
            enforce_stability: true,
            cycle_free_block_length: Some(10_000),
            ebn0_bracket: (-1.0, 12.0),
            ebn0_tol: 0.01,
        }
    }
}

/// For each rate and channel family, the check degree whose optimized
/// ensemble reaches the rate at the lowest Eb/N0. The gap is measured
/// against the BIAWGN capacity limit.
pub fn design_sweep(
    rates: &[f64],
    families: &[ChannelFamily],
    sweep: &SweepConfig,
) -> Result<Vec<SweepRow>> {
    let mut out = Vec::new();
    for &rate in rates {
        let biawgn = biawgn_limit_db(rate)?;
        let bsc = bsc_limit_db(rate)?;
        for family in families {
            let mut best: Option<SweepRow> = None;
            for &d_c in &sweep.check_degrees {
                let cfg = OptimizeConfig {
                    grid_points: sweep.grid_points,
                    enforce_stability: sweep.enforce_stability,
                    cycle_free: sweep
                        .cycle_free_block_length
                        .map(|n| CycleFreeTarget { block_length: n, rate_guess: rate }),
                    ..OptimizeConfig::new(d_c, sweep.d_v_max)
                };
                let (db, design) = match min_ebn0_for_rate(
                    rate,
                    family,
                    &cfg,
                    sweep.ebn0_bracket,
                    sweep.ebn0_tol,
                ) {
                    Ok(r) => r,
                    Err(Error::Bracket { .. }) => continue,
                    Err(e) => return Err(e),
                };
                if best.as_ref().map_or(true, |b| db < b.threshold_db) {
                    best = Some(SweepRow {
                        rate,
                        channel: family.name(),
                        d_c,
                        threshold_db: db,
                        capacity_gap_db: db - biawgn,
                        biawgn_limit_db: biawgn,
                        bsc_limit_db: bsc,
                        dist: design.dist,
                    });
                }
            }
            if let Some(row) = best {
                out.push(row);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(DegreeDistribution::new(&[(1, 1.0)], 6).is_err());
        assert!(DegreeDistribution::new(&[(3, 0.5)], 6).is_err());
        assert!(DegreeDistribution::new(&[(3, -0.5), (4, 1.5)], 6).is_err());
        assert!(DegreeDistribution::new(&[(3, 0.5), (3, 0.5)], 6).is_err());
        assert!(DegreeDistribution::new(&[(3, 1.0)], 1).is_err());
        let d = DegreeDistribution::new(&[(5, 0.25), (3, 0.75), (9, 0.0)], 6).unwrap();
        assert_eq!(d.lambda(), &[(3, 0.75), (5, 0.25)]);
        assert_eq!(d.max_degree(), 5);
    }

    #[test]
    fn perspectives() {
        let d = DegreeDistribution::regular(3, 6).unwrap();
        assert_eq!(d.node_perspective(), vec![(3, 1.0)]);
        let d = DegreeDistribution::new(&[(2, 0.5), (4, 0.5)], 6).unwrap();
        let n = edge_to_node(&d);
        assert!((n[0].1 - 2.0 / 3.0).abs() < 1e-15);
        assert!((n[1].1 - 1.0 / 3.0).abs() < 1e-15);
        let back = node_to_edge(&n, 6).unwrap();
        for (a, b) in back.lambda().iter().zip(d.lambda()) {
            assert_eq!(a.0, b.0);
            assert!((a.1 - b.1).abs() < 1e-12);
        }
    }

    #[test]
    fn rates() {
        assert!((DegreeDistribution::regular(3, 6).unwrap().design_rate() - 0.5).abs() < 1e-15);
        assert!(
            (DegreeDistribution::regular(7, 112).unwrap().design_rate() - 0.9375).abs() < 1e-15
        );
    }

    #[test]
    fn cycle_free_examples() {
        let d = DegreeDistribution::new(&[(4, 0.5), (8, 0.5)], 10).unwrap();
        assert!(cycle_free_check(&d, 100).unwrap().ok);
        for dc in 2..40 {
            let d = DegreeDistribution::regular(3, dc).unwrap();
            assert!(!cycle_free_check(&d, 10_000).unwrap().ok, "dc={dc}");
        }
        for dc in 3..40 {
            let d = DegreeDistribution::regular(2, dc).unwrap();
            assert!(!cycle_free_check(&d, 10_000).unwrap().ok, "dc={dc}");
        }
        assert!(cycle_free_check(&DegreeDistribution::regular(4, 8).unwrap(), 0).is_err());
    }

    #[test]
    fn grid_shape() {
        let g = constraint_grid(400);
        assert_eq!(g.len(), 400);
        assert!((g[0] - 1e-6).abs() < 1e-18);
        assert!(*g.last().unwrap() < 0.5);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn perfect_channel_prefers_degree_two() {
        let mut cfg = OptimizeConfig::new(6, 10);
        cfg.enforce_stability = false;
        cfg.cycle_free = None;
        let design = optimize(&ChannelModel::hard(0.0).unwrap(), &cfg).unwrap();
        assert!((design.dist.lambda_of(2) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn hopeless_channel_is_infeasible() {
        let cfg = OptimizeConfig::new(6, 20);
        let r = optimize(&ChannelModel::hard(0.3).unwrap(), &cfg);
        assert!(matches!(r, Err(Error::DesignInfeasible { .. })), "{r:?}");
    }

    #[test]
    fn optimized_design_satisfies_constraints() {
        let cfg = OptimizeConfig::new(8, 30);
        let ch = ChannelModel::hard(0.03).unwrap();
        let design = optimize(&ch, &cfg).unwrap();
        let total: f64 = design.dist.lambda().iter().map(|e| e.1).sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert!(design.stability_margin > 0.0);
        assert!(cycle_free_check(&design.dist, 10_000).unwrap().ok);
        assert!(density_evolution(&design.dist, &ch, &DeConfig::default()).unwrap().converged);
    }
}
