//! The binary message-passing decoder.
//!
//! Messages are signs. A variable node weighs its channel sign by the
//! sub-channel reliability `D_ch,w` and every incoming check message by a
//! common reliability `D_av`, and sends the sign of the extrinsic sum; a
//! zero sum resolves to the channel sign. `D_av` per iteration comes from a
//! supplied crossover sequence or is estimated from the fraction of
//! unsatisfied checks.
//!
//! [`Decoder::decode`] evaluates the weighted sums literally and
//! [`Decoder::decode_majority`] counts disagreeing messages against
//! per-sub-channel thresholds. Both produce bit-identical results.

use alloc::vec;
use alloc::vec::Vec;

use crate::channel::{reliability_clamped, SubChannelDecomposition};
use crate::exit::VndThresholds;
use crate::graph::TannerGraph;
use crate::math;
use crate::{Error, Result};

/// Sign and sub-channel index of one quantized channel output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ChannelObservation {
    pub negative: bool,
    pub subchannel: usize,
}

impl ChannelObservation {
    pub fn new(negative: bool, subchannel: usize) -> Self {
        Self { negative, subchannel }
    }

    /// `+1` or `-1`.
    pub fn sign(&self) -> i8 {
        if self.negative {
            -1
        } else {
            1
        }
    }
}

/// Where the check-message reliability of each iteration comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum ReliabilityMode {
    /// Entry `k` is the true a-priori crossover of iteration `k + 1`.
    Genie(Vec<f64>),
    /// Entry `k` is the predicted a-priori crossover of iteration `k + 1`.
    Schedule(Vec<f64>),
    /// Estimated from the syndrome of the latest variable-to-check messages.
    Adaptive,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecoderConfig {
    pub max_iterations: usize,
    pub mode: ReliabilityMode,
    pub decomposition: SubChannelDecomposition,
    /// Stop as soon as the hard decisions form a codeword.
    pub stop_on_syndrome: bool,
}

impl DecoderConfig {
    pub fn new(max_iterations: usize, mode: ReliabilityMode, decomposition: SubChannelDecomposition) -> Self {
        Self { max_iterations, mode, decomposition, stop_on_syndrome: true }
    }
}

/// Diagnostics of one iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationTrace {
    pub iteration: usize,
    /// Unsatisfied checks under the hard decisions.
    pub unsatisfied: usize,
    /// Negative variable-to-check messages (errors when `+1` was sent).
    pub negative_messages: usize,
    /// A-priori crossover used; 1/2 in iteration 0.
    pub eps_ec: f64,
    pub d_av: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecodeResult {
    /// `true` where the decision is `-1`.
    pub hard_decisions: Vec<bool>,
    pub iterations_used: usize,
    pub syndrome_satisfied: bool,
    /// `M_e` after every iteration, starting with iteration 0.
    pub per_iteration_unsatisfied: Vec<usize>,
    pub trace: Vec<IterationTrace>,
}

/// Number of unsatisfied checks for the decisions (`true` = `-1`).
pub fn syndrome(g: &TannerGraph, decisions: &[bool]) -> Result<(usize, bool)> {
    if decisions.len() != g.n_var() {
        return Err(Error::ObservationLength { expected: g.n_var(), got: decisions.len() });
    }
    let me = g
        .checks()
        .iter()
        .filter(|c| c.iter().fold(false, |p, &v| p ^ decisions[v]))
        .count();
    Ok((me, me == 0))
}

/// Estimated a-priori crossover from the fraction `eps_s = M_e / M` of
/// unsatisfied checks of a check-regular graph with degree `d_c`:
/// `eps_ec = (1 - (1 - 2 eps_s)^((d_c - 1)/d_c)) / 2`.
pub fn estimate_extrinsic_from_count(unsatisfied: usize, n_chk: usize, d_c: f64) -> f64 {
    if n_chk == 0 {
        return 0.0;
    }
    let eps_s = (unsatisfied as f64 / n_chk as f64).clamp(0.0, 0.5 - 1e-9);
    0.5 * (1.0 - math::powf(1.0 - 2.0 * eps_s, (d_c - 1.0) / d_c))
}

/// Matching estimate of the a-priori crossover of variable-to-check
/// messages, `(1 - (1 - 2 eps_s)^(1/d_c)) / 2`.
pub fn estimate_apriori_from_count(unsatisfied: usize, n_chk: usize, d_c: f64) -> f64 {
    if n_chk == 0 {
        return 0.0;
    }
    let eps_s = (unsatisfied as f64 / n_chk as f64).clamp(0.0, 0.5 - 1e-9);
    0.5 * (1.0 - math::powf(1.0 - 2.0 * eps_s, 1.0 / d_c))
}

/// Estimated a-priori crossover from the syndrome of variable-to-check
/// messages, given per check in graph order (`true` = negative).
pub fn estimate_extrinsic(g: &TannerGraph, v2c: &[Vec<bool>]) -> f64 {
    let me = v2c.iter().filter(|c| c.iter().fold(false, |p, &x| p ^ x)).count();
    let d_c = g.n_edges() as f64 / g.n_chk().max(1) as f64;
    estimate_extrinsic_from_count(me, g.n_chk(), d_c)
}

/// Whether a node with `n` extrinsic check inputs flips its channel sign
/// when `k` of them disagree with it.
#[inline]
fn flips(d_ch: f64, d_av: f64, n: usize, k: usize) -> bool {
    d_ch + d_av * ((n as i64 - 2 * k as i64) as f64) < 0.0
}

/// Majority rules for every sub-channel index `0..=W`.
///
/// With `n = d_v - 1` extrinsic inputs the outgoing sign equals the channel
/// sign unless more than `t_bar` inputs disagree with it. `t` is the largest
/// number of disagreeing inputs that still reverse a wrong channel sign,
/// `n - 1 - t_bar`. Both start from the closed-form floors and are then
/// aligned with the exact sign of the weighted sum.
pub fn majority_thresholds_table(
    d_v: usize,
    d_av: f64,
    dec: &SubChannelDecomposition,
) -> Vec<VndThresholds> {
    dec.reliability_table()
        .into_iter()
        .map(|d_ch| majority_rule(d_v.saturating_sub(1), d_av, d_ch))
        .collect()
}

fn majority_rule(n: usize, d_av: f64, d_ch: f64) -> VndThresholds {
    let ni = n as i64;
    let mut t_bar = if d_av > 0.0 {
        math::floor((d_av * n as f64 + d_ch) / (2.0 * d_av)).clamp(-1.0, n as f64) as i64
    } else {
        ni
    };
    while t_bar < ni && !flips(d_ch, d_av, n, (t_bar + 1) as usize) {
        t_bar += 1;
    }
    while t_bar >= 0 && flips(d_ch, d_av, n, t_bar as usize) {
        t_bar -= 1;
    }
    VndThresholds { t: ni - 1 - t_bar, t_bar }
}

/// Working state for decoding on one graph.
#[derive(Debug, Clone)]
pub struct Decoder {
    n_var: usize,
    n_chk: usize,
    /// Edge range of every check; edges are numbered check by check.
    chk_start: Vec<usize>,
    edge_var: Vec<usize>,
    /// Edges of every variable in its adjacency order.
    var_start: Vec<usize>,
    var_edges: Vec<usize>,
    v2c: Vec<bool>,
    c2v: Vec<bool>,
}

#[derive(Clone, Copy)]
enum Rule {
    Sum,
    Majority,
}

impl Decoder {
    pub fn new(g: &TannerGraph) -> Self {
        let mut chk_start = Vec::with_capacity(g.n_chk() + 1);
        let mut edge_var = Vec::with_capacity(g.n_edges());
        for c in g.checks() {
            chk_start.push(edge_var.len());
            edge_var.extend_from_slice(c);
        }
        chk_start.push(edge_var.len());
        // position of each (check, var) edge, looked up per variable
        let mut var_start = Vec::with_capacity(g.n_var() + 1);
        let mut acc = 0;
        for v in 0..g.n_var() {
            var_start.push(acc);
            acc += g.var_degree(v);
        }
        var_start.push(acc);
        let mut var_edges = vec![0; acc];
        for v in 0..g.n_var() {
            for (k, &c) in g.var(v).iter().enumerate() {
                let pos = g.check(c).iter().position(|&x| x == v).expect("consistent graph");
                var_edges[var_start[v] + k] = chk_start[c] + pos;
            }
        }
        let e = edge_var.len();
        Self {
            n_var: g.n_var(),
            n_chk: g.n_chk(),
            chk_start,
            edge_var,
            var_start,
            var_edges,
            v2c: vec![false; e],
            c2v: vec![false; e],
        }
    }

    pub fn n_var(&self) -> usize {
        self.n_var
    }

    /// Decodes by evaluating the weighted L-value sums.
    pub fn decode(&mut self, obs: &[ChannelObservation], cfg: &DecoderConfig) -> Result<DecodeResult> {
        self.run(obs, cfg, Rule::Sum)
    }

    /// Decodes with per-sub-channel majority rules.
    pub fn decode_majority(
        &mut self,
        obs: &[ChannelObservation],
        cfg: &DecoderConfig,
    ) -> Result<DecodeResult> {
        self.run(obs, cfg, Rule::Majority)
    }

    fn check_inputs(&self, obs: &[ChannelObservation], cfg: &DecoderConfig) -> Result<()> {
        if obs.len() != self.n_var {
            return Err(Error::ObservationLength { expected: self.n_var, got: obs.len() });
        }
        if cfg.max_iterations == 0 {
            return Err(Error::OutOfRange { name: "max_iterations", value: 0.0 });
        }
        if let ReliabilityMode::Genie(s) | ReliabilityMode::Schedule(s) = &cfg.mode {
            if s.len() < cfg.max_iterations {
                return Err(Error::ScheduleTooShort { needed: cfg.max_iterations, got: s.len() });
            }
            if let Some(&bad) = s.iter().find(|x| !(0.0..=0.5).contains(*x)) {
                return Err(Error::OutOfRange { name: "scheduled eps_ec", value: bad });
            }
        }
        let table = cfg.decomposition.reliability_table();
        for (v, o) in obs.iter().enumerate() {
            if o.subchannel >= table.len() {
                return Err(Error::SubchannelOutOfRange { variable: v, index: o.subchannel });
            }
        }
        Ok(())
    }

    /// Unsatisfied checks under the current variable-to-check messages.
    fn message_syndrome(&self) -> usize {
        (0..self.n_chk)
            .filter(|&c| {
                self.v2c[self.chk_start[c]..self.chk_start[c + 1]].iter().fold(false, |p, &x| p ^ x)
            })
            .count()
    }

    fn decision_syndrome(&self, decisions: &[bool]) -> usize {
        (0..self.n_chk)
            .filter(|&c| {
                self.edge_var[self.chk_start[c]..self.chk_start[c + 1]]
                    .iter()
                    .fold(false, |p, &v| p ^ decisions[v])
            })
            .count()
    }

    fn run(&mut self, obs: &[ChannelObservation], cfg: &DecoderConfig, rule: Rule) -> Result<DecodeResult> {
        self.check_inputs(obs, cfg)?;
        let d_ch = cfg.decomposition.reliability_table();
        let d_c = self.edge_var.len() as f64 / self.n_chk.max(1) as f64;

        // Iteration 0: forward the channel signs.
        for v in 0..self.n_var {
            for &e in &self.var_edges[self.var_start[v]..self.var_start[v + 1]] {
                self.v2c[e] = obs[v].negative;
            }
        }
        let mut decisions: Vec<bool> = obs.iter().map(|o| o.negative).collect();
        let mut me = self.decision_syndrome(&decisions);
        let mut unsatisfied = vec![me];
        let mut trace = vec![IterationTrace {
            iteration: 0,
            unsatisfied: me,
            negative_messages: self.v2c.iter().filter(|&&x| x).count(),
            eps_ec: 0.5,
            d_av: 0.0,
        }];
        let mut used = 0;
        let mut tables: Vec<Vec<VndThresholds>> = Vec::new();
        let mut final_tables: Vec<Vec<VndThresholds>> = Vec::new();

        for l in 1..=cfg.max_iterations {
            if cfg.stop_on_syndrome && me == 0 {
                break;
            }
            let eps_ec = match &cfg.mode {
                ReliabilityMode::Genie(s) | ReliabilityMode::Schedule(s) => s[l - 1],
                ReliabilityMode::Adaptive => {
                    estimate_extrinsic_from_count(self.message_syndrome(), self.n_chk, d_c)
                }
            };
            let d_av = reliability_clamped(eps_ec);

            // Check pass.
            for c in 0..self.n_chk {
                let r = self.chk_start[c]..self.chk_start[c + 1];
                let parity = self.v2c[r.clone()].iter().fold(false, |p, &x| p ^ x);
                for e in r {
                    self.c2v[e] = parity ^ self.v2c[e];
                }
            }

            if let Rule::Majority = rule {
                tables.clear();
                final_tables.clear();
            }

            // Variable pass and decisions.
            for v in 0..self.n_var {
                let edges = &self.var_edges[self.var_start[v]..self.var_start[v + 1]];
                let deg = edges.len();
                let o = obs[v];
                let dch = d_ch[o.subchannel];
                match rule {
                    Rule::Sum => {
                        let s = if o.negative { -dch } else { dch };
                        let total: i64 = edges.iter().map(|&e| if self.c2v[e] { -1 } else { 1 }).sum();
                        for &e in edges {
                            let m: i64 = if self.c2v[e] { -1 } else { 1 };
                            let lv = s + d_av * ((total - m) as f64);
                            self.v2c[e] = if lv == 0.0 { o.negative } else { lv < 0.0 };
                        }
                        let lv = s + d_av * (total as f64);
                        decisions[v] = if lv == 0.0 { o.negative } else { lv < 0.0 };
                    }
                    Rule::Majority => {
                        let t_bar = rule_for(&mut tables, deg, d_av, &d_ch, o.subchannel);
                        let t_full = rule_for(&mut final_tables, deg + 1, d_av, &d_ch, o.subchannel);
                        let opposing =
                            edges.iter().filter(|&&e| self.c2v[e] != o.negative).count() as i64;
                        for &e in edges {
                            let k = opposing - i64::from(self.c2v[e] != o.negative);
                            self.v2c[e] = o.negative ^ (k > t_bar);
                        }
                        decisions[v] = o.negative ^ (opposing > t_full);
                    }
                }
            }
            me = self.decision_syndrome(&decisions);
            unsatisfied.push(me);
            trace.push(IterationTrace {
                iteration: l,
                unsatisfied: me,
                negative_messages: self.v2c.iter().filter(|&&x| x).count(),
                eps_ec,
                d_av,
            });
            used = l;
        }
        Ok(DecodeResult {
            hard_decisions: decisions,
            iterations_used: used,
            syndrome_satisfied: me == 0,
            per_iteration_unsatisfied: unsatisfied,
            trace,
        })
    }
}

/// `t_bar` of the rule for nodes with `d_v` inputs on sub-channel `w`,
/// caching one table per degree.
fn rule_for(cache: &mut Vec<Vec<VndThresholds>>, d_v: usize, d_av: f64, d_ch: &[f64], w: usize) -> i64 {
    if cache.len() <= d_v {
        cache.resize(d_v + 1, Vec::new());
    }
    if cache[d_v].is_empty() {
        cache[d_v] = d_ch.iter().map(|&d| majority_rule(d_v.saturating_sub(1), d_av, d)).collect();
    }
    cache[d_v][w].t_bar
}

/// One-shot [`Decoder::decode`].
pub fn decode(g: &TannerGraph, obs: &[ChannelObservation], cfg: &DecoderConfig) -> Result<DecodeResult> {
    Decoder::new(g).decode(obs, cfg)
}

/// One-shot [`Decoder::decode_majority`].
pub fn decode_majority(
    g: &TannerGraph,
    obs: &[ChannelObservation],
    cfg: &DecoderConfig,
) -> Result<DecodeResult> {
    Decoder::new(g).decode_majority(obs, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::D_MAX;

    fn hard(eps: f64) -> SubChannelDecomposition {
        SubChannelDecomposition::single(eps).unwrap()
    }

    #[test]
    fn rules_for_erasure_subchannel() {
        for d_v in 2..9 {
            let r = majority_rule(d_v - 1, 1.3, 0.0);
            assert_eq!(r.t_bar, ((d_v - 1) / 2) as i64, "d_v={d_v}");
        }
    }

    #[test]
    fn strong_channel_never_flips() {
        let r = majority_rule(5, 1.0, 5.5);
        assert_eq!(r.t_bar, 5);
        let r = majority_rule(5, 0.0, 0.3);
        assert_eq!(r.t_bar, 5);
    }

    #[test]
    fn gallager_b_switch() {
        // d_v = 4: rule changes when D_av crosses D_ch.
        let below = majority_rule(3, 0.9, 1.0);
        let above = majority_rule(3, 1.1, 1.0);
        assert_eq!(below.t_bar, 2);
        assert_eq!(above.t_bar, 1);
    }

    #[test]
    fn estimate_examples() {
        assert_eq!(estimate_extrinsic_from_count(0, 100, 15.0), 0.0);
        let eps_s = 0.5 * (1.0 - 0.8f64.powi(15));
        let m = 1_000_000_000usize;
        let me = (eps_s * m as f64).round() as usize;
        let eac = estimate_apriori_from_count(me, m, 15.0);
        assert!((eac - 0.1).abs() < 1e-6, "{eac}");
        let hi = estimate_extrinsic_from_count(100, 100, 15.0);
        assert!(hi.is_finite() && hi < 0.5);
    }

    #[test]
    fn noiseless_stops_immediately() {
        let g = TannerGraph::from_check_lists(4, vec![vec![0, 1, 2], vec![1, 2, 3]]).unwrap();
        let obs = vec![ChannelObservation::new(false, 1); 4];
        let cfg = DecoderConfig::new(10, ReliabilityMode::Adaptive, hard(0.1));
        let r = decode(&g, &obs, &cfg).unwrap();
        assert!(r.syndrome_satisfied);
        assert_eq!(r.iterations_used, 0);
        assert_eq!(r.hard_decisions, vec![false; 4]);
    }

    #[test]
    fn errors() {
        let g = TannerGraph::from_check_lists(2, vec![vec![0, 1]]).unwrap();
        let obs = vec![ChannelObservation::new(false, 1); 2];
        let cfg = DecoderConfig::new(3, ReliabilityMode::Schedule(vec![0.1]), hard(0.1));
        assert!(matches!(decode(&g, &obs, &cfg), Err(Error::ScheduleTooShort { .. })));
        let cfg = DecoderConfig::new(3, ReliabilityMode::Adaptive, hard(0.1));
        assert!(matches!(decode(&g, &obs[..1], &cfg), Err(Error::ObservationLength { .. })));
        let bad = vec![ChannelObservation::new(false, 4); 2];
        assert!(matches!(decode(&g, &bad, &cfg), Err(Error::SubchannelOutOfRange { .. })));
    }

    #[test]
    fn zero_crossover_gives_max_reliability() {
        assert_eq!(reliability_clamped(0.0), D_MAX);
    }
}
