//! Tanner graphs: construction, weak-cycle detection and the alist format.
//!
//! A weak cycle is a cycle whose variable nodes all have degree 2 or 3. When
//! every variable on such a cycle starts with a wrong channel sign and the
//! rest of the graph is correct, each cycle variable sees one wrong and at
//! most one right check message, keeps its channel sign, and the error is
//! never corrected. [`peg_construct`] can avoid these cycles by tracking the
//! connectivity of the degree-2/3 subgraph with a union-find structure.

use alloc::collections::VecDeque;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::design::DegreeDistribution;
use crate::{Error, Result};

/// Bipartite graph of `n_var` variable and `n_chk` check nodes.
///
/// Both adjacency directions are stored with their own order so that the
/// alist representation round-trips exactly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TannerGraph {
    vars: Vec<Vec<usize>>,
    checks: Vec<Vec<usize>>,
}

impl TannerGraph {
    /// Builds a graph from per-check variable lists. Variable lists are
    /// ordered by check index.
    pub fn from_check_lists(n_var: usize, checks: Vec<Vec<usize>>) -> Result<Self> {
        let mut vars = vec![Vec::new(); n_var];
        for (c, list) in checks.iter().enumerate() {
            for &v in list {
                if v >= n_var {
                    return Err(Error::InvalidGraph(format!("check {c}: variable {v} out of range")));
                }
                if vars[v].last() == Some(&c) {
                    return Err(Error::InvalidGraph(format!("parallel edge between {v} and {c}")));
                }
                vars[v].push(c);
            }
        }
        Ok(Self { vars, checks })
    }

    /// Builds a graph from both adjacency directions, which must describe
    /// the same edge set.
    pub fn from_parts(vars: Vec<Vec<usize>>, checks: Vec<Vec<usize>>) -> Result<Self> {
        let g = Self::from_check_lists(vars.len(), checks)?;
        for (v, list) in vars.iter().enumerate() {
            let mut a = list.clone();
            a.sort_unstable();
            if a.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidGraph(format!("variable {v} lists a check twice")));
            }
            if a != g.vars[v] {
                return Err(Error::InvalidGraph(format!(
                    "variable {v}: adjacency disagrees with the check lists"
                )));
            }
        }
        Ok(Self { vars, checks: g.checks })
    }

    pub fn n_var(&self) -> usize {
        self.vars.len()
    }

    pub fn n_chk(&self) -> usize {
        self.checks.len()
    }

    pub fn n_edges(&self) -> usize {
        self.checks.iter().map(Vec::len).sum()
    }

    pub fn var(&self, v: usize) -> &[usize] {
        &self.vars[v]
    }

    pub fn check(&self, c: usize) -> &[usize] {
        &self.checks[c]
    }

    pub fn vars(&self) -> &[Vec<usize>] {
        &self.vars
    }

    pub fn checks(&self) -> &[Vec<usize>] {
        &self.checks
    }

    pub fn var_degree(&self, v: usize) -> usize {
        self.vars[v].len()
    }

    pub fn chk_degree(&self, c: usize) -> usize {
        self.checks[c].len()
    }

    pub fn var_degrees(&self) -> Vec<usize> {
        self.vars.iter().map(Vec::len).collect()
    }

    pub fn chk_degrees(&self) -> Vec<usize> {
        self.checks.iter().map(Vec::len).collect()
    }
}

/// Variable degrees (ascending) and check degrees realized for length `n`.
///
/// Node counts are `Lambda_i n` rounded by largest remainder. The number of
/// checks is `n(1 - R)` rounded to nearest; the `E` edges are spread over
/// them as evenly as possible.
pub fn degree_sequence(n: usize, dist: &DegreeDistribution) -> Result<(Vec<usize>, Vec<usize>)> {
    degree_sequence_with(n, dist, false)
}

/// With `forest_safe`, rounded-up node counts move away from degrees 2 and
/// 3 while those nodes have more edges than a forest on them and the checks
/// can hold. Every count stays within one of `Lambda_i n`.
fn degree_sequence_with(
    n: usize,
    dist: &DegreeDistribution,
    forest_safe: bool,
) -> Result<(Vec<usize>, Vec<usize>)> {
    if n == 0 {
        return Err(Error::InfeasibleDegreeSequence("zero variable nodes".into()));
    }
    let nodes = dist.node_perspective();
    let mut counts: Vec<(usize, usize, f64)> = nodes
        .iter()
        .map(|&(d, f)| {
            let x = f * n as f64;
            (d, x.floor() as usize, x - x.floor())
        })
        .collect();
    let assigned: usize = counts.iter().map(|c| c.1).sum();
    let mut order: Vec<usize> = (0..counts.len()).collect();
    order.sort_by(|&a, &b| counts[b].2.total_cmp(&counts[a].2).then(counts[b].0.cmp(&counts[a].0)));
    for k in 0..n.saturating_sub(assigned) {
        let i = order[k % order.len()];
        counts[i].1 += 1;
    }
    let m = (n as f64 * (1.0 - dist.design_rate())).round() as usize;
    if forest_safe {
        let floors: Vec<usize> = nodes.iter().map(|&(_, f)| (f * n as f64).floor() as usize).collect();
        let weight = |d: usize| if is_weak(d) { d - 1 } else { 0 };
        loop {
            let load: usize = counts.iter().map(|c| weight(c.0) * c.1).sum();
            if load < m {
                break;
            }
            // take a unit from the heaviest rounded-up class, give it to a
            // lighter class still at its floor
            let from = (0..counts.len())
                .filter(|&i| counts[i].1 > floors[i] && weight(counts[i].0) > 0)
                .max_by_key(|&i| weight(counts[i].0));
            let Some(from) = from else { break };
            let to = (0..counts.len())
                .filter(|&i| counts[i].1 == floors[i] && weight(counts[i].0) < weight(counts[from].0))
                .min_by(|&a, &b| {
                    weight(counts[a].0).cmp(&weight(counts[b].0)).then(counts[b].2.total_cmp(&counts[a].2))
                });
            let Some(to) = to else { break };
            counts[from].1 -= 1;
            counts[to].1 += 1;
        }
    }
    let mut var_deg = Vec::with_capacity(n);
    for &(d, c, _) in &counts {
        var_deg.extend(core::iter::repeat(d).take(c));
    }
    let edges: usize = var_deg.iter().sum();
    if m == 0 {
        return Err(Error::InfeasibleDegreeSequence("no check nodes at this length".into()));
    }
    let max_dv = var_deg.iter().copied().max().unwrap_or(0);
    if max_dv > m {
        return Err(Error::InfeasibleDegreeSequence(format!(
            "variable degree {max_dv} exceeds the {m} check nodes"
        )));
    }
    let (q, r) = (edges / m, edges % m);
    if q + usize::from(r > 0) > n {
        return Err(Error::InfeasibleDegreeSequence(format!(
            "check degree {} exceeds the {n} variable nodes",
            q + 1
        )));
    }
    let chk_deg = (0..m).map(|c| q + usize::from(c < r)).collect();
    Ok((var_deg, chk_deg))
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// False if already joined.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra] = rb;
        true
    }
}

fn is_weak(degree: usize) -> bool {
    degree == 2 || degree == 3
}

/// Progressive edge growth.
///
/// Variables are processed in increasing degree order. Each edge goes to a
/// check outside the current computation tree of the variable if one
/// exists, otherwise to one at the largest BFS depth; ties go to the lowest
/// current check degree and then to a seeded random choice. With
/// `forbid_weak_cycles` an edge of a degree-2/3 variable is never placed
/// where it would close a cycle of the degree-2/3 subgraph.
pub fn peg_construct(
    n: usize,
    dist: &DegreeDistribution,
    seed: u64,
    forbid_weak_cycles: bool,
) -> Result<TannerGraph> {
    let (var_deg, chk_cap) = degree_sequence_with(n, dist, forbid_weak_cycles)?;
    let m = chk_cap.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut vars: Vec<Vec<usize>> = var_deg.iter().map(|&d| Vec::with_capacity(d)).collect();
    let mut checks: Vec<Vec<usize>> = chk_cap.iter().map(|&d| Vec::with_capacity(d)).collect();
    let mut uf = UnionFind::new(n + m);

    const UNREACHED: u32 = u32::MAX;
    let mut depth = vec![UNREACHED; m];
    let mut var_seen = vec![false; n];
    let mut touched_vars: Vec<usize> = Vec::new();
    let mut touched_chks: Vec<usize> = Vec::new();
    let mut frontier: Vec<usize> = Vec::new();
    let mut next: Vec<usize> = Vec::new();
    let mut ties: Vec<usize> = Vec::new();

    for v in 0..n {
        let constrained = forbid_weak_cycles && is_weak(var_deg[v]);
        for _ in 0..var_deg[v] {
            // BFS over the current graph from v.
            for &c in &touched_chks {
                depth[c] = UNREACHED;
            }
            for &u in &touched_vars {
                var_seen[u] = false;
            }
            touched_chks.clear();
            touched_vars.clear();
            frontier.clear();
            frontier.push(v);
            var_seen[v] = true;
            touched_vars.push(v);
            let mut d = 0u32;
            while !frontier.is_empty() {
                next.clear();
                for &u in &frontier {
                    for &c in &vars[u] {
                        if depth[c] != UNREACHED {
                            continue;
                        }
                        depth[c] = d;
                        touched_chks.push(c);
                        for &w in &checks[c] {
                            if !var_seen[w] {
                                var_seen[w] = true;
                                touched_vars.push(w);
                                next.push(w);
                            }
                        }
                    }
                }
                core::mem::swap(&mut frontier, &mut next);
                d += 1;
            }

            let mut best: Option<(u32, usize)> = None;
            ties.clear();
            let mut blocked_by_cycle = false;
            for c in 0..m {
                if checks[c].len() >= chk_cap[c] || (depth[c] == 0) {
                    continue;
                }
                if constrained && uf.find(v) == uf.find(n + c) {
                    blocked_by_cycle = true;
                    continue;
                }
                // Unreached sorts above every finite depth.
                let key = (depth[c], usize::MAX - checks[c].len());
                match best {
                    Some(b) if key < b => {}
                    Some(b) if key == b => ties.push(c),
                    _ => {
                        best = Some(key);
                        ties.clear();
                        ties.push(c);
                    }
                }
            }
            let c = if ties.is_empty() {
                match free_by_swap(v, &mut vars, &mut checks, &chk_cap, &var_deg, forbid_weak_cycles, &mut uf, &mut rng)
                {
                    Some(c) => c,
                    None if blocked_by_cycle => return Err(Error::WeakCycleUnavoidable { variable: v }),
                    None => {
                        return Err(Error::InfeasibleDegreeSequence(format!("no free check for variable {v}")))
                    }
                }
            } else {
                ties[rng.gen_range(0..ties.len())]
            };
            vars[v].push(c);
            checks[c].push(v);
            if forbid_weak_cycles && is_weak(var_deg[v]) {
                uf.union(v, n + c);
            }
        }
    }
    Ok(TannerGraph { vars, checks })
}

/// Frees a socket for `v` when every check with room already neighbours it:
/// an edge `u`-`c` of a variable of degree at least four, with `c` not next
/// to `v`, is moved to a free check `f` not next to `u`. Returns `c`.
#[allow(clippy::too_many_arguments)]
fn free_by_swap(
    v: usize,
    vars: &mut [Vec<usize>],
    checks: &mut [Vec<usize>],
    chk_cap: &[usize],
    var_deg: &[usize],
    forbid_weak_cycles: bool,
    uf: &mut UnionFind,
    rng: &mut ChaCha8Rng,
) -> Option<usize> {
    let n = vars.len();
    let free: Vec<usize> = (0..checks.len()).filter(|&f| checks[f].len() < chk_cap[f]).collect();
    let weak_v = forbid_weak_cycles && is_weak(var_deg[v]);
    let start = rng.gen_range(0..n.max(1));
    for u in (0..n).map(|k| (start + k) % n) {
        if u == v || var_deg[u] < 4 || vars[u].len() < var_deg[u] {
            continue;
        }
        for f in free.iter().copied().filter(|f| !vars[u].contains(f)) {
            let pick = vars[u]
                .iter()
                .position(|&c| !vars[v].contains(&c) && !(weak_v && uf.find(v) == uf.find(n + c)));
            if let Some(k) = pick {
                let c = vars[u][k];
                vars[u][k] = f;
                let slot = checks[c].iter().position(|&w| w == u).expect("edge present");
                checks[c].remove(slot);
                checks[f].push(u);
                return Some(c);
            }
        }
    }
    None
}

/// Random socket matching with the degree sequence of [`degree_sequence`].
/// Parallel edges are removed by random edge swaps.
pub fn random_construct(n: usize, dist: &DegreeDistribution, seed: u64) -> Result<TannerGraph> {
    let (var_deg, chk_deg) = degree_sequence(n, dist)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edge_var: Vec<usize> = Vec::new();
    for (v, &d) in var_deg.iter().enumerate() {
        edge_var.extend(core::iter::repeat(v).take(d));
    }
    let mut edge_chk: Vec<usize> = Vec::with_capacity(edge_var.len());
    for (c, &d) in chk_deg.iter().enumerate() {
        edge_chk.extend(core::iter::repeat(c).take(d));
    }
    edge_chk.shuffle(&mut rng);
    let e = edge_var.len();
    // Socket ranges of each variable in edge order.
    let mut start = Vec::with_capacity(n + 1);
    let mut acc = 0;
    for &d in &var_deg {
        start.push(acc);
        acc += d;
    }
    start.push(acc);
    let clash = |edge_chk: &[usize], k: usize| -> bool {
        let v = edge_var[k];
        (start[v]..start[v + 1]).any(|j| j != k && edge_chk[j] == edge_chk[k])
    };
    let mut attempts = 0usize;
    loop {
        let bad: Vec<usize> = (0..e).filter(|&k| clash(&edge_chk, k)).collect();
        if bad.is_empty() {
            break;
        }
        attempts += 1;
        if attempts > 1000 {
            return Err(Error::InfeasibleDegreeSequence(
                "could not remove parallel edges".into(),
            ));
        }
        for k in bad {
            if clash(&edge_chk, k) {
                let j = rng.gen_range(0..e);
                edge_chk.swap(k, j);
            }
        }
    }
    let mut checks = vec![Vec::new(); chk_deg.len()];
    for k in 0..e {
        checks[edge_chk[k]].push(edge_var[k]);
    }
    let vars = (0..n).map(|v| edge_chk[start[v]..start[v + 1]].to_vec()).collect();
    let mut checks_sorted = checks;
    for list in &mut checks_sorted {
        list.sort_unstable();
    }
    TannerGraph::from_parts(vars, checks_sorted)
}

/// A node of a Tanner graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Node {
    Var(usize),
    Check(usize),
}

/// Outcome of [`find_weak_cycles`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeakCycleReport {
    pub found: bool,
    /// Alternating variable/check nodes; the last connects back to the first.
    pub witness: Option<Vec<Node>>,
}

/// Looks for a cycle in the subgraph of degree-2/3 variable nodes and all
/// check nodes.
pub fn find_weak_cycles(g: &TannerGraph) -> WeakCycleReport {
    let n = g.n_var();
    let total = n + g.n_chk();
    let mut uf = UnionFind::new(total);
    let mut forest: Vec<Vec<usize>> = vec![Vec::new(); total];
    for v in (0..n).filter(|&v| is_weak(g.var_degree(v))) {
        for &c in g.var(v) {
            let a = v;
            let b = n + c;
            if !uf.union(a, b) {
                let path = forest_path(&forest, b, a);
                let witness = path
                    .into_iter()
                    .map(|x| if x < n { Node::Var(x) } else { Node::Check(x - n) })
                    .collect();
                return WeakCycleReport { found: true, witness: Some(witness) };
            }
            forest[a].push(b);
            forest[b].push(a);
        }
    }
    WeakCycleReport { found: false, witness: None }
}

/// Path from `from` to `to` in a forest, inclusive. Starts at `from`, which
/// is a check, so reversing puts the variable first.
fn forest_path(forest: &[Vec<usize>], from: usize, to: usize) -> Vec<usize> {
    let mut prev = vec![usize::MAX; forest.len()];
    let mut q = VecDeque::new();
    prev[from] = from;
    q.push_back(from);
    while let Some(x) = q.pop_front() {
        if x == to {
            break;
        }
        for &y in &forest[x] {
            if prev[y] == usize::MAX {
                prev[y] = x;
                q.push_back(y);
            }
        }
    }
    let mut path = vec![to];
    let mut x = to;
    while x != from {
        x = prev[x];
        path.push(x);
    }
    path
}

/// Checks that a witness is a closed walk with distinct edges through
/// degree-2/3 variables.
pub fn verify_witness(g: &TannerGraph, witness: &[Node]) -> bool {
    let k = witness.len();
    if k < 4 || k % 2 != 0 {
        return false;
    }
    let mut edges = Vec::with_capacity(k);
    for i in 0..k {
        let (a, b) = (witness[i], witness[(i + 1) % k]);
        let (v, c) = match (a, b) {
            (Node::Var(v), Node::Check(c)) | (Node::Check(c), Node::Var(v)) => (v, c),
            _ => return false,
        };
        if v >= g.n_var() || c >= g.n_chk() || !is_weak(g.var_degree(v)) {
            return false;
        }
        if !g.var(v).contains(&c) {
            return false;
        }
        edges.push((v, c));
    }
    edges.sort_unstable();
    edges.windows(2).all(|w| w[0] != w[1])
}

/// Findings of [`validate`].
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub ok: bool,
    /// Degrees whose node count is off by one or more from `Lambda_i N`.
    pub bad_degrees: Vec<usize>,
    pub findings: Vec<String>,
}

/// Compares a graph with a distribution: every degree's node count must be
/// within one node of `Lambda_i N`, check degrees may differ by at most one
/// and must average within one of `d_c`.
pub fn validate(g: &TannerGraph, dist: &DegreeDistribution) -> ValidationReport {
    let n = g.n_var();
    let mut findings = Vec::new();
    let mut bad_degrees = Vec::new();
    let var_deg = g.var_degrees();
    let mut degrees: Vec<usize> = var_deg.clone();
    degrees.extend(dist.lambda().iter().map(|e| e.0));
    degrees.sort_unstable();
    degrees.dedup();
    let nodes = dist.node_perspective();
    for d in degrees {
        let have = var_deg.iter().filter(|&&x| x == d).count() as f64;
        let want = nodes.iter().find(|e| e.0 == d).map_or(0.0, |e| e.1) * n as f64;
        if (have - want).abs() >= 1.0 {
            bad_degrees.push(d);
            findings.push(format!("degree {d}: {have} variable nodes, expected {want:.3}"));
        }
    }
    let chk = g.chk_degrees();
    if let (Some(&lo), Some(&hi)) = (chk.iter().min(), chk.iter().max()) {
        if hi - lo > 1 {
            findings.push(format!("check degrees range over {lo}..={hi}"));
        }
        let mean = g.n_edges() as f64 / chk.len() as f64;
        if (mean - dist.check_degree() as f64).abs() >= 1.0 {
            findings.push(format!("mean check degree {mean:.3}, expected {}", dist.check_degree()));
        }
    } else {
        findings.push("no check nodes".into());
    }
    ValidationReport { ok: findings.is_empty(), bad_degrees, findings }
}

/// Serializes a graph in alist format.
pub fn to_alist(g: &TannerGraph) -> String {
    let mut s = String::new();
    let max_v = g.vars.iter().map(Vec::len).max().unwrap_or(0);
    let max_c = g.checks.iter().map(Vec::len).max().unwrap_or(0);
    let _ = writeln!(s, "{} {}", g.n_var(), g.n_chk());
    let _ = writeln!(s, "{max_v} {max_c}");
    push_line(&mut s, g.vars.iter().map(Vec::len));
    push_line(&mut s, g.checks.iter().map(Vec::len));
    for list in &g.vars {
        push_line(&mut s, padded(list, max_v));
    }
    for list in &g.checks {
        push_line(&mut s, padded(list, max_c));
    }
    s
}

fn padded(list: &[usize], width: usize) -> impl Iterator<Item = usize> + '_ {
    list.iter().map(|&x| x + 1).chain(core::iter::repeat(0).take(width - list.len()))
}

fn push_line(s: &mut String, items: impl Iterator<Item = usize>) {
    let mut first = true;
    for x in items {
        if !first {
            s.push(' ');
        }
        let _ = write!(s, "{x}");
        first = false;
    }
    s.push('\n');
}

/// Parses the alist format written by [`to_alist`].
pub fn from_alist(text: &str) -> Result<TannerGraph> {
    let lines: Vec<&str> = text.lines().collect();
    let numbers = |i: usize| -> Result<Vec<usize>> {
        let line = lines.get(i).ok_or(Error::AlistParse { line: i + 1 })?;
        line.split_whitespace()
            .map(|t| t.parse::<usize>().map_err(|_| Error::AlistParse { line: i + 1 }))
            .collect()
    };
    let pair = |i: usize| -> Result<(usize, usize)> {
        match numbers(i)?.as_slice() {
            [a, b] => Ok((*a, *b)),
            _ => Err(Error::AlistParse { line: i + 1 }),
        }
    };
    let (n, m) = pair(0)?;
    let (max_v, max_c) = pair(1)?;
    let var_deg = numbers(2)?;
    let chk_deg = numbers(3)?;
    if var_deg.len() != n {
        return Err(Error::AlistDimension(format!("{} variable degrees for N = {n}", var_deg.len())));
    }
    if chk_deg.len() != m {
        return Err(Error::AlistDimension(format!("{} check degrees for M = {m}", chk_deg.len())));
    }
    if var_deg.iter().copied().max().unwrap_or(0) != max_v
        || chk_deg.iter().copied().max().unwrap_or(0) != max_c
    {
        return Err(Error::AlistDimension("maximum degrees disagree with degree lists".into()));
    }
    let block = |first: usize, degs: &[usize], width: usize, bound: usize| -> Result<Vec<Vec<usize>>> {
        let mut out = Vec::with_capacity(degs.len());
        for (k, &deg) in degs.iter().enumerate() {
            let line = first + k;
            let row = numbers(line)?;
            if row.len() != width {
                return Err(Error::AlistPadding { line: line + 1 });
            }
            let used = row.iter().take_while(|&&x| x != 0).count();
            if row[used..].iter().any(|&x| x != 0) {
                return Err(Error::AlistPadding { line: line + 1 });
            }
            if used != deg {
                return Err(Error::AlistDimension(format!(
                    "line {}: {used} entries for degree {deg}",
                    line + 1
                )));
            }
            let mut list = Vec::with_capacity(deg);
            for &x in &row[..used] {
                if x > bound {
                    return Err(Error::AlistIndex { line: line + 1, index: x });
                }
                list.push(x - 1);
            }
            out.push(list);
        }
        Ok(out)
    };
    let vars = block(4, &var_deg, max_v, m)?;
    let checks = block(4 + n, &chk_deg, max_c, n)?;
    if lines.len() > 4 + n + m && lines[4 + n + m..].iter().any(|l| !l.trim().is_empty()) {
        return Err(Error::AlistDimension("trailing lines after the check block".into()));
    }
    TannerGraph::from_parts(vars, checks).map_err(|e| match e {
        Error::InvalidGraph(msg) => Error::AlistDimension(msg),
        other => other,
    })
}
