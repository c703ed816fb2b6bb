//! Property tests over random graphs, channels and linear programs.

use bmp_core::channel::SubChannelDecomposition;
use bmp_core::decoder::{decode, decode_majority};
use bmp_core::design::{edge_to_node, node_to_edge};
use bmp_core::exit::var_exit_hard;
use bmp_core::graph::{
    find_weak_cycles, from_alist, peg_construct, random_construct, to_alist, validate, verify_witness,
};
use bmp_core::lp::{lp_solve, LpProblem};
use bmp_core::mixing::SymmetricDensity;
use bmp_core::{
    ChannelObservation, DecoderConfig, DegreeDistribution, Error, ReliabilityMode, TannerGraph,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn distributions() -> Vec<DegreeDistribution> {
    let mk = |l: &[(usize, f64)], dc| DegreeDistribution::new(l, dc).unwrap();
    vec![
        DegreeDistribution::regular(3, 6).unwrap(),
        DegreeDistribution::regular(2, 4).unwrap(),
        DegreeDistribution::regular(4, 8).unwrap(),
        mk(&[(2, 0.3), (3, 0.3), (5, 0.4)], 6),
        mk(&[(2, 0.2), (3, 0.2), (4, 0.2), (8, 0.4)], 8),
    ]
}

fn graph(dist_index: usize, n: usize, seed: u64) -> Option<TannerGraph> {
    random_construct(n, &distributions()[dist_index], seed).ok()
}

fn random_decomposition(rng: &mut ChaCha8Rng) -> SubChannelDecomposition {
    let w = rng.gen_range(1..=4usize);
    let with_zero = rng.gen_bool(0.3);
    let mut weights: Vec<f64> = (0..w).map(|_| rng.gen_range(0.1..1.0)).collect();
    let total: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|x| *x /= total);
    let parts: Vec<(usize, f64, f64)> = weights
        .iter()
        .enumerate()
        .map(|(i, &p)| {
            let idx = if with_zero { i } else { i + 1 };
            let eps = if idx == 0 { 0.5 } else { rng.gen_range(0.0..0.5) };
            (idx, p, eps)
        })
        .collect();
    SubChannelDecomposition::from_parts(&parts).unwrap()
}

fn random_mode(rng: &mut ChaCha8Rng, iters: usize) -> ReliabilityMode {
    let schedule: Vec<f64> = (0..iters).map(|_| rng.gen_range(0.0..0.5)).collect();
    match rng.gen_range(0..3) {
        0 => ReliabilityMode::Adaptive,
        1 => ReliabilityMode::Schedule(schedule),
        _ => ReliabilityMode::Genie(schedule),
    }
}

fn random_observations(rng: &mut ChaCha8Rng, n: usize, dec: &SubChannelDecomposition) -> Vec<ChannelObservation> {
    let idx: Vec<usize> = dec.subchannels().iter().map(|s| s.index).collect();
    let p_neg = rng.gen_range(0.0..0.3);
    (0..n)
        .map(|_| ChannelObservation::new(rng.gen_bool(p_neg), idx[rng.gen_range(0..idx.len())]))
        .collect()
}

/// A random codeword from a basis of the null space of the parity checks.
fn random_codeword(g: &TannerGraph, rng: &mut ChaCha8Rng) -> Vec<bool> {
    let n = g.n_var();
    let mut rows: Vec<Vec<bool>> = g
        .checks()
        .iter()
        .map(|c| {
            let mut r = vec![false; n];
            c.iter().for_each(|&v| r[v] ^= true);
            r
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..n {
        let Some(p) = (r..rows.len()).find(|&i| rows[i][col]) else { continue };
        rows.swap(r, p);
        for i in 0..rows.len() {
            if i != r && rows[i][col] {
                let pivot_row = rows[r].clone();
                rows[i].iter_mut().zip(&pivot_row).for_each(|(a, b)| *a ^= b);
            }
        }
        pivots.push(col);
        r += 1;
    }
    let mut x = vec![false; n];
    for col in 0..n {
        if !pivots.contains(&col) {
            x[col] = rng.gen_bool(0.5);
        }
    }
    for (i, &pc) in pivots.iter().enumerate() {
        x[pc] = (0..n).filter(|&j| j != pc && rows[i][j]).fold(false, |acc, j| acc ^ x[j]);
    }
    x
}

/// Cycle search by depth-first search over degree-2/3 variables and
/// their checks.
fn dfs_has_weak_cycle(g: &TannerGraph) -> bool {
    let n = g.n_var();
    let weak = |v: usize| matches!(g.var_degree(v), 2 | 3);
    // node ids: variables 0..n, checks n..
    let neighbours = |x: usize| -> Vec<usize> {
        if x < n {
            if weak(x) { g.var(x).iter().map(|&c| n + c).collect() } else { Vec::new() }
        } else {
            g.check(x - n).iter().copied().filter(|&v| weak(v)).collect()
        }
    };
    let total = n + g.n_chk();
    let mut seen = vec![false; total];
    for start in 0..total {
        if seen[start] {
            continue;
        }
        let mut stack = vec![(start, usize::MAX)];
        while let Some((x, parent)) = stack.pop() {
            if seen[x] {
                return true;
            }
            seen[x] = true;
            for y in neighbours(x) {
                if y != parent {
                    if seen[y] {
                        return true;
                    }
                    stack.push((y, x));
                }
            }
        }
    }
    false
}

/// Best objective over all basic feasible points of `max c.x, A x <= b, x >= 0`.
fn vertex_oracle(c: &[f64], a: &[Vec<f64>], b: &[f64]) -> Option<f64> {
    let n = c.len();
    let mut cons: Vec<(Vec<f64>, f64)> = a.iter().cloned().zip(b.iter().copied()).collect();
    for i in 0..n {
        let mut e = vec![0.0; n];
        e[i] = -1.0;
        cons.push((e, 0.0));
    }
    let m = cons.len();
    let mut best: Option<f64> = None;
    let mut subset: Vec<usize> = (0..n).collect();
    loop {
        let mut mat: Vec<Vec<f64>> = subset.iter().map(|&i| {
            let mut r = cons[i].0.clone();
            r.push(cons[i].1);
            r
        }).collect();
        let mut solvable = true;
        for col in 0..n {
            let p = (col..n).max_by(|&i, &j| mat[i][col].abs().total_cmp(&mat[j][col].abs())).unwrap();
            if mat[p][col].abs() < 1e-9 {
                solvable = false;
                break;
            }
            mat.swap(col, p);
            for i in 0..n {
                if i != col {
                    let f = mat[i][col] / mat[col][col];
                    for k in col..=n {
                        mat[i][k] -= f * mat[col][k];
                    }
                }
            }
        }
        if solvable {
            let x: Vec<f64> = (0..n).map(|i| mat[i][n] / mat[i][i]).collect();
            let feasible = cons.iter().all(|(r, rhs)| r.iter().zip(&x).map(|(p, q)| p * q).sum::<f64>() <= rhs + 1e-7);
            if feasible {
                let obj: f64 = c.iter().zip(&x).map(|(p, q)| p * q).sum();
                best = Some(best.map_or(obj, |b: f64| b.max(obj)));
            }
        }
        // next n-subset of 0..m
        let mut i = n;
        loop {
            if i == 0 {
                return best;
            }
            i -= 1;
            if subset[i] < m - n + i {
                subset[i] += 1;
                for j in i + 1..n {
                    subset[j] = subset[j - 1] + 1;
                }
                break;
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn sum_and_majority_rules_agree(di in 0usize..5, n in 24usize..80, seed in any::<u64>()) {
        let g = graph(di, n, seed);
        prop_assume!(g.is_some());
        let g = g.unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..5 {
            let dec = random_decomposition(&mut rng);
            let iters = rng.gen_range(1..25);
            let mut cfg = DecoderConfig::new(iters, random_mode(&mut rng, iters), dec.clone());
            cfg.stop_on_syndrome = rng.gen_bool(0.5);
            let obs = random_observations(&mut rng, g.n_var(), &dec);
            prop_assert_eq!(decode(&g, &obs, &cfg).unwrap(), decode_majority(&g, &obs, &cfg).unwrap());
        }
    }

    #[test]
    fn decoding_commutes_with_codewords(di in 0usize..5, n in 24usize..80, seed in any::<u64>()) {
        let g = graph(di, n, seed);
        prop_assume!(g.is_some());
        let g = g.unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 1);
        let dec = random_decomposition(&mut rng);
        let iters = rng.gen_range(1..25);
        let cfg = DecoderConfig::new(iters, random_mode(&mut rng, iters), dec.clone());
        let obs = random_observations(&mut rng, g.n_var(), &dec);
        let c = random_codeword(&g, &mut rng);
        prop_assert!(bmp_core::decoder::syndrome(&g, &c).unwrap().1);
        let shifted: Vec<ChannelObservation> =
            obs.iter().zip(&c).map(|(o, &b)| ChannelObservation::new(o.negative ^ b, o.subchannel)).collect();
        let a = decode(&g, &obs, &cfg).unwrap();
        let b = decode(&g, &shifted, &cfg).unwrap();
        let back: Vec<bool> = b.hard_decisions.iter().zip(&c).map(|(x, y)| x ^ y).collect();
        prop_assert_eq!(a.hard_decisions, back);
        prop_assert_eq!(a.iterations_used, b.iterations_used);
        prop_assert_eq!(a.per_iteration_unsatisfied, b.per_iteration_unsatisfied);
    }

    #[test]
    fn peg_with_forbid_has_no_weak_cycles(di in 0usize..5, n in 20usize..200, seed in any::<u64>()) {
        let dist = &distributions()[di];
        match peg_construct(n, dist, seed, true) {
            Ok(g) => {
                prop_assert!(!find_weak_cycles(&g).found);
                prop_assert!(!dfs_has_weak_cycle(&g));
                prop_assert!(validate(&g, dist).ok);
            }
            Err(Error::WeakCycleUnavoidable { .. }) | Err(Error::InfeasibleDegreeSequence(_)) => {}
            Err(e) => prop_assert!(false, "{e}"),
        }
    }

    #[test]
    fn weak_cycle_search_matches_dfs(di in 0usize..5, n in 10usize..120, seed in any::<u64>()) {
        let g = graph(di, n, seed);
        prop_assume!(g.is_some());
        let g = g.unwrap();
        prop_assume!(g.n_var() + g.n_chk() <= 200);
        let report = find_weak_cycles(&g);
        prop_assert_eq!(report.found, dfs_has_weak_cycle(&g));
        if let Some(w) = &report.witness {
            prop_assert!(verify_witness(&g, w));
        }
    }

    #[test]
    fn alist_round_trip(di in 0usize..5, n in 10usize..100, seed in any::<u64>()) {
        let g = graph(di, n, seed);
        prop_assume!(g.is_some());
        let g = g.unwrap();
        prop_assert_eq!(from_alist(&to_alist(&g)).unwrap(), g);
    }

    #[test]
    fn simplex_matches_vertex_enumeration(
        n in 1usize..=4,
        m in 1usize..=4,
        seed in any::<u64>(),
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..2.0)).collect();
        let mut a: Vec<Vec<f64>> = (0..m).map(|_| (0..n).map(|_| rng.gen_range(-1.0..3.0)).collect()).collect();
        let mut b: Vec<f64> = (0..m).map(|_| rng.gen_range(0.0..5.0)).collect();
        // a box keeps the problem bounded
        for i in 0..n {
            let mut row = vec![0.0; n];
            row[i] = 1.0;
            a.push(row);
            b.push(rng.gen_range(1.0..4.0));
        }
        let mut p = LpProblem::new(n);
        p.maximize(&c);
        for (row, &rhs) in a.iter().zip(&b) {
            p.add_le(row, rhs);
        }
        let sol = lp_solve(&p).unwrap();
        let want = vertex_oracle(&c, &a, &b).unwrap();
        prop_assert!((sol.objective - want).abs() < 1e-7 * (1.0 + want.abs()), "{} vs {}", sol.objective, want);
        for (row, &rhs) in a.iter().zip(&b) {
            prop_assert!(row.iter().zip(&sol.x).map(|(p, q)| p * q).sum::<f64>() <= rhs + 1e-9);
        }
    }

    #[test]
    fn perspective_round_trip(weights in prop::collection::vec(0.01f64..1.0, 1..6), d_c in 3usize..20) {
        let total: f64 = weights.iter().sum();
        let lambda: Vec<(usize, f64)> = weights.iter().enumerate().map(|(i, w)| (i + 2, w / total)).collect();
        let d = DegreeDistribution::new(&lambda, d_c).unwrap();
        let back = node_to_edge(&edge_to_node(&d), d_c).unwrap();
        for (a, b) in d.lambda().iter().zip(back.lambda()) {
            prop_assert_eq!(a.0, b.0);
            prop_assert!((a.1 - b.1).abs() < 1e-12);
        }
    }

    #[test]
    fn hard_transfer_is_monotone(d_v in 2usize..10, a in 0.0f64..0.5, b in 0.0f64..0.5, ch in 0.0f64..0.5) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(var_exit_hard(lo, d_v, ch).unwrap() <= var_exit_hard(hi, d_v, ch).unwrap() + 1e-15);
        prop_assert!(var_exit_hard(ch, d_v, lo).unwrap() <= var_exit_hard(ch, d_v, hi).unwrap() + 1e-15);
    }

    #[test]
    fn mixing_is_linear_in_information(
        eps in prop::collection::vec(0.0f64..0.5, 1..4),
        mus in prop::collection::vec(0.2f64..8.0, 0..3),
        raw in prop::collection::vec(0.05f64..1.0, 6),
    ) {
        let mut parts: Vec<SymmetricDensity> = eps.iter().map(|&e| SymmetricDensity::bsc(e).unwrap()).collect();
        parts.extend(mus.iter().map(|&m| SymmetricDensity::gaussian(m).unwrap()));
        let w: Vec<f64> = raw[..parts.len()].to_vec();
        let total: f64 = w.iter().sum();
        let pairs: Vec<(f64, &SymmetricDensity)> = w.iter().map(|x| x / total).zip(parts.iter()).collect();
        let mix = SymmetricDensity::mixture(&pairs).unwrap();
        let want: f64 = pairs.iter().map(|(w, d)| w * d.mutual_information()).sum();
        prop_assert!((mix.mutual_information() - want).abs() < 1e-6);
    }
}
