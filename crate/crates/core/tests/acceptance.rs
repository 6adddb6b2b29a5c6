//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Criterion 5b cannot hold at n = 500: with σ² = 1/64 the regularity
//! statistic concentrates at √500/64 ≈ 0.35, below the threshold 1. It is run
//! as stated and marked as an expected failure; the large-n companion shows the
//! detector firing once √n/64 > 1.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use mm_core::asymptotics::{
    empirical_sigma2, mer_covariance, regularity_set, CovarianceMode, SamplingStatistic,
};
use mm_core::estimation::{estimate_theta, fit_communities, label_accuracy};
use mm_core::genmodel::{parse_mer_params, sample_exchangeable, sample_mer, sample_msbm};
use mm_core::hyptests::{independence_test, similarity_test, TestResult};
use mm_core::motifs::{
    count_aligned_vector, count_bicolored, count_cross_layer, count_motif, one_point_densities, two_point_kernel,
    vertex_join_density, BicolorKind,
};
use mm_core::multibern::{moments_to_probs, probs_to_moments, MomentVector};
use mm_core::oracle::{
    brute_aligned, brute_alternate_motif, brute_aut, brute_bicolored, brute_count, brute_count_cross_layer,
    brute_join, brute_joint_probs, brute_one_point, brute_two_point, mix_seed, monte_carlo_moments,
};
use mm_core::motif::{alternate_motif, BUILTIN_MOTIFS};
use mm_core::{builtin_motif, Adjacency, BlockGraphonVector, CommunityAssignment, LayerSubset, Motif, MultiplexNetwork};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    expected_fail: bool,
    summary: String,
}

fn pass_if(pass: bool, summary: String) -> Outcome {
    Outcome { pass, expected_fail: false, summary }
}

fn motifs() -> Vec<Motif> {
    BUILTIN_MOTIFS.iter().map(|m| builtin_motif(m).unwrap()).collect()
}

fn subset(s: &str, d: usize) -> LayerSubset {
    LayerSubset::parse(s, d).unwrap()
}

fn random_net(rng: &mut ChaCha8Rng) -> MultiplexNetwork {
    let n = rng.random_range(1..=8);
    let d = rng.random_range(1..=3);
    let layers = (0..d)
        .map(|_| {
            let p: f64 = rng.random_range(0.2..0.9);
            let mut a = Adjacency::empty(n);
            for i in 0..n {
                for j in (i + 1)..n {
                    if rng.random::<f64>() < p {
                        a.add_edge(i, j);
                    }
                }
            }
            a
        })
        .collect();
    MultiplexNetwork::new(layers).unwrap()
}

fn c1_counting() -> Outcome {
    let ms = motifs();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut checks = 0usize;
    let mut bad = Vec::new();
    for f in &ms {
        checks += 2;
        if f.aut_count() != brute_aut(f) {
            bad.push(format!("aut {f:?}"));
        }
        if alternate_motif(f) != brute_alternate_motif(f).unwrap() {
            bad.push(format!("alternate {f:?}"));
        }
    }
    for case in 0..500 {
        let net = random_net(&mut rng);
        let (n, d) = (net.n(), net.d());
        let labels: Vec<usize> = (0..n).map(|_| rng.random_range(1..=2)).collect();
        let z = CommunityAssignment::new(2, labels.iter().map(|l| l - 1).collect()).unwrap();
        for f in &ms {
            for l in 1..=d {
                checks += 1;
                if count_motif(net.layer(l), f) != brute_count(net.layer(l), f).unwrap() {
                    bad.push(format!("case {case}: count layer {l}"));
                }
            }
            for k in LayerSubset::all(d) {
                checks += 1;
                if count_cross_layer(&net, k, f).unwrap() != brute_count_cross_layer(&net, k, f).unwrap() {
                    bad.push(format!("case {case}: cross-layer {k}"));
                }
                for (a, b) in [(0, 0), (0, 1), (1, 1)] {
                    for kind in [BicolorKind::Red, BicolorKind::Blue, BicolorKind::Alternate] {
                        checks += 1;
                        let fast = count_bicolored(&net, k, &z, a, b, f, kind).unwrap();
                        if fast != brute_bicolored(&net, k, &z, a, b, f, kind).unwrap() {
                            bad.push(format!("case {case}: bicolored {kind:?} ({a},{b}) {k}"));
                        }
                    }
                }
            }
            let adj = net.intersection(LayerSubset::full(d)).unwrap();
            if f.vertex_count() <= n {
                let t = one_point_densities(&adj, f);
                for a in 1..=f.vertex_count() {
                    for v in 0..n {
                        checks += 1;
                        if t[a - 1][v] != brute_one_point(v, a, f, &adj).unwrap() {
                            bad.push(format!("case {case}: one-point a={a} v={v}"));
                        }
                    }
                    for b in 1..=f.vertex_count() {
                        checks += 1;
                        if vertex_join_density(a, b, f, &adj) != brute_join(a, b, f, &adj).unwrap() {
                            bad.push(format!("case {case}: join ({a},{b})"));
                        }
                    }
                }
            }
            for u in 0..n {
                for v in 0..n {
                    if u != v {
                        checks += 1;
                        if two_point_kernel(u, v, f, &adj).unwrap() != brute_two_point(u, v, f, &adj).unwrap() {
                            bad.push(format!("case {case}: two-point ({u},{v})"));
                        }
                    }
                }
            }
        }
        let aligned: Vec<Motif> = (0..d).map(|_| ms[rng.random_range(0..ms.len())].clone()).collect();
        checks += 1;
        let fast = count_aligned_vector(&net, &aligned).unwrap();
        if (fast.raw, fast.divisor) != brute_aligned(&net, &aligned).unwrap() {
            bad.push(format!("case {case}: aligned"));
        }
    }
    let head: Vec<_> = bad.iter().take(3).cloned().collect();
    pass_if(bad.is_empty(), format!("{checks} exact comparisons over 500 networks, {} mismatches {head:?}", bad.len()))
}

fn c2_teugels() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (mut worst_fwd, mut worst_rt) = (0.0f64, 0.0f64);
    for _ in 0..1000 {
        let d = rng.random_range(1..=4);
        let m = 1usize << d;
        let w: Vec<f64> = (0..m).map(|_| -rng.random::<f64>().ln()).collect();
        let total: f64 = w.iter().sum();
        let p: Vec<f64> = w.iter().map(|x| x / total).collect();
        let mut mu = vec![0.0; m];
        for t in 0..m {
            mu[t] = (0..m).filter(|s| s & t == t).map(|s| p[s]).sum();
        }
        let mv = MomentVector::new(d, mu.clone()).unwrap();
        let fast = moments_to_probs(&mv).unwrap();
        let slow = brute_joint_probs(&mv).unwrap();
        for s in 0..m {
            worst_fwd = worst_fwd.max((fast.p[s] - slow.p[s]).abs());
        }
        let back = probs_to_moments(&fast);
        for t in 0..m {
            worst_rt = worst_rt.max((back.mu[t] - mu[t]).abs());
        }
    }
    pass_if(
        worst_fwd <= 1e-12 && worst_rt <= 1e-12,
        format!("1000 vectors, max |fast - oracle| = {worst_fwd:.2e}, max round-trip error = {worst_rt:.2e} (tol 1e-12)"),
    )
}

fn c3_mer_expectations() -> Outcome {
    let p = parse_mer_params("1=0.3,2=0.4,12=0.12", 2).unwrap();
    let tri = builtin_motif("triangle").unwrap();
    let subsets = LayerSubset::all(2);
    let summary = monte_carlo_moments(
        |s| {
            let net = sample_mer(60, 2, &p, s).unwrap();
            subsets.iter().map(|&k| count_cross_layer(&net, k, &tri).unwrap() as f64).collect()
        },
        1000,
        3,
    )
    .unwrap();
    let c = 60.0 * 59.0 * 58.0 / 6.0;
    let mut ok = true;
    let mut parts = Vec::new();
    for (i, k) in subsets.iter().enumerate() {
        let expect = c * p[k].powi(3);
        let z = (summary.mean[i] - expect) / summary.se[i];
        ok &= z.abs() <= 4.0;
        parts.push(format!("{k}: mean {:.2} vs {expect:.2} ({z:+.2} SE)", summary.mean[i]));
    }
    pass_if(ok, parts.join(", "))
}

fn c4_covariance() -> Outcome {
    let p = parse_mer_params("1=0.5,2=0.5,12=0.25", 2).unwrap();
    let edge = builtin_motif("edge").unwrap();
    let subsets = LayerSubset::all(2);
    let n = 200usize;
    let pairs = (n * (n - 1) / 2) as f64;
    let mc = monte_carlo_moments(
        |s| {
            let net = sample_mer(n, 2, &p, s).unwrap();
            subsets
                .iter()
                .map(|&k| (count_cross_layer(&net, k, &edge).unwrap() as f64 - pairs * p[&k]) / n as f64)
                .collect()
        },
        2000,
        4,
    )
    .unwrap();
    let explicit = mer_covariance(&p, &edge, CovarianceMode::Enumerated).unwrap();
    let literal = mer_covariance(&p, &edge, CovarianceMode::Literal).unwrap();
    let within = |m: &mm_core::asymptotics::SubsetMatrix, i: usize, j: usize| {
        let (si, sj) = (subsets[i], subsets[j]);
        let target = m.get(si, sj).unwrap();
        let got = mc.cov(i, j);
        let tol = if target == 0.0 {
            0.2 * (m.get(si, si).unwrap() * m.get(sj, sj).unwrap()).sqrt()
        } else {
            0.2 * target.abs()
        };
        (got - target).abs() <= tol
    };
    let mut explicit_ok = true;
    let mut literal_any_fail = false;
    for i in 0..3 {
        for j in 0..3 {
            explicit_ok &= within(&explicit, i, j);
            literal_any_fail |= !within(&literal, i, j);
        }
    }
    let scalar = mer_covariance(&parse_mer_params("1=0.5", 1).unwrap(), &edge, CovarianceMode::Enumerated).unwrap();
    let scalar_ok = (scalar.values[0][0] - 0.125).abs() < 1e-15;
    pass_if(
        explicit_ok && literal_any_fail && scalar_ok,
        format!(
            "MC Var(Z_1) = {:.4}, Cov(Z_1,Z_12) = {:.4}, Cov(Z_1,Z_2) = {:.4}, Var(Z_12) = {:.4}; explicit {:.4}/{:.4}/{:.4}/{:.4} within 20%: {explicit_ok}; literal Var {:.5} fails as expected: {literal_any_fail}; scalar σ = {}",
            mc.cov(0, 0),
            mc.cov(0, 2),
            mc.cov(0, 1),
            mc.cov(2, 2),
            explicit.values[0][0],
            explicit.values[0][2],
            explicit.values[0][1],
            explicit.values[2][2],
            literal.values[0][0],
            scalar.values[0][0]
        ),
    )
}

fn shared_block_model() -> BlockGraphonVector {
    let mut m = BTreeMap::new();
    m.insert(subset("1", 2), vec![vec![0.5, 0.5], vec![0.5, 0.5]]);
    m.insert(subset("2", 2), vec![vec![0.5, 0.5], vec![0.5, 0.5]]);
    m.insert(subset("12", 2), vec![vec![0.5, 0.0], vec![0.0, 0.0]]);
    BlockGraphonVector::from_matrices(2, 1, m).unwrap()
}

fn c5a_regular() -> Outcome {
    let p = parse_mer_params("1=0.5,2=0.5,12=0.25", 2).unwrap();
    let edge = builtin_motif("edge").unwrap();
    let n = 500;
    let ok = (0..200u64)
        .filter(|&r| regularity_set(&sample_mer(n, 2, &p, mix_seed(51, r)).unwrap(), &edge).rejected.is_empty())
        .count();
    pass_if(ok >= 190, format!("MER(0.5,0.5,0.25), n=500: √n·σ̂² < 1 on every subset in {ok}/200 draws (need ≥ 190)"))
}

fn c5b_joint_irregular() -> Outcome {
    let w = shared_block_model();
    let edge = builtin_motif("edge").unwrap();
    let k12 = subset("12", 2);
    let n = 500usize;
    let mut detected = 0;
    let mut close = 0;
    let mut mean = 0.0;
    for r in 0..200u64 {
        let (net, _, _) = sample_exchangeable(n, &w, mix_seed(52, r)).unwrap();
        let s = empirical_sigma2(&net, &edge, k12).unwrap();
        mean += s / 200.0;
        if (n as f64).sqrt() * s > 1.0 {
            detected += 1;
        }
        if (s - 1.0 / 64.0).abs() <= 0.3 / 64.0 {
            close += 1;
        }
    }
    let pass = detected >= 190 && close >= 190;
    Outcome {
        pass,
        expected_fail: true,
        summary: format!(
            "shared-block model, n=500: √n·σ̂²(12) > 1 in {detected}/200 (need ≥ 190); σ̂² within 30% of 1/64 in {close}/200; mean σ̂² = {mean:.5}, mean √n·σ̂² = {:.3} < 1",
            (n as f64).sqrt() * mean
        ),
    }
}

fn c5c_large_n() -> Outcome {
    let w = shared_block_model();
    let edge = builtin_motif("edge").unwrap();
    let n = 8000usize;
    let mut detected = 0;
    let mut marginal_clean = 0;
    for r in 0..5u64 {
        let (net, _, _) = sample_exchangeable(n, &w, mix_seed(53, r)).unwrap();
        let rep = regularity_set(&net, &edge);
        if rep.is_rejected(subset("12", 2)) {
            detected += 1;
        }
        if !rep.is_rejected(subset("1", 2)) && !rep.is_rejected(subset("2", 2)) {
            marginal_clean += 1;
        }
    }
    pass_if(
        detected == 5 && marginal_clean == 5,
        format!("shared-block model, n=8000: (12) rejected in {detected}/5, layers 1 and 2 accepted in {marginal_clean}/5"),
    )
}

fn c6_sampling() -> Outcome {
    let p = parse_mer_params("1=0.5", 1).unwrap();
    let edge = builtin_motif("edge").unwrap();
    let n = 300usize;
    let pairs = (n * (n - 1) / 2) as f64;
    let mc = monte_carlo_moments(
        |s| {
            let net = sample_mer(n, 1, &p, s).unwrap();
            vec![(count_motif(net.layer(1), &edge) as f64 - pairs * 0.5) / n as f64]
        },
        2000,
        6,
    )
    .unwrap();
    let net = sample_mer(n, 1, &p, 60).unwrap();
    let report = regularity_set(&net, &edge);
    let stat = SamplingStatistic::new(&net, &edge, &report, None).unwrap();
    let reps = stat.replicates(5000, 61);
    let xs: Vec<f64> = reps.values.iter().map(|r| r[0]).collect();
    let m = xs.iter().sum::<f64>() / xs.len() as f64;
    let var = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64;
    let target = mc.cov(0, 0);
    let rel = (var - target).abs() / target;
    pass_if(
        report.rejected.is_empty() && rel <= 0.25,
        format!("Var(Ẑ) = {var:.4} over 5000 replicates vs Monte Carlo Var(Z_F) = {target:.4} (rel {rel:.3}, tol 0.25), regular branch: {}", report.rejected.is_empty()),
    )
}

fn theta2(t1: [f64; 3], t2: [f64; 3], t12: [f64; 3]) -> BlockGraphonVector {
    let m = |t: [f64; 3]| vec![vec![t[0], t[1]], vec![t[1], t[2]]];
    let mut th = BTreeMap::new();
    th.insert(subset("1", 2), m(t1));
    th.insert(subset("2", 2), m(t2));
    th.insert(subset("12", 2), m(t12));
    BlockGraphonVector::from_matrices(2, 0, th).unwrap()
}

fn c7_estimation() -> Outcome {
    let n = 400;
    let truth = theta2([0.7, 0.3, 0.6], [0.6, 0.35, 0.7], [0.5, 0.15, 0.5]);
    let tri = builtin_motif("triangle").unwrap();
    let z = CommunityAssignment::balanced(n, 2).unwrap();
    let all = LayerSubset::all(2);
    let mut good = 0;
    let mut worst = 0.0f64;
    for r in 0..100u64 {
        let (net, _) = sample_msbm(n, &truth, Some(&z), mix_seed(71, r)).unwrap();
        let fit = estimate_theta(&net, &z, &tri, &all).unwrap();
        let mut err = 0.0f64;
        for &u in &all {
            for a in 0..2 {
                for b in 0..2 {
                    err = err.max((fit.theta_hat.get(u, a, b) - truth.get(u, a, b)).abs());
                }
            }
        }
        worst = worst.max(err);
        if err <= 0.05 {
            good += 1;
        }
    }
    let separated = theta2([0.7, 0.2, 0.7], [0.6, 0.25, 0.65], [0.45, 0.06, 0.48]);
    let mut recovered = 0;
    let mut worst_acc = 1.0f64;
    for r in 0..100u64 {
        let (net, zt) = sample_msbm(n, &separated, None, mix_seed(72, r)).unwrap();
        let fitted = fit_communities(&net, 2, false, mix_seed(73, r)).unwrap();
        let acc = label_accuracy(&zt, &fitted);
        worst_acc = worst_acc.min(acc);
        if acc >= 0.99 {
            recovered += 1;
        }
    }
    pass_if(
        good >= 90 && recovered >= 95,
        format!(
            "true labels: max-abs error ≤ 0.05 in {good}/100 (worst {worst:.4}); fitted labels: accuracy ≥ 0.99 in {recovered}/100 (worst {worst_acc:.4})"
        ),
    )
}

fn similarity_rate(p: &str, n: usize, seed: u64) -> usize {
    let p = parse_mer_params(p, 2).unwrap();
    let tri = builtin_motif("triangle").unwrap();
    (0..200u64)
        .filter(|&r| {
            let net = sample_mer(n, 2, &p, mix_seed(seed, r)).unwrap();
            similarity_test(&net, &tri, (1, 2), 0.05, 500, mix_seed(seed + 1, r)).unwrap().reject
        })
        .count()
}

fn c8_similarity() -> Outcome {
    let level = similarity_rate("1=0.5,2=0.5,12=0.25", 150, 81);
    let power = similarity_rate("1=0.5,2=0.7,12=0.35", 100, 83);
    pass_if(
        level <= 20 && power >= 180,
        format!("level: {level}/200 rejections under shared ER(0.5), n=150 (need ≤ 20); power: {power}/200 at 0.5 vs 0.7, n=100 (need ≥ 180)"),
    )
}

fn independence_run(theta: &BlockGraphonVector, r: u64, seed: u64) -> TestResult {
    let n = 300;
    let z = CommunityAssignment::balanced(n, 2).unwrap();
    let (net, _) = sample_msbm(n, theta, Some(&z), mix_seed(seed, r)).unwrap();
    let tri = builtin_motif("triangle").unwrap();
    let star = builtin_motif("twostar").unwrap();
    independence_test(&net, &z, &star, &tri, (subset("1", 2), subset("2", 2)), 0.05, 1000, mix_seed(seed + 1, r))
        .unwrap()
}

fn residuals_ok(t: &TestResult) -> bool {
    match &t.details {
        mm_core::hyptests::TestDetails::Independence(d) => d.blocks.iter().all(|b| b.residual < 1e-8 * b.c_ab),
        _ => false,
    }
}

fn c9_independence() -> Outcome {
    let (t1, t2) = ([0.6, 0.3, 0.5], [0.5, 0.4, 0.6]);
    let prod = [t1[0] * t2[0], t1[1] * t2[1], t1[2] * t2[2]];
    let null = theta2(t1, t2, prod);
    let como = theta2([0.5; 3], [0.6; 3], [0.5; 3]);
    let mut accept = 0;
    let mut reject = 0;
    let mut residual_fail = 0;
    for r in 0..100u64 {
        let t = independence_run(&null, r, 91);
        if !t.reject {
            accept += 1;
        }
        residual_fail += usize::from(!residuals_ok(&t));
        let t = independence_run(&como, r, 93);
        if t.reject {
            reject += 1;
        }
        residual_fail += usize::from(!residuals_ok(&t));
    }
    pass_if(
        accept >= 90 && reject >= 90 && residual_fail == 0,
        format!("null acceptance {accept}/100 (need ≥ 90); comonotone rejection {reject}/100 (need ≥ 90); runs with residual ≥ 1e-8·c_ab: {residual_fail}"),
    )
}

fn with_threads<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(f)
}

fn fingerprint() -> Vec<u64> {
    let mut out = Vec::new();
    let tri = builtin_motif("triangle").unwrap();
    let edge = builtin_motif("edge").unwrap();
    let p = parse_mer_params("1=0.3,2=0.4,12=0.12", 2).unwrap();
    for r in 0..3u64 {
        let net = sample_mer(60, 2, &p, mix_seed(3, r)).unwrap();
        out.extend(LayerSubset::all(2).iter().map(|&k| count_cross_layer(&net, k, &tri).unwrap() as u64));
    }
    let net = sample_mer(300, 1, &parse_mer_params("1=0.5", 1).unwrap(), 60).unwrap();
    let report = regularity_set(&net, &edge);
    let reps = SamplingStatistic::new(&net, &edge, &report, None).unwrap().replicates(500, 61);
    out.extend(reps.values.iter().map(|r| r[0].to_bits()));
    let (net, _, _) = sample_exchangeable(500, &shared_block_model(), mix_seed(52, 0)).unwrap();
    out.push(empirical_sigma2(&net, &edge, subset("12", 2)).unwrap().to_bits());
    let separated = theta2([0.7, 0.2, 0.7], [0.6, 0.25, 0.65], [0.45, 0.06, 0.48]);
    let (net, _) = sample_msbm(400, &separated, None, mix_seed(72, 0)).unwrap();
    let fitted = fit_communities(&net, 2, false, mix_seed(73, 0)).unwrap();
    out.extend(fitted.labels().iter().map(|&l| l as u64));
    let est = estimate_theta(&net, &fitted, &tri, &LayerSubset::all(2)).unwrap();
    for u in LayerSubset::all(2) {
        out.extend(est.theta_hat.matrix(u).unwrap().iter().map(|x| x.to_bits()));
    }
    for r in 0..2u64 {
        let net = sample_mer(150, 2, &parse_mer_params("1=0.5,2=0.5,12=0.25", 2).unwrap(), mix_seed(81, r)).unwrap();
        let t = similarity_test(&net, &tri, (1, 2), 0.05, 500, mix_seed(82, r)).unwrap();
        out.extend([t.statistic.to_bits(), t.quantile.to_bits()]);
    }
    let t = independence_run(&theta2([0.6, 0.3, 0.5], [0.5, 0.4, 0.6], [0.3, 0.12, 0.3]), 0, 91);
    out.extend([t.statistic.to_bits(), t.quantile.to_bits()]);
    out
}

fn c10_determinism() -> Outcome {
    let base = with_threads(1, fingerprint);
    let mut same = true;
    for t in [2, 3, 8] {
        same &= with_threads(t, fingerprint) == base;
    }
    same &= with_threads(8, fingerprint) == base;
    pass_if(same, format!("{} statistics bit-identical across 1, 2, 3 and 8 threads and a repeat run", base.len()))
}

fn main() {
    let criteria: Vec<(&str, fn() -> Outcome, Duration)> = vec![
        ("1 exact counting", c1_counting, Duration::from_secs(120)),
        ("2 Teugels transform", c2_teugels, Duration::from_secs(10)),
        ("3 MER expectations", c3_mer_expectations, Duration::from_secs(300)),
        ("4 limiting covariance", c4_covariance, Duration::MAX),
        ("5a regularity, constant graphon", c5a_regular, Duration::from_secs(600)),
        ("5b regularity, joint graphon n=500", c5b_joint_irregular, Duration::from_secs(600)),
        ("5c regularity, joint graphon n=8000", c5c_large_n, Duration::MAX),
        ("6 sampling statistic", c6_sampling, Duration::MAX),
        ("7 estimation", c7_estimation, Duration::MAX),
        ("8 similarity test", c8_similarity, Duration::MAX),
        ("9 independence test", c9_independence, Duration::MAX),
        ("10 determinism", c10_determinism, Duration::MAX),
    ];
    let mut unexpected = 0;
    for (name, run, budget) in criteria {
        let start = Instant::now();
        let mut o = run();
        let took = start.elapsed();
        if took > budget {
            o.pass = false;
            o.summary.push_str(&format!("; runtime {took:.1?} over budget {budget:?}"));
        }
        let tag = match (o.pass, o.expected_fail) {
            (true, false) => "PASS",
            (false, false) => "FAIL",
            (false, true) => "FAIL (expected)",
            (true, true) => "PASS (unexpected)",
        };
        if o.pass == o.expected_fail {
            unexpected += 1;
        }
        println!("{tag} criterion {name}: {} [{took:.1?}]", o.summary);
    }
    if unexpected > 0 {
        eprintln!("{unexpected} criteria with unexpected outcome");
        std::process::exit(1);
    }
}
