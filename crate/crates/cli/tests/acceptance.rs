//! Acceptance suite. Runs without the libtest harness so that every criterion
//! prints exactly one PASS/FAIL line; exits nonzero if any fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use partmax::algorithms::{
    brute_force, fast_prob, fast_prob_pool_size, greedy, prob, residual_greedy, sample_pool,
    threshold_greedy,
};
use partmax::influence::{
    lemma3_bounds, BoostedGraph, ExactOracle, Lemma3Options, MonteCarloOracle, RealizationSet,
    WeightedEdge,
};
use partmax::matroid::Subset;
use partmax::oracle::{normalize, CardinalitySquared, CountingOracle, Objective};
use partmax::quantify::{exact_gamma_alpha, greedy_ratios, prob_beta, thrgreedy_ratios};
use partmax::rng::{derive_seed, rng_from_seed, RunRng};
use partmax::summarization::{
    gaussian_gram, lemma4_gamma_bound, symmetric_eigenvalues, Bandwidth, DetObjective,
    FrameFeatures, SymMatrix, DEFAULT_JACOBI_TOL,
};
use partmax::synthetic::{random_matroid, SyntheticKind};
use partmax::PartitionMatroid;
use partmax_cli::{App, ExperimentConfig, ParamChoice, Vary, Workload};
use rand::Rng;

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(limit: Duration, start: Instant) -> Result<(), String> {
    let took = start.elapsed();
    ensure(took < limit, || format!("took {took:.1?}, limit {limit:?}"))
}

/// Random instance of a built-in family.
fn instance(
    rng: &mut RunRng,
    kind: SyntheticKind,
    n_max: usize,
    groups: usize,
) -> (PartitionMatroid, Box<dyn Objective>) {
    let n = rng.gen_range(2..=n_max);
    let m = random_matroid(n, groups, rng).unwrap();
    (m, kind.oracle(n, rng))
}

fn c1_brute_force_agreement() -> Check {
    let start = Instant::now();
    let mut rng = rng_from_seed(101);
    for i in 0..100 {
        let (m, f) = instance(&mut rng, SyntheticKind::Modular, 12, 4);
        let (g, opt) = (
            greedy(&m, &f).objective,
            brute_force(&m, &f).unwrap().objective,
        );
        ensure(g == opt, || {
            format!("instance {i}: greedy {g} vs optimum {opt}")
        })?;
    }
    within(Duration::from_secs(5), start)?;
    Ok(format!("100/100 exact in {:.2?}", start.elapsed()))
}

/// Both defining inequalities on every triple, over a table indexed by mask.
fn definitions_hold(
    m: &PartitionMatroid,
    f: &dyn Objective,
    gamma: f64,
    alpha: f64,
) -> Result<usize, String> {
    let n = m.n();
    let vals: Vec<f64> = (0u32..1 << n)
        .map(|mask| {
            let elems: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
            f.value(&Subset::from_elements(n, &elems).unwrap())
        })
        .collect();
    let mut triples = 0;
    for t in 0u32..1 << n {
        for s in (0u32..1 << n).filter(|s| s & !t == 0) {
            let d = t & !s;
            let fits = (0..m.k())
                .all(|g| m.group(g).iter().filter(|&&e| d >> e & 1 == 1).count() <= m.budget(g));
            if !fits {
                continue;
            }
            for e in (0..n).filter(|e| t >> e & 1 == 0) {
                let gs = vals[(s | 1 << e) as usize] - vals[s as usize];
                let gt = vals[(t | 1 << e) as usize] - vals[t as usize];
                triples += 1;
                ensure(gamma * gt <= gs + 1e-9, || {
                    format!("DR ratio broken at S={s:b} T={t:b} e={e}")
                })?;
                ensure(gt >= (1.0 - alpha) * gs - 1e-9, || {
                    format!("curvature broken at S={s:b} T={t:b} e={e}")
                })?;
            }
        }
    }
    Ok(triples)
}

fn c2_definition_round_trip() -> Check {
    let mut rng = rng_from_seed(102);
    let mut triples = 0;
    for kind in SyntheticKind::ALL {
        for _ in 0..50 {
            let (m, f) = instance(&mut rng, kind, 8, 3);
            let p = exact_gamma_alpha(&m, &f).map_err(|e| e.to_string())?;
            triples += definitions_hold(&m, &f, p.gamma, p.alpha)?;
        }
    }
    let toy = exact_gamma_alpha(
        &PartitionMatroid::uniform(2, 1).unwrap(),
        &CardinalitySquared::new(2),
    )
    .unwrap();
    ensure(
        (toy.gamma - 1.0 / 3.0).abs() <= 1e-12 && toy.alpha == 0.0,
        || format!("toy gave {toy:?}"),
    )?;
    Ok(format!(
        "{triples} triples on 150 instances; toy γ={}",
        toy.gamma
    ))
}

fn c3_greedy_bounds() -> Check {
    let mut rng = rng_from_seed(103);
    let mut checked = 0;
    for i in 0..100 {
        let kind = SyntheticKind::ALL[i % 3];
        let (m, f) = instance(&mut rng, kind, 10, 3);
        let p = exact_gamma_alpha(&m, &f).unwrap();
        let opt = brute_force(&m, &f).unwrap().objective;
        let (b, b_hat) = (m.total_budget(), m.min_budget());
        let (g1, g2) = greedy_ratios(p.gamma, p.alpha, b, b_hat).map_err(|e| e.to_string())?;
        let (t1, t2) =
            thrgreedy_ratios(p.gamma, p.alpha, 0.5, b, b_hat).map_err(|e| e.to_string())?;
        let g = greedy(&m, &f).objective;
        let t = threshold_greedy(&m, &f, 0.5).unwrap().objective;
        ensure(g >= opt * g1.max(g2) - 1e-9, || {
            format!("instance {i}: greedy {g} < {opt}·{}", g1.max(g2))
        })?;
        ensure(t >= opt * t1.max(t2) - 1e-9, || {
            format!("instance {i}: thr {t} < {opt}·{}", t1.max(t2))
        })?;
        checked += 1;
    }
    Ok(format!("{checked} instances, 0 violations"))
}

fn c4_prob_bound() -> Check {
    let start = Instant::now();
    let mut rng = rng_from_seed(104);
    let runs = 2000;
    let mut worst = f64::INFINITY;
    for i in 0..20 {
        let kind = SyntheticKind::ALL[i % 3];
        let (m, f) = instance(&mut rng, kind, 8, 3);
        let p = exact_gamma_alpha(&m, &f).unwrap();
        let opt = brute_force(&m, &f).unwrap().objective;
        let beta = prob_beta(p.gamma, p.alpha, m.max_group_size());
        let mut run_rng = rng_from_seed(derive_seed(104, &[i as u64]));
        let vals: Vec<f64> = (0..runs)
            .map(|_| {
                prob(&m, &f, p.gamma, p.alpha, &mut run_rng)
                    .unwrap()
                    .objective
            })
            .collect();
        let mean = vals.iter().sum::<f64>() / runs as f64;
        let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (runs as f64 - 1.0);
        let se = (var / runs as f64).sqrt();
        // summing 2000 equal floats is not exact
        let floor = opt / (beta + 1.0) - 3.0 * se - 1e-9 * opt.abs().max(1.0);
        ensure(mean >= floor, || {
            format!("instance {i}: mean {mean} < {floor}")
        })?;
        if opt > 0.0 {
            worst = worst.min(mean / opt);
        }
    }
    within(Duration::from_secs(60), start)?;
    Ok(format!(
        "20 instances × {runs} runs, worst mean/opt {worst:.3}, {:.1?}",
        start.elapsed()
    ))
}

fn c5_pool_sampling() -> Check {
    let draws = 100_000;
    let mut rng = rng_from_seed(105);
    // (n_i, b_i, s, b, δ)
    let configs = [
        (200, 10, 0, 20, 0.1),
        (200, 10, 5, 20, 0.1),
        (100, 4, 0, 8, 0.2),
        (100, 4, 3, 8, 0.2),
        (500, 25, 0, 50, 0.5),
        (500, 25, 20, 50, 0.5),
        (60, 6, 0, 12, 0.1),
        (80, 2, 1, 4, 0.05),
        (1000, 50, 10, 100, 0.9),
        (300, 3, 0, 6, 0.3),
    ];
    let mut worst = 0.0f64;
    for (n_i, b_i, s, b, delta) in configs {
        let candidates: Vec<usize> = (0..n_i - s).collect();
        let target = b_i - s;
        let size = fast_prob_pool_size(n_i, s, b_i, b, delta);
        let misses = (0..draws)
            .filter(|_| {
                sample_pool(&mut rng, &candidates, size)
                    .iter()
                    .all(|&e| e >= target)
            })
            .count();
        let p = delta / b as f64;
        let bound = p + 3.0 * (p * (1.0 - p) / draws as f64).sqrt();
        let freq = misses as f64 / draws as f64;
        ensure(freq <= bound, || {
            format!("{:?}: miss {freq} > {bound}", (n_i, b_i, s, b, delta))
        })?;
        worst = worst.max(freq / p);
    }
    Ok(format!(
        "10 configurations × {draws} draws, worst miss/(δ/b) {worst:.3}"
    ))
}

fn c6_query_audits() -> Check {
    let mut rng = rng_from_seed(106);
    let eps: f64 = 0.5;
    let delta = 0.01;
    for i in 0..90 {
        let (m, f) = instance(&mut rng, SyntheticKind::ALL[i % 3], 12, 4);
        let (n, b) = (m.n() as u64, m.total_budget());
        let mut alg_rng = rng_from_seed(i as u64);

        let outer = CountingOracle::new(&f);
        let g = greedy(&m, &outer);
        ensure(g.queries <= n * b as u64, || {
            format!("{i}: greedy {} > n·b", g.queries)
        })?;
        ensure(outer.count() == g.queries + 1, || {
            format!("{i}: greedy audit {} vs {}", outer.count(), g.queries)
        })?;

        let p = prob(&m, &f, 0.5, 0.5, &mut alg_rng).unwrap();
        let cap: u64 = (0..m.k())
            .map(|j| (m.group_size(j) * m.budget(j)) as u64)
            .sum();
        ensure(p.queries <= cap, || {
            format!("{i}: prob {} > Σ n_i b_i = {cap}", p.queries)
        })?;

        let outer = CountingOracle::new(&f);
        let fp = fast_prob(&m, &outer, 0.5, 0.5, delta, &mut alg_rng).unwrap();
        let mut occupancy = vec![0; m.k()];
        let mut expected = 0u64;
        for step in &fp.trace {
            let grp = step.group;
            expected +=
                fast_prob_pool_size(m.group_size(grp), occupancy[grp], m.budget(grp), b, delta)
                    as u64;
            occupancy[grp] += 1;
        }
        ensure(fp.queries == expected, || {
            format!("{i}: fastprob {} vs Σ m_t {expected}", fp.queries)
        })?;
        ensure(outer.count() == fp.queries + 1, || {
            format!("{i}: fastprob audit mismatch")
        })?;

        let t = threshold_greedy(&m, &f, eps).unwrap();
        let limit = ((b as f64 / (eps * (1.0 - eps))).ln() / -(1.0 - eps).ln()).ceil() as usize + 1;
        let rounds = t.rounds.unwrap_or(0);
        ensure(rounds <= limit, || {
            format!("{i}: thr rounds {rounds} > {limit}")
        })?;

        let r = residual_greedy(&m, &f, &mut alg_rng);
        ensure(r.queries <= n * b as u64, || {
            format!("{i}: resgreedy {} > n·b", r.queries)
        })?;
    }
    Ok("90 instances, all counts within limits and equal to outer audits".into())
}

fn random_boosted(rng: &mut RunRng) -> BoostedGraph {
    let nodes = rng.gen_range(2..=5);
    let count = rng.gen_range(1..=8);
    let edges = (0..count)
        .map(|_| {
            let src = rng.gen_range(0..nodes);
            let dst = (src + rng.gen_range(1..nodes)) % nodes;
            let p0: f64 = rng.gen_range(0.05..0.7);
            let p1 = (p0 + rng.gen_range(0.0..0.3)).min(0.95);
            WeightedEdge { src, dst, p0, p1 }
        })
        .collect();
    BoostedGraph::new(nodes, edges, vec![0]).unwrap()
}

fn c7_influence_sandwich() -> Check {
    let mut rng = rng_from_seed(107);
    for i in 0..50 {
        let g = random_boosted(&mut rng);
        let m = random_matroid(g.nodes(), 2, &mut rng).unwrap();
        let bound = lemma3_bounds(&g, m.total_budget(), Lemma3Options::default());
        let exact = exact_gamma_alpha(&m, &normalize(ExactOracle::new(g).unwrap())).unwrap();
        ensure(exact.gamma >= bound.gamma - 1e-12, || {
            format!("{i}: γ {} < γ′ {}", exact.gamma, bound.gamma)
        })?;
        ensure(exact.alpha <= bound.alpha + 1e-12, || {
            format!("{i}: α {} > α′ {}", exact.alpha, bound.alpha)
        })?;
    }
    let mut worst = 0.0f64;
    for i in 0..5 {
        let g = random_boosted(&mut rng);
        let n = g.nodes();
        let boosted: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.5)).collect();
        let set = Subset::from_elements(n, &boosted).unwrap();
        let exact = ExactOracle::new(g.clone()).unwrap().value(&set);
        let mc = MonteCarloOracle::new(g, &RealizationSet::new(derive_seed(107, &[i]), 1_000_000));
        let (mean, se) = mc.value_with_stderr(&set);
        ensure((mean - exact).abs() <= 3.0 * se + 1e-12, || {
            format!("{i}: MC {mean} ± {se} vs exact {exact}")
        })?;
        if se > 0.0 {
            worst = worst.max((mean - exact).abs() / se);
        }
    }
    Ok(format!(
        "50 graphs, 0 violations; MC within {worst:.2} std-errs on 5"
    ))
}

fn c8_determinant_sandwich() -> Check {
    let mut rng = rng_from_seed(108);
    for i in 0..50 {
        let n = rng.gen_range(2..=8);
        let feats = FrameFeatures::synthetic(n, 3, rng.gen_range(1..=4), 0.5, &mut rng);
        let (gram, _) = gaussian_gram(&feats, Bandwidth::Median).unwrap();
        // total budget at most 3
        let k = rng.gen_range(1..=n.min(3));
        let assignment: Vec<usize> = (0..n)
            .map(|e| if e < k { e } else { rng.gen_range(0..k) })
            .collect();
        let m = PartitionMatroid::from_assignment(&assignment, vec![1; k]).unwrap();
        let bound = lemma4_gamma_bound(&gram, m.total_budget()).unwrap();
        let exact = exact_gamma_alpha(&m, &normalize(DetObjective::new(&gram).unwrap())).unwrap();
        ensure(exact.gamma >= bound.gamma - 1e-12, || {
            format!("{i}: γ {} < γ′ {}", exact.gamma, bound.gamma)
        })?;
        ensure(exact.alpha <= 1e-9, || format!("{i}: α {}", exact.alpha))?;
    }
    Ok("50 Gram instances, 0 violations".into())
}

/// Laplace expansion along the first row.
fn cofactor_det(a: &[Vec<f64>]) -> f64 {
    let n = a.len();
    if n == 0 {
        return 1.0;
    }
    if n == 1 {
        return a[0][0];
    }
    (0..n)
        .map(|j| {
            let minor: Vec<Vec<f64>> = a[1..]
                .iter()
                .map(|row| {
                    row.iter()
                        .enumerate()
                        .filter(|&(c, _)| c != j)
                        .map(|(_, &v)| v)
                        .collect()
                })
                .collect();
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            sign * a[0][j] * cofactor_det(&minor)
        })
        .sum()
}

fn c9_numerics() -> Check {
    let mut rng = rng_from_seed(109);
    let mut worst_eig = 0.0f64;
    for i in 0..50 {
        let mut rows = vec![vec![0.0; 8]; 8];
        for r in 0..8 {
            for c in r..8 {
                let v: f64 = rng.gen_range(-1.0..1.0);
                rows[r][c] = v;
                rows[c][r] = v;
            }
        }
        let a = SymMatrix::from_rows(&rows).unwrap();
        let lambda = symmetric_eigenvalues(&a, DEFAULT_JACOBI_TOL).map_err(|e| e.to_string())?;
        let (tr, det) = (a.trace(), cofactor_det(&rows));
        let tr_err = (lambda.iter().sum::<f64>() - tr).abs() / tr.abs().max(1e-300);
        let det_err = (lambda.iter().product::<f64>() - det).abs() / det.abs().max(1e-300);
        ensure(tr_err <= 1e-9, || {
            format!("matrix {i}: trace rel err {tr_err:e}")
        })?;
        ensure(det_err <= 1e-9, || {
            format!("matrix {i}: det rel err {det_err:e}")
        })?;
        worst_eig = worst_eig.max(tr_err).max(det_err);
    }
    let mut worst_det = 0.0f64;
    for _ in 0..20 {
        let n = rng.gen_range(6..=12);
        let feats = FrameFeatures::synthetic(n, 4, 3, 0.4, &mut rng);
        let (gram, _) = gaussian_gram(&feats, Bandwidth::Median).unwrap();
        let f = DetObjective::new(&gram).unwrap();
        let a = gram.a();
        for _ in 0..10 {
            let size = rng.gen_range(1..=6);
            let mut elems: Vec<usize> = (0..n).collect();
            for j in 0..size {
                let pick = rng.gen_range(j..n);
                elems.swap(j, pick);
            }
            elems.truncate(size);
            let sub: Vec<Vec<f64>> = elems
                .iter()
                .map(|&r| elems.iter().map(|&c| a.get(r, c)).collect())
                .collect();
            let expected = cofactor_det(&sub);
            let got = f.log_det(&Subset::from_elements(n, &elems).unwrap()).exp();
            let err = (got - expected).abs() / expected.abs();
            ensure(err <= 1e-10, || {
                format!("det of {elems:?}: {got} vs {expected}")
            })?;
            worst_det = worst_det.max(err);
        }
    }
    Ok(format!(
        "eigen rel err ≤ {worst_eig:.1e}, log-det rel err ≤ {worst_det:.1e}"
    ))
}

fn c10_query_trend() -> Check {
    let start = Instant::now();
    let config = ExperimentConfig {
        app: App::Influence,
        algorithms: vec![partmax::Algorithm::Greedy, partmax::Algorithm::FastProb],
        b: 1024,
        n: 2000,
        avg_degree: 10.0,
        repetitions: 5,
        seed: 2024,
        gamma_prime: ParamChoice::Auto,
        alpha_prime: ParamChoice::Auto,
        ..Default::default()
    };
    config.validate().map_err(|e| e.to_string())?;
    let work = Workload::load(&config).map_err(|e| e.to_string())?;
    let r = partmax_cli::sweep_with(&config, &work, Vary::K, &[2, 4, 8, 16])
        .map_err(|e| e.to_string())?;
    let greedy_q: Vec<f64> = r.queries.iter().map(|row| row[0]).collect();
    let fast_q: Vec<f64> = r.queries.iter().map(|row| row[1]).collect();
    ensure(fast_q.windows(2).all(|w| w[1] < w[0]), || {
        format!("fastprob queries not decreasing: {fast_q:?}")
    })?;
    let base = greedy_q[0];
    ensure(
        greedy_q.iter().all(|q| (q / base - 1.0).abs() <= 0.05),
        || format!("greedy queries drift more than 5% from k=2: {greedy_q:?}"),
    )?;
    for (k, row) in r.values.iter().zip(&r.objective) {
        let gap = (row[1] - row[0]).abs() / row[0];
        ensure(gap <= 0.05, || {
            format!("k={k}: fastprob {} vs greedy {}", row[1], row[0])
        })?;
    }
    within(Duration::from_secs(600), start)?;
    Ok(format!(
        "fastprob queries {fast_q:?}, greedy {greedy_q:?}, {:.0?}",
        start.elapsed()
    ))
}

fn main() {
    let criteria: [(&str, fn() -> Check); 10] = [
        ("brute-force agreement", c1_brute_force_agreement),
        ("definition round-trip", c2_definition_round_trip),
        ("greedy and threshold greedy bounds", c3_greedy_bounds),
        ("prob bound (statistical)", c4_prob_bound),
        ("pool sampling guarantee", c5_pool_sampling),
        ("query-count audits", c6_query_audits),
        ("influence bound sandwich", c7_influence_sandwich),
        ("determinant bound sandwich", c8_determinant_sandwich),
        ("numerics", c9_numerics),
        ("query trend over k", c10_query_trend),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome =
            catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why}", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
