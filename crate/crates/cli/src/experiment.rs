use std::fs::{self, OpenOptions};
use std::io::Write;
use std::path::Path;
use std::time::Instant;

use partmax::algorithms::{
    brute_force, fast_prob, greedy, prob, residual_greedy, threshold_greedy,
};
use partmax::oracle::Objective;
use partmax::quantify::{exact_gamma_alpha, Provenance};
use partmax::rng::{derive_seed, rng_from_seed};
use partmax::{Algorithm, NonSubmodParams, PartitionMatroid, RatioReport, RunResult};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{ExperimentConfig, ParamChoice, Vary};
use crate::error::{CliError, CliResult};
use crate::workload::Workload;

/// `γ′` and `α′` as handed to the randomized algorithms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResolvedParams {
    pub gamma: Option<f64>,
    pub alpha: Option<f64>,
    /// The app bound, when either value came from it.
    pub bound: Option<NonSubmodParams>,
}

impl ResolvedParams {
    fn required(&self, alg: Algorithm) -> CliResult<(f64, f64)> {
        match (self.gamma, self.alpha) {
            (Some(g), Some(a)) => Ok((g, a)),
            _ => Err(CliError::Config(format!(
                "{alg} needs gamma-prime and alpha-prime"
            ))),
        }
    }
}

pub fn resolve_params(
    config: &ExperimentConfig,
    work: &Workload,
    m: &PartitionMatroid,
) -> CliResult<ResolvedParams> {
    let auto = matches!(config.gamma_prime, ParamChoice::Auto)
        || matches!(config.alpha_prime, ParamChoice::Auto);
    let bound =
        if auto && !(config.app == crate::config::App::Summarization && config.log_objective) {
            work.app_bounds(m)?
        } else {
            None
        };
    let pick = |choice: ParamChoice, from_bound: Option<f64>| match choice {
        ParamChoice::Value(v) => Some(v),
        ParamChoice::Auto => from_bound,
    };
    Ok(ResolvedParams {
        gamma: pick(config.gamma_prime, bound.map(|p| p.gamma)),
        alpha: pick(config.alpha_prime, bound.map(|p| p.alpha)),
        bound,
    })
}

/// Runs one algorithm with a fresh RNG seeded by `seed`.
pub fn run_one<O: Objective + ?Sized>(
    alg: Algorithm,
    m: &PartitionMatroid,
    oracle: &O,
    params: &ResolvedParams,
    config: &ExperimentConfig,
    seed: u64,
) -> CliResult<RunResult> {
    let mut rng = rng_from_seed(seed);
    Ok(match alg {
        Algorithm::Greedy => greedy(m, oracle),
        Algorithm::Thr => threshold_greedy(m, oracle, config.epsilon)?,
        Algorithm::Prob => {
            let (g, a) = params.required(alg)?;
            prob(m, oracle, g, a, &mut rng)?
        }
        Algorithm::FastProb => {
            let (g, a) = params.required(alg)?;
            fast_prob(m, oracle, g, a, config.delta, &mut rng)?
        }
        Algorithm::ResGreedy => residual_greedy(m, oracle, &mut rng),
        Algorithm::Brute => brute_force(m, oracle)?,
    })
}

/// One repetition of one algorithm.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunRow {
    pub app: &'static str,
    pub algorithm: &'static str,
    pub b: usize,
    pub k: usize,
    pub rep: usize,
    pub seed: u64,
    pub objective: f64,
    pub raw_objective: f64,
    pub queries: u64,
    pub gamma_prime: Option<f64>,
    pub alpha_prime: Option<f64>,
    /// Only filled with `--timing`, so files stay reproducible by default.
    pub wall_ms: Option<f64>,
}

/// Every selected algorithm, `repetitions` times, on partition `m`.
///
/// Repetition `r` uses seed `derive_seed(master, [value, r])`. Deterministic
/// algorithms run once and their result stands for every repetition.
/// Output is grouped by algorithm, then ordered by repetition.
fn execute(
    config: &ExperimentConfig,
    work: &Workload,
    m: &PartitionMatroid,
    params: &ResolvedParams,
    value: u64,
) -> CliResult<Vec<Vec<RunRow>>> {
    let reps = config.repetitions;
    config
        .algorithms
        .iter()
        .map(|&alg| {
            let one = |rep: usize| -> CliResult<RunRow> {
                let seed = derive_seed(config.seed, &[value, rep as u64]);
                let oracle = work.oracle();
                let start = Instant::now();
                let r = run_one(alg, m, &oracle, params, config, seed)?;
                let wall = start.elapsed().as_secs_f64() * 1e3;
                Ok(RunRow {
                    app: config.app.name(),
                    algorithm: alg.name(),
                    b: m.total_budget(),
                    k: m.k(),
                    rep,
                    seed,
                    objective: r.objective,
                    raw_objective: r.objective + oracle.offset(),
                    queries: r.queries,
                    gamma_prime: params.gamma,
                    alpha_prime: params.alpha,
                    wall_ms: config.timing.then_some(wall),
                })
            };
            if alg.is_randomized() {
                (0..reps).into_par_iter().map(one).collect()
            } else {
                let first = one(0)?;
                Ok((0..reps)
                    .map(|rep| RunRow {
                        rep,
                        seed: derive_seed(config.seed, &[value, rep as u64]),
                        ..first.clone()
                    })
                    .collect())
            }
        })
        .collect()
}

pub struct RunReport {
    pub rows: Vec<RunRow>,
    pub params: ResolvedParams,
    pub matroid: PartitionMatroid,
}

/// Runs the configured algorithms on one `(b, k)` and appends the rows to
/// `config.output` (header only when the file is new), or prints them.
pub fn run(config: &ExperimentConfig) -> CliResult<RunReport> {
    let work = Workload::load(config)?;
    eprintln!("{}", work.summary);
    let m = work.matroid(config.b, config.k, false)?;
    let params = resolve_params(config, &work, &m)?;
    if let Some(p) = params.bound {
        println!(
            "# app bound: gamma'={} alpha'={} degenerate={}",
            p.gamma, p.alpha, p.degenerate
        );
    }
    println!(
        "# gamma'={} alpha'={}",
        fmt_opt(params.gamma),
        fmt_opt(params.alpha)
    );
    let rows: Vec<RunRow> = execute(config, &work, &m, &params, m.total_budget() as u64)?
        .into_iter()
        .flatten()
        .collect();
    match &config.output {
        Some(path) => {
            let fresh = fs::metadata(path).map(|md| md.len() == 0).unwrap_or(true);
            let file = OpenOptions::new().create(true).append(true).open(path)?;
            write_rows(file, &rows, fresh)?;
        }
        None => write_rows(std::io::stdout().lock(), &rows, true)?,
    }
    for alg in &config.algorithms {
        let own: Vec<&RunRow> = rows.iter().filter(|r| r.algorithm == alg.name()).collect();
        let n = own.len() as f64;
        eprintln!(
            "{:>9}: mean objective {:.6}, mean queries {:.1}",
            alg.name(),
            own.iter().map(|r| r.objective).sum::<f64>() / n,
            own.iter().map(|r| r.queries as f64).sum::<f64>() / n
        );
    }
    Ok(RunReport {
        rows,
        params,
        matroid: m,
    })
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map_or_else(|| "-".into(), |v| v.to_string())
}

fn write_rows<W: Write>(out: W, rows: &[RunRow], header: bool) -> CliResult<()> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(header)
        .from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Means over repetitions, one row per swept value.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub vary: Vary,
    pub values: Vec<usize>,
    pub algorithms: Vec<Algorithm>,
    /// `objective[v][a]`: mean normalized objective.
    pub objective: Vec<Vec<f64>>,
    pub queries: Vec<Vec<f64>>,
}

impl SweepResult {
    fn table(&self, cells: &[Vec<f64>]) -> CliResult<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec![self.vary.column().to_string()];
        header.extend(self.algorithms.iter().map(|a| a.name().to_string()));
        w.write_record(&header)?;
        for (v, row) in self.values.iter().zip(cells) {
            let mut rec = vec![v.to_string()];
            rec.extend(row.iter().map(f64::to_string));
            w.write_record(&rec)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn solution_csv(&self) -> CliResult<String> {
        self.table(&self.objective)
    }

    pub fn query_csv(&self) -> CliResult<String> {
        self.table(&self.queries)
    }

    /// Writes `solution.csv` and `query.csv` into `dir`.
    pub fn write(&self, dir: &Path) -> CliResult<()> {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("solution.csv"), self.solution_csv()?)?;
        fs::write(dir.join("query.csv"), self.query_csv()?)?;
        Ok(())
    }
}

/// Sweeps `b` (with `k` fixed) or `k` (with `b` fixed). Partitions are
/// regenerated for every value, ignoring any stored in the input.
pub fn sweep_with(
    config: &ExperimentConfig,
    work: &Workload,
    vary: Vary,
    values: &[usize],
) -> CliResult<SweepResult> {
    if values.is_empty() {
        return Err(CliError::Config("no sweep values".into()));
    }
    let mut objective = Vec::with_capacity(values.len());
    let mut queries = Vec::with_capacity(values.len());
    for &v in values {
        let (b, k) = match vary {
            Vary::B => (v, config.k),
            Vary::K => (config.b, v),
        };
        if k == 0 || b < k {
            return Err(CliError::Config(format!("need 1 ≤ k ≤ b, got b={b} k={k}")));
        }
        let m = work.matroid(b, k, true)?;
        let params = resolve_params(config, work, &m)?;
        let runs = execute(config, work, &m, &params, v as u64)?;
        let mean = |f: fn(&RunRow) -> f64| -> Vec<f64> {
            runs.iter()
                .map(|rows| rows.iter().map(f).sum::<f64>() / rows.len() as f64)
                .collect()
        };
        objective.push(mean(|r| r.objective));
        queries.push(mean(|r| r.queries as f64));
        eprintln!("{}={v} done", vary.column());
    }
    Ok(SweepResult {
        vary,
        values: values.to_vec(),
        algorithms: config.algorithms.clone(),
        objective,
        queries,
    })
}

/// Loads the workload, sweeps, and writes the tables to `config.output`
/// (a directory) or prints them.
pub fn sweep(config: &ExperimentConfig, vary: Vary, values: &[usize]) -> CliResult<SweepResult> {
    let work = Workload::load(config)?;
    eprintln!("{}", work.summary);
    let result = sweep_with(config, &work, vary, values)?;
    match &config.output {
        Some(dir) => result.write(dir)?,
        None => {
            println!("# solution.csv\n{}", result.solution_csv()?);
            println!("# query.csv\n{}", result.query_csv()?);
        }
    }
    Ok(result)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundsReport {
    pub params: NonSubmodParams,
    pub ratios: RatioReport,
}

/// `(γ′, α′)` for the configured partition, from the app's bound or, with
/// `exact`, by enumeration, followed by every approximation ratio.
pub fn bounds(config: &ExperimentConfig, exact: bool) -> CliResult<BoundsReport> {
    let work = Workload::load(config)?;
    eprintln!("{}", work.summary);
    let m = work.matroid(config.b, config.k, false)?;
    let params = if exact {
        exact_gamma_alpha(&m, &work.exact_oracle()?)?
    } else {
        work.app_bounds(&m)?.ok_or_else(|| {
            CliError::Config(format!(
                "the {} app has no closed-form bound; use --exact",
                config.app.name()
            ))
        })?
    };
    report(params, &m, config.epsilon)
}

/// Exact `(γ, α)` by enumeration, with the ratio report.
pub fn quantify(config: &ExperimentConfig) -> CliResult<BoundsReport> {
    bounds(config, true)
}

fn report(params: NonSubmodParams, m: &PartitionMatroid, epsilon: f64) -> CliResult<BoundsReport> {
    let ratios = RatioReport::new(&params, m, epsilon)?;
    let source = match params.provenance {
        Provenance::ExactEnumeration => "exact",
        Provenance::Bound => "bound",
    };
    println!("source        {source}");
    println!("gamma         {}", params.gamma);
    println!("alpha         {}", params.alpha);
    if params.degenerate {
        println!("degenerate    true");
    }
    println!(
        "n={} k={} b={} b_hat={} n_bar={}",
        m.n(),
        m.k(),
        m.total_budget(),
        m.min_budget(),
        m.max_group_size()
    );
    println!("beta          {}", ratios.beta);
    println!("prob          {}", ratios.prob_ratio);
    println!(
        "greedy        {} (r1={}, r2={})",
        ratios.greedy_ratio, ratios.greedy_r1, ratios.greedy_r2
    );
    println!(
        "thrgreedy     {} (r1={}, r2={})",
        ratios.thrgreedy_ratio, ratios.thr_r1, ratios.thr_r2
    );
    Ok(BoundsReport { params, ratios })
}
