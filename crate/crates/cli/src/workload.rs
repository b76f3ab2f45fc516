use std::path::Path;
use std::sync::{Arc, OnceLock};

use partmax::influence::{
    lemma3_bounds, load_snap_edgelist, random_graph, BoostedGraph, ExactOracle, InfluenceInstance,
    Lemma3Options, MonteCarloOracle, RealizationSet,
};
use partmax::matroid::random_partition;
use partmax::oracle::{Normalized, Objective};
use partmax::rng::{derive_seed, rng_from_seed, stream};
use partmax::summarization::{
    gaussian_gram, lemma4_from_spectrum, segment_partition, symmetric_eigenvalues, Bandwidth,
    DetObjective, FrameFeatures, GramMatrix, DEFAULT_JACOBI_TOL,
};
use partmax::{NonSubmodParams, PartitionMatroid};

use crate::config::{App, ExperimentConfig};
use crate::error::{CliError, CliResult};

enum Source {
    Influence {
        graph: Arc<BoostedGraph>,
        oracle: MonteCarloOracle,
        stored: Option<PartitionMatroid>,
    },
    Summarization {
        gram: GramMatrix,
        oracle: DetObjective,
        spectrum: OnceLock<partmax::Result<Vec<f64>>>,
    },
    Synthetic {
        oracle: Box<dyn Objective>,
    },
}

/// The loaded objective of one experiment, independent of the partition.
pub struct Workload {
    app: App,
    seed: u64,
    source: Source,
    /// Human-readable description of what was loaded.
    pub summary: String,
}

impl Workload {
    pub fn load(config: &ExperimentConfig) -> CliResult<Self> {
        let instance_seed = derive_seed(config.seed, &[stream::INSTANCE]);
        let mut rng = rng_from_seed(instance_seed);
        let (source, summary) = match config.app {
            App::Influence => {
                let (graph, stored, origin) = match &config.input {
                    Some(path) => load_influence(path, !config.directed)?,
                    None => {
                        let g = random_graph(config.n, config.avg_degree, &mut rng);
                        let seed = g
                            .highest_degree_node()
                            .ok_or_else(|| CliError::Config("empty graph".into()))?;
                        (
                            g.with_degree_weights(vec![seed])?,
                            None,
                            "random graph".to_string(),
                        )
                    }
                };
                let realizations = RealizationSet::new(
                    derive_seed(config.seed, &[stream::REALIZATIONS]),
                    config.realizations,
                );
                let summary = format!(
                    "{origin}: {} nodes, {} edges, seeds {:?}, {} realizations",
                    graph.nodes(),
                    graph.edges().len(),
                    graph.seeds(),
                    config.realizations
                );
                let graph = Arc::new(graph);
                let oracle = MonteCarloOracle::new(Arc::clone(&graph), &realizations);
                (
                    Source::Influence {
                        graph,
                        oracle,
                        stored,
                    },
                    summary,
                )
            }
            App::Summarization => {
                let features = match &config.features {
                    Some(path) => FrameFeatures::load_csv(path)?,
                    None => FrameFeatures::synthetic(config.n, 8, 10, 0.3, &mut rng),
                };
                let bandwidth = config.bandwidth.map_or(Bandwidth::Median, Bandwidth::Fixed);
                let (gram, h) = gaussian_gram(&features, bandwidth)?;
                let oracle = DetObjective::new(&gram)?.log_mode(config.log_objective);
                let summary = format!(
                    "{} frames × {} dims, bandwidth {h}{}",
                    features.frames(),
                    features.dims(),
                    if config.log_objective {
                        ", log-det objective"
                    } else {
                        ""
                    }
                );
                let spectrum = OnceLock::new();
                (
                    Source::Summarization {
                        gram,
                        oracle,
                        spectrum,
                    },
                    summary,
                )
            }
            App::Synthetic => {
                let oracle = config.kind.oracle(config.n, &mut rng);
                let summary = format!(
                    "synthetic {} objective on {} elements",
                    config.kind.name(),
                    config.n
                );
                (Source::Synthetic { oracle }, summary)
            }
        };
        Ok(Self {
            app: config.app,
            seed: config.seed,
            source,
            summary,
        })
    }

    pub fn app(&self) -> App {
        self.app
    }

    pub fn n(&self) -> usize {
        match &self.source {
            Source::Influence { graph, .. } => graph.nodes(),
            Source::Summarization { gram, .. } => gram.n(),
            Source::Synthetic { oracle } => oracle.ground_size(),
        }
    }

    /// Partition for total budget `b` over `k` groups: contiguous segments
    /// with `⌊b/k⌋` frames each for summaries, random equal-size groups
    /// otherwise. A partition stored in a JSON instance wins unless
    /// `regenerate` is set.
    pub fn matroid(&self, b: usize, k: usize, regenerate: bool) -> CliResult<PartitionMatroid> {
        match &self.source {
            Source::Influence {
                stored: Some(m), ..
            } if !regenerate => Ok(m.clone()),
            Source::Summarization { gram, .. } => Ok(segment_partition(gram.n(), k, b / k)?),
            _ => {
                let seed = derive_seed(self.seed, &[stream::INSTANCE, b as u64, k as u64]);
                Ok(random_partition(self.n(), k, b, &mut rng_from_seed(seed))?)
            }
        }
    }

    /// Normalized objective with its own evaluation cache.
    pub fn oracle(&self) -> Normalized<Box<dyn Objective + '_>> {
        let inner: Box<dyn Objective + '_> = match &self.source {
            Source::Influence { oracle, .. } => Box::new(oracle.fork()),
            Source::Summarization { oracle, .. } => Box::new(oracle.fork()),
            Source::Synthetic { oracle } => Box::new(&**oracle),
        };
        Normalized::new(inner)
    }

    /// The true objective where the working one is an estimate: the
    /// enumerating influence oracle instead of Monte Carlo.
    pub fn exact_oracle(&self) -> CliResult<Normalized<Box<dyn Objective + '_>>> {
        match &self.source {
            Source::Influence { graph, .. } => {
                let inner: Box<dyn Objective> =
                    Box::new(ExactOracle::new(BoostedGraph::clone(graph))?);
                Ok(Normalized::new(inner))
            }
            _ => Ok(self.oracle()),
        }
    }

    /// The app's closed-form `(γ′, α′)` for partition `m`, if it has one.
    pub fn app_bounds(&self, m: &PartitionMatroid) -> CliResult<Option<NonSubmodParams>> {
        match &self.source {
            Source::Influence { graph, .. } => Ok(Some(lemma3_bounds(
                graph,
                m.total_budget(),
                Lemma3Options::default(),
            ))),
            Source::Summarization { gram, spectrum, .. } => {
                let lambda =
                    spectrum.get_or_init(|| symmetric_eigenvalues(&gram.a(), DEFAULT_JACOBI_TOL));
                match lambda {
                    Ok(l) => Ok(Some(lemma4_from_spectrum(l, m.total_budget()))),
                    Err(e) => Err(e.clone().into()),
                }
            }
            Source::Synthetic { .. } => Ok(None),
        }
    }
}

fn load_influence(
    path: &Path,
    undirected: bool,
) -> CliResult<(BoostedGraph, Option<PartitionMatroid>, String)> {
    let origin = path.display().to_string();
    if path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("json"))
    {
        let inst = InfluenceInstance::load(path)?;
        let stored = inst.matroid().transpose()?;
        return Ok((inst.graph()?, stored, origin));
    }
    let g = load_snap_edgelist(path, undirected)?;
    if g.self_loops_dropped > 0 {
        eprintln!(
            "warning: dropped {} self-loop(s) from {origin}",
            g.self_loops_dropped
        );
    }
    let seed = g
        .highest_degree_node()
        .ok_or_else(|| CliError::Config(format!("{origin} has no edges")))?;
    Ok((g.with_degree_weights(vec![seed])?, None, origin))
}
