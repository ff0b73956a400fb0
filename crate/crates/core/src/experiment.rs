//! Glue between configuration records and the numerical modules: source
//! loading, projection packs, training pairs, sweeps and figure panels.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::codec::StcaParams;
use crate::config::{ExperimentConfig, Manifest};
use crate::data::{load_mnist_idx, Dataset};
use crate::error::{Result, StcaError};
use crate::fmt::format_g;
use crate::nn::{train_decoder, DecoderModel, TrainOutcome, TrainingSet};
use crate::pack::ProjectionPack;
use crate::rd::{curves_to_csv, rd_sweep, shannon_csv, write_text, Method, RDCurve, SourceData, SourceSpec};
use crate::seed::SeedSpec;

pub const MNIST_TRAIN_IMAGES: &str = "train-images-idx3-ubyte";
pub const MNIST_TRAIN_LABELS: &str = "train-labels-idx1-ubyte";
pub const MNIST_TEST_IMAGES: &str = "t10k-images-idx3-ubyte";
pub const MNIST_TEST_LABELS: &str = "t10k-labels-idx1-ubyte";

#[derive(Debug, Clone)]
pub struct MnistSplits {
    pub train: Dataset,
    pub test: Dataset,
    /// Mean per-pixel variance of the training split.
    pub sigma2_x: f64,
}

pub fn load_mnist_dir(dir: &Path) -> Result<MnistSplits> {
    let train = load_mnist_idx(&dir.join(MNIST_TRAIN_IMAGES), Some(&dir.join(MNIST_TRAIN_LABELS)))?;
    let test = load_mnist_idx(&dir.join(MNIST_TEST_IMAGES), Some(&dir.join(MNIST_TEST_LABELS)))?;
    if train.dim() != test.dim() {
        return Err(StcaError::shape("MNIST train and test images differ in size"));
    }
    let sigma2_x = train.per_coordinate_variance();
    Ok(MnistSplits { train, test, sigma2_x })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Split {
    Train,
    Test,
}

/// A loaded source distribution.
#[derive(Debug, Clone)]
pub enum Corpus {
    Gaussian { n: usize, sigma2_x: f64 },
    Mnist(Box<MnistSplits>),
}

impl Corpus {
    pub fn load(spec: &SourceSpec) -> Result<Self> {
        Ok(match spec {
            SourceSpec::Gaussian { n, sigma2_x } => Corpus::Gaussian {
                n: *n,
                sigma2_x: *sigma2_x,
            },
            SourceSpec::Mnist { dir } => Corpus::Mnist(Box::new(load_mnist_dir(Path::new(dir))?)),
        })
    }

    pub fn n(&self) -> usize {
        match self {
            Corpus::Gaussian { n, .. } => *n,
            Corpus::Mnist(s) => s.train.dim(),
        }
    }

    /// Sweeps draw from the test split of datasets.
    pub fn source(&self, split: Split) -> SourceData<'_> {
        match self {
            Corpus::Gaussian { n, sigma2_x } => SourceData::Gaussian {
                n: *n,
                sigma2_x: *sigma2_x,
            },
            Corpus::Mnist(s) => SourceData::Samples {
                data: if split == Split::Train { &s.train } else { &s.test },
                sigma2_x: s.sigma2_x,
            },
        }
    }
}

/// The mappers every command derives from a config seed.
pub fn make_pack(seed: u64, params: StcaParams) -> Result<ProjectionPack> {
    ProjectionPack::generate(params, &SeedSpec::new(seed, "projection"))
}

/// `(template, target)` pairs cycling through every `(s_x, s_ns)` grid point.
/// Dataset splits are walked in order; Gaussian sources draw `count` fresh
/// vectors. Targets are divided by the source's decoder scale and clipped to
/// [−1, 1] when `clip` is set.
pub fn training_pairs(
    corpus: &Corpus,
    split: Split,
    pack: &ProjectionPack,
    grid: &[(usize, usize)],
    count: usize,
    seed: &SeedSpec,
    clip: bool,
) -> Result<TrainingSet> {
    if grid.is_empty() {
        return Err(StcaError::config("training grid is empty"));
    }
    let source = corpus.source(split);
    let count = match source {
        SourceData::Samples { data, .. } => data.len(),
        SourceData::Gaussian { .. } => count,
    };
    let packs = grid
        .iter()
        .map(|&(s_x, s_ns)| pack.with_sparsity(s_x, s_ns))
        .collect::<Result<Vec<_>>>()?;
    let scale = source.decoder_scale();
    let (m, n) = (pack.params().m, pack.params().n);
    let mut set = TrainingSet::with_capacity(m, n, count);
    let mut target = vec![0.0; n];
    for i in 0..count {
        let x = match source {
            SourceData::Samples { data, .. } => data.samples[i].clone(),
            SourceData::Gaussian { .. } => source.draw(&seed.child(format!("x{i}")))?,
        };
        let (u_a, _) = packs[i % packs.len()].protect(&x, &seed.child(format!("u{i}")))?;
        for (t, v) in target.iter_mut().zip(&x) {
            *t = if clip { (v / scale).clamp(-1.0, 1.0) } else { v / scale };
        }
        set.push(&u_a.to_real(), &target)?;
    }
    Ok(set)
}

pub fn grid(cfg: &ExperimentConfig) -> Vec<(usize, usize)> {
    cfg.s_x
        .iter()
        .flat_map(|&s_x| cfg.s_ns.iter().map(move |&s_ns| (s_x, s_ns)))
        .collect()
}

/// Pack sized for the config, carrying its first grid point.
pub fn config_pack(cfg: &ExperimentConfig) -> Result<ProjectionPack> {
    let params = StcaParams::new(cfg.m(), cfg.source_dim(), cfg.s_x[0], cfg.s_ns[0])?;
    make_pack(cfg.seed, params)
}

pub fn train_from_config(cfg: &ExperimentConfig, corpus: &Corpus) -> Result<TrainOutcome> {
    let pack = config_pack(cfg)?;
    let arch = cfg.architecture().build(cfg.m());
    let clip = matches!(arch.layers().last(), Some(crate::nn::LayerSpec::Tanh));
    let set = training_pairs(
        corpus,
        Split::Train,
        &pack,
        &grid(cfg),
        cfg.train_pairs,
        &SeedSpec::new(cfg.seed, "train-pairs"),
        clip,
    )?;
    train_decoder(&set, arch.layers(), &cfg.train)
}

pub fn loss_csv(losses: &[f64]) -> String {
    let mut out = String::from("epoch,mse\n");
    for (e, l) in losses.iter().enumerate() {
        out.push_str(&format!("{},{}\n", e + 1, format_g(*l, 10)));
    }
    out
}

pub fn run_sweep(cfg: &ExperimentConfig, corpus: &Corpus) -> Result<RDCurve> {
    let pack = config_pack(cfg)?;
    let model = match (&cfg.method, &cfg.decoder_model) {
        (Method::Decoder, Some(path)) => Some(DecoderModel::load(Path::new(path))?),
        _ => None,
    };
    rd_sweep(&cfg.sweep_config(), &corpus.source(Split::Test), &pack, model.as_ref())
}

/// Writes `<scenario>.csv` and `shannon.csv` for a single sweep.
pub fn write_sweep_outputs(curve: &RDCurve, outdir: &Path) -> Result<Vec<PathBuf>> {
    let csv = outdir.join(format!("{}.csv", curve.scenario));
    write_text(&csv, &curves_to_csv(std::slice::from_ref(curve)))?;
    let shannon = outdir.join("shannon.csv");
    write_text(&shannon, &shannon_csv(max_rate(std::slice::from_ref(curve))))?;
    Ok(vec![csv, shannon])
}

fn max_rate(curves: &[RDCurve]) -> f64 {
    curves
        .iter()
        .flat_map(|c| &c.points)
        .map(|p| p.rate)
        .fold(0.0, f64::max)
}

/// Settings for the six rate-distortion panels: limit, unauthorized and
/// authorized curves on synthetic and MNIST data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PanelSet {
    pub seed: u64,
    pub trials: usize,
    pub synthetic_n: usize,
    pub sigma2_x: f64,
    pub mnist_dir: String,
    pub synthetic_s_x: Vec<usize>,
    pub mnist_s_x: Vec<usize>,
    pub s_ns: Vec<usize>,
    pub authorized_s_ns: usize,
    pub sigma2_z_ratio: f64,
    pub lambda: f64,
    pub synthetic_decoder: Option<String>,
    pub mnist_decoder: Option<String>,
}

impl Default for PanelSet {
    fn default() -> Self {
        PanelSet {
            seed: 0,
            trials: 100,
            synthetic_n: 529,
            sigma2_x: 1.0,
            mnist_dir: "data/mnist".into(),
            synthetic_s_x: vec![25, 50, 100, 200, 353],
            mnist_s_x: vec![25, 50, 100, 200, 400, 523],
            s_ns: vec![0, 25, 50, 100],
            authorized_s_ns: 100,
            sigma2_z_ratio: 0.25,
            lambda: 0.0,
            synthetic_decoder: None,
            mnist_decoder: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Panel {
    pub name: String,
    pub sweeps: Vec<ExperimentConfig>,
}

impl PanelSet {
    pub fn panels(&self) -> Result<Vec<Panel>> {
        let base = |name: &str, source: SourceSpec, s_x: &[usize], s_ns: Vec<usize>, method: Method, model: Option<String>| {
            ExperimentConfig {
                scenario: format!("{name}/{}", method.as_str()),
                seed: self.seed,
                source,
                s_x: s_x.to_vec(),
                s_ns,
                sigma2_z_ratio: self.sigma2_z_ratio,
                method,
                lambda: self.lambda,
                trials: self.trials,
                decoder_model: model,
                ..ExperimentConfig::default()
            }
            .resolve()
        };
        let sources = [
            (
                "synthetic",
                SourceSpec::Gaussian {
                    n: self.synthetic_n,
                    sigma2_x: self.sigma2_x,
                },
                &self.synthetic_s_x,
                &self.synthetic_decoder,
            ),
            (
                "mnist",
                SourceSpec::Mnist {
                    dir: self.mnist_dir.clone(),
                },
                &self.mnist_s_x,
                &self.mnist_decoder,
            ),
        ];
        let mut panels = Vec::new();
        for (kind, letter) in [("limit", ['a', 'b']), ("unauthorized", ['c', 'd']), ("authorized", ['e', 'f'])] {
            for ((data, source, s_x, model), letter) in sources.iter().zip(letter) {
                let name = format!("{letter}_{data}_{kind}");
                let mut sweeps = Vec::new();
                match kind {
                    "limit" => {
                        sweeps.push(base(&name, source.clone(), s_x, vec![0], Method::Pinv, None)?);
                        if let Some(path) = model {
                            sweeps.push(base(&name, source.clone(), s_x, vec![0], Method::Decoder, Some(path.clone()))?);
                        }
                    }
                    "unauthorized" => {
                        sweeps.push(base(&name, source.clone(), s_x, self.s_ns.clone(), Method::Pinv, None)?);
                    }
                    _ => {
                        let s_ns = vec![self.authorized_s_ns];
                        sweeps.push(base(&name, source.clone(), s_x, s_ns.clone(), Method::Authorized, None)?);
                        sweeps.push(base(&name, source.clone(), s_x, s_ns, Method::Pinv, None)?);
                    }
                }
                panels.push(Panel { name, sweeps });
            }
        }
        Ok(panels)
    }
}

/// Runs every panel and writes one CSV per panel plus `shannon.csv` and the
/// manifest. All configurations are validated before anything is computed.
pub fn figure_panels(set: &PanelSet, outdir: &Path) -> Result<Vec<RDCurve>> {
    let panels = set.panels()?;
    let synthetic = Corpus::load(&SourceSpec::Gaussian {
        n: set.synthetic_n,
        sigma2_x: set.sigma2_x,
    })?;
    let mnist = Corpus::load(&SourceSpec::Mnist {
        dir: set.mnist_dir.clone(),
    })?;
    let mut all = Vec::new();
    let mut tables = Vec::new();
    for panel in &panels {
        let mut curves = Vec::new();
        for cfg in &panel.sweeps {
            let corpus = match cfg.source {
                SourceSpec::Gaussian { .. } => &synthetic,
                SourceSpec::Mnist { .. } => &mnist,
            };
            curves.push(run_sweep(cfg, corpus)?);
        }
        tables.push((panel.name.clone(), curves_to_csv(&curves)));
        all.extend(curves);
    }
    std::fs::create_dir_all(outdir).map_err(|e| StcaError::io(outdir, e))?;
    for (name, csv) in &tables {
        write_text(&outdir.join(format!("{name}.csv")), csv)?;
    }
    write_text(&outdir.join("shannon.csv"), &shannon_csv(max_rate(&all)))?;
    Manifest::new("figure-panels", set)?.write(outdir)?;
    Ok(all)
}
