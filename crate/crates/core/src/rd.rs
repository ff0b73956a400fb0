//! Distortion metrics, the Gaussian rate-distortion bound and Monte-Carlo
//! sweeps over the sparsity grid.

use std::fmt::Write as _;
use std::path::Path;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::attack::{GradientAttack, GradientAttackConfig, PinvAttack, SurrogateSpec};
use crate::authorized::{reconstruct_with_pack, NoisyProbe};
use crate::codec::{code_rate, StcaParams};
use crate::data::Dataset;
use crate::error::{Result, StcaError};
use crate::fmt::format_g;
use crate::linalg::RidgeSolver;
use crate::nn::DecoderModel;
use crate::pack::ProjectionPack;
use crate::seed::SeedSpec;

pub const CSV_HEADER: &str = "rate,mean_distortion,std_distortion,trials,s_x,s_ns,scenario";

/// `(1/n)‖x − x̂‖² / σ²_X`.
pub fn distortion(x: &[f64], x_hat: &[f64], sigma2_x: f64) -> Result<f64> {
    if x.len() != x_hat.len() {
        return Err(StcaError::shape(format!(
            "distortion of vectors with lengths {} and {}",
            x.len(),
            x_hat.len()
        )));
    }
    if !(sigma2_x > 0.0) {
        return Err(StcaError::param(format!("source variance must be > 0, got {sigma2_x}")));
    }
    if x.is_empty() {
        return Err(StcaError::shape("distortion of empty vectors"));
    }
    let sse: f64 = x.iter().zip(x_hat).map(|(a, b)| (a - b) * (a - b)).sum();
    Ok(sse / x.len() as f64 / sigma2_x)
}

/// Normalized distortion-rate function of a Gaussian source, `2^(−2R)`.
pub fn shannon_bound(rate: f64) -> f64 {
    (-2.0 * rate).exp2()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RDPoint {
    pub rate: f64,
    pub mean_distortion: f64,
    pub std_distortion: f64,
    pub trials: usize,
    pub s_x: usize,
    pub s_ns: usize,
    pub scenario: String,
}

impl RDPoint {
    pub fn std_error(&self) -> f64 {
        self.std_distortion / (self.trials as f64).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RDCurve {
    pub scenario: String,
    pub points: Vec<RDPoint>,
    /// Per-point trial distortions in grid order, kept for paired statistics.
    pub samples: Vec<Vec<f64>>,
}

impl RDCurve {
    pub fn point(&self, s_x: usize, s_ns: usize) -> Option<&RDPoint> {
        self.points.iter().find(|p| p.s_x == s_x && p.s_ns == s_ns)
    }

    pub fn trial_distortions(&self, s_x: usize, s_ns: usize) -> Option<&[f64]> {
        self.points
            .iter()
            .position(|p| p.s_x == s_x && p.s_ns == s_ns)
            .map(|i| self.samples[i].as_slice())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SourceSpec {
    Gaussian { n: usize, sigma2_x: f64 },
    /// Directory holding the four standard MNIST IDX files.
    Mnist { dir: String },
}

impl Default for SourceSpec {
    fn default() -> Self {
        SourceSpec::Gaussian { n: 529, sigma2_x: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Pinv,
    Gradient,
    Decoder,
    Authorized,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Pinv => "pinv",
            Method::Gradient => "gradient",
            Method::Decoder => "decoder",
            Method::Authorized => "authorized",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub scenario: String,
    pub m: usize,
    pub s_x: Vec<usize>,
    pub s_ns: Vec<usize>,
    /// `σ²_Z / σ²_X` for authorized probes.
    pub sigma2_z_ratio: f64,
    pub method: Method,
    /// Ridge term of the pseudo-inverse and authorized solvers.
    pub lambda: f64,
    pub gradient: GradientAttackConfig,
    pub surrogate_beta: f64,
    pub trials: usize,
    pub seed: u64,
    pub redraw_projection: bool,
}

impl SweepConfig {
    pub fn validate(&self, n: usize) -> Result<()> {
        if self.s_x.is_empty() || self.s_ns.is_empty() {
            return Err(StcaError::config(format!(
                "scenario {:?}: s_x and s_ns grids must be non-empty",
                self.scenario
            )));
        }
        if self.trials == 0 {
            return Err(StcaError::config("trials must be at least 1"));
        }
        for &s_x in &self.s_x {
            for &s_ns in &self.s_ns {
                StcaParams::new(self.m, n, s_x, s_ns)?;
            }
        }
        if !(self.sigma2_z_ratio >= 0.0 && self.sigma2_z_ratio.is_finite()) {
            return Err(StcaError::param(format!(
                "sigma2_z_ratio must be >= 0, got {}",
                self.sigma2_z_ratio
            )));
        }
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(StcaError::param(format!("lambda must be >= 0, got {}", self.lambda)));
        }
        if self.method == Method::Gradient {
            self.gradient.validate()?;
            SurrogateSpec::new(self.surrogate_beta, 0.0)?;
        }
        Ok(())
    }

    /// Stream for the source drawn in trial `t`; shared by every grid point.
    pub fn source_seed(&self, trial: usize) -> SeedSpec {
        SeedSpec::new(self.seed, "sweep/source").child(format!("t{trial}"))
    }

    /// Stream for the randomness specific to one grid point and trial.
    pub fn trial_seed(&self, s_x: usize, s_ns: usize, trial: usize) -> SeedSpec {
        SeedSpec::new(self.seed, "sweep").child(format!("sx{s_x}/sns{s_ns}/t{trial}"))
    }

    pub fn projection_seed(&self) -> SeedSpec {
        SeedSpec::new(self.seed, "projection")
    }
}

/// Materialized source distribution for a sweep.
#[derive(Debug, Clone, Copy)]
pub enum SourceData<'a> {
    Gaussian { n: usize, sigma2_x: f64 },
    /// Samples drawn uniformly from a dataset whose variance is `sigma2_x`.
    Samples { data: &'a Dataset, sigma2_x: f64 },
}

impl SourceData<'_> {
    pub fn n(&self) -> usize {
        match self {
            SourceData::Gaussian { n, .. } => *n,
            SourceData::Samples { data, .. } => data.dim(),
        }
    }

    pub fn sigma2_x(&self) -> f64 {
        match self {
            SourceData::Gaussian { sigma2_x, .. } | SourceData::Samples { sigma2_x, .. } => *sigma2_x,
        }
    }

    /// Decoders for Gaussian sources learn standardized targets; this undoes it.
    pub fn decoder_scale(&self) -> f64 {
        match self {
            SourceData::Gaussian { sigma2_x, .. } => sigma2_x.sqrt(),
            SourceData::Samples { .. } => 1.0,
        }
    }

    pub fn draw(&self, seed: &SeedSpec) -> Result<Vec<f64>> {
        let mut rng = seed.rng();
        match self {
            SourceData::Gaussian { n, sigma2_x } => {
                let std = sigma2_x.sqrt();
                Ok((0..*n).map(|_| std * rng.sample::<f64, _>(StandardNormal)).collect())
            }
            SourceData::Samples { data, .. } => {
                if data.is_empty() {
                    return Err(StcaError::config("dataset source is empty"));
                }
                Ok(data.samples[rng.random_range(0..data.len())].clone())
            }
        }
    }
}

enum Reconstructor<'a> {
    Pinv(PinvAttack),
    Gradient,
    Decoder(&'a DecoderModel),
    Authorized(RidgeSolver),
}

impl<'a> Reconstructor<'a> {
    fn build(cfg: &SweepConfig, pack: &ProjectionPack, model: Option<&'a DecoderModel>) -> Result<Self> {
        Ok(match cfg.method {
            Method::Pinv => Reconstructor::Pinv(PinvAttack::new(pack.composed().clone(), cfg.lambda)?),
            Method::Gradient => Reconstructor::Gradient,
            Method::Decoder => {
                let model = model.ok_or_else(|| StcaError::config("decoder sweeps need a trained model"))?;
                if model.input_len() != pack.params().m || model.output_len() != pack.params().n {
                    return Err(StcaError::shape(format!(
                        "decoder maps {} -> {} but the code has m={}, n={}",
                        model.input_len(),
                        model.output_len(),
                        pack.params().m,
                        pack.params().n
                    )));
                }
                Reconstructor::Decoder(model)
            }
            Method::Authorized => Reconstructor::Authorized(RidgeSolver::new(pack.composed().clone(), cfg.lambda)?),
        })
    }
}

/// Runs every `(s_x, s_ns)` grid point for `cfg.trials` trials and returns the
/// points sorted by rate. Any failing trial aborts the sweep.
pub fn rd_sweep(
    cfg: &SweepConfig,
    source: &SourceData,
    pack: &ProjectionPack,
    model: Option<&DecoderModel>,
) -> Result<RDCurve> {
    let n = source.n();
    cfg.validate(n)?;
    if pack.params().n != n || pack.params().m != cfg.m {
        return Err(StcaError::shape(format!(
            "pack is {}x{} but the sweep needs m={}, n={n}",
            pack.params().m,
            pack.params().n,
            cfg.m
        )));
    }
    if model.is_some() != (cfg.method == Method::Decoder) {
        return Err(StcaError::config("a decoder model is required for, and only for, decoder sweeps"));
    }
    let sigma2_x = source.sigma2_x();
    if !(sigma2_x > 0.0) {
        return Err(StcaError::param("source variance must be > 0"));
    }
    let fixed = (!cfg.redraw_projection).then(|| Reconstructor::build(cfg, pack, model)).transpose()?;

    let mut rows = Vec::new();
    for &s_x in &cfg.s_x {
        for &s_ns in &cfg.s_ns {
            let base = pack.with_sparsity(s_x, s_ns)?;
            let mut samples = Vec::with_capacity(cfg.trials);
            for t in 0..cfg.trials {
                let seed = cfg.trial_seed(s_x, s_ns, t);
                let x = source.draw(&cfg.source_seed(t))?;
                let d = if let Some(rec) = &fixed {
                    run_trial(cfg, source, &base, rec, &x, &seed)?
                } else {
                    let params = *base.params();
                    let fresh = ProjectionPack::generate(params, &seed.child("projection"))?;
                    let rec = Reconstructor::build(cfg, &fresh, model)?;
                    run_trial(cfg, source, &fresh, &rec, &x, &seed)?
                };
                samples.push(d);
            }
            let (mean, std) = mean_std(&samples);
            let point = RDPoint {
                rate: code_rate(base.params()),
                mean_distortion: mean,
                std_distortion: std,
                trials: cfg.trials,
                s_x,
                s_ns,
                scenario: cfg.scenario.clone(),
            };
            rows.push((point, samples));
        }
    }
    rows.sort_by(|a, b| a.0.rate.total_cmp(&b.0.rate));
    let (points, samples) = rows.into_iter().unzip();
    Ok(RDCurve {
        scenario: cfg.scenario.clone(),
        points,
        samples,
    })
}

fn run_trial(
    cfg: &SweepConfig,
    source: &SourceData,
    pack: &ProjectionPack,
    rec: &Reconstructor,
    x: &[f64],
    seed: &SeedSpec,
) -> Result<f64> {
    let (u_a, _) = pack.protect(x, &seed.child("ambiguize"))?;
    let x_hat = match rec {
        Reconstructor::Pinv(attack) => attack.reconstruct(&u_a)?,
        Reconstructor::Gradient => {
            let composed = pack.composed();
            let x0 = cfg.gradient.initial_point(composed.cols());
            let spec = SurrogateSpec::aligned(cfg.surrogate_beta, &composed.matvec(&x0)?, pack.params().s_x)?;
            GradientAttack::new(&u_a, composed, spec, cfg.gradient.lambda)?.descend(
                x0,
                cfg.gradient.step_size,
                cfg.gradient.iterations,
            )?
        }
        Reconstructor::Decoder(model) => {
            let scale = source.decoder_scale();
            model.forward(&u_a.to_real())?.into_iter().map(|v| v * scale).collect()
        }
        Reconstructor::Authorized(solver) => {
            let var = cfg.sigma2_z_ratio * source.sigma2_x();
            let probe = NoisyProbe::observe(x, var, &seed.child("probe"))?;
            reconstruct_with_pack(pack, solver, &u_a, &probe)?
        }
    };
    distortion(x, &x_hat, source.sigma2_x())
}

/// Sample mean and (n−1)-normalized standard deviation; summed in order.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64;
    (mean, var.sqrt())
}

pub fn curves_to_csv(curves: &[RDCurve]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for p in curves.iter().flat_map(|c| &c.points) {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            format_g(p.rate, 10),
            format_g(p.mean_distortion, 10),
            format_g(p.std_distortion, 10),
            p.trials,
            p.s_x,
            p.s_ns,
            p.scenario
        );
    }
    out
}

/// `rate,shannon_distortion` on a 0.01-spaced grid covering `max_rate`.
pub fn shannon_csv(max_rate: f64) -> String {
    let steps = (max_rate.max(0.0) * 100.0).ceil() as usize;
    let mut out = String::from("rate,shannon_distortion\n");
    for i in 0..=steps {
        let r = i as f64 / 100.0;
        let _ = writeln!(out, "{},{}", format_g(r, 10), format_g(shannon_bound(r), 10));
    }
    out
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| StcaError::io(path, e))
}
