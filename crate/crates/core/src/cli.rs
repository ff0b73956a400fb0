//! Command-line surface of the `stca` binary.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::attack::{GradientAttack, GradientAttackConfig, PinvAttack, SurrogateSpec};
use crate::authorized::{reconstruct_with_pack, NoisyProbe};
use crate::codec::ProtectedTemplate;
use crate::config::{ExperimentConfig, Manifest};
use crate::data::{hconcat, read_vector, write_pgm, write_vector};
use crate::error::{Result, StcaError};
use crate::experiment::{
    config_pack, figure_panels, load_mnist_dir, loss_csv, make_pack, run_sweep, train_from_config,
    write_sweep_outputs, Corpus, PanelSet,
};
use crate::linalg::RidgeSolver;
use crate::nn::DecoderModel;
use crate::pack::ProjectionPack;
use crate::rd::write_text;
use crate::seed::SeedSpec;
use crate::StcaParams;

#[derive(Debug, Parser)]
#[command(name = "stca", version, about = "Sparse ternary coding with ambiguization: protection, attacks and rate-distortion experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Protect one source vector and write its public template.
    Protect {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Also save the projection pack used.
        #[arg(long)]
        pack_out: Option<PathBuf>,
        /// Also save the clean (unambiguized) code.
        #[arg(long)]
        clean_out: Option<PathBuf>,
    },
    /// Write the projection pack a config derives.
    MakePack {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Reconstruct a source from a public template without side information.
    Attack(AttackArgs),
    /// Reconstruct from a public template and a noisy probe of the source.
    Authorized {
        #[arg(long)]
        template: PathBuf,
        #[arg(long)]
        probe: PathBuf,
        #[arg(long)]
        pack: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0.0)]
        lambda: f64,
    },
    /// Monte-Carlo rate-distortion sweep; writes the curve and the Shannon reference.
    RdSweep {
        #[command(flatten)]
        source: ConfigSource,
        #[arg(long)]
        outdir: Option<PathBuf>,
    },
    /// All six rate-distortion panels.
    FigurePanels {
        /// Panel settings; defaults are used when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        outdir: PathBuf,
    },
    /// Train a decoder on (template, source) pairs.
    TrainDecoder {
        #[command(flatten)]
        source: ConfigSource,
        #[arg(long)]
        out: PathBuf,
    },
    /// Side-by-side PGM images: original, decoder and pseudo-inverse.
    ReconstructImages(ImagesArgs),
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct ConfigSource {
    #[arg(long)]
    config: Option<PathBuf>,
    /// Rerun from a previously written manifest.
    #[arg(long)]
    manifest: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AttackMethod {
    Pinv,
    Gradient,
    Decoder,
}

#[derive(Debug, Args, Serialize)]
pub struct AttackArgs {
    #[arg(long, value_enum)]
    method: AttackMethod,
    #[arg(long)]
    template: PathBuf,
    #[arg(long)]
    pack: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    model: Option<PathBuf>,
    #[arg(long, default_value_t = 0.0)]
    lambda: f64,
    #[arg(long, default_value_t = 10.0)]
    beta: f64,
    #[arg(long, default_value_t = 1e-2)]
    step_size: f64,
    #[arg(long, default_value_t = 200)]
    iterations: usize,
    /// Multiplies decoder outputs (σ_X for decoders trained on standardized sources).
    #[arg(long, default_value_t = 1.0)]
    output_scale: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ImageDataset {
    Mnist,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ImageMethod {
    Pinv,
    Decoder,
}

#[derive(Debug, Args, Serialize)]
pub struct ImagesArgs {
    #[arg(long, value_enum)]
    dataset: ImageDataset,
    #[arg(long)]
    sx: usize,
    #[arg(long)]
    sns: usize,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "pinv,decoder")]
    methods: Vec<ImageMethod>,
    #[arg(long)]
    outdir: PathBuf,
    #[arg(long)]
    model: Option<PathBuf>,
    #[arg(long, default_value = "data/mnist")]
    mnist_dir: PathBuf,
    #[arg(long, default_value_t = 10)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0.0)]
    lambda: f64,
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Protect {
            config,
            input,
            out,
            pack_out,
            clean_out,
        } => protect(&config, &input, &out, pack_out.as_deref(), clean_out.as_deref()),
        Command::MakePack { config, out } => {
            let cfg = ExperimentConfig::load(&config)?.resolve()?;
            let pack = make_pack(cfg.seed, cfg.single_params()?)?;
            pack.save(&out)?;
            Manifest::new("make-pack", &cfg)?
                .with_files(json!({ "out": out }))
                .write(parent(&out))
        }
        Command::Attack(args) => attack(&args),
        Command::Authorized {
            template,
            probe,
            pack,
            out,
            lambda,
        } => {
            let u_a = read_template(&template)?;
            let pack_data = ProjectionPack::load(&pack)?;
            let probe_values = read_vector(&probe)?;
            let solver = RidgeSolver::new(pack_data.composed().clone(), lambda)?;
            let x_hat = reconstruct_with_pack(&pack_data, &solver, &u_a, &NoisyProbe::new(probe_values, 0.0)?)?;
            write_vector(&out, &x_hat)?;
            Manifest::new("authorized", &json!({ "lambda": lambda }))?
                .with_files(json!({ "template": template, "probe": probe, "pack": pack, "out": out }))
                .write(parent(&out))
        }
        Command::RdSweep { source, outdir } => {
            let mut cfg = load_experiment(&source, "rd-sweep")?;
            let outdir = outdir
                .or_else(|| cfg.output_dir.as_ref().map(PathBuf::from))
                .ok_or_else(|| StcaError::config("rd-sweep needs --outdir or output_dir in the config"))?;
            cfg.output_dir = Some(outdir.display().to_string());
            let corpus = Corpus::load(&cfg.source)?;
            let curve = run_sweep(&cfg, &corpus)?;
            create_dir(&outdir)?;
            write_sweep_outputs(&curve, &outdir)?;
            Manifest::new("rd-sweep", &cfg)?.write(&outdir)
        }
        Command::FigurePanels { config, outdir } => {
            let set = match config {
                Some(path) => {
                    let text = std::fs::read_to_string(&path).map_err(|e| StcaError::io(&path, e))?;
                    serde_json::from_str::<PanelSet>(&text)
                        .map_err(|e| StcaError::Config(format!("{}: {e}", path.display())))?
                }
                None => PanelSet::default(),
            };
            figure_panels(&set, &outdir).map(|_| ())
        }
        Command::TrainDecoder { source, out } => {
            let cfg = load_experiment(&source, "train-decoder")?;
            create_dir(parent(&out))?;
            let corpus = Corpus::load(&cfg.source)?;
            let outcome = train_from_config(&cfg, &corpus)?;
            outcome.model.save(&out)?;
            let loss_path = sibling(&out, "_loss.csv");
            write_text(&loss_path, &loss_csv(&outcome.losses))?;
            Manifest::new("train-decoder", &cfg)?.write(parent(&out))
        }
        Command::ReconstructImages(args) => reconstruct_images(&args),
    }
}

fn protect(config: &Path, input: &Path, out: &Path, pack_out: Option<&Path>, clean_out: Option<&Path>) -> Result<()> {
    let cfg = ExperimentConfig::load(config)?.resolve()?;
    let params = cfg.single_params()?;
    let x = read_vector(input)?;
    let pack = config_pack(&cfg)?.with_sparsity(params.s_x, params.s_ns)?;
    let (u_a, u) = pack.protect(&x, &SeedSpec::new(cfg.seed, "protect/ambiguize"))?;
    write_text(out, &format!("{}\n", u_a.to_text()))?;
    if let Some(p) = pack_out {
        pack.save(p)?;
    }
    if let Some(p) = clean_out {
        write_text(p, &format!("{}\n", u.to_text()))?;
    }
    Manifest::new("protect", &cfg)?
        .with_files(json!({ "input": input, "out": out, "pack_out": pack_out, "clean_out": clean_out }))
        .write(parent(out))
}

fn attack(args: &AttackArgs) -> Result<()> {
    let u_a = read_template(&args.template)?;
    let pack = ProjectionPack::load(&args.pack)?;
    let x_hat = match args.method {
        AttackMethod::Pinv => PinvAttack::new(pack.composed().clone(), args.lambda)?.reconstruct(&u_a)?,
        AttackMethod::Gradient => {
            let cfg = GradientAttackConfig {
                step_size: args.step_size,
                iterations: args.iterations,
                lambda: args.lambda,
                ..GradientAttackConfig::default()
            };
            cfg.validate()?;
            let composed = pack.composed();
            let x0 = cfg.initial_point(composed.cols());
            let spec = SurrogateSpec::aligned(args.beta, &composed.matvec(&x0)?, pack.params().s_x)?;
            GradientAttack::new(&u_a, composed, spec, cfg.lambda)?.descend(x0, cfg.step_size, cfg.iterations)?
        }
        AttackMethod::Decoder => {
            let path = args
                .model
                .as_ref()
                .ok_or_else(|| StcaError::config("--method decoder needs --model"))?;
            let model = DecoderModel::load(path)?;
            model.forward(&u_a.to_real())?.into_iter().map(|v| v * args.output_scale).collect()
        }
    };
    write_vector(&args.out, &x_hat)?;
    Manifest::new("attack", args)?.write(parent(&args.out))
}

fn reconstruct_images(args: &ImagesArgs) -> Result<()> {
    if args.methods.is_empty() || args.count == 0 {
        return Err(StcaError::config("reconstruct-images needs at least one method and count >= 1"));
    }
    let wants = |m: ImageMethod| args.methods.contains(&m);
    let model = if wants(ImageMethod::Decoder) {
        let path = args
            .model
            .as_ref()
            .ok_or_else(|| StcaError::config("the decoder method needs --model (see train-decoder)"))?;
        Some(DecoderModel::load(path)?)
    } else {
        None
    };
    let splits = load_mnist_dir(&args.mnist_dir)?;
    let n = splits.test.dim();
    let (h, w) = splits.test.shape_hint.unwrap_or((n, 1));
    let params = StcaParams::new(n, n, args.sx, args.sns)?;
    let pack = make_pack(args.seed, params)?;
    let pinv = if wants(ImageMethod::Pinv) {
        Some(PinvAttack::new(pack.composed().clone(), args.lambda)?)
    } else {
        None
    };
    create_dir(&args.outdir)?;
    for i in 0..args.count.min(splits.test.len()) {
        let x = &splits.test.samples[i];
        let (u_a, _) = pack.protect(x, &SeedSpec::new(args.seed, "images/ambiguize").child(format!("i{i}")))?;
        let mut columns = vec![x.clone()];
        if let Some(model) = &model {
            columns.push(model.forward(&u_a.to_real())?);
        }
        if let Some(attack) = &pinv {
            columns.push(attack.reconstruct(&u_a)?);
        }
        let refs: Vec<&[f64]> = columns.iter().map(Vec::as_slice).collect();
        let image = hconcat(&refs, h, w);
        write_pgm(&image, Some((h, w * refs.len())), &args.outdir.join(format!("digit_{i:03}.pgm")))?;
    }
    let config = json!({
        "dataset": args.dataset,
        "s_x": args.sx,
        "s_ns": args.sns,
        "methods": args.methods,
        "columns": column_names(args),
        "count": args.count,
        "seed": args.seed,
        "lambda": args.lambda,
        "model": args.model,
        "mnist_dir": args.mnist_dir,
        "pixel_scaling": "value/255, no centering",
    });
    Manifest::new("reconstruct-images", &config)?.write(&args.outdir)
}

fn column_names(args: &ImagesArgs) -> Vec<&'static str> {
    let mut names = vec!["original"];
    if args.methods.contains(&ImageMethod::Decoder) {
        names.push("decoder");
    }
    if args.methods.contains(&ImageMethod::Pinv) {
        names.push("pinv");
    }
    names
}

fn load_experiment(source: &ConfigSource, command: &str) -> Result<ExperimentConfig> {
    match (&source.config, &source.manifest) {
        (Some(path), _) => ExperimentConfig::load(path)?.resolve(),
        (None, Some(path)) => Manifest::load(path)?.experiment(command),
        (None, None) => Err(StcaError::config("pass --config or --manifest")),
    }
}

fn read_template(path: &Path) -> Result<ProtectedTemplate> {
    let text = std::fs::read_to_string(path).map_err(|e| StcaError::io(path, e))?;
    ProtectedTemplate::from_text(&text)
}

fn parent(path: &Path) -> &Path {
    match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    }
}

/// `dir/model.bin` + `_loss.csv` → `dir/model_loss.csv`.
fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    parent(path).join(format!("{stem}{suffix}"))
}

fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| StcaError::io(dir, e))
}
