//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! `cargo test --test acceptance` runs everything; trailing numeric arguments
//! (`cargo test --test acceptance -- 4 7`) select criteria.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use rand::Rng;
use rand_distr::StandardNormal;

use stca::attack::{GradientAttack, PinvAttack, SurrogateSpec};
use stca::authorized::{estimate_support, NoisyProbe, SupportSet};
use stca::codec::{code_rate, project, ternarize, ProtectedTemplate, StcaParams};
use stca::config::ExperimentConfig;
use stca::data::{encode_pgm, load_mnist_idx, parse_idx_images};
use stca::error::FormatErrorKind;
use stca::experiment::{make_pack, run_sweep, training_pairs, Corpus, Split};
use stca::linalg::{dct_matrix, Matrix};
use stca::nn::{evaluate, mnist_net, synthetic_net, train_decoder, DecoderModel, LayerSpec, TrainConfig, TrainingSet};
use stca::pack::ProjectionPack;
use stca::rd::{distortion, mean_std, shannon_bound, Method, RDCurve, SourceSpec};
use stca::seed::SeedSpec;
use stca::StcaError;

type Outcome = Result<String, String>;

fn gauss(n: usize, seed: &SeedSpec) -> Vec<f64> {
    let mut rng = seed.rng();
    (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect()
}

fn workspace_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn mnist_dir() -> String {
    workspace_root().join("data/mnist").display().to_string()
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn sweep_config(source: SourceSpec, s_x: Vec<usize>, s_ns: Vec<usize>, method: Method, trials: usize) -> ExperimentConfig {
    ExperimentConfig {
        scenario: "acceptance".into(),
        seed: 2018,
        source,
        s_x,
        s_ns,
        method,
        trials,
        ..ExperimentConfig::default()
    }
    .resolve()
    .expect("valid acceptance config")
}

fn synthetic() -> SourceSpec {
    SourceSpec::Gaussian { n: 529, sigma2_x: 1.0 }
}

fn mnist() -> SourceSpec {
    SourceSpec::Mnist { dir: mnist_dir() }
}

fn sweep(cfg: &ExperimentConfig) -> Result<RDCurve, String> {
    let corpus = Corpus::load(&cfg.source).map_err(|e| e.to_string())?;
    run_sweep(cfg, &corpus).map_err(|e| e.to_string())
}

/// Mean and standard error of paired differences `a − b`.
fn paired(a: &[f64], b: &[f64]) -> (f64, f64) {
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let (m, s) = mean_std(&d);
    (m, s / (d.len() as f64).sqrt())
}

fn c1_orthonormality() -> Outcome {
    let mut worst = 0.0f64;
    for n in [4, 64, 529, 784] {
        let w = dct_matrix(n).map_err(|e| e.to_string())?;
        let g = w.transpose().matmul(&w).map_err(|e| e.to_string())?;
        worst = worst.max(g.max_abs_diff(&Matrix::identity(n)));
    }
    check(worst <= 1e-10, format!("max |WᵀW − I| = {worst:.3e} (limit 1e-10)"))
}

fn c2_linear_exactness() -> Outcome {
    let params = StcaParams::new(64, 64, 8, 0).unwrap();
    let pack = make_pack(7, params).map_err(|e| e.to_string())?;
    let attack = PinvAttack::new(pack.composed().clone(), 0.0).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for t in 0..20 {
        let x = gauss(64, &SeedSpec::new(t, "c2"));
        let v = pack.composed().matvec(&x).unwrap();
        let xh = attack.reconstruct_real(&v).map_err(|e| e.to_string())?;
        let err: f64 = x.iter().zip(&xh).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        let norm: f64 = x.iter().map(|a| a * a).sum::<f64>().sqrt();
        worst = worst.max(err / norm);
    }
    check(worst <= 1e-8, format!("worst relative error {worst:.3e} over 20 trials (limit 1e-8)"))
}

fn c3_rate_anchor() -> Outcome {
    let n = 900;
    let peak = code_rate(&StcaParams::new(n, n, 600, 0).unwrap());
    let grid: Vec<f64> = (1..=9)
        .map(|k| code_rate(&StcaParams::new(n, n, 90 * k, 0).unwrap()))
        .collect();
    let grid_max = grid.iter().cloned().fold(f64::MIN, f64::max);
    check(
        (peak - 1.585).abs() <= 1e-3 && peak >= grid_max,
        format!("R(α=2/3) = {peak:.6}; grid max over α∈{{0.1..0.9}} = {grid_max:.6}"),
    )
}

fn c4_shannon_dominance() -> Outcome {
    let start = Instant::now();
    let cfg = sweep_config(synthetic(), vec![25, 50, 100, 200, 353], vec![0], Method::Pinv, 100);
    let curve = sweep(&cfg)?;
    let secs = start.elapsed().as_secs_f64();
    let mut ok = secs <= 120.0;
    let mut parts = Vec::new();
    for p in &curve.points {
        let floor = shannon_bound(p.rate) - 3.0 * p.std_error();
        ok &= p.mean_distortion >= floor;
        parts.push(format!("s_x={} R={:.3} D={:.4} bound={:.4}", p.s_x, p.rate, p.mean_distortion, shannon_bound(p.rate)));
    }
    check(ok, format!("{}; {secs:.1}s", parts.join("; ")))
}

fn c5_ambiguization_order() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, source) in [("synthetic", synthetic()), ("mnist", mnist())] {
        let cfg = sweep_config(source, vec![50], vec![0, 25, 50, 100], Method::Pinv, 100);
        let curve = sweep(&cfg)?;
        let means: Vec<f64> = [0, 25, 50, 100]
            .iter()
            .map(|&s| curve.point(50, s).unwrap().mean_distortion)
            .collect();
        let ordered = means.windows(2).all(|w| w[0] < w[1]);
        let (lo, hi) = (curve.point(50, 0).unwrap(), curve.point(50, 100).unwrap());
        let sep = (hi.mean_distortion - lo.mean_distortion) / lo.std_error().hypot(hi.std_error());
        ok &= ordered && sep >= 3.0;
        parts.push(format!(
            "{name}: D(s_ns=0,25,50,100) = {:.4}, {:.4}, {:.4}, {:.4}; separation {sep:.1}σ",
            means[0], means[1], means[2], means[3]
        ));
    }
    check(ok, parts.join(" | "))
}

fn c6_authorized_advantage() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, source) in [("synthetic", synthetic()), ("mnist", mnist())] {
        let corpus = Corpus::load(&source).map_err(|e| e.to_string())?;
        let auth_cfg = sweep_config(source.clone(), vec![50], vec![100], Method::Authorized, 100);
        let unauth_cfg = sweep_config(source.clone(), vec![50], vec![100], Method::Pinv, 100);
        let auth = run_sweep(&auth_cfg, &corpus).map_err(|e| e.to_string())?;
        let unauth = run_sweep(&unauth_cfg, &corpus).map_err(|e| e.to_string())?;
        let (gap, se) = paired(
            unauth.trial_distortions(50, 100).unwrap(),
            auth.trial_distortions(50, 100).unwrap(),
        );
        ok &= gap > 3.0 * se;
        parts.push(format!(
            "{name}: authorized {:.4} vs unauthorized {:.4} (paired gap {:.1}σ)",
            auth.points[0].mean_distortion,
            unauth.points[0].mean_distortion,
            gap / se
        ));

        // Noise-free probe: authorized equals the clean pseudo-inverse.
        let exact_cfg = ExperimentConfig {
            sigma2_z_ratio: 0.0,
            ..auth_cfg.clone()
        };
        let exact = run_sweep(&exact_cfg, &corpus).map_err(|e| e.to_string())?;
        let clean_cfg = sweep_config(source, vec![50], vec![0], Method::Pinv, 100);
        let clean = run_sweep(&clean_cfg, &corpus).map_err(|e| e.to_string())?;
        let worst = exact
            .trial_distortions(50, 100)
            .unwrap()
            .iter()
            .zip(clean.trial_distortions(50, 0).unwrap())
            .map(|(a, b)| (a - b).abs() / b.max(1.0))
            .fold(0.0f64, f64::max);
        ok &= worst <= 1e-9;
        parts.push(format!("{name}: σ²_Z=0 max relative gap to clean pinv {worst:.2e}"));
    }
    check(ok, parts.join(" | "))
}

fn c7_support_estimation() -> Outcome {
    let params = StcaParams::new(529, 529, 50, 0).unwrap();
    let pack = make_pack(2018, params).map_err(|e| e.to_string())?;
    let mut overlaps = Vec::new();
    for t in 0..200 {
        let seed = SeedSpec::new(2018, "c7").child(format!("t{t}"));
        let x = gauss(529, &seed.child("x"));
        let truth = SupportSet::new(
            ternarize(&project(&x, pack.w(), pack.a()).unwrap(), 50).unwrap().support(),
        );
        let probe = NoisyProbe::observe(&x, 0.25, &seed.child("z")).unwrap();
        let est = estimate_support(&probe, pack.w(), pack.a(), 50).unwrap();
        overlaps.push(est.overlap(&truth));
    }
    let (mean, std) = mean_std(&overlaps);
    check(mean >= 0.8, format!("mean overlap {mean:.4} (std {std:.4}) over 200 trials; threshold 0.8"))
}

fn relative_fd_error(fd: f64, analytic: f64) -> f64 {
    (fd - analytic).abs() / analytic.abs().max(1e-2)
}

/// Worst central-difference error of `⟨probe, f(u)⟩` over parameters and inputs.
fn layer_check(arch: &[LayerSpec], input_len: usize, instance: u64) -> f64 {
    let seed = SeedSpec::new(instance, "c8");
    let model = DecoderModel::init(arch, input_len, &seed.child("init")).unwrap();
    let u = gauss(input_len, &seed.child("u"));
    let probe = gauss(model.output_len(), &seed.child("probe"));
    let loss = |m: &DecoderModel, v: &[f64]| -> f64 { m.forward(v).unwrap().iter().zip(&probe).map(|(a, b)| a * b).sum() };
    let cache = model.forward_batch(&u, 1).unwrap();
    let d_params = model.backward(&cache, &probe).unwrap().flatten();
    let d_input = model.input_gradient(&cache, &probe);
    let h = 1e-5;
    let mut worst = 0.0f64;
    let base = model.parameters();
    let mut m = model.clone();
    for i in 0..base.len() {
        let mut p = base.clone();
        p[i] += h;
        m.set_parameters(&p).unwrap();
        let up = loss(&m, &u);
        p[i] -= 2.0 * h;
        m.set_parameters(&p).unwrap();
        let down = loss(&m, &u);
        worst = worst.max(relative_fd_error((up - down) / (2.0 * h), d_params[i]));
    }
    for i in 0..input_len {
        let mut p = u.clone();
        p[i] += h;
        let up = loss(&model, &p);
        p[i] -= 2.0 * h;
        let down = loss(&model, &p);
        worst = worst.max(relative_fd_error((up - down) / (2.0 * h), d_input[i]));
    }
    worst
}

fn c8_gradient_checks() -> Outcome {
    let layers: [(&str, Vec<LayerSpec>, usize); 5] = [
        ("dense", vec![LayerSpec::Dense { input: 7, output: 5 }], 7),
        (
            "conv2d",
            vec![
                LayerSpec::Reshape { h: 5, w: 6, c: 2 },
                LayerSpec::Conv2d { in_channels: 2, out_channels: 3, kernel: 3 },
            ],
            60,
        ),
        ("relu", vec![LayerSpec::Relu], 9),
        ("tanh", vec![LayerSpec::Tanh], 9),
        ("reshape", vec![LayerSpec::Reshape { h: 3, w: 3, c: 1 }, LayerSpec::Tanh], 9),
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, arch, len) in &layers {
        let worst = (0..20).map(|t| layer_check(arch, *len, t)).fold(0.0f64, f64::max);
        ok &= worst <= 1e-5;
        parts.push(format!("{name} {worst:.1e}"));
    }

    let params = StcaParams::new(24, 12, 6, 3).unwrap();
    let pack = make_pack(3, params).unwrap();
    let mut worst = 0.0f64;
    for t in 0..20 {
        let seed = SeedSpec::new(t, "c8/attack");
        let x = gauss(12, &seed.child("x"));
        let (u_a, _) = pack.protect(&x, &seed.child("noise")).unwrap();
        let spec = SurrogateSpec::new(2.0, 0.3).unwrap();
        let attack = GradientAttack::new(&u_a, pack.composed(), spec, 0.05).unwrap();
        let at = gauss(12, &seed.child("at"));
        let g = attack.gradient(&at).unwrap();
        for i in 0..12 {
            let mut p = at.clone();
            p[i] += 1e-5;
            let up = attack.objective(&p).unwrap();
            p[i] -= 2e-5;
            let down = attack.objective(&p).unwrap();
            worst = worst.max(relative_fd_error((up - down) / 2e-5, g[i]));
        }
    }
    ok &= worst <= 1e-5;
    parts.push(format!("attack objective {worst:.1e}"));
    check(ok, format!("worst relative error over 20 instances: {} (limit 1e-5)", parts.join(", ")))
}

/// Distortion of decoder and pseudo-inverse on the same clean templates.
fn paired_decoder_pinv(model: &DecoderModel, pack: &ProjectionPack, sources: &[Vec<f64>], scale: f64, sigma2_x: f64) -> (Vec<f64>, Vec<f64>) {
    let pinv = PinvAttack::new(pack.composed().clone(), 0.0).unwrap();
    let mut dec = Vec::new();
    let mut inv = Vec::new();
    for (i, x) in sources.iter().enumerate() {
        let (u_a, _) = pack.protect(x, &SeedSpec::new(0, "unused").child(format!("{i}"))).unwrap();
        let xd: Vec<f64> = model.forward(&u_a.to_real()).unwrap().iter().map(|v| v * scale).collect();
        dec.push(distortion(x, &xd, sigma2_x).unwrap());
        inv.push(distortion(x, &pinv.reconstruct(&u_a).unwrap(), sigma2_x).unwrap());
    }
    (dec, inv)
}

fn c9_decoder_synthetic() -> Outcome {
    let params = StcaParams::new(529, 529, 50, 0).unwrap();
    let pack = make_pack(2018, params).map_err(|e| e.to_string())?;
    let corpus = Corpus::Gaussian { n: 529, sigma2_x: 1.0 };
    let set = training_pairs(&corpus, Split::Train, &pack, &[(50, 0)], 50_000, &SeedSpec::new(2018, "c9/train"), true)
        .map_err(|e| e.to_string())?;
    let start = Instant::now();
    let outcome = train_decoder(&set, synthetic_net(529).layers(), &TrainConfig::default()).map_err(|e| e.to_string())?;
    let secs = start.elapsed().as_secs_f64();
    let tests: Vec<Vec<f64>> = (0..1000).map(|i| gauss(529, &SeedSpec::new(2018, "c9/test").child(format!("{i}")))).collect();
    let (dec, inv) = paired_decoder_pinv(&outcome.model, &pack, &tests, 1.0, 1.0);
    let (d_dec, _) = mean_std(&dec);
    let (d_inv, _) = mean_std(&inv);
    let rel = (d_dec - d_inv).abs() / d_inv;
    check(
        rel <= 0.25,
        format!(
            "decoder D={d_dec:.4}, pinv D={d_inv:.4}, relative gap {rel:.3} (limit 0.25); final train loss {:.4}; training {secs:.0}s",
            outcome.losses.last().copied().unwrap_or(f64::NAN)
        ),
    )
}

fn c10_decoder_mnist() -> Outcome {
    let corpus = Corpus::load(&mnist()).map_err(|e| e.to_string())?;
    let Corpus::Mnist(splits) = &corpus else { unreachable!() };
    let params = StcaParams::new(784, 784, 50, 0).unwrap();
    let pack = make_pack(2018, params).map_err(|e| e.to_string())?;
    let set = training_pairs(&corpus, Split::Train, &pack, &[(50, 0)], 0, &SeedSpec::new(2018, "c10"), false)
        .map_err(|e| e.to_string())?;
    let start = Instant::now();
    let outcome = train_decoder(&set, mnist_net(784).layers(), &TrainConfig::default()).map_err(|e| e.to_string())?;
    let secs = start.elapsed().as_secs_f64();
    // Per-pixel MSE, i.e. distortion with unit normalization.
    let (dec, inv) = paired_decoder_pinv(&outcome.model, &pack, &splits.test.samples, 1.0, 1.0);
    let (m_dec, _) = mean_std(&dec);
    let (m_inv, _) = mean_std(&inv);
    let (gap, se) = paired(&inv, &dec);
    check(
        gap > 3.0 * se,
        format!(
            "test MSE decoder {m_dec:.5} vs pinv {m_inv:.5} over {} images (paired gap {:.1}σ); training {secs:.0}s",
            dec.len(),
            gap / se
        ),
    )
}

fn c11_teacher_student() -> Outcome {
    let (m, n) = (16, 8);
    let teacher = gauss(m * n, &SeedSpec::new(11, "teacher"));
    let make = |count: usize, label: &str| {
        let mut set = TrainingSet::new(m, n);
        for i in 0..count {
            let u = gauss(m, &SeedSpec::new(11, label).child(format!("{i}")));
            let y: Vec<f64> = (0..n).map(|r| (0..m).map(|c| teacher[r * m + c] * u[c]).sum()).collect();
            set.push(&u, &y).unwrap();
        }
        set
    };
    let train = make(512, "train");
    let test = make(256, "test");
    let power: f64 = (0..test.len()).map(|i| test.target(i).iter().map(|v| v * v).sum::<f64>()).sum::<f64>()
        / (test.len() * n) as f64;
    let cfg = TrainConfig {
        epochs: 200,
        learning_rate: 0.05,
        ..TrainConfig::default()
    };
    let outcome = train_decoder(&train, &[LayerSpec::Dense { input: m, output: n }], &cfg).map_err(|e| e.to_string())?;
    let mse = evaluate(&outcome.model, &test).map_err(|e| e.to_string())?;
    check(
        mse <= 1e-3 * power,
        format!("test MSE {mse:.3e} vs limit {:.3e} (signal power {power:.3}) after 200 epochs", 1e-3 * power),
    )
}

fn c12_formats() -> Outcome {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/idx");
    let mut failures = Vec::new();
    match load_mnist_idx(&dir.join("valid-images.idx"), Some(&dir.join("valid-labels.idx"))) {
        Ok(d) if d.len() == 3 && d.shape_hint == Some((4, 4)) && d.labels.as_deref() == Some(&[7u8, 2, 9][..]) => {
            let raw = std::fs::read(dir.join("valid-images.idx")).unwrap();
            if d.samples.iter().flatten().zip(&raw[16..]).any(|(v, b)| *v != f64::from(*b) / 255.0) {
                failures.push("valid fixture pixels differ".to_string());
            }
        }
        other => failures.push(format!("valid fixture: {other:?}")),
    }
    let malformed = [
        ("bad-magic.idx", FormatErrorKind::BadMagic, 0u64),
        ("truncated-header.idx", FormatErrorKind::Truncated, 10),
        ("truncated-payload.idx", FormatErrorKind::Truncated, 56),
        ("trailing-bytes.idx", FormatErrorKind::DimensionMismatch, 64),
    ];
    for (file, kind, offset) in malformed {
        let bytes = std::fs::read(dir.join(file)).unwrap();
        match parse_idx_images(&bytes) {
            Err(StcaError::Format { kind: k, offset: o, .. }) if k == kind && o == offset => {}
            other => failures.push(format!("{file}: expected {} at {offset}, got {other:?}", kind.as_str())),
        }
    }

    let img: Vec<f64> = (0..28 * 28).map(|i| ((i * 7919) % 1000) as f64 / 999.0).collect();
    let pgm = encode_pgm(&img, 28, 28).unwrap();
    let header = b"P5\n28 28\n255\n";
    if !pgm.starts_with(header) {
        failures.push("pgm header".into());
    }
    let worst = pgm[header.len()..]
        .iter()
        .zip(&img)
        .map(|(b, v)| (f64::from(*b) / 255.0 - v).abs())
        .fold(0.0f64, f64::max);
    if worst > 0.5 / 255.0 + 1e-12 {
        failures.push(format!("pgm quantization error {worst}"));
    }

    let pack = make_pack(12, StcaParams::new(40, 30, 5, 2).unwrap()).unwrap();
    match ProjectionPack::from_bytes(&pack.to_bytes()) {
        Ok(back) if back == pack => {}
        other => failures.push(format!("pack round trip: {other:?}")),
    }
    let template = ProtectedTemplate::from_symbols(vec![1, 0, -1, 0, 1]).unwrap();
    if ProtectedTemplate::from_text(&template.to_text()).ok() != Some(template) {
        failures.push("template text round trip".into());
    }
    check(
        failures.is_empty(),
        if failures.is_empty() {
            "valid IDX parsed; 4 malformed IDX rejected with expected category and offset; PGM within 0.5/255; STCAPACK exact".into()
        } else {
            failures.join("; ")
        },
    )
}

fn run_cli(args: &[&str]) -> Result<(), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_stca"))
        .args(args)
        .current_dir(workspace_root())
        .output()
        .map_err(|e| e.to_string())?;
    if out.status.success() {
        Ok(())
    } else {
        Err(String::from_utf8_lossy(&out.stderr).trim().to_string())
    }
}

fn same_bytes(a: &Path, b: &Path) -> bool {
    matches!((std::fs::read(a), std::fs::read(b)), (Ok(x), Ok(y)) if x == y)
}

fn c13_determinism() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let p = |s: &str| tmp.path().join(s).display().to_string();
    let config = workspace_root().join("crates/core/configs/fig2a_synthetic.json").display().to_string();
    run_cli(&["rd-sweep", "--config", &config, "--outdir", &p("sweep1")])?;
    run_cli(&["rd-sweep", "--manifest", &p("sweep1/manifest.json"), "--outdir", &p("sweep2")])?;
    let mut ok = true;
    for f in ["fig2a_synthetic.csv", "shannon.csv"] {
        ok &= same_bytes(&tmp.path().join("sweep1").join(f), &tmp.path().join("sweep2").join(f));
    }

    let train_cfg = r#"{"scenario": "det", "seed": 9, "source": {"kind": "gaussian", "n": 529, "sigma2_x": 1.0},
        "s_x": [50], "s_ns": [0], "train_pairs": 128,
        "train": {"epochs": 1, "batch_size": 16, "learning_rate": 0.001, "seed": {"master_seed": 9, "stream_label": "train"},
                  "optimizer": {"kind": "sgd_momentum", "momentum": 0.9}}}"#;
    std::fs::write(p("train.json"), train_cfg).unwrap();
    std::fs::create_dir_all(p("t1")).unwrap();
    std::fs::create_dir_all(p("t2")).unwrap();
    run_cli(&["train-decoder", "--config", &p("train.json"), "--out", &p("t1/model.bin")])?;
    run_cli(&["train-decoder", "--manifest", &p("t1/manifest.json"), "--out", &p("t2/model.bin")])?;
    for f in ["model.bin", "model_loss.csv", "manifest.json"] {
        ok &= same_bytes(&tmp.path().join("t1").join(f), &tmp.path().join("t2").join(f));
    }
    check(ok, "rd-sweep CSVs and train-decoder model, loss CSV and manifest identical on manifest rerun".into())
}

type Criterion = (u32, &'static str, fn() -> Outcome);

const CRITERIA: [Criterion; 13] = [
    (1, "orthonormal transform", c1_orthonormality),
    (2, "linear-regime exactness", c2_linear_exactness),
    (3, "rate anchor", c3_rate_anchor),
    (4, "Shannon dominance", c4_shannon_dominance),
    (5, "ambiguization monotonicity", c5_ambiguization_order),
    (6, "authorized advantage", c6_authorized_advantage),
    (7, "support estimation", c7_support_estimation),
    (8, "gradient checks", c8_gradient_checks),
    (9, "decoder vs pinv, synthetic", c9_decoder_synthetic),
    (10, "decoder vs pinv, MNIST", c10_decoder_mnist),
    (11, "teacher-student", c11_teacher_student),
    (12, "format fidelity", c12_formats),
    (13, "determinism", c13_determinism),
];

fn main() {
    let selected: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for (id, name, run) in CRITERIA {
        if !selected.is_empty() && !selected.contains(&id) {
            continue;
        }
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS criterion {id:2} ({name}) [{secs:.1}s]: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {id:2} ({name}) [{secs:.1}s]: {detail}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
