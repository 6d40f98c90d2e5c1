use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use chromabench::colorspace::save_image;
use chromabench::distribution::chroma_scale;
use chromabench::features::{save_cfs, FeatureMeta};
use chromabench::harness::{
    load_dir, run_benchmark, synth_set, Cell, EvalConfig, Metric, RunOptions, SynthMode,
};
use chromabench::{Error, FeatureSet};
use serde_json::json;

fn write_config(dir: &Path, cfg: serde_json::Value) -> EvalConfig {
    let path = dir.join("cfg.json");
    fs::write(&path, serde_json::to_string_pretty(&cfg).unwrap()).unwrap();
    EvalConfig::from_file(&path).unwrap()
}

fn value(report: &chromabench::harness::MetricReport, method: &str, m: Metric) -> f64 {
    match report.row(method).unwrap().get(m) {
        Some(Cell::Value(v)) => *v,
        other => panic!("{method}/{m:?}: {other:?}"),
    }
}

fn scaled_copy(src: &Path, dst: &Path, alpha: f64) {
    fs::create_dir_all(dst).unwrap();
    for (id, img) in load_dir(src).unwrap() {
        let (scaled, _) = chroma_scale(&img, alpha).unwrap();
        save_image(&scaled, &dst.join(format!("{id}.png"))).unwrap();
    }
}

#[test]
fn chroma_scaled_method_is_recovered() {
    let tmp = tempfile::tempdir().unwrap();
    let gt = tmp.path().join("gt");
    synth_set(21, 12, (40, 32), SynthMode::SmoothNonclipping, &gt).unwrap();
    scaled_copy(&gt, &tmp.path().join("dull"), 0.6);

    let cfg = write_config(
        tmp.path(),
        json!({
            "dataset_name": "synthetic",
            "gt_dir": "gt",
            "pred_dirs": [{"name": "gt", "path": "gt"}, {"name": "dull", "path": "dull"}],
            "metrics": ["SSIM", "FID", "HI_FID", "CF", "DELTA_CF", "PSNR"],
            "output": {"path": "report.md", "format": "markdown"}
        }),
    );
    let report = run_benchmark(&cfg, &RunOptions::default()).unwrap();
    assert_eq!(report.metrics, [Metric::Fid, Metric::HiFid, Metric::Cf, Metric::DeltaCf, Metric::Psnr, Metric::Ssim]);

    let fid = value(&report, "dull", Metric::Fid);
    let hi = value(&report, "dull", Metric::HiFid);
    assert!(hi < 0.05 * fid, "HI-FID {hi} vs FID {fid}");
    let alpha = report.row("dull").unwrap().alpha.unwrap();
    // 8-bit storage of the scaled images perturbs the recovered factor slightly.
    assert!((alpha.alpha_star - 1.0 / 0.6).abs() < 1e-2, "{alpha:?}");
    let gt_cf = report.gt_mean_cf.unwrap();
    assert!((value(&report, "dull", Metric::Cf) - 0.6 * gt_cf).abs() < 0.02 * gt_cf);
    assert!(value(&report, "dull", Metric::Psnr).is_finite());

    assert_eq!(value(&report, "gt", Metric::DeltaCf), 0.0);
    assert_eq!(value(&report, "gt", Metric::Psnr), f64::INFINITY);
    assert_eq!(value(&report, "gt", Metric::Ssim), 1.0);

    report.write(&cfg.output.path, cfg.output.format).unwrap();
    let md = fs::read_to_string(&cfg.output.path).unwrap();
    assert!(md.starts_with("# synthetic"));
    assert!(md.contains("| gt | 0.00 | 0.00 |"));
}

#[test]
fn missing_pairs_become_error_cells_unless_strict() {
    let tmp = tempfile::tempdir().unwrap();
    let gt = tmp.path().join("gt");
    synth_set(1, 4, (24, 24), SynthMode::General, &gt).unwrap();
    let other = tmp.path().join("other");
    fs::create_dir_all(&other).unwrap();
    for (i, (_, img)) in load_dir(&gt).unwrap().into_iter().enumerate() {
        save_image(&img, &other.join(format!("renamed_{i}.png"))).unwrap();
    }
    let cfg = write_config(
        tmp.path(),
        json!({
            "gt_dir": "gt",
            "pred_dirs": [{"name": "other", "path": "other"}],
            "metrics": ["FID", "PSNR", "SSIM"],
            "output": {"path": "out.csv", "format": "csv"}
        }),
    );
    let report = run_benchmark(&cfg, &RunOptions::default()).unwrap();
    let row = report.row("other").unwrap();
    // Same pixels under other names: set-level FID still sees identical sets.
    assert!(value(&report, "other", Metric::Fid) < 1e-6);
    assert!(matches!(row.get(Metric::Psnr), Some(Cell::Error(_))));
    assert!(report.to_csv().unwrap().contains("error: "));

    let strict = RunOptions { strict: true, ..Default::default() };
    assert!(matches!(run_benchmark(&cfg, &strict), Err(Error::UnpairedFiles(_) | Error::NoPairs { .. })));
}

#[test]
fn luminance_replacement_restores_ground_truth_lightness() {
    let tmp = tempfile::tempdir().unwrap();
    let gt = tmp.path().join("gt");
    synth_set(9, 3, (32, 32), SynthMode::SmoothNonclipping, &gt).unwrap();
    // A method that gets chroma right but lightness wrong.
    let dark = tmp.path().join("dark");
    fs::create_dir_all(&dark).unwrap();
    for (id, img) in load_dir(&gt).unwrap() {
        let data = img.data().iter().map(|v| v * 0.7).collect();
        let img = chromabench::PlanarImage::new(32, 32, chromabench::ColorSpace::Srgb, data).unwrap();
        save_image(&img, &dark.join(format!("{id}.png"))).unwrap();
    }
    let cfg = write_config(
        tmp.path(),
        json!({
            "gt_dir": "gt",
            "pred_dirs": [{"name": "dark", "path": "dark"}],
            "metrics": ["PSNR", "SSIM"],
            "output": {"path": "out.csv", "format": "csv"}
        }),
    );
    let plain = run_benchmark(&cfg, &RunOptions::default()).unwrap();
    let replaced = run_benchmark(&cfg, &RunOptions { luminance_replace: true, strict: true }).unwrap();
    assert!(replaced.luminance_replace);
    assert!(value(&replaced, "dark", Metric::Psnr) > value(&plain, "dark", Metric::Psnr) + 5.0);
    assert!(value(&replaced, "dark", Metric::Ssim) > 0.95);
}

#[test]
fn external_features_and_clip_embeddings() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let gt = dir.join("gt");
    synth_set(4, 3, (16, 16), SynthMode::General, &gt).unwrap();
    let meta = || FeatureMeta::new("ext", "1");
    let rows = |shift: f32| -> Vec<(String, Vec<f32>)> {
        (0..3).map(|i| (format!("synth_{i:04}"), vec![i as f32 + shift, (i * i) as f32])).collect()
    };
    let save = |name: &str, set: FeatureSet| save_cfs(&set, &dir.join(name)).unwrap();
    save("gt.cfs", FeatureSet::from_rows(meta(), rows(0.0)).unwrap());
    save("m.cfs", FeatureSet::from_rows(meta(), rows(2.0)).unwrap());
    save("m_corr.cfs", FeatureSet::from_rows(meta(), rows(1.0)).unwrap());
    save(
        "img.cfs",
        FeatureSet::from_rows(meta(), (0..3).map(|i| (format!("synth_{i:04}"), vec![1.0, 0.0])).collect())
            .unwrap(),
    );
    save(
        "txt.cfs",
        FeatureSet::from_rows(
            meta(),
            vec![("synth_0000".into(), vec![1.0, 0.0]), ("synth_0001".into(), vec![0.0, 1.0])],
        )
        .unwrap(),
    );
    fs::write(dir.join("prompts.txt"), "synth_0000\ta red thing\nsynth_0001\ta blue thing\n").unwrap();

    let cfg = write_config(
        dir,
        json!({
            "gt_dir": "gt",
            "pred_dirs": [{"name": "m", "path": "gt"}],
            "prompts_file": "prompts.txt",
            "extractor": "external_cfs",
            "features": {
                "gt_cfs": "gt.cfs",
                "pred_cfs": {"m": "m.cfs"},
                "corrected_pred_cfs": {"m": "m_corr.cfs"},
                "image_embeddings_cfs": {"m": "img.cfs"},
                "text_embeddings_cfs": "txt.cfs"
            },
            "metrics": ["FID", "HI_FID", "CLIP_SCORE"],
            "output": {"path": "out.csv", "format": "csv"}
        }),
    );
    let report = run_benchmark(&cfg, &RunOptions { strict: true, ..Default::default() }).unwrap();
    // Pure mean shifts in the first dimension.
    assert!((value(&report, "m", Metric::Fid) - 4.0).abs() < 1e-9);
    assert!((value(&report, "m", Metric::HiFid) - 1.0).abs() < 1e-9);
    assert!((value(&report, "m", Metric::ClipScore) - 50.0).abs() < 1e-9);
    // Predictions are the ground truth itself.
    assert!((report.row("m").unwrap().alpha.unwrap().alpha_star - 1.0).abs() < 1e-3);
}

#[test]
fn reports_are_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    synth_set(3, 5, (24, 20), SynthMode::General, &tmp.path().join("gt")).unwrap();
    let cfg = write_config(
        tmp.path(),
        json!({
            "gt_dir": "gt",
            "pred_dirs": [{"name": "same", "path": "gt"}],
            "metrics": ["FID", "HI_FID", "CF", "DELTA_CF", "PSNR", "SSIM"],
            "output": {"path": "out.csv", "format": "csv"}
        }),
    );
    let a = run_benchmark(&cfg, &RunOptions::default()).unwrap().to_csv().unwrap();
    let b = run_benchmark(&cfg, &RunOptions::default()).unwrap().to_csv().unwrap();
    assert_eq!(a, b);
}

fn cli(args: &[&str]) -> String {
    let out = Command::new(env!("CARGO_BIN_EXE_chromabench"))
        .args(args)
        .env("RUST_LOG", "error")
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "chromabench {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn cli_end_to_end() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let gt: PathBuf = dir.join("gt");
    cli(&["--threads", "2", "synth", "--seed", "5", "--n", "4", "--size", "20x16", "--mode", "smooth", "--out", p(&gt)]);
    assert_eq!(load_dir(&gt).unwrap().len(), 4);

    let cfs = dir.join("gt.cfs");
    cli(&["extract", "--extractor", "pixel-stats", "--in", p(&gt), "--out", p(&cfs)]);
    let set = chromabench::features::load_cfs(&cfs).unwrap();
    assert_eq!((set.len(), set.dim(), set.meta().extractor.as_str()), (4, 48, "pixel-stats"));

    let curve = dir.join("curve.csv");
    cli(&["sweep", "--in", p(&gt), "--alphas", "0.5,1,1.5", "--out", p(&curve)]);
    let text = fs::read_to_string(&curve).unwrap();
    assert_eq!(text.lines().next(), Some("alpha,mean_cf,fid"));
    assert_eq!(text.lines().count(), 4);

    let corrected = dir.join("corrected");
    let stdout = cli(&["correct", "--gt", p(&gt), "--pred", p(&gt), "--out", p(&corrected)]);
    assert!(stdout.starts_with("alpha*=1.0"), "{stdout}");

    let prompts = dir.join("prompts.txt");
    fs::write(&prompts, "a\tarafed man in a black and white photo\n").unwrap();
    let cleaned = dir.join("cleaned.txt");
    cli(&["clean-captions", "--in", p(&prompts), "--out", p(&cleaned)]);
    assert_eq!(fs::read_to_string(&cleaned).unwrap(), "a\tman in a\n");

    fs::write(
        dir.join("cfg.json"),
        json!({
            "gt_dir": "gt",
            "pred_dirs": [{"name": "corrected", "path": "corrected"}],
            "metrics": ["FID", "CF", "PSNR"],
            "output": {"path": "table.csv", "format": "csv"}
        })
        .to_string(),
    )
    .unwrap();
    cli(&["eval", "--config", p(&dir.join("cfg.json")), "--strict"]);
    let table = fs::read_to_string(dir.join("table.csv")).unwrap();
    assert!(table.starts_with("method,FID,CF,PSNR,n_images,luminance_replace\ncorrected,"));

    let bad = Command::new(env!("CARGO_BIN_EXE_chromabench"))
        .args(["synth", "--n", "1", "--out", p(&dir.join("x"))])
        .output()
        .unwrap();
    assert!(!bad.status.success());
}
