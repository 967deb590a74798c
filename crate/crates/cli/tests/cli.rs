use std::path::{Path, PathBuf};
use std::process::Command;

use iqkit::eval::{ManifestRecord, Polarity};
use iqkit::{fr, save_image, synthetic, DatasetManifest, FeatureMatrix, Image};
use iqkit_cli::{run, EXIT_INPUT, EXIT_OK, EXIT_USAGE};

fn invoke(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("iqkit").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn save(dir: &Path, name: &str, img: &Image) -> PathBuf {
    let path = dir.join(name);
    save_image(&path, img, 8).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn compute_identity_is_capped() {
    let dir = tempfile::tempdir().unwrap();
    let a = save(dir.path(), "a.png", &synthetic::natural(40, 40, 3));
    let (code, out, _) = invoke(&[
        "compute",
        "--metric",
        "psnr",
        "--ref",
        s(&a),
        "--dist",
        s(&a),
    ]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out, "metric=psnr score=100.0\n");
}

#[test]
fn compute_tv_of_constant_is_zero() {
    let dir = tempfile::tempdir().unwrap();
    let c = save(
        dir.path(),
        "c.png",
        &Image::constant(20, 20, 3, 0.4).unwrap(),
    );
    let (code, out, _) = invoke(&["compute", "--metric", "tv", "--dist", s(&c)]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out, "metric=tv score=0.0\n");
}

#[test]
fn compute_matches_library_bit_for_bit() {
    let dir = tempfile::tempdir().unwrap();
    let a = save(dir.path(), "a.png", &synthetic::natural(64, 64, 3));
    let b = save(
        dir.path(),
        "b.png",
        &synthetic::with_gaussian_noise(&synthetic::natural(64, 64, 3), 0.07, 2),
    );
    let (code, out, err) = invoke(&[
        "compute",
        "--metric",
        "gmsd",
        "--ref",
        s(&a),
        "--dist",
        s(&b),
    ]);
    assert_eq!(code, EXIT_OK);
    assert!(err.contains("seed=0"));
    let expected = fr::gmsd(
        &iqkit::load_image(&a).unwrap(),
        &iqkit::load_image(&b).unwrap(),
    )
    .unwrap()
    .value;
    let printed: f64 = out
        .trim()
        .strip_prefix("metric=gmsd score=")
        .unwrap()
        .parse()
        .unwrap();
    assert_eq!(printed.to_bits(), expected.to_bits());
}

#[test]
fn usage_and_input_errors_map_to_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let a = save(dir.path(), "a.png", &synthetic::natural(40, 40, 1));
    let (code, _, err) = invoke(&[
        "compute",
        "--metric",
        "lpips",
        "--ref",
        s(&a),
        "--dist",
        s(&a),
    ]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("available metrics:") && err.contains("haarpsi"));
    let (code, _, _) = invoke(&["compute", "--metric", "tv", "--ref", s(&a), "--dist", s(&a)]);
    assert_eq!(code, EXIT_USAGE);
    let (code, _, _) = invoke(&["compute", "--metric", "ssim", "--dist", s(&a)]);
    assert_eq!(code, EXIT_USAGE);
    let missing = dir.path().join("nope.png");
    let (code, _, _) = invoke(&["compute", "--metric", "tv", "--dist", s(&missing)]);
    assert_eq!(code, EXIT_INPUT);
    let (code, _, _) = invoke(&["frobnicate"]);
    assert_eq!(code, EXIT_USAGE);
}

fn psnr_manifest(dir: &Path, count: usize) -> PathBuf {
    let reference = synthetic::natural(48, 48, 3);
    let ref_path = save(dir, "ref.png", &reference);
    let loaded_ref = iqkit::load_image(&ref_path).unwrap();
    let records = (0..count)
        .map(|i| {
            let d = synthetic::with_gaussian_noise(&reference, 0.01 + 0.03 * i as f64, 9);
            let path = save(dir, &format!("d{i}.png"), &d);
            let score = fr::psnr(&loaded_ref, &iqkit::load_image(&path).unwrap())
                .unwrap()
                .value;
            ManifestRecord {
                dist: PathBuf::from(format!("d{i}.png")),
                reference: Some(PathBuf::from("ref.png")),
                score,
            }
        })
        .collect();
    let path = dir.join("manifest.csv");
    DatasetManifest::new(records, Polarity::HigherIsBetter)
        .unwrap()
        .save(&path)
        .unwrap();
    path
}

#[test]
fn evaluate_self_consistent_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = psnr_manifest(dir.path(), 6);
    let out_path = dir.path().join("report.csv");
    let (code, _, _) = invoke(&[
        "evaluate",
        "--manifest",
        s(&manifest),
        "--metric",
        "ssim,psnr",
        "--out",
        s(&out_path),
        "--jobs",
        "2",
    ]);
    assert_eq!(code, EXIT_OK);
    let csv = std::fs::read_to_string(&out_path).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "metric,srcc,krcc,plcc,n,seconds");
    assert!(lines[1].starts_with("psnr,1,1,"));
    assert!(lines[2].starts_with("ssim,"));
    assert_eq!(lines.len(), 3);

    let (code, text, _) = invoke(&[
        "evaluate",
        "--manifest",
        s(&manifest),
        "--metric",
        "psnr",
        "--pretty",
    ]);
    assert_eq!(code, EXIT_OK);
    assert!(text.contains("SRCC") && text.contains("1.0000"));
}

#[test]
fn evaluate_rejects_empty_metric_list_and_bad_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = psnr_manifest(dir.path(), 3);
    let (code, _, _) = invoke(&["evaluate", "--manifest", s(&manifest)]);
    assert_eq!(code, EXIT_USAGE);
    let (code, _, _) = invoke(&["evaluate", "--manifest", s(&manifest), "--metric", ""]);
    assert_eq!(code, EXIT_USAGE);

    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "dist,ref,score\nd0.png,ref.png,1\nd1.png,ref.png,x\n").unwrap();
    let (code, _, err) = invoke(&["evaluate", "--manifest", s(&bad), "--metric", "psnr"]);
    assert_eq!(code, EXIT_INPUT);
    assert!(err.contains("bad.csv:3:"), "{err}");
}

#[test]
fn bench_emits_plot_csv() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = psnr_manifest(dir.path(), 4);
    let (code, out, _) = invoke(&[
        "bench",
        "--manifest",
        s(&manifest),
        "--metric",
        "psnr",
        "--metric",
        "gmsd",
        "--reps",
        "3",
        "--warmup",
        "0",
    ]);
    assert_eq!(code, EXIT_OK);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "metric,seconds_median,srcc");
    assert_eq!(lines.len(), 3);
    for line in &lines[1..] {
        let t: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
        assert!(t > 0.0);
    }
    let (code, _, _) = invoke(&[
        "bench",
        "--manifest",
        s(&manifest),
        "--metric",
        "psnr",
        "--reps",
        "2",
    ]);
    assert_eq!(code, EXIT_USAGE);
}

#[test]
fn features_patch_counts_and_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let small = save(dir.path(), "s.png", &synthetic::natural(96, 96, 3));
    let large = save(dir.path(), "l.png", &synthetic::natural(128, 128, 3));
    let out = dir.path().join("f.fmx");
    let (code, stdout, _) = invoke(&["features", s(&small), "--out", s(&out)]);
    assert_eq!(code, EXIT_OK, "{stdout}");
    let m = FeatureMatrix::load(&out).unwrap();
    assert_eq!((m.rows(), m.cols()), (1, 68));

    let (code, _, _) = invoke(&["features", s(&large), "--out", s(&out)]);
    assert_eq!(code, EXIT_OK);
    let m = FeatureMatrix::load(&out).unwrap();
    assert_eq!(m.rows(), 4);
    let again = dir.path().join("g.fmx");
    m.save_binary(&again).unwrap();
    assert_eq!(FeatureMatrix::load(&again).unwrap(), m);
}

#[test]
fn binary_reports_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_iqkit");
    let status = Command::new(bin).args(["list"]).output().unwrap();
    assert_eq!(status.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&status.stdout).contains("ms_gmsdc"));
    let status = Command::new(bin)
        .args(["compute", "--metric", "nope", "--dist", "x.png"])
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(2));
}
