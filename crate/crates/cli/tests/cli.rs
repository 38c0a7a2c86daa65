use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use radlabel::evaluation::iou;
use radlabel::io::{parse_detections, FrameDetections};
use radlabel::labeling::{compute_joint_region, confidence_order, overlap_with_joint};
use radlabel::radar::GrayImage;
use radlabel::Calibration;

fn radlabel(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_radlabel"))
        .args(args)
        .env("RADLABEL_LOG", "warn")
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = radlabel(args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn err(args: &[&str]) -> String {
    let out = radlabel(args);
    assert!(!out.status.success(), "{args:?} unexpectedly succeeded");
    String::from_utf8(out.stderr).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn simulated(dir: &Path) -> PathBuf {
    let out = dir.join("sim");
    ok(&["simulate", "--duration", "4", "-o", s(&out)]);
    out
}

fn tree(root: &Path) -> Vec<(PathBuf, Vec<u8>)> {
    let mut out = Vec::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.push((p.strip_prefix(root).unwrap().to_path_buf(), fs::read(&p).unwrap()));
            }
        }
    }
    out.sort();
    out
}

#[test]
fn simulate_is_byte_identical_per_seed() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b, c) = (dir.path().join("a"), dir.path().join("b"), dir.path().join("c"));
    ok(&["simulate", "--duration", "3", "-o", s(&a)]);
    ok(&["simulate", "--duration", "3", "-o", s(&b)]);
    ok(&["simulate", "--duration", "3", "--seed", "8", "-o", s(&c)]);
    assert_eq!(tree(&a), tree(&b));
    assert_ne!(tree(&a), tree(&c));
}

#[test]
fn default_manifest_frame_count() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("d");
    ok(&["simulate", "-o", s(&out)]);
    let m = radlabel::dataset::DatasetManifest::from_json(&fs::read_to_string(out.join("manifest.json")).unwrap())
        .unwrap();
    // 300 images at 30 Hz meet 200 scans at 20 Hz every 100 ms: 100 pairs, 1 in 5 kept.
    assert_eq!(m.frames.len(), 20);
}

#[test]
fn zero_duration_fails() {
    let dir = tempfile::tempdir().unwrap();
    let msg = err(&["simulate", "--duration", "0", "-o", s(&dir.path().join("z"))]);
    assert!(msg.contains("no camera frames"), "{msg}");
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("pipeline.toml");
    fs::write(&cfg, "[sync]\nsubsample = 10\n").unwrap();
    let count = |out: &Path| {
        let text = fs::read_to_string(out.join("manifest.json")).unwrap();
        radlabel::dataset::DatasetManifest::from_json(&text).unwrap().frames.len()
    };
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    ok(&["--config", s(&cfg), "simulate", "-o", s(&a)]);
    ok(&["--config", s(&cfg), "simulate", "--subsample", "5", "-o", s(&b)]);
    assert_eq!((count(&a), count(&b)), (10, 20));

    fs::write(&cfg, "[sync]\nsubsample = 0\n").unwrap();
    assert!(err(&["--config", s(&cfg), "anchors"]).contains("subsample"));
    fs::write(&cfg, "[labelling]\ntau = 0.5\n").unwrap();
    assert!(err(&["--config", s(&cfg), "anchors"]).contains("labelling"));
}

#[test]
fn help_lists_keys_and_defaults() {
    let help = ok(&["--help"]);
    for key in ["tau = 0.5", "max_offset_us = 10000", "subsample = 5", "iou = 0.45", "max_out = 200", "RADLABEL_LOG"] {
        assert!(help.contains(key), "missing {key}");
    }
    assert!(ok(&["label", "--help"]).contains("labeling.tau, default: 0.5"));
}

#[test]
fn label_with_empty_narrow_is_filtered_wide() {
    let dir = tempfile::tempdir().unwrap();
    let sim = simulated(dir.path());
    let empty = dir.path().join("empty.ndjson");
    fs::write(&empty, "").unwrap();
    let out = dir.path().join("labels.ndjson");
    let calib_path = sim.join("calibration.json");
    let wide_path = sim.join("detections/wide.ndjson");
    ok(&["label", "--calibration", s(&calib_path), "--wide", s(&wide_path), "--narrow", s(&empty), "-o", s(&out)]);

    let calib = Calibration::load(&calib_path).unwrap();
    let joint = compute_joint_region(&calib.wide, &calib.narrow, &calib.rotation_wide_from_narrow, &calib.narrow.bounds())
        .unwrap();
    let wide = parse_detections(&fs::read_to_string(&wide_path).unwrap()).unwrap();
    let merged = parse_detections(&fs::read_to_string(&out).unwrap()).unwrap();
    let mut expected = FrameDetections::new();
    for (id, dets) in wide {
        let mut keep: Vec<_> = dets.into_iter().filter(|d| overlap_with_joint(&d.bbox, &joint) <= 0.5).collect();
        keep.sort_by(|a, b| b.objectness.total_cmp(&a.objectness).then(a.bbox.x_min().total_cmp(&b.bbox.x_min())));
        expected.insert(id, keep);
    }
    assert_eq!(merged, expected);
}

#[test]
fn label_reports_recall_gain() {
    let dir = tempfile::tempdir().unwrap();
    let sim = simulated(dir.path());
    let stdout = ok(&[
        "label",
        "--calibration",
        s(&sim.join("calibration.json")),
        "--wide",
        s(&sim.join("detections/wide.ndjson")),
        "--narrow",
        s(&sim.join("detections/narrow.ndjson")),
        "--ground-truth",
        s(&sim.join("gt/wide.ndjson")),
        "-o",
        s(&dir.path().join("l.ndjson")),
    ]);
    let line = stdout.lines().find(|l| l.starts_with("recall:")).unwrap();
    let nums: Vec<f64> = line
        .split_whitespace()
        .filter_map(|w| w.parse().ok())
        .collect();
    assert!(nums[1] >= nums[0], "{line}");
}

#[test]
fn label_errors() {
    let dir = tempfile::tempdir().unwrap();
    let sim = simulated(dir.path());
    let wide = sim.join("detections/wide.ndjson");
    let msg = err(&["label", "--wide", s(&wide), "--narrow", s(&wide)]);
    assert!(msg.contains("calibration"), "{msg}");

    let bad = dir.path().join("bad.ndjson");
    fs::write(&bad, "{\"frame_id\":0}\n{\"frame_id\":1,\"x_min\":\n").unwrap();
    let msg = err(&["label", "--calibration", s(&sim.join("calibration.json")), "--wide", s(&bad), "--narrow", s(&wide)]);
    assert!(msg.contains("line 2"), "{msg}");
}

fn write_radar_inputs(dir: &Path, scans: &str) -> [PathBuf; 4] {
    let calib = Calibration {
        wide: radlabel::geometry::CameraIntrinsics::new(625.0, 625.0, 320.0, 128.0, 640, 256).unwrap(),
        narrow: radlabel::geometry::CameraIntrinsics::new(2500.0, 2500.0, 640.0, 480.0, 1280, 960).unwrap(),
        rotation_wide_from_narrow: Default::default(),
        separation_m: 0.0,
        radar_to_wide: Default::default(),
    };
    let paths = ["calib.json", "scans.ndjson", "ego.ndjson", "images.ndjson"].map(|n| dir.join(n));
    fs::write(&paths[0], calib.to_json().unwrap()).unwrap();
    fs::write(&paths[1], scans).unwrap();
    fs::write(&paths[2], "{\"timestamp_us\":0,\"velocity_mps\":[0,0,0]}\n").unwrap();
    fs::write(&paths[3], "{\"timestamp_us\":0,\"path\":\"a\"}\n{\"timestamp_us\":33333,\"path\":\"b\"}\n").unwrap();
    paths
}

fn run_radar(dir: &Path, scans: &str) -> (GrayImage, GrayImage) {
    let [calib, scans, ego, images] = write_radar_inputs(dir, scans);
    let out = dir.join("ch");
    ok(&["radar", "--calibration", s(&calib), "--scans", s(&scans), "--ego", s(&ego), "--images", s(&images), "-o", s(&out)]);
    let load = |n: &str| GrayImage::from_pgm(&fs::read(out.join(n)).unwrap()).unwrap();
    assert!(out.join("1.range.pgm").exists());
    (load("0.range.pgm"), load("0.rate.pgm"))
}

#[test]
fn radar_empty_scans_give_background() {
    let dir = tempfile::tempdir().unwrap();
    let (range, rate) = run_radar(dir.path(), "");
    assert!(range.data.iter().chain(&rate.data).all(|v| *v == 0));
}

#[test]
fn radar_single_stationary_target() {
    let dir = tempfile::tempdir().unwrap();
    let line = "{\"timestamp_us\":10,\"beam\":\"long_narrow\",\"range_m\":50.0,\"bearing_rad\":0.0,\"range_rate_mps\":0.0,\"amplitude_db\":10}\n";
    let (range, rate) = run_radar(dir.path(), line);
    let lit: Vec<(u32, u32)> = (0..256)
        .flat_map(|y| (0..640).map(move |x| (x, y)))
        .filter(|&(x, y)| rate.get(x, y) != 0)
        .collect();
    assert_eq!(lit.len(), 13);
    for (x, y) in lit {
        let (dx, dy) = (f64::from(x) - 320.0, f64::from(y) - 128.0);
        assert!(dx * dx + dy * dy <= 4.0);
        assert_eq!(rate.get(x, y), 127);
        assert_eq!(range.get(x, y), 128);
    }
}

fn gt_file(dir: &Path, frames: &[(u64, &[[f64; 4]])]) -> PathBuf {
    let mut text = String::new();
    for (id, boxes) in frames {
        if boxes.is_empty() {
            text.push_str(&format!("{{\"frame_id\":{id}}}\n"));
        }
        for b in *boxes {
            text.push_str(&format!(
                "{{\"frame_id\":{id},\"x_min\":{},\"y_min\":{},\"x_max\":{},\"y_max\":{}}}\n",
                b[0], b[1], b[2], b[3]
            ));
        }
    }
    let p = dir.join(format!("gt{}.ndjson", frames.len()));
    fs::write(&p, text).unwrap();
    p
}

#[test]
fn evaluate_perfect_and_empty() {
    let dir = tempfile::tempdir().unwrap();
    let gt = gt_file(dir.path(), &[(0, &[[0.0, 0.0, 10.0, 10.0], [100.0, 100.0, 150.0, 140.0]]), (1, &[[10.0, 10.0, 200.0, 200.0]])]);
    let report = dir.path().join("r.json");
    ok(&["evaluate", "--ground-truth", s(&gt), "--detections", s(&gt), "-o", s(&report)]);
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    for entry in v["categories"].as_array().unwrap() {
        assert_eq!(entry["ap"], 1.0, "{entry}");
    }

    let empty = gt_file(dir.path(), &[(0, &[]), (1, &[]), (2, &[])]);
    ok(&["evaluate", "--ground-truth", s(&empty), "--detections", s(&gt), "-o", s(&report)]);
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    assert!(v["categories"].as_array().unwrap().iter().all(|e| e["ap"].is_null()));
}

#[test]
fn evaluate_rejects_unknown_frames() {
    let dir = tempfile::tempdir().unwrap();
    let gt = gt_file(dir.path(), &[(0, &[[0.0, 0.0, 10.0, 10.0]])]);
    let dets = dir.path().join("d.ndjson");
    fs::write(&dets, "{\"frame_id\":4,\"x_min\":0,\"y_min\":0,\"x_max\":1,\"y_max\":1}\n{\"frame_id\":9}\n").unwrap();
    let msg = err(&["evaluate", "--ground-truth", s(&gt), "--detections", s(&dets), "-o", s(&dir.path().join("r"))]);
    assert!(msg.contains("4, 9"), "{msg}");
}

/// Greedy matching and every-point AP written out directly.
fn oracle_ap(gt: &FrameDetections, dets: &FrameDetections) -> f64 {
    let mut scored = Vec::new();
    let mut n_gt = 0;
    for (id, g) in gt {
        n_gt += g.len();
        let mut d = dets.get(id).cloned().unwrap_or_default();
        d.sort_by(confidence_order);
        let mut taken = vec![false; g.len()];
        for det in &d {
            let mut best = None;
            for (j, t) in g.iter().enumerate() {
                let o = iou(&det.bbox, &t.bbox);
                if !taken[j] && o >= 0.5 && best.is_none_or(|(_, b)| o > b) {
                    best = Some((j, o));
                }
            }
            if let Some((j, _)) = best {
                taken[j] = true;
            }
            scored.push((det.confidence(), best.is_some()));
        }
    }
    scored.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut ap = 0.0;
    for j in 1..=n_gt {
        let target = j as f64 / n_gt as f64;
        let mut best = 0.0f64;
        for k in 1..=scored.len() {
            let tp = scored[..k].iter().filter(|s| s.1).count() as f64;
            if tp / n_gt as f64 >= target - 1e-15 {
                best = best.max(tp / k as f64);
            }
        }
        ap += best / n_gt as f64;
    }
    ap
}

#[test]
fn evaluate_matches_oracle_on_simulated_detections() {
    let dir = tempfile::tempdir().unwrap();
    let sim = simulated(dir.path());
    let (gt_path, det_path) = (sim.join("gt/wide.ndjson"), sim.join("detections/wide.ndjson"));
    let report = dir.path().join("r.json");
    ok(&["evaluate", "--ground-truth", s(&gt_path), "--detections", s(&det_path), "-o", s(&report)]);
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    let all = v["categories"].as_array().unwrap().iter().find(|e| e["category"] == "all").unwrap();
    let gt = parse_detections(&fs::read_to_string(gt_path).unwrap()).unwrap();
    let dets = parse_detections(&fs::read_to_string(det_path).unwrap()).unwrap();
    let expected = oracle_ap(&gt, &dets);
    assert!((all["ap"].as_f64().unwrap() - expected).abs() <= 1e-9);
}

#[test]
fn sync_anchors_stats() {
    let dir = tempfile::tempdir().unwrap();
    let sim = simulated(dir.path());
    let pairs = dir.path().join("pairs.ndjson");
    let out = ok(&[
        "sync",
        "--images",
        s(&sim.join("camera/index.ndjson")),
        "--scans",
        s(&sim.join("radar/index.ndjson")),
        "-o",
        s(&pairs),
    ]);
    assert!(out.contains("40 pairs"), "{out}");
    for line in fs::read_to_string(&pairs).unwrap().lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert!(v["offset_us"].as_i64().unwrap().abs() <= 10_000);
    }
    assert!(ok(&["anchors"]).contains("total: 47676"));
    assert!(ok(&["anchors", "--subdivisions", "1"]).contains("total: 11919"));
    let stats = ok(&["stats", "--manifest", s(&sim.join("manifest.json"))]);
    assert!(stats.starts_with("5 frames"), "{stats}");
}
