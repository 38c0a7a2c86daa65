use proptest::prelude::*;

use radlabel::dataset::{crop_downscale_meta, split_dataset, FrameRecord, Split, SplitFractions};
use radlabel::geometry::{BBox, CameraIntrinsics, ImagePoint};

fn frames(n: usize) -> Vec<FrameRecord> {
    (0..n as u64)
        .map(|i| FrameRecord {
            frame_id: i,
            timestamp_us: i as i64,
            scan_timestamp_us: None,
            ground_truth: String::new(),
            radar_range: None,
            radar_rate: None,
            split: Split::Test,
        })
        .collect()
}

#[test]
fn full_size_counts_are_within_one_of_reference() {
    let m = split_dataset(frames(25_076), SplitFractions::default(), (640, 256)).unwrap();
    let counts = [m.count(Split::Train), m.count(Split::Val), m.count(Split::Test)];
    assert_eq!(counts, [17_553, 2_507, 5_016]);
    for (got, reference) in counts.iter().zip([17_553i64, 2_508, 5_015]) {
        assert!((*got as i64 - reference).abs() <= 1);
    }
}

#[test]
fn identity_transform() {
    let t = crop_downscale_meta((640, 256), BBox::from_size(640.0, 256.0), 1.0).unwrap();
    let b = BBox::new(3.0, 4.0, 50.0, 60.0).unwrap();
    assert_eq!(t.apply_box(&b), b);
    assert_eq!(t.output_dims(), (640, 256));
}

#[test]
fn halving_halves_dims() {
    let t = crop_downscale_meta((1280, 960), BBox::from_size(1280.0, 960.0), 0.5).unwrap();
    let b = t.apply_box(&BBox::new(10.0, 10.0, 110.0, 50.0).unwrap());
    assert_eq!((b.width(), b.height()), (50.0, 20.0));
}

#[test]
fn intrinsics_follow_the_transform() {
    let k = CameraIntrinsics::new(1250.0, 1250.0, 640.0, 456.0, 1280, 960).unwrap();
    let crop = BBox::new(0.0, 200.0, 1280.0, 712.0).unwrap();
    let t = crop_downscale_meta((1280, 960), crop, 0.5).unwrap();
    let k2 = t.apply_intrinsics(&k).unwrap();
    assert_eq!((k2.fx, k2.cx, k2.cy, k2.width, k2.height), (625.0, 320.0, 128.0, 640, 256));
    let ray = nalgebra::Vector3::new(0.3, -0.1, 1.0);
    let direct = k2.project_ray(&ray);
    let via = t.apply_point(k.project_ray(&ray));
    assert!(direct.distance(&via) < 1e-9);
}

proptest! {
    #[test]
    fn split_is_contiguous_and_complete(n in 1usize..2000, a in 0.0f64..1.0, b in 0.0f64..1.0) {
        let (train, val) = (a.min(b), (a.max(b) - a.min(b)));
        let fr = SplitFractions::new(train, val, 1.0 - train - val).unwrap();
        let m = split_dataset(frames(n), fr, (640, 256)).unwrap();
        prop_assert_eq!(m.frames.len(), n);
        let ids: Vec<u64> = m.frames.iter().map(|f| f.frame_id).collect();
        prop_assert_eq!(ids, (0..n as u64).collect::<Vec<_>>());
        let rank = |s: Split| match s { Split::Train => 0, Split::Val => 1, Split::Test => 2 };
        prop_assert!(m.frames.windows(2).all(|w| rank(w[0].split) <= rank(w[1].split)));
    }

    #[test]
    fn transform_round_trips(
        x0 in 0.0f64..400.0, y0 in 0.0f64..300.0, w in 10.0f64..800.0, h in 10.0f64..600.0,
        s in 0.05f64..4.0, bx in -100.0f64..1300.0, by in -100.0f64..1000.0, bw in 0.0f64..300.0, bh in 0.0f64..300.0,
    ) {
        let crop = BBox::new(x0, y0, (x0 + w).min(1280.0), (y0 + h).min(960.0)).unwrap();
        let t = crop_downscale_meta((1280, 960), crop, s).unwrap();
        let b = BBox::new(bx, by, bx + bw, by + bh).unwrap();
        prop_assert!(t.invert_box(&t.apply_box(&b)).max_edge_difference(&b) <= 1e-9);
        let p = ImagePoint::new(bx, by);
        prop_assert!(t.invert_point(t.apply_point(p)).distance(&p) <= 1e-9);
    }
}
