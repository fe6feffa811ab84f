use archsynth::dataset::{split_manifest, SplitCounts, SplitName};
use archsynth::evalmetrics::{aggregate, exact_accuracy, thresh_accuracy, ChannelRule, EvalConfig};
use archsynth::{sample_scene, RoomRanges, SceneSpec};
use image::RgbImage;
use proptest::prelude::*;

fn image_pair() -> impl Strategy<Value = (RgbImage, RgbImage)> {
    (1u32..12, 1u32..12).prop_flat_map(|(w, h)| {
        let n = (w * h * 3) as usize;
        (
            proptest::collection::vec(any::<u8>(), n),
            proptest::collection::vec(any::<u8>(), n),
        )
            .prop_map(move |(a, b)| {
                (
                    RgbImage::from_raw(w, h, a).unwrap(),
                    RgbImage::from_raw(w, h, b).unwrap(),
                )
            })
    })
}

fn rule() -> impl Strategy<Value = ChannelRule> {
    prop_oneof![Just(ChannelRule::PerChannel), Just(ChannelRule::Summed)]
}

proptest! {
    #[test]
    fn thresh_is_monotone_in_threshold((a, b) in image_pair(), t in 0u32..300, dt in 0u32..100, rule in rule()) {
        let lo = thresh_accuracy(&a, &b, EvalConfig { threshold: t, rule }).unwrap();
        let hi = thresh_accuracy(&a, &b, EvalConfig { threshold: t + dt, rule }).unwrap();
        prop_assert!(lo <= hi);
    }

    #[test]
    fn exact_bounds_thresh((a, b) in image_pair(), t in 0u32..300, rule in rule()) {
        let exact = exact_accuracy(&a, &b).unwrap();
        let thresh = thresh_accuracy(&a, &b, EvalConfig { threshold: t, rule }).unwrap();
        prop_assert!(exact <= thresh);
        prop_assert_eq!(exact, thresh_accuracy(&a, &b, EvalConfig { threshold: 0, rule }).unwrap());
    }

    #[test]
    fn metrics_are_symmetric_and_in_range((a, b) in image_pair(), t in 0u32..300) {
        let c = EvalConfig::with_threshold(t);
        let ab = thresh_accuracy(&a, &b, c).unwrap();
        prop_assert_eq!(ab, thresh_accuracy(&b, &a, c).unwrap());
        prop_assert_eq!(exact_accuracy(&a, &b).unwrap(), exact_accuracy(&b, &a).unwrap());
        prop_assert!((0.0..=1.0).contains(&ab));
    }

    #[test]
    fn aggregate_orders_statistics(scores in proptest::collection::vec(0.0f64..=1.0, 1..60)) {
        let r = aggregate(&scores).unwrap();
        prop_assert!(r.min <= r.mean && r.mean <= r.max);
        prop_assert_eq!(r.count, scores.len());
        prop_assert_eq!(r.histogram.iter().sum::<u64>(), scores.len() as u64);
        let mut reversed = scores.clone();
        reversed.reverse();
        prop_assert_eq!(aggregate(&reversed).unwrap(), r);
    }

    #[test]
    fn split_partitions_entries(n in 0u64..200, a in 0u64..=100, b in 0u64..=100, split_seed in any::<u64>()) {
        let train = n * a / 100;
        let val = (n - train) * b / 100;
        let counts = SplitCounts::new(train, val, n - train - val);
        let seeds: Vec<u64> = (0..n).map(|i| i * 3 + 1).collect();
        let m = split_manifest(&seeds, counts, split_seed).unwrap();
        prop_assert_eq!(m.entries.iter().map(|e| e.seed).collect::<Vec<_>>(), seeds);
        for split in SplitName::ALL {
            prop_assert_eq!(m.split(split).count() as u64, counts.get(split));
        }
    }

    #[test]
    fn scene_json_round_trips(seed in any::<u64>()) {
        let scene = sample_scene(seed, &RoomRanges::default()).unwrap();
        let text = scene.to_json().unwrap();
        let back = SceneSpec::from_json(&text).unwrap();
        prop_assert_eq!(&back, &scene);
        prop_assert_eq!(back.to_json().unwrap(), text);
    }

    #[test]
    fn clutter_ranges_leave_room_and_camera(seed in any::<u64>(), lo in 0u32..5, span in 0u32..5) {
        let base = sample_scene(seed, &RoomRanges::default()).unwrap();
        let mut ranges = RoomRanges::default();
        ranges.clutter_floor.min = lo;
        ranges.clutter_floor.max = lo + span;
        let other = sample_scene(seed, &ranges).unwrap();
        prop_assert_eq!(other.room, base.room);
        prop_assert_eq!(other.camera, base.camera);
        prop_assert_eq!(other.light, base.light);
    }
}

#[test]
fn thousand_seeds_give_distinct_scenes() {
    let mut seen = std::collections::BTreeSet::new();
    for seed in 0..1000 {
        let s = sample_scene(seed, &RoomRanges::default()).unwrap();
        let key = format!(
            "{}{}",
            archsynth::json::to_canonical_string(&s.room).unwrap(),
            archsynth::json::to_canonical_string(&s.camera).unwrap()
        );
        assert!(
            seen.insert(key),
            "seed {seed} repeats an earlier room and camera"
        );
    }
}
