use std::f64::consts::PI;

use proptest::prelude::*;
use sonoforge::audio::{load_wav, resample, save_wav};
use sonoforge::augment::signal::{
    add_noise_snr, apply_gain_db, change_speed, circular_time_shift, clip_fraction, harmonic_distortion,
};
use sonoforge::augment::spectro::{
    freq_time_mask, mult_noise, spec_circular_time_shift, spec_pitch_time_shift, tps_warp_mask, vtln_warp_slices,
    MaskSpec, VtlnParams,
};
use sonoforge::fusion::{evaluate, predict, sanitize, sum_rule, FoldSplit, ScoreMatrix, Truth};
use sonoforge::pipeline::derive_seed;
use sonoforge::repr::{
    cochleagram, dgt_spectrogram, to_gray, FreqAxis, GammatoneBank, GrayImage, MelBank, StftParams, TimeFreqMatrix,
};
use sonoforge::tsm::{ola, wsola, TsmAlgorithm, TsmParams, WsolaParams, DEFAULT_WINDOW};
use sonoforge::{AudioClip, RngStream};

fn clip_strategy(min_len: usize, max_len: usize) -> impl Strategy<Value = AudioClip> {
    prop::collection::vec(-1.0f64..1.0, min_len..max_len).prop_map(|v| AudioClip::new(v, 16000).unwrap())
}

fn image_strategy() -> impl Strategy<Value = GrayImage> {
    (8usize..40, 8usize..40)
        .prop_flat_map(|(r, c)| (Just(r), Just(c), prop::collection::vec(any::<u8>(), r * c)))
        .prop_map(|(r, c, pixels)| GrayImage::new(r, c, pixels).unwrap())
}

fn matrix(rows: usize, cols: usize, values: Vec<f64>) -> TimeFreqMatrix {
    TimeFreqMatrix::new(rows, cols, values, FreqAxis::Uniform { bin_hz: 1.0 }, 0.01).unwrap()
}

fn rel_l2(a: &[f64], b: &[f64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    let den: f64 = b.iter().map(|y| y * y).sum();
    (num / den).sqrt()
}

// audio

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn wav_round_trip_within_one_step(clip in clip_strategy(1, 2000)) {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("x.wav");
        save_wav(&clip, &p).unwrap();
        let back = load_wav(&p).unwrap();
        prop_assert_eq!(back.sample_rate(), clip.sample_rate());
        prop_assert_eq!(back.len(), clip.len());
        for (a, b) in back.samples().iter().zip(clip.samples()) {
            prop_assert!((a - b).abs() <= 1.0 / 32768.0, "{} vs {}", a, b);
        }
    }

    #[test]
    fn resample_up_and_back(freqs in prop::collection::vec(50.0f64..3200.0, 1..4), phase in 0.0f64..6.0) {
        // band-limited below 0.4 of an 8 kHz rate; edges excluded where the
        // kernel runs off the clip
        let clip = AudioClip::from_fn(8000, 8000, |t| {
            freqs.iter().map(|f| (2.0 * PI * f * t + phase).sin()).sum::<f64>() / freqs.len() as f64
        }).unwrap();
        let back = resample(&resample(&clip, 16000).unwrap(), 8000).unwrap();
        prop_assert_eq!(back.len(), clip.len());
        let e = rel_l2(&back.samples()[100..7900], &clip.samples()[100..7900]);
        prop_assert!(e <= 1e-2, "{}", e);
    }

    #[test]
    fn noise_is_a_pure_function_of_rng_state(clip in clip_strategy(10, 500), seed in any::<u64>(), snr in -10.0f64..30.0) {
        prop_assume!(clip.power() > 0.0);
        let a = add_noise_snr(&clip, snr, &mut RngStream::new(seed)).unwrap();
        let b = add_noise_snr(&clip, snr, &mut RngStream::new(seed)).unwrap();
        prop_assert_eq!(a, b);
    }
}

// representations

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn to_gray_affine_invariant(
        rows in 1usize..10,
        cols in 2usize..10,
        seed in any::<u64>(),
        a in 0.01f64..100.0,
        b in -1000.0f64..1000.0,
    ) {
        let mut rng = RngStream::new(seed);
        let values = (0..rows * cols).map(|_| rng.uniform(-50.0, 50.0).unwrap()).collect();
        let m = matrix(rows, cols, values);
        prop_assert_eq!(to_gray(&m.map(|v| a * v + b)).unwrap(), to_gray(&m).unwrap());
    }

    #[test]
    fn mel_weights_peak_at_own_centre(n in 2usize..60, f_hi in 2000.0f64..8000.0) {
        let bank = MelBank::new(n, 0.0, f_hi, 1024, 16000).unwrap();
        for i in 0..n {
            prop_assert_eq!(bank.weight(i, bank.center_bin(i)), 1.0);
            if i > 0 && bank.center_bin(i - 1) != bank.center_bin(i) {
                prop_assert_eq!(bank.weight(i, bank.center_bin(i - 1)), 0.0);
            }
            if i + 1 < n && bank.center_bin(i + 1) != bank.center_bin(i) {
                prop_assert_eq!(bank.weight(i, bank.center_bin(i + 1)), 0.0);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn dgt_of_doubled_clip_repeats_columns(blocks in 5usize..10, seed in any::<u64>()) {
        let p = StftParams::default();
        let mut rng = RngStream::new(seed);
        let x: Vec<f64> = (0..blocks * p.hop).map(|_| rng.gaussian()).collect();
        let xx: Vec<f64> = x.iter().chain(&x).copied().collect();
        let a = dgt_spectrogram(&AudioClip::new(x, 16000).unwrap(), &p).unwrap();
        let b = dgt_spectrogram(&AudioClip::new(xx, 16000).unwrap(), &p).unwrap();
        for col in 0..a.cols() {
            for row in 0..a.rows() {
                prop_assert_eq!(b.get(row, col), a.get(row, col));
                prop_assert_eq!(b.get(row, col + blocks), a.get(row, col));
            }
        }
    }

    #[test]
    fn representations_scale_with_input(c in 0.1f64..10.0, clip in clip_strategy(2048, 4000)) {
        let scaled = AudioClip::new(clip.samples().iter().map(|v| v * c).collect(), 16000).unwrap();
        let p = StftParams::default();
        let (a, b) = (dgt_spectrogram(&clip, &p).unwrap(), dgt_spectrogram(&scaled, &p).unwrap());
        for (x, y) in a.values().iter().zip(b.values()) {
            prop_assert!((y - c * x).abs() <= 1e-6 * (c * x).abs().max(1e-12));
        }
        let bank = GammatoneBank::erb_spaced(8, 100.0, 6000.0, 16000).unwrap();
        let (a, b) = (cochleagram(&clip, &bank, 0.02, 0.01).unwrap(), cochleagram(&scaled, &bank, 0.02, 0.01).unwrap());
        for (x, y) in a.values().iter().zip(b.values()) {
            prop_assert!((y - c * c * x).abs() <= 1e-6 * (c * c * x).abs().max(1e-12));
        }
    }
}

// signal augmentation

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn signal_transforms_keep_rate(clip in clip_strategy(64, 800), g in -20.0f64..20.0, f in 0.5f64..2.0) {
        prop_assert_eq!(apply_gain_db(&clip, g).sample_rate(), 16000);
        prop_assert_eq!(change_speed(&clip, f).unwrap().sample_rate(), 16000);
        prop_assert_eq!(harmonic_distortion(&clip, 3).sample_rate(), 16000);
        prop_assert_eq!(circular_time_shift(&clip, 5).unwrap().sample_rate(), 16000);
        prop_assert_eq!(clip_fraction(&clip, 0.3).unwrap().0.sample_rate(), 16000);
    }

    #[test]
    fn circular_shift_permutes(clip in clip_strategy(1, 500), t in 0usize..1000) {
        let t = t % (clip.len() + 1);
        let mut a = circular_time_shift(&clip, t).unwrap().into_samples();
        let mut b = clip.samples().to_vec();
        a.sort_by(f64::total_cmp);
        b.sort_by(f64::total_cmp);
        prop_assert_eq!(a, b);
    }

    #[test]
    fn gain_round_trip(clip in clip_strategy(1, 500), g in -40.0f64..40.0) {
        let back = apply_gain_db(&apply_gain_db(&clip, g), -g);
        for (a, b) in back.samples().iter().zip(clip.samples()) {
            prop_assert!((a - b).abs() <= 1e-12 * b.abs().max(f64::MIN_POSITIVE));
        }
    }

    #[test]
    fn speed_round_trip_length(clip in clip_strategy(100, 3000), f in 0.5f64..2.0) {
        let back = change_speed(&change_speed(&clip, f).unwrap(), 1.0 / f).unwrap();
        prop_assert!((back.len() as i64 - clip.len() as i64).abs() <= 4);
    }

    #[test]
    fn distortion_is_bounded(v in prop::collection::vec(-1e6f64..1e6, 1..300), k in 1usize..6) {
        let y = harmonic_distortion(&AudioClip::new(v, 8000).unwrap(), k);
        prop_assert!(y.samples().iter().all(|s| s.abs() <= 1.0));
    }
}

// spectrogram augmentation

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn spectro_transforms_keep_shape(img in image_strategy(), seed in any::<u64>()) {
        let mut rng = RngStream::new(seed);
        let (r, c) = (img.rows(), img.cols());
        let mask = MaskSpec::new(2, 2, 2, 2).unwrap();
        let outs = [
            spec_pitch_time_shift(&img, 2, -3).unwrap(),
            spec_circular_time_shift(&img, 4).unwrap(),
            tps_warp_mask(&img, 5, 2.0, &mask, &mut rng).unwrap(),
            freq_time_mask(&img, &mask, &mut rng).unwrap(),
            mult_noise(&img, 0.3, 1.7, 0.5, &mut rng).unwrap(),
        ];
        for o in outs {
            prop_assert_eq!((o.rows(), o.cols()), (r, c));
        }
    }

    #[test]
    fn vtln_unit_alpha_is_identity(img in image_strategy(), slices in 1usize..6, f0 in 0.1f64..0.9) {
        let p = VtlnParams::new(1.0, f0 * 8000.0, 8000.0).unwrap();
        prop_assert_eq!(vtln_warp_slices(&img, &vec![p; slices]).unwrap(), img);
    }

    #[test]
    fn circular_shift_keeps_pixel_sum(img in image_strategy(), t in 1usize..40) {
        let t = (t - 1) % img.cols() + 1;
        prop_assert_eq!(spec_circular_time_shift(&img, t).unwrap().pixel_sum(), img.pixel_sum());
    }

    #[test]
    fn masking_never_adds_energy(img in image_strategy(), seed in any::<u64>(), w in 1usize..4, k in 0usize..4) {
        let mask = MaskSpec::new(w, w, k, k).unwrap();
        let out = freq_time_mask(&img, &mask, &mut RngStream::new(seed)).unwrap();
        prop_assert!(out.pixel_sum() <= img.pixel_sum());
    }
}

// time-scale modification

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn silence_stays_silent(alpha in 0.5f64..2.0, len in 1100usize..4000) {
        let clip = AudioClip::new(vec![0.0; len], 16000).unwrap();
        for alg in TsmAlgorithm::ALL {
            let y = alg.stretch(&clip, alpha).unwrap();
            prop_assert!(y.samples().iter().all(|&v| v == 0.0), "{}", alg);
        }
    }

    #[test]
    fn length_law(alpha in 0.5f64..2.0, clip in clip_strategy(1100, 5000)) {
        for alg in TsmAlgorithm::ALL {
            let y = alg.stretch(&clip, alpha).unwrap();
            let want = (alpha * clip.len() as f64).round();
            prop_assert!((y.len() as f64 - want).abs() <= DEFAULT_WINDOW as f64, "{} {}", alg, y.len());
        }
    }

    #[test]
    fn zero_tolerance_wsola_is_ola(alpha in 0.5f64..2.0, clip in clip_strategy(1100, 5000)) {
        let p = TsmParams::ola_default(alpha).unwrap();
        prop_assert_eq!(wsola(&clip, &WsolaParams::new(p, 0)).unwrap(), ola(&clip, &p).unwrap());
    }
}

// fusion

fn members_strategy() -> impl Strategy<Value = Vec<ScoreMatrix>> {
    (1usize..8, 1usize..12, 2usize..6, any::<u64>()).prop_map(|(k, n, c, seed)| {
        let mut rng = RngStream::new(seed);
        let ids: Vec<String> = (0..n).map(|i| format!("p{i}")).collect();
        let names: Vec<String> = (0..c).map(|i| format!("c{i}")).collect();
        (0..k)
            .map(|m| {
                let s = (0..n * c).map(|_| rng.uniform(-3.0, 3.0).unwrap()).collect();
                ScoreMatrix::new(ids.clone(), names.clone(), s, format!("m{m}")).unwrap()
            })
            .collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sum_rule_ignores_member_order(members in members_strategy(), seed in any::<u64>()) {
        let mut shuffled = members.clone();
        let mut rng = RngStream::new(seed);
        for i in (1..shuffled.len()).rev() {
            let j = rng.int_inclusive(0, i as i64) as usize;
            shuffled.swap(i, j);
        }
        let (a, b) = (sum_rule(&shuffled).unwrap(), sum_rule(&members).unwrap());
        prop_assert_eq!(a.scores(), b.scores());
    }

    #[test]
    fn fused_argmax_survives_common_affine_map(members in members_strategy(), a in 0.1f64..10.0, b in -10.0f64..10.0) {
        let mapped: Vec<ScoreMatrix> = members.iter().map(|m| m.map(|v| a * v + b)).collect();
        prop_assert_eq!(predict(&sum_rule(&mapped).unwrap()), predict(&sum_rule(&members).unwrap()));
    }

    #[test]
    fn sanitize_is_idempotent(v in prop::collection::vec(prop_oneof![Just(f64::NAN), Just(f64::INFINITY), -5.0f64..5.0], 2..40)) {
        let n = v.len() / 2;
        let m = ScoreMatrix::new((0..n).map(|i| i.to_string()).collect(), vec!["a".into(), "b".into()], v[..2 * n].to_vec(), "t").unwrap();
        let once = sanitize(&m);
        prop_assert_eq!(sanitize(&once), once);
    }

    #[test]
    fn copies_of_one_classifier_fuse_to_itself(members in members_strategy(), k in 1usize..10) {
        let one = &members[0];
        prop_assert_eq!(predict(&sum_rule(&vec![one.clone(); k]).unwrap()), predict(one));
    }

    #[test]
    fn mean_accuracy_between_fold_extremes(members in members_strategy(), folds in 1usize..4, seed in any::<u64>()) {
        let m = &members[0];
        let n = m.n_patterns();
        prop_assume!(n >= folds);
        let mut rng = RngStream::new(seed);
        let truth: Truth = m.pattern_ids().iter().map(|id| (id.clone(), rng.int_inclusive(0, m.n_classes() as i64 - 1) as usize)).collect();
        let splits: Vec<FoldSplit> = (0..folds)
            .map(|f| {
                let test = m.pattern_ids().iter().enumerate().filter(|(i, _)| i % folds == f).map(|(_, id)| id.clone()).collect();
                FoldSplit::new(f + 1, vec![], test).unwrap()
            })
            .collect();
        let r = evaluate(&splits, m, &truth).unwrap();
        let lo = r.fold_accuracy.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = r.fold_accuracy.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        prop_assert!(lo <= r.mean_accuracy && r.mean_accuracy <= hi);
    }
}

// pipeline seeding

proptest! {
    #[test]
    fn derived_seeds_are_deterministic(global in any::<u64>(), id in "[a-z0-9_]{0,24}", copy in 0u64..100, op in 0u64..8) {
        let s = derive_seed(global, &id, copy, op);
        prop_assert_eq!(s, derive_seed(global, &id, copy, op));
        prop_assert_eq!(s.counter(), 0);
        prop_assert_ne!(s.seed(), derive_seed(global, &id, copy + 1, op).seed());
        prop_assert_ne!(s.seed(), derive_seed(global ^ 1, &id, copy, op).seed());
    }
}
