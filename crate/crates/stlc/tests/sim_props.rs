use nalgebra::DVector;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use stlc::codebook::{build, CodeDescriptor, Family};
use stlc::fd::{b_h, classify};
use stlc::lattice::vectorize;
use stlc::sim::{
    calibrate_noise, draw_channel, gaussian_matrix, ml_exhaustive, run_campaign, sphere_decode, to_csv, trial_rng,
    Alphabet, CampaignOptions, ChannelConfig, Decoder, SearchPlan, CSV_HEADER,
};
use stlc::{CMat, Error, WeightBasis, C64};

fn code(f: Family) -> WeightBasis {
    build(&CodeDescriptor::new(f)).unwrap()
}

fn scaled(b: &WeightBasis, s: f64) -> WeightBasis {
    WeightBasis::new("scaled", b.mats.iter().map(|m| m * C64::new(s, 0.0)).collect()).unwrap()
}

fn coeffs(a: &Alphabet, k: usize, rng: &mut impl Rng) -> Vec<i64> {
    (0..k).map(|_| a.values[rng.random_range(0..a.len())]).collect()
}

fn f64s(s: &[i64]) -> Vec<f64> {
    s.iter().map(|&v| v as f64).collect()
}

/// Empirical E‖HX‖² / E‖N‖² over independent draws.
fn measured_snr(b: &WeightBasis, a: &Alphabet, cfg: &ChannelConfig, sigma_n: f64, samples: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut ps, mut pn) = (0.0, 0.0);
    for _ in 0..samples {
        let h = gaussian_matrix(cfg.nr, cfg.nt, cfg.sigma_h, &mut rng);
        let x = b.combine(&f64s(&coeffs(a, b.k(), &mut rng)));
        ps += (h * x).norm_squared();
        pn += gaussian_matrix(cfg.nr, cfg.t, sigma_n, &mut rng).norm_squared();
    }
    ps / pn
}

#[test]
fn channel_draws() {
    let cfg = ChannelConfig::new(2, 2, 2, vec![0.0], 1, 7).unwrap();
    assert_eq!(draw_channel(&cfg, 5), draw_channel(&cfg, 5));
    assert_ne!(draw_channel(&cfg, 5), draw_channel(&cfg, 6));
    let mut rng = trial_rng(7, 0);
    let n = 100_000;
    let mean = (0..n).map(|_| gaussian_matrix(1, 1, cfg.sigma_h, &mut rng)[(0, 0)].norm_sqr()).sum::<f64>() / n as f64;
    assert!((mean - 1.0).abs() < 0.02, "E|h|² = {mean}");
}

#[test]
fn noise_calibration() {
    let b = code(Family::Alamouti);
    let a = Alphabet::pam(2).unwrap();
    let cfg = ChannelConfig::for_basis(&b, vec![], 1, 3).unwrap();
    for snr_db in [0.0, 10.0] {
        let sigma = calibrate_noise(&b, &a, &cfg, snr_db).unwrap();
        let got = measured_snr(&b, &a, &cfg, sigma, 100_000, 99);
        let want = 10f64.powf(snr_db / 10.0);
        assert!((got / want - 1.0).abs() < 0.01, "{snr_db} dB: {got} vs {want}");
    }
    let sigma = calibrate_noise(&b, &a, &cfg, 0.0).unwrap();
    let base = measured_snr(&b, &a, &cfg, sigma, 20_000, 5);
    let doubled = measured_snr(&scaled(&b, 2f64.sqrt()), &a, &cfg, sigma, 20_000, 5);
    let gain = 10.0 * (doubled / base).log10();
    assert!((gain - 3.0103).abs() < 1e-3, "gain {gain}");
    assert!(matches!(calibrate_noise(&b, &Alphabet::new(vec![0]).unwrap(), &cfg, 0.0), Err(Error::ZeroPower)));
}

#[test]
fn noiseless_recovery() {
    let a = Alphabet::pam(2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for f in Family::ALL {
        let b = code(f);
        let plan = SearchPlan::from_profile(&classify(&b, 0).unwrap());
        for _ in 0..5 {
            let h = gaussian_matrix(b.nt, b.nt, std::f64::consts::FRAC_1_SQRT_2, &mut rng);
            let s = coeffs(&a, b.k(), &mut rng);
            let y = &h * b.combine(&f64s(&s));
            if b.k() <= 16 {
                assert_eq!(ml_exhaustive(&y, &h, &b, &a).unwrap().coeffs, s, "{f}");
            }
            let d = sphere_decode(&y, &h, &b, &a, Some(&plan)).unwrap();
            assert_eq!(d.coeffs, s, "{f}");
            assert!(d.metric.abs() < 1e-9);
        }
    }
}

#[test]
fn ml_guard() {
    let b = code(Family::Iterated);
    let h = CMat::identity(b.nt, b.nt);
    let y = CMat::zeros(b.nt, b.t);
    let r = ml_exhaustive(&y, &h, &b, &Alphabet::pam(2).unwrap());
    assert!(matches!(r, Err(Error::SearchTooLarge { .. })));
}

#[test]
fn alamouti_high_snr() {
    let b = code(Family::Alamouti);
    let a = Alphabet::pam(2).unwrap();
    let cfg = ChannelConfig::for_basis(&b, vec![20.0], 1000, 4).unwrap();
    let opts = CampaignOptions { decoder: Decoder::Ml, plan: None, timing: false };
    let rows = run_campaign(&b, &a, &cfg, &opts).unwrap();
    assert!(rows[0].cer_ml.unwrap() < 0.01, "{:?}", rows[0]);
    assert!(rows[0].cer_sphere.is_none());
}

#[test]
fn error_rate_falls_with_snr() {
    let b = code(Family::Alamouti);
    let a = Alphabet::pam(2).unwrap();
    let grid = vec![0.0, 5.0, 10.0, 15.0, 20.0];
    let n = 10_000;
    let cfg = ChannelConfig::for_basis(&b, grid, n, 8).unwrap();
    let plan = SearchPlan::from_profile(&classify(&b, 0).unwrap());
    let opts = CampaignOptions { decoder: Decoder::Sphere, plan: Some(plan), timing: false };
    let rows = run_campaign(&b, &a, &cfg, &opts).unwrap();
    for w in rows.windows(2) {
        let (p0, p1) = (w[0].cer_sphere.unwrap(), w[1].cer_sphere.unwrap());
        let slack = 3.0 * ((p0 * (1.0 - p0) + p1 * (1.0 - p1)) / n as f64).sqrt();
        assert!(p1 <= p0 + slack, "{p0} -> {p1}");
    }
    assert!(rows[4].cer_sphere.unwrap() < rows[0].cer_sphere.unwrap());
}

#[test]
fn campaign_csv_shape() {
    let b = code(Family::Golden);
    let a = Alphabet::pam(2).unwrap();
    let cfg = ChannelConfig::for_basis(&b, vec![5.0, 10.0], 20, 1).unwrap();
    let opts = CampaignOptions { decoder: Decoder::Both, plan: None, timing: false };
    let csv = to_csv(&run_campaign(&b, &a, &cfg, &opts).unwrap());
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], CSV_HEADER);
    assert_eq!(lines.len(), 3);
    assert!(lines[1..].iter().all(|l| l.split(',').count() == 7));
    let empty = ChannelConfig::for_basis(&b, vec![5.0], 0, 1).unwrap();
    assert!(run_campaign(&b, &a, &empty, &opts).unwrap().is_empty());
}

/// Multi-group codes search each group on its own: nodes stay within the per-group trees.
#[test]
fn multi_group_node_counts() {
    let a = Alphabet::pam(2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for f in [Family::Alamouti, Family::MimoRelay, Family::Iterated] {
        let b = code(f);
        let p = classify(&b, 0).unwrap();
        let plan = SearchPlan::from_profile(&p);
        let cap: u64 = p.groups.iter().map(|g| 2u64.pow(g.len() as u32 + 1)).sum();
        let cfg = ChannelConfig::for_basis(&b, vec![], 1, 2).unwrap();
        let sigma = calibrate_noise(&b, &a, &cfg, 15.0).unwrap();
        for _ in 0..5 {
            let h = gaussian_matrix(b.nt, b.nt, cfg.sigma_h, &mut rng);
            let s = coeffs(&a, b.k(), &mut rng);
            let y = &h * b.combine(&f64s(&s)) + gaussian_matrix(b.nt, b.t, sigma, &mut rng);
            let d = sphere_decode(&y, &h, &b, &a, Some(&plan)).unwrap();
            assert!(d.nodes_visited <= cap, "{f}: {} > {cap}", d.nodes_visited);
            assert!((d.nodes_visited as f64) < 2f64.powi(b.k() as i32));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn vectorized_equivalence(seed in any::<u64>(), which in 0usize..3) {
        let b = code([Family::Alamouti, Family::Golden, Family::Silver][which]);
        let a = Alphabet::pam(4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = gaussian_matrix(b.nt, b.nt, 0.7, &mut rng);
        let s = coeffs(&a, b.k(), &mut rng);
        let y = gaussian_matrix(b.nt, b.t, 3.0, &mut rng);
        let lhs = (&y - &h * b.combine(&f64s(&s))).norm();
        let bh = b_h(&b, &h).unwrap();
        let rhs = (vectorize(&y) - bh * DVector::from_vec(f64s(&s))).norm();
        prop_assert!((lhs - rhs).abs() <= 1e-9 * (1.0 + lhs));
    }

    #[test]
    fn sphere_matches_ml(seed in any::<u64>(), which in 0usize..3, snr in 0.0f64..20.0) {
        let f = [Family::Alamouti, Family::Golden, Family::Silver][which];
        let b = code(f);
        let a = if f == Family::Alamouti { Alphabet::pam(4).unwrap() } else { Alphabet::pam(2).unwrap() };
        let cfg = ChannelConfig::for_basis(&b, vec![], 1, seed).unwrap();
        let sigma = calibrate_noise(&b, &a, &cfg, snr).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = gaussian_matrix(b.nt, b.nt, cfg.sigma_h, &mut rng);
        let s = coeffs(&a, b.k(), &mut rng);
        let y = &h * b.combine(&f64s(&s)) + gaussian_matrix(b.nt, b.t, sigma, &mut rng);
        let ml = ml_exhaustive(&y, &h, &b, &a).unwrap();
        let plan = SearchPlan::from_profile(&classify(&b, 0).unwrap());
        for p in [None, Some(&plan)] {
            let sd = sphere_decode(&y, &h, &b, &a, p).unwrap();
            prop_assert_eq!(&sd.coeffs, &ml.coeffs);
            prop_assert!((sd.metric - ml.metric).abs() <= 1e-9 * (1.0 + ml.metric));
        }
        let bh = b_h(&b, &h).unwrap();
        let direct = (vectorize(&y) - bh * DVector::from_vec(f64s(&ml.coeffs))).norm_squared();
        prop_assert!((direct - ml.metric).abs() <= 1e-9 * (1.0 + direct));
        prop_assert!(ml.coeffs.iter().all(|v| a.values.contains(v)));
    }
}
