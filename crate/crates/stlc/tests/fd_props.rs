use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use stlc::codebook::{build, CodeDescriptor, Family};
use stlc::fd::{
    bounds_check, classify, hurwitz_radon, is_full_rate, r_factor, r_matrix, DecodabilityProfile, DecodeFamily,
    ZERO_TOL,
};
use stlc::linalg::max_abs;
use stlc::sim::gaussian_matrix;
use stlc::{CMat, WeightBasis, C64};

fn code(f: Family) -> WeightBasis {
    build(&CodeDescriptor::new(f)).unwrap()
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn sorted_sizes(p: &DecodabilityProfile) -> (Vec<usize>, usize) {
    let mut s: Vec<usize> = p.groups.iter().map(Vec::len).collect();
    s.sort_unstable();
    (s, p.conditioned.len())
}

fn check_partition(p: &DecodabilityProfile) {
    let mut all: Vec<usize> = p.groups.iter().flatten().chain(&p.conditioned).cloned().collect();
    all.sort_unstable();
    assert_eq!(all, (0..p.k).collect::<Vec<_>>());
}

#[test]
fn hurwitz_radon_examples() {
    let a = hurwitz_radon(&code(Family::Alamouti), ZERO_TOL);
    assert_eq!(a.edge_count(), 0);
    let g = hurwitz_radon(&code(Family::Golden), ZERO_TOL);
    assert!(g.edge_count() > 0);
    let i = CMat::identity(2, 2);
    let b = WeightBasis::new("pair", vec![i.clone(), i * c(0.0, 1.0)]).unwrap();
    assert!(hurwitz_radon(&b, ZERO_TOL).delta[(0, 1)].abs() < 1e-15);
}

#[test]
fn matrix_units_with_identity_channel() {
    let e11 = CMat::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
    let e12 = CMat::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
    let b = WeightBasis::new("units", vec![e11, e12]).unwrap();
    let p = r_matrix(&b, &CMat::identity(2, 2), &[0, 1], ZERO_TOL).unwrap();
    assert!(p.zero_mask[0][1] && p.zero_mask[1][0]);
    assert!(!p.zero_mask[0][0] && !p.zero_mask[1][1]);
}

#[test]
fn shipped_profiles_are_consistent() {
    for f in Family::ALL {
        let b = code(f);
        let p = classify(&b, 8).unwrap();
        check_partition(&p);
        assert!(p.k_prime <= p.k, "{f}");
        assert_eq!(p.fast_decodable, p.k_prime + 2 < p.k, "{f}");
        if matches!(p.family, DecodeFamily::MultiGroup | DecodeFamily::ConditionalMultiGroup) {
            let max = p.groups.iter().map(Vec::len).max().unwrap();
            assert_eq!(p.k_prime, p.conditioned.len() + max, "{f}");
        }
        assert!(bounds_check(&p, b.nt, is_full_rate(&b)).is_empty(), "{f}");
    }
}

#[test]
fn bounds_examples() {
    let p = classify(&code(Family::Alamouti), 0).unwrap();
    assert!(bounds_check(&p, 2, false).is_empty());
    let mut fake = p.clone();
    fake.groups = (0..8).map(|i| vec![i]).collect();
    assert!(bounds_check(&fake, 2, false)[0].starts_with("group bound"));
    let g = classify(&code(Family::Golden), 0).unwrap();
    assert_eq!(g.k_prime, 6);
    assert!(bounds_check(&g, 2, true).is_empty());
    let mut fast = g.clone();
    fast.k_prime = 4;
    assert!(bounds_check(&fast, 2, true)[0].starts_with("full-rate bound"));
}

/// Permutes the basis and checks the profile is carried along.
fn permuted(b: &WeightBasis, perm: &[usize]) -> WeightBasis {
    WeightBasis::new("perm", perm.iter().map(|&i| b.mats[i].clone()).collect()).unwrap()
}

fn random_unitary(n: usize, seed: u64) -> CMat {
    let g = gaussian_matrix(n, n, 1.0, &mut ChaCha8Rng::seed_from_u64(seed));
    g.qr().q()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn permutation_invariance(which in 0usize..4, perm_seed in any::<u64>()) {
        let f = [Family::Alamouti, Family::Golden, Family::Silver, Family::SrinathRajan][which];
        let b = code(f);
        let mut perm: Vec<usize> = (0..b.k()).collect();
        use rand::seq::SliceRandom;
        perm.shuffle(&mut ChaCha8Rng::seed_from_u64(perm_seed));
        let (p, q) = (classify(&b, 0).unwrap(), classify(&permuted(&b, &perm), 0).unwrap());
        prop_assert_eq!(p.k_prime, q.k_prime);
        prop_assert_eq!(p.family, q.family);
        prop_assert_eq!(sorted_sizes(&p), sorted_sizes(&q));
        let hp = hurwitz_radon(&b, ZERO_TOL);
        let hq = hurwitz_radon(&permuted(&b, &perm), ZERO_TOL);
        for i in 0..b.k() {
            for j in 0..b.k() {
                prop_assert_eq!(hp.adj[perm[i]][perm[j]], hq.adj[i][j]);
            }
        }
    }

    #[test]
    fn unitary_invariance(which in 0usize..4, seed in any::<u64>()) {
        let f = [Family::Alamouti, Family::Golden, Family::Silver, Family::SimoRelay][which];
        let b = code(f);
        let u = random_unitary(b.nt, seed);
        let rotated = WeightBasis::new("rot", b.mats.iter().map(|m| &u * m).collect()).unwrap();
        let (hp, hq) = (hurwitz_radon(&b, ZERO_TOL), hurwitz_radon(&rotated, ZERO_TOL));
        let scale = hp.delta.amax();
        prop_assert!((&hp.delta - &hq.delta).amax() <= 1e-9 * scale);
        let (p, q) = (classify(&b, 0).unwrap(), classify(&rotated, 0).unwrap());
        prop_assert_eq!(p.k_prime, q.k_prime);
        prop_assert_eq!(sorted_sizes(&p), sorted_sizes(&q));
    }
}

/// r_ij vanishes for every mutually orthogonal pair under the profile ordering,
/// for all shipped codes on 100 channels.
#[test]
fn orthogonality_zeros_in_r() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for f in Family::ALL {
        let b = code(f);
        let hr = hurwitz_radon(&b, ZERO_TOL);
        let order = classify(&b, 0).unwrap().ordering();
        let k = b.k();
        let expected = DMatrix::from_fn(k, k, |i, j| i < j && !hr.adj[order[i]][order[j]]);
        for _ in 0..100 {
            let h = gaussian_matrix(b.nt, b.nt, std::f64::consts::FRAC_1_SQRT_2, &mut rng);
            let r = r_factor(&b, &h, &order).unwrap();
            let tol = 1e-6 * max_abs(&r);
            for j in 0..k {
                for i in 0..j {
                    if expected[(i, j)] {
                        assert!(r[(i, j)].abs() <= tol, "{f}: r[{i},{j}] = {}", r[(i, j)]);
                    }
                }
            }
        }
    }
}
