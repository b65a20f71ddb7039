mod common;

use common::*;
use pdtomo::linalg::{determinant, invert, numerical_rank, Matrix};
use pdtomo::pd::{
    assemble_square, gauge_transform, partial_determinant, pd_variants, reduced_pd, translation, triviality_test,
    Translation, Variant, DEFAULT_THRESHOLD,
};
use pdtomo::{RealMatrix, RealMatrix32};
use proptest::prelude::*;

fn perm(n: usize, rng: &mut rand_chacha::ChaCha8Rng) -> Matrix<f64> {
    use rand::seq::SliceRandom;
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(rng);
    Matrix::permutation(&p)
}

#[test]
fn pd_is_identity_iff_rank_at_most_half() {
    for r in [2, 4, 9, 16] {
        let mut rng = rng(1000 + r as u64);
        for _ in 0..100 {
            let low = low_rank(2 * r, r, &mut rng);
            let pd = partial_determinant(&assemble_square(&low).unwrap()).unwrap();
            assert!(pd.frobenius_score < 1e-7, "r={r}: {:e}", pd.frobenius_score);
            assert!(numerical_rank(&low, 1e-10).unwrap().numerical_rank <= r);

            let full = gaussian(2 * r, 2 * r, &mut rng);
            let pd = partial_determinant(&assemble_square(&full).unwrap()).unwrap();
            assert!(pd.frobenius_score > 1e-2, "r={r}: {:e}", pd.frobenius_score);
            assert_eq!(numerical_rank(&full, 1e-10).unwrap().numerical_rank, 2 * r);
        }
    }
}

#[test]
fn scalar_example() {
    let sq = assemble_square(&Matrix::from_rows(&[[1.0f64, 2.0], [3.0, 4.0]])).unwrap();
    let pd = partial_determinant(&sq).unwrap();
    assert!((pd.delta[(0, 0)] - 1.5).abs() < 1e-15);
    let report = triviality_test(&pd, DEFAULT_THRESHOLD);
    assert!(!report.trivial);
    assert!((report.frobenius_score - 0.5).abs() < 1e-15);
}

#[test]
fn variants_are_conjugates_or_inverses() {
    let mut rng = rng(7);
    for r in [2, 4, 9] {
        for _ in 0..20 {
            let sq = assemble_square(&gaussian(2 * r, 2 * r, &mut rng)).unwrap();
            let v = pd_variants(&sq).unwrap();
            let get = |which: Variant| v.iter().find(|(w, _)| *w == which).unwrap().1.delta.clone();
            let delta = get(Variant::Abdc);
            let delta_inv = invert(&delta).unwrap();
            let (a, b, c, d) = (&sq.a, &sq.b, &sq.c, &sq.d);
            let ai = invert(a).unwrap();
            let bi = invert(b).unwrap();
            let di = invert(d).unwrap();
            let conj = |g: &RealMatrix, x: &RealMatrix, gi: &RealMatrix| &(g * x) * gi;
            let expect = [
                (Variant::Bdca, conj(a, &delta, &ai)),
                (Variant::Dcab, conj(&(&di * c), &delta, &invert(&(&di * c)).unwrap())),
                (Variant::Cabd, conj(c, &delta, &invert(c).unwrap())),
                (Variant::Cdba, delta_inv.clone()),
                (Variant::Dbac, conj(c, &delta_inv, &invert(c).unwrap())),
                (Variant::Bacd, conj(&(&bi * a), &delta_inv, &(&ai * b))),
                (Variant::Acdb, conj(a, &delta_inv, &ai)),
            ];
            for (which, want) in expect {
                let got = get(which);
                let scale = 1.0 + want.max_abs();
                assert!(got.max_abs_diff(&want) / scale < 1e-8, "{which}: {:e}", got.max_abs_diff(&want));
            }
        }
    }
}

#[test]
fn trivial_square_has_eight_identities() {
    let mut rng = rng(8);
    let sq = assemble_square(&low_rank(8, 4, &mut rng)).unwrap();
    for (which, pd) in pd_variants(&sq).unwrap() {
        assert!(pd.frobenius_score < 1e-8, "{which}");
    }
}

#[test]
fn gauge_transforms() {
    let mut rng = rng(9);
    for r in [2, 4, 9] {
        let sq = assemble_square(&gaussian(2 * r, 2 * r, &mut rng)).unwrap();
        let delta = partial_determinant(&sq).unwrap().delta;

        let p: Vec<_> = (0..4).map(|_| perm(r, &mut rng)).collect();
        let t = gauge_transform(&sq, [&p[0], &p[1]], [&p[2], &p[3]]).unwrap();
        let got = partial_determinant(&t).unwrap().delta;
        let want = &(&p[2].transpose() * &delta) * &p[2];
        assert!(got.max_abs_diff(&want) < 1e-9);

        let id = Matrix::identity(r);
        let g: Vec<_> = (0..3).map(|_| gaussian(r, r, &mut rng)).collect();
        let t = gauge_transform(&sq, [&g[0], &g[1]], [&id, &g[2]]).unwrap();
        let got = partial_determinant(&t).unwrap().delta;
        assert!(got.max_abs_diff(&delta) / (1.0 + delta.max_abs()) < 1e-9);

        let t = gauge_transform(&sq, [&id, &id], [&g[0], &id]).unwrap();
        let got = partial_determinant(&t).unwrap().delta;
        let want = &(&invert(&g[0]).unwrap() * &delta) * &g[0];
        assert!(got.max_abs_diff(&want) / (1.0 + want.max_abs()) < 1e-8);
    }
}

#[test]
fn reduced_identities() {
    for r in [1, 3, 4, 8] {
        let mut rng = rng(500 + r as u64);
        for _ in 0..200 {
            let full = gaussian(r + 1, r + 1, &mut rng);
            let red = reduced_pd(&full).unwrap();
            let sq = &red.square;
            let dets = [&sq.a, &sq.b, &sq.c, &sq.d].map(|m| determinant(m).unwrap());
            let ratio = dets[1] * dets[2] / (dets[0] * dets[3]);
            assert!((red.x - ratio).abs() <= 1e-8 * ratio.abs().max(1.0), "r={r}");
            // |x| can reach 1e4, so the bound is taken relative to Δ's scale
            let scale = 1.0 + red.delta.max_abs();
            assert!(red.residual / scale < 1e-9, "r={r}: {:e} x={}", red.residual, red.x);
            assert!((red.x - 1.0).abs() > 1e-3, "r={r}: x={}", red.x);
            for v in red.variants().unwrap() {
                let scale = 1.0 + v.direct.max_abs();
                assert!(v.residual / scale < 1e-9, "r={r} {}: {:e}", v.variant, v.residual);
            }

            let low = low_rank(r + 1, r, &mut rng);
            let red = reduced_pd(&low).unwrap();
            assert!((red.x - 1.0).abs() < 1e-8, "r={r}: x={}", red.x);
            assert!(red.is_trivial(1e-8));
        }
    }
}

#[test]
fn rank_three_four_by_four() {
    let mut rng = rng(10);
    let s = low_rank(4, 3, &mut rng);
    let red = reduced_pd(&s).unwrap();
    assert!((red.x - 1.0).abs() < 1e-8);
    assert!(red.delta.max_abs_diff(&Matrix::identity(3)) < 1e-8);
}

#[test]
fn single_precision_pipeline() {
    let mut rng = rng(11);
    let low: RealMatrix32 = low_rank(8, 4, &mut rng).cast();
    let pd = partial_determinant(&assemble_square(&low).unwrap()).unwrap();
    assert!(pd.frobenius_score < 1e-3, "{}", pd.frobenius_score);
    let full: RealMatrix32 = gaussian(8, 8, &mut rng).cast();
    let pd = partial_determinant(&assemble_square(&full).unwrap()).unwrap();
    assert!(pd.frobenius_score > 1e-2);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn translations_compose(r in 2usize..8, seed in any::<u64>()) {
        let mut rng = rng(seed);
        let v1: Vec<f64> = gaussian(1, r - 1, &mut rng).into_vec();
        let v2: Vec<f64> = gaussian(1, r - 1, &mut rng).into_vec();
        let sum: Vec<f64> = v1.iter().zip(&v2).map(|(a, b)| a + b).collect();
        for kind in [Translation::Alpha, Translation::Beta, Translation::Gamma, Translation::Delta] {
            let prod = &translation(kind, &v1) * &translation(kind, &v2);
            prop_assert!(prod.max_abs_diff(&translation(kind, &sum)) < 1e-12);
        }
    }

    #[test]
    fn row_mixing_never_changes_the_decision(r in 1usize..6, rank_deficient in any::<bool>(), seed in any::<u64>()) {
        let mut rng = rng(seed);
        let m = if rank_deficient { low_rank(2 * r, r, &mut rng) } else { gaussian(2 * r, 2 * r, &mut rng) };
        let sq = assemble_square(&m).unwrap();
        let g: Vec<_> = (0..4).map(|_| gaussian(r, r, &mut rng)).collect();
        let t = gauge_transform(&sq, [&g[0], &g[1]], [&g[2], &g[3]]).unwrap();
        let (Ok(before), Ok(after)) = (partial_determinant(&sq), partial_determinant(&t)) else {
            return Ok(());
        };
        if before.corner_conditions.iter().chain(&after.corner_conditions).any(|&k| k > 1e6) {
            return Ok(());
        }
        prop_assert_eq!(before.frobenius_score < 1e-6, after.frobenius_score < 1e-6);
        prop_assert_eq!(before.frobenius_score < 1e-6, rank_deficient);
    }
}
