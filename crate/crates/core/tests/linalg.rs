mod common;

use common::*;
use pdtomo::linalg::{
    condition_number, determinant, invert, invert_checked, numerical_rank, schur_complement, singular_values,
    LinalgError, Matrix,
};
use pdtomo::model::Provenance;
use pdtomo::tensor::{flatten, unflatten, AxisSelection, FusedIndexMap, SplitDescriptor, Tensor};
use proptest::prelude::*;

#[test]
fn ill_conditioned_inverse_fails_loudly() {
    let m = Matrix::from_rows(&[[1.0f64, 1.0], [1.0, 1.0 + 1e-12]]);
    assert!(matches!(invert_checked(&m, 1e8), Err(LinalgError::IllConditioned { .. })));
    assert!(matches!(invert(&Matrix::<f64>::zeros(2, 3)), Err(LinalgError::NonSquare { .. })));
}

#[test]
fn determinant_of_diagonal() {
    let m = Matrix::diagonal(&[2.0f64, -3.0, 0.5]);
    assert!((determinant(&m).unwrap() + 3.0).abs() < 1e-14);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn inverse_residual_scales_with_condition(n in 1usize..12, seed in any::<u64>()) {
        let m = gaussian(n, n, &mut rng(seed));
        let inv = invert_checked(&m, 1e8);
        prop_assume!(inv.is_ok());
        let inv = inv.unwrap();
        let residual = (&inv.inverse * &m).max_abs_diff(&Matrix::identity(n));
        prop_assert!(residual <= 1e-10 * inv.condition.max(1.0));
        if inv.condition < 1e4 {
            prop_assert!(invert(&inv.inverse).unwrap().max_abs_diff(&m) < 1e-8);
        }
    }

    #[test]
    fn determinant_is_multiplicative(n in 1usize..8, seed in any::<u64>()) {
        let mut rng = rng(seed);
        let (a, b) = (gaussian(n, n, &mut rng), gaussian(n, n, &mut rng));
        let (da, db) = (determinant(&a).unwrap(), determinant(&b).unwrap());
        let dab = determinant(&(&a * &b)).unwrap();
        prop_assert!((dab - da * db).abs() <= 1e-10 * (da * db).abs().max(1.0));
    }

    #[test]
    fn singular_values_match_gram_trace(rows in 1usize..10, cols in 1usize..10, seed in any::<u64>()) {
        let m = gaussian(rows, cols, &mut rng(seed));
        let sv = singular_values(&m).unwrap();
        prop_assert!(sv.windows(2).all(|w| w[0] >= w[1]));
        let sum: f64 = sv.iter().map(|s| s * s).sum();
        let fro = m.frobenius_norm();
        prop_assert!((sum - fro * fro).abs() < 1e-10 * fro * fro);
        let k = condition_number(&m);
        if rows == cols {
            let k = k.unwrap();
            prop_assert!((k / (sv[0] / sv[rows - 1])).ln().abs() < (rows as f64).ln() + 1.0);
        }
    }

    #[test]
    fn rank_of_products(n in 2usize..10, r in 1usize..10, seed in any::<u64>()) {
        let r = r.min(n);
        let m = low_rank(n, r, &mut rng(seed));
        prop_assert_eq!(numerical_rank(&m, 1e-10).unwrap().numerical_rank, r);
    }

    #[test]
    fn schur_determinant_identity(r in 1usize..7, seed in any::<u64>()) {
        let s = gaussian(r + 1, r + 1, &mut rng(seed));
        let sc = schur_complement(&s);
        prop_assume!(sc.is_ok());
        let sc = sc.unwrap();
        let interior = s.block(1, 1, r - 1, r - 1);
        let det_m = if r == 1 { 1.0 } else { determinant(&interior).unwrap() };
        let want = determinant(&s).unwrap();
        let got = det_m * sc.determinant();
        prop_assert!((got - want).abs() <= 1e-9 * want.abs().max(1.0));
    }

    #[test]
    fn flatten_unflatten_round_trip(
        shape in prop::collection::vec(1usize..4, 2..5),
        split in any::<prop::sample::Index>(),
        seed in any::<u64>(),
    ) {
        let m = shape.len() - 1;
        let n: usize = shape.iter().product();
        let values = gaussian(1, n, &mut rng(seed)).into_vec();
        let t = Tensor::new(m, 2, shape.clone(), values, Provenance::ingested("p")).unwrap();
        let cut = split.index(shape.len() - 1) + 1;
        let rows: Vec<usize> = (0..cut).collect();
        let cols: Vec<usize> = (cut..shape.len()).collect();
        let desc = SplitDescriptor::full(&shape, &rows, &cols);
        let mat = flatten(&t, &desc).unwrap();
        prop_assert_eq!(mat.shape(), (shape[..cut].iter().product(), shape[cut..].iter().product()));
        let back = unflatten(&mat, &desc, m, 2, Provenance::ingested("p")).unwrap();
        prop_assert_eq!(back.values(), t.values());
    }

    #[test]
    fn fused_index_round_trip(extents in prop::collection::vec(1usize..5, 1..5), pick in any::<prop::sample::Index>()) {
        let map = FusedIndexMap::new(extents);
        let flat = pick.index(map.len());
        prop_assert_eq!(map.fuse(&map.defuse(flat).unwrap()).unwrap(), flat);
    }

    #[test]
    fn selections_read_the_right_entries(seed in any::<u64>()) {
        let shape = vec![3, 4, 2];
        let values = gaussian(1, 24, &mut rng(seed)).into_vec();
        let t = Tensor::new(2, 2, shape, values, Provenance::ingested("p")).unwrap();
        let desc = SplitDescriptor::new(
            vec![AxisSelection::new(0, vec![2, 0]), AxisSelection::new(1, vec![3, 1])],
            vec![AxisSelection::new(2, vec![1])],
        );
        let mat = flatten(&t, &desc).unwrap();
        prop_assert_eq!(mat[(1, 0)], t.get(&[2, 1, 1]));
        prop_assert_eq!(mat[(2, 0)], t.get(&[0, 3, 1]));
    }
}
