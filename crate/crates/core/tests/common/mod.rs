#![allow(dead_code)]

use pdtomo::linalg::Matrix;
use pdtomo::model::{random_devices, synthesize, CorrelationConfig, CorrelationKind, Devices};
use pdtomo::pd::partial_determinant;
use pdtomo::schemes::{build_square, enumerate, BracketScheme, SettingSelection};
use pdtomo::tensor::Tensor;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub const D: usize = 2;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> Matrix<f64> {
    Matrix::from_fn(rows, cols, |_, _| rng.sample(StandardNormal))
}

/// `n×n` with rank at most `r`.
pub fn low_rank(n: usize, r: usize, rng: &mut ChaCha8Rng) -> Matrix<f64> {
    gaussian(n, r, rng).matmul(&gaussian(r, n, rng)).unwrap()
}

/// Every scheme of every class on `m` qudits.
pub fn all_schemes(m: usize) -> Vec<BracketScheme> {
    (1..=m).flat_map(|k| enumerate(m, D, k).unwrap().schemes).collect()
}

/// Devices with enough settings for every enumerated scheme.
pub fn sweep_devices(m: usize, seed: u64) -> Devices {
    let mut needed = vec![0; m + 1];
    for s in all_schemes(m) {
        for (n, s) in needed.iter_mut().zip(s.settings_needed()) {
            *n = (*n).max(s);
        }
    }
    random_devices(m, D, needed[0], &needed[1..], seed).unwrap()
}

pub fn data(devices: &Devices, kind: CorrelationKind, epsilon: f64, seed: u64) -> Tensor<f64> {
    let config = if kind == CorrelationKind::None {
        CorrelationConfig::none()
    } else {
        CorrelationConfig::new(kind, epsilon, seed).unwrap()
    };
    synthesize(devices, &config).unwrap()
}

pub fn score(s: &Tensor<f64>, scheme: &BracketScheme) -> f64 {
    let sq = build_square(s, scheme, &SettingSelection::standard()).unwrap();
    partial_determinant(&sq).unwrap().frobenius_score
}
